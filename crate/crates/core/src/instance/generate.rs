//! Instance generation: customer selection from a Solomon source, sorting by
//! latest arrival time and random AND/OR precedence matrices.

use rand::seq::index;
use rand::Rng as _;
use thiserror::Error;

use super::solomon::SolomonData;
use crate::model::{Instance, InstanceMeta, ModelError, Node, NodeId, PrecedenceMatrix, Relation};
use crate::rng::{self, Rng};

/// Vehicle capacity and fleet size per instance size.
pub const FLEET_TABLE: [(usize, f64, usize); 5] = [
    (10, 100.0, 3),
    (20, 200.0, 4),
    (30, 200.0, 4),
    (40, 300.0, 5),
    (50, 300.0, 5),
];

/// `(capacity, max vehicles)` for `n` customers: the table row for `n`, or
/// the first row with a larger size (the last row beyond 50).
pub fn fleet_defaults(n: usize) -> (f64, usize) {
    let row = FLEET_TABLE
        .iter()
        .find(|(size, _, _)| n <= *size)
        .unwrap_or(&FLEET_TABLE[FLEET_TABLE.len() - 1]);
    (row.1, row.2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub tau: f64,
    pub seed: u64,
    pub customers: usize,
    pub capacity: Option<f64>,
    pub max_vehicles: Option<usize>,
}

impl GeneratorConfig {
    pub fn new(customers: usize, tau: f64, seed: u64) -> Self {
        Self {
            tau,
            seed,
            customers,
            capacity: None,
            max_vehicles: None,
        }
    }

    pub fn fleet(&self) -> (f64, usize) {
        let (q, k) = fleet_defaults(self.customers);
        (self.capacity.unwrap_or(q), self.max_vehicles.unwrap_or(k))
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("{source_name} has {available} customers, {requested} requested")]
    TooFewCustomers {
        source_name: String,
        available: usize,
        requested: usize,
    },
    #[error("tau must lie in [0, 1], got {0}")]
    BadTau(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Stable instance name, e.g. `RC208-10-t0.4`.
pub fn instance_name(source: &str, n: usize, tau: f64) -> String {
    format!("{source}-{n}-t{tau}")
}

/// Re-indexes customers `1..=n` by increasing latest time, ties broken by the
/// original id.
pub fn sort_by_latest(customers: &mut [Node]) {
    customers.sort_by(|a, b| a.late.total_cmp(&b.late).then(a.origin.cmp(&b.origin)));
    for (i, c) in customers.iter_mut().enumerate() {
        c.id = NodeId(i + 1);
    }
}

/// Draws a precedence matrix over customers already sorted by latest time.
///
/// Column `j` (from 2 to n) gets predecessors with probability `tau`; the
/// count is integer-uniform on `[0, j-1]`, the predecessors are sampled
/// without replacement from `1..j` and each is AND or OR with probability
/// one half. Predecessors are visited in increasing index order when
/// drawing the relation type.
pub fn precedence_matrix(n: usize, tau: f64, rng: &mut Rng) -> PrecedenceMatrix {
    let mut triples = Vec::new();
    for j in 2..=n {
        let u: f64 = rng.gen();
        if u > tau {
            continue;
        }
        let count = rng.gen_range(0..=j - 1);
        let mut preds = index::sample(rng, j - 1, count).into_vec();
        preds.sort_unstable();
        for p in preds {
            let v: f64 = rng.gen();
            let r = if v < 0.5 { Relation::And } else { Relation::Or };
            triples.push((p + 1, j, r));
        }
    }
    PrecedenceMatrix::from_triples(n, triples).expect("generated pairs are upper triangular")
}

/// Sorts `customers` in place and draws their precedence matrix.
pub fn generate_precedence(
    customers: &mut [Node],
    cfg: &GeneratorConfig,
    rng: &mut Rng,
) -> PrecedenceMatrix {
    sort_by_latest(customers);
    precedence_matrix(customers.len(), cfg.tau, rng)
}

fn precedence_label(name: &str) -> String {
    format!("{name}/precedence")
}

/// Builds the instance formed by the first `cfg.customers` customers of
/// `source`.
pub fn build_instance(
    source: &SolomonData,
    cfg: &GeneratorConfig,
) -> Result<Instance, GenerateError> {
    if !(0.0..=1.0).contains(&cfg.tau) {
        return Err(GenerateError::BadTau(cfg.tau));
    }
    let available = source.customers().len();
    if available < cfg.customers {
        return Err(GenerateError::TooFewCustomers {
            source_name: source.name.clone(),
            available,
            requested: cfg.customers,
        });
    }
    let n = cfg.customers;
    let horizon = source.horizon();
    let d = source.depot();
    let depot = |id: usize| Node {
        id: NodeId(id),
        origin: 0,
        x: d.x,
        y: d.y,
        demand: 0.0,
        service: 0.0,
        early: 0.0,
        late: horizon,
    };
    let mut customers: Vec<Node> = source.customers()[..n]
        .iter()
        .map(|r| Node {
            id: NodeId(r.id),
            origin: r.id,
            x: r.x,
            y: r.y,
            demand: r.demand,
            service: r.service,
            early: r.ready,
            late: r.due,
        })
        .collect();
    let name = instance_name(&source.name, n, cfg.tau);
    let mut rng = rng::stream(cfg.seed, &precedence_label(&name));
    let pm = generate_precedence(&mut customers, cfg, &mut rng);

    let mut nodes = Vec::with_capacity(n + 2);
    nodes.push(depot(0));
    nodes.extend(customers);
    nodes.push(depot(n + 1));
    let (capacity, vehicles) = cfg.fleet();
    let meta = InstanceMeta {
        name,
        source: source.name.clone(),
        class: source.class(),
        tau: cfg.tau,
        seed: cfg.seed,
    };
    Ok(Instance::new(nodes, capacity, vehicles, pm, meta)?)
}

/// Every `(source, size, tau)` combination, in that nesting order.
pub fn build_suite(
    sources: &[SolomonData],
    sizes: &[usize],
    taus: &[f64],
    seed: u64,
) -> Result<Vec<Instance>, GenerateError> {
    let mut out = Vec::with_capacity(sources.len() * sizes.len() * taus.len());
    for src in sources {
        for &n in sizes {
            for &tau in taus {
                out.push(build_instance(src, &GeneratorConfig::new(n, tau, seed))?);
            }
        }
    }
    Ok(out)
}
