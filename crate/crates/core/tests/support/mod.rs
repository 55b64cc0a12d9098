//! Shared test helpers: random instances, random solutions, and an
//! exhaustive enumerator that shares no code with the library's solvers.
#![allow(dead_code)]

pub mod brute;
pub mod walk;

use andor_vrp::instance::{build_instance, solomon, GeneratorConfig};
use andor_vrp::model::{InstanceClass, InstanceMeta, Node, PrecedenceMatrix};
use andor_vrp::rng;
pub use andor_vrp::rng::Rng;
use andor_vrp::{Instance, NodeId, Relation, Route, Solution};
use rand::seq::SliceRandom;
use rand::Rng as _;

/// Small random instance with integer data. Windows, capacity and fleet
/// are loose enough that most draws are feasible but not all of them.
pub fn random_instance(rng: &mut Rng, n: usize, density: f64) -> Instance {
    let horizon = 400.0;
    let mut nodes = vec![depot(0, horizon)];
    for id in 1..=n {
        let x = rng.gen_range(0..=50) as f64;
        let y = rng.gen_range(0..=50) as f64;
        let early = rng.gen_range(0..=150) as f64;
        let late = (early + rng.gen_range(30..=250) as f64).min(horizon - 60.0);
        nodes.push(Node {
            id: NodeId(id),
            origin: id,
            x,
            y,
            demand: rng.gen_range(1..=10) as f64,
            service: rng.gen_range(0..=10) as f64,
            early,
            late: late.max(early),
        });
    }
    nodes.push(depot(n + 1, horizon));
    let mut triples = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            if rng.gen_bool(density) {
                let r = if rng.gen_bool(0.5) {
                    Relation::And
                } else {
                    Relation::Or
                };
                triples.push((i, j, r));
            }
        }
    }
    let pm = PrecedenceMatrix::from_triples(n, triples).unwrap();
    let capacity = rng.gen_range(15..=40) as f64;
    let vehicles = rng.gen_range(1..=3);
    Instance::new(
        nodes,
        capacity,
        vehicles,
        pm,
        InstanceMeta {
            name: format!("rand-{n}"),
            source: "random".into(),
            class: InstanceClass::Other,
            tau: density,
            seed: 0,
        },
    )
    .unwrap()
}

fn depot(id: usize, horizon: f64) -> Node {
    Node {
        id: NodeId(id),
        origin: 0,
        x: 25.0,
        y: 25.0,
        demand: 0.0,
        service: 0.0,
        early: 0.0,
        late: horizon,
    }
}

/// Random assignment of every customer to one of up to `K + 1` routes in
/// random order. Usually infeasible; useful for exercising validators.
pub fn random_solution(inst: &Instance, rng: &mut Rng) -> Solution {
    let mut ids: Vec<NodeId> = inst.customers().collect();
    ids.shuffle(rng);
    let routes_n = rng.gen_range(1..=inst.max_vehicles() + 1);
    let mut seqs = vec![Vec::new(); routes_n];
    for c in ids {
        seqs[rng.gen_range(0..routes_n)].push(c);
    }
    let routes = seqs
        .into_iter()
        .filter(|s| !s.is_empty())
        .map(|s| Route::from_seq(inst, s))
        .collect();
    Solution::new(routes, vec![])
}

/// Generated instance from a synthetic Solomon-like source.
pub fn generated(source: &str, n: usize, tau: f64, seed: u64) -> Instance {
    let src = solomon::synthetic(source, 100);
    build_instance(&src, &GeneratorConfig::new(n, tau, seed)).unwrap()
}

pub fn stream(seed: u64, label: &str) -> Rng {
    rng::stream(seed, label)
}

/// Sources of one class, in benchmark order.
pub fn sources_of(class: &str) -> Vec<String> {
    solomon::standard_sources()
        .into_iter()
        .filter(|s| InstanceClass::from_name(s).as_str() == class)
        .collect()
}

/// The 200 tiny instances used to tie branch-and-bound to the enumerator:
/// 120 random ones with 1 to 8 customers and 80 generated ones with 6 to 8.
pub fn oracle_cases() -> Vec<Instance> {
    let mut out = Vec::with_capacity(200);
    let mut rng = stream(2024, "oracle-cases");
    for k in 0..120 {
        let n = 1 + k % 8;
        let density = [0.0, 0.2, 0.4, 0.7][k % 4];
        out.push(random_instance(&mut rng, n, density));
    }
    let sources = solomon::standard_sources();
    for k in 0..80 {
        let src = &sources[k % sources.len()];
        let n = 6 + k % 3;
        let tau = if k % 2 == 0 { 0.4 } else { 0.8 };
        out.push(generated(src, n, tau, 100 + k as u64));
    }
    out
}

pub fn data_path(file: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(file)
}
