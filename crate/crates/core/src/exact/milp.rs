//! The mixed-integer model of the problem: LP-file export and a direct
//! evaluator that lifts a solution to the model's variables and checks
//! every row.
//!
//! Nodes are indexed `0..=n+1` (`n+1` is the dummy depot), vehicles
//! `1..=K`. Variables:
//!
//! * `y_i_j_k`: `i` is visited before `j` (not necessarily immediately) by `k`
//! * `z_i_k`: `i` is visited by `k`
//! * `u_k`: vehicle `k` is used
//! * `a_i_k`: arrival time of `k` at `i`
//! * `c_k`: completion time of `k`
//!
//! Rows are named `c<eq>_<indices>` after the constraint family they belong
//! to. Family 15 is emitted only for customers with OR-type predecessors.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::model::{schedule, Instance, NodeId, Solution, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Y(usize, usize, usize),
    Z(usize, usize),
    U(usize),
    A(usize, usize),
    C(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Var::Y(i, j, k) => write!(f, "y_{i}_{j}_{k}"),
            Var::Z(i, k) => write!(f, "z_{i}_{k}"),
            Var::U(k) => write!(f, "u_{k}"),
            Var::A(i, k) => write!(f, "a_{i}_{k}"),
            Var::C(k) => write!(f, "c_{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub name: String,
    pub family: u8,
    pub terms: Vec<(f64, Var)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub n: usize,
    pub vehicles: usize,
    pub big_m: f64,
    pub objective: Vec<(f64, Var)>,
    pub rows: Vec<Row>,
    pub continuous: Vec<Var>,
    pub binaries: Vec<Var>,
}

/// `T + max service + max travel`: larger than any arrival plus a leg.
pub fn big_m(inst: &Instance) -> f64 {
    inst.horizon() + inst.max_service() + inst.max_travel()
}

pub fn build_model(inst: &Instance) -> MilpModel {
    let n = inst.n();
    let kk = inst.max_vehicles();
    let m = big_m(inst);
    let all: Vec<usize> = (0..=n + 1).collect();
    let customers: Vec<usize> = (1..=n).collect();
    let vehicles: Vec<usize> = (1..=kk).collect();
    let node = |i: usize| inst.node(NodeId(i));
    let pm = inst.precedence();
    let mut rows = Vec::new();
    let mut row = |name: String, family: u8, terms: Vec<(f64, Var)>, sense: Sense, rhs: f64| {
        rows.push(Row {
            name,
            family,
            terms,
            sense,
            rhs,
        })
    };

    for &i in &customers {
        let terms = vehicles.iter().map(|&k| (1.0, Var::Z(i, k))).collect();
        row(format!("c1_{i}"), 1, terms, Sense::Eq, 1.0);
    }
    for &k in &vehicles {
        let mut terms: Vec<(f64, Var)> = customers
            .iter()
            .map(|&i| (node(i).demand, Var::Z(i, k)))
            .collect();
        terms.push((-inst.capacity(), Var::U(k)));
        row(format!("c2_{k}"), 2, terms, Sense::Le, 0.0);
    }
    for &i in &[0, n + 1] {
        for &k in &vehicles {
            row(
                format!("c3_{i}_{k}"),
                3,
                vec![(1.0, Var::Z(i, k)), (-1.0, Var::U(k))],
                Sense::Eq,
                0.0,
            );
        }
    }
    for &k in &vehicles {
        for kp in 1..k {
            row(
                format!("c4_{k}_{kp}"),
                4,
                vec![(1.0, Var::U(k)), (-1.0, Var::U(kp))],
                Sense::Le,
                0.0,
            );
        }
    }
    for &k in &vehicles {
        row(
            format!("c5_{k}"),
            5,
            vec![(1.0, Var::A(0, k))],
            Sense::Eq,
            0.0,
        );
    }
    for &i in &customers {
        for &k in &vehicles {
            row(
                format!("c6_{i}_{k}"),
                6,
                vec![(1.0, Var::A(i, k)), (-m, Var::Z(i, k))],
                Sense::Le,
                0.0,
            );
        }
    }
    for &k in &vehicles {
        row(
            format!("c7_{k}"),
            7,
            vec![(1.0, Var::C(k)), (-1.0, Var::A(n + 1, k))],
            Sense::Ge,
            0.0,
        );
    }
    for &i in &all[1..] {
        for &k in &vehicles {
            row(
                format!("c8_{i}_{k}"),
                8,
                vec![(1.0, Var::A(i, k)), (-node(i).early, Var::Z(i, k))],
                Sense::Ge,
                0.0,
            );
        }
    }
    for &i in &all[1..] {
        for &k in &vehicles {
            row(
                format!("c9_{i}_{k}"),
                9,
                vec![(1.0, Var::A(i, k)), (-node(i).late, Var::Z(i, k))],
                Sense::Le,
                0.0,
            );
        }
    }
    // a_j + M(1 - y_ij) >= a_i + t_ij + s_i - M(1 - z_i) - M(1 - z_j)
    for &i in &all {
        for &j in &all {
            if i == j {
                continue;
            }
            let rhs = inst.travel(NodeId(i), NodeId(j)) + node(i).service - 3.0 * m;
            for &k in &vehicles {
                row(
                    format!("c10_{i}_{j}_{k}"),
                    10,
                    vec![
                        (1.0, Var::A(j, k)),
                        (-1.0, Var::A(i, k)),
                        (-m, Var::Y(i, j, k)),
                        (-m, Var::Z(i, k)),
                        (-m, Var::Z(j, k)),
                    ],
                    Sense::Ge,
                    rhs,
                );
            }
        }
    }
    // 1 + M(z_i + z_j - 2) <= y_ij + y_ji and z_i + z_j >= 2(y_ij + y_ji),
    // once per unordered pair
    for (p, &i) in all.iter().enumerate() {
        for &j in &all[p + 1..] {
            for &k in &vehicles {
                row(
                    format!("c11_{i}_{j}_{k}"),
                    11,
                    vec![
                        (1.0, Var::Y(i, j, k)),
                        (1.0, Var::Y(j, i, k)),
                        (-m, Var::Z(i, k)),
                        (-m, Var::Z(j, k)),
                    ],
                    Sense::Ge,
                    1.0 - 2.0 * m,
                );
                row(
                    format!("c12_{i}_{j}_{k}"),
                    12,
                    vec![
                        (1.0, Var::Z(i, k)),
                        (1.0, Var::Z(j, k)),
                        (-2.0, Var::Y(i, j, k)),
                        (-2.0, Var::Y(j, i, k)),
                    ],
                    Sense::Ge,
                    0.0,
                );
            }
        }
    }
    for &j in &customers {
        for &i in pm.and_preds(NodeId(j)) {
            let i = i.0;
            for &k in &vehicles {
                // y_ijk - 1 <= M(2 - z_i - z_j)
                row(
                    format!("c13_{i}_{j}_{k}"),
                    13,
                    vec![(1.0, Var::Y(i, j, k)), (m, Var::Z(i, k)), (m, Var::Z(j, k))],
                    Sense::Le,
                    1.0 + 2.0 * m,
                );
                // 1 - y_ijk <= M(2 - z_i - z_j)
                row(
                    format!("c14_{i}_{j}_{k}"),
                    14,
                    vec![
                        (-1.0, Var::Y(i, j, k)),
                        (m, Var::Z(i, k)),
                        (m, Var::Z(j, k)),
                    ],
                    Sense::Le,
                    2.0 * m - 1.0,
                );
            }
        }
    }
    for &j in &customers {
        let ors = pm.or_preds(NodeId(j));
        if ors.is_empty() {
            continue;
        }
        for &k in &vehicles {
            let mut terms: Vec<(f64, Var)> = ors.iter().map(|i| (1.0, Var::Y(i.0, j, k))).collect();
            terms.push((-m, Var::Z(j, k)));
            row(format!("c15_{j}_{k}"), 15, terms, Sense::Ge, 1.0 - m);
        }
    }

    let mut continuous = Vec::new();
    let mut binaries = Vec::new();
    for &k in &vehicles {
        continuous.push(Var::C(k));
        for &i in &all {
            continuous.push(Var::A(i, k));
        }
    }
    for &k in &vehicles {
        for &i in &all {
            for &j in &all {
                if i != j {
                    binaries.push(Var::Y(i, j, k));
                }
            }
        }
    }
    for &k in &vehicles {
        for &i in &all {
            binaries.push(Var::Z(i, k));
        }
    }
    for &k in &vehicles {
        binaries.push(Var::U(k));
    }

    MilpModel {
        n,
        vehicles: kk,
        big_m: m,
        objective: vehicles.iter().map(|&k| (1.0, Var::C(k))).collect(),
        rows,
        continuous,
        binaries,
    }
}

const TERMS_PER_LINE: usize = 8;

fn write_terms(out: &mut String, terms: &[(f64, Var)]) {
    for (idx, (coef, var)) in terms.iter().enumerate() {
        if idx > 0 && idx % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if *coef < 0.0 { '-' } else { '+' };
        let mag = coef.abs();
        if idx == 0 && sign == '+' {
            if mag == 1.0 {
                let _ = write!(out, " {var}");
            } else {
                let _ = write!(out, " {mag} {var}");
            }
        } else if mag == 1.0 {
            let _ = write!(out, " {sign} {var}");
        } else {
            let _ = write!(out, " {sign} {mag} {var}");
        }
    }
}

/// CPLEX LP text of the full model.
pub fn export_lp(inst: &Instance) -> String {
    let model = build_model(inst);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ {} : n = {}, K = {}, M = {}",
        inst.name(),
        model.n,
        model.vehicles,
        model.big_m
    );
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &model.objective);
    out.push_str("\nSubject To\n");
    for r in &model.rows {
        let _ = write!(out, " {}:", r.name);
        write_terms(&mut out, &r.terms);
        let _ = writeln!(out, " {} {}", r.sense.symbol(), r.rhs);
    }
    out.push_str("Bounds\n");
    for v in &model.continuous {
        let _ = writeln!(out, " {v} >= 0");
    }
    out.push_str("Binaries\n");
    for chunk in model.binaries.chunks(TERMS_PER_LINE) {
        out.push(' ');
        let names: Vec<String> = chunk.iter().map(Var::to_string).collect();
        out.push_str(&names.join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

/// Values of every model variable for one solution.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpAssignment {
    nodes: usize,
    vehicles: usize,
    y: Vec<f64>,
    z: Vec<f64>,
    u: Vec<f64>,
    a: Vec<f64>,
    c: Vec<f64>,
}

impl MilpAssignment {
    fn zeros(n: usize, vehicles: usize) -> Self {
        let nodes = n + 2;
        Self {
            nodes,
            vehicles,
            y: vec![0.0; nodes * nodes * vehicles],
            z: vec![0.0; nodes * vehicles],
            u: vec![0.0; vehicles],
            a: vec![0.0; nodes * vehicles],
            c: vec![0.0; vehicles],
        }
    }

    fn slot(&mut self, v: Var) -> &mut f64 {
        let (nn, kk) = (self.nodes, self.vehicles);
        match v {
            Var::Y(i, j, k) => &mut self.y[(i * nn + j) * kk + k - 1],
            Var::Z(i, k) => &mut self.z[i * kk + k - 1],
            Var::U(k) => &mut self.u[k - 1],
            Var::A(i, k) => &mut self.a[i * kk + k - 1],
            Var::C(k) => &mut self.c[k - 1],
        }
    }

    pub fn value(&self, v: Var) -> f64 {
        let (nn, kk) = (self.nodes, self.vehicles);
        match v {
            Var::Y(i, j, k) => self.y[(i * nn + j) * kk + k - 1],
            Var::Z(i, k) => self.z[i * kk + k - 1],
            Var::U(k) => self.u[k - 1],
            Var::A(i, k) => self.a[i * kk + k - 1],
            Var::C(k) => self.c[k - 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowViolation {
    pub row: String,
    pub family: u8,
    /// Signed slack; negative values measure the violation.
    pub slack: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub violations: Vec<RowViolation>,
    /// Parts of the solution that have no counterpart in the model.
    pub unliftable: Vec<String>,
}

impl ConstraintReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.unliftable.is_empty()
    }
}

/// Maps route `r` to vehicle `r + 1`. Arrivals are recomputed from the
/// sequences, the dummy depot is reached at the completion time, and an
/// unused vehicle keeps every variable at 0. A customer visited twice on
/// one vehicle gets `z = 2`.
pub fn lift(inst: &Instance, sol: &Solution) -> (MilpAssignment, Vec<String>) {
    let n = inst.n();
    let kk = inst.max_vehicles();
    let mut x = MilpAssignment::zeros(n, kk);
    let mut unliftable = Vec::new();
    for (r, route) in sol.routes.iter().enumerate() {
        if route.is_empty() {
            continue;
        }
        let k = r + 1;
        if k > kk {
            unliftable.push(format!("route {r} exceeds the {kk} available vehicles"));
            continue;
        }
        if let Some(bad) = route.seq().iter().find(|c| !inst.is_customer(**c)) {
            unliftable.push(format!("route {r} visits unknown node {bad}"));
            continue;
        }
        let s = schedule(inst, route.seq());
        *x.slot(Var::U(k)) = 1.0;
        *x.slot(Var::Z(0, k)) = 1.0;
        *x.slot(Var::Z(n + 1, k)) = 1.0;
        *x.slot(Var::A(n + 1, k)) = s.completion;
        *x.slot(Var::C(k)) = s.completion;
        let mut order = vec![0];
        order.extend(route.seq().iter().map(|c| c.0));
        order.push(n + 1);
        for (p, &i) in order.iter().enumerate() {
            for &j in &order[p + 1..] {
                if i != j {
                    *x.slot(Var::Y(i, j, k)) = 1.0;
                }
            }
        }
        for (&c, &a) in route.seq().iter().zip(&s.arrivals) {
            *x.slot(Var::Z(c.0, k)) += 1.0;
            *x.slot(Var::A(c.0, k)) = a;
        }
    }
    (x, unliftable)
}

fn row_slack(row: &Row, x: &MilpAssignment) -> f64 {
    let lhs: f64 = row.terms.iter().map(|&(c, v)| c * x.value(v)).sum();
    match row.sense {
        Sense::Le => row.rhs - lhs,
        Sense::Ge => lhs - row.rhs,
        Sense::Eq => -(lhs - row.rhs).abs(),
    }
}

/// Checks every row of the model, plus integrality, against the lifted
/// solution.
pub fn evaluate_milp(inst: &Instance, sol: &Solution) -> ConstraintReport {
    let model = build_model(inst);
    let (x, unliftable) = lift(inst, sol);
    let mut violations: Vec<RowViolation> = model
        .rows
        .iter()
        .filter_map(|r| {
            let slack = row_slack(r, &x);
            (slack < -EPS).then(|| RowViolation {
                row: r.name.clone(),
                family: r.family,
                slack,
            })
        })
        .collect();
    for &v in &model.binaries {
        let val = x.value(v);
        if val != 0.0 && val != 1.0 {
            violations.push(RowViolation {
                row: format!("binary {v}"),
                family: 17,
                slack: -(val - val.round()).abs().max(1.0),
            });
        }
    }
    ConstraintReport {
        violations,
        unliftable,
    }
}
