//! Domain types shared by every other module: nodes, the precedence matrix,
//! instances, routes and solutions, plus the from-scratch solution validator.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used for every time and load comparison.
pub const EPS: f64 = 1e-9;

/// Index of a node in an [`Instance`]: `0` is the depot, `1..=n` are the
/// customers and `n + 1` is the dummy depot closing every route.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const DEPOT: NodeId = NodeId(0);

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    /// Customer number in the source benchmark file (0 for both depots).
    pub origin: usize,
    pub x: f64,
    pub y: f64,
    pub demand: f64,
    pub service: f64,
    pub early: f64,
    pub late: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    None,
    And,
    Or,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::None => "NONE",
            Relation::And => "AND",
            Relation::Or => "OR",
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("precedence ({0}, {1}) is not upper triangular")]
    NotUpperTriangular(usize, usize),
    #[error("precedence ({0}, {1}) references a node outside 1..={2}")]
    PrecedenceOutOfRange(usize, usize, usize),
    #[error("precedence ({0}, {1}) is defined twice")]
    DuplicatePrecedence(usize, usize),
    #[error("node {0}: time window [{1}, {2}] is not within [0, {3}] or is inverted")]
    BadTimeWindow(usize, f64, f64, f64),
    #[error("node {0}: negative demand or service time")]
    NegativeQuantity(usize),
    #[error("node {0}: depot copies must have zero demand and service time and window [0, T]")]
    BadDepot(usize),
    #[error("node ids must be consecutive from 0, found {found} at position {expected}")]
    NodeOrder { expected: usize, found: usize },
    #[error("instance needs at least one vehicle")]
    NoVehicles,
    #[error("precedence matrix covers {0} customers but the instance has {1}")]
    SizeMismatch(usize, usize),
}

/// Strictly upper triangular AND/OR relation store over customers `1..=n`.
///
/// `rel(i, j)` is only defined for `i < j`; the derived per-node views
/// (`and_preds`, `or_preds`, successors) are built once at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecedenceMatrix {
    n: usize,
    rel: Vec<Relation>,
    and_preds: Vec<Vec<NodeId>>,
    or_preds: Vec<Vec<NodeId>>,
    succs: Vec<Vec<NodeId>>,
}

impl PrecedenceMatrix {
    pub fn empty(n: usize) -> Self {
        Self::from_triples(n, std::iter::empty()).expect("empty matrix is valid")
    }

    /// Builds the matrix from `(i, j, relation)` triples with `i < j`.
    /// `Relation::None` entries are ignored.
    pub fn from_triples<I>(n: usize, triples: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = (usize, usize, Relation)>,
    {
        let side = n + 1;
        let mut rel = vec![Relation::None; side * side];
        let mut and_preds = vec![Vec::new(); side];
        let mut or_preds = vec![Vec::new(); side];
        let mut succs = vec![Vec::new(); side];
        for (i, j, r) in triples {
            if r == Relation::None {
                continue;
            }
            if i == 0 || j == 0 || i > n || j > n {
                return Err(ModelError::PrecedenceOutOfRange(i, j, n));
            }
            if i >= j {
                return Err(ModelError::NotUpperTriangular(i, j));
            }
            let slot = &mut rel[i * side + j];
            if *slot != Relation::None {
                return Err(ModelError::DuplicatePrecedence(i, j));
            }
            *slot = r;
            match r {
                Relation::And => and_preds[j].push(NodeId(i)),
                Relation::Or => or_preds[j].push(NodeId(i)),
                Relation::None => unreachable!(),
            }
            succs[i].push(NodeId(j));
        }
        for v in and_preds
            .iter_mut()
            .chain(or_preds.iter_mut())
            .chain(succs.iter_mut())
        {
            v.sort_unstable();
        }
        Ok(Self {
            n,
            rel,
            and_preds,
            or_preds,
            succs,
        })
    }

    pub fn customers(&self) -> usize {
        self.n
    }

    /// Relation between `i` and `j` in index order; `None` for `i >= j`,
    /// depots or anything out of range.
    #[inline]
    pub fn get(&self, i: NodeId, j: NodeId) -> Relation {
        let (i, j) = (i.0, j.0);
        if i == 0 || i >= j || j > self.n {
            return Relation::None;
        }
        self.rel[i * (self.n + 1) + j]
    }

    /// True when `pred` is an AND-type predecessor of `succ`.
    #[inline]
    pub fn is_and(&self, pred: NodeId, succ: NodeId) -> bool {
        self.get(pred, succ) == Relation::And
    }

    #[inline]
    pub fn is_or(&self, pred: NodeId, succ: NodeId) -> bool {
        self.get(pred, succ) == Relation::Or
    }

    pub fn and_preds(&self, j: NodeId) -> &[NodeId] {
        self.and_preds.get(j.0).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn or_preds(&self, j: NodeId) -> &[NodeId] {
        self.or_preds.get(j.0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Every node having `i` as a predecessor of either type.
    pub fn successors(&self, i: NodeId) -> &[NodeId] {
        self.succs.get(i.0).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Non-`None` entries in row-major order.
    pub fn triples(&self) -> impl Iterator<Item = (NodeId, NodeId, Relation)> + '_ {
        (1..=self.n).flat_map(move |i| {
            self.succs[i]
                .iter()
                .map(move |&j| (NodeId(i), j, self.rel[i * (self.n + 1) + j.0]))
        })
    }

    pub fn relation_count(&self) -> usize {
        self.succs.iter().map(Vec::len).sum()
    }
}

/// Solomon class an instance was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InstanceClass {
    R2,
    C2,
    RC2,
    Other,
}

impl InstanceClass {
    /// Classifies a benchmark name by its prefix (`RC2..`, `R2..`, `C2..`).
    pub fn from_name(name: &str) -> Self {
        let upper = name.to_ascii_uppercase();
        if upper.starts_with("RC2") {
            InstanceClass::RC2
        } else if upper.starts_with("R2") {
            InstanceClass::R2
        } else if upper.starts_with("C2") {
            InstanceClass::C2
        } else {
            InstanceClass::Other
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InstanceClass::R2 => "R2",
            InstanceClass::C2 => "C2",
            InstanceClass::RC2 => "RC2",
            InstanceClass::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "R2" => Some(InstanceClass::R2),
            "C2" => Some(InstanceClass::C2),
            "RC2" => Some(InstanceClass::RC2),
            "other" => Some(InstanceClass::Other),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub name: String,
    pub source: String,
    pub class: InstanceClass,
    pub tau: f64,
    pub seed: u64,
}

/// A complete problem instance. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    nodes: Vec<Node>,
    travel: Vec<f64>,
    horizon: f64,
    capacity: f64,
    max_vehicles: usize,
    precedence: PrecedenceMatrix,
    meta: InstanceMeta,
}

impl Instance {
    /// Builds an instance from the full node list `0..=n+1` (depot, customers,
    /// dummy depot). The horizon is the depot's latest time.
    pub fn new(
        nodes: Vec<Node>,
        capacity: f64,
        max_vehicles: usize,
        precedence: PrecedenceMatrix,
        meta: InstanceMeta,
    ) -> Result<Self, ModelError> {
        if max_vehicles == 0 {
            return Err(ModelError::NoVehicles);
        }
        let total = nodes.len();
        assert!(total >= 2, "an instance needs a depot and a dummy depot");
        let n = total - 2;
        if precedence.customers() != n {
            return Err(ModelError::SizeMismatch(precedence.customers(), n));
        }
        for (pos, node) in nodes.iter().enumerate() {
            if node.id.0 != pos {
                return Err(ModelError::NodeOrder {
                    expected: pos,
                    found: node.id.0,
                });
            }
        }
        let horizon = nodes[0].late;
        for node in &nodes {
            if node.demand < 0.0 || node.service < 0.0 {
                return Err(ModelError::NegativeQuantity(node.id.0));
            }
            if !(0.0 <= node.early && node.early <= node.late && node.late <= horizon) {
                return Err(ModelError::BadTimeWindow(
                    node.id.0, node.early, node.late, horizon,
                ));
            }
        }
        for depot in [&nodes[0], &nodes[n + 1]] {
            if depot.demand != 0.0
                || depot.service != 0.0
                || depot.early != 0.0
                || depot.late != horizon
                || depot.x != nodes[0].x
                || depot.y != nodes[0].y
            {
                return Err(ModelError::BadDepot(depot.id.0));
            }
        }
        let travel = euclidean_matrix(&nodes);
        Ok(Self {
            nodes,
            travel,
            horizon,
            capacity,
            max_vehicles,
            precedence,
            meta,
        })
    }

    /// Number of customers.
    #[inline]
    pub fn n(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    #[inline]
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    pub fn customers(&self) -> impl Iterator<Item = NodeId> + Clone {
        (1..=self.n()).map(NodeId)
    }

    #[inline]
    pub fn dummy_depot(&self) -> NodeId {
        NodeId(self.n() + 1)
    }

    #[inline]
    pub fn is_customer(&self, id: NodeId) -> bool {
        id.0 >= 1 && id.0 <= self.n()
    }

    #[inline]
    pub fn travel(&self, from: NodeId, to: NodeId) -> f64 {
        self.travel[from.0 * self.nodes.len() + to.0]
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn capacity(&self) -> f64 {
        self.capacity
    }

    pub fn max_vehicles(&self) -> usize {
        self.max_vehicles
    }

    pub fn precedence(&self) -> &PrecedenceMatrix {
        &self.precedence
    }

    pub fn meta(&self) -> &InstanceMeta {
        &self.meta
    }

    pub fn name(&self) -> &str {
        &self.meta.name
    }

    /// Largest travel time between any two nodes.
    pub fn max_travel(&self) -> f64 {
        self.travel.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_service(&self) -> f64 {
        self.nodes.iter().map(|n| n.service).fold(0.0, f64::max)
    }
}

fn euclidean_matrix(nodes: &[Node]) -> Vec<f64> {
    let m = nodes.len();
    let mut travel = vec![0.0; m * m];
    for a in nodes {
        for b in nodes {
            if a.id != b.id {
                travel[a.id.0 * m + b.id.0] = (a.x - b.x).hypot(a.y - b.y);
            }
        }
    }
    travel
}

/// Earliest-start schedule of a customer sequence served by one vehicle.
#[derive(Clone, Debug, PartialEq)]
pub struct Schedule {
    pub arrivals: Vec<f64>,
    pub load: f64,
    /// Arrival time back at the depot (0 for an empty sequence).
    pub completion: f64,
    /// Travel plus service time, waiting excluded.
    pub duration: f64,
}

/// Computes service-start times from scratch:
/// `a[0] = max(e, t(0, s0))`, `a[p+1] = max(e, a[p] + s + t)`.
pub fn schedule(inst: &Instance, seq: &[NodeId]) -> Schedule {
    let mut arrivals = Vec::with_capacity(seq.len());
    let mut prev = NodeId::DEPOT;
    let mut departure = 0.0;
    let mut load = 0.0;
    let mut duration = 0.0;
    for &c in seq {
        let node = inst.node(c);
        let leg = inst.travel(prev, c);
        let a = node.early.max(departure + leg);
        arrivals.push(a);
        load += node.demand;
        duration += leg + node.service;
        departure = a + node.service;
        prev = c;
    }
    let completion = if seq.is_empty() {
        0.0
    } else {
        let back = inst.travel(prev, inst.dummy_depot());
        duration += back;
        departure + back
    };
    Schedule {
        arrivals,
        load,
        completion,
        duration,
    }
}

/// One vehicle trip with cached schedule data.
#[derive(Clone, Debug, PartialEq)]
pub struct Route {
    seq: Vec<NodeId>,
    arrivals: Vec<f64>,
    load: f64,
    completion: f64,
    duration: f64,
}

impl Route {
    pub fn empty() -> Self {
        Self {
            seq: Vec::new(),
            arrivals: Vec::new(),
            load: 0.0,
            completion: 0.0,
            duration: 0.0,
        }
    }

    pub fn from_seq(inst: &Instance, seq: Vec<NodeId>) -> Self {
        let s = schedule(inst, &seq);
        Self::from_schedule(seq, s)
    }

    pub fn from_schedule(seq: Vec<NodeId>, s: Schedule) -> Self {
        debug_assert_eq!(seq.len(), s.arrivals.len());
        Self {
            seq,
            arrivals: s.arrivals,
            load: s.load,
            completion: s.completion,
            duration: s.duration,
        }
    }

    /// Builds a route from externally supplied cached values (deserialised
    /// solutions). Nothing is recomputed.
    pub fn from_cached(
        seq: Vec<NodeId>,
        arrivals: Vec<f64>,
        load: f64,
        completion: f64,
        duration: f64,
    ) -> Self {
        Self {
            seq,
            arrivals,
            load,
            completion,
            duration,
        }
    }

    #[inline]
    pub fn seq(&self) -> &[NodeId] {
        &self.seq
    }

    #[inline]
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.seq.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    /// Cumulative demand (CD).
    #[inline]
    pub fn load(&self) -> f64 {
        self.load
    }

    /// Completion time (CT): arrival back at the depot.
    #[inline]
    pub fn completion(&self) -> f64 {
        self.completion
    }

    /// Travel plus service time, waiting excluded.
    #[inline]
    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.seq.iter().position(|&c| c == node)
    }

    /// Departure time from position `pos`, or 0 when `pos` is "before the
    /// first customer".
    pub fn departure(&self, inst: &Instance, pos: Option<usize>) -> f64 {
        match pos {
            Some(p) => self.arrivals[p] + inst.node(self.seq[p]).service,
            None => 0.0,
        }
    }

    /// Node preceding position `pos` (the depot for `pos == 0`).
    #[inline]
    pub fn prev_node(&self, pos: usize) -> NodeId {
        if pos == 0 {
            NodeId::DEPOT
        } else {
            self.seq[pos - 1]
        }
    }

    pub fn recompute(&mut self, inst: &Instance) {
        let s = schedule(inst, &self.seq);
        self.arrivals = s.arrivals;
        self.load = s.load;
        self.completion = s.completion;
        self.duration = s.duration;
    }
}

/// Routes plus the stack of customers that are currently unassigned.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub stack: Vec<NodeId>,
}

impl Solution {
    pub fn new(routes: Vec<Route>, stack: Vec<NodeId>) -> Self {
        Self { routes, stack }
    }

    /// Sum of route completion times; unused vehicles contribute 0.
    pub fn objective(&self) -> f64 {
        self.routes.iter().map(Route::completion).sum()
    }

    /// Number of active (non-empty) routes.
    pub fn vehicle_number(&self) -> usize {
        self.routes.iter().filter(|r| !r.is_empty()).count()
    }

    /// Empty stack and at most `K` vehicles.
    pub fn is_complete(&self, inst: &Instance) -> bool {
        self.stack.is_empty() && self.vehicle_number() <= inst.max_vehicles()
    }

    /// Drops empty routes, keeping the order of the others.
    pub fn compact(&mut self) {
        self.routes.retain(|r| !r.is_empty());
    }

    pub fn locate(&self, node: NodeId) -> Option<(usize, usize)> {
        self.routes
            .iter()
            .enumerate()
            .find_map(|(k, r)| r.position(node).map(|p| (k, p)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    UnknownNode {
        route: usize,
        node: NodeId,
    },
    DuplicateCustomer {
        node: NodeId,
    },
    MissingCustomer {
        node: NodeId,
    },
    Unassigned {
        node: NodeId,
    },
    Capacity {
        route: usize,
        load: f64,
        capacity: f64,
    },
    TimeWindow {
        route: usize,
        node: NodeId,
        arrival: f64,
        late: f64,
    },
    Horizon {
        route: usize,
        completion: f64,
        horizon: f64,
    },
    FleetSize {
        used: usize,
        max: usize,
    },
    UnusedVehicleBeforeUsed {
        route: usize,
    },
    AndPrecedence {
        route: usize,
        pred: NodeId,
        succ: NodeId,
    },
    OrUnsatisfied {
        route: usize,
        node: NodeId,
    },
    StaleCache {
        route: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownNode { route, node } => {
                write!(f, "route {route}: unknown node {node}")
            }
            Violation::DuplicateCustomer { node } => {
                write!(f, "customer {node} appears more than once")
            }
            Violation::MissingCustomer { node } => write!(f, "customer {node} is not served"),
            Violation::Unassigned { node } => write!(f, "customer {node} is still on the stack"),
            Violation::Capacity {
                route,
                load,
                capacity,
            } => {
                write!(f, "route {route}: load {load} exceeds capacity {capacity}")
            }
            Violation::TimeWindow {
                route,
                node,
                arrival,
                late,
            } => write!(
                f,
                "route {route}: time window at {node}, arrival {arrival} > {late}"
            ),
            Violation::Horizon {
                route,
                completion,
                horizon,
            } => write!(
                f,
                "route {route}: completion {completion} exceeds horizon {horizon}"
            ),
            Violation::FleetSize { used, max } => {
                write!(f, "{used} vehicles used, at most {max} available")
            }
            Violation::UnusedVehicleBeforeUsed { route } => {
                write!(f, "route {route} is used while an earlier vehicle is idle")
            }
            Violation::AndPrecedence { route, pred, succ } => {
                write!(
                    f,
                    "route {route}: AND predecessor {pred} is not before {succ}"
                )
            }
            Violation::OrUnsatisfied { route, node } => {
                write!(f, "route {route}: OR unsatisfied at {node}")
            }
            Violation::StaleCache { route } => write!(
                f,
                "route {route}: cached schedule differs from recomputation"
            ),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when every violation is a fleet-size excess.
    pub fn feasible_except_fleet(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::FleetSize { .. }))
    }
}

/// Recomputes everything from scratch and lists every violated rule.
pub fn validate(inst: &Instance, sol: &Solution) -> ValidationReport {
    let mut out = Vec::new();
    let n = inst.n();
    let pm = inst.precedence();
    let mut seen = vec![0usize; n + 1];

    for (k, route) in sol.routes.iter().enumerate() {
        let mut valid_nodes = true;
        for &c in route.seq() {
            if inst.is_customer(c) {
                seen[c.0] += 1;
            } else {
                valid_nodes = false;
                out.push(Violation::UnknownNode { route: k, node: c });
            }
        }
        if !valid_nodes {
            continue;
        }
        let s = schedule(inst, route.seq());
        let stale = route.arrivals().len() != s.arrivals.len()
            || route
                .arrivals()
                .iter()
                .zip(&s.arrivals)
                .any(|(a, b)| (a - b).abs() > EPS)
            || (route.completion() - s.completion).abs() > EPS
            || (route.load() - s.load).abs() > EPS;
        if stale {
            out.push(Violation::StaleCache { route: k });
        }
        if s.load > inst.capacity() + EPS {
            out.push(Violation::Capacity {
                route: k,
                load: s.load,
                capacity: inst.capacity(),
            });
        }
        for (&c, &a) in route.seq().iter().zip(&s.arrivals) {
            let late = inst.node(c).late;
            if a > late + EPS {
                out.push(Violation::TimeWindow {
                    route: k,
                    node: c,
                    arrival: a,
                    late,
                });
            }
        }
        if s.completion > inst.horizon() + EPS {
            out.push(Violation::Horizon {
                route: k,
                completion: s.completion,
                horizon: inst.horizon(),
            });
        }
        // position of each customer on this route, if present
        let mut pos = vec![usize::MAX; n + 1];
        for (p, &c) in route.seq().iter().enumerate() {
            if pos[c.0] == usize::MAX {
                pos[c.0] = p;
            }
        }
        for (p, &c) in route.seq().iter().enumerate() {
            for &a in pm.and_preds(c) {
                let pa = pos[a.0];
                if pa != usize::MAX && pa > p {
                    out.push(Violation::AndPrecedence {
                        route: k,
                        pred: a,
                        succ: c,
                    });
                }
            }
            let ors = pm.or_preds(c);
            if !ors.is_empty() && !ors.iter().any(|o| pos[o.0] < p) {
                out.push(Violation::OrUnsatisfied { route: k, node: c });
            }
        }
    }

    for &c in &sol.stack {
        if inst.is_customer(c) {
            seen[c.0] += 1;
            out.push(Violation::Unassigned { node: c });
        } else {
            out.push(Violation::UnknownNode {
                route: usize::MAX,
                node: c,
            });
        }
    }
    for c in inst.customers() {
        match seen[c.0] {
            0 => out.push(Violation::MissingCustomer { node: c }),
            1 => {}
            _ => out.push(Violation::DuplicateCustomer { node: c }),
        }
    }

    let used = sol.vehicle_number();
    if used > inst.max_vehicles() {
        out.push(Violation::FleetSize {
            used,
            max: inst.max_vehicles(),
        });
    }
    if let Some(last_used) = sol.routes.iter().rposition(|r| !r.is_empty()) {
        if sol.routes[..last_used].iter().any(Route::is_empty) {
            out.push(Violation::UnusedVehicleBeforeUsed { route: last_used });
        }
    }
    ValidationReport { violations: out }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn empty_solution_has_zero_objective() {
        assert_eq!(Solution::default().objective(), 0.0);
    }

    #[test]
    fn single_customer_completion() {
        let inst = instance(&[(3.0, 4.0, 1.0, 10.0, 0.0, 100.0)], 1000.0, 10.0, 1, &[]);
        let sol = Solution::new(vec![Route::from_seq(&inst, ids(&[1]))], vec![]);
        assert_eq!(sol.objective(), 20.0);
    }

    #[test]
    fn waiting_is_part_of_completion() {
        let inst = instance(&[(3.0, 4.0, 1.0, 10.0, 30.0, 100.0)], 1000.0, 10.0, 1, &[]);
        let r = Route::from_seq(&inst, ids(&[1]));
        assert_eq!(r.arrivals(), &[30.0]);
        assert_eq!(r.completion(), 45.0);
        assert_eq!(r.duration(), 20.0);
    }

    #[test]
    fn and_predecessor_on_other_vehicle_is_fine() {
        // r = 3 with AND preds {1, 2}; 2 rides another vehicle.
        let inst = instance(
            &[
                (1.0, 0.0, 1.0, 0.0, 0.0, 100.0),
                (0.0, 1.0, 1.0, 0.0, 0.0, 100.0),
                (2.0, 0.0, 1.0, 0.0, 0.0, 100.0),
            ],
            1000.0,
            10.0,
            2,
            &[(1, 3, Relation::And), (2, 3, Relation::And)],
        );
        let sol = Solution::new(
            vec![
                Route::from_seq(&inst, ids(&[1, 3])),
                Route::from_seq(&inst, ids(&[2])),
            ],
            vec![],
        );
        assert!(validate(&inst, &sol).is_feasible());

        let bad = Solution::new(vec![Route::from_seq(&inst, ids(&[3, 1, 2]))], vec![]);
        let rep = validate(&inst, &bad);
        assert_eq!(rep.violations.len(), 2);
        assert!(rep.violations.iter().all(|v| matches!(
            v,
            Violation::AndPrecedence {
                succ: NodeId(3),
                ..
            }
        )));
    }

    #[test]
    fn or_unsatisfied_when_no_pred_on_route_before() {
        // a = 4 with OR preds {1, 2, 3}
        let c = (1.0, 1.0, 1.0, 0.0, 0.0, 100.0);
        let inst = instance(
            &[c, c, c, c],
            1000.0,
            10.0,
            3,
            &[
                (1, 4, Relation::Or),
                (2, 4, Relation::Or),
                (3, 4, Relation::Or),
            ],
        );
        let sol = Solution::new(
            vec![
                Route::from_seq(&inst, ids(&[4, 1])),
                Route::from_seq(&inst, ids(&[2, 3])),
            ],
            vec![],
        );
        let rep = validate(&inst, &sol);
        assert_eq!(
            rep.violations,
            vec![Violation::OrUnsatisfied {
                route: 0,
                node: NodeId(4)
            }]
        );
        let ok = Solution::new(
            vec![
                Route::from_seq(&inst, ids(&[1, 4])),
                Route::from_seq(&inst, ids(&[2, 3])),
            ],
            vec![],
        );
        assert!(validate(&inst, &ok).is_feasible());
    }

    #[test]
    fn time_window_violation_detected() {
        let inst = instance(&[(30.0, 40.0, 1.0, 0.0, 0.0, 20.0)], 1000.0, 10.0, 1, &[]);
        let sol = Solution::new(vec![Route::from_seq(&inst, ids(&[1]))], vec![]);
        let rep = validate(&inst, &sol);
        assert!(
            matches!(rep.violations[..], [Violation::TimeWindow { arrival, .. }] if arrival == 50.0)
        );
    }

    #[test]
    fn partition_and_fleet_violations() {
        let c = (1.0, 1.0, 1.0, 0.0, 0.0, 100.0);
        let inst = instance(&[c, c, c], 1000.0, 10.0, 1, &[]);
        let sol = Solution::new(
            vec![
                Route::from_seq(&inst, ids(&[1, 1])),
                Route::from_seq(&inst, ids(&[2])),
            ],
            vec![],
        );
        let rep = validate(&inst, &sol);
        assert!(rep
            .violations
            .contains(&Violation::DuplicateCustomer { node: NodeId(1) }));
        assert!(rep
            .violations
            .contains(&Violation::MissingCustomer { node: NodeId(3) }));
        assert!(rep
            .violations
            .contains(&Violation::FleetSize { used: 2, max: 1 }));
    }

    #[test]
    fn matrix_rejects_lower_triangle() {
        assert_eq!(
            PrecedenceMatrix::from_triples(5, [(5, 3, Relation::And)]),
            Err(ModelError::NotUpperTriangular(5, 3))
        );
        let pm = PrecedenceMatrix::from_triples(4, [(1, 3, Relation::And), (2, 3, Relation::Or)])
            .unwrap();
        assert_eq!(pm.and_preds(NodeId(3)), &[NodeId(1)]);
        assert_eq!(pm.or_preds(NodeId(3)), &[NodeId(2)]);
        assert_eq!(pm.get(NodeId(3), NodeId(1)), Relation::None);
        assert_eq!(pm.triples().count(), 2);
    }
}
