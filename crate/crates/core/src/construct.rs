//! Sequential route filling for the initial solution.
//!
//! Customers are scanned in increasing order of their count of unvisited
//! predecessors (ties by id) and the first one that can be appended to the
//! open vehicle is served. When nothing fits the vehicle is closed and a new
//! one starts from all unvisited customers. The result may use more than `K`
//! vehicles; the solver reduces the fleet afterwards.

use thiserror::Error;

use crate::feasibility::{check_move, Move};
use crate::model::{Instance, NodeId, Route, Solution, EPS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("customer {0} cannot be served by any vehicle")]
    Unplaceable(NodeId),
}

/// Open vehicle being filled by appending at its end.
struct OpenRoute {
    seq: Vec<NodeId>,
    on_route: Vec<bool>,
    load: f64,
    departure: f64,
}

impl OpenRoute {
    fn new(n: usize) -> Self {
        Self {
            seq: Vec::new(),
            on_route: vec![false; n + 2],
            load: 0.0,
            departure: 0.0,
        }
    }

    fn last(&self) -> NodeId {
        self.seq.last().copied().unwrap_or(NodeId::DEPOT)
    }

    /// Arrival time if `c` is appended, when the append is feasible.
    fn append_arrival(&self, inst: &Instance, c: NodeId) -> Option<f64> {
        let node = inst.node(c);
        if self.load + node.demand > inst.capacity() + EPS {
            return None;
        }
        let pm = inst.precedence();
        // c must not be an AND-type predecessor of a node already served
        if pm
            .successors(c)
            .iter()
            .any(|&x| self.on_route[x.0] && pm.is_and(c, x))
        {
            return None;
        }
        let ors = pm.or_preds(c);
        if !ors.is_empty() && !ors.iter().any(|p| self.on_route[p.0]) {
            return None;
        }
        let a = node.early.max(self.departure + inst.travel(self.last(), c));
        if a > node.late + EPS {
            return None;
        }
        let back = a + node.service + inst.travel(c, inst.dummy_depot());
        (back <= inst.horizon() + EPS).then_some(a)
    }

    fn push(&mut self, inst: &Instance, c: NodeId, arrival: f64) {
        let node = inst.node(c);
        self.seq.push(c);
        self.on_route[c.0] = true;
        self.load += node.demand;
        self.departure = arrival + node.service;
    }
}

/// True when `c` alone on a vehicle respects its window, the horizon and the
/// capacity.
fn solo_feasible(inst: &Instance, c: NodeId) -> bool {
    let node = inst.node(c);
    let a = node.early.max(inst.travel(NodeId::DEPOT, c));
    node.demand <= inst.capacity() + EPS
        && a <= node.late + EPS
        && a + node.service + inst.travel(c, inst.dummy_depot()) <= inst.horizon() + EPS
}

struct Builder<'a> {
    inst: &'a Instance,
    visited: Vec<bool>,
    all_pre: Vec<usize>,
    remaining: usize,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance) -> Self {
        let pm = inst.precedence();
        let n = inst.n();
        let mut all_pre = vec![0; n + 1];
        for c in inst.customers() {
            all_pre[c.0] = pm.and_preds(c).len() + pm.or_preds(c).len();
        }
        Self {
            inst,
            visited: vec![false; n + 1],
            all_pre,
            remaining: n,
        }
    }

    fn visit(&mut self, c: NodeId) {
        self.visited[c.0] = true;
        self.remaining -= 1;
        for &s in self.inst.precedence().successors(c) {
            if !self.visited[s.0] {
                self.all_pre[s.0] -= 1;
            }
        }
    }

    fn unvisit(&mut self, c: NodeId) {
        let pm = self.inst.precedence();
        self.visited[c.0] = false;
        self.remaining += 1;
        self.all_pre[c.0] = pm
            .and_preds(c)
            .iter()
            .chain(pm.or_preds(c))
            .filter(|p| !self.visited[p.0])
            .count();
        for &s in pm.successors(c) {
            if !self.visited[s.0] {
                self.all_pre[s.0] += 1;
            }
        }
    }

    fn sorted_candidates(&self, candidates: &mut Vec<NodeId>) {
        candidates.sort_by_key(|c| (self.all_pre[c.0], c.0));
    }

    /// Fills `open` from the unvisited customers until nothing fits.
    fn fill(&mut self, open: &mut OpenRoute) {
        let pm = self.inst.precedence();
        let mut candidates: Vec<NodeId> = self
            .inst
            .customers()
            .filter(|c| !self.visited[c.0])
            .collect();
        self.sorted_candidates(&mut candidates);
        loop {
            let found = candidates
                .iter()
                .enumerate()
                .find_map(|(idx, &c)| open.append_arrival(self.inst, c).map(|a| (idx, c, a)));
            let Some((idx, c, a)) = found else { break };
            candidates.remove(idx);
            open.push(self.inst, c, a);
            self.visit(c);
            // unvisited AND-type predecessors of c can no longer ride this vehicle
            candidates.retain(|&j| !pm.is_and(j, c));
            self.sorted_candidates(&mut candidates);
        }
    }
}

/// Upper bound on the OR chains examined per stuck customer.
const MAX_CHAINS: usize = 256;

/// OR-type predecessor chains ending at `j`, shortest first. Each chain
/// starts at a customer without OR-type predecessors, every member is an
/// OR-type predecessor of the next, and ids increase along the chain.
fn or_chains(inst: &Instance, j: NodeId) -> Vec<Vec<NodeId>> {
    let pm = inst.precedence();
    let mut out = Vec::new();
    // chains are grown backwards from j
    let mut frontier = vec![vec![j]];
    while !frontier.is_empty() && out.len() < MAX_CHAINS {
        let mut next = Vec::new();
        for chain in frontier {
            let head = *chain.last().expect("non-empty chain");
            let ors = pm.or_preds(head);
            if ors.is_empty() {
                out.push(chain.iter().rev().copied().collect());
                continue;
            }
            for &p in ors {
                let mut c = chain.clone();
                c.push(p);
                next.push(c);
            }
        }
        next.truncate(4 * MAX_CHAINS);
        frontier = next;
    }
    out.truncate(MAX_CHAINS);
    out
}

/// Nodes that lose every OR-type predecessor in front of them once the
/// `pulled` nodes leave their routes.
fn cascade(inst: &Instance, routes: &[Route], pulled: &[bool]) -> Vec<NodeId> {
    let pm = inst.precedence();
    let mut gone = pulled.to_vec();
    let mut extra = Vec::new();
    for r in routes {
        let mut kept: Vec<NodeId> = Vec::with_capacity(r.len());
        for &x in r.seq() {
            if gone[x.0] {
                continue;
            }
            let ors = pm.or_preds(x);
            if !ors.is_empty() && !kept.iter().any(|&y| pm.is_or(y, x)) {
                gone[x.0] = true;
                extra.push(x);
                continue;
            }
            kept.push(x);
        }
    }
    extra
}

/// Makes progress when no fresh vehicle can start with any unvisited
/// customer (all of them need an OR-type predecessor on their vehicle).
///
/// First tries to insert a stuck customer anywhere in an existing route.
/// Otherwise opens a vehicle with an OR chain ending at a stuck customer,
/// pulling the chain members out of their routes; customers left without
/// an OR-type predecessor by that removal become unvisited again. The
/// chain needing the fewest such re-openings wins.
fn repair(
    inst: &Instance,
    routes: &mut Vec<Route>,
    b: &mut Builder,
) -> Result<Option<OpenRoute>, ConstructionError> {
    let stuck: Vec<NodeId> = inst.customers().filter(|c| !b.visited[c.0]).collect();
    for &j in &stuck {
        for k in 0..routes.len() {
            for pos in 0..=routes[k].len() {
                if let Some(route) = insert_into_route(inst, &routes[k], j, pos) {
                    routes[k] = route;
                    b.visit(j);
                    return Ok(None);
                }
            }
        }
    }

    let mut best: Option<(usize, usize, OpenRoute, Vec<bool>, Vec<NodeId>)> = None;
    for &j in &stuck {
        for chain in or_chains(inst, j) {
            let mut open = OpenRoute::new(inst.n());
            let fits = chain.iter().all(|&c| match open.append_arrival(inst, c) {
                Some(a) => {
                    open.push(inst, c, a);
                    true
                }
                None => false,
            });
            if !fits {
                continue;
            }
            let mut pulled = vec![false; inst.n() + 2];
            for &c in &chain {
                pulled[c.0] = b.visited[c.0];
            }
            let extra = cascade(inst, routes, &pulled);
            let score = (extra.len(), chain.len());
            if best.as_ref().is_none_or(|(e, l, ..)| score < (*e, *l)) {
                best = Some((score.0, score.1, open, pulled, extra));
            }
        }
    }
    let Some((_, _, open, pulled, extra)) = best else {
        return Err(ConstructionError::Unplaceable(stuck[0]));
    };
    for r in routes.iter_mut() {
        if r.seq().iter().any(|c| pulled[c.0] || extra.contains(c)) {
            let seq = r
                .seq()
                .iter()
                .copied()
                .filter(|c| !pulled[c.0] && !extra.contains(c))
                .collect();
            *r = Route::from_seq(inst, seq);
        }
    }
    routes.retain(|r| !r.is_empty());
    for &x in &extra {
        b.unvisit(x);
    }
    for &c in &open.seq {
        if !b.visited[c.0] {
            b.visit(c);
        }
    }
    Ok(Some(open))
}

/// Inserts `node` before `pos` of `route`, judged on that route alone so the
/// fleet bound does not interfere.
fn insert_into_route(inst: &Instance, route: &Route, node: NodeId, pos: usize) -> Option<Route> {
    let single = Solution::new(vec![route.clone()], vec![node]);
    let out = check_move(
        inst,
        &single,
        &Move::StackInsert {
            node,
            route: 0,
            pos,
        },
    );
    out.is_feasible()
        .then(|| out.updates.into_iter().next().expect("one route").route)
}

/// Builds the initial solution: empty stack, every route feasible, possibly
/// more than `K` vehicles.
pub fn build_initial(inst: &Instance) -> Result<Solution, ConstructionError> {
    if let Some(c) = inst.customers().find(|&c| !solo_feasible(inst, c)) {
        return Err(ConstructionError::Unplaceable(c));
    }
    let mut b = Builder::new(inst);
    let mut routes: Vec<Route> = Vec::new();
    let mut pending: Option<OpenRoute> = None;
    let mut repairs = 0;
    while b.remaining > 0 || pending.is_some() {
        let mut open = pending.take().unwrap_or_else(|| OpenRoute::new(inst.n()));
        b.fill(&mut open);
        if open.seq.is_empty() {
            repairs += 1;
            if repairs > 4 * inst.n() {
                let first = inst
                    .customers()
                    .find(|c| !b.visited[c.0])
                    .expect("unvisited customer");
                return Err(ConstructionError::Unplaceable(first));
            }
            pending = repair(inst, &mut routes, &mut b)?;
            continue;
        }
        routes.push(Route::from_seq(inst, open.seq));
    }
    Ok(Solution::new(routes, Vec::new()))
}
