//! Depth-first branch-and-bound over route sequences.
//!
//! Routes are built one at a time by appending customers to the open route
//! or closing it. Routes are opened in increasing order of their first
//! customer, which removes the vehicle-permutation symmetry. The bound adds,
//! for every unvisited customer, its service time and cheapest incoming arc,
//! plus the cheapest possible return leg.

use serde::Serialize;

use crate::construct::build_initial;
use crate::model::{validate, Instance, NodeId, Route, Solution, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactBudget {
    /// Seconds; ignored on targets without a clock.
    pub time_limit: Option<f64>,
    pub node_limit: Option<u64>,
}

impl Default for ExactBudget {
    fn default() -> Self {
        Self {
            time_limit: Some(60.0),
            node_limit: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ExactStatus {
    Optimal,
    BoundOnly,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResult {
    pub status: ExactStatus,
    /// Best objective found.
    pub objective: Option<f64>,
    pub solution: Option<Solution>,
    /// Lower bound on the optimum; equals `objective` when optimal and is
    /// `None` when infeasibility was proven.
    pub bound: Option<f64>,
    pub nodes: u64,
}

struct Clock {
    #[cfg(not(target_arch = "wasm32"))]
    start: Option<std::time::Instant>,
    limit: Option<f64>,
}

impl Clock {
    fn new(limit: Option<f64>) -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: limit.map(|_| std::time::Instant::now()),
            limit,
        }
    }

    fn expired(&self) -> bool {
        #[cfg(not(target_arch = "wasm32"))]
        if let (Some(start), Some(limit)) = (self.start, self.limit) {
            return start.elapsed().as_secs_f64() >= limit;
        }
        let _ = self.limit;
        false
    }
}

struct Search<'a> {
    inst: &'a Instance,
    budget: ExactBudget,
    clock: Clock,
    depot_end: NodeId,
    visited: Vec<bool>,
    remaining: usize,
    rem_load: f64,
    /// Σ over unvisited customers of service plus cheapest incoming arc.
    rem_lb: f64,
    min_in: Vec<f64>,
    closed: Vec<Vec<NodeId>>,
    closed_sum: f64,
    open: Vec<NodeId>,
    on_open: Vec<bool>,
    departure: f64,
    load: f64,
    best: f64,
    best_routes: Option<Vec<Vec<NodeId>>>,
    nodes: u64,
    stopped: bool,
    /// Smallest bound among subtrees left unexplored by a budget stop.
    abandoned: f64,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, budget: ExactBudget) -> Self {
        let n = inst.n();
        let mut min_in = vec![0.0; n + 2];
        for j in inst.customers() {
            min_in[j.0] = std::iter::once(NodeId::DEPOT)
                .chain(inst.customers().filter(|&i| i != j))
                .map(|i| inst.travel(i, j))
                .fold(f64::INFINITY, f64::min);
        }
        let rem_lb = inst
            .customers()
            .map(|j| inst.node(j).service + min_in[j.0])
            .sum();
        Self {
            inst,
            budget,
            clock: Clock::new(budget.time_limit),
            depot_end: inst.dummy_depot(),
            visited: vec![false; n + 2],
            remaining: n,
            rem_load: inst.customers().map(|j| inst.node(j).demand).sum(),
            rem_lb,
            min_in,
            closed: Vec::new(),
            closed_sum: 0.0,
            open: Vec::new(),
            on_open: vec![false; n + 2],
            departure: 0.0,
            load: 0.0,
            best: f64::INFINITY,
            best_routes: None,
            nodes: 0,
            stopped: false,
            abandoned: f64::INFINITY,
        }
    }

    fn back(&self, i: NodeId) -> f64 {
        self.inst.travel(i, self.depot_end)
    }

    fn unvisited(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.inst.customers().filter(move |c| !self.visited[c.0])
    }

    fn lower_bound(&self) -> f64 {
        let mut ret = self
            .unvisited()
            .map(|j| self.back(j))
            .fold(f64::INFINITY, f64::min);
        let mut lb = self.closed_sum + self.rem_lb;
        if let Some(&last) = self.open.last() {
            lb += self.departure;
            ret = ret.min(self.back(last));
        }
        if ret.is_finite() {
            lb += ret;
        }
        lb
    }

    fn vehicles_used(&self) -> usize {
        self.closed.len() + usize::from(!self.open.is_empty())
    }

    /// Arrival at `j` appended to the open route, if every rule allows it.
    fn append_arrival(&self, j: NodeId) -> Option<f64> {
        let inst = self.inst;
        let node = inst.node(j);
        if self.load + node.demand > inst.capacity() + EPS {
            return None;
        }
        let pm = inst.precedence();
        if pm
            .successors(j)
            .iter()
            .any(|&x| self.on_open[x.0] && pm.is_and(j, x))
        {
            return None;
        }
        let ors = pm.or_preds(j);
        if !ors.is_empty() && !ors.iter().any(|p| self.on_open[p.0]) {
            return None;
        }
        let prev = self.open.last().copied().unwrap_or(NodeId::DEPOT);
        let a = node.early.max(self.departure + inst.travel(prev, j));
        if a > node.late + EPS || a + node.service + self.back(j) > inst.horizon() + EPS {
            return None;
        }
        Some(a)
    }

    /// Some unvisited customer can no longer be served in any completion.
    fn dead_end(&self) -> bool {
        let inst = self.inst;
        let pm = inst.precedence();
        let spare = inst.max_vehicles() - self.vehicles_used();
        if spare == 0 && self.load + self.rem_load > inst.capacity() + EPS {
            return true;
        }
        let prev = self.open.last().copied();
        for j in self.unvisited() {
            let node = inst.node(j);
            let on_open = prev.is_some_and(|p| {
                self.load + node.demand <= inst.capacity() + EPS
                    && self.departure + inst.travel(p, j) <= node.late + EPS
            });
            if !on_open && spare == 0 {
                return true;
            }
            let ors = pm.or_preds(j);
            if !ors.is_empty() {
                let pred_left = ors.iter().any(|p| !self.visited[p.0]);
                let pred_open = on_open && ors.iter().any(|p| self.on_open[p.0]);
                if !pred_left && !pred_open {
                    return true;
                }
            }
        }
        false
    }

    fn visit(&mut self, j: NodeId) {
        let node = self.inst.node(j);
        self.visited[j.0] = true;
        self.remaining -= 1;
        self.rem_load -= node.demand;
        self.rem_lb -= node.service + self.min_in[j.0];
    }

    fn unvisit(&mut self, j: NodeId) {
        let node = self.inst.node(j);
        self.visited[j.0] = false;
        self.remaining += 1;
        self.rem_load += node.demand;
        self.rem_lb += node.service + self.min_in[j.0];
    }

    fn over_budget(&mut self) -> bool {
        if self.stopped {
            return true;
        }
        if self.budget.node_limit.is_some_and(|l| self.nodes >= l)
            || (self.nodes.is_multiple_of(1024) && self.clock.expired())
        {
            self.stopped = true;
        }
        self.stopped
    }

    fn dfs(&mut self) {
        self.nodes += 1;
        let lb = self.lower_bound();
        if lb >= self.best {
            return;
        }
        if self.over_budget() {
            self.abandoned = self.abandoned.min(lb);
            return;
        }
        if self.remaining == 0 {
            let total = match self.open.last() {
                Some(&last) => self.closed_sum + self.departure + self.back(last),
                None => self.closed_sum,
            };
            if total < self.best {
                self.best = total;
                let mut routes = self.closed.clone();
                if !self.open.is_empty() {
                    routes.push(self.open.clone());
                }
                self.best_routes = Some(routes);
            }
            return;
        }
        if self.dead_end() {
            return;
        }

        let mut children: Vec<(f64, NodeId)> = if self.open.is_empty() {
            if self.vehicles_used() >= self.inst.max_vehicles() {
                return;
            }
            let floor = self.closed.last().map_or(0, |r| r[0].0);
            self.unvisited()
                .filter(|j| j.0 > floor)
                .filter_map(|j| self.append_arrival(j).map(|a| (a, j)))
                .collect()
        } else {
            self.unvisited()
                .filter_map(|j| self.append_arrival(j).map(|a| (a, j)))
                .collect()
        };
        children.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        for (a, j) in children {
            let saved = (self.departure, self.load);
            self.open.push(j);
            self.on_open[j.0] = true;
            self.departure = a + self.inst.node(j).service;
            self.load += self.inst.node(j).demand;
            self.visit(j);
            self.dfs();
            self.unvisit(j);
            self.open.pop();
            self.on_open[j.0] = false;
            (self.departure, self.load) = saved;
        }

        if let Some(&last) = self.open.last() {
            // close the open route
            let completion = self.departure + self.back(last);
            let route = std::mem::take(&mut self.open);
            for c in &route {
                self.on_open[c.0] = false;
            }
            let saved = (self.departure, self.load, self.closed_sum);
            self.closed_sum += completion;
            self.closed.push(route);
            self.departure = 0.0;
            self.load = 0.0;
            self.dfs();
            let route = self.closed.pop().expect("just pushed");
            for c in &route {
                self.on_open[c.0] = true;
            }
            self.open = route;
            (self.departure, self.load, self.closed_sum) = saved;
        }
    }
}

/// Exact optimum by branch-and-bound, within `budget`.
pub fn solve_exact(inst: &Instance, budget: ExactBudget) -> ExactResult {
    let mut search = Search::new(inst, budget);
    if let Ok(sol) = build_initial(inst) {
        if validate(inst, &sol).is_feasible() {
            search.best = sol.objective();
            search.best_routes = Some(sol.routes.iter().map(|r| r.seq().to_vec()).collect());
        }
    }
    search.dfs();

    let solution = search.best_routes.as_ref().map(|routes| {
        Solution::new(
            routes
                .iter()
                .map(|seq| Route::from_seq(inst, seq.clone()))
                .collect(),
            Vec::new(),
        )
    });
    let objective = solution.as_ref().map(Solution::objective);
    let (status, bound) = match (search.stopped && search.abandoned.is_finite(), objective) {
        (false, Some(f)) => (ExactStatus::Optimal, Some(f)),
        (false, None) => (ExactStatus::Infeasible, None),
        (true, Some(f)) => (ExactStatus::BoundOnly, Some(search.abandoned.min(f))),
        (true, None) => (ExactStatus::BoundOnly, Some(search.abandoned)),
    };
    ExactResult {
        status,
        objective,
        solution,
        bound,
        nodes: search.nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::instance;
    use crate::model::Relation;

    fn unlimited() -> ExactBudget {
        ExactBudget {
            time_limit: None,
            node_limit: None,
        }
    }

    #[test]
    fn single_customer() {
        // distance 5, e = 30, s = 10: wait until 30, back at 45
        let inst = instance(&[(3.0, 4.0, 1.0, 10.0, 30.0, 100.0)], 1000.0, 10.0, 1, &[]);
        let r = solve_exact(&inst, unlimited());
        assert_eq!(r.status, ExactStatus::Optimal);
        assert_eq!(r.objective, Some(45.0));
    }

    #[test]
    fn and_chain_one_vehicle() {
        let inst = instance(
            &[
                (30.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
                (20.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
                (10.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
            ],
            2000.0,
            10.0,
            1,
            &[(1, 2, Relation::And), (2, 3, Relation::And)],
        );
        let r = solve_exact(&inst, unlimited());
        assert_eq!(r.status, ExactStatus::Optimal);
        // 0 -> 30 -> 20 -> 10 -> 0
        assert_eq!(r.objective, Some(60.0));
        let sol = r.solution.unwrap();
        assert_eq!(sol.routes[0].seq(), &[NodeId(1), NodeId(2), NodeId(3)]);
    }

    #[test]
    fn infeasible_instance() {
        // both 2 and 3 need 1 on their vehicle; capacity fits only two of them
        let inst = instance(
            &[
                (10.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
                (20.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
                (30.0, 0.0, 1.0, 0.0, 0.0, 1000.0),
            ],
            2000.0,
            2.0,
            3,
            &[(1, 2, Relation::Or), (1, 3, Relation::Or)],
        );
        let r = solve_exact(&inst, unlimited());
        assert_eq!(r.status, ExactStatus::Infeasible);
        assert_eq!(r.bound, None);
    }

    #[test]
    fn node_budget_gives_bound_only() {
        let cs: Vec<_> = (0..9)
            .map(|i| {
                (
                    (i * 7 % 10) as f64 * 10.0,
                    (i * 3 % 10) as f64 * 10.0,
                    1.0,
                    1.0,
                    0.0,
                    1000.0,
                )
            })
            .collect();
        let inst = instance(&cs, 5000.0, 100.0, 3, &[]);
        let full = solve_exact(&inst, unlimited());
        let cut = solve_exact(
            &inst,
            ExactBudget {
                time_limit: None,
                node_limit: Some(20),
            },
        );
        assert_eq!(full.status, ExactStatus::Optimal);
        assert_eq!(cut.status, ExactStatus::BoundOnly);
        assert!(cut.bound.unwrap() <= full.objective.unwrap() + 1e-9);
    }
}
