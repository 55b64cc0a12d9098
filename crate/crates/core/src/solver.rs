//! Hybrid iterated local search with simulated-annealing acceptance.
//!
//! Each outer iteration perturbs the current solution (moving nodes out of
//! inefficient routes, then dropping the worst routes onto a stack), runs a
//! local search over five neighbourhoods that also reinserts stack nodes,
//! and opens new vehicles for leftover stack nodes while the fleet allows.

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construct::{build_initial, ConstructionError};
use crate::feasibility::{apply_move, check_move, Move, MoveOutcome, Stage};
use crate::model::{validate, Instance, NodeId, Route, Solution, Violation, EPS};
use crate::rng::{self, Rng};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverParams {
    pub max_iter: usize,
    pub max_not_imp: usize,
    pub temp0: f64,
    pub alpha: f64,
    /// Wall-clock limit in seconds; `None` runs to `max_iter`.
    pub time_limit: Option<f64>,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            max_iter: 1200,
            max_not_imp: 70,
            temp0: 100.0,
            alpha: 0.95,
            time_limit: Some(300.0),
            seed: 0,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("max_iter must be positive")]
    MaxIter,
    #[error("max_not_imp must be positive")]
    MaxNotImp,
    #[error("temp0 must be positive, got {0}")]
    Temp(f64),
    #[error("alpha must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("time limit must be positive, got {0}")]
    TimeLimit(f64),
}

impl SolverParams {
    pub fn check(&self) -> Result<(), ParamError> {
        if self.max_iter == 0 {
            return Err(ParamError::MaxIter);
        }
        if self.max_not_imp == 0 {
            return Err(ParamError::MaxNotImp);
        }
        if !(self.temp0 > 0.0) {
            return Err(ParamError::Temp(self.temp0));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ParamError::Alpha(self.alpha));
        }
        match self.time_limit {
            Some(t) if !(t > 0.0) => Err(ParamError::TimeLimit(t)),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Neighborhood {
    TransferWithin,
    TransferAcross,
    ExchangeWithin,
    ExchangeAcross,
    InsertVehicle,
}

impl Neighborhood {
    pub const ALL: [Neighborhood; 5] = [
        Neighborhood::TransferWithin,
        Neighborhood::TransferAcross,
        Neighborhood::ExchangeWithin,
        Neighborhood::ExchangeAcross,
        Neighborhood::InsertVehicle,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodStats {
    pub tried: u64,
    pub accepted: u64,
    /// Feasible but refused by the acceptance rule.
    pub rejected: u64,
    pub infeasible: u64,
    /// Worsening or neutral moves accepted by the annealing rule.
    pub sa_accepted: u64,
    /// Draws skipped because the solution had no move of this kind.
    pub unavailable: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub iterations: u64,
    pub local_search_iterations: u64,
    pub neighborhoods: [NeighborhoodStats; 5],
    pub stage_rejections: StageCounts,
    pub stack_reinsertions: u64,
    pub new_vehicles: u64,
    pub perturbations: u64,
    pub pre_improvement_transfers: u64,
    pub removed_routes: u64,
    pub max_stack: u64,
    pub best_updates: u64,
    pub initial_objective: f64,
    pub initial_vehicles: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageCounts {
    pub capacity: u64,
    pub precedence: u64,
    pub time_windows: u64,
}

impl StageCounts {
    fn record(&mut self, out: &MoveOutcome) {
        match out.rejected_at {
            Some(Stage::Capacity) => self.capacity += 1,
            Some(Stage::Precedence) => self.precedence += 1,
            Some(Stage::TimeWindows) => self.time_windows += 1,
            None => {}
        }
    }
}

/// One row per outer iteration (row 0 is the initial solution).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRow {
    pub iter: u64,
    /// Best complete objective so far, if any.
    pub best_f: Option<f64>,
    pub current_f: f64,
    pub temp: f64,
    pub stack_size: usize,
    pub vehicle_number: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub best: Solution,
    pub objective: f64,
    pub stats: SolverStats,
    pub trace: Vec<TraceRow>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error("no complete solution with at most K vehicles was found ({} customers left on the stack)", .last.stack.len())]
    NoFeasibleSolution {
        last: Box<Solution>,
        stats: Box<SolverStats>,
        trace: Vec<TraceRow>,
    },
}

/// Travel plus service time per node of a non-empty route.
pub fn route_index(route: &Route) -> f64 {
    debug_assert!(!route.is_empty());
    route.duration() / route.len() as f64
}

/// Mean travel-plus-service time over active routes divided by their mean
/// node count.
pub fn index_threshold(sol: &Solution) -> Option<f64> {
    let active = sol.routes.iter().filter(|r| !r.is_empty());
    let (dur, nodes) = active.fold((0.0, 0usize), |(d, c), r| (d + r.duration(), c + r.len()));
    (nodes > 0).then(|| dur / nodes as f64)
}

/// Metropolis rule for a non-improving move: accept with probability
/// `exp(-delta / temp)`.
pub fn sa_accept(delta: f64, temp: f64, rng: &mut Rng) -> bool {
    debug_assert!(temp > 0.0, "temperature must be positive");
    let u: f64 = rng.gen();
    u < (-delta / temp).exp()
}

fn stream_label(inst: &Instance) -> String {
    format!("{}/solve", inst.name())
}

/// Removes every customer of `routes[k]` and returns them in route order.
fn strip_route(sol: &mut Solution, k: usize) -> Vec<NodeId> {
    let r = std::mem::replace(&mut sol.routes[k], Route::empty());
    r.seq().to_vec()
}

/// Pre-improvement transfers followed by removal of the
/// `|vehicles - K| + 1` routes with the highest index.
pub fn perturb(inst: &Instance, sol: &mut Solution, rng: &mut Rng, stats: &mut SolverStats) {
    stats.perturbations += 1;
    sol.compact();
    let Some(threshold) = index_threshold(sol) else {
        return;
    };
    let mut target: Vec<bool> = sol
        .routes
        .iter()
        .map(|r| route_index(r) >= threshold - EPS)
        .collect();

    loop {
        let mut nodes: Vec<NodeId> = sol
            .routes
            .iter()
            .zip(&target)
            .filter(|(_, &t)| t)
            .flat_map(|(r, _)| r.seq().iter().copied())
            .collect();
        nodes.shuffle(rng);
        let mut moved = false;
        for node in nodes {
            let Some((k, p)) = sol.locate(node) else {
                continue;
            };
            if !target[k] {
                continue;
            }
            let receivers: Vec<usize> = (0..sol.routes.len()).filter(|&r| !target[r]).collect();
            let found = receivers.iter().find_map(|&r| {
                (0..=sol.routes[r].len()).find_map(|q| {
                    let mv = Move::TransferAcross {
                        from_route: k,
                        from_pos: p,
                        to_route: r,
                        to_pos: q,
                    };
                    let out = check_move(inst, sol, &mv);
                    stats.stage_rejections.record(&out);
                    out.is_feasible().then_some((mv, out))
                })
            });
            if let Some((mv, out)) = found {
                apply_keep_slots(sol, &mv, out);
                stats.pre_improvement_transfers += 1;
                moved = true;
                if sol.routes[k].is_empty() {
                    sol.routes.remove(k);
                    target.remove(k);
                }
            }
        }
        if !moved {
            break;
        }
    }

    let v = sol.routes.len();
    let remove = (v.abs_diff(inst.max_vehicles()) + 1).min(v);
    let mut order: Vec<usize> = (0..v).collect();
    let idx: Vec<f64> = sol.routes.iter().map(route_index).collect();
    order.sort_by(|&a, &b| idx[b].total_cmp(&idx[a]).then(a.cmp(&b)));
    for &k in &order[..remove] {
        let nodes = strip_route(sol, k);
        sol.stack.extend(nodes);
    }
    stats.removed_routes += remove as u64;
    sol.compact();
    stats.max_stack = stats.max_stack.max(sol.stack.len() as u64);
}

/// Applies a feasible move without dropping emptied routes.
fn apply_keep_slots(sol: &mut Solution, mv: &Move, out: MoveOutcome) {
    use crate::feasibility::RouteSlot;
    for u in out.updates {
        match u.slot {
            RouteSlot::Existing(k) => sol.routes[k] = u.route,
            RouteSlot::New => sol.routes.push(u.route),
        }
    }
    if let Move::StackInsert { node, .. } = *mv {
        sol.stack.retain(|&c| c != node);
    }
}

fn pick<T: Copy>(rng: &mut Rng, v: &[T]) -> Option<T> {
    v.choose(rng).copied()
}

/// Draws one random move of the given kind, `None` when the solution has
/// none.
pub fn draw_move(
    inst: &Instance,
    sol: &Solution,
    kind: Neighborhood,
    rng: &mut Rng,
) -> Option<Move> {
    let routes = &sol.routes;
    let long: Vec<usize> = (0..routes.len())
        .filter(|&k| routes[k].len() >= 2)
        .collect();
    let used: Vec<usize> = (0..routes.len())
        .filter(|&k| !routes[k].is_empty())
        .collect();
    match kind {
        Neighborhood::TransferWithin => {
            let route = pick(rng, &long)?;
            let len = routes[route].len();
            let from = rng.gen_range(0..len);
            let mut to = rng.gen_range(0..len - 1);
            if to >= from {
                to += 1;
            }
            Some(Move::TransferWithin { route, from, to })
        }
        Neighborhood::TransferAcross => {
            if used.len() < 2 {
                return None;
            }
            let from_route = pick(rng, &used)?;
            let others: Vec<usize> = used.iter().copied().filter(|&k| k != from_route).collect();
            let to_route = pick(rng, &others)?;
            Some(Move::TransferAcross {
                from_route,
                from_pos: rng.gen_range(0..routes[from_route].len()),
                to_route,
                to_pos: rng.gen_range(0..=routes[to_route].len()),
            })
        }
        Neighborhood::ExchangeWithin => {
            let route = pick(rng, &long)?;
            let len = routes[route].len();
            let a = rng.gen_range(0..len);
            let mut b = rng.gen_range(0..len - 1);
            if b >= a {
                b += 1;
            }
            Some(Move::ExchangeWithin {
                route,
                first: a.min(b),
                second: a.max(b),
            })
        }
        Neighborhood::ExchangeAcross => {
            if used.len() < 2 {
                return None;
            }
            let route_a = pick(rng, &used)?;
            let others: Vec<usize> = used.iter().copied().filter(|&k| k != route_a).collect();
            let route_b = pick(rng, &others)?;
            Some(Move::ExchangeAcross {
                route_a,
                pos_a: rng.gen_range(0..routes[route_a].len()),
                route_b,
                pos_b: rng.gen_range(0..routes[route_b].len()),
            })
        }
        Neighborhood::InsertVehicle => {
            if sol.vehicle_number() >= inst.max_vehicles() {
                return None;
            }
            let route = pick(rng, &long)?;
            Some(Move::InsertVehicle {
                route,
                pos: rng.gen_range(0..routes[route].len()),
            })
        }
    }
}

/// True when every route satisfies capacity, windows, horizon and
/// precedence (stack and fleet size aside).
fn routes_consistent(inst: &Instance, sol: &Solution) -> bool {
    validate(inst, sol).violations.iter().all(|v| {
        matches!(
            v,
            Violation::Unassigned { .. } | Violation::FleetSize { .. }
        )
    })
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

/// Mutable search state of one run.
pub struct SearchState<'a> {
    inst: &'a Instance,
    params: SolverParams,
    pub current: Solution,
    pub best: Option<Solution>,
    pub temp: f64,
    pub iter: u64,
    pub not_imp: usize,
    pub rng: Rng,
    pub stats: SolverStats,
    pub trace: Vec<TraceRow>,
    clock: Clock,
}

impl<'a> SearchState<'a> {
    pub fn new(inst: &'a Instance, params: SolverParams, initial: Solution) -> Self {
        let rng = rng::stream(params.seed, &stream_label(inst));
        let clock = Clock::new(params.time_limit);
        let mut s = Self {
            inst,
            temp: params.temp0,
            params,
            best: None,
            iter: 0,
            not_imp: 1,
            rng,
            stats: SolverStats {
                initial_objective: initial.objective(),
                initial_vehicles: initial.vehicle_number() as u64,
                ..SolverStats::default()
            },
            trace: Vec::new(),
            current: initial,
            clock,
        };
        s.update_best();
        s.record_trace();
        s
    }

    fn best_objective(&self) -> Option<f64> {
        self.best.as_ref().map(Solution::objective)
    }

    fn update_best(&mut self) {
        if !self.current.is_complete(self.inst) {
            return;
        }
        let f = self.current.objective();
        if self.best_objective().is_none_or(|b| f < b) {
            self.best = Some(self.current.clone());
            self.stats.best_updates += 1;
        }
    }

    fn record_trace(&mut self) {
        self.trace.push(TraceRow {
            iter: self.iter,
            best_f: self.best_objective(),
            current_f: self.current.objective(),
            temp: self.temp,
            stack_size: self.current.stack.len(),
            vehicle_number: self.current.vehicle_number(),
        });
    }

    fn accept(&mut self, mv: &Move, out: MoveOutcome) {
        apply_move(&mut self.current, mv, out);
        debug_assert!(
            self.stats
                .neighborhoods
                .iter()
                .map(|n| n.accepted)
                .sum::<u64>()
                % 1000
                != 0
                || routes_consistent(self.inst, &self.current)
        );
    }

    /// One draw per neighbourhood, in random order. Returns whether the
    /// objective changed through an accepted move.
    fn explore(&mut self) -> bool {
        let mut order = Neighborhood::ALL;
        order.shuffle(&mut self.rng);
        let mut improve = false;
        for nb in order {
            let Some(mv) = draw_move(self.inst, &self.current, nb, &mut self.rng) else {
                self.stats.neighborhoods[nb.index()].unavailable += 1;
                continue;
            };
            let out = check_move(self.inst, &self.current, &mv);
            self.stats.stage_rejections.record(&out);
            let st = &mut self.stats.neighborhoods[nb.index()];
            st.tried += 1;
            if !out.is_feasible() {
                st.infeasible += 1;
                continue;
            }
            let delta = out.delta_objective;
            if delta < 0.0 {
                st.accepted += 1;
                improve |= delta < -EPS;
                self.accept(&mv, out);
            } else if sa_accept(delta, self.temp.max(f64::MIN_POSITIVE), &mut self.rng) {
                let st = &mut self.stats.neighborhoods[nb.index()];
                st.accepted += 1;
                st.sa_accepted += 1;
                improve |= delta > EPS;
                self.accept(&mv, out);
            } else {
                self.stats.neighborhoods[nb.index()].rejected += 1;
            }
        }
        improve
    }

    /// Tries every stack node, in random order, on the active vehicles in
    /// random order, first feasible position first.
    fn reinsert_stack(&mut self) -> bool {
        let mut nodes = self.current.stack.clone();
        nodes.shuffle(&mut self.rng);
        let mut any = false;
        for node in nodes {
            let mut vehicles: Vec<usize> = (0..self.current.routes.len()).collect();
            vehicles.shuffle(&mut self.rng);
            let found = vehicles.into_iter().find_map(|route| {
                (0..=self.current.routes[route].len()).find_map(|pos| {
                    let mv = Move::StackInsert { node, route, pos };
                    let out = check_move(self.inst, &self.current, &mv);
                    self.stats.stage_rejections.record(&out);
                    out.is_feasible().then_some((mv, out))
                })
            });
            if let Some((mv, out)) = found {
                apply_move(&mut self.current, &mv, out);
                self.stats.stack_reinsertions += 1;
                any = true;
            }
        }
        any
    }

    /// Local search with annealing; runs at least one iteration and stops
    /// after `max_not_imp - 1` iterations without improvement.
    pub fn local_search(&mut self) {
        self.temp = self.params.temp0;
        self.not_imp = 1;
        loop {
            let mut improve = self.explore();
            improve |= self.reinsert_stack();
            if !improve {
                self.not_imp += 1;
            }
            self.temp *= self.params.alpha;
            self.stats.local_search_iterations += 1;
            if self.not_imp >= self.params.max_not_imp || self.clock.expired() {
                break;
            }
        }
    }

    /// Opens a vehicle and appends stack nodes in random order until none
    /// fits. Returns whether any node was placed.
    fn fill_new_vehicle(&mut self) -> bool {
        let mut order = self.current.stack.clone();
        order.shuffle(&mut self.rng);
        let mut slot: Option<usize> = None;
        loop {
            let mut placed = false;
            for &node in &order {
                if !self.current.stack.contains(&node) {
                    continue;
                }
                let (route, pos) = match slot {
                    None => (self.current.routes.len(), 0),
                    Some(k) => (k, self.current.routes[k].len()),
                };
                let mv = Move::StackInsert { node, route, pos };
                let out = check_move(self.inst, &self.current, &mv);
                self.stats.stage_rejections.record(&out);
                if out.is_feasible() {
                    apply_move(&mut self.current, &mv, out);
                    slot.get_or_insert(self.current.routes.len() - 1);
                    placed = true;
                }
            }
            if !placed {
                break;
            }
        }
        if slot.is_some() {
            self.stats.new_vehicles += 1;
        }
        slot.is_some()
    }

    /// One outer iteration: perturbation, local search and new vehicles
    /// for leftover stack nodes.
    pub fn step(&mut self) {
        perturb(self.inst, &mut self.current, &mut self.rng, &mut self.stats);
        self.local_search();
        while !self.current.stack.is_empty()
            && self.current.vehicle_number() < self.inst.max_vehicles()
            && !self.clock.expired()
        {
            if !self.fill_new_vehicle() {
                break;
            }
            self.local_search();
        }
        for r in &mut self.current.routes {
            r.recompute(self.inst);
        }
        self.update_best();
        self.iter += 1;
        self.stats.iterations = self.iter;
        self.record_trace();
    }

    fn finish(self) -> Result<SolveResult, SolveError> {
        match self.best {
            Some(best) => Ok(SolveResult {
                objective: best.objective(),
                best,
                stats: self.stats,
                trace: self.trace,
            }),
            None => Err(SolveError::NoFeasibleSolution {
                last: Box::new(self.current),
                stats: Box::new(self.stats),
                trace: self.trace,
            }),
        }
    }
}

/// Runs the full search.
pub fn solve(inst: &Instance, params: &SolverParams) -> Result<SolveResult, SolveError> {
    params.check()?;
    let initial = build_initial(inst)?;
    let mut state = SearchState::new(inst, params.clone(), initial);
    let mut iter = 1;
    while iter < params.max_iter && !state.clock.expired() {
        state.step();
        iter += 1;
    }
    state.finish()
}
