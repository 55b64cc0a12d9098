//! Move feasibility in three stages of increasing cost:
//!
//! 1. capacity, fleet size and a travel-plus-service lower bound on the
//!    completion time of every affected route;
//! 2. AND/OR precedence, by case analysis on the nodes whose set of
//!    same-route predecessors changes;
//! 3. time windows, by re-timing only the changed parts of each affected
//!    route and propagating push-backward / push-forward deltas along the
//!    unchanged runs, stopping as soon as a delta is absorbed.
//!
//! Stage 2 assumes the routes touched by the move satisfy the precedence
//! rules before the move, which holds for every solution the solver builds.

use serde::Serialize;

use crate::model::{Instance, NodeId, Route, Solution, EPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum MoveKind {
    TransferWithin,
    TransferAcross,
    ExchangeWithin,
    ExchangeAcross,
    InsertVehicle,
    StackInsert,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Move {
    /// Node at `from` ends up at position `to` of the same route.
    TransferWithin {
        route: usize,
        from: usize,
        to: usize,
    },
    /// Node at `(from_route, from_pos)` is inserted before position `to_pos`
    /// of `to_route` (`to_pos == len` appends).
    TransferAcross {
        from_route: usize,
        from_pos: usize,
        to_route: usize,
        to_pos: usize,
    },
    /// Swap the nodes at `first < second` of one route.
    ExchangeWithin {
        route: usize,
        first: usize,
        second: usize,
    },
    ExchangeAcross {
        route_a: usize,
        pos_a: usize,
        route_b: usize,
        pos_b: usize,
    },
    /// Node at `(route, pos)` leaves and opens a new vehicle alone.
    InsertVehicle { route: usize, pos: usize },
    /// Stack node goes before position `pos` of `route`; `route ==
    /// routes.len()` opens a new vehicle.
    StackInsert {
        node: NodeId,
        route: usize,
        pos: usize,
    },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::TransferWithin { .. } => MoveKind::TransferWithin,
            Move::TransferAcross { .. } => MoveKind::TransferAcross,
            Move::ExchangeWithin { .. } => MoveKind::ExchangeWithin,
            Move::ExchangeAcross { .. } => MoveKind::ExchangeAcross,
            Move::InsertVehicle { .. } => MoveKind::InsertVehicle,
            Move::StackInsert { .. } => MoveKind::StackInsert,
        }
    }

    pub fn is_well_formed(&self, sol: &Solution) -> bool {
        let len = |k: usize| sol.routes.get(k).map(Route::len);
        match *self {
            Move::TransferWithin { route, from, to } => {
                matches!(len(route), Some(l) if from < l && to < l)
            }
            Move::TransferAcross {
                from_route,
                from_pos,
                to_route,
                to_pos,
            } => {
                from_route != to_route
                    && matches!(len(from_route), Some(l) if from_pos < l)
                    && matches!(len(to_route), Some(l) if to_pos <= l)
            }
            Move::ExchangeWithin {
                route,
                first,
                second,
            } => {
                matches!(len(route), Some(l) if first < second && second < l)
            }
            Move::ExchangeAcross {
                route_a,
                pos_a,
                route_b,
                pos_b,
            } => {
                route_a != route_b
                    && matches!(len(route_a), Some(l) if pos_a < l)
                    && matches!(len(route_b), Some(l) if pos_b < l)
            }
            Move::InsertVehicle { route, pos } => matches!(len(route), Some(l) if pos < l),
            Move::StackInsert { node, route, pos } => {
                sol.stack.contains(&node)
                    && if route == sol.routes.len() {
                        pos == 0
                    } else {
                        matches!(len(route), Some(l) if pos <= l)
                    }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Stage {
    Capacity,
    Precedence,
    TimeWindows,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RouteSlot {
    Existing(usize),
    New,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteUpdate {
    pub slot: RouteSlot,
    pub route: Route,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MoveOutcome {
    /// First failing stage, `None` when the move is feasible.
    pub rejected_at: Option<Stage>,
    /// Number of stages evaluated (1 to 3).
    pub stages_run: u8,
    /// Objective change; only meaningful for feasible moves.
    pub delta_objective: f64,
    /// Post-move versions of every affected route.
    pub updates: Vec<RouteUpdate>,
}

impl MoveOutcome {
    pub fn is_feasible(&self) -> bool {
        self.rejected_at.is_none()
    }

    fn rejected(stage: Stage, stages_run: u8) -> Self {
        Self {
            rejected_at: Some(stage),
            stages_run,
            delta_objective: 0.0,
            updates: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PushDirection {
    Backward,
    Forward,
    None,
}

/// Arrival change at the head of a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PushDelta {
    pub direction: PushDirection,
    pub magnitude: f64,
}

impl PushDelta {
    /// Classifies the change from `old` to `new`.
    pub fn between(old: f64, new: f64) -> Self {
        if new < old {
            Self {
                direction: PushDirection::Backward,
                magnitude: old - new,
            }
        } else if new > old {
            Self {
                direction: PushDirection::Forward,
                magnitude: new - old,
            }
        } else {
            Self {
                direction: PushDirection::None,
                magnitude: 0.0,
            }
        }
    }
}

/// Waiting time at position `pos + 1` in the current schedule.
fn waiting_after(inst: &Instance, route: &Route, pos: usize) -> f64 {
    let seq = route.seq();
    let ready =
        route.arrivals()[pos] + inst.node(seq[pos]).service + inst.travel(seq[pos], seq[pos + 1]);
    (route.arrivals()[pos + 1] - ready).max(0.0)
}

/// Push backward over positions `start..end` of `route`:
/// `B[start] = b0`, `B[u+1] = min(B[u], A[u+1] - e[u+1])`.
///
/// Returns the deltas of the touched positions; the vector stops at the
/// first position whose delta is zero, beyond which nothing moves.
pub fn push_backward_chain(
    inst: &Instance,
    route: &Route,
    start: usize,
    end: usize,
    b0: f64,
) -> Vec<f64> {
    let mut deltas = Vec::new();
    let mut b = b0;
    let mut pos = start;
    while pos < end && b > 0.0 {
        deltas.push(b);
        pos += 1;
        if pos < end {
            let next = route.seq()[pos];
            b = b.min(route.arrivals()[pos] - inst.node(next).early);
        }
    }
    deltas
}

#[derive(Clone, Debug, PartialEq)]
pub enum ForwardChain {
    Shifted(Vec<f64>),
    /// `A + F > l` at this route position.
    Infeasible {
        position: usize,
    },
}

/// Push forward over positions `start..end` of `route`:
/// `F[start] = f0`, `F[u+1] = max(F[u] - W[u+1], 0)` where `W` is the
/// current waiting time. Fails as soon as a shifted arrival passes its
/// latest time; the deltas vector stops at the first zero delta.
pub fn push_forward_chain(
    inst: &Instance,
    route: &Route,
    start: usize,
    end: usize,
    f0: f64,
) -> ForwardChain {
    let mut deltas = Vec::new();
    let mut f = f0;
    let mut pos = start;
    while pos < end && f > 0.0 {
        let node = inst.node(route.seq()[pos]);
        if route.arrivals()[pos] + f > node.late + EPS {
            return ForwardChain::Infeasible { position: pos };
        }
        deltas.push(f);
        if pos + 1 < end {
            f = (f - waiting_after(inst, route, pos)).max(0.0);
        }
        pos += 1;
    }
    ForwardChain::Shifted(deltas)
}

/// Building block of a post-move route.
#[derive(Clone, Copy, Debug)]
enum Piece {
    Node(NodeId),
    /// Positions `a..b` of the pre-move route, kept in order.
    Run(usize, usize),
}

struct Plan {
    slot: RouteSlot,
    pieces: Vec<Piece>,
}

fn node_at(sol: &Solution, route: usize, pos: usize) -> NodeId {
    sol.routes[route].seq()[pos]
}

fn plans(sol: &Solution, mv: &Move) -> Vec<Plan> {
    use Piece::*;
    let len = |k: usize| sol.routes[k].len();
    match *mv {
        Move::TransferWithin { route, from, to } => {
            let i = node_at(sol, route, from);
            let n = len(route);
            let pieces = if to > from {
                vec![Run(0, from), Run(from + 1, to + 1), Node(i), Run(to + 1, n)]
            } else if to < from {
                vec![Run(0, to), Node(i), Run(to, from), Run(from + 1, n)]
            } else {
                vec![Run(0, n)]
            };
            vec![Plan {
                slot: RouteSlot::Existing(route),
                pieces,
            }]
        }
        Move::TransferAcross {
            from_route,
            from_pos,
            to_route,
            to_pos,
        } => {
            let i = node_at(sol, from_route, from_pos);
            vec![
                Plan {
                    slot: RouteSlot::Existing(from_route),
                    pieces: vec![Run(0, from_pos), Run(from_pos + 1, len(from_route))],
                },
                Plan {
                    slot: RouteSlot::Existing(to_route),
                    pieces: vec![Run(0, to_pos), Node(i), Run(to_pos, len(to_route))],
                },
            ]
        }
        Move::ExchangeWithin {
            route,
            first,
            second,
        } => {
            let i = node_at(sol, route, first);
            let j = node_at(sol, route, second);
            vec![Plan {
                slot: RouteSlot::Existing(route),
                pieces: vec![
                    Run(0, first),
                    Node(j),
                    Run(first + 1, second),
                    Node(i),
                    Run(second + 1, len(route)),
                ],
            }]
        }
        Move::ExchangeAcross {
            route_a,
            pos_a,
            route_b,
            pos_b,
        } => {
            let i = node_at(sol, route_a, pos_a);
            let j = node_at(sol, route_b, pos_b);
            vec![
                Plan {
                    slot: RouteSlot::Existing(route_a),
                    pieces: vec![Run(0, pos_a), Node(j), Run(pos_a + 1, len(route_a))],
                },
                Plan {
                    slot: RouteSlot::Existing(route_b),
                    pieces: vec![Run(0, pos_b), Node(i), Run(pos_b + 1, len(route_b))],
                },
            ]
        }
        Move::InsertVehicle { route, pos } => {
            let i = node_at(sol, route, pos);
            vec![
                Plan {
                    slot: RouteSlot::Existing(route),
                    pieces: vec![Run(0, pos), Run(pos + 1, len(route))],
                },
                Plan {
                    slot: RouteSlot::New,
                    pieces: vec![Node(i)],
                },
            ]
        }
        Move::StackInsert { node, route, pos } => {
            if route == sol.routes.len() {
                vec![Plan {
                    slot: RouteSlot::New,
                    pieces: vec![Node(node)],
                }]
            } else {
                vec![Plan {
                    slot: RouteSlot::Existing(route),
                    pieces: vec![Run(0, pos), Node(node), Run(pos, len(route))],
                }]
            }
        }
    }
}

/// Load and travel-plus-service duration of a planned route.
fn plan_load_duration(inst: &Instance, old: Option<&Route>, pieces: &[Piece]) -> (f64, f64) {
    let mut load = 0.0;
    let mut duration = 0.0;
    let mut prev = NodeId::DEPOT;
    let mut visit = |c: NodeId, load: &mut f64, duration: &mut f64| {
        let node = inst.node(c);
        *load += node.demand;
        *duration += inst.travel(prev, c) + node.service;
        prev = c;
    };
    for piece in pieces {
        match *piece {
            Piece::Node(c) => visit(c, &mut load, &mut duration),
            Piece::Run(a, b) => {
                let seq = old.expect("runs need a source route").seq();
                for &c in &seq[a..b] {
                    visit(c, &mut load, &mut duration);
                }
            }
        }
    }
    if prev != NodeId::DEPOT {
        duration += inst.travel(prev, inst.dummy_depot());
    }
    (load, duration)
}

fn old_route(sol: &Solution, slot: RouteSlot) -> Option<&Route> {
    match slot {
        RouteSlot::Existing(k) => Some(&sol.routes[k]),
        RouteSlot::New => None,
    }
}

/// Stage 1: every affected route stays within capacity, its travel plus
/// service time (a lower bound on its completion time) fits the horizon,
/// and a move opening a vehicle does not exceed the fleet.
pub fn stage1_capacity_horizon(inst: &Instance, sol: &Solution, mv: &Move) -> bool {
    let plans = plans(sol, mv);
    stage1_on_plans(inst, sol, &plans)
}

fn stage1_on_plans(inst: &Instance, sol: &Solution, plans: &[Plan]) -> bool {
    let mut active = sol.vehicle_number() as isize;
    for plan in plans {
        let old = old_route(sol, plan.slot);
        let (load, duration) = plan_load_duration(inst, old, &plan.pieces);
        if load > inst.capacity() + EPS || duration > inst.horizon() + EPS {
            return false;
        }
        let was_used = old.is_some_and(|r| !r.is_empty());
        let is_used = !plan
            .pieces
            .iter()
            .all(|p| matches!(p, Piece::Run(a, b) if a >= b));
        active += is_used as isize - was_used as isize;
    }
    active <= inst.max_vehicles() as isize
}

/// True when some node of `seq` is an OR-type predecessor of `x`.
fn any_or_pred<'a>(inst: &Instance, x: NodeId, mut seq: impl Iterator<Item = &'a NodeId>) -> bool {
    let pm = inst.precedence();
    seq.any(|&y| pm.is_or(y, x))
}

/// `i` leaves position `p` of `seq`; some later node would be left with no
/// OR-type predecessor before it (`i` was its only one).
fn only_or_pred_of_later(
    inst: &Instance,
    seq: &[NodeId],
    p: usize,
    replacement: Option<NodeId>,
) -> bool {
    let pm = inst.precedence();
    let i = seq[p];
    (p + 1..seq.len()).any(|idx| {
        let x = seq[idx];
        pm.is_or(i, x)
            && !(any_or_pred(inst, x, seq[..p].iter())
                || replacement.is_some_and(|r| pm.is_or(r, x))
                || any_or_pred(inst, x, seq[p + 1..idx].iter()))
    })
}

/// `i` enters a route so that `before` precedes it and `after` follows it.
fn insertion_precedence_ok(
    inst: &Instance,
    i: NodeId,
    before: &[NodeId],
    after: &[NodeId],
) -> bool {
    let pm = inst.precedence();
    // i must not be an AND-type predecessor of a node placed before it
    if before.iter().any(|&x| pm.is_and(i, x)) {
        return false;
    }
    // i must not be an AND-type successor of a node placed after it
    if after.iter().any(|&x| pm.is_and(x, i)) {
        return false;
    }
    // a node with OR-type predecessors needs one of them before it
    pm.or_preds(i).is_empty() || any_or_pred(inst, i, before.iter())
}

/// Stage 2: AND/OR precedence case analysis per move kind.
pub fn stage2_precedence(inst: &Instance, sol: &Solution, mv: &Move) -> bool {
    let pm = inst.precedence();
    match *mv {
        Move::TransferWithin { route, from, to } => {
            let seq = sol.routes[route].seq();
            let i = seq[from];
            if to > from {
                (from + 1..=to).all(|idx| {
                    let x = seq[idx];
                    // case 1: i is not an AND-type predecessor of a node it jumps over
                    !pm.is_and(i, x)
                        // case 2: nor its only OR-type predecessor
                        && !(pm.is_or(i, x)
                            && !any_or_pred(inst, x, seq[..from].iter().chain(&seq[from + 1..idx])))
                })
            } else if to < from {
                let between = &seq[to..from];
                // case 1: no node jumped over is an AND-type predecessor of i
                if between.iter().any(|&x| pm.is_and(x, i)) {
                    return false;
                }
                // case 2: the jumped-over nodes are not i's only OR-type predecessors
                !(any_or_pred(inst, i, between.iter()) && !any_or_pred(inst, i, seq[..to].iter()))
            } else {
                true
            }
        }
        Move::TransferAcross {
            from_route,
            from_pos,
            to_route,
            to_pos,
        } => {
            let src = sol.routes[from_route].seq();
            let dst = sol.routes[to_route].seq();
            let i = src[from_pos];
            // case 1, then cases 2-3 plus i's own OR requirement on the new route
            !only_or_pred_of_later(inst, src, from_pos, None)
                && insertion_precedence_ok(inst, i, &dst[..to_pos], &dst[to_pos..])
        }
        Move::ExchangeWithin {
            route,
            first,
            second,
        } => {
            let seq = sol.routes[route].seq();
            let (i, j) = (seq[first], seq[second]);
            // case 1
            if pm.is_and(i, j) {
                return false;
            }
            for idx in first + 1..second {
                let x = seq[idx];
                // cases 2 and 4
                if pm.is_and(i, x) || pm.is_and(x, j) {
                    return false;
                }
                // case 3: x keeps an OR-type predecessor once i moves behind it
                if pm.is_or(i, x)
                    && !(pm.is_or(j, x)
                        || any_or_pred(inst, x, seq[..first].iter().chain(&seq[first + 1..idx])))
                {
                    return false;
                }
            }
            // case 5: j keeps an OR-type predecessor in front of its new position
            pm.or_preds(j).is_empty() || any_or_pred(inst, j, seq[..first].iter())
        }
        Move::ExchangeAcross {
            route_a,
            pos_a,
            route_b,
            pos_b,
        } => {
            let a = sol.routes[route_a].seq();
            let b = sol.routes[route_b].seq();
            let (i, j) = (a[pos_a], b[pos_b]);
            // cases 1, 2 and 6 on route b; cases 4, 5 and 3 on route a
            insertion_precedence_ok(inst, i, &b[..pos_b], &b[pos_b + 1..])
                && !only_or_pred_of_later(inst, b, pos_b, Some(i))
                && insertion_precedence_ok(inst, j, &a[..pos_a], &a[pos_a + 1..])
                && !only_or_pred_of_later(inst, a, pos_a, Some(j))
        }
        Move::InsertVehicle { route, pos } => {
            let seq = sol.routes[route].seq();
            let i = seq[pos];
            // case 1: i leaves no later node without an OR-type predecessor;
            // case 2: i alone on a vehicle has no OR-type predecessor
            !only_or_pred_of_later(inst, seq, pos, None) && pm.or_preds(i).is_empty()
        }
        Move::StackInsert { node, route, pos } => {
            if route == sol.routes.len() {
                pm.or_preds(node).is_empty()
            } else {
                let seq = sol.routes[route].seq();
                insertion_precedence_ok(inst, node, &seq[..pos], &seq[pos..])
            }
        }
    }
}

/// Re-times a planned route. Unchanged runs are shifted with the push
/// chains; `None` on any window or horizon violation.
fn retime(inst: &Instance, old: Option<&Route>, pieces: &[Piece]) -> Option<Route> {
    let cap: usize = pieces
        .iter()
        .map(|p| match *p {
            Piece::Node(_) => 1,
            Piece::Run(a, b) => b.saturating_sub(a),
        })
        .sum();
    let mut seq = Vec::with_capacity(cap);
    let mut arrivals = Vec::with_capacity(cap);
    let mut prev = NodeId::DEPOT;
    let mut departure = 0.0;
    let mut load = 0.0;
    let mut duration = 0.0;

    for piece in pieces {
        match *piece {
            Piece::Node(c) => {
                let node = inst.node(c);
                let leg = inst.travel(prev, c);
                let a = node.early.max(departure + leg);
                if a > node.late + EPS {
                    return None;
                }
                seq.push(c);
                arrivals.push(a);
                load += node.demand;
                duration += leg + node.service;
                departure = a + node.service;
                prev = c;
            }
            Piece::Run(a, b) if a < b => {
                let old = old.expect("runs need a source route");
                let oseq = old.seq();
                let oarr = old.arrivals();
                let head = oseq[a];
                let leg = inst.travel(prev, head);
                let new_head = inst.node(head).early.max(departure + leg);
                let push = PushDelta::between(oarr[a], new_head);
                let shift: Vec<f64> = match push.direction {
                    PushDirection::None => Vec::new(),
                    PushDirection::Backward => push_backward_chain(inst, old, a, b, push.magnitude),
                    PushDirection::Forward => {
                        match push_forward_chain(inst, old, a, b, push.magnitude) {
                            ForwardChain::Shifted(d) => d,
                            ForwardChain::Infeasible { .. } => return None,
                        }
                    }
                };
                duration += leg;
                for p in a..b {
                    let c = oseq[p];
                    let node = inst.node(c);
                    let t = if p == a {
                        new_head
                    } else {
                        match (push.direction, shift.get(p - a)) {
                            (PushDirection::Backward, Some(d)) => oarr[p] - d,
                            (PushDirection::Forward, Some(d)) => oarr[p] + d,
                            _ => oarr[p],
                        }
                    };
                    if p > a {
                        duration += inst.travel(oseq[p - 1], c);
                    }
                    duration += node.service;
                    load += node.demand;
                    seq.push(c);
                    arrivals.push(t);
                }
                let last = oseq[b - 1];
                departure = arrivals[arrivals.len() - 1] + inst.node(last).service;
                prev = last;
            }
            Piece::Run(..) => {}
        }
    }
    let completion = if seq.is_empty() {
        0.0
    } else {
        let back = inst.travel(prev, inst.dummy_depot());
        duration += back;
        departure + back
    };
    if completion > inst.horizon() + EPS {
        return None;
    }
    Some(Route::from_cached(
        seq, arrivals, load, completion, duration,
    ))
}

/// Stage 3: re-times every affected route; `Some(updates)` when all
/// windows and the depot horizon hold.
pub fn stage3_time_windows(inst: &Instance, sol: &Solution, mv: &Move) -> Option<Vec<RouteUpdate>> {
    stage3_on_plans(inst, sol, &plans(sol, mv))
}

fn stage3_on_plans(inst: &Instance, sol: &Solution, plans: &[Plan]) -> Option<Vec<RouteUpdate>> {
    plans
        .iter()
        .map(|plan| {
            retime(inst, old_route(sol, plan.slot), &plan.pieces).map(|route| RouteUpdate {
                slot: plan.slot,
                route,
            })
        })
        .collect()
}

/// Runs the three stages in order, stopping at the first failure.
pub fn check_move(inst: &Instance, sol: &Solution, mv: &Move) -> MoveOutcome {
    debug_assert!(mv.is_well_formed(sol), "ill-formed move {mv:?}");
    let plans = plans(sol, mv);
    if !stage1_on_plans(inst, sol, &plans) {
        return MoveOutcome::rejected(Stage::Capacity, 1);
    }
    if !stage2_precedence(inst, sol, mv) {
        return MoveOutcome::rejected(Stage::Precedence, 2);
    }
    let Some(updates) = stage3_on_plans(inst, sol, &plans) else {
        return MoveOutcome::rejected(Stage::TimeWindows, 3);
    };
    let before: f64 = updates
        .iter()
        .filter_map(|u| old_route(sol, u.slot))
        .map(Route::completion)
        .sum();
    let after: f64 = updates.iter().map(|u| u.route.completion()).sum();
    MoveOutcome {
        rejected_at: None,
        stages_run: 3,
        delta_objective: after - before,
        updates,
    }
}

/// Applies a feasible move using the route versions computed by
/// [`check_move`]. Routes that become empty are dropped, so route indices
/// may shift.
pub fn apply_move(sol: &mut Solution, mv: &Move, outcome: MoveOutcome) {
    debug_assert!(outcome.is_feasible());
    for update in outcome.updates {
        match update.slot {
            RouteSlot::Existing(k) => sol.routes[k] = update.route,
            RouteSlot::New => sol.routes.push(update.route),
        }
    }
    if let Move::StackInsert { node, .. } = *mv {
        if let Some(p) = sol.stack.iter().position(|&c| c == node) {
            sol.stack.remove(p);
        }
    }
    sol.compact();
}

/// Applies a move without any feasibility check by rebuilding the affected
/// routes from scratch. Used to compare against [`check_move`].
pub fn apply_unchecked(inst: &Instance, sol: &mut Solution, mv: &Move) {
    let plans = plans(sol, mv);
    let mut updates = Vec::new();
    for plan in &plans {
        let old = old_route(sol, plan.slot);
        let mut seq = Vec::new();
        for piece in &plan.pieces {
            match *piece {
                Piece::Node(c) => seq.push(c),
                Piece::Run(a, b) => seq.extend_from_slice(&old.expect("run source").seq()[a..b]),
            }
        }
        updates.push(RouteUpdate {
            slot: plan.slot,
            route: Route::from_seq(inst, seq),
        });
    }
    let outcome = MoveOutcome {
        rejected_at: None,
        stages_run: 0,
        delta_objective: 0.0,
        updates,
    };
    apply_move(sol, mv, outcome);
}
