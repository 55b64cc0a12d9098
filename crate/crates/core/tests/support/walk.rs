//! Random walks comparing the staged move check with full recomputation.

use andor_vrp::construct::build_initial;
use andor_vrp::feasibility::{apply_move, check_move, Move};
use andor_vrp::model::schedule;
use andor_vrp::solver::{draw_move, perturb, Neighborhood, SolverStats};
use andor_vrp::{validate, Instance, NodeId, Route, Solution, Violation};
use rand::Rng as _;

use super::{generated, random_instance, stream, Rng};

/// Post-move customer lists, built directly from the move description.
pub fn sequences_after(sol: &Solution, mv: &Move) -> (Vec<Vec<NodeId>>, Vec<NodeId>) {
    let mut seqs: Vec<Vec<NodeId>> = sol.routes.iter().map(|r| r.seq().to_vec()).collect();
    let mut stack = sol.stack.clone();
    match *mv {
        Move::TransferWithin { route, from, to } => {
            let c = seqs[route].remove(from);
            seqs[route].insert(to, c);
        }
        Move::TransferAcross {
            from_route,
            from_pos,
            to_route,
            to_pos,
        } => {
            let c = seqs[from_route].remove(from_pos);
            seqs[to_route].insert(to_pos, c);
        }
        Move::ExchangeWithin {
            route,
            first,
            second,
        } => seqs[route].swap(first, second),
        Move::ExchangeAcross {
            route_a,
            pos_a,
            route_b,
            pos_b,
        } => {
            let a = seqs[route_a][pos_a];
            seqs[route_a][pos_a] = seqs[route_b][pos_b];
            seqs[route_b][pos_b] = a;
        }
        Move::InsertVehicle { route, pos } => {
            let c = seqs[route].remove(pos);
            seqs.push(vec![c]);
        }
        Move::StackInsert { node, route, pos } => {
            stack.retain(|&c| c != node);
            if route == seqs.len() {
                seqs.push(vec![node]);
            } else {
                seqs[route].insert(pos, node);
            }
        }
    }
    seqs.retain(|s| !s.is_empty());
    (seqs, stack)
}

fn only_unassigned(inst: &Instance, sol: &Solution) -> bool {
    validate(inst, sol)
        .violations
        .iter()
        .all(|v| matches!(v, Violation::Unassigned { .. }))
}

fn draw(inst: &Instance, sol: &Solution, rng: &mut Rng) -> Option<Move> {
    if !sol.stack.is_empty() && rng.gen_bool(0.35) {
        let node = sol.stack[rng.gen_range(0..sol.stack.len())];
        let route = rng.gen_range(0..=sol.routes.len());
        let pos = if route == sol.routes.len() {
            0
        } else {
            rng.gen_range(0..=sol.routes[route].len())
        };
        return Some(Move::StackInsert { node, route, pos });
    }
    let kind = Neighborhood::ALL[rng.gen_range(0..5)];
    draw_move(inst, sol, kind, rng)
}

#[derive(Default)]
pub struct Tally {
    pub pairs: u64,
    pub feasible: u64,
}

pub fn walk(inst: &Instance, steps: usize, seed: u64, tally: &mut Tally) {
    let Ok(mut sol) = build_initial(inst) else {
        return;
    };
    let mut rng = stream(seed, "walk");
    let mut stats = SolverStats::default();
    if sol.vehicle_number() > inst.max_vehicles() {
        perturb(inst, &mut sol, &mut rng, &mut stats);
    }
    for step in 0..steps {
        if step % 150 == 149 {
            perturb(inst, &mut sol, &mut rng, &mut stats);
        }
        let Some(mv) = draw(inst, &sol, &mut rng) else {
            perturb(inst, &mut sol, &mut rng, &mut stats);
            continue;
        };
        let outcome = check_move(inst, &sol, &mv);
        let (seqs, stack) = sequences_after(&sol, &mv);
        let oracle = Solution::new(
            seqs.iter()
                .map(|s| Route::from_seq(inst, s.clone()))
                .collect(),
            stack,
        );
        let want = only_unassigned(inst, &oracle);
        tally.pairs += 1;
        assert_eq!(
            outcome.is_feasible(),
            want,
            "{}: verdict differs for {mv:?} (stage {:?}) on {:?}\noracle: {:?}",
            inst.name(),
            outcome.rejected_at,
            sol.routes
                .iter()
                .map(|r| r.seq().to_vec())
                .collect::<Vec<_>>(),
            validate(inst, &oracle).violations
        );
        if !want {
            continue;
        }
        tally.feasible += 1;
        let delta = outcome.delta_objective;
        let mut next = sol.clone();
        apply_move(&mut next, &mv, outcome);
        assert_eq!(next.routes.len(), seqs.len());
        for (r, s) in next.routes.iter().zip(&seqs) {
            assert_eq!(r.seq(), s.as_slice());
            let fresh = schedule(inst, s);
            for (a, b) in r.arrivals().iter().zip(&fresh.arrivals) {
                assert!((a - b).abs() <= 1e-9, "{}: arrival {a} vs {b}", inst.name());
            }
            assert!((r.completion() - fresh.completion).abs() <= 1e-9);
        }
        assert_eq!(next.stack, oracle.stack);
        assert!((delta - (oracle.objective() - sol.objective())).abs() <= 1e-9);
        if rng.gen_bool(0.8) {
            sol = next;
        }
    }
}

pub fn suite() -> Vec<(Instance, usize)> {
    let mut out = Vec::new();
    let sources = andor_vrp::instance::solomon::standard_sources();
    for (k, src) in sources.iter().enumerate() {
        for (n, tau) in [(10, 0.4), (20, 0.8), (30, 0.4), (30, 0.8)] {
            out.push((generated(src, n, tau, 7 + k as u64), 2500));
        }
    }
    let mut rng = stream(99, "walk-instances");
    for k in 0..60 {
        let n = 5 + k % 26;
        let density = [0.1, 0.3, 0.5][k % 3];
        out.push((random_instance(&mut rng, n, density), 1500));
    }
    out
}

/// Walks every instance of [`suite`]; panics on the first disagreement.
pub fn run_all() -> Tally {
    let mut tally = Tally::default();
    for (k, (inst, steps)) in suite().iter().enumerate() {
        walk(inst, *steps, k as u64, &mut tally);
    }
    tally
}
