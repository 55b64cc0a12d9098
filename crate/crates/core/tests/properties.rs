mod support;

use andor_vrp::exact::evaluate_milp;
use andor_vrp::experiment::output::SolutionDoc;
use andor_vrp::feasibility::{push_backward_chain, push_forward_chain, ForwardChain};
use andor_vrp::instance::{read_instance, write_instance};
use andor_vrp::model::schedule;
use andor_vrp::solver::{solve, SolveError, SolverParams};
use andor_vrp::{validate, Instance, Relation, Route, Solution};
use proptest::prelude::*;

use support::{generated, random_instance, random_solution, stream};

fn arb_instance() -> impl Strategy<Value = Instance> {
    (any::<u64>(), 1usize..=12, 0.0f64..0.6)
        .prop_map(|(seed, n, d)| random_instance(&mut stream(seed, "prop"), n, d))
}

fn arb_generated() -> impl Strategy<Value = Instance> {
    (
        0usize..27,
        2usize..=40,
        prop::sample::select(vec![0.0, 0.2, 0.4, 0.8, 1.0]),
        any::<u64>(),
    )
        .prop_map(|(s, n, tau, seed)| {
            let src = &andor_vrp::instance::solomon::standard_sources()[s];
            generated(src, n, tau, seed)
        })
}

/// Earliest-start arrivals of `route` after its arrival at `start` is
/// forced to `forced`.
fn reschedule_from(inst: &Instance, route: &Route, start: usize, forced: f64) -> Vec<f64> {
    let seq = route.seq();
    let mut out = route.arrivals().to_vec();
    out[start] = forced;
    for p in start + 1..seq.len() {
        let prev = inst.node(seq[p - 1]);
        out[p] = inst
            .node(seq[p])
            .early
            .max(out[p - 1] + prev.service + inst.travel(seq[p - 1], seq[p]));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn forward_chain_matches_rescheduling(inst in arb_instance(), seed in any::<u64>(), start_frac in 0.0f64..1.0, f0 in 0.0f64..200.0) {
        let sol = random_solution(&inst, &mut stream(seed, "fw"));
        let route = &sol.routes[0];
        let start = ((route.len() as f64 * start_frac) as usize).min(route.len() - 1);
        let moved = reschedule_from(&inst, route, start, route.arrivals()[start] + f0);
        // the chain only looks at positions it shifts
        let first_late = (start..route.len())
            .find(|&p| moved[p] > route.arrivals()[p] && moved[p] > inst.node(route.seq()[p]).late + 1e-9);
        match push_forward_chain(&inst, route, start, route.len(), f0) {
            ForwardChain::Infeasible { position } => {
                prop_assert_eq!(
                    Some(position),
                    first_late,
                    "start {} f0 {} arrivals {:?} moved {:?} lates {:?}",
                    start,
                    f0,
                    route.arrivals(),
                    moved,
                    route.seq().iter().map(|c| inst.node(*c).late).collect::<Vec<_>>()
                );
            }
            ForwardChain::Shifted(deltas) => {
                prop_assert_eq!(first_late, None);
                for p in start..route.len() {
                    let want = moved[p] - route.arrivals()[p];
                    let got = deltas.get(p - start).copied().unwrap_or(0.0);
                    prop_assert!((want - got).abs() <= 1e-9, "pos {}: {} vs {}", p, got, want);
                }
            }
        }
    }

    #[test]
    fn backward_chain_matches_rescheduling(inst in arb_instance(), seed in any::<u64>(), start_frac in 0.0f64..1.0, frac in 0.0f64..=1.0) {
        let sol = random_solution(&inst, &mut stream(seed, "bw"));
        let route = &sol.routes[0];
        let start = ((route.len() as f64 * start_frac) as usize).min(route.len() - 1);
        let slack = route.arrivals()[start] - inst.node(route.seq()[start]).early;
        let b0 = slack * frac;
        let moved = reschedule_from(&inst, route, start, route.arrivals()[start] - b0);
        let deltas = push_backward_chain(&inst, route, start, route.len(), b0);
        for p in start..route.len() {
            let want = route.arrivals()[p] - moved[p];
            let got = deltas.get(p - start).copied().unwrap_or(0.0);
            prop_assert!((want - got).abs() <= 1e-9, "pos {}: {} vs {}", p, got, want);
        }
    }

    #[test]
    fn generated_matrices_are_well_formed(inst in arb_generated()) {
        let pm = inst.precedence();
        for (i, j, r) in pm.triples() {
            prop_assert!(i < j);
            prop_assert!(r != Relation::None);
            prop_assert!(inst.node(i).late <= inst.node(j).late);
        }
        for j in inst.customers() {
            for a in pm.and_preds(j) {
                prop_assert!(!pm.or_preds(j).contains(a));
            }
        }
    }

    #[test]
    fn instance_files_round_trip(inst in arb_generated()) {
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn solution_files_round_trip(inst in arb_instance(), seed in any::<u64>()) {
        let sol = random_solution(&inst, &mut stream(seed, "json"));
        let doc = SolutionDoc::new(&inst, &sol, seed, None);
        let back = SolutionDoc::from_json(&doc.to_json()).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_solution(&inst).unwrap(), sol);
    }

    #[test]
    fn validate_and_milp_agree_on_random_solutions(inst in arb_instance(), seed in any::<u64>()) {
        let sol = random_solution(&inst, &mut stream(seed, "milp"));
        let feasible = validate(&inst, &sol).is_feasible();
        let report = evaluate_milp(&inst, &sol);
        prop_assert_eq!(feasible, report.is_clean(), "{:?} / {:?}", validate(&inst, &sol).violations, report);
    }

    #[test]
    fn schedule_respects_earliest_start(inst in arb_instance(), seed in any::<u64>()) {
        let sol = random_solution(&inst, &mut stream(seed, "sched"));
        for r in &sol.routes {
            let s = schedule(&inst, r.seq());
            for (c, a) in r.seq().iter().zip(&s.arrivals) {
                prop_assert!(*a >= inst.node(*c).early);
            }
            prop_assert!(s.completion >= s.duration - 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_invariants(inst in arb_generated(), seed in any::<u64>()) {
        let params = SolverParams { max_iter: 40, max_not_imp: 15, time_limit: None, seed, ..SolverParams::default() };
        match solve(&inst, &params) {
            Ok(res) => {
                prop_assert!(validate(&inst, &res.best).is_feasible());
                prop_assert!(res.best.stack.is_empty() && res.best.vehicle_number() <= inst.max_vehicles());
                prop_assert!((res.objective - res.best.objective()).abs() <= 1e-9);
                let bests: Vec<f64> = res.trace.iter().filter_map(|t| t.best_f).collect();
                prop_assert!(bests.windows(2).all(|w| w[1] <= w[0]));
                for nb in &res.stats.neighborhoods {
                    prop_assert_eq!(nb.accepted + nb.rejected + nb.infeasible, nb.tried);
                }
            }
            Err(SolveError::NoFeasibleSolution { stats, .. }) => {
                for nb in &stats.neighborhoods {
                    prop_assert_eq!(nb.accepted + nb.rejected + nb.infeasible, nb.tried);
                }
            }
            Err(SolveError::Construction(_)) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}

#[test]
fn validate_and_milp_agree_on_solver_output() {
    let mut checked = 0;
    for (k, src) in andor_vrp::instance::solomon::standard_sources()
        .iter()
        .enumerate()
    {
        let inst = generated(src, 6 + k % 10, 0.8, k as u64);
        let params = SolverParams {
            max_iter: 30,
            max_not_imp: 10,
            time_limit: None,
            seed: 1,
            ..SolverParams::default()
        };
        if let Ok(res) = solve(&inst, &params) {
            assert!(evaluate_milp(&inst, &res.best).is_clean());
            checked += 1;
        }
    }
    assert!(checked >= 20);
}

#[test]
fn milp_flags_routes_beyond_the_fleet() {
    let inst = generated("R201", 8, 0.0, 3);
    let routes: Vec<Route> = inst
        .customers()
        .map(|c| Route::from_seq(&inst, vec![c]))
        .collect();
    let sol = Solution::new(routes, vec![]);
    assert!(!validate(&inst, &sol).is_feasible());
    let report = evaluate_milp(&inst, &sol);
    assert!(!report.is_clean());
    assert!(report.violations.iter().any(|v| v.family == 1));
}
