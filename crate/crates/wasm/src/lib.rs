//! WebAssembly bindings for the static demo page. Every call takes and
//! returns JSON or instance text so the page needs no glue beyond
//! `JSON.parse`.

use andor_vrp::exact::{solve_exact, ExactBudget};
use andor_vrp::experiment::SolutionDoc;
use andor_vrp::instance::{
    build_instance, read_instance, solomon, write_instance, GeneratorConfig,
};
use andor_vrp::solver::{solve as run_solver, SolverParams};
use andor_vrp::{Instance, Relation};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest instance the exact search accepts in the page.
pub const EXACT_MAX_CUSTOMERS: usize = 12;

fn instance_view(inst: &Instance) -> Value {
    let nodes: Vec<Value> = inst
        .nodes()
        .iter()
        .map(|n| json!({"id": n.id.0, "x": n.x, "y": n.y, "early": n.early, "late": n.late, "demand": n.demand}))
        .collect();
    let relations: Vec<Value> = inst
        .precedence()
        .triples()
        .map(|(i, j, r)| json!([i.0, j.0, if r == Relation::And { "AND" } else { "OR" }]))
        .collect();
    json!({
        "name": inst.name(),
        "capacity": inst.capacity(),
        "vehicles": inst.max_vehicles(),
        "horizon": inst.horizon(),
        "nodes": nodes,
        "relations": relations,
    })
}

/// Builds an instance from a generated stand-in for `source` (browser
/// builds ship no benchmark files). Returns `{avrp, view}`.
pub fn generate_json(source: &str, n: usize, tau: f64, seed: u64) -> Result<String, String> {
    let name = source.trim().to_ascii_uppercase();
    if !solomon::standard_sources().contains(&name) {
        return Err(format!("unknown source {source}"));
    }
    if !(1..=100).contains(&n) {
        return Err("n must lie between 1 and 100".into());
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err("tau must lie in [0, 1]".into());
    }
    let data = solomon::synthetic(&name, 100);
    let inst =
        build_instance(&data, &GeneratorConfig::new(n, tau, seed)).map_err(|e| e.to_string())?;
    Ok(json!({"avrp": write_instance(&inst), "view": instance_view(&inst)}).to_string())
}

/// Heuristic run without a clock: `max_iter` bounds the work.
pub fn solve_json(avrp: &str, seed: u64, max_iter: usize) -> Result<String, String> {
    let inst = read_instance(avrp).map_err(|e| e.to_string())?;
    let params = SolverParams {
        max_iter,
        time_limit: None,
        seed,
        ..SolverParams::default()
    };
    let res = run_solver(&inst, &params).map_err(|e| e.to_string())?;
    Ok(SolutionDoc::new(&inst, &res.best, seed, Some(res.stats)).to_json())
}

/// Branch and bound with a node budget. Returns
/// `{status, objective, bound, nodes, solution}`.
pub fn exact_json(avrp: &str, node_limit: u64) -> Result<String, String> {
    let inst = read_instance(avrp).map_err(|e| e.to_string())?;
    if inst.n() > EXACT_MAX_CUSTOMERS {
        return Err(format!(
            "exact search is limited to {EXACT_MAX_CUSTOMERS} customers here"
        ));
    }
    let res = solve_exact(
        &inst,
        ExactBudget {
            time_limit: None,
            node_limit: Some(node_limit),
        },
    );
    let solution = res.solution.as_ref().map(|s| {
        serde_json::from_str::<Value>(&SolutionDoc::new(&inst, s, 0, None).to_json()).unwrap()
    });
    Ok(json!({
        "status": res.status,
        "objective": res.objective,
        "bound": res.bound,
        "nodes": res.nodes,
        "solution": solution,
    })
    .to_string())
}

#[wasm_bindgen]
pub fn generate(source: &str, n: u32, tau: f64, seed: u32) -> Result<String, JsError> {
    generate_json(source, n as usize, tau, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn solve(avrp: &str, seed: u32, max_iter: u32) -> Result<String, JsError> {
    solve_json(avrp, seed.into(), max_iter as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn exact(avrp: &str, node_limit: u32) -> Result<String, JsError> {
    exact_json(avrp, node_limit.into()).map_err(|e| JsError::new(&e))
}
