use andor_vrp::experiment::SolutionDoc;
use andor_vrp::instance::read_instance;
use andor_vrp::validate;
use andor_vrp_wasm::{exact_json, generate_json, solve_json};
use serde_json::Value;

fn generated(source: &str, n: usize, tau: f64) -> (String, Value) {
    let v: Value = serde_json::from_str(&generate_json(source, n, tau, 42).unwrap()).unwrap();
    (v["avrp"].as_str().unwrap().to_string(), v["view"].clone())
}

#[test]
fn generate_describes_the_instance() {
    let (avrp, view) = generated("rc204", 9, 0.8);
    let inst = read_instance(&avrp).unwrap();
    assert_eq!(view["name"], "RC204-syn-9-t0.8");
    assert_eq!(view["nodes"].as_array().unwrap().len(), inst.nodes().len());
    assert_eq!(
        view["relations"].as_array().unwrap().len(),
        inst.precedence().relation_count()
    );
    assert_eq!(
        generate_json("RC204", 9, 0.8, 42).unwrap(),
        generate_json("RC204", 9, 0.8, 42).unwrap()
    );
}

#[test]
fn generate_rejects_bad_input() {
    assert!(generate_json("X101", 10, 0.5, 1).is_err());
    assert!(generate_json("C201", 10, 1.5, 1).is_err());
    assert!(generate_json("C201", 0, 0.5, 1).is_err());
}

#[test]
fn solve_and_exact_agree_on_a_small_instance() {
    let (avrp, _) = generated("C205", 7, 0.4);
    let inst = read_instance(&avrp).unwrap();
    let doc = SolutionDoc::from_json(&solve_json(&avrp, 1, 400).unwrap()).unwrap();
    assert!(validate(&inst, &doc.to_solution(&inst).unwrap()).is_feasible());
    let ex: Value = serde_json::from_str(&exact_json(&avrp, 1_000_000).unwrap()).unwrap();
    assert_eq!(ex["status"], "OPTIMAL");
    let opt = ex["objective"].as_f64().unwrap();
    assert!(
        doc.objective >= opt - 1e-9 && doc.objective <= opt * 1.02,
        "{} vs {opt}",
        doc.objective
    );
    assert_eq!(ex["solution"]["objective"].as_f64().unwrap(), opt);
}

#[test]
fn exact_refuses_large_instances_and_reports_infeasibility() {
    let (big, _) = generated("R201", 20, 0.4);
    assert!(exact_json(&big, 10).is_err());
    let (bad, _) = generated("R206", 8, 0.8);
    let ex: Value = serde_json::from_str(&exact_json(&bad, 1_000_000).unwrap()).unwrap();
    assert_eq!(ex["status"], "INFEASIBLE");
    assert!(solve_json(&bad, 0, 20).is_err());
}
