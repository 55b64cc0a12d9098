use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use andor_vrp::experiment::SolutionDoc;
use andor_vrp::instance::read_instance;
use andor_vrp::validate;

fn aovrp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aovrp"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Writes one generated instance into `dir` and returns its path.
fn gen_file(dir: &Path, source: &str, n: &str, tau: &str) -> PathBuf {
    let out = aovrp(&[
        "gen",
        "--source",
        source,
        "--n",
        n,
        "--tau",
        tau,
        "--fill-synthetic",
        "-o",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    dir.join(format!("{source}-syn-{n}-t{tau}.avrp"))
}

#[test]
fn gen_reproduces_the_frozen_rc208_instance() {
    let data = data_dir();
    let out = aovrp(&[
        "gen",
        "--source",
        "RC208",
        "--n",
        "10",
        "--tau",
        "0.8",
        "--data",
        data.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let frozen = std::fs::read_to_string(data.join("RC208-10-t0.8-s42.avrp")).unwrap();
    assert_eq!(stdout(&out), frozen);
}

#[test]
fn gen_writes_one_file_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let out = aovrp(&[
        "gen",
        "--source",
        "C201",
        "--source",
        "R201",
        "--n",
        "10,20",
        "--tau",
        "0.4,0.8",
        "--fill-synthetic",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 8);
    let text = std::fs::read_to_string(dir.path().join("R201-syn-20-t0.4.avrp")).unwrap();
    let inst = read_instance(&text).unwrap();
    assert_eq!(
        (inst.n(), inst.capacity(), inst.max_vehicles()),
        (20, 200.0, 4)
    );
}

#[test]
fn gen_usage_errors() {
    assert_eq!(code(&aovrp(&["gen", "--n", "8"])), 2, "no data and no fill");
    assert_eq!(
        code(&aovrp(&["gen", "--tau", "1.5", "--fill-synthetic"])),
        2
    );
    assert_eq!(
        code(&aovrp(&[
            "gen",
            "--n",
            "10",
            "--tau",
            "0.4,0.8",
            "--fill-synthetic"
        ])),
        2,
        "several instances, no --out"
    );
    assert_eq!(code(&aovrp(&["frobnicate"])), 2);
    assert_eq!(code(&aovrp(&["solve"])), 2);
}

#[test]
fn solve_then_validate() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = gen_file(dir.path(), "RC201", "10", "0.4");
    let sol_path = dir.path().join("sol.json");
    let trace_path = dir.path().join("trace.csv");
    let out = aovrp(&[
        "solve",
        inst_path.to_str().unwrap(),
        "--seed",
        "3",
        "--max-iter",
        "60",
        "-o",
        sol_path.to_str().unwrap(),
        "--trace",
        trace_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let inst = read_instance(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();
    let doc = SolutionDoc::from_json(&std::fs::read_to_string(&sol_path).unwrap()).unwrap();
    assert_eq!(doc.seed, 3);
    assert!(validate(&inst, &doc.to_solution(&inst).unwrap()).is_feasible());
    let trace = std::fs::read_to_string(&trace_path).unwrap();
    // construction counts as iteration 1
    assert_eq!(
        trace.lines().count(),
        1 + 60,
        "header, initial row, 59 search iterations"
    );

    let out = aovrp(&[
        "validate",
        inst_path.to_str().unwrap(),
        sol_path.to_str().unwrap(),
        "--milp",
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("feasible"));
}

#[test]
fn validate_rejects_a_broken_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = gen_file(dir.path(), "R201", "8", "0.8");
    let out = aovrp(&["exact", inst_path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let mut doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // serve the first route backwards, keeping its (now stale) arrivals
    doc["routes"][0]["seq"].as_array_mut().unwrap().reverse();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = aovrp(&[
        "validate",
        inst_path.to_str().unwrap(),
        broken.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1, "{}", stdout(&out));

    let out = aovrp(&[
        "validate",
        inst_path.to_str().unwrap(),
        inst_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "an instance is not a solution file");
}

#[test]
fn infeasible_instances_exit_with_1() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = gen_file(dir.path(), "R206", "8", "0.8");
    let p = inst_path.to_str().unwrap();
    assert_eq!(code(&aovrp(&["exact", p])), 1);
    assert_eq!(code(&aovrp(&["solve", p, "--max-iter", "20"])), 1);
}

#[test]
fn exact_matches_a_long_solver_run() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_file(dir.path(), "C204", "8", "0.4");
    let exact: serde_json::Value =
        serde_json::from_slice(&aovrp(&["exact", p.to_str().unwrap()]).stdout).unwrap();
    let heur: serde_json::Value =
        serde_json::from_slice(&aovrp(&["solve", p.to_str().unwrap(), "--time-limit", "0"]).stdout)
            .unwrap();
    let (a, b) = (
        exact["objective"].as_f64().unwrap(),
        heur["objective"].as_f64().unwrap(),
    );
    assert!(b >= a - 1e-9 && b <= a * 1.02, "{b} vs optimum {a}");
}

#[test]
fn export_lp_writes_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_file(dir.path(), "RC205", "6", "0.8");
    let lp_path = dir.path().join("m.lp");
    assert_eq!(
        code(&aovrp(&[
            "export-lp",
            p.to_str().unwrap(),
            "-o",
            lp_path.to_str().unwrap()
        ])),
        0
    );
    let lp = std::fs::read_to_string(&lp_path).unwrap();
    for section in ["Minimize", "Subject To", "Bounds", "Binaries", "End"] {
        assert!(lp.lines().any(|l| l.trim() == section), "missing {section}");
    }
    assert_eq!(code(&aovrp(&["export-lp", "/nonexistent.avrp"])), 2);
}

#[test]
fn bench_writes_rows_and_solutions() {
    let dir = tempfile::tempdir().unwrap();
    let inst_dir = dir.path().join("inst");
    gen_file(&inst_dir, "C201", "8", "0.4");
    gen_file(&inst_dir, "RC202", "8", "0.4");
    let refs = dir.path().join("refs.csv");
    std::fs::write(&refs, "instance,optimum,milp\nRC202-syn-8-t0.4,,99999\n").unwrap();
    let sols = dir.path().join("sols");
    let out = aovrp(&[
        "bench",
        inst_dir.to_str().unwrap(),
        "--runs",
        "2",
        "--max-iter",
        "40",
        "--references",
        refs.to_str().unwrap(),
        "--solutions",
        sols.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 6, "two runs plus an aggregate per instance");
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for r in &rows {
        assert!(
            !r[col("optimum")].is_empty(),
            "optimum filled by branch and bound"
        );
        assert!(!r[col("re")].is_empty());
    }
    let rc = rows.iter().find(|r| &r[0] == "RC202-syn-8-t0.4").unwrap();
    assert_eq!(rc[col("milp")].parse::<f64>().unwrap(), 99999.0);
    assert_eq!(std::fs::read_dir(&sols).unwrap().count(), 4);
}

#[test]
fn tune_reports_a_response_table() {
    let dir = tempfile::tempdir().unwrap();
    let p = gen_file(dir.path(), "C202", "6", "0.4");
    let table = dir.path().join("table.csv");
    let params = dir.path().join("best.json");
    let out = aovrp(&[
        "tune",
        p.to_str().unwrap(),
        "--reps",
        "1",
        "--time-limit",
        "5",
        "-o",
        table.to_str().unwrap(),
        "--params-out",
        params.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(
        stdout(&out)
            .lines()
            .filter(|l| l.starts_with("trial "))
            .count(),
        9
    );
    assert_eq!(std::fs::read_to_string(&table).unwrap().lines().count(), 6);
    let best: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&params).unwrap()).unwrap();
    assert!(best["max_iter"].as_u64().unwrap() > 0);

    let out = aovrp(&["tune", p.to_str().unwrap(), "--exact-below", "0"]);
    assert_eq!(code(&out), 2, "no optimum known");
}
