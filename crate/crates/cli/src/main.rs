mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use andor_vrp::exact::{evaluate_milp, export_lp, solve_exact, ExactBudget, ExactStatus};
use andor_vrp::experiment::bench::{bench_rows, run_bench, write_csv, BenchConfig};
use andor_vrp::experiment::output::write_trace;
use andor_vrp::experiment::taguchi::{tune, Factor, TaguchiPlan};
use andor_vrp::experiment::SolutionDoc;
use andor_vrp::instance::{build_instance, load_source, solomon, write_instance, GeneratorConfig};
use andor_vrp::solver::{solve, SolveError, SolverParams};
use andor_vrp::validate;
use clap::{Args, Parser, Subcommand};

use files::{read_instance_file, read_instances, references, write_out};

/// Vehicle routing with AND/OR precedence and time windows.
#[derive(Parser)]
#[command(name = "aovrp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances from benchmark sources
    Gen(GenArgs),
    /// Run the heuristic solver on one instance
    Solve(SolveArgs),
    /// Solve one small instance exactly by branch and bound
    Exact(ExactArgs),
    /// Write the mixed-integer model in CPLEX LP format
    ExportLp(ExportArgs),
    /// Check a solution file against an instance
    Validate(ValidateArgs),
    /// Run the L9 parameter experiment
    Tune(TuneArgs),
    /// Repeated solver runs with one CSV row per run
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Source names such as RC208 (default: the 27 long-horizon sources)
    #[arg(long = "source", value_name = "NAME")]
    sources: Vec<String>,
    /// Customer counts
    #[arg(long, value_delimiter = ',', default_values_t = [10usize])]
    n: Vec<usize>,
    /// Precedence densities in [0, 1]
    #[arg(long, value_delimiter = ',', default_values_t = [0.8f64])]
    tau: Vec<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Directory holding the benchmark text files
    #[arg(long, value_name = "DIR")]
    data: Option<PathBuf>,
    /// Use generated stand-ins for sources without a file
    #[arg(long)]
    fill_synthetic: bool,
    /// Override the vehicle capacity
    #[arg(long)]
    capacity: Option<f64>,
    /// Override the number of vehicles
    #[arg(long)]
    vehicles: Option<usize>,
    /// Output directory (one `<name>.avrp` per instance); a single
    /// instance goes to stdout when omitted
    #[arg(long, short, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// JSON file with solver parameters; flags below override it
    #[arg(long, value_name = "FILE")]
    params: Option<PathBuf>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_not_imp: Option<usize>,
    /// Initial temperature
    #[arg(long)]
    temp: Option<f64>,
    /// Cooling factor
    #[arg(long)]
    alpha: Option<f64>,
    /// Seconds per run, 0 for none
    #[arg(long)]
    time_limit: Option<f64>,
}

impl SolverArgs {
    fn params(&self) -> Result<SolverParams, Failure> {
        let mut p = match &self.params {
            Some(path) => serde_json::from_str(&files::read_text(path)?)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
            None => SolverParams::default(),
        };
        if let Some(v) = self.max_iter {
            p.max_iter = v;
        }
        if let Some(v) = self.max_not_imp {
            p.max_not_imp = v;
        }
        if let Some(v) = self.temp {
            p.temp0 = v;
        }
        if let Some(v) = self.alpha {
            p.alpha = v;
        }
        if let Some(v) = self.time_limit {
            p.time_limit = (v > 0.0).then_some(v);
        }
        p.check().map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(p)
    }
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    /// Solution file (stdout when omitted)
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Per-iteration CSV trace
    #[arg(long, value_name = "FILE")]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    instance: PathBuf,
    /// Seconds, 0 for none
    #[arg(long, default_value_t = 60.0)]
    time_limit: f64,
    #[arg(long)]
    node_limit: Option<u64>,
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    instance: PathBuf,
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    instance: PathBuf,
    solution: PathBuf,
    /// Also evaluate the mixed-integer model rows
    #[arg(long)]
    milp: bool,
}

#[derive(Args)]
struct ReferenceArgs {
    /// CSV with columns instance,optimum,milp (empty fields allowed)
    #[arg(long, value_name = "FILE")]
    references: Option<PathBuf>,
    /// Compute missing optima by branch and bound up to this many customers
    #[arg(long, default_value_t = 10)]
    exact_below: usize,
    /// Branch-and-bound seconds per instance
    #[arg(long, default_value_t = 60.0)]
    exact_time_limit: f64,
}

#[derive(Args)]
struct TuneArgs {
    /// Instance files or directories of `.avrp` files
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Runs per instance and trial
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[arg(long)]
    workers: Option<usize>,
    /// Response table CSV
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Write the recommended parameters as JSON
    #[arg(long, value_name = "FILE")]
    params_out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files or directories of `.avrp` files
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    #[arg(long, default_value_t = 5)]
    runs: usize,
    /// Seed of the first run; run r uses seed + r
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    reference: ReferenceArgs,
    #[arg(long)]
    workers: Option<usize>,
    /// CSV output (stdout when omitted)
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Directory for one solution file per feasible run
    #[arg(long, value_name = "DIR")]
    solutions: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Infeasible(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Infeasible(m) | Failure::Internal(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Exact(a) => exact(a),
        Command::ExportLp(a) => export(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Tune(a) => tune_cmd(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("aovrp: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn gen(a: GenArgs) -> Result<(), Failure> {
    if a.tau.iter().any(|t| !(0.0..=1.0).contains(t)) {
        return Err(Failure::Usage("tau must lie in [0, 1]".into()));
    }
    let names = if a.sources.is_empty() {
        solomon::standard_sources()
    } else {
        a.sources.clone()
    };
    let mut sources = Vec::new();
    let mut missing = Vec::new();
    for name in &names {
        match load_source(a.data.as_deref(), name, a.fill_synthetic) {
            Ok(Some(s)) => sources.push(s),
            Ok(None) => missing.push(name.as_str()),
            Err(e) => return Err(Failure::Usage(e.to_string())),
        }
    }
    if !missing.is_empty() {
        return Err(Failure::Usage(format!(
            "no benchmark file for {} (pass --data DIR or --fill-synthetic)",
            missing.join(", ")
        )));
    }
    let mut instances = Vec::new();
    for src in &sources {
        for &n in &a.n {
            for &tau in &a.tau {
                let mut cfg = GeneratorConfig::new(n, tau, a.seed);
                cfg.capacity = a.capacity;
                cfg.max_vehicles = a.vehicles;
                instances.push(
                    build_instance(src, &cfg)
                        .map_err(|e| Failure::Usage(format!("{}: {e}", src.name)))?,
                );
            }
        }
    }
    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
            for inst in &instances {
                write_out(
                    Some(&dir.join(format!("{}.avrp", inst.name()))),
                    &write_instance(inst),
                )?;
            }
            eprintln!("wrote {} instances to {}", instances.len(), dir.display());
            Ok(())
        }
        None if instances.len() == 1 => write_out(None, &write_instance(&instances[0])),
        None => Err(Failure::Usage(format!(
            "{} instances requested; pass --out DIR",
            instances.len()
        ))),
    }
}

fn solve_cmd(a: SolveArgs) -> Result<(), Failure> {
    let inst = read_instance_file(&a.instance)?;
    let mut params = a.solver.params()?;
    params.seed = a.seed;
    let started = std::time::Instant::now();
    match solve(&inst, &params) {
        Ok(res) => {
            eprintln!(
                "{}: objective {:.4}, {} vehicles, {:.2} s",
                inst.name(),
                res.objective,
                res.best.vehicle_number(),
                started.elapsed().as_secs_f64()
            );
            if let Some(path) = &a.trace {
                trace_file(path, &res.trace)?;
            }
            let doc = SolutionDoc::new(&inst, &res.best, a.seed, Some(res.stats));
            write_out(a.out.as_deref(), &doc.to_json())
        }
        Err(SolveError::Params(e)) => Err(Failure::Usage(e.to_string())),
        Err(e @ SolveError::NoFeasibleSolution { .. }) => {
            if let (Some(path), SolveError::NoFeasibleSolution { trace, .. }) = (&a.trace, &e) {
                trace_file(path, trace)?;
            }
            Err(Failure::Infeasible(format!("{}: {e}", inst.name())))
        }
        Err(e) => Err(Failure::Infeasible(format!("{}: {e}", inst.name()))),
    }
}

fn trace_file(path: &std::path::Path, rows: &[andor_vrp::solver::TraceRow]) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_trace(rows, &mut buf).map_err(|e| Failure::Internal(e.to_string()))?;
    write_out(Some(path), &String::from_utf8_lossy(&buf))
}

fn exact(a: ExactArgs) -> Result<(), Failure> {
    let inst = read_instance_file(&a.instance)?;
    let budget = ExactBudget {
        time_limit: (a.time_limit > 0.0).then_some(a.time_limit),
        node_limit: a.node_limit,
    };
    let res = solve_exact(&inst, budget);
    let fmt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.4}"));
    eprintln!(
        "{}: {:?}, objective {}, bound {}, {} nodes",
        inst.name(),
        res.status,
        fmt(res.objective),
        fmt(res.bound),
        res.nodes
    );
    match (res.status, res.solution) {
        (ExactStatus::Infeasible, _) => Err(Failure::Infeasible(format!(
            "{}: proven infeasible",
            inst.name()
        ))),
        (_, Some(sol)) => write_out(
            a.out.as_deref(),
            &SolutionDoc::new(&inst, &sol, 0, None).to_json(),
        ),
        (_, None) => Err(Failure::Infeasible(format!(
            "{}: no solution found within the budget",
            inst.name()
        ))),
    }
}

fn export(a: ExportArgs) -> Result<(), Failure> {
    let inst = read_instance_file(&a.instance)?;
    write_out(a.out.as_deref(), &export_lp(&inst))
}

fn validate_cmd(a: ValidateArgs) -> Result<(), Failure> {
    let inst = read_instance_file(&a.instance)?;
    let doc = SolutionDoc::from_json(&files::read_text(&a.solution)?)
        .map_err(|e| Failure::Usage(format!("{}: {e}", a.solution.display())))?;
    let sol = doc
        .to_solution(&inst)
        .map_err(|e| Failure::Usage(format!("{}: {e}", a.solution.display())))?;
    let report = validate(&inst, &sol);
    for v in &report.violations {
        println!("violation: {v}");
    }
    let mut ok = report.is_feasible();
    if (sol.objective() - doc.objective).abs() > 1e-6 * doc.objective.abs().max(1.0) {
        println!(
            "objective: file says {}, recomputed {}",
            doc.objective,
            sol.objective()
        );
        ok = false;
    }
    if a.milp {
        let m = evaluate_milp(&inst, &sol);
        for v in &m.violations {
            println!("row {} (family {}): slack {}", v.row, v.family, v.slack);
        }
        for u in &m.unliftable {
            println!("not representable: {u}");
        }
        if m.is_clean() != report.is_feasible() {
            return Err(Failure::Internal(
                "validator and model rows disagree".into(),
            ));
        }
    }
    if ok {
        println!(
            "feasible: objective {:.4}, {} vehicles",
            sol.objective(),
            sol.vehicle_number()
        );
        Ok(())
    } else {
        Err(Failure::Infeasible(format!(
            "{}: solution is infeasible",
            inst.name()
        )))
    }
}

fn tune_cmd(a: TuneArgs) -> Result<(), Failure> {
    if a.reps == 0 {
        return Err(Failure::Usage("--reps must be positive".into()));
    }
    let instances = read_instances(&a.instances)?;
    let refs = references(
        &instances,
        &a.reference.references,
        a.reference.exact_below,
        a.reference.exact_time_limit,
    )?;
    let cases: Vec<_> = instances
        .into_iter()
        .zip(refs.iter().map(|r| r.optimum))
        .collect();
    if cases.iter().all(|(_, o)| o.is_none()) {
        return Err(Failure::Usage("no instance has a known optimum".into()));
    }
    let mut base = a.solver.params()?;
    base.seed = a.seed;
    let plan = TaguchiPlan::default();
    let result = tune(&cases, &plan, a.reps, &base, a.workers);
    for name in &result.excluded {
        eprintln!("skipped {name}: no known optimum");
    }
    for t in &result.trials {
        println!(
            "trial {} levels {:?}: S/N {:.3}, mean RE {:.4}",
            t.trial + 1,
            t.levels,
            t.sn,
            t.mean
        );
    }
    let best = result.recommend_sn(&plan, &base);
    let labels = Factor::ALL.map(|f| f.label());
    println!(
        "recommended ({} {}, {} {}, {} {}, {} {})",
        labels[0],
        best.max_iter,
        labels[1],
        best.max_not_imp,
        labels[2],
        best.temp0,
        labels[3],
        best.alpha
    );
    if let Some(path) = &a.out {
        write_out(Some(path), &result.table_csv())?;
    }
    if let Some(path) = &a.params_out {
        let json =
            serde_json::to_string_pretty(&best).map_err(|e| Failure::Internal(e.to_string()))?;
        write_out(Some(path), &(json + "\n"))?;
    }
    Ok(())
}

fn bench(a: BenchArgs) -> Result<(), Failure> {
    if a.runs == 0 {
        return Err(Failure::Usage("--runs must be positive".into()));
    }
    let instances = read_instances(&a.instances)?;
    let refs = references(
        &instances,
        &a.reference.references,
        a.reference.exact_below,
        a.reference.exact_time_limit,
    )?;
    let cases: Vec<_> = instances.into_iter().zip(refs).collect();
    let cfg = BenchConfig {
        runs: a.runs,
        base_seed: a.seed,
        params: a.solver.params()?,
        workers: a.workers,
    };
    let records = run_bench(&cases, &cfg);
    if let Some(dir) = &a.solutions {
        std::fs::create_dir_all(dir)
            .map_err(|e| Failure::Internal(format!("{}: {e}", dir.display())))?;
        for (rec, (inst, _)) in records
            .iter()
            .zip(cases.iter().flat_map(|c| std::iter::repeat_n(c, a.runs)))
        {
            if let Some(doc) = rec.document(inst) {
                let file = dir.join(format!("{}-s{}.json", rec.instance, rec.seed));
                write_out(Some(&file), &doc.to_json())?;
            }
        }
    }
    let mut buf = Vec::new();
    write_csv(&bench_rows(&records), &mut buf).map_err(|e| Failure::Internal(e.to_string()))?;
    write_out(a.out.as_deref(), &String::from_utf8_lossy(&buf))
}
