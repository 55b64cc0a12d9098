//! Repeated solver runs over a set of instances, with one CSV row per run
//! and an aggregate row per instance.

use serde::{Deserialize, Serialize};

use super::metrics::{re, rpe};
use super::output::SolutionDoc;
use super::{par_map, Stopwatch};
use crate::model::{Instance, Solution};
use crate::solver::{solve, SolveError, SolverParams, SolverStats};

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub runs: usize,
    /// Run `r` (from 0) uses seed `base_seed + r`.
    pub base_seed: u64,
    pub params: SolverParams,
    /// Worker threads; `None` uses every core.
    pub workers: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            runs: 5,
            base_seed: 0,
            params: SolverParams::default(),
            workers: None,
        }
    }
}

/// Known reference values for one instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    pub optimum: Option<f64>,
    pub milp: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub run: usize,
    pub seed: u64,
    /// `None` when the run ended without a complete solution.
    pub objective: Option<f64>,
    pub vehicles: Option<usize>,
    pub runtime_s: f64,
    pub reference: Reference,
    pub solution: Option<Solution>,
    pub stats: SolverStats,
}

impl RunRecord {
    pub fn re(&self) -> Option<f64> {
        re(self.objective?, self.reference.optimum?).ok()
    }

    pub fn rpe(&self) -> Option<f64> {
        rpe(self.objective?, self.reference.milp?).ok()
    }

    /// Solution file contents, without any timing data.
    pub fn document(&self, inst: &Instance) -> Option<SolutionDoc> {
        let sol = self.solution.as_ref()?;
        Some(SolutionDoc::new(
            inst,
            sol,
            self.seed,
            Some(self.stats.clone()),
        ))
    }
}

/// Solves every `(instance, run)` pair. Results are ordered by instance,
/// then run, whatever the number of workers.
pub fn run_bench(cases: &[(Instance, Reference)], cfg: &BenchConfig) -> Vec<RunRecord> {
    let tasks: Vec<(usize, usize)> = (0..cases.len())
        .flat_map(|c| (0..cfg.runs).map(move |r| (c, r)))
        .collect();
    par_map(tasks, cfg.workers, |(c, r)| {
        let (inst, reference) = &cases[c];
        let seed = cfg.base_seed.wrapping_add(r as u64);
        let params = SolverParams {
            seed,
            ..cfg.params.clone()
        };
        let watch = Stopwatch::start();
        let outcome = solve(inst, &params);
        let runtime_s = watch.seconds();
        let (objective, vehicles, solution, stats) = match outcome {
            Ok(res) => (
                Some(res.objective),
                Some(res.best.vehicle_number()),
                Some(res.best),
                res.stats,
            ),
            Err(SolveError::NoFeasibleSolution { stats, .. }) => (None, None, None, *stats),
            Err(_) => (None, None, None, SolverStats::default()),
        };
        RunRecord {
            instance: inst.name().to_string(),
            run: r,
            seed,
            objective,
            vehicles,
            runtime_s,
            reference: *reference,
            solution,
            stats,
        }
    })
}

/// One CSV line. `run` is the run number from 1, or `aggregate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance: String,
    pub run: String,
    pub seed: Option<u64>,
    /// Run rows: the run's objective. Aggregate rows: the best objective.
    pub objective: Option<f64>,
    /// Aggregate rows only.
    pub mean_objective: Option<f64>,
    pub vehicles: Option<usize>,
    /// Aggregate rows: mean over runs.
    pub runtime_s: f64,
    pub feasible_runs: usize,
    pub optimum: Option<f64>,
    pub re: Option<f64>,
    pub milp: Option<f64>,
    pub rpe: Option<f64>,
}

pub const AGGREGATE: &str = "aggregate";

fn aggregate(group: &[RunRecord]) -> BenchRow {
    let first = &group[0];
    let objs: Vec<f64> = group.iter().filter_map(|r| r.objective).collect();
    let best = objs.iter().copied().reduce(f64::min);
    let mean = (!objs.is_empty()).then(|| objs.iter().sum::<f64>() / objs.len() as f64);
    let best_run = group
        .iter()
        .find(|r| r.objective.is_some() && r.objective == best);
    BenchRow {
        instance: first.instance.clone(),
        run: AGGREGATE.into(),
        seed: None,
        objective: best,
        mean_objective: mean,
        vehicles: best_run.and_then(|r| r.vehicles),
        runtime_s: group.iter().map(|r| r.runtime_s).sum::<f64>() / group.len() as f64,
        feasible_runs: objs.len(),
        optimum: first.reference.optimum,
        re: best_run.and_then(RunRecord::re),
        milp: first.reference.milp,
        rpe: best_run.and_then(RunRecord::rpe),
    }
}

/// Run rows followed by one aggregate row for each instance.
pub fn bench_rows(records: &[RunRecord]) -> Vec<BenchRow> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < records.len() {
        let mut end = start + 1;
        while end < records.len() && records[end].instance == records[start].instance {
            end += 1;
        }
        let group = &records[start..end];
        for r in group {
            out.push(BenchRow {
                instance: r.instance.clone(),
                run: (r.run + 1).to_string(),
                seed: Some(r.seed),
                objective: r.objective,
                mean_objective: None,
                vehicles: r.vehicles,
                runtime_s: r.runtime_s,
                feasible_runs: usize::from(r.objective.is_some()),
                optimum: r.reference.optimum,
                re: r.re(),
                milp: r.reference.milp,
                rpe: r.rpe(),
            });
        }
        out.push(aggregate(group));
        start = end;
    }
    out
}

pub fn write_csv<W: std::io::Write>(rows: &[BenchRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<BenchRow>, csv::Error> {
    csv::Reader::from_reader(input).deserialize().collect()
}
