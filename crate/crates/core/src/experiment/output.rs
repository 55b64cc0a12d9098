//! Solution files (JSON) and iteration traces (CSV).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{schedule, Instance, NodeId, Route, Solution};
use crate::solver::{SolverStats, TraceRow};

pub const SOLUTION_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteDoc {
    /// Vehicle number from 1.
    pub vehicle: usize,
    pub seq: Vec<usize>,
    pub arrivals: Vec<f64>,
    /// Completion time.
    #[serde(rename = "CT")]
    pub ct: f64,
    /// Travel plus service time.
    #[serde(rename = "CD")]
    pub cd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolutionDoc {
    pub version: u32,
    pub instance: String,
    pub seed: u64,
    pub objective: f64,
    pub vehicle_number: usize,
    pub routes: Vec<RouteDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stack: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolverStats>,
}

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid solution file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported solution file version {0} (expected {SOLUTION_VERSION})")]
    Version(u32),
    #[error("solution is for instance {found}, not {expected}")]
    InstanceMismatch { expected: String, found: String },
    #[error("route {0}: {1} arrivals for {2} customers")]
    ArrivalCount(usize, usize, usize),
}

impl SolutionDoc {
    pub fn new(inst: &Instance, sol: &Solution, seed: u64, stats: Option<SolverStats>) -> Self {
        let routes = sol
            .routes
            .iter()
            .filter(|r| !r.is_empty())
            .enumerate()
            .map(|(k, r)| RouteDoc {
                vehicle: k + 1,
                seq: r.seq().iter().map(|c| c.0).collect(),
                arrivals: r.arrivals().to_vec(),
                ct: r.completion(),
                cd: r.duration(),
            })
            .collect();
        Self {
            version: SOLUTION_VERSION,
            instance: inst.name().to_string(),
            seed,
            objective: sol.objective(),
            vehicle_number: sol.vehicle_number(),
            routes,
            stack: sol.stack.iter().map(|c| c.0).collect(),
            stats,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, DocError> {
        let doc: SolutionDoc = serde_json::from_str(text)?;
        if doc.version != SOLUTION_VERSION {
            return Err(DocError::Version(doc.version));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution documents always serialize") + "\n"
    }

    /// Rebuilds the solution with the file's arrival and completion times
    /// kept as given, so a validator sees any disagreement with the
    /// instance data.
    pub fn to_solution(&self, inst: &Instance) -> Result<Solution, DocError> {
        if self.instance != inst.name() {
            return Err(DocError::InstanceMismatch {
                expected: inst.name().to_string(),
                found: self.instance.clone(),
            });
        }
        let mut routes =
            vec![Route::empty(); self.routes.iter().map(|r| r.vehicle).max().unwrap_or(0)];
        for (k, r) in self.routes.iter().enumerate() {
            if r.arrivals.len() != r.seq.len() {
                return Err(DocError::ArrivalCount(k, r.arrivals.len(), r.seq.len()));
            }
            let seq: Vec<NodeId> = r.seq.iter().map(|&c| NodeId(c)).collect();
            let load = seq
                .iter()
                .filter(|c| inst.is_customer(**c))
                .map(|c| inst.node(*c).demand)
                .sum();
            let slot = r.vehicle.max(1) - 1;
            routes[slot] = Route::from_cached(seq, r.arrivals.clone(), load, r.ct, r.cd);
        }
        Ok(Solution::new(
            routes,
            self.stack.iter().map(|&c| NodeId(c)).collect(),
        ))
    }
}

/// Recomputed schedule of one sequence; handy for callers that only have
/// customer lists.
pub fn routes_from_lists(inst: &Instance, lists: &[Vec<usize>]) -> Solution {
    let routes = lists
        .iter()
        .map(|l| {
            let seq: Vec<NodeId> = l.iter().map(|&c| NodeId(c)).collect();
            let s = schedule(inst, &seq);
            Route::from_schedule(seq, s)
        })
        .collect();
    Solution::new(routes, vec![])
}

pub fn write_trace<W: std::io::Write>(rows: &[TraceRow], out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
