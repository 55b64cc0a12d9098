//! Taguchi tuning of the four solver parameters with the L9(3^4)
//! orthogonal array and a smaller-the-better S/N response.

use serde::Serialize;

use super::metrics::{re, sn};
use super::par_map;
use crate::model::Instance;
use crate::solver::{solve, SolverParams};

/// Standard L9 array, levels numbered from 1.
pub const L9: [[u8; 4]; 9] = [
    [1, 1, 1, 1],
    [1, 2, 2, 2],
    [1, 3, 3, 3],
    [2, 1, 2, 3],
    [2, 2, 3, 1],
    [2, 3, 1, 2],
    [3, 1, 3, 2],
    [3, 2, 1, 3],
    [3, 3, 2, 1],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Factor {
    MaxIter,
    NotImpMax,
    Temp,
    Alpha,
}

impl Factor {
    pub const ALL: [Factor; 4] = [
        Factor::MaxIter,
        Factor::NotImpMax,
        Factor::Temp,
        Factor::Alpha,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Factor::MaxIter => "Max_iter",
            Factor::NotImpMax => "notImpMax",
            Factor::Temp => "Temp",
            Factor::Alpha => "alpha",
        }
    }
}

/// True when every pair of columns holds each of the 9 level pairs once.
pub fn is_orthogonal(array: &[[u8; 4]]) -> bool {
    for a in 0..4 {
        for b in a + 1..4 {
            let mut seen = [[0u8; 3]; 3];
            for row in array {
                let (x, y) = (row[a], row[b]);
                if !(1..=3).contains(&x) || !(1..=3).contains(&y) {
                    return false;
                }
                seen[x as usize - 1][y as usize - 1] += 1;
            }
            if seen.iter().flatten().any(|&c| c != 1) {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaguchiPlan {
    /// `levels[f][l]` is level `l + 1` of factor `f`, in [`Factor::ALL`] order.
    pub levels: [[f64; 3]; 4],
    pub array: [[u8; 4]; 9],
}

impl Default for TaguchiPlan {
    fn default() -> Self {
        Self {
            levels: [
                [500.0, 900.0, 1200.0],
                [50.0, 70.0, 90.0],
                [80.0, 100.0, 120.0],
                [0.7, 0.9, 0.95],
            ],
            array: L9,
        }
    }
}

impl TaguchiPlan {
    /// Parameters for one level per factor (levels numbered from 1).
    pub fn params_for(&self, levels: [u8; 4], base: &SolverParams) -> SolverParams {
        let v = |f: usize| self.levels[f][levels[f] as usize - 1];
        SolverParams {
            max_iter: v(0) as usize,
            max_not_imp: v(1) as usize,
            temp0: v(2),
            alpha: v(3),
            ..base.clone()
        }
    }

    pub fn trial_params(&self, trial: usize, base: &SolverParams) -> SolverParams {
        self.params_for(self.array[trial], base)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub levels: [u8; 4],
    pub responses: Vec<f64>,
    pub sn: f64,
    pub mean: f64,
}

/// Level averages per factor, as in a classic response table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResponseTable {
    /// `sn[l][f]`: mean S/N of the trials run with factor `f` at level `l + 1`.
    pub sn: [[f64; 4]; 3],
    pub mean: [[f64; 4]; 3],
    pub delta_sn: [f64; 4],
    pub delta_mean: [f64; 4],
    /// 1 is the most influential factor.
    pub rank_sn: [usize; 4],
    pub rank_mean: [usize; 4],
    /// Chosen level (from 1) per factor: largest S/N.
    pub best_sn: [u8; 4],
    /// Chosen level (from 1) per factor: smallest mean response.
    pub best_mean: [u8; 4],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TaguchiResult {
    pub trials: Vec<TrialResult>,
    pub table: ResponseTable,
    /// Instances left out because no optimum was known.
    pub excluded: Vec<String>,
}

impl TaguchiResult {
    pub fn recommend_sn(&self, plan: &TaguchiPlan, base: &SolverParams) -> SolverParams {
        plan.params_for(self.table.best_sn, base)
    }

    pub fn recommend_mean(&self, plan: &TaguchiPlan, base: &SolverParams) -> SolverParams {
        plan.params_for(self.table.best_mean, base)
    }

    /// Response table as CSV text: 3 level rows, then delta and rank rows.
    pub fn table_csv(&self) -> String {
        let t = &self.table;
        let mut out = String::from("row");
        for f in Factor::ALL {
            out.push_str(&format!(",sn_{}", f.label()));
        }
        for f in Factor::ALL {
            out.push_str(&format!(",mean_{}", f.label()));
        }
        out.push('\n');
        let mut line = |name: String, a: [String; 4], b: [String; 4]| {
            out.push_str(&name);
            for v in a.iter().chain(&b) {
                out.push(',');
                out.push_str(v);
            }
            out.push('\n');
        };
        for l in 0..3 {
            line(
                format!("level{}", l + 1),
                t.sn[l].map(|v| v.to_string()),
                t.mean[l].map(|v| v.to_string()),
            );
        }
        line(
            "delta".into(),
            t.delta_sn.map(|v| v.to_string()),
            t.delta_mean.map(|v| v.to_string()),
        );
        line(
            "rank".into(),
            t.rank_sn.map(|v| v.to_string()),
            t.rank_mean.map(|v| v.to_string()),
        );
        out
    }
}

fn spread(values: [f64; 3]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let d = max - min;
    // inf - inf
    if d.is_nan() {
        0.0
    } else {
        d
    }
}

fn ranks(delta: [f64; 4]) -> [usize; 4] {
    let mut order = [0, 1, 2, 3];
    order.sort_by(|&a, &b| delta[b].total_cmp(&delta[a]).then(a.cmp(&b)));
    let mut out = [0; 4];
    for (r, f) in order.into_iter().enumerate() {
        out[f] = r + 1;
    }
    out
}

fn pick(values: [f64; 3], larger: bool) -> u8 {
    let mut best = 0;
    for l in 1..3 {
        let better = if larger {
            values[l] > values[best]
        } else {
            values[l] < values[best]
        };
        if better {
            best = l;
        }
    }
    best as u8 + 1
}

pub fn response_table(array: &[[u8; 4]; 9], trials: &[TrialResult]) -> ResponseTable {
    let mut sn_t = [[0.0; 4]; 3];
    let mut mean_t = [[0.0; 4]; 3];
    for f in 0..4 {
        for l in 0..3 {
            let rows: Vec<&TrialResult> = trials
                .iter()
                .filter(|t| array[t.trial][f] as usize == l + 1)
                .collect();
            let k = rows.len().max(1) as f64;
            sn_t[l][f] = rows.iter().map(|t| t.sn).sum::<f64>() / k;
            mean_t[l][f] = rows.iter().map(|t| t.mean).sum::<f64>() / k;
        }
    }
    let column = |t: &[[f64; 4]; 3], f: usize| [t[0][f], t[1][f], t[2][f]];
    let delta_sn = [0, 1, 2, 3].map(|f| spread(column(&sn_t, f)));
    let delta_mean = [0, 1, 2, 3].map(|f| spread(column(&mean_t, f)));
    ResponseTable {
        sn: sn_t,
        mean: mean_t,
        delta_sn,
        delta_mean,
        rank_sn: ranks(delta_sn),
        rank_mean: ranks(delta_mean),
        best_sn: [0, 1, 2, 3].map(|f| pick(column(&sn_t, f), true)),
        best_mean: [0, 1, 2, 3].map(|f| pick(column(&mean_t, f), false)),
    }
}

/// Runs the 9 trials with `eval(trial, params)` supplying the responses
/// (smaller is better) and builds the response table.
pub fn run_taguchi<F>(plan: &TaguchiPlan, base: &SolverParams, mut eval: F) -> TaguchiResult
where
    F: FnMut(usize, &SolverParams) -> Vec<f64>,
{
    let trials = (0..plan.array.len())
        .map(|t| {
            let responses = eval(t, &plan.trial_params(t, base));
            trial_result(plan, t, responses)
        })
        .collect::<Vec<_>>();
    let table = response_table(&plan.array, &trials);
    TaguchiResult {
        trials,
        table,
        excluded: Vec::new(),
    }
}

fn trial_result(plan: &TaguchiPlan, trial: usize, responses: Vec<f64>) -> TrialResult {
    let sn_v = sn(&responses).unwrap_or(f64::NAN);
    let mean = if responses.is_empty() {
        f64::NAN
    } else {
        responses.iter().sum::<f64>() / responses.len() as f64
    };
    TrialResult {
        trial,
        levels: plan.array[trial],
        responses,
        sn: sn_v,
        mean,
    }
}

/// Response recorded for a run that ends without a complete solution.
pub const FAILED_RUN_RE: f64 = 100.0;

/// Tunes on instances with known optima. Each trial solves every instance
/// `repetitions` times (seeds `base.seed..base.seed + repetitions`) and
/// uses the relative errors as responses.
pub fn tune(
    cases: &[(Instance, Option<f64>)],
    plan: &TaguchiPlan,
    repetitions: usize,
    base: &SolverParams,
    workers: Option<usize>,
) -> TaguchiResult {
    let excluded: Vec<String> = cases
        .iter()
        .filter(|(_, o)| !matches!(o, Some(v) if *v > 0.0))
        .map(|(i, _)| i.name().to_string())
        .collect();
    let usable: Vec<(&Instance, f64)> = cases
        .iter()
        .filter_map(|(i, o)| o.filter(|v| *v > 0.0).map(|v| (i, v)))
        .collect();
    let mut tasks = Vec::new();
    for t in 0..plan.array.len() {
        for (c, _) in usable.iter().enumerate() {
            for r in 0..repetitions {
                tasks.push((t, c, r));
            }
        }
    }
    let values = par_map(tasks.clone(), workers, |(t, c, r)| {
        let (inst, opt) = usable[c];
        let mut params = plan.trial_params(t, base);
        params.seed = base.seed.wrapping_add(r as u64);
        match solve(inst, &params) {
            Ok(res) => re(res.objective, opt).unwrap_or(FAILED_RUN_RE),
            Err(_) => FAILED_RUN_RE,
        }
    });
    let mut per_trial = vec![Vec::new(); plan.array.len()];
    for ((t, _, _), v) in tasks.into_iter().zip(values) {
        per_trial[t].push(v);
    }
    let trials: Vec<TrialResult> = per_trial
        .into_iter()
        .enumerate()
        .map(|(t, r)| trial_result(plan, t, r))
        .collect();
    let table = response_table(&plan.array, &trials);
    TaguchiResult {
        trials,
        table,
        excluded,
    }
}
