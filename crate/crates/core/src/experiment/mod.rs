//! Experiment tooling: error metrics, Taguchi parameter tuning, batch
//! benchmarking and the solution file format.

pub mod bench;
pub mod metrics;
pub mod output;
pub mod taguchi;

pub use bench::{bench_rows, run_bench, BenchConfig, BenchRow, Reference, RunRecord};
pub use metrics::{re, rpe, sn, MetricError};
pub use output::{DocError, RouteDoc, SolutionDoc};
pub use taguchi::{run_taguchi, tune, Factor, ResponseTable, TaguchiPlan, TaguchiResult, L9};

/// Maps `f` over `items` on up to `workers` threads (all cores when
/// `None`). Output order always follows input order.
pub fn par_map<T, R, F>(items: Vec<T>, workers: Option<usize>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if workers != Some(1) {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(w) = workers {
                builder = builder.num_threads(w);
            }
            if let Ok(pool) = builder.build() {
                return pool.install(|| items.into_par_iter().map(&f).collect());
            }
        }
    }
    let _ = workers;
    items.into_iter().map(f).collect()
}

/// Seconds elapsed since `start`, or 0 where no clock exists.
#[derive(Clone, Copy, Debug)]
pub struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    pub fn start() -> Self {
        Self {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    pub fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        0.0
    }
}
