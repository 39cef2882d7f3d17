//! Wall-clock measurements of the two computation paths.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::generate::{generate_problem, TestFamily, DEFAULT_ROW_TOTALS};
use crate::error::Result;
use crate::procedures::{analyze, Procedure, ProcedureConfig};
use crate::stepdist::MultipleTestingProblem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub procedure: Procedure,
    pub critical_values: bool,
    pub m: usize,
    /// Size of the merged support.
    pub support_size: usize,
    /// `m · support_size`
    pub cells: usize,
    pub median_secs: f64,
}

/// Median duration of `reps` calls.
pub fn median_time(reps: usize, mut f: impl FnMut()) -> Duration {
    let mut times: Vec<Duration> = (0..reps.max(1))
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed()
        })
        .collect();
    times.sort_unstable();
    times[times.len() / 2]
}

/// Synthetic Fisher problem of size `m`, as used by the benchmarks.
pub fn bench_problem(m: usize, seed: u64) -> MultipleTestingProblem<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate_problem(
        &mut rng,
        m,
        TestFamily::Fisher,
        0.8,
        0.2,
        0.05,
        DEFAULT_ROW_TOTALS,
    )
    .0
}

/// Times `analyze` on one synthetic problem per size.
pub fn run_bench(
    sizes: &[usize],
    reps: usize,
    config: &ProcedureConfig<f64>,
    seed: u64,
) -> Result<Vec<BenchRow>> {
    config.validate()?;
    sizes
        .iter()
        .map(|&m| {
            let problem = bench_problem(m, seed);
            let support_size = problem.merged_support().len();
            let mut outcome = Ok(());
            let median = median_time(reps, || {
                if let Err(e) = analyze(&problem, config) {
                    outcome = Err(e);
                }
            });
            outcome?;
            Ok(BenchRow {
                procedure: config.procedure(),
                critical_values: config.want_critical_values,
                m,
                support_size,
                cells: m * support_size,
                median_secs: median.as_secs_f64(),
            })
        })
        .collect()
}
