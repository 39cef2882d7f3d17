use discrete_fdr::validate::run_bench;

use crate::args::{BenchArgs, OnOff};
use crate::error::{CliError, CliResult};
use crate::output::{csv_document, emit, fmt_float};

pub fn run(args: &BenchArgs) -> CliResult<()> {
    if args.sizes.is_empty() || args.sizes.contains(&0) {
        return Err(CliError::usage("--sizes needs positive problem sizes"));
    }
    let config = args
        .procedure
        .config()?
        .with_critical_values(args.critical_values == OnOff::On);
    let rows = run_bench(&args.sizes, args.reps, &config, args.seed)
        .map_err(|e| CliError::usage(e.to_string()))?;
    for r in &rows {
        eprintln!(
            "{:>9} m={:<6} |A|={:<8} median {:.6} s",
            r.procedure.label(),
            r.m,
            r.support_size,
            r.median_secs
        );
    }
    let doc = csv_document(
        &[
            "procedure",
            "critical_values",
            "m",
            "support_size",
            "cells",
            "median_secs",
        ],
        rows.iter().map(|r| {
            vec![
                r.procedure.slug().to_string(),
                r.critical_values.to_string(),
                r.m.to_string(),
                r.support_size.to_string(),
                r.cells.to_string(),
                fmt_float(r.median_secs),
            ]
        }),
    );
    emit(args.output.as_deref(), &doc)
}
