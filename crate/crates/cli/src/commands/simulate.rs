use discrete_fdr::procedures::{analyze, bh_rejections};
use discrete_fdr::validate::{simulate_rules, FdrEstimate, SimulationSpec};
use discrete_fdr::Problem;

use crate::args::{Emit, SimulateArgs};
use crate::error::{CliError, CliResult};
use crate::output::{csv_document, emit, fmt_float};

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let config = args.procedure.config()?;
    let mut spec = SimulationSpec::new(args.m, args.pi0, args.family.into(), args.reps, args.seed)
        .with_effect_size(args.effect_size);
    match args.row_totals.as_slice() {
        [] => {}
        &[lo, hi] => spec = spec.with_row_totals(lo, hi),
        _ => return Err(CliError::usage("--row-totals takes two sizes, e.g. 20,200")),
    }
    spec.validate()
        .map_err(|e| CliError::usage(e.to_string()))?;

    // The procedure and the continuous BH baseline on the same data sets.
    type Rule<'a> = Box<dyn Fn(&Problem) -> discrete_fdr::Result<Vec<usize>> + Sync + 'a>;
    let rules: Vec<Rule> = vec![
        Box::new(|p: &Problem| Ok(analyze(p, &config)?.rejected_indices)),
        Box::new(|p: &Problem| Ok(bh_rejections(p.raw_pvalues(), config.alpha))),
    ];
    let estimates =
        simulate_rules(&spec, config.alpha, &rules).map_err(|e| CliError::usage(e.to_string()))?;
    let names = [config.procedure().label(), "BH"];

    let body = match args.emit {
        Emit::Json => {
            #[derive(serde::Serialize)]
            struct Row<'a> {
                rule: &'a str,
                #[serde(flatten)]
                estimate: FdrEstimate,
            }
            let rows: Vec<Row> = names
                .iter()
                .zip(&estimates)
                .map(|(rule, &estimate)| Row { rule, estimate })
                .collect();
            let doc = serde_json::json!({ "spec": spec, "alpha": config.alpha, "results": rows });
            serde_json::to_string_pretty(&doc).expect("serialisable") + "\n"
        }
        Emit::Csv => csv_document(
            &["rule", "mean_fdp", "std_error", "mean_power"],
            names.iter().zip(&estimates).map(|(rule, e)| {
                vec![
                    rule.to_string(),
                    fmt_float(e.mean_fdp),
                    fmt_float(e.std_error),
                    fmt_float(e.mean_power),
                ]
            }),
        ),
    };
    emit(None, &body)
}
