use discrete_fdr::procedures::{
    bh_thresholds, critical_values, dbh_tau_m, xi_diagnostic, Procedure, XiVariant,
};
use discrete_fdr::{Config, SortPermutation};

use crate::args::{PlotArgs, What};
use crate::error::{CliError, CliResult};
use crate::input::load;
use crate::output::{csv_document, emit, fmt_float};

pub fn run(args: &PlotArgs) -> CliResult<()> {
    let base = Config::default().with_alpha(args.alpha);
    base.validate()
        .map_err(|e| CliError::usage(e.to_string()))?;
    let loaded = load(&args.input, args.alpha)?;
    let problem = loaded.problem.match_pvalues();
    let lib = |e: discrete_fdr::FdrError| CliError::usage(e.to_string());

    let doc = match args.what {
        What::Xi => {
            if args.lambda.is_some() || !args.methods.is_empty() {
                return Err(CliError::usage(
                    "--lambda and --methods only apply to --what critical-values",
                ));
            }
            let merged = problem.merged_support();
            let ts = merged.atoms();
            let plain = xi_diagnostic(&problem, ts, XiVariant::Plain).map_err(lib)?;
            let sd = xi_diagnostic(&problem, ts, XiVariant::Sd).map_err(lib)?;
            let su = match dbh_tau_m(&problem, args.alpha) {
                Some(tau_m) => {
                    Some(xi_diagnostic(&problem, ts, XiVariant::Su(tau_m)).map_err(lib)?)
                }
                None => None,
            };
            let rows = (0..ts.len()).map(|j| {
                vec![
                    fmt_float(ts[j]),
                    fmt_float(plain[j]),
                    fmt_float(sd[j]),
                    su.as_ref().map_or_else(String::new, |v| fmt_float(v[j])),
                ]
            });
            csv_document(&["t", "xi_plain", "xi_sd", "xi_su"], rows)
        }
        What::CriticalValues => {
            let procedures: Vec<Procedure> = if args.methods.is_empty() {
                Procedure::ALL.to_vec()
            } else {
                args.methods.clone()
            };
            if args.lambda.is_some() && !procedures.contains(&Procedure::Dbr) {
                return Err(CliError::usage("--lambda only applies to DBR"));
            }
            let m = problem.len();
            let columns = procedures
                .iter()
                .map(|&p| {
                    let mut config = Config::for_procedure(p).with_alpha(args.alpha);
                    if let Some(l) = args.lambda {
                        config = config.with_lambda(l);
                    }
                    config.validate().map_err(lib)?;
                    critical_values(&problem, &config).map_err(lib)
                })
                .collect::<CliResult<Vec<_>>>()?;
            let bh = bh_thresholds(args.alpha, m);
            let sorted =
                SortPermutation::from_values(problem.raw_pvalues()).apply(problem.raw_pvalues());
            let mut header = vec!["k".to_string(), "bh_crit".to_string()];
            header.extend(procedures.iter().map(|p| format!("tau_{}", p.slug())));
            header.push("sorted_p".into());
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            let rows = (0..m).map(|k| {
                let mut row = vec![(k + 1).to_string(), fmt_float(bh[k])];
                row.extend(columns.iter().map(|c| fmt_float(c[k])));
                row.push(fmt_float(sorted[k]));
                row
            });
            csv_document(&header, rows)
        }
    };
    emit(args.output.as_deref(), &doc)
}
