use discrete_fdr::validate::{fdr_suite, oracle_suite, Mutation};

use crate::args::{MutationArg, Suite, ValidateArgs};
use crate::error::{CliError, CliResult};

pub fn run(args: &ValidateArgs) -> CliResult<()> {
    if args.reps == 0 {
        return Err(CliError::usage("--reps must be positive"));
    }
    let lib = |e: discrete_fdr::FdrError| CliError::usage(e.to_string());
    let report = match args.suite {
        Suite::Oracle => {
            let mutation = args.mutate.map(|m| match m {
                MutationArg::SuFirstCrossing => Mutation::StepUpFirstCrossing,
            });
            oracle_suite(args.reps, args.seed, mutation).map_err(lib)?
        }
        Suite::Fdr => fdr_suite(
            args.m,
            &args.pi0,
            args.reps,
            args.seed,
            args.family.into(),
            args.alpha,
        )
        .map_err(lib)?,
    };
    print!("{report}");
    if report.passed() {
        println!("all checks passed");
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed()).count();
        Err(CliError::Validation(format!("{failed} checks failed")))
    }
}
