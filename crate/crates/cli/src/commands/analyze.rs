use discrete_fdr::{analyze, Direction};

use crate::args::{alternative_name, AnalyzeArgs, Emit};
use crate::error::{CliError, CliResult};
use crate::input::load;
use crate::output::{
    critical_csv, emit, now_unix, result_csv, sha256_hex, sibling, write_manifest, RunFlags,
    RunManifest,
};

pub fn run(args: &AnalyzeArgs) -> CliResult<()> {
    if args.critical_values && args.output.is_none() {
        return Err(CliError::usage("--critical-values requires --output"));
    }
    let config = args
        .procedure
        .config()?
        .with_critical_values(args.critical_values);
    let loaded = load(&args.input, config.alpha)?;
    let result = analyze(&loaded.problem, &config).map_err(|e| CliError::usage(e.to_string()))?;

    let body = match args.emit {
        Emit::Csv => result_csv(&result),
        Emit::Json => serde_json::to_string_pretty(&result).expect("serialisable result") + "\n",
    };
    emit(args.output.as_deref(), &body)?;

    let Some(output) = &args.output else {
        return Ok(());
    };
    if let Some(tau) = &result.critical_values {
        let path = sibling(output, ".crit.csv");
        std::fs::write(&path, critical_csv(tau)).map_err(|e| CliError::io(&path, e))?;
    }
    let procedure = config.procedure();
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION"),
        command: "analyze",
        input: args.input.input.display().to_string(),
        supports: args
            .input
            .supports
            .as_ref()
            .map(|p| p.display().to_string()),
        format: args.input.format.name(),
        method: format!("{:?}", procedure.method()).to_lowercase(),
        direction: match procedure.direction() {
            Direction::StepUp => "su".into(),
            Direction::StepDown => "sd".into(),
        },
        alpha: config.alpha,
        lambda: result.lambda,
        flags: RunFlags {
            critical_values: args.critical_values,
            alternative: args
                .input
                .alternative()?
                .map(|a| alternative_name(a).into()),
            emit: match args.emit {
                Emit::Csv => "csv".into(),
                Emit::Json => "json".into(),
            },
            chunk_budget_bytes: config.chunk_budget_bytes,
        },
        input_sha256: loaded.files.iter().map(|b| sha256_hex(b)).collect(),
        timestamp: now_unix(),
    };
    write_manifest(output, &manifest)
}
