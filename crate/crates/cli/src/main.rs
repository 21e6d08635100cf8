use clap::Parser;
use ddsim_cli::{emit, run, Experiment, ExperimentConfig, Format};
use std::path::PathBuf;
use std::process::ExitCode;

/// Dynamical decoupling experiments.
#[derive(Debug, Parser)]
#[command(name = "ddsim", version)]
struct Args {
    experiment: Experiment,
    /// Flat key = value configuration file. Defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; falls back to `output_path` in the config, then stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Worker threads for independent rows.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match drive(&args) {
        Ok(flags) if flags.is_empty() => ExitCode::SUCCESS,
        Ok(flags) => {
            for f in &flags {
                eprintln!("convergence: {f}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn drive(args: &Args) -> ddsim_cli::CliResult<Vec<String>> {
    let mut cfg = match &args.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.experiment = args.experiment;
    cfg.apply_env()?;
    if let Some(n) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| ddsim_cli::CliError::Config(e.to_string()))?;
    }
    let report = run(&cfg)?;
    let out = args.out.clone().or_else(|| cfg.output_path.as_ref().map(PathBuf::from));
    match out {
        Some(p) => emit(&report.table, args.format, &p)?,
        None => print!("{}", report.table.render(args.format)?),
    }
    Ok(report.flags)
}
