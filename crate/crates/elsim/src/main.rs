use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elsim::{execute, write_outputs, AppError, Artifacts, ExperimentKind, RunConfig};

/// Pseudo-spectral simulator and estimate harness for the simplified
/// Ericksen-Leslie system.
#[derive(Parser)]
#[command(name = "elsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Local existence by Picard iteration (or `experiment = full_vs_reduced`).
    Simulate(Common),
    /// Full system against its arc reduction.
    Verify(Common),
    /// Small-data global run with decay fit.
    Decay(Common),
    /// Estimate ensemble (or `experiment = appendix_suite`).
    Suite {
        #[command(flatten)]
        common: Common,
        /// Run the appendix integral sweep instead of the ensemble.
        #[arg(long)]
        appendix: bool,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; overrides the `output` key.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Modes per axis; overrides the `modes` key.
    #[arg(long)]
    modes: Option<usize>,
    /// Any configuration key, applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

impl Command {
    /// Experiments the subcommand may run; the first is its default.
    fn family(&self) -> &'static [ExperimentKind] {
        use ExperimentKind::*;
        match self {
            Command::Simulate(_) => &[LocalExistence, FullVsReduced],
            Command::Verify(_) => &[FullVsReduced],
            Command::Decay(_) => &[GlobalDecay],
            Command::Suite { appendix: false, .. } => &[EstimateSuite, AppendixSuite],
            Command::Suite { appendix: true, .. } => &[AppendixSuite],
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Simulate(c) | Command::Verify(c) | Command::Decay(c) => c,
            Command::Suite { common, .. } => common,
        }
    }
}

fn load(cmd: &Command) -> Result<RunConfig, AppError> {
    let common = cmd.common();
    let text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(AppError::io(p))?,
        None => String::new(),
    };
    let mut cfg = RunConfig::parse(&text)?;
    let explicit = text
        .lines()
        .filter_map(|l| l.split('#').next()?.split_once('='))
        .chain(common.sets.iter().filter_map(|s| s.split_once('=')))
        .any(|(k, _)| k.trim() == "experiment");
    for kv in &common.sets {
        let (k, v) = kv.split_once('=').ok_or_else(|| AppError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v.trim()).map_err(|e| AppError::Usage(format!("--set {kv}: {e}")))?;
    }
    let family = cmd.family();
    if !family.contains(&cfg.experiment) {
        if explicit {
            return Err(AppError::Usage(format!("experiment {} cannot run under this subcommand", cfg.experiment)));
        }
        cfg.experiment = family[0];
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(modes) = common.modes {
        cfg.modes = modes;
    }
    if let Some(out) = &common.output {
        cfg.output = out.clone();
    }
    Ok(cfg)
}

fn report(a: &Artifacts) {
    for (k, v) in &a.summary {
        println!("{k} = {v}");
    }
    for c in &a.checks {
        println!("{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
}

fn run(cmd: &Command) -> Result<bool, AppError> {
    let cfg = load(cmd)?;
    let mut a = Artifacts::default();
    let outcome = execute(&cfg, &mut a);
    if let Err(e @ AppError::Stage { .. }) = &outcome {
        a.summary.push(("error".into(), e.to_string()));
        write_outputs(&a, &cfg.output)?;
    }
    outcome?;
    write_outputs(&a, &cfg.output)?;
    report(&a);
    println!("output = {}", cfg.output.display());
    Ok(a.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("elsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
