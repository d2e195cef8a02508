use std::path::PathBuf;
use std::process::exit;

use clap::{Parser, ValueEnum};
use qacs_cli::{run, Command, RunSpec};
use qacs_core::simkit::SweepAxis;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    Simulate,
    Sweep,
    Analyze,
    Validate,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Axis {
    #[value(name = "gamma_f", alias = "gamma-f")]
    GammaF,
    #[value(name = "gamma_m", alias = "gamma-m")]
    GammaM,
    #[value(name = "p_fap", alias = "p-fap")]
    PFap,
    #[value(name = "p_mbs", alias = "p-mbs")]
    PMbs,
}

#[derive(Debug, Parser)]
#[command(name = "qacs", version, about = "Two-tier macro/femto scheduling simulator and analytics")]
struct Args {
    #[arg(value_enum)]
    command: Cmd,
    /// Config file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: PathBuf,
    /// Override a config entry: `section.key=value` or `key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    frames: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    axis: Option<Axis>,
    /// Sweep grid `a:b:step` in dB.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
}

fn spec(args: Args) -> RunSpec {
    let command = match args.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Sweep => Command::Sweep,
        Cmd::Analyze => Command::Analyze,
        Cmd::Validate => Command::Validate,
    };
    let mut overrides = args.set;
    overrides.extend(args.seed.map(|s| format!("sim.seed={s}")));
    overrides.extend(args.frames.map(|f| format!("sim.frames={f}")));
    overrides.extend(args.threads.map(|t| format!("sim.threads={t}")));
    RunSpec {
        command,
        config_path: args.config,
        output_dir: args.out,
        overrides,
        axis: args.axis.map(|a| match a {
            Axis::GammaF => SweepAxis::GammaF,
            Axis::GammaM => SweepAxis::GammaM,
            Axis::PFap => SweepAxis::PFap,
            Axis::PMbs => SweepAxis::PMbs,
        }),
        values: args.values,
    }
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            exit(code);
        }
    };
    match run(&spec(args)) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("qacs: {e}");
            exit(e.exit_code());
        }
    }
}
