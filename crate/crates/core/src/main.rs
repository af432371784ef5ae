use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use cvqc_lab::cli::{self, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "cvqc-lab", version, about = "Desk-scale experiments on quantum-prover protocols")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run an experiment and write its data file and summary.
    Run {
        /// jordan-demo, partition-claims, repetition-sweep, fs-attack or effverify-demo.
        command: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// key=value; top-level keys or experiment parameters.
        #[arg(long = "set")]
        sets: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        inner: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        time_bound: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Print the summary table of a data file.
    Summary { data_file: PathBuf },
}

fn real_main(args: Args) -> Result<(), CliError> {
    match args.cmd {
        Cmd::Run { command, config, mut sets, seed, out, format, inner, suite, time_bound, trials } => {
            let mut push = |k: &str, v: Option<String>| {
                if let Some(v) = v {
                    sets.push(format!("{k}={v}"));
                }
            };
            push("command", command.map(|c| format!("{c:?}")));
            push("seed", seed.map(|s| s.to_string()));
            push("output_path", out.map(|p| format!("{:?}", p.display().to_string())));
            push("format", format.map(|f| format!("{f:?}")));
            push("inner", inner.map(|s| format!("{s:?}")));
            push("suite", suite.map(|s| format!("{s:?}")));
            push("time_bound", time_bound.map(|t| t.to_string()));
            push("trials", trials.map(|t| t.to_string()));
            let cfg = ExperimentConfig::load(config.as_deref(), &sets)?;
            cli::configure_threads()?;
            let report = cli::run(&cfg)?;
            print!("{}", std::fs::read_to_string(&report.summary_path).map_err(|e| CliError::Runtime(e.to_string()))?);
            eprintln!("wrote {} ({} rows, {} failing)", report.data_path.display(), report.rows, report.failures);
            Ok(())
        }
        Cmd::Summary { data_file } => {
            print!("{}", cli::render_summary(&data_file)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match real_main(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("cvqc-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
