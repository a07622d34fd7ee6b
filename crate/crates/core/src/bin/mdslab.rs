use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use mdslab::config::parse_config;
use mdslab::runner::{run_scenario, Command};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Simulate,
    Steady,
    Onsager,
    Spectrum,
    Verify,
}

/// Nonlinear modular dissipative dynamics: simulation and thermodynamic checks.
#[derive(Debug, Parser)]
#[command(name = "mdslab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the scenario seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "MDSLAB_THREADS", default_value_t = 0)]
    threads: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
            eprintln!("warning: {e}");
        }
    }
    let cfg = match parse_config(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let seed = cli.seed.unwrap_or(cfg.seed);
    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Steady => Command::Steady,
        Cmd::Onsager => Command::Onsager,
        Cmd::Spectrum => Command::Spectrum,
        Cmd::Verify => Command::Verify,
    };
    let start = Instant::now();
    match run_scenario(command, &cfg, &cli.out, seed) {
        Ok(outcome) => {
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.files {
                println!("wrote {}", f.display());
            }
            println!("elapsed {:.2} s", start.elapsed().as_secs_f64());
            if outcome.checks_failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
