//! Runs a scenario from a JSON file, as the command-line tool does.

use mdslab::config::parse_config;
use mdslab::runner::{run_scenario, Command};
use std::path::PathBuf;

fn main() -> mdslab::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/two_bath.json")));
    let cfg = parse_config(&path)?;
    let out = std::env::temp_dir().join("mdslab_config_driven");
    for cmd in [Command::Simulate, Command::Steady, Command::Spectrum] {
        let outcome = run_scenario(cmd, &cfg, &out, cfg.seed)?;
        for line in outcome.summary {
            println!("{line}");
        }
        for f in outcome.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(())
}
