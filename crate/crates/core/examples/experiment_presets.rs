//! Prints the effective configuration of every experiment preset; any subset
//! of these keys can be overridden by the JSON file passed to the CLI.

use catoptron::experiments::{Command, ExperimentConfig};

fn main() -> catoptron::Result<()> {
    for cmd in [Command::KerrCompare, Command::JcOptimize, Command::QslScan, Command::DissipativeReoptimize] {
        let cfg = ExperimentConfig::preset(cmd)?;
        println!("# {cmd}\n{}\n", serde_json::to_string_pretty(&cfg)?);
    }
    Ok(())
}
