//! The `surf` command-line tool as a library, so tests can drive the
//! benchmark and node table without spawning processes.

pub mod args;
pub mod bench;
pub mod commands;
pub mod nodes;
pub mod output;

use anyhow::Result;

pub use args::{Cli, Command};
pub use bench::{run_bench, BenchPlan, BenchRow};
pub use nodes::{verify_nodes, VerifyRow};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => commands::fit(a),
        Command::Synth(a) => commands::synth(a),
        Command::Bench(a) => commands::bench(a),
        Command::VerifyNodes(a) => commands::verify_nodes(a),
        Command::Eval(a) => commands::eval(a),
    }
}

/// An error chain flattened to a single line.
pub fn diagnostic(err: &anyhow::Error) -> String {
    format!("{err:#}")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}
