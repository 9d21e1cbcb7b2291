use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use zest_cli::apply_overrides;
use zest_cli::scenario_file::parse_scenario_file;
use zest_cli::suite::{format_table, run_and_report, run_suite, SuiteOptions};
use zest_core::simulator::scenarios;

#[derive(Parser)]
#[command(name = "zest", version, about = "Two-vessel COLREGs simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory for logs, plots and reports.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the simulation step in seconds.
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Write per-tick behavior-tree node statuses.
    #[arg(long, global = true)]
    dump_bt: bool,
    /// Multiply the required minimum separation.
    #[arg(long, global = true, default_value_t = 1.0)]
    safety_factor: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario file.
    Run { file: PathBuf },
    /// Run the golden scenarios and check their bounds.
    Suite {
        /// Print the scenario names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Print the golden scenario names.
    List,
}

fn list() -> ExitCode {
    for name in scenarios::names() {
        println!("{name}");
    }
    ExitCode::SUCCESS
}

fn main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let opts = SuiteOptions {
        dump_bt: cli.dump_bt,
        safety_factor: cli.safety_factor,
    };
    let reports = match cli.command {
        Command::List | Command::Suite { list: true } => return Ok(list()),
        Command::Run { file } => {
            let text = std::fs::read_to_string(&file)
                .with_context(|| format!("reading {}", file.display()))?;
            let mut config =
                parse_scenario_file(&text).with_context(|| format!("in {}", file.display()))?;
            apply_overrides(&mut config, cli.seed, cli.dt);
            vec![run_and_report(&config, &cli.out, opts)?]
        }
        Command::Suite { list: false } => {
            let mut configs = scenarios::all();
            for c in &mut configs {
                apply_overrides(c, cli.seed, cli.dt);
            }
            run_suite(&configs, &cli.out, opts)?
        }
    };
    print!("{}", format_table(&reports));
    Ok(if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}
