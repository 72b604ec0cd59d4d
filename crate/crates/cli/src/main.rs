//! `searchlight` binary: scenario files in, curve CSVs and JSON summaries
//! out. Exit codes: 0 success, 2 validation failure, 3 numeric
//! non-convergence, 4 divergent mean time without `--allow-divergent`,
//! 1 other errors (I/O, failed suite checks).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use searchlight_cli::error::CliError;
use searchlight_cli::runner::{self, Command, RunOptions};

#[derive(Parser)]
#[command(
    name = "searchlight",
    version,
    about = "Water-filling search plans and their believed vs. true detection probabilities"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write allocation snapshots of the scenario's plan
    Plan(ScenarioArgs),
    /// Write believed and true detection-probability curves
    Curves(ScenarioArgs),
    /// Compare the condensed-belief plan against the blended per-component plan
    Compare(ScenarioArgs),
    /// Write mean times to detection under both probabilities
    MeanTime(ScenarioArgs),
    /// Run every bundled scenario against its closed form and write a report
    Examples(CommonArgs),
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario JSON file
    scenario: PathBuf,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Output directory (default: $SEARCHLIGHT_OUT_DIR, else ./out)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Condense mixture beliefs by moment matching instead of exactly
    #[arg(long)]
    paper_mode: bool,
    /// Seed recorded into JSON summaries (reserved for sampling extensions)
    #[arg(long)]
    seed: Option<u64>,
    /// Report a divergent mean time as data instead of exiting nonzero
    #[arg(long)]
    allow_divergent: bool,
}

impl CommonArgs {
    fn options(&self) -> RunOptions {
        let out_dir = self
            .out
            .clone()
            .or_else(|| std::env::var_os("SEARCHLIGHT_OUT_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        RunOptions {
            out_dir,
            paper_mode: self.paper_mode,
            seed: self.seed,
            allow_divergent: self.allow_divergent,
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Plan(args) => run_scenario(Command::Plan, args),
        Cmd::Curves(args) => run_scenario(Command::Curves, args),
        Cmd::Compare(args) => run_scenario(Command::Compare, args),
        Cmd::MeanTime(args) => run_scenario(Command::MeanTime, args),
        Cmd::Examples(common) => {
            let options = common.options();
            let outcomes = runner::run_examples(&options)?;
            for outcome in &outcomes {
                println!("{}", outcome.line());
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            let report = options.out_dir.join("examples_report.json");
            println!(
                "{}/{} checks passed (report: {})",
                outcomes.len() - failed,
                outcomes.len(),
                report.display()
            );
            if failed > 0 {
                return Err(CliError::CheckFailed(format!(
                    "{failed} of {} checks failed",
                    outcomes.len()
                )));
            }
            Ok(())
        }
    }
}

fn run_scenario(command: Command, args: ScenarioArgs) -> Result<(), CliError> {
    let options = args.common.options();
    let paths = runner::run_file(command, &args.scenario, &options)?;
    for path in paths {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
