//! `geist`: reproduce a betting-market efficiency analysis of the Bundesliga
//! around the 2020 closed-doors period from raw season odds files.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use geist_cli::commands::{self, OutputFormat};
use geist_cli::CliError;

#[derive(Parser)]
#[command(
    name = "geist",
    version,
    about = "Betting-market analysis of Bundesliga closed-doors matches",
    long_about = "Ingests football-data style season CSVs, de-margins the odds, fits the \
                  bet-win and margin regressions, runs flat-stake backtests and renders the \
                  descriptive tables."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Canonical dataset file produced by `ingest`.
    #[arg(long, env = "GEIST_DATASET", default_value = "dataset.tsv")]
    dataset: PathBuf,
    /// Output format: text or csv.
    #[arg(long, default_value = "text")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw season CSV files into the canonical dataset.
    Ingest {
        /// Season files in the football-data D1 layout.
        files: Vec<PathBuf>,
        /// Where to write the dataset.
        #[arg(long, default_value = "dataset.tsv")]
        out: PathBuf,
        /// Where to write the provenance log (default: <out>.log).
        #[arg(long)]
        provenance: Option<PathBuf>,
        /// First day of closed-doors play (season 2019/20 only).
        #[arg(long, default_value = "2020-03-10")]
        cutoff: String,
    },
    /// Outcome shares and goal averages per period.
    Describe {
        #[command(flatten)]
        common: Common,
    },
    /// Mean bookmaker margin per period.
    Margins {
        #[command(flatten)]
        common: Common,
    },
    /// Fit a model: the bet-win logits (1, 2) or the margin OLS (margin).
    Fit {
        /// Model id: 1, 2 or margin.
        #[arg(long, default_value = "1")]
        model: String,
        #[command(flatten)]
        common: Common,
    },
    /// Flat-stake betting backtests.
    Backtest {
        /// Slice name: prior-early, prior-late, spectators, covid or all.
        /// Defaults to the four canonical slices.
        #[arg(long)]
        slice: Option<String>,
        /// Side to bet: home, away or both.
        #[arg(long, default_value = "both")]
        side: String,
        #[command(flatten)]
        common: Common,
    },
    /// Outcome counts binned by implied probability difference.
    Bins {
        /// Slice name (default: the closed-doors matches).
        #[arg(long, default_value = "covid")]
        slice: String,
        /// Bin width; must divide the [0.90, -0.75] span.
        #[arg(long, default_value_t = 0.15)]
        width: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Implied vs model-expected win probability points (CSV).
    Curve {
        /// Grid step over implied probabilities 0.05..=0.95.
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Emit one point per real fixture instead of a grid.
        #[arg(long)]
        per_match: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Everything: tables, fits, backtests, bins and curves in one document.
    Report {
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Ingest { files, out, provenance, cutoff } => {
            let cutoff = commands::parse_cutoff(&cutoff)?;
            commands::cmd_ingest(&files, &out, provenance.as_deref(), cutoff)
        }
        Command::Describe { common } => {
            commands::cmd_describe(&common.dataset, OutputFormat::parse(&common.format)?)
        }
        Command::Margins { common } => {
            commands::cmd_margins(&common.dataset, OutputFormat::parse(&common.format)?)
        }
        Command::Fit { model, common } => {
            commands::cmd_fit(&common.dataset, &model, OutputFormat::parse(&common.format)?)
        }
        Command::Backtest { slice, side, common } => commands::cmd_backtest(
            &common.dataset,
            slice.as_deref(),
            &side,
            OutputFormat::parse(&common.format)?,
        ),
        Command::Bins { slice, width, common } => {
            commands::cmd_bins(&common.dataset, &slice, width, OutputFormat::parse(&common.format)?)
        }
        Command::Curve { step, per_match, common } => {
            OutputFormat::parse(&common.format)?;
            commands::cmd_curve(&common.dataset, step, per_match)
        }
        Command::Report { out, common } => {
            let text = commands::cmd_report(&common.dataset)?;
            if let Some(path) = out {
                std::fs::write(&path, &text)?;
            }
            Ok(text)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own message; exit 1 for usage problems and 0
            // for --help/--version
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("geist: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
