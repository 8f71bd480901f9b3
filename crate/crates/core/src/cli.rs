//! Command-line frontend. Data goes to `out`, diagnostics to `err`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::scenario::{
    compare_aggregators, compare_csv, parse_n_range, parse_scenario, reports_csv, run_scenario, run_text,
    sweep_csv, sweep_wss_count, RunOptions, Scenario,
};
use crate::{Error, Execution};

/// Transponder aggregator fabric: scenario replay, WSS sizing sweeps and
/// baseline comparison.
#[derive(Parser)]
#[command(name = "tpagg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Abort on the first failing scenario event.
    #[arg(long, global = true)]
    strict: bool,

    /// Accepted for forward compatibility; replay is fully deterministic and
    /// ignores it.
    #[arg(long = "seed", value_name = "SEED", global = true)]
    _seed: Option<u64>,

    /// Write data here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Replay a scenario and emit per-signal reports.
    Run { input: PathBuf },
    /// Tabulate WSS counts of the proposed fabric against an M×N WSS.
    Sweep {
        /// Inclusive transponder range, e.g. 1..24.
        #[arg(long = "n", value_name = "RANGE")]
        n_range: String,
        /// Comma-separated thresholds, e.g. 2,4,8.
        #[arg(long = "k", value_name = "LIST", value_delimiter = ',', required = true)]
        k_list: Vec<u32>,
        /// Number of degrees.
        #[arg(long = "m")]
        m: u32,
        /// Evaluate rows on the calling thread only.
        #[arg(long)]
        sequential: bool,
    },
    /// Evaluate a scenario's final demand under the proposed fabric, MCS and
    /// M×N WSS.
    Compare { input: PathBuf },
    /// Parse and validate a scenario without running it.
    Validate { input: PathBuf },
}

enum Failure {
    Usage(String),
    Scenario(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Scenario(e.to_string())
    }
}

fn load(path: &Path) -> Result<Scenario, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text).map_err(|e| Failure::Scenario(format!("{}: {e}", path.display())))
}

fn execute(cli: &Cli, err: &mut dyn Write) -> Result<String, Failure> {
    let opts = RunOptions {
        strict: cli.common.strict,
    };
    let text = cli.common.format == Format::Text;
    Ok(match &cli.command {
        Command::Run { input } => {
            let scenario = load(input)?;
            let out = run_scenario(&scenario, opts)?;
            for e in &out.log {
                if let Err(msg) = &e.outcome {
                    let _ = writeln!(err, "warning: event {} ({}): {msg}", e.index, e.kind);
                }
            }
            if text {
                run_text(&scenario, &out)
            } else {
                reports_csv(&out.reports)
            }
        }
        Command::Sweep {
            n_range,
            k_list,
            m,
            sequential,
        } => {
            let range = parse_n_range(n_range).map_err(|e| Failure::Usage(e.to_string()))?;
            let exec = if *sequential { Execution::Sequential } else { Execution::Parallel };
            let rows = sweep_wss_count(range, k_list, *m, exec).map_err(|e| Failure::Usage(e.to_string()))?;
            if text {
                let mut s = format!("{:>4} {:>3} {:>10} {:>13}\n", "N", "K", "L_proposed", "WSS_count_MxN");
                for r in &rows {
                    s.push_str(&format!("{:>4} {:>3} {:>10} {:>13}\n", r.n, r.k, r.l_proposed, r.wss_count_mxn));
                }
                s
            } else {
                sweep_csv(&rows)
            }
        }
        Command::Compare { input } => {
            let scenario = load(input)?;
            let rows = compare_aggregators(&scenario, opts)?;
            if text {
                let mut s = format!("{:>6} {:>4} {:>6} {:<9} {:<7} {:>8} {:>8}\n", "signal", "trx", "degree", "model", "path", "loss", "osnr");
                for r in &rows {
                    let path = r.path.map_or_else(|| "-".to_string(), |p| p.to_string());
                    s.push_str(&format!(
                        "{:>6} {:>4} {:>6} {:<9} {:<7} {:>8.2} {:>8.2}\n",
                        r.signal_id,
                        r.trx,
                        r.degree,
                        r.model.name(),
                        path,
                        r.loss_db.0,
                        r.osnr_oxc_db.0
                    ));
                }
                s
            } else {
                compare_csv(&rows)
            }
        }
        Command::Validate { input } => {
            let s = load(input)?;
            let c = s.config;
            format!(
                "ok: N={} M={} K={} L={}, {} events\n",
                c.n(),
                c.m(),
                c.k(),
                c.l(),
                s.events.len()
            )
        }
    })
}

/// Exit status for a scenario or semantic error.
pub const EXIT_SCENARIO: u8 = 1;
/// Exit status for a usage error or missing input.
pub const EXIT_USAGE: u8 = 2;

/// Runs the command line `args` (program name first) and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = out.write_all(rendered.as_bytes());
                return 0;
            }
            let _ = err.write_all(rendered.as_bytes());
            return EXIT_USAGE;
        }
    };
    let result = execute(&cli, err).and_then(|data| {
        let written = match &cli.common.output {
            Some(path) => fs::write(path, data.as_bytes()),
            None => out.write_all(data.as_bytes()).and_then(|()| out.flush()),
        };
        written.map_err(|e| Failure::Scenario(format!("cannot write output: {e}")))
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Scenario(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_SCENARIO
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "usage error: {msg}");
            EXIT_USAGE
        }
    }
}
