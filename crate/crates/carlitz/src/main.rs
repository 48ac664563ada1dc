use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use carlitz::error::{CliError, Result};
use carlitz::solve::{cmd_solve, PolicyInput, Problem, SolveOverrides};
use carlitz::tables::{cmd_table, parse_range, TableKind};
use carlitz::verify::{cmd_verify, Suite};
use carlitz::RunConfig;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "carlitz", version, about = "Carlitz calculus over F_q((x)): tables, checks and solvers")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    /// Write output here instead of stdout
    #[arg(long, global = true, env = "CARLITZ_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a table of Carlitz quantities
    Table {
        #[arg(value_enum, ignore_case = true)]
        kind: TableKind,
        /// Index range: n, a..b or a..=b (both ends included)
        #[arg(default_value = "0..4", allow_hyphen_values = true)]
        range: String,
    },
    /// Run a verification suite
    Verify {
        #[arg(value_enum)]
        suite: Option<Suite>,
        #[arg(long = "suite", value_enum, env = "CARLITZ_SUITE", conflicts_with = "suite")]
        suite_flag: Option<Suite>,
    },
    /// Solve a problem given as a JSON file
    Solve {
        #[arg(value_enum)]
        problem: Problem,
        /// Problem file
        #[arg(long = "in", env = "CARLITZ_IN")]
        input: Option<PathBuf>,
        /// Eigenvalue for the power function, in expression syntax
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Branch choice for recursion48: zero, generic or constant:<digits>
        #[arg(long)]
        policy: Option<String>,
    },
}

fn parse_policy(s: &str) -> Result<PolicyInput> {
    match s {
        "zero" => Ok(PolicyInput::Zero),
        "generic" => Ok(PolicyInput::Generic),
        _ => {
            let digits = s
                .strip_prefix("constant:")
                .ok_or_else(|| CliError::input(format!("unknown policy {s:?}")))?;
            let d = digits
                .split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| CliError::input(format!("bad digit {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            Ok(PolicyInput::Constant(d))
        }
    }
}

fn run(cli: &Cli) -> Result<i32> {
    let cfg = &cli.config;
    let mut buf: Vec<u8> = Vec::new();
    let code = match &cli.command {
        Command::Table { kind, range } => {
            let table = cmd_table(*kind, parse_range(range)?, cfg)?;
            table.write(cfg.format, &mut buf)?;
            0
        }
        Command::Verify { suite, suite_flag } => {
            let suite = suite.or(*suite_flag).unwrap_or(Suite::All);
            let report = cmd_verify(suite, cfg)?;
            report.write(cfg.format, &mut buf)?;
            if report.passed {
                0
            } else {
                CliError::Failed(report.failures()).exit_code()
            }
        }
        Command::Solve { problem, input, lambda, policy } => {
            let text = input.as_ref().map(fs::read_to_string).transpose()?;
            let over = SolveOverrides {
                lambda: lambda.clone(),
                policy: policy.as_deref().map(parse_policy).transpose()?,
            };
            let doc = cmd_solve(*problem, text.as_deref(), &over, cfg)?;
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
            0
        }
    };
    match &cli.out {
        Some(path) => fs::write(path, &buf)?,
        None => io::stdout().write_all(&buf)?,
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
