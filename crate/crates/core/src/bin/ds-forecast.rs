//! Command-line entry point.

use std::io::Write;
use std::path::PathBuf;
use std::process;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use ds_forecast::cli::{
    cmd_evaluate, cmd_predict, cmd_validate, CommandOutput, ExitCode, Format, Mode,
};
use ds_forecast::io::write_atomic;

#[derive(Parser)]
#[command(name = "ds-forecast", version)]
#[command(about = "Pool expert score forecasts with Dempster-Shafer evidence combination")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check evidence files (or directories of them) for format and mass errors
    Validate {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
    },
    /// Rank scores for one match
    Predict {
        #[arg(long)]
        evidence: PathBuf,
        #[arg(long = "match")]
        match_id: String,
        #[arg(long, value_enum, default_value_t = Mode::Combined)]
        mode: Mode,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score intuitive, per-expert and combined forecasts against results
    Evaluate {
        #[arg(long)]
        evidence: PathBuf,
        #[arg(long)]
        fixtures: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Scoring schemata to report, by name (default: s_r,s_o,s_ro)
        #[arg(long, value_delimiter = ',')]
        schema: Option<Vec<String>>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn write_report(text: &str, output: Option<&PathBuf>) -> Result<()> {
    match output {
        Some(path) => {
            write_atomic(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .context("writing to stdout"),
    }
}

fn emit(out: CommandOutput, output: Option<PathBuf>) -> ExitCode {
    eprint!("{}", out.stderr);
    // Failed commands never touch the output file; whatever they produced
    // goes to stdout.
    let target = output.as_ref().filter(|_| out.code == ExitCode::Success);
    if let Err(e) = write_report(&out.stdout, target) {
        eprintln!("error: {e:#}");
        return ExitCode::Io;
    }
    out.code
}

fn main() {
    let args = Args::parse();
    let code = match args.command {
        Command::Validate { paths } => emit(cmd_validate(&paths), None),
        Command::Predict {
            evidence,
            match_id,
            mode,
            format,
            output,
        } => emit(cmd_predict(&evidence, &match_id, mode, format), output),
        Command::Evaluate {
            evidence,
            fixtures,
            format,
            schema,
            output,
        } => emit(
            cmd_evaluate(&evidence, &fixtures, format, schema.as_deref()),
            output,
        ),
    };
    process::exit(code as i32);
}
