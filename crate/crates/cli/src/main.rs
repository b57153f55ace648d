use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;

use output::{Destination, Format};

/// Linear-inversion two-qubit state tomography: protocol tables, noisy
/// reconstruction, robustness sweeps and optical-setup checks.
#[derive(Debug, Parser)]
#[command(name = "qst", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Write the report to this file instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Directory for reports when `--output` is absent; each run writes
    /// `<command>.<ext>` there.
    #[arg(long, global = true, env = "QST_OUTPUT_DIR")]
    output_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Condition numbers of Protocols 1-7 against the published table.
    Table1(commands::table1::Args),
    /// Simulate one measurement run and reconstruct the state.
    Reconstruct(commands::reconstruct::Args),
    /// Monte Carlo comparison of protocols from a TOML or JSON config.
    Robustness(commands::robustness::Args),
    /// Check the wave-plate tables, beam-splitter identities and CNOT mapping.
    VerifySetup,
    /// Condition number of the optimal qudit or the N-qubit Pauli protocol.
    Qudit(commands::qudit::Args),
    /// Write protocols to a JSON catalog readable by `table1 --protocols`.
    ExportProtocols(commands::export::Args),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Table1(_) => "table1",
            Command::Reconstruct(_) => "reconstruct",
            Command::Robustness(_) => "robustness",
            Command::VerifySetup => "verify-setup",
            Command::Qudit(_) => "qudit",
            Command::ExportProtocols(_) => "export-protocols",
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input files (exit code 2).
    Usage(String),
    /// Output could not be written (exit code 2).
    Io(String),
}

impl From<qst::QstError> for CliError {
    fn from(e: qst::QstError) -> Self {
        CliError::Usage(e.to_string())
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let name = cli.command.name();
    let report = match cli.command {
        Command::Table1(args) => commands::table1::run(args)?,
        Command::Reconstruct(args) => commands::reconstruct::run(args)?,
        Command::Robustness(args) => commands::robustness::run(args)?,
        Command::VerifySetup => commands::verify::run()?,
        Command::Qudit(args) => commands::qudit::run(args)?,
        Command::ExportProtocols(args) => {
            let text = commands::export::run(args, cli.format)?;
            Destination::resolve(cli.output.as_deref(), cli.output_dir.as_deref(), name, Format::Json)
                .write(&text)?;
            return Ok(true);
        }
    };
    let rendered = report.render(cli.format)?;
    Destination::resolve(cli.output.as_deref(), cli.output_dir.as_deref(), name, cli.format).write(&rendered)?;
    for failure in &report.failures {
        eprintln!("FAIL {failure}");
    }
    Ok(report.failures.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) | Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
