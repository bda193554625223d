use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use condswap_cli::{
    cmd_classify, cmd_simulate, cmd_truth_table, cmd_verify, ClassifyTarget, CliError, InputKind,
    Report, SimulateOptions, EXIT_USAGE,
};

#[derive(Parser)]
#[command(name = "condswap", version, about = "Conditional gates, gate classification and LOCC protocol simulation")]
struct Cli {
    /// Emit machine-readable JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the action of a gate on every computational basis state
    TruthTable {
        gate: String,
        #[arg(long, allow_hyphen_values = true)]
        phase: Option<f64>,
    },
    /// Run the full verification suite
    Verify,
    /// Classify a two-qubit gate
    #[command(group(ArgGroup::new("target").required(true).args(["gate", "file"])))]
    Classify {
        gate: Option<String>,
        /// Read the matrix from a file (one row per line, entries as re+imj)
        #[arg(long)]
        file: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        phase: Option<f64>,
    },
    /// Simulate an LOCC protocol
    Simulate {
        protocol: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Enumerate every measurement branch instead of sampling one
        #[arg(long)]
        all_branches: bool,
        /// Input state: product, phi+, phi-, psi+ or psi-
        #[arg(long, default_value = "product")]
        input: String,
    },
}

fn run(command: Command) -> Result<Report, CliError> {
    match command {
        Command::TruthTable { gate, phase } => cmd_truth_table(&gate, phase),
        Command::Verify => Ok(cmd_verify()),
        Command::Classify { gate, file, phase } => {
            let target = match (&gate, &file) {
                (_, Some(path)) => ClassifyTarget::File(path),
                (Some(name), None) => ClassifyTarget::Gate(name),
                (None, None) => unreachable!("clap requires one target"),
            };
            cmd_classify(target, phase)
        }
        Command::Simulate { protocol, seed, all_branches, input } => {
            let opts = SimulateOptions { seed, all_branches, input: InputKind::parse(&input)? };
            cmd_simulate(&protocol, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                println!("{}", serde_json::json!({ "error": e.to_string() }));
            }
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
