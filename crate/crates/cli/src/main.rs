use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qfeedback_cli::{cmd_replay, cmd_run, cmd_spectrum, RunOptions};

#[derive(Parser)]
#[command(name = "qfeedback", version, about = "Feedback-based ground and excited state preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a bundled config (e.g. `lih-wfqae`).
    Run {
        config: String,
        /// Output directory; overrides the config's `output` key.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with status 3 if the Lyapunov function rises by more than 1e-9 in any layer.
        #[arg(long)]
        strict: bool,
        /// Print per-layer progress to stderr.
        #[arg(short, long, action = clap::ArgAction::Count)]
        verbose: u8,
        /// Print the config with all defaults filled in and exit.
        #[arg(long)]
        print_config: bool,
        /// Also write the final register amplitudes to states.csv.
        #[arg(long)]
        dump_states: bool,
    },
    /// Print the exact spectrum of a model: preset, Pauli-sum file, inline sum or random:<qubits>:<terms>.
    Spectrum {
        model: String,
        /// Seed for random models.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of lowest levels to mark.
        #[arg(long, default_value_t = 4)]
        highlight: usize,
    },
    /// Apply a saved circuit to initial states and report energies and fidelities.
    Replay {
        circuit: PathBuf,
        /// Initial state: a label over 0 1 + - or eig:<level>. Repeatable.
        #[arg(long = "initial", required = true, allow_hyphen_values = true)]
        initial: Vec<String>,
        /// Number of lowest levels to report fidelities for.
        #[arg(long, default_value_t = 8)]
        levels: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = io::stdout().lock();
    let result = match cli.command {
        Command::Run { config, out, strict, verbose, print_config, dump_states } => {
            let opts = RunOptions { config, out, strict, verbose, print_config, dump_states };
            cmd_run(&opts, &mut stdout)
        }
        Command::Spectrum { model, seed, highlight } => {
            cmd_spectrum(&model, seed, highlight, &mut stdout)
        }
        Command::Replay { circuit, initial, levels } => {
            cmd_replay(&circuit, &initial, levels, &mut stdout)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
