use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qdecide::commands::{cmd_check, cmd_encode, cmd_gadget_build, cmd_gadget_verify, cmd_search, cmd_sweep};
use qdecide::{RunConfig, SearchArgs, Status};

/// Exit codes: 0 witness found or check holds, 2 exhausted or unknown, 1 error.
#[derive(Parser)]
#[command(name = "qdecide", version, about = "Encode, check and search quantum decision problems")]
struct Cli {
    /// Seed for randomized numeric search.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Interval precision in bits (gadgets); defaults to the instance's.
    #[arg(long, global = true)]
    precision: Option<u32>,

    /// Worker threads for gadget verification.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an instance as a quantified formula
    Encode {
        instance: PathBuf,
        /// Formula JSON (kind, statistics, SMT-LIB2 text)
        #[arg(long)]
        out: Option<PathBuf>,
        /// SMT-LIB2 script
        #[arg(long)]
        smt: Option<PathBuf>,
        /// Only print statistics (the default when no output is given)
        #[arg(long)]
        stats: bool,
    },
    /// Check a witness file against an instance
    Check { instance: PathBuf, witness: PathBuf },
    /// Bounded search for a witness
    Search {
        instance: PathBuf,
        #[arg(long, default_value_t = 6)]
        depth: usize,
        /// Accept `≥ λ` in threshold problems (default is `> λ`)
        #[arg(long)]
        nonstrict: bool,
        /// Overhang length cap for PCP search
        #[arg(long, default_value_t = 64)]
        max_overhang: usize,
        /// Restrict PCP solutions to the first-tile/last-tile shape
        #[arg(long)]
        claus: bool,
    },
    /// Build or verify a channel gadget
    Gadget {
        #[command(subcommand)]
        action: GadgetAction,
    },
    /// Run a fixed-parameter encoder for n = 1..=n-max
    Sweep {
        instance: PathBuf,
        #[arg(long, default_value_t = 2)]
        n_max: usize,
        /// Numeric witness search instead of SMT-LIB2 export
        #[arg(long)]
        numeric: bool,
    },
}

#[derive(Subcommand)]
enum GadgetAction {
    /// Build the gadget and write it with its derived constants
    Build {
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the fidelity identity on all words up to a length
    Verify {
        instance: PathBuf,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
    },
}

fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<Status> {
    let cfg = RunConfig { seed: cli.seed, precision: cli.precision, jobs: cli.jobs.max(1) };
    writeln!(out, "{}", cfg.header())?;
    match cli.command {
        Command::Encode { instance, out: file, smt, stats } => {
            let (file, smt) = if stats { (None, None) } else { (file, smt) };
            cmd_encode(&instance, file.as_deref(), smt.as_deref(), out)
        }
        Command::Check { instance, witness } => cmd_check(&instance, &witness, &cfg, out),
        Command::Search { instance, depth, nonstrict, max_overhang, claus } => {
            let args = SearchArgs { depth, strict: !nonstrict, max_overhang, claus };
            cmd_search(&instance, &args, &cfg, out)
        }
        Command::Gadget { action: GadgetAction::Build { instance, out: file } } => {
            cmd_gadget_build(&instance, file.as_ref(), &cfg, out)
        }
        Command::Gadget { action: GadgetAction::Verify { instance, max_len } } => {
            cmd_gadget_verify(&instance, max_len, &cfg, out)
        }
        Command::Sweep { instance, n_max, numeric } => cmd_sweep(&instance, n_max, numeric, &cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(status) => ExitCode::from(status.exit_code()),
        Err(e) => {
            let _ = out.flush();
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
