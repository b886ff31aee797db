use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entadyn::harness::{self, ExperimentConfig, ResultTable, ORACLE_CHECKS, PRESETS};
use entadyn::Error;

/// Entanglement dynamics experiments on XY chains and triangular lattices.
///
/// Exit codes: 0 success, 1 other failure, 2 configuration error,
/// 3 convergence failure or unconverged points in the output.
#[derive(Parser, Debug)]
#[command(name = "entadyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for scan points (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic, equilibrium or initial C(i,i+r) over parameter grids.
    ChainScan(RunArgs),
    /// Time series on the periodic chain or the open impurity chain.
    ChainDynamics(RunArgs),
    /// Lattice ground-state concurrences, energies and gaps.
    LatticeGround(RunArgs),
    /// Lattice concurrences after a field quench.
    LatticeDynamics(RunArgs),
    /// Concurrence and gap with their lambda derivatives.
    QptScan(RunArgs),
    /// Run (or print) a figure-reproduction preset.
    Preset(PresetArgs),
    /// Brute-force cross-checks against dense references.
    Oracle {
        /// One of chain, lattice, hamiltonian, rdm, all.
        test: String,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    /// TOML experiment file.
    config: PathBuf,
    /// CSV destination (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PresetArgs {
    /// Preset name; omit with --list.
    name: Option<String>,
    /// List the catalog.
    #[arg(long)]
    list: bool,
    /// Print the preset's TOML instead of running it.
    #[arg(long)]
    print_config: bool,
    /// CSV destination (default: stdout).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::NoConvergence { .. } | Error::StepUnderflow { .. } => 3,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("entadyn: {e}");
    ExitCode::from(exit_code(&e))
}

fn emit(table: &ResultTable, output: Option<&PathBuf>) -> ExitCode {
    let written = match output {
        Some(path) => File::create(path)
            .map_err(Error::from)
            .and_then(|f| table.write_csv(BufWriter::new(f))),
        None => table.write_csv(io::stdout().lock()),
    };
    if let Err(e) = written {
        return fail(e);
    }
    let bad = table.unconverged();
    if bad > 0 {
        eprintln!(
            "entadyn: {bad} point(s) did not converge; they are flagged in the `converged` column"
        );
        return ExitCode::from(3);
    }
    ExitCode::SUCCESS
}

fn run_file(kind: &str, args: &RunArgs) -> ExitCode {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("entadyn: cannot read {}: {e}", args.config.display());
            return ExitCode::from(2);
        }
    };
    let table = ExperimentConfig::from_toml_as(&text, kind).and_then(|cfg| harness::run(&cfg));
    match table {
        Ok(t) => emit(&t, args.output.as_ref()),
        Err(e) => fail(e),
    }
}

fn run_preset(args: &PresetArgs) -> ExitCode {
    if args.list {
        let mut out = io::stdout().lock();
        for p in PRESETS {
            let _ = writeln!(out, "{:<26} {}", p.name, p.figure);
        }
        return ExitCode::SUCCESS;
    }
    let Some(name) = &args.name else {
        eprintln!("entadyn: preset needs a name or --list");
        return ExitCode::from(2);
    };
    let preset = match harness::find_preset(name) {
        Ok(p) => p,
        Err(e) => return fail(e),
    };
    if args.print_config {
        print!("{}", preset.config().to_toml());
        return ExitCode::SUCCESS;
    }
    match preset.run() {
        Ok(t) => emit(&t, args.output.as_ref()),
        Err(e) => fail(e),
    }
}

fn run_oracle(test: &str) -> ExitCode {
    match harness::run_oracle(test) {
        Ok(reports) => {
            for r in &reports {
                println!("{r}");
            }
            if reports.iter().all(|r| r.passed()) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if matches!(e, Error::Config(_)) {
                eprintln!(
                    "entadyn: available oracle tests: {}",
                    ORACLE_CHECKS.join(", ")
                );
            }
            fail(e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("entadyn: {e}");
            return ExitCode::from(1);
        }
    }
    match &cli.command {
        Command::ChainScan(a) => run_file("chain-scan", a),
        Command::ChainDynamics(a) => run_file("chain-dynamics", a),
        Command::LatticeGround(a) => run_file("lattice-ground", a),
        Command::LatticeDynamics(a) => run_file("lattice-dynamics", a),
        Command::QptScan(a) => run_file("qpt-scan", a),
        Command::Preset(a) => run_preset(a),
        Command::Oracle { test } => run_oracle(test),
    }
}
