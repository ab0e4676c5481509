//! Command-line driver: simulate circuits, run the teleportation checks, the
//! fPEPS demo and the verification suite. Reports are JSON on stdout or in
//! the `--out` file. Set `FMBQC_LOG` (e.g. `debug`) for diagnostics.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fmbqc::engine::{run, Mode, RunOptions};
use fmbqc::report::{emit_report, parse_circuit};
use fmbqc::verify::{fpeps_demo, run_suite, teleport_check};
use num_complex::Complex64;

/// Smallest acceptable fidelity against the spin oracle under `--verify`.
const FIDELITY_FLOOR: f64 = 1.0 - 1e-8;

#[derive(Parser)]
#[command(name = "fmbqc", version, about = "Fermionic measurement-based quantum computation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a circuit on the measured lattice, starting from |0…0⟩.
    Simulate(SimulateArgs),
    /// Spin and fermionic teleportation checks.
    TeleportCheck(Common),
    /// Contract a small fPEPS with random projections.
    FpepsDemo(Common),
    /// Run the self-check suite.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sample,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[arg(long, value_enum, default_value = "exact")]
    mode: ModeArg,
    /// Compare every shot against the spin oracle.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

fn write(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn simulate(a: &SimulateArgs) -> anyhow::Result<bool> {
    let text = std::fs::read_to_string(&a.circuit).with_context(|| format!("reading {}", a.circuit.display()))?;
    let circuit = parse_circuit(&text)?;
    let mut input = vec![Complex64::new(0.0, 0.0); 1 << circuit.wires];
    input[0] = Complex64::new(1.0, 0.0);
    let mode = match a.mode {
        ModeArg::Exact => Mode::Exact,
        ModeArg::Sample => Mode::Sample,
    };
    let options = RunOptions { mode, verify: a.verify, ..Default::default() };
    log::info!("{} wires, {} gates, {} shots", circuit.wires, circuit.gates.len(), a.shots);
    let result = run(&circuit, &input, a.common.seed, a.shots as usize, &options)?;
    write(&a.common.out, &emit_report(&circuit, &result))?;
    Ok(result.worst_fidelity().is_none_or(|f| f >= FIDELITY_FLOOR))
}

fn execute(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::TeleportCheck(c) => {
            let r = teleport_check(c.seed)?;
            write(&c.out, &serde_json::to_string_pretty(&r)?)?;
            Ok(r.passed)
        }
        Command::FpepsDemo(c) => {
            let r = fpeps_demo(c.seed)?;
            write(&c.out, &serde_json::to_string_pretty(&r)?)?;
            if r.norm == 0.0 {
                bail!("contraction vanished");
            }
            Ok(true)
        }
        Command::Verify(c) => {
            let r = run_suite(c.seed);
            for g in &r.groups {
                log::info!("{}: {}", g.group, if g.passed { "pass" } else { "FAIL" });
            }
            write(&c.out, &serde_json::to_string_pretty(&r)?)?;
            Ok(r.passed)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FMBQC_LOG")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
