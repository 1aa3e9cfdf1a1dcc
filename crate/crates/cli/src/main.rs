use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use boseprop::scenario::{self, Case, ScenarioConfig};
use boseprop::Method;
use clap::{Parser, Subcommand};

/// Propagates interacting bosons in a tilted 1D well and reports the
/// number of Hamiltonian applications each method needs.
#[derive(Parser, Debug)]
#[command(name = "boseprop", version, args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Prints the phase-aligned distance between two state dumps.
    Compare { first: PathBuf, second: PathBuf },
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    /// Number of bosons.
    #[arg(long, required = true)]
    particles: Option<usize>,
    /// Number of single-particle orbitals.
    #[arg(long, required = true)]
    orbitals: Option<usize>,
    /// Contact interaction strength.
    #[arg(long, default_value_t = 2.0)]
    g: f64,
    /// Tilt protocol: a, b, c or d.
    #[arg(long, required = true)]
    case: Option<Case>,
    /// alc, al1, al2, rk8, rk4 or cn.
    #[arg(long, required = true)]
    method: Option<Method>,
    /// Local error tolerance of the adaptive methods.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Krylov dimension cap (fixed dimension for alc).
    #[arg(long, default_value_t = 30)]
    dkmax: usize,
    #[arg(long, default_value_t = 10.0)]
    t_end: f64,
    /// Fixed step for rk4 and cn.
    #[arg(long)]
    dt: Option<f64>,
    /// Tilt of the initial ground state (defaults to 10 for case c, else 100).
    #[arg(long)]
    f0: Option<f64>,
    /// Lands steps on multiples of this interval for denser output.
    #[arg(long)]
    max_dt: Option<f64>,
    /// Relative residual target of the Crank-Nicolson linear solves.
    #[arg(long, default_value_t = 1e-6)]
    gmres_tol: f64,
    /// Only sample observables on the output grid and at the end.
    #[arg(long)]
    grid_only: bool,
    /// Time series CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Benchmark report (key=value lines); printed to stdout when absent.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Binary dump of the final state.
    #[arg(long)]
    state_out: Option<PathBuf>,
}

impl RunArgs {
    fn config(&self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::new(
            self.particles.expect("required by clap"),
            self.orbitals.expect("required by clap"),
            self.case.expect("required by clap"),
            self.method.expect("required by clap"),
        );
        cfg.g = self.g;
        cfg.tol = self.tol;
        cfg.dk_max = self.dkmax;
        cfg.t_end = self.t_end;
        cfg.dt = self.dt;
        cfg.f0 = self.f0;
        cfg.max_dt = self.max_dt;
        cfg.gmres_tol = self.gmres_tol;
        cfg.sample_steps = !self.grid_only;
        cfg
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn run(args: &RunArgs) -> Result<()> {
    let cfg = args.config();
    let outcome = scenario::run_scenario(&cfg).context("scenario failed")?;
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        scenario::write_series(&mut w, &outcome.record)?;
        w.flush()?;
    }
    if let Some(path) = &args.state_out {
        scenario::save_state(path, &outcome.final_state)
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    match &args.report {
        Some(path) => {
            let mut w = create(path)?;
            scenario::write_report(&mut w, &cfg, &outcome)?;
            w.flush()?;
        }
        None => scenario::write_report(std::io::stdout().lock(), &cfg, &outcome)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Some(Command::Compare { first, second }) => {
            scenario::compare_states(first, second).map(|d| println!("{d:.16e}")).map_err(Into::into)
        }
        None => run(&cli.run),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
