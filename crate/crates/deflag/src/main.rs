#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use deflag::grid::build_uniform_grid;
use deflag::harness::output::{write_diagnostics, write_exact_profile, write_profile, write_report};
use deflag::harness::run::benchmark_pattern;
use deflag::harness::{convergence_study, run_case, CaseConfig};
use deflag::Error;

#[derive(Parser)]
#[command(name = "deflag", about = "1D reactive Euler solver with a burnt-zone indicator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Case file; defaults to the built-in benchmark.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. --set n_cells=500.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single case and write profiles and diagnostics.
    Run(Common),
    /// Convergence study over several meshes.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "250,500,1000,2000")]
        meshes: Vec<usize>,
    },
    /// Write the exact solution on the case grid at t_start and t_end.
    Oracle(Common),
    /// Run the invariant self-checks on the case.
    Check(Common),
}

fn load(c: &Common) -> Result<CaseConfig, Error> {
    let base = match &c.config {
        Some(p) => CaseConfig::load(p)?,
        None => CaseConfig::default(),
    };
    base.with_overrides(&c.sets)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, Error> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Oracle(_) => 4,
        _ => 3,
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(c) => {
            let cfg = load(&c)?;
            let out = run_case(&cfg)?;
            let s = &out.solver;
            for (step, st) in &out.profiles {
                write_profile(create(&c.out, &format!("profile_{step:06}.csv"))?, &cfg, &s.grid, &s.spec, st)?;
            }
            write_diagnostics(create(&c.out, "diagnostics.csv")?, &cfg, &out.diagnostics)?;
            println!("{} steps, dt = {:e}, final t = {}", s.step, s.dt, s.state.t);
        }
        Command::Sweep { common, meshes } => {
            let cfg = load(&common)?;
            let rep = convergence_study(&cfg, &meshes);
            write_report(create(&common.out, &format!("sweep_{}.csv", cfg.scheme))?, &cfg, &rep)?;
            for m in &rep.meshes {
                println!("n = {:5}  L1 rho = {:.4e}  L1 u = {:.4e}  L1 p = {:.4e}", m.n_cells, m.errors[2], m.errors[1], m.errors[0]);
            }
            println!("fitted order rho = {:.3}", rep.order("rho"));
            for (n, msg) in &rep.failures {
                eprintln!("n = {n} failed: {msg}");
            }
            if !rep.failures.is_empty() {
                return Err(Error::Step { step: 0, reason: "some meshes failed".into() });
            }
        }
        Command::Oracle(c) => {
            let cfg = load(&c)?;
            let pat = benchmark_pattern(&cfg)?;
            let spec = cfg.mixture()?;
            let grid = build_uniform_grid(cfg.n_cells, cfg.x_left, cfg.x_right)?;
            let res = pat.max_jump_residual(&spec);
            if !(res < 1e-10) {
                return Err(Error::Oracle(format!("jump residual {res:e}")));
            }
            for (name, t) in [("exact_start.csv", cfg.t_start), ("exact_end.csv", cfg.t_end)] {
                write_exact_profile(create(&c.out, name)?, &cfg, &grid, &spec, &pat, t)?;
            }
            println!(
                "precursor {:.6} m/s, reactive {:.6} m/s, u** = {:.6} m/s, residual {res:.2e}",
                pat.precursor_speed, pat.reactive_speed, pat.state_star_star.u
            );
        }
        Command::Check(c) => {
            let cfg = load(&c)?;
            let out = run_case(&cfg)?;
            let d = out.diagnostics.iter();
            let drift = d.clone().fold(0.0f64, |a, d| a.max(d.energy_drift));
            let ie = d.fold(0.0f64, |a, d| a.max(d.internal_energy_residual));
            println!("steps {}: all gates passed", out.solver.step);
            println!("max energy drift {drift:.3e}, max internal energy residual {ie:.3e}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
