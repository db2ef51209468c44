//! Initialization and the time-stepping driver.

use crate::chemistry::{chemistry_step, ChemStepConfig, TimeMode};
use crate::grid::{build_uniform_grid, StaggeredGrid};
use crate::harness::config::{CaseConfig, InitMode};
use crate::hydro::{
    compensation_source, correction_solve, internal_energy_residual, kinetic_residuals,
    predict_velocity, pressure_gradient, scale_pressure_gradient, solve_mass, total_energy,
    CorrectionInput, CorrectionSolveConfig,
};
use crate::oracle::{interval_average, solve_deflagration_riemann, ExactState, WavePattern};
use crate::thermo::{z_from_fractions, FieldState, MixtureSpec};
use crate::transport::{cfl_number, dual_density, primal_mass_flux};
use crate::{Error, Result};

/// One row of the per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub step: usize,
    pub t: f64,
    pub dt: f64,
    pub cfl: f64,
    pub energy: f64,
    pub energy_drift: f64,
    pub mass: f64,
    pub newton_iterations: usize,
    pub correction_residual: f64,
    pub internal_energy_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Solver {
    pub grid: StaggeredGrid,
    pub spec: MixtureSpec,
    pub chem: ChemStepConfig,
    pub correction: CorrectionSolveConfig,
    pub dt: f64,
    pub state: FieldState,
    pub step: usize,
    pub energy0: f64,
    pub energy_tol: f64,
    pub bounds_tol: f64,
}

/// Exact fresh state from the configuration.
pub fn fresh_state(cfg: &CaseConfig, spec: &MixtureSpec) -> ExactState {
    let y = spec.mass_fractions([cfg.x_fuel, cfg.x_oxidant, cfg.x_neutral, 0.0]);
    let rho = cfg.p_fresh / (spec.gas_constant(y) * cfg.t_fresh);
    ExactState { rho, p: cfg.p_fresh, u: 0.0, y, g: 1.0 }
}

pub fn benchmark_pattern(cfg: &CaseConfig) -> Result<WavePattern> {
    let spec = cfg.mixture()?;
    solve_deflagration_riemann(&spec, fresh_state(cfg, &spec), cfg.flame_speed)
}

/// Builds level-0 data from cell averages of rho, h_s, y, G and dual-cell
/// averages of u; rho^0 and F^0 follow from the mass balance, p^0 from the
/// EOS.
#[allow(clippy::too_many_arguments)]
pub fn state_from_averages(
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    t: f64,
    rho_m1: Vec<f64>,
    h_s: &[f64],
    y: &[[f64; 4]],
    g: Vec<f64>,
    u: Vec<f64>,
    dt: f64,
) -> Result<FieldState> {
    let n = grid.n_cells;
    let rho = solve_mass(grid, &rho_m1, &u, dt)?;
    let flux = primal_mass_flux(&rho, &u);
    let gamma = spec.gamma;
    let e_s: Vec<f64> = h_s.iter().map(|h| h / gamma).collect();
    let p = (0..n).map(|k| (gamma - 1.0) * rho[k] * e_s[k]).collect();
    let col = |i: usize| y.iter().map(|v| v[i]).collect::<Vec<f64>>();
    let z = y.iter().map(|v| z_from_fractions(spec, v[0], v[1])).collect();
    let state = FieldState {
        t,
        rho,
        rho_prev: rho_m1,
        p,
        h_s: h_s.to_vec(),
        e_s,
        y_f: col(0),
        y_o: col(1),
        y_n: col(2),
        y_p: col(3),
        z,
        g,
        u,
        flux,
    };
    Ok(state)
}

fn oracle_averages(
    grid: &StaggeredGrid,
    pat: &WavePattern,
    t: f64,
    x0: f64,
) -> (Vec<f64>, Vec<f64>, Vec<[f64; 4]>, Vec<f64>, Vec<f64>) {
    let n = grid.n_cells;
    let gamma = pat.gamma;
    let cell = |k: usize, f: &dyn Fn(&ExactState) -> f64| {
        interval_average(pat, grid.face_positions[k], grid.face_positions[k + 1], t, x0, f)
    };
    let rho = (0..n).map(|k| cell(k, &|s| s.rho)).collect();
    let h_s = (0..n).map(|k| cell(k, &|s| gamma * s.e_s(gamma))).collect();
    let y = (0..n).map(|k| [0, 1, 2, 3].map(|i| cell(k, &|s| s.y[i]))).collect();
    let g = (0..n).map(|k| cell(k, &|s| s.g)).collect();
    let u = dual_averages(grid, |a, b| interval_average(pat, a, b, t, x0, |s| s.u));
    (rho, h_s, y, g, u)
}

/// Averages over the dual cells; the boundary velocity stays zero.
pub fn dual_averages<F: Fn(f64, f64) -> f64>(grid: &StaggeredGrid, f: F) -> Vec<f64> {
    let n = grid.n_cells;
    (0..=n)
        .map(|j| {
            if j == 0 || j == n {
                0.0
            } else {
                f(grid.cell_centers[j - 1], grid.cell_centers[j])
            }
        })
        .collect()
}

/// dt = cfl / max_K (sum |F| / (rho |K|)) on the initial fields.
pub fn cfl_time_step(grid: &StaggeredGrid, flux: &[f64], rho: &[f64], cfl: f64) -> Result<f64> {
    let rate = cfl_number(grid, flux, rho, 1.0);
    if !(rate > 0.0) {
        return Err(Error::Config("zero mass flux: cannot derive dt from the CFL, set dt".into()));
    }
    Ok(cfl / rate)
}

impl Solver {
    pub fn from_config(cfg: &CaseConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = cfg.mixture()?;
        let grid = build_uniform_grid(cfg.n_cells, cfg.x_left, cfg.x_right)?;
        let n = grid.n_cells;
        let (rho, h_s, y, g, u, fsp) = match cfg.init_mode()? {
            InitMode::RiemannOracle => {
                let pat = benchmark_pattern(cfg)?;
                let (rho, h_s, y, g, u) = oracle_averages(&grid, &pat, cfg.t_start, cfg.x0);
                (rho, h_s, y, g, u, pat.flame_speed_product())
            }
            InitMode::Uniform => {
                let s = fresh_state(cfg, &spec);
                let h = spec.gamma * s.e_s(spec.gamma);
                (vec![s.rho; n], vec![h; n], vec![s.y; n], vec![1.0; n], vec![0.0; n + 1], 0.0)
            }
        };
        let dt = if cfg.dt > 0.0 {
            cfg.dt
        } else {
            // the initial flux estimate uses rho^{-1} on both sides
            let f = primal_mass_flux(&rho, &u);
            cfl_time_step(&grid, &f, &rho, cfg.cfl)?
        };
        let state = state_from_averages(&grid, &spec, cfg.t_start, rho, &h_s, &y, g, u, dt)?;
        let chem = cfg.chemistry(fsp)?;
        Solver::new(grid, spec, chem, cfg.correction()?, dt, state, cfg.energy_tol, cfg.bounds_tol)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: StaggeredGrid,
        spec: MixtureSpec,
        chem: ChemStepConfig,
        correction: CorrectionSolveConfig,
        dt: f64,
        state: FieldState,
        energy_tol: f64,
        bounds_tol: f64,
    ) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("dt = {dt} must be positive")));
        }
        state.check(&spec, bounds_tol)?;
        let energy0 = total_energy(&grid, &spec, &state, dt);
        Ok(Solver { grid, spec, chem, correction, dt, state, step: 0, energy0, energy_tol, bounds_tol })
    }

    pub fn energy(&self) -> f64 {
        total_energy(&self.grid, &self.spec, &self.state, self.dt)
    }

    pub fn mass(&self) -> f64 {
        (0..self.grid.n_cells).map(|k| self.grid.cell_volume(k) * self.state.rho[k]).sum()
    }

    /// Advances one step; the state is left untouched on failure.
    pub fn advance(&mut self) -> Result<Diagnostics> {
        let step = self.step + 1;
        let fail = |e: Error| Error::Step { step, reason: e.to_string() };
        let (grid, spec, dt) = (&self.grid, &self.spec, self.dt);
        let old = &self.state;
        let cfl = cfl_number(grid, &old.flux, &old.rho, dt);
        if self.chem.time_mode == TimeMode::ExplicitLimited && cfl > 1.0 {
            return Err(fail(Error::State(format!("CFL {cfl} exceeds 1 in explicit mode"))));
        }
        let chem = chemistry_step(grid, spec, old, dt, &self.chem).map_err(fail)?;

        let grad = pressure_gradient(grid, &old.p);
        let grad_t = scale_pressure_gradient(&grad, &dual_density(&old.rho), &dual_density(&old.rho_prev));
        let u_t = predict_velocity(grid, &old.rho_prev, &old.rho, &old.flux, &old.u, &grad_t, dt).map_err(fail)?;
        let r = kinetic_residuals(grid, &old.rho_prev, &u_t, &old.u, dt);
        let s = compensation_source(grid, &r);
        let source: Vec<f64> = (0..grid.n_cells).map(|k| chem.heat[k] + s[k]).collect();
        let inp = CorrectionInput {
            grid,
            gamma: spec.gamma,
            rho: &old.rho,
            p: &old.p,
            u_tilde: &u_t,
            grad_tilde: &grad_t,
            dt,
            source: &source,
        };
        let c = correction_solve(&inp, &self.correction).map_err(fail)?;

        let next = FieldState {
            t: old.t + dt,
            rho: c.rho,
            rho_prev: old.rho.clone(),
            p: c.p,
            h_s: c.h_s,
            e_s: c.e_s,
            y_f: chem.y_f,
            y_o: chem.y_o,
            y_n: chem.y_n,
            y_p: chem.y_p,
            z: chem.z,
            g: chem.g,
            u: c.u,
            flux: c.flux,
        };
        next.check(spec, self.bounds_tol).map_err(fail)?;
        let ie = internal_energy_residual(grid, spec, old, &next, &chem.chem_face, &s, dt);
        let energy = total_energy(grid, spec, &next, dt);
        let drift = ((energy - self.energy0) / self.energy0).abs();
        if !(drift < self.energy_tol) {
            return Err(fail(Error::State(format!("energy drift {drift:e}"))));
        }
        self.state = next;
        self.step = step;
        Ok(Diagnostics {
            step,
            t: self.state.t,
            dt,
            cfl,
            energy,
            energy_drift: drift,
            mass: self.mass(),
            newton_iterations: c.iterations,
            correction_residual: c.residual,
            internal_energy_residual: ie.iter().fold(0.0, |a, v| a.max(v.abs())),
        })
    }

    /// Number of steps to reach t_end with the fixed dt; the last step lands
    /// within dt/2 of t_end.
    pub fn steps_to(&self, t_end: f64) -> usize {
        ((t_end - self.state.t) / self.dt).round().max(0.0) as usize
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub solver: Solver,
    pub diagnostics: Vec<Diagnostics>,
    /// (step, state) at the output cadence, the final state always last.
    pub profiles: Vec<(usize, FieldState)>,
}

pub fn run_case(cfg: &CaseConfig) -> Result<RunOutput> {
    let mut solver = Solver::from_config(cfg)?;
    let steps = solver.steps_to(cfg.t_end);
    let mut diagnostics = Vec::with_capacity(steps);
    let mut profiles = vec![(0, solver.state.clone())];
    for _ in 0..steps {
        diagnostics.push(solver.advance()?);
        if cfg.output_every > 0 && solver.step % cfg.output_every == 0 && solver.step < steps {
            profiles.push((solver.step, solver.state.clone()));
        }
    }
    if profiles.last().map(|p| p.0) != Some(solver.step) {
        profiles.push((solver.step, solver.state.clone()));
    }
    Ok(RunOutput { solver, diagnostics, profiles })
}
