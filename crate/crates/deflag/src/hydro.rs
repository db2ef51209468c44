//! Euler step: pressure-gradient scaling, velocity prediction on the dual
//! mesh, the coupled correction, and the energy bookkeeping.
//!
//! The correction couples velocity, mass, sensible enthalpy and the EOS.
//! With `rho h_s = gamma p / (gamma - 1)` the enthalpy balance involves only
//! `p` and `u`, so `u` is eliminated and Newton is run on `p` alone; the
//! density then follows from a linear upwind mass balance.

use crate::grid::StaggeredGrid;
use crate::thermo::MixtureSpec;
use crate::transport::{dual_density, dual_mass_flux, primal_mass_flux};
use crate::tridiag::Tridiagonal;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionSolveConfig {
    pub nonlinear_tol: f64,
    pub max_iterations: usize,
    /// Damping applied to every Newton update.
    pub under_relaxation: f64,
}

impl Default for CorrectionSolveConfig {
    fn default() -> Self {
        CorrectionSolveConfig { nonlinear_tol: 1e-12, max_iterations: 100, under_relaxation: 1.0 }
    }
}

impl CorrectionSolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nonlinear_tol > 0.0) || self.max_iterations == 0 {
            return Err(Error::Config("nonlinear_tol > 0 and max_iterations >= 1 required".into()));
        }
        if !(self.under_relaxation > 0.0 && self.under_relaxation <= 1.0) {
            return Err(Error::Config("under_relaxation must lie in (0, 1]".into()));
        }
        Ok(())
    }
}

/// Face gradient, transpose of the divergence; zero on boundary faces.
pub fn pressure_gradient(grid: &StaggeredGrid, p: &[f64]) -> Vec<f64> {
    let n = grid.n_cells;
    (0..=n)
        .map(|j| if grid.is_interior_face(j) { (p[j] - p[j - 1]) / grid.dual_volume[j] } else { 0.0 })
        .collect()
}

pub fn velocity_divergence(grid: &StaggeredGrid, u: &[f64]) -> Vec<f64> {
    (0..grid.n_cells).map(|k| (u[k + 1] - u[k]) / grid.cell_volume(k)).collect()
}

/// sum |K| p div u + sum |D| u grad p, relative to the larger of the two sums
/// of magnitudes.
pub fn duality_residual(grid: &StaggeredGrid, p: &[f64], u: &[f64]) -> f64 {
    let div = velocity_divergence(grid, u);
    let grad = pressure_gradient(grid, p);
    let mut a = 0.0;
    let mut scale_a = 0.0;
    for k in 0..grid.n_cells {
        let t = grid.cell_volume(k) * p[k] * div[k];
        a += t;
        scale_a += t.abs();
    }
    let mut b = 0.0;
    let mut scale_b = 0.0;
    for j in 0..=grid.n_cells {
        let t = grid.dual_volume[j] * u[j] * grad[j];
        b += t;
        scale_b += t.abs();
    }
    let scale = f64::max(scale_a, scale_b);
    if scale == 0.0 {
        0.0
    } else {
        (a + b).abs() / scale
    }
}

pub fn scale_pressure_gradient(grad_p: &[f64], rho_n_d: &[f64], rho_nm1_d: &[f64]) -> Vec<f64> {
    (0..grad_p.len()).map(|j| (rho_n_d[j] / rho_nm1_d[j]).sqrt() * grad_p[j]).collect()
}

/// Matrix of the prediction step on the interior faces.
fn prediction_system(
    grid: &StaggeredGrid,
    rho_prev: &[f64],
    rho: &[f64],
    flux: &[f64],
    u: &[f64],
    grad_tilde: &[f64],
    dt: f64,
) -> (Tridiagonal, Vec<f64>) {
    let n = grid.n_cells;
    let dual = dual_mass_flux(flux);
    let d_prev = dual_density(rho_prev);
    let d_now = dual_density(rho);
    let m_faces = n - 1;
    let mut m = Tridiagonal::zeros(m_faces);
    let mut rhs = vec![0.0; m_faces];
    for i in 0..m_faces {
        let j = i + 1;
        let vol = grid.dual_volume[j];
        // dual faces at the centres of cells j-1 (left) and j (right)
        let phi_r = dual[j];
        let phi_l = dual[j - 1];
        m.diag[i] = vol * d_now[j] / dt + 0.5 * phi_r - 0.5 * phi_l;
        m.upper[i] = 0.5 * phi_r;
        m.lower[i] = -0.5 * phi_l;
        rhs[i] = vol * d_prev[j] * u[j] / dt - vol * grad_tilde[j];
    }
    (m, rhs)
}

pub fn predict_velocity(
    grid: &StaggeredGrid,
    rho_prev: &[f64],
    rho: &[f64],
    flux: &[f64],
    u: &[f64],
    grad_tilde: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    let (m, rhs) = prediction_system(grid, rho_prev, rho, flux, u, grad_tilde, dt);
    let inner = m.solve(&rhs).map_err(|e| Error::Linear(format!("prediction: {e}")))?;
    let mut out = vec![0.0; grid.n_faces()];
    out[1..grid.n_cells].copy_from_slice(&inner);
    Ok(out)
}

/// Residual of the prediction balance per face, divided by |D|.
#[allow(clippy::too_many_arguments)]
pub fn prediction_residual(
    grid: &StaggeredGrid,
    rho_prev: &[f64],
    rho: &[f64],
    flux: &[f64],
    u: &[f64],
    grad_tilde: &[f64],
    dt: f64,
    u_tilde: &[f64],
) -> Vec<f64> {
    let (m, rhs) = prediction_system(grid, rho_prev, rho, flux, u, grad_tilde, dt);
    let inner = &u_tilde[1..grid.n_cells];
    let au = m.apply(inner);
    let mut out = vec![0.0; grid.n_faces()];
    for i in 0..inner.len() {
        out[i + 1] = (au[i] - rhs[i]) / grid.dual_volume[i + 1];
    }
    out
}

/// R_sigma = |D| rho^{n-1}_D (u_tilde - u^n)^2 / (2 dt).
pub fn kinetic_residuals(
    grid: &StaggeredGrid,
    rho_prev: &[f64],
    u_tilde: &[f64],
    u: &[f64],
    dt: f64,
) -> Vec<f64> {
    let d_prev = dual_density(rho_prev);
    (0..=grid.n_cells)
        .map(|j| {
            let du = u_tilde[j] - u[j];
            grid.dual_volume[j] * d_prev[j] * du * du / (2.0 * dt)
        })
        .collect()
}

/// S_K = (1/|K|) 1/2 sum_{faces of K} R; a boundary residual goes whole to
/// its cell.
pub fn compensation_source(grid: &StaggeredGrid, r: &[f64]) -> Vec<f64> {
    let n = grid.n_cells;
    (0..n)
        .map(|k| {
            let share = |j: usize| if grid.boundary[j] { r[j] } else { 0.5 * r[j] };
            (share(k) + share(k + 1)) / grid.cell_volume(k)
        })
        .collect()
}

/// Old-level inputs of the correction step.
pub struct CorrectionInput<'a> {
    pub grid: &'a StaggeredGrid,
    pub gamma: f64,
    pub rho: &'a [f64],
    pub p: &'a [f64],
    pub u_tilde: &'a [f64],
    pub grad_tilde: &'a [f64],
    pub dt: f64,
    /// (omega_theta)_K + S_K.
    pub source: &'a [f64],
}

#[derive(Debug, Clone)]
pub struct Correction {
    pub u: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    pub h_s: Vec<f64>,
    pub e_s: Vec<f64>,
    pub flux: Vec<f64>,
    pub iterations: usize,
    /// Final scaled residual of the pressure equation.
    pub residual: f64,
}

fn corrected_velocity(inp: &CorrectionInput, p: &[f64]) -> Vec<f64> {
    let g = inp.grid;
    let n = g.n_cells;
    let d = dual_density(inp.rho);
    let mut u = vec![0.0; n + 1];
    for j in 1..n {
        let grad = (p[j] - p[j - 1]) / g.dual_volume[j];
        u[j] = inp.u_tilde[j] - inp.dt / d[j] * (grad - inp.grad_tilde[j]);
    }
    u
}

fn upwind_cell(j: usize, u: f64) -> usize {
    if u >= 0.0 {
        j - 1
    } else {
        j
    }
}

/// Enthalpy equation multiplied by (gamma - 1) dt, so it reads in Pa.
fn pressure_residual(inp: &CorrectionInput, p: &[f64], u: &[f64]) -> Vec<f64> {
    let g = inp.grid;
    let n = g.n_cells;
    let gm1 = inp.gamma - 1.0;
    let s = gm1 * inp.dt;
    let t: Vec<f64> = (0..=n)
        .map(|j| if g.is_interior_face(j) { u[j] * p[upwind_cell(j, u[j])] / gm1 } else { 0.0 })
        .collect();
    (0..n)
        .map(|k| {
            let conv = (t[k + 1] - t[k] + p[k] * (u[k + 1] - u[k])) / g.cell_volume(k);
            p[k] - inp.p[k] + s * (conv - inp.source[k])
        })
        .collect()
}

fn pressure_jacobian(inp: &CorrectionInput, p: &[f64], u: &[f64]) -> Tridiagonal {
    let g = inp.grid;
    let n = g.n_cells;
    let gm1 = inp.gamma - 1.0;
    let s = gm1 * inp.dt;
    let d = dual_density(inp.rho);
    // c_j = du_j/dp_{j-1} = -du_j/dp_j
    let c: Vec<f64> = (0..=n)
        .map(|j| if g.is_interior_face(j) { inp.dt / (d[j] * g.dual_volume[j]) } else { 0.0 })
        .collect();
    // dT_j/dp_{j-1}, dT_j/dp_j
    let mut dt_l = vec![0.0; n + 1];
    let mut dt_r = vec![0.0; n + 1];
    for j in 1..n {
        let up = upwind_cell(j, u[j]);
        let pu = p[up];
        dt_l[j] = c[j] * pu / gm1 + if up == j - 1 { u[j] / gm1 } else { 0.0 };
        dt_r[j] = -c[j] * pu / gm1 + if up == j { u[j] / gm1 } else { 0.0 };
    }
    let mut m = Tridiagonal::zeros(n);
    for k in 0..n {
        let vol = g.cell_volume(k);
        m.diag[k] = 1.0
            + s / vol * (dt_l[k + 1] - dt_r[k] + (u[k + 1] - u[k]) + p[k] * (c[k + 1] + c[k]));
        if k > 0 {
            m.lower[k] = s / vol * (-dt_l[k] - p[k] * c[k]);
        }
        if k + 1 < n {
            m.upper[k] = s / vol * (dt_r[k + 1] - p[k] * c[k + 1]);
        }
    }
    m
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, &b| a.max(b.abs()))
}

/// Upwind mass balance for rho^{n+1} given u^{n+1}.
pub fn solve_mass(grid: &StaggeredGrid, rho: &[f64], u: &[f64], dt: f64) -> Result<Vec<f64>> {
    let n = grid.n_cells;
    let mut m = Tridiagonal::zeros(n);
    let rhs: Vec<f64> = rho.iter().map(|r| r / dt).collect();
    for k in 0..n {
        let vol = grid.cell_volume(k);
        let (ul, ur) = (u[k], u[k + 1]);
        m.diag[k] = 1.0 / dt + (ur.max(0.0) + (-ul).max(0.0)) / vol;
        m.lower[k] = -ul.max(0.0) / vol;
        m.upper[k] = -(-ur).max(0.0) / vol;
    }
    m.solve(&rhs).map_err(|e| Error::Linear(format!("mass balance: {e}")))
}

pub fn correction_solve(inp: &CorrectionInput, cfg: &CorrectionSolveConfig) -> Result<Correction> {
    let n = inp.grid.n_cells;
    let scale = max_abs(inp.p).max(f64::MIN_POSITIVE);
    let mut p = inp.p.to_vec();
    let mut u = corrected_velocity(inp, &p);
    let mut r = pressure_residual(inp, &p, &u);
    let mut norm = max_abs(&r) / scale;
    let mut it = 0;
    while norm > cfg.nonlinear_tol {
        if it >= cfg.max_iterations {
            return Err(Error::Linear(format!(
                "correction did not converge: residual {norm:e} after {it} iterations"
            )));
        }
        it += 1;
        let jac = pressure_jacobian(inp, &p, &u);
        let dp = jac.solve(&r).map_err(|e| Error::Linear(format!("correction Newton: {e}")))?;
        let mut lambda = cfg.under_relaxation;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = (0..n).map(|k| p[k] - lambda * dp[k]).collect();
            if trial.iter().all(|&v| v > 0.0) {
                let ut = corrected_velocity(inp, &trial);
                let rt = pressure_residual(inp, &trial, &ut);
                let nt = max_abs(&rt) / scale;
                // plain Newton steps are always taken once close to the root
                if nt < norm || nt <= 10.0 * cfg.nonlinear_tol || lambda < 1e-3 {
                    p = trial;
                    u = ut;
                    r = rt;
                    norm = nt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            return Err(Error::Linear("correction: no admissible Newton step".into()));
        }
    }
    let rho = solve_mass(inp.grid, inp.rho, &u, inp.dt)?;
    if let Some(k) = rho.iter().position(|&v| !(v > 0.0)) {
        return Err(Error::State(format!("non-positive density at cell {k}")));
    }
    let gm1 = inp.gamma - 1.0;
    let e_s: Vec<f64> = (0..n).map(|k| p[k] / (gm1 * rho[k])).collect();
    let h_s = e_s.iter().map(|e| inp.gamma * e).collect();
    let flux = primal_mass_flux(&rho, &u);
    Ok(Correction { u, rho, p, h_s, e_s, flux, iterations: it, residual: norm })
}

/// Residuals of the four correction equations: velocity (per face), mass,
/// enthalpy and EOS (per cell), each scaled to be dimensionless.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionResiduals {
    pub velocity: f64,
    pub mass: f64,
    pub enthalpy: f64,
    pub eos: f64,
}

pub fn correction_residuals(inp: &CorrectionInput, out: &Correction) -> CorrectionResiduals {
    let g = inp.grid;
    let n = g.n_cells;
    let d = dual_density(inp.rho);
    let grad = pressure_gradient(g, &out.p);
    let mut vel = 0.0f64;
    let vscale = max_abs(&out.u).max(max_abs(inp.u_tilde)).max(1e-300);
    for j in 1..n {
        let r = d[j] * (out.u[j] - inp.u_tilde[j]) / inp.dt + grad[j] - inp.grad_tilde[j];
        vel = vel.max((r * inp.dt / d[j]).abs() / vscale);
    }
    let rscale = max_abs(inp.rho);
    let mut mass = 0.0f64;
    let mut enth = 0.0f64;
    let mut eos = 0.0f64;
    let pscale = max_abs(inp.p);
    for k in 0..n {
        let vol = g.cell_volume(k);
        let div_m = (out.flux[k + 1] - out.flux[k]) / vol;
        mass = mass.max(((out.rho[k] - inp.rho[k]) + inp.dt * div_m).abs() / rscale);
        // upwind rho h_s on faces, upwind p in the u grad p term
        let face = |j: usize| -> (f64, f64) {
            if !g.is_interior_face(j) {
                return (0.0, 0.0);
            }
            let up = upwind_cell(j, out.u[j]);
            (out.flux[j] * out.h_s[up], out.p[up])
        };
        let (fr, pr) = face(k + 1);
        let (fl, pl) = face(k);
        let conv = (fr - fl) / vol;
        let ugp = (out.u[k + 1] * (out.p[k] - pr) - out.u[k] * (out.p[k] - pl)) / vol;
        let old_rhoh = inp.gamma / (inp.gamma - 1.0) * inp.p[k];
        let r = (out.rho[k] * out.h_s[k] - old_rhoh) / inp.dt + conv
            - (out.p[k] - inp.p[k]) / inp.dt
            + ugp
            - inp.source[k];
        enth = enth.max((r * inp.dt).abs() / pscale);
        let p_eos = (inp.gamma - 1.0) / inp.gamma * out.h_s[k] * out.rho[k];
        eos = eos.max((p_eos - out.p[k]).abs() / pscale);
    }
    CorrectionResiduals { velocity: vel, mass, enthalpy: enth, eos }
}

/// (e_k)_sigma = 1/2 rho_D u^2 + dt^2 (grad p)^2 / (2 rho_D) per face.
pub fn face_kinetic_energy(rho_d: &[f64], u: &[f64], grad_p: &[f64], dt: f64) -> Vec<f64> {
    (0..u.len())
        .map(|j| 0.5 * rho_d[j] * u[j] * u[j] + dt * dt * grad_p[j] * grad_p[j] / (2.0 * rho_d[j]))
        .collect()
}

/// (e_k)_K = 1/(2|K|) sum_{faces of K} |D| (e_k)_sigma, with the density
/// level that goes with `u` (rho^{n-1} for u^n).
pub fn cell_kinetic_energy(
    grid: &StaggeredGrid,
    rho_level: &[f64],
    u: &[f64],
    p: &[f64],
    dt: f64,
) -> Vec<f64> {
    let d = dual_density(rho_level);
    let grad = pressure_gradient(grid, p);
    let ek = face_kinetic_energy(&d, u, &grad, dt);
    (0..grid.n_cells)
        .map(|k| {
            (grid.dual_volume[k] * ek[k] + grid.dual_volume[k + 1] * ek[k + 1])
                / (2.0 * grid.cell_volume(k))
        })
        .collect()
}

/// E^n = sum |K| [rho^n e_s^n + rho^{n-1} sum dh y^n + (e_k)_K^n].
pub fn total_energy(
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    state: &crate::thermo::FieldState,
    dt: f64,
) -> f64 {
    let ek = cell_kinetic_energy(grid, &state.rho_prev, &state.u, &state.p, dt);
    (0..grid.n_cells)
        .map(|k| {
            grid.cell_volume(k)
                * (state.rho[k] * state.e_s[k]
                    + state.rho_prev[k] * spec.chemical_enthalpy(state.y(k))
                    + ek[k])
        })
        .sum()
}

/// Per-cell residual of the internal energy balance for one completed step
/// (`prev` at level n, `next` at level n+1). Scaled by dt / max p.
pub fn internal_energy_residual(
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    prev: &crate::thermo::FieldState,
    next: &crate::thermo::FieldState,
    chem_face: &[f64],
    s: &[f64],
    dt: f64,
) -> Vec<f64> {
    let n = grid.n_cells;
    let scale = dt / max_abs(&prev.p).max(1e-300);
    (0..n)
        .map(|k| {
            let vol = grid.cell_volume(k);
            let rhoe_new = next.rho[k] * next.e_s[k] + prev.rho[k] * spec.chemical_enthalpy(next.y(k));
            let rhoe_old = prev.rho[k] * prev.e_s[k] + prev.rho_prev[k] * spec.chemical_enthalpy(prev.y(k));
            let face = |j: usize| -> f64 {
                if !grid.is_interior_face(j) {
                    return 0.0;
                }
                let up = upwind_cell(j, next.u[j]);
                next.flux[j] * next.e_s[up] + prev.flux[j] * chem_face[j]
            };
            let div = (face(k + 1) - face(k)) / vol;
            let pdiv = next.p[k] * (next.u[k + 1] - next.u[k]) / vol;
            ((rhoe_new - rhoe_old) / dt + div + pdiv - s[k]) * scale
        })
        .collect()
}
