//! Reactive step: G, then z, then y_N, then y_F with the implicit reaction,
//! then the closure for y_O and y_P.
//!
//! Every balance has the form
//! `(rho^n y^{n+1} - rho^{n-1} y^n)/dt + div(F^n y_face) = source`,
//! so a constant field is preserved whenever F^n carried rho^{n-1} to rho^n.

use crate::grid::StaggeredGrid;
use crate::thermo::{y_o_from_z, FieldState, MixtureSpec};
use crate::transport::{face_values, Ghosts, LimiterParams};
use crate::tridiag::Tridiagonal;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeMode {
    /// Upwind faces at the new level, one tridiagonal solve per variable.
    ImplicitUpwind,
    /// Limited faces built from the old level.
    ExplicitLimited,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChemStepConfig {
    pub epsilon: f64,
    pub epsilon_per_h: Option<f64>,
    /// rho_u u_f (kg/(m^2 s)).
    pub flame_speed_product: f64,
    pub time_mode: TimeMode,
    pub limiter: LimiterParams,
}

impl ChemStepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(Error::Config(format!("epsilon = {} must be positive", self.epsilon)));
        }
        if !(self.flame_speed_product >= 0.0) {
            return Err(Error::Config("flame_speed_product must be non-negative".into()));
        }
        self.limiter.validate()
    }
}

fn neg_part(x: f64) -> f64 {
    (-x).max(0.0)
}

/// Cut-off function eta(y_F, z), affine in y_F.
pub fn eta(spec: &MixtureSpec, y_f: f64, z: f64) -> f64 {
    if z <= 0.0 {
        y_f / spec.nuw_f()
    } else {
        y_f / spec.nuw_f() - z
    }
}

/// omega = eta (G - 0.5)^-, before the 1/epsilon factor.
pub fn reaction_rate(spec: &MixtureSpec, y_f: f64, z: f64, g: f64) -> f64 {
    eta(spec, y_f, z) * neg_part(g - 0.5)
}

/// a_sigma = rho_u u_f sign(grad G) on interior faces.
pub fn flame_advection_field(grid: &StaggeredGrid, g: &[f64], flame_speed_product: f64) -> Vec<f64> {
    let n = grid.n_cells;
    let mut a = vec![0.0; n + 1];
    let gmax = g.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
    let range = gmax - gmin;
    if !(range > 0.0) || flame_speed_product == 0.0 {
        return a;
    }
    let threshold = 1e-12 * range / grid.h;
    // second-order face values: cell means inside, cell value on the boundary
    let g_hat: Vec<f64> = (0..=n)
        .map(|j| {
            if j == 0 {
                g[0]
            } else if j == n {
                g[n - 1]
            } else {
                0.5 * (g[j - 1] + g[j])
            }
        })
        .collect();
    for j in 1..n {
        let grad = (g_hat[j + 1] - g_hat[j - 1]) / (2.0 * grid.h);
        if grad.abs() >= threshold {
            a[j] = flame_speed_product * grad.signum();
        }
    }
    a
}

/// Old-level data shared by all variables of one chemistry step.
pub struct ChemContext<'a> {
    pub grid: &'a StaggeredGrid,
    pub rho_prev: &'a [f64],
    pub rho: &'a [f64],
    pub flux: &'a [f64],
    pub dt: f64,
}

/// Transport part of the matrix and right-hand side for one variable.
/// Returns the system and, in explicit mode, the face values used.
fn transport_system(
    ctx: &ChemContext,
    y: &[f64],
    cfg: &ChemStepConfig,
) -> (Tridiagonal, Vec<f64>, Option<Vec<f64>>) {
    let n = ctx.grid.n_cells;
    let h = ctx.grid.h;
    let dt = ctx.dt;
    let mut m = Tridiagonal::zeros(n);
    let mut rhs: Vec<f64> = (0..n).map(|k| ctx.rho_prev[k] * y[k] / dt).collect();
    for k in 0..n {
        m.diag[k] = ctx.rho[k] / dt;
    }
    match cfg.time_mode {
        TimeMode::ImplicitUpwind => {
            for k in 0..n {
                let fr = ctx.flux[k + 1];
                let fl = ctx.flux[k];
                m.diag[k] += (fr.max(0.0) + (-fl).max(0.0)) / h;
                m.lower[k] = -fl.max(0.0) / h;
                m.upper[k] = -(-fr).max(0.0) / h;
            }
            (m, rhs, None)
        }
        TimeMode::ExplicitLimited => {
            let yf = face_values(ctx.grid, y, Ghosts::NONE, ctx.flux, ctx.rho, dt, &cfg.limiter);
            for k in 0..n {
                rhs[k] -= (ctx.flux[k + 1] * yf[k + 1] - ctx.flux[k] * yf[k]) / h;
            }
            (m, rhs, Some(yf))
        }
    }
}

/// Upwind face values at the new level, for the implicit mode bookkeeping.
fn implicit_faces(flux: &[f64], y_new: &[f64]) -> Vec<f64> {
    let n = y_new.len();
    (0..=n)
        .map(|j| {
            if j == 0 {
                y_new[0]
            } else if j == n {
                y_new[n - 1]
            } else if flux[j] >= 0.0 {
                y_new[j - 1]
            } else {
                y_new[j]
            }
        })
        .collect()
}

fn solve(m: &Tridiagonal, rhs: &[f64], what: &str) -> Result<Vec<f64>> {
    m.solve(rhs).map_err(|e| Error::Linear(format!("{what}: {e}")))
}

/// Result of advancing one scalar: new cell values and the face values
/// that entered the convection flux.
#[derive(Debug, Clone)]
pub struct Advanced {
    pub cells: Vec<f64>,
    pub faces: Vec<f64>,
}

pub fn advance_g(ctx: &ChemContext, g: &[f64], cfg: &ChemStepConfig) -> Result<Advanced> {
    let h = ctx.grid.h;
    let (mut m, rhs, yf) = transport_system(ctx, g, cfg);
    let a = flame_advection_field(ctx.grid, g, cfg.flame_speed_product);
    for j in 1..ctx.grid.n_cells {
        let (k, l) = (j - 1, j);
        if a[j] > 0.0 {
            // upwind w.r.t. a: L takes G from K
            m.diag[l] += a[j] / h;
            m.lower[l] -= a[j] / h;
        } else if a[j] < 0.0 {
            m.diag[k] += -a[j] / h;
            m.upper[k] -= -a[j] / h;
        }
    }
    let cells = solve(&m, &rhs, "G")?;
    let faces = yf.unwrap_or_else(|| implicit_faces(ctx.flux, &cells));
    Ok(Advanced { cells, faces })
}

pub fn advance_passive(ctx: &ChemContext, y: &[f64], cfg: &ChemStepConfig) -> Result<Advanced> {
    let (m, rhs, yf) = transport_system(ctx, y, cfg);
    let cells = solve(&m, &rhs, "passive scalar")?;
    let faces = yf.unwrap_or_else(|| implicit_faces(ctx.flux, &cells));
    Ok(Advanced { cells, faces })
}

/// Fuel balance with the reaction implicit; the rate is affine in y_F once
/// z and G are known at the new level.
pub fn advance_fuel(
    ctx: &ChemContext,
    spec: &MixtureSpec,
    y_f: &[f64],
    z_next: &[f64],
    g_next: &[f64],
    cfg: &ChemStepConfig,
) -> Result<Advanced> {
    let (mut m, mut rhs, yf) = transport_system(ctx, y_f, cfg);
    for k in 0..ctx.grid.n_cells {
        let c = neg_part(g_next[k] - 0.5) / cfg.epsilon;
        m.diag[k] += c;
        if z_next[k] > 0.0 {
            rhs[k] += c * spec.nuw_f() * z_next[k];
        }
    }
    let cells = solve(&m, &rhs, "fuel")?;
    let faces = yf.unwrap_or_else(|| implicit_faces(ctx.flux, &cells));
    Ok(Advanced { cells, faces })
}

/// y_O from the z relation and y_P by the unit-sum closure.
pub fn close_species(spec: &MixtureSpec, y_f: f64, z: f64, y_n: f64) -> Result<(f64, f64)> {
    let y_o = y_o_from_z(spec, y_f, z);
    let y_p = 1.0 - y_f - y_o - y_n;
    let tol = 1e-10;
    for (name, v) in [("y_F", y_f), ("y_O", y_o), ("y_N", y_n), ("y_P", y_p)] {
        if v < -tol || v > 1.0 + tol {
            return Err(Error::State(format!("{name} = {v} out of [0, 1]")));
        }
    }
    Ok((y_o, y_p))
}

/// Output of a full chemistry step.
#[derive(Debug, Clone)]
pub struct ChemStep {
    pub g: Vec<f64>,
    pub z: Vec<f64>,
    pub y_f: Vec<f64>,
    pub y_o: Vec<f64>,
    pub y_n: Vec<f64>,
    pub y_p: Vec<f64>,
    /// omega_K^{n+1} (without 1/epsilon).
    pub omega: Vec<f64>,
    /// Reaction heat (omega_theta)_K^{n+1}.
    pub heat: Vec<f64>,
    /// sum_i dh_i y_i on each face, as convected with F^n.
    pub chem_face: Vec<f64>,
}

pub fn chemistry_step(
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    state: &FieldState,
    dt: f64,
    cfg: &ChemStepConfig,
) -> Result<ChemStep> {
    let ctx = ChemContext { grid, rho_prev: &state.rho_prev, rho: &state.rho, flux: &state.flux, dt };
    let g = advance_g(&ctx, &state.g, cfg)?;
    let z = advance_passive(&ctx, &state.z, cfg)?;
    let y_n = advance_passive(&ctx, &state.y_n, cfg)?;
    let y_f = advance_fuel(&ctx, spec, &state.y_f, &z.cells, &g.cells, cfg)?;
    let n = grid.n_cells;
    let mut y_o = vec![0.0; n];
    let mut y_p = vec![0.0; n];
    for k in 0..n {
        let (o, p) = close_species(spec, y_f.cells[k], z.cells[k], y_n.cells[k])
            .map_err(|e| Error::State(format!("cell {k}: {e}")))?;
        y_o[k] = o;
        y_p[k] = p;
    }
    let coef = crate::thermo::reaction_heat_coefficient(spec);
    let omega: Vec<f64> =
        (0..n).map(|k| reaction_rate(spec, y_f.cells[k], z.cells[k], g.cells[k])).collect();
    let heat = omega.iter().map(|w| coef * w / cfg.epsilon).collect();
    let chem_face = (0..=n)
        .map(|j| {
            let yf = y_f.faces[j];
            let yn = y_n.faces[j];
            let yo = y_o_from_z(spec, yf, z.faces[j]);
            spec.chemical_enthalpy([yf, yo, yn, 1.0 - yf - yo - yn])
        })
        .collect();
    Ok(ChemStep { g: g.cells, z: z.cells, y_f: y_f.cells, y_o, y_n: y_n.cells, y_p, omega, heat, chem_face })
}
