//! L1 errors against the exact solution and mesh-convergence studies.

use std::time::Instant;

use rayon::prelude::*;

use crate::grid::StaggeredGrid;
use crate::harness::config::CaseConfig;
use crate::harness::run::{benchmark_pattern, run_case};
use crate::oracle::{asymptotic_composition, interval_average, ExactState, WavePattern};
use crate::thermo::{FieldState, MixtureSpec};
use crate::Result;

pub const VARIABLES: [&str; 6] = ["p", "u", "rho", "y_F", "G", "T"];

/// L1 errors per variable, order of [`VARIABLES`].
pub type Errors = [f64; 6];

/// sum_K |K| |v_K - exact average over K|.
pub fn l1_cells<F: Fn(f64, f64) -> f64>(grid: &StaggeredGrid, v: &[f64], exact_avg: F) -> f64 {
    (0..grid.n_cells)
        .map(|k| {
            let (a, b) = (grid.face_positions[k], grid.face_positions[k + 1]);
            grid.cell_volume(k) * (v[k] - exact_avg(a, b)).abs()
        })
        .sum()
}

/// Same over the dual cells, for face values.
pub fn l1_faces<F: Fn(f64, f64) -> f64>(grid: &StaggeredGrid, v: &[f64], exact_avg: F) -> f64 {
    let n = grid.n_cells;
    (0..=n)
        .map(|j| {
            let a = if j == 0 { grid.x_left } else { grid.cell_centers[j - 1] };
            let b = if j == n { grid.x_right } else { grid.cell_centers[j] };
            grid.dual_volume[j] * (v[j] - exact_avg(a, b)).abs()
        })
        .sum()
}

pub fn l1_error(grid: &StaggeredGrid, spec: &MixtureSpec, state: &FieldState, pat: &WavePattern, x0: f64) -> Errors {
    let t = state.t;
    let avg = |f: fn(&ExactState, &MixtureSpec) -> f64| {
        move |a: f64, b: f64| interval_average(pat, a, b, t, x0, |s| f(s, spec))
    };
    let temp: Vec<f64> = (0..grid.n_cells).map(|k| state.temperature(spec, k)).collect();
    [
        l1_cells(grid, &state.p, avg(|s, _| s.p)),
        l1_faces(grid, &state.u, avg(|s, _| s.u)),
        l1_cells(grid, &state.rho, avg(|s, _| s.rho)),
        l1_cells(grid, &state.y_f, avg(|s, _| s.y[0])),
        l1_cells(grid, &state.g, avg(|s, _| s.g)),
        l1_cells(grid, &temp, avg(|s, sp| s.temperature(sp))),
    ]
}

/// L1 distance, over cells with G <= 0.5, between the computed fuel and
/// oxidant fractions and their equilibrium values.
pub fn burnt_zone_distance(grid: &StaggeredGrid, spec: &MixtureSpec, state: &FieldState) -> f64 {
    (0..grid.n_cells)
        .filter(|&k| state.g[k] <= 0.5)
        .map(|k| {
            let y = state.y(k);
            let eq = asymptotic_composition(spec, y, state.g[k]);
            grid.cell_volume(k) * ((y[0] - eq[0]).abs() + (y[1] - eq[1]).abs())
        })
        .sum()
}

/// Least-squares slope of log e against log h.
pub fn fitted_order(h: &[f64], e: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> =
        h.iter().zip(e).filter(|(_, &e)| e > 0.0).map(|(&h, &e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone)]
pub struct MeshResult {
    pub n_cells: usize,
    pub h: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub steps: usize,
    pub errors: Errors,
    pub burnt_zone_distance: f64,
    pub max_energy_drift: f64,
    pub wall_seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub scheme: String,
    pub cfl: f64,
    pub gamma: f64,
    pub epsilon_per_h: f64,
    pub meshes: Vec<MeshResult>,
    /// (n_cells, message) for cases that failed.
    pub failures: Vec<(usize, String)>,
    /// Orders between consecutive successful meshes, per variable.
    pub orders: Vec<Errors>,
    /// Least-squares order over all successful meshes, per variable.
    pub fitted: Errors,
}

impl ConvergenceReport {
    pub fn error(&self, var: &str) -> Vec<f64> {
        let i = VARIABLES.iter().position(|v| *v == var).expect("known variable");
        self.meshes.iter().map(|m| m.errors[i]).collect()
    }

    pub fn order(&self, var: &str) -> f64 {
        let i = VARIABLES.iter().position(|v| *v == var).expect("known variable");
        self.fitted[i]
    }
}

pub fn run_mesh(cfg: &CaseConfig) -> Result<MeshResult> {
    let start = Instant::now();
    let pat = benchmark_pattern(cfg)?;
    let out = run_case(cfg)?;
    let s = &out.solver;
    let errors = l1_error(&s.grid, &s.spec, &s.state, &pat, cfg.x0);
    Ok(MeshResult {
        n_cells: cfg.n_cells,
        h: cfg.h(),
        epsilon: s.chem.epsilon,
        dt: s.dt,
        steps: s.step,
        errors,
        burnt_zone_distance: burnt_zone_distance(&s.grid, &s.spec, &s.state),
        max_energy_drift: out.diagnostics.iter().fold(0.0, |a, d| a.max(d.energy_drift)),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs `base` on every mesh in parallel, with epsilon tied to h and a
/// constant CFL; failed meshes are recorded and skipped.
pub fn convergence_study(base: &CaseConfig, meshes: &[usize]) -> ConvergenceReport {
    let results: Vec<(usize, Result<MeshResult>)> = meshes
        .par_iter()
        .map(|&n| {
            let cfg = CaseConfig { n_cells: n, ..base.clone() };
            (n, run_mesh(&cfg))
        })
        .collect();
    let mut ok = Vec::new();
    let mut failures = Vec::new();
    for (n, r) in results {
        match r {
            Ok(m) => ok.push(m),
            Err(e) => failures.push((n, e.to_string())),
        }
    }
    ok.sort_by_key(|m| m.n_cells);
    let orders = ok
        .windows(2)
        .map(|w| {
            let r = (w[0].h / w[1].h).ln();
            let mut o = [0.0; 6];
            for (i, v) in o.iter_mut().enumerate() {
                *v = (w[0].errors[i] / w[1].errors[i]).ln() / r;
            }
            o
        })
        .collect();
    let h: Vec<f64> = ok.iter().map(|m| m.h).collect();
    let mut fitted = [0.0; 6];
    for (i, v) in fitted.iter_mut().enumerate() {
        let e: Vec<f64> = ok.iter().map(|m| m.errors[i]).collect();
        *v = fitted_order(&h, &e);
    }
    ConvergenceReport {
        scheme: base.scheme.clone(),
        cfl: base.cfl,
        gamma: base.gamma,
        epsilon_per_h: base.epsilon_per_h,
        meshes: ok,
        failures,
        orders,
        fitted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_uniform_grid;

    #[test]
    fn l1_examples() {
        let g = build_uniform_grid(10, 0.0, 1.0).unwrap();
        let exact = |a: f64, b: f64| 0.5 * (a + b);
        let v: Vec<f64> = g.cell_centers.clone();
        assert!(l1_cells(&g, &v, exact) < 1e-15);
        let shifted: Vec<f64> = v.iter().map(|x| x + 0.25).collect();
        assert!((l1_cells(&g, &shifted, exact) - 0.25).abs() < 1e-14);
        let doubled: Vec<f64> = v.iter().map(|x| x + 0.5).collect();
        assert!((l1_cells(&g, &doubled, exact) - 2.0 * l1_cells(&g, &shifted, exact)).abs() < 1e-14);
    }

    #[test]
    fn fitted_order_of_power_law() {
        let h = [0.1, 0.05, 0.025];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.0 * x.powf(0.7)).collect();
        assert!((fitted_order(&h, &e) - 0.7).abs() < 1e-12);
    }
}
