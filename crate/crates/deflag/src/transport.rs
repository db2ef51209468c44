//! Mass fluxes, face-value reconstructions (upwind, MUSCL, anti-diffusive)
//! and the convection divergence.
//!
//! Fluxes are stored per face with the left-to-right orientation: a positive
//! `flux[j]` leaves cell `j-1` and enters cell `j`.

use crate::grid::StaggeredGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Upwind,
    Muscl,
    AntiDiffusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborPolicy {
    /// Cells feeding mass into the upstream cell.
    UpstreamCells,
    /// The cell on the other side of the upstream cell.
    OppositeCells,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterParams {
    pub scheme: Scheme,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    pub neighbor_policy: NeighborPolicy,
    /// Slope cap of the anti-diffusive interval; `f64::INFINITY` removes it.
    pub s_max: f64,
}

impl LimiterParams {
    pub fn new(scheme: Scheme) -> Self {
        LimiterParams {
            scheme,
            zeta_minus: 1.0,
            zeta_plus: 1.0,
            neighbor_policy: NeighborPolicy::OppositeCells,
            s_max: 2.0,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        let ok = |z: f64| (0.0..=2.0).contains(&z);
        if !ok(self.zeta_minus) || !ok(self.zeta_plus) {
            return Err(crate::Error::Config("zeta_minus and zeta_plus must lie in [0, 2]".into()));
        }
        if !(self.s_max >= 0.0) {
            return Err(crate::Error::Config("s_max must be non-negative".into()));
        }
        Ok(())
    }
}

/// Values outside the domain, used only where a boundary face carries flux.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Ghosts {
    pub left: Option<f64>,
    pub right: Option<f64>,
}

impl Ghosts {
    pub const NONE: Ghosts = Ghosts { left: None, right: None };
}

/// Cell value lookup with optional ghost cells at -1 and n.
#[derive(Clone, Copy)]
struct Cells<'a> {
    y: &'a [f64],
    ghosts: Ghosts,
}

impl<'a> Cells<'a> {
    fn get(&self, i: isize) -> Option<f64> {
        let n = self.y.len() as isize;
        if i < 0 {
            if i == -1 {
                self.ghosts.left
            } else {
                None
            }
        } else if i >= n {
            if i == n {
                self.ghosts.right
            } else {
                None
            }
        } else {
            Some(self.y[i as usize])
        }
    }
}

/// Upstream/downstream cell indices across face `j`. Zero flux counts as
/// left-to-right.
fn orient(j: usize, f: f64) -> (isize, isize, isize) {
    let j = j as isize;
    if f >= 0.0 {
        (j - 1, j, j - 2)
    } else {
        (j, j - 1, j + 1)
    }
}

fn clamp_between(v: f64, a: f64, b: f64) -> f64 {
    v.clamp(a.min(b), a.max(b))
}

pub fn primal_mass_flux(rho: &[f64], u: &[f64]) -> Vec<f64> {
    let n = rho.len();
    (0..=n)
        .map(|j| {
            if j == 0 || j == n {
                0.0
            } else if u[j] >= 0.0 {
                rho[j - 1] * u[j]
            } else {
                rho[j] * u[j]
            }
        })
        .collect()
}

/// Dual flux through the dual face at the centre of each cell, positive
/// left to right.
pub fn dual_mass_flux(primal: &[f64]) -> Vec<f64> {
    primal.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect()
}

/// Dual densities per face: volume-weighted on interior faces, the cell
/// value on the boundary.
pub fn dual_density(rho: &[f64]) -> Vec<f64> {
    let n = rho.len();
    (0..=n)
        .map(|j| {
            if j == 0 {
                rho[0]
            } else if j == n {
                rho[n - 1]
            } else {
                0.5 * (rho[j - 1] + rho[j])
            }
        })
        .collect()
}

/// Residual of the dual mass balance on every dual cell.
pub fn dual_balance_residual(
    grid: &StaggeredGrid,
    rho_old: &[f64],
    rho_new: &[f64],
    primal: &[f64],
    dt: f64,
) -> Vec<f64> {
    let n = grid.n_cells;
    let dual = dual_mass_flux(primal);
    let d_old = dual_density(rho_old);
    let d_new = dual_density(rho_new);
    (0..=n)
        .map(|j| {
            let out_right = if j < n { dual[j] } else { 0.0 };
            let in_left = if j > 0 { dual[j - 1] } else { 0.0 };
            grid.dual_volume[j] / dt * (d_new[j] - d_old[j]) + out_right - in_left
        })
        .collect()
}

pub fn cfl_number(grid: &StaggeredGrid, primal: &[f64], rho_next: &[f64], dt: f64) -> f64 {
    (0..grid.n_cells)
        .map(|k| dt / (rho_next[k] * grid.cell_volume(k)) * (primal[k].abs() + primal[k + 1].abs()))
        .fold(0.0, f64::max)
}

pub fn upwind_face_value(y: &[f64], j: usize, flux: f64) -> f64 {
    upwind_with(y, Ghosts::NONE, j, flux)
}

fn upwind_with(y: &[f64], ghosts: Ghosts, j: usize, flux: f64) -> f64 {
    let c = Cells { y, ghosts };
    let (up, down, _) = orient(j, flux);
    c.get(up).or_else(|| c.get(down)).unwrap_or(0.0)
}

pub fn muscl_face_value(y: &[f64], j: usize, fluxes: &[f64], params: &LimiterParams) -> f64 {
    muscl_with(y, Ghosts::NONE, j, fluxes, params)
}

fn muscl_with(y: &[f64], ghosts: Ghosts, j: usize, fluxes: &[f64], params: &LimiterParams) -> f64 {
    let c = Cells { y, ghosts };
    let f = fluxes[j];
    let (up, down, opp) = orient(j, f);
    let (Some(ym), Some(yp)) = (c.get(up), c.get(down)) else {
        return upwind_with(y, ghosts, j, f);
    };
    let m = match params.neighbor_policy {
        NeighborPolicy::OppositeCells => c.get(opp),
        NeighborPolicy::UpstreamCells => {
            // flux through the other face of the upstream cell, oriented into it
            let other = if f >= 0.0 { j as isize - 1 } else { j as isize + 1 };
            let inflow = if other < 0 || other as usize >= fluxes.len() {
                false
            } else if f >= 0.0 {
                fluxes[other as usize] > 0.0
            } else {
                fluxes[other as usize] < 0.0
            };
            if inflow {
                c.get(opp)
            } else {
                None
            }
        }
    };
    let Some(y_m) = m else {
        return ym;
    };
    let tentative = 0.5 * (ym + yp);
    // (H1) with M = V-, (H2) with M the chosen neighbour of V-
    let h1 = ym + 0.5 * params.zeta_plus * (yp - ym);
    let h2 = ym + 0.5 * params.zeta_minus * (ym - y_m);
    let lo = ym.min(h1).max(ym.min(h2));
    let hi = ym.max(h1).min(ym.max(h2));
    if lo > hi {
        return ym;
    }
    tentative.clamp(lo, hi)
}

/// Local Courant numbers of the upstream cell `k` of face `j`.
fn courant_pair(
    j: usize,
    up: isize,
    fluxes: &[f64],
    rho_next: &[f64],
    dt: f64,
    volume: f64,
) -> Option<(f64, f64)> {
    if up < 0 || up as usize >= rho_next.len() {
        return None;
    }
    let k = up as usize;
    let op = if j == k + 1 { k } else { k + 1 };
    let m = dt / (volume * rho_next[k]);
    Some((m * fluxes[j].abs(), m * fluxes[op].abs()))
}

#[allow(clippy::too_many_arguments)]
pub fn antidiffusive_face_value(
    y: &[f64],
    j: usize,
    fluxes: &[f64],
    rho_next: &[f64],
    dt: f64,
    volume: f64,
    params: &LimiterParams,
) -> f64 {
    antidiffusive_with(y, Ghosts::NONE, j, fluxes, rho_next, dt, volume, params)
}

#[allow(clippy::too_many_arguments)]
fn antidiffusive_with(
    y: &[f64],
    ghosts: Ghosts,
    j: usize,
    fluxes: &[f64],
    rho_next: &[f64],
    dt: f64,
    volume: f64,
    params: &LimiterParams,
) -> f64 {
    let c = Cells { y, ghosts };
    let f = fluxes[j];
    let (up, down, opp) = orient(j, f);
    let (Some(yk), Some(yl), Some(ym)) = (c.get(up), c.get(down), c.get(opp)) else {
        return upwind_with(y, ghosts, j, f);
    };
    let Some((nu, nu_op)) = courant_pair(j, up, fluxes, rho_next, dt, volume) else {
        return yk;
    };
    if nu == 0.0 {
        return yk;
    }
    let zeta = ((1.0 - nu_op) / nu).min(params.s_max).max(0.0);
    clamp_between(yl, yk + zeta * (yk - ym), yk)
}

/// Face values for every face; boundary faces without a ghost get the
/// adjacent cell value.
#[allow(clippy::too_many_arguments)]
pub fn face_values(
    grid: &StaggeredGrid,
    y: &[f64],
    ghosts: Ghosts,
    fluxes: &[f64],
    rho_next: &[f64],
    dt: f64,
    params: &LimiterParams,
) -> Vec<f64> {
    (0..grid.n_faces())
        .map(|j| match params.scheme {
            Scheme::Upwind => upwind_with(y, ghosts, j, fluxes[j]),
            Scheme::Muscl => muscl_with(y, ghosts, j, fluxes, params),
            Scheme::AntiDiffusive => {
                antidiffusive_with(y, ghosts, j, fluxes, rho_next, dt, grid.h, params)
            }
        })
        .collect()
}

pub fn convect_divergence(grid: &StaggeredGrid, y_face: &[f64], fluxes: &[f64]) -> Vec<f64> {
    (0..grid.n_cells)
        .map(|k| (fluxes[k + 1] * y_face[k + 1] - fluxes[k] * y_face[k]) / grid.cell_volume(k))
        .collect()
}

/// Explicit transport step `rho_next y_next = rho_old y - dt div(F y_face)`.
#[allow(clippy::too_many_arguments)]
pub fn explicit_update(
    grid: &StaggeredGrid,
    y: &[f64],
    ghosts: Ghosts,
    rho_old: &[f64],
    rho_next: &[f64],
    fluxes: &[f64],
    dt: f64,
    params: &LimiterParams,
) -> Vec<f64> {
    let yf = face_values(grid, y, ghosts, fluxes, rho_next, dt, params);
    let div = convect_divergence(grid, &yf, fluxes);
    (0..grid.n_cells).map(|k| (rho_old[k] * y[k] - dt * div[k]) / rho_next[k]).collect()
}

/// Worst-case coefficient of `y_K` in the convex-combination form of the
/// anti-diffusive update, taking every limiter weight at its bound. A
/// negative value means the update is not certified as a convex combination.
pub fn antidiffusive_worst_coefficient(
    fluxes_out: (f64, f64),
    rho_next: f64,
    volume: f64,
    dt: f64,
    s_max: f64,
) -> f64 {
    // fluxes_out: signed outward fluxes through the two faces of K
    let m = dt / (volume * rho_next);
    let (a, b) = fluxes_out;
    let mut c = 1.0;
    for (f, f_op) in [(a, b), (b, a)] {
        let nu = m * f.abs();
        if f > 0.0 {
            let nu_op = m * f_op.abs();
            let zeta = ((1.0 - nu_op) / nu).min(s_max).max(0.0);
            c -= nu * zeta;
        } else {
            c -= nu;
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_uniform_grid;

    #[test]
    fn flux_examples() {
        assert!(primal_mass_flux(&[1.0, 1.0, 1.0], &[0.0; 4]).iter().all(|&f| f == 0.0));
        let f = primal_mass_flux(&[2.0, 2.0, 2.0], &[0.0, 3.0, 0.0, 0.0]);
        assert_eq!(f[1], 6.0);
        let f = primal_mass_flux(&[1.0, 5.0, 1.0], &[0.0, -1.0, 0.0, 0.0]);
        assert_eq!(f[1], -5.0);
    }

    #[test]
    fn dual_flux_uniform_flow() {
        let d = dual_mass_flux(&[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(d, vec![2.0, 2.0, 2.0]);
        assert!(dual_mass_flux(&[0.0; 5]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cfl_examples() {
        let g = build_uniform_grid(3, 0.0, 3.0).unwrap();
        assert_eq!(cfl_number(&g, &[0.0; 4], &[1.0; 3], 1.0), 0.0);
        let c = cfl_number(&g, &[0.0, 1.0, -1.0, 0.0], &[1.0; 3], 0.25);
        assert_eq!(c, 0.5);
        let c2 = cfl_number(&g, &[0.0, 1.0, -1.0, 0.0], &[1.0; 3], 0.5);
        assert_eq!(c2, 2.0 * c);
    }

    #[test]
    fn upwind_examples() {
        let y = [1.0, 2.0, 3.0];
        assert_eq!(upwind_face_value(&y, 1, 1.0), 1.0);
        assert_eq!(upwind_face_value(&y, 1, -1.0), 2.0);
        assert_eq!(upwind_face_value(&y, 1, 0.0), 1.0);
    }

    #[test]
    fn muscl_examples() {
        let p = LimiterParams::new(Scheme::Muscl);
        let fl = [0.0, 1.0, 1.0, 1.0, 0.0];
        assert_eq!(muscl_face_value(&[0.0, 1.0, 2.0, 3.0], 2, &fl, &p), 1.5);
        assert_eq!(muscl_face_value(&[0.0, 1.0, 0.0, 0.0], 2, &fl, &p), 1.0);
        let mut z = p;
        z.zeta_minus = 0.0;
        z.zeta_plus = 0.0;
        assert_eq!(muscl_face_value(&[0.0, 1.0, 2.0, 3.0], 2, &fl, &z), 1.0);
    }

    #[test]
    fn antidiffusive_examples() {
        let mut p = LimiterParams::new(Scheme::AntiDiffusive);
        p.s_max = 1e9;
        let fl = [0.0, 0.5, 0.5, 0.5, 0.0];
        let rho = [1.0; 4];
        // plateau
        assert_eq!(antidiffusive_face_value(&[1.0, 1.0, 0.0, 0.0], 2, &fl, &rho, 1.0, 1.0, &p), 1.0);
        // transition cell admits the downwind value
        assert_eq!(antidiffusive_face_value(&[1.0, 0.5, 0.0, 0.0], 2, &fl, &rho, 1.0, 1.0, &p), 0.0);
        p.s_max = 0.0;
        assert_eq!(antidiffusive_face_value(&[1.0, 0.5, 0.0, 0.0], 2, &fl, &rho, 1.0, 1.0, &p), 0.5);
    }

    #[test]
    fn divergence_examples() {
        let g = build_uniform_grid(3, 0.0, 3.0).unwrap();
        let d = convect_divergence(&g, &[0.0, 2.0, 0.0, 0.0], &[0.0, 1.5, 0.0, 0.0]);
        assert_eq!(d, vec![3.0, -3.0, 0.0]);
        assert_eq!(convect_divergence(&g, &[1.0; 4], &[0.0; 4]), vec![0.0; 3]);
    }
}
