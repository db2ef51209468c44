//! Exact solution of the deflagration Riemann problem for the asymptotic
//! model: a precursor shock followed by a reactive shock, burnt gas at rest
//! behind it.
//!
//! Across the reactive shock the flame moves at `u** + u_f` and the burnt
//! composition is the equilibrium of the fresh one. Mass and momentum give
//! the burnt state in closed form from `W**`; the precursor shock gives `W**`
//! from `u**`. What remains is the energy jump, one scalar equation in `u**`.

use crate::thermo::{z_from_fractions, MixtureSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactState {
    pub rho: f64,
    pub p: f64,
    pub u: f64,
    pub y: [f64; 4],
    pub g: f64,
}

impl ExactState {
    pub fn e_s(&self, gamma: f64) -> f64 {
        self.p / ((gamma - 1.0) * self.rho)
    }

    pub fn temperature(&self, spec: &MixtureSpec) -> f64 {
        self.p / (self.rho * spec.gas_constant(self.y))
    }

    /// Total energy per unit mass, chemical part included.
    fn total_energy(&self, spec: &MixtureSpec) -> f64 {
        self.e_s(spec.gamma) + spec.chemical_enthalpy(self.y) + 0.5 * self.u * self.u
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WavePattern {
    pub gamma: f64,
    /// Fresh gas at rest, right of the precursor shock.
    pub state_r: ExactState,
    /// Between the two shocks.
    pub state_star_star: ExactState,
    /// Burnt gas, left of the reactive shock.
    pub state_r_star: ExactState,
    pub precursor_speed: f64,
    pub reactive_speed: f64,
    pub flame_speed: f64,
}

/// Scaled Rankine-Hugoniot residuals (mass, momentum, energy) of one wave.
fn jump_residuals(spec: &MixtureSpec, l: &ExactState, r: &ExactState, s: f64) -> [f64; 3] {
    let cons = |w: &ExactState| {
        let e = w.rho * w.total_energy(spec);
        [w.rho, w.rho * w.u, e]
    };
    let flux = |w: &ExactState| {
        let e = w.rho * w.total_energy(spec);
        [w.rho * w.u, w.rho * w.u * w.u + w.p, (e + w.p) * w.u]
    };
    let (cl, cr, fl, fr) = (cons(l), cons(r), flux(l), flux(r));
    let mut out = [0.0; 3];
    for i in 0..3 {
        let terms = [s * cr[i], s * cl[i], fr[i], fl[i]];
        let scale = terms.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let r = s * (cr[i] - cl[i]) - (fr[i] - fl[i]);
        out[i] = if scale > 0.0 { r / scale } else { r };
    }
    out
}

impl WavePattern {
    /// Largest scaled jump residual over both waves.
    pub fn max_jump_residual(&self, spec: &MixtureSpec) -> f64 {
        let a = jump_residuals(spec, &self.state_star_star, &self.state_r, self.precursor_speed);
        let b = jump_residuals(spec, &self.state_r_star, &self.state_star_star, self.reactive_speed);
        a.iter().chain(b.iter()).fold(0.0f64, |m, r| m.max(r.abs()))
    }

    /// Flame prescription: the reactive shock moves at u_f plus the material
    /// velocity on its unburnt side. Returns the absolute mismatch.
    pub fn flame_speed_identity(&self) -> f64 {
        (self.reactive_speed - (self.state_star_star.u + self.flame_speed)).abs()
    }

    /// rho_u u_f, with rho_u the density on the unburnt side of the flame.
    pub fn flame_speed_product(&self) -> f64 {
        self.state_star_star.rho * self.flame_speed
    }

    /// Wave positions (reactive, precursor) at time t.
    pub fn wave_positions(&self, t: f64, x0: f64) -> (f64, f64) {
        (x0 + self.reactive_speed * t, x0 + self.precursor_speed * t)
    }
}

/// Equilibrium composition: identity for G > 0.5, otherwise fuel and oxidant
/// reduced to the part in excess.
pub fn asymptotic_composition(spec: &MixtureSpec, y: [f64; 4], g: f64) -> [f64; 4] {
    if g > 0.5 {
        return y;
    }
    let z = z_from_fractions(spec, y[0], y[1]);
    let y_f = spec.nuw_f() * z.max(0.0);
    let y_o = spec.nuw_o() * (-z).max(0.0);
    [y_f, y_o, y[2], 1.0 - y_f - y_o - y[2]]
}

struct Branch {
    star_star: ExactState,
    star: ExactState,
    s1: f64,
    s2: f64,
}

/// States for a trial post-shock velocity; None outside the admissible range.
fn branch(spec: &MixtureSpec, r: &ExactState, burnt: [f64; 4], u_f: f64, u: f64) -> Option<Branch> {
    let g = spec.gamma;
    let c = (g * r.p / r.rho).sqrt();
    let a = 0.25 * (g + 1.0) * u;
    let s1 = a + (c * c + a * a).sqrt();
    let rho_ss = r.rho * s1 / (s1 - u);
    let p_ss = r.p + r.rho * s1 * u;
    let s2 = u + u_f;
    let rho_s = rho_ss * u_f / s2;
    let p_s = p_ss - rho_ss * u * u_f;
    if !(rho_s > 0.0 && p_s > 0.0 && s2 > 0.0) {
        return None;
    }
    Some(Branch {
        star_star: ExactState { rho: rho_ss, p: p_ss, u, y: r.y, g: 1.0 },
        star: ExactState { rho: rho_s, p: p_s, u: 0.0, y: burnt, g: 0.0 },
        s1,
        s2,
    })
}

/// Energy jump across the reactive shock in the flame frame, relative to the
/// fresh-gas enthalpy.
fn energy_residual(spec: &MixtureSpec, r: &ExactState, b: &Branch, u_f: f64) -> f64 {
    let k = spec.gamma / (spec.gamma - 1.0);
    let fresh = k * b.star_star.p / b.star_star.rho + spec.chemical_enthalpy(b.star_star.y) + 0.5 * u_f * u_f;
    let burnt = k * b.star.p / b.star.rho + spec.chemical_enthalpy(b.star.y) + 0.5 * b.s2 * b.s2;
    (fresh - burnt) / (k * r.p / r.rho)
}

fn trivial(spec: &MixtureSpec, r: ExactState, u_f: f64) -> WavePattern {
    WavePattern {
        gamma: spec.gamma,
        state_r: r,
        state_star_star: r,
        state_r_star: r,
        precursor_speed: 0.0,
        reactive_speed: 0.0,
        flame_speed: u_f,
    }
}

/// Solves for the three-state pattern with the left wall at rest.
pub fn solve_deflagration_riemann(spec: &MixtureSpec, right: ExactState, u_f: f64) -> Result<WavePattern> {
    if !(right.rho > 0.0 && right.p > 0.0) || right.u != 0.0 {
        return Err(Error::Oracle("right state must have rho, p > 0 and u = 0".into()));
    }
    if (right.y.iter().sum::<f64>() - 1.0).abs() > 1e-12 || right.y.iter().any(|&v| v < 0.0) {
        return Err(Error::Oracle("right-state mass fractions must lie in [0,1] and sum to 1".into()));
    }
    if !(u_f >= 0.0) {
        return Err(Error::Oracle(format!("flame speed {u_f} must be non-negative")));
    }
    let right = ExactState { g: 1.0, ..right };
    let burnt = asymptotic_composition(spec, right.y, 0.0);
    if u_f == 0.0 {
        return Ok(trivial(spec, right, u_f));
    }
    let f = |u: f64| branch(spec, &right, burnt, u_f, u).map(|b| energy_residual(spec, &right, &b, u_f));
    let f0 = f(0.0).ok_or_else(|| Error::Oracle("inadmissible state at zero velocity".into()))?;
    let finish = |u: f64| -> Result<WavePattern> {
        let b = branch(spec, &right, burnt, u_f, u)
            .ok_or_else(|| Error::Oracle(format!("inadmissible root u** = {u}")))?;
        Ok(WavePattern {
            gamma: spec.gamma,
            state_r: right,
            state_star_star: b.star_star,
            state_r_star: b.star,
            precursor_speed: b.s1,
            reactive_speed: b.s2,
            flame_speed: u_f,
        })
    };
    if f0 == 0.0 {
        return finish(0.0);
    }
    if f0 < 0.0 {
        return Err(Error::Oracle(format!(
            "no deflagration branch: energy residual {f0:e} at u** = 0 (endothermic)"
        )));
    }
    // bracket: expand until the residual changes sign or the branch ends
    let c = (spec.gamma * right.p / right.rho).sqrt();
    let (mut lo, mut hi) = (0.0, 0.1 * c);
    loop {
        match f(hi) {
            Some(v) if v < 0.0 => break,
            Some(_) => {
                lo = hi;
                hi *= 2.0;
                if hi > 1e3 * c {
                    return Err(Error::Oracle(format!("no sign change of the energy residual up to u** = {hi}")));
                }
            }
            None => {
                // shrink towards lo until admissible
                let mut t = hi;
                let mut found = false;
                for _ in 0..200 {
                    t = 0.5 * (lo + t);
                    match f(t) {
                        Some(v) if v < 0.0 => {
                            found = true;
                            break;
                        }
                        Some(_) => lo = t,
                        None => {}
                    }
                }
                if !found {
                    return Err(Error::Oracle(format!(
                        "branch ends before the residual changes sign; bracket [{lo}, {t}]"
                    )));
                }
                hi = t;
                break;
            }
        }
    }
    // safeguarded Newton inside [lo, hi], f(lo) > 0 > f(hi)
    let mut u = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fu = f(u).ok_or_else(|| Error::Oracle(format!("inadmissible iterate {u}")))?;
        if fu > 0.0 {
            lo = u;
        } else {
            hi = u;
        }
        if fu.abs() < 1e-15 || (hi - lo) <= 4.0 * f64::EPSILON * hi {
            return finish(u);
        }
        let du = 1e-7 * u.max(1.0);
        let d = match (f(u + du), f(u - du)) {
            (Some(a), Some(b)) => (a - b) / (2.0 * du),
            _ => 0.0,
        };
        let newton = if d != 0.0 { u - fu / d } else { f64::NAN };
        u = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Err(Error::Oracle(format!("Newton on u** did not converge; bracket [{lo}, {hi}]")))
}

/// Pointwise state at (x, t); the flame started at x0 at t = 0.
pub fn sample_solution(pattern: &WavePattern, x: f64, t: f64, x0: f64) -> ExactState {
    let (xr, xp) = pattern.wave_positions(t, x0);
    if x < xr {
        pattern.state_r_star
    } else if x < xp {
        pattern.state_star_star
    } else {
        pattern.state_r
    }
}

/// Exact average of `f(state)` over [a, b], splitting at the wave positions.
pub fn interval_average<F>(pattern: &WavePattern, a: f64, b: f64, t: f64, x0: f64, f: F) -> f64
where
    F: Fn(&ExactState) -> f64,
{
    let (xr, xp) = pattern.wave_positions(t, x0);
    let seg = |lo: f64, hi: f64| (hi.min(b) - lo.max(a)).max(0.0);
    let l1 = seg(f64::NEG_INFINITY, xr);
    let l2 = seg(xr, xp);
    let l3 = seg(xp, f64::INFINITY);
    (l1 * f(&pattern.state_r_star) + l2 * f(&pattern.state_star_star) + l3 * f(&pattern.state_r)) / (b - a)
}

/// The benchmark fresh mixture: 2 H2 + O2 + 4 N2 at 9.9e4 Pa and 283 K.
pub fn benchmark_right_state(spec: &MixtureSpec) -> ExactState {
    let y = spec.mass_fractions([2.0 / 7.0, 1.0 / 7.0, 4.0 / 7.0, 0.0]);
    let p = 9.9e4;
    let rho = p / (spec.gas_constant(y) * 283.0);
    ExactState { rho, p, u: 0.0, y, g: 1.0 }
}

pub const BENCHMARK_FLAME_SPEED: f64 = 63.0;
