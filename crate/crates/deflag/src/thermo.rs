//! Mixture data, equation of state and the fuel/oxidant reduced variable `z`.

use crate::{Error, Result};

pub const R_UNIVERSAL: f64 = 8.314462618;

/// Species order used in the small fixed-size arrays below.
pub const F: usize = 0;
pub const O: usize = 1;
pub const N: usize = 2;
pub const P: usize = 3;

/// One-step reaction nu_F F + nu_O O -> nu_P P with an inert N.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    pub nu_f: f64,
    pub nu_o: f64,
    pub nu_p: f64,
    /// Molar masses (kg/mol), order F, O, N, P.
    pub w: [f64; 4],
    /// Formation enthalpies (J/kg), order F, O, N, P.
    pub dh: [f64; 4],
    pub gamma: f64,
    /// Reaction signs, order F, O, N, P.
    pub zeta: [f64; 4],
}

impl MixtureSpec {
    pub fn new(nu_f: f64, nu_o: f64, nu_p: f64, w: [f64; 4], dh: [f64; 4], gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Config(format!("gamma = {gamma} must exceed 1")));
        }
        if w.iter().any(|&x| !(x > 0.0)) || !(nu_f > 0.0 && nu_o > 0.0 && nu_p > 0.0) {
            return Err(Error::Config("molar masses and coefficients must be positive".into()));
        }
        let lhs = nu_f * w[F] + nu_o * w[O];
        let rhs = nu_p * w[P];
        if ((lhs - rhs) / rhs).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "reaction does not conserve mass: {lhs} vs {rhs}"
            )));
        }
        Ok(MixtureSpec { nu_f, nu_o, nu_p, w, dh, gamma, zeta: [-1.0, -1.0, 0.0, 1.0] })
    }

    /// 2 H2 + O2 -> 2 H2O diluted in N2; only steam has a formation enthalpy.
    pub fn hydrogen_air(gamma: f64) -> Result<Self> {
        Self::new(
            2.0,
            1.0,
            2.0,
            [2.016e-3, 31.998e-3, 28.014e-3, 18.015e-3],
            [0.0, 0.0, 0.0, -13.255e6],
            gamma,
        )
    }

    pub fn nuw_f(&self) -> f64 {
        self.nu_f * self.w[F]
    }

    pub fn nuw_o(&self) -> f64 {
        self.nu_o * self.w[O]
    }

    pub fn nuw_p(&self) -> f64 {
        self.nu_p * self.w[P]
    }

    /// Per-species mass source per unit reaction rate: zeta_i nu_i W_i.
    pub fn mass_yield(&self) -> [f64; 4] {
        [-self.nuw_f(), -self.nuw_o(), 0.0, self.nuw_p()]
    }

    /// Sum of dh_i y_i.
    pub fn chemical_enthalpy(&self, y: [f64; 4]) -> f64 {
        (0..4).map(|i| self.dh[i] * y[i]).sum()
    }

    /// R / W_mix for the mass fractions `y`.
    pub fn gas_constant(&self, y: [f64; 4]) -> f64 {
        R_UNIVERSAL * (0..4).map(|i| y[i] / self.w[i]).sum::<f64>()
    }

    /// Mass fractions from molar fractions.
    pub fn mass_fractions(&self, x: [f64; 4]) -> [f64; 4] {
        let wm: f64 = (0..4).map(|i| x[i] * self.w[i]).sum();
        [0, 1, 2, 3].map(|i| x[i] * self.w[i] / wm)
    }
}

pub fn pressure_from_state(gamma: f64, rho: f64, e_s: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::State(format!("non-positive density {rho}")));
    }
    Ok((gamma - 1.0) * rho * e_s)
}

/// Enthalpy form p = ((gamma-1)/gamma) rho h_s.
pub fn pressure_from_enthalpy(gamma: f64, rho: f64, h_s: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::State(format!("non-positive density {rho}")));
    }
    Ok((gamma - 1.0) / gamma * rho * h_s)
}

pub fn e_s_from(gamma: f64, p: f64, rho: f64) -> f64 {
    p / ((gamma - 1.0) * rho)
}

pub fn sensible_enthalpy(gamma: f64, e_s: f64) -> f64 {
    gamma * e_s
}

pub fn z_from_fractions(spec: &MixtureSpec, y_f: f64, y_o: f64) -> f64 {
    y_f / spec.nuw_f() - y_o / spec.nuw_o()
}

pub fn y_o_from_z(spec: &MixtureSpec, y_f: f64, z: f64) -> f64 {
    spec.nuw_o() * (y_f / spec.nuw_f() - z)
}

/// Heat released per unit reaction rate (J/mol of reaction).
pub fn reaction_heat_coefficient(spec: &MixtureSpec) -> f64 {
    spec.nuw_f() * spec.dh[F] + spec.nuw_o() * spec.dh[O] - spec.nuw_p() * spec.dh[P]
}

pub fn temperature(spec: &MixtureSpec, e_s: f64, r_mix: f64) -> f64 {
    (spec.gamma - 1.0) * e_s / r_mix
}

/// Snapshot of the unknowns at level n, with the density at level n-1 and
/// the mass fluxes that carried it from n-1 to n.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub rho: Vec<f64>,
    pub rho_prev: Vec<f64>,
    pub p: Vec<f64>,
    pub h_s: Vec<f64>,
    pub e_s: Vec<f64>,
    pub y_f: Vec<f64>,
    pub y_o: Vec<f64>,
    pub y_n: Vec<f64>,
    pub y_p: Vec<f64>,
    pub z: Vec<f64>,
    pub g: Vec<f64>,
    /// Face velocities, zero on the two boundary faces.
    pub u: Vec<f64>,
    /// Face mass fluxes F^n, left-to-right orientation.
    pub flux: Vec<f64>,
}

impl FieldState {
    pub fn n_cells(&self) -> usize {
        self.rho.len()
    }

    pub fn y(&self, k: usize) -> [f64; 4] {
        [self.y_f[k], self.y_o[k], self.y_n[k], self.y_p[k]]
    }

    pub fn temperature(&self, spec: &MixtureSpec, k: usize) -> f64 {
        temperature(spec, self.e_s[k], spec.gas_constant(self.y(k)))
    }

    /// Checks positivity, unit sum, bounds and the EOS.
    pub fn check(&self, spec: &MixtureSpec, tol: f64) -> Result<()> {
        let n = self.n_cells();
        for k in 0..n {
            if !(self.rho[k] > 0.0) || !(self.rho_prev[k] > 0.0) {
                return Err(Error::State(format!("density {} at cell {k}", self.rho[k])));
            }
            if !(self.e_s[k] > 0.0) {
                return Err(Error::State(format!("sensible energy {} at cell {k}", self.e_s[k])));
            }
            let y = self.y(k);
            let s: f64 = y.iter().sum();
            if (s - 1.0).abs() > tol {
                return Err(Error::State(format!("mass fractions sum to {s} at cell {k}")));
            }
            for (i, &v) in y.iter().enumerate() {
                if v < -tol || v > 1.0 + tol {
                    return Err(Error::State(format!("y[{i}] = {v} at cell {k}")));
                }
            }
            if self.g[k] < -tol || self.g[k] > 1.0 + tol {
                return Err(Error::State(format!("G = {} at cell {k}", self.g[k])));
            }
            let p = (spec.gamma - 1.0) * self.rho[k] * self.e_s[k];
            if (p - self.p[k]).abs() > 1e-12 * self.p[k].abs().max(1e-300) {
                return Err(Error::State(format!("EOS mismatch at cell {k}")));
            }
        }
        if self.u[0] != 0.0 || self.u[n] != 0.0 {
            return Err(Error::State("non-zero boundary velocity".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> MixtureSpec {
        MixtureSpec::hydrogen_air(1.4).unwrap()
    }

    #[test]
    fn eos_examples() {
        assert!((pressure_from_state(1.4, 1.0, 1.0).unwrap() - 0.4).abs() < 4e-16);
        assert_eq!(pressure_from_state(1.4, 2.0, 0.0).unwrap(), 0.0);
        assert!(pressure_from_state(1.4, 0.0, 1.0).is_err());
        let p = 1.234e5;
        let rho = 0.77;
        let back = pressure_from_state(1.4, rho, e_s_from(1.4, p, rho)).unwrap();
        assert!(((back - p) / p).abs() < 1e-15);
        assert!((sensible_enthalpy(1.4, 1.0) - 1.4).abs() < 1e-16);
        assert_eq!(sensible_enthalpy(1.4, 0.0), 0.0);
    }

    #[test]
    fn z_examples() {
        let s = spec();
        assert_eq!(z_from_fractions(&s, 0.1 * s.nuw_f(), 0.1 * s.nuw_o()), 0.0);
        assert_eq!(z_from_fractions(&s, s.nuw_f(), 0.0), 1.0);
        assert_eq!(y_o_from_z(&s, 0.0, 0.0), 0.0);
        assert_eq!(y_o_from_z(&s, s.nuw_f(), 1.0), 0.0);
        assert!((y_o_from_z(&s, s.nuw_f(), 0.0) - s.nuw_o()).abs() < 1e-18);
    }

    #[test]
    fn heat_coefficient() {
        let mut s = spec();
        assert!(reaction_heat_coefficient(&s) > 0.0);
        let expected = -s.nuw_p() * s.dh[P];
        assert_eq!(reaction_heat_coefficient(&s), expected);
        s.dh = [0.0; 4];
        assert_eq!(reaction_heat_coefficient(&s), 0.0);
    }

    #[test]
    fn rejects_bad_mixture() {
        assert!(MixtureSpec::hydrogen_air(1.0).is_err());
        assert!(MixtureSpec::new(2.0, 1.0, 1.0, [2e-3, 32e-3, 28e-3, 18e-3], [0.0; 4], 1.4).is_err());
    }

    #[test]
    fn benchmark_temperature_round_trip() {
        let s = spec();
        let y = s.mass_fractions([2.0 / 7.0, 1.0 / 7.0, 4.0 / 7.0, 0.0]);
        let r = s.gas_constant(y);
        let rho = 9.9e4 / (r * 283.0);
        let e = e_s_from(s.gamma, 9.9e4, rho);
        let t = temperature(&s, e, r);
        assert!(((t - 283.0) / 283.0).abs() < 1e-10);
        assert_eq!(temperature(&s, 0.0, r), 0.0);
        assert!((temperature(&s, 2.0 * e, r) - 2.0 * t).abs() < 1e-12);
    }
}
