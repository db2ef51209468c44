//! Flat key-value case configuration (TOML syntax, `#` comments).

use serde::{Deserialize, Serialize};

use crate::chemistry::{ChemStepConfig, TimeMode};
use crate::hydro::CorrectionSolveConfig;
use crate::thermo::MixtureSpec;
use crate::transport::{LimiterParams, NeighborPolicy, Scheme};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CaseConfig {
    pub n_cells: usize,
    pub x_left: f64,
    pub x_right: f64,
    /// Position of the flame at t = 0.
    pub x0: f64,
    pub t_start: f64,
    pub t_end: f64,

    pub gamma: f64,
    /// Fresh gas: pressure (Pa), temperature (K), molar fractions of F, O, N.
    pub p_fresh: f64,
    pub t_fresh: f64,
    pub x_fuel: f64,
    pub x_oxidant: f64,
    pub x_neutral: f64,
    /// Molar masses (kg/mol) and formation enthalpies (J/kg), order F, O, N, P.
    pub w_fuel: f64,
    pub w_oxidant: f64,
    pub w_neutral: f64,
    pub w_product: f64,
    pub dh_fuel: f64,
    pub dh_oxidant: f64,
    pub dh_neutral: f64,
    pub dh_product: f64,
    pub nu_fuel: f64,
    pub nu_oxidant: f64,
    pub nu_product: f64,
    /// Turbulent flame speed u_f (m/s).
    pub flame_speed: f64,

    /// "upwind", "muscl" or "antidiffusive".
    pub scheme: String,
    /// "implicit" (upwind faces at n+1) or "explicit" (limited faces at n).
    /// Empty selects implicit for upwind and explicit otherwise.
    pub time_mode: String,
    pub zeta_minus: f64,
    pub zeta_plus: f64,
    /// "opposite" or "upstream".
    pub neighbor_policy: String,
    pub s_max: f64,

    /// epsilon = epsilon_per_h * h when positive, else `epsilon`.
    pub epsilon_per_h: f64,
    pub epsilon: f64,
    /// Time step from the initial mass fluxes at this CFL, unless dt > 0.
    pub cfl: f64,
    pub dt: f64,

    pub nonlinear_tol: f64,
    pub max_iterations: usize,
    pub under_relaxation: f64,
    /// Gate on |E^n - E^0| / |E^0|.
    pub energy_tol: f64,
    pub bounds_tol: f64,

    /// "riemann_oracle" or "uniform".
    pub init: String,
    /// Profile output every this many steps; 0 writes the final profile only.
    pub output_every: usize,
}

impl Default for CaseConfig {
    fn default() -> Self {
        CaseConfig {
            n_cells: 250,
            x_left: 0.0,
            x_right: 4.5,
            x0: 0.0,
            t_start: 0.002,
            t_end: 0.005,
            gamma: 1.4,
            p_fresh: 9.9e4,
            t_fresh: 283.0,
            x_fuel: 2.0 / 7.0,
            x_oxidant: 1.0 / 7.0,
            x_neutral: 4.0 / 7.0,
            w_fuel: 2.016e-3,
            w_oxidant: 31.998e-3,
            w_neutral: 28.014e-3,
            w_product: 18.015e-3,
            dh_fuel: 0.0,
            dh_oxidant: 0.0,
            dh_neutral: 0.0,
            dh_product: -13.255e6,
            nu_fuel: 2.0,
            nu_oxidant: 1.0,
            nu_product: 2.0,
            flame_speed: 63.0,
            scheme: "upwind".into(),
            time_mode: String::new(),
            zeta_minus: 1.0,
            zeta_plus: 1.0,
            neighbor_policy: "opposite".into(),
            s_max: 2.0,
            epsilon_per_h: 1e-2,
            epsilon: 0.0,
            cfl: 0.9,
            dt: 0.0,
            nonlinear_tol: 1e-12,
            max_iterations: 100,
            under_relaxation: 1.0,
            energy_tol: 1e-8,
            bounds_tol: 1e-10,
            init: "riemann_oracle".into(),
            output_every: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    RiemannOracle,
    Uniform,
}

impl CaseConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: CaseConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    /// Applies `key=value` overrides; values use TOML syntax, bare words are
    /// taken as strings.
    pub fn with_overrides<S: AsRef<str>>(&self, sets: &[S]) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(&self.to_toml()).map_err(|e| Error::Config(e.to_string()))?;
        for s in sets {
            let s = s.as_ref();
            let (k, v) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))?;
            let k = k.trim();
            if !table.contains_key(k) {
                return Err(Error::Config(format!("unknown key `{k}`")));
            }
            let v = v.trim();
            let value = match toml::from_str::<toml::Table>(&format!("v = {v}")) {
                Ok(mut t) => t.remove("v").expect("parsed key"),
                Err(_) => toml::Value::String(v.to_string()),
            };
            // integers given for float keys are fine
            let value = match (&table[k], value) {
                (toml::Value::Float(_), toml::Value::Integer(i)) => toml::Value::Float(i as f64),
                (_, v) => v,
            };
            table.insert(k.to_string(), value);
        }
        let cfg: CaseConfig = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n_cells < 3 {
            return bad(format!("n_cells = {} is below 3", self.n_cells));
        }
        if !(self.x_right > self.x_left) {
            return bad("x_right must exceed x_left".into());
        }
        if !(self.t_end > self.t_start) || self.t_start < 0.0 {
            return bad("need 0 <= t_start < t_end".into());
        }
        if !(self.p_fresh > 0.0 && self.t_fresh > 0.0) {
            return bad("fresh pressure and temperature must be positive".into());
        }
        if !(self.flame_speed >= 0.0) {
            return bad("flame_speed must be non-negative".into());
        }
        if !(self.dt > 0.0) && !(self.cfl > 0.0) {
            return bad("set cfl > 0 or dt > 0".into());
        }
        if self.time_mode()? == TimeMode::ExplicitLimited && !(self.cfl > 0.0 && self.cfl <= 1.0) && !(self.dt > 0.0) {
            return bad(format!("cfl = {} must lie in (0, 1] in explicit mode", self.cfl));
        }
        if !(self.epsilon_per_h > 0.0) && !(self.epsilon > 0.0) {
            return bad("set epsilon_per_h > 0 or epsilon > 0".into());
        }
        self.init_mode()?;
        self.mixture()?;
        self.limiter()?.validate()?;
        self.correction()?.validate()?;
        Ok(())
    }

    pub fn mixture(&self) -> Result<MixtureSpec> {
        MixtureSpec::new(
            self.nu_fuel,
            self.nu_oxidant,
            self.nu_product,
            [self.w_fuel, self.w_oxidant, self.w_neutral, self.w_product],
            [self.dh_fuel, self.dh_oxidant, self.dh_neutral, self.dh_product],
            self.gamma,
        )
    }

    pub fn scheme(&self) -> Result<Scheme> {
        match self.scheme.as_str() {
            "upwind" => Ok(Scheme::Upwind),
            "muscl" => Ok(Scheme::Muscl),
            "antidiffusive" => Ok(Scheme::AntiDiffusive),
            s => Err(Error::Config(format!("unknown scheme `{s}`"))),
        }
    }

    pub fn time_mode(&self) -> Result<TimeMode> {
        match self.time_mode.as_str() {
            "implicit" => Ok(TimeMode::ImplicitUpwind),
            "explicit" => Ok(TimeMode::ExplicitLimited),
            "" => Ok(if self.scheme()? == Scheme::Upwind {
                TimeMode::ImplicitUpwind
            } else {
                TimeMode::ExplicitLimited
            }),
            s => Err(Error::Config(format!("unknown time_mode `{s}`"))),
        }
    }

    pub fn limiter(&self) -> Result<LimiterParams> {
        let neighbor_policy = match self.neighbor_policy.as_str() {
            "opposite" => NeighborPolicy::OppositeCells,
            "upstream" => NeighborPolicy::UpstreamCells,
            s => return Err(Error::Config(format!("unknown neighbor_policy `{s}`"))),
        };
        Ok(LimiterParams {
            scheme: self.scheme()?,
            zeta_minus: self.zeta_minus,
            zeta_plus: self.zeta_plus,
            neighbor_policy,
            s_max: self.s_max,
        })
    }

    pub fn init_mode(&self) -> Result<InitMode> {
        match self.init.as_str() {
            "riemann_oracle" => Ok(InitMode::RiemannOracle),
            "uniform" => Ok(InitMode::Uniform),
            s => Err(Error::Config(format!("unknown init `{s}`"))),
        }
    }

    pub fn h(&self) -> f64 {
        (self.x_right - self.x_left) / self.n_cells as f64
    }

    pub fn epsilon_value(&self) -> f64 {
        if self.epsilon_per_h > 0.0 {
            self.epsilon_per_h * self.h()
        } else {
            self.epsilon
        }
    }

    pub fn chemistry(&self, flame_speed_product: f64) -> Result<ChemStepConfig> {
        let c = ChemStepConfig {
            epsilon: self.epsilon_value(),
            epsilon_per_h: (self.epsilon_per_h > 0.0).then_some(self.epsilon_per_h),
            flame_speed_product,
            time_mode: self.time_mode()?,
            limiter: self.limiter()?,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn correction(&self) -> Result<CorrectionSolveConfig> {
        Ok(CorrectionSolveConfig {
            nonlinear_tol: self.nonlinear_tol,
            max_iterations: self.max_iterations,
            under_relaxation: self.under_relaxation,
        })
    }
}
