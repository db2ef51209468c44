//! CSV emission. Every file starts with `#` lines holding the resolved
//! configuration, then a header row; floats are written with 17 significant
//! digits.

use std::io::Write;

use crate::grid::StaggeredGrid;
use crate::harness::config::CaseConfig;
use crate::harness::run::Diagnostics;
use crate::harness::study::{ConvergenceReport, VARIABLES};
use crate::oracle::{sample_solution, WavePattern};
use crate::thermo::{FieldState, MixtureSpec};
use crate::{Error, Result};

pub const PROFILE_COLUMNS: [&str; 13] =
    ["x_center", "rho", "p", "u_face_interp", "T", "e_s", "h_s", "y_F", "y_O", "y_N", "y_P", "z", "G"];

pub const DIAGNOSTIC_COLUMNS: [&str; 10] = [
    "step",
    "t",
    "dt",
    "cfl",
    "E_total",
    "energy_drift",
    "mass_total",
    "newton_iterations",
    "correction_residual",
    "internal_energy_residual",
];

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn header<W: Write>(w: &mut W, cfg: &CaseConfig, extra: &[String]) -> Result<()> {
    for line in cfg.to_toml().lines() {
        writeln!(w, "# {line}")?;
    }
    for line in extra {
        writeln!(w, "# {line}")?;
    }
    Ok(())
}

fn rows<W: Write>(w: W, columns: &[&str], data: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(columns).map_err(csv_err)?;
    for r in data {
        wr.write_record(&r).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(
    mut w: W,
    cfg: &CaseConfig,
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    s: &FieldState,
) -> Result<()> {
    header(&mut w, cfg, &[format!("t = {}", num(s.t))])?;
    let data = (0..grid.n_cells).map(|k| {
        let u = 0.5 * (s.u[k] + s.u[k + 1]);
        [
            grid.cell_centers[k],
            s.rho[k],
            s.p[k],
            u,
            s.temperature(spec, k),
            s.e_s[k],
            s.h_s[k],
            s.y_f[k],
            s.y_o[k],
            s.y_n[k],
            s.y_p[k],
            s.z[k],
            s.g[k],
        ]
        .iter()
        .map(|&v| num(v))
        .collect()
    });
    rows(w, &PROFILE_COLUMNS, data)
}

/// Exact solution sampled at the cell centres of `grid`.
pub fn write_exact_profile<W: Write>(
    mut w: W,
    cfg: &CaseConfig,
    grid: &StaggeredGrid,
    spec: &MixtureSpec,
    pat: &WavePattern,
    t: f64,
) -> Result<()> {
    let extra = [
        format!("t = {}", num(t)),
        format!("precursor_speed = {}", num(pat.precursor_speed)),
        format!("reactive_speed = {}", num(pat.reactive_speed)),
        format!("jump_residual = {}", num(pat.max_jump_residual(spec))),
    ];
    header(&mut w, cfg, &extra)?;
    let g = spec.gamma;
    let data = grid.cell_centers.iter().map(|&x| {
        let st = sample_solution(pat, x, t, cfg.x0);
        let e = st.e_s(g);
        let z = crate::thermo::z_from_fractions(spec, st.y[0], st.y[1]);
        [x, st.rho, st.p, st.u, st.temperature(spec), e, g * e, st.y[0], st.y[1], st.y[2], st.y[3], z, st.g]
            .iter()
            .map(|&v| num(v))
            .collect()
    });
    rows(w, &PROFILE_COLUMNS, data)
}

pub fn write_diagnostics<W: Write>(mut w: W, cfg: &CaseConfig, diags: &[Diagnostics]) -> Result<()> {
    header(&mut w, cfg, &[])?;
    let data = diags.iter().map(|d| {
        vec![
            d.step.to_string(),
            num(d.t),
            num(d.dt),
            num(d.cfl),
            num(d.energy),
            num(d.energy_drift),
            num(d.mass),
            d.newton_iterations.to_string(),
            num(d.correction_residual),
            num(d.internal_energy_residual),
        ]
    });
    rows(w, &DIAGNOSTIC_COLUMNS, data)
}

pub fn write_report<W: Write>(mut w: W, cfg: &CaseConfig, rep: &ConvergenceReport) -> Result<()> {
    let mut extra = vec![
        format!("scheme = {}", rep.scheme),
        format!("cfl = {}", num(rep.cfl)),
        format!("gamma = {}", num(rep.gamma)),
        format!("epsilon_per_h = {}", num(rep.epsilon_per_h)),
    ];
    for (i, v) in VARIABLES.iter().enumerate() {
        extra.push(format!("fitted_order_{v} = {}", num(rep.fitted[i])));
    }
    for (n, msg) in &rep.failures {
        extra.push(format!("failed n_cells = {n}: {msg}"));
    }
    header(&mut w, cfg, &extra)?;
    let mut cols = vec!["n_cells", "h", "epsilon", "dt", "steps", "wall_seconds", "burnt_zone_distance"];
    let names: Vec<String> = VARIABLES.iter().map(|v| format!("l1_{v}")).collect();
    cols.extend(names.iter().map(|s| s.as_str()));
    let data = rep.meshes.iter().map(|m| {
        let mut r = vec![
            m.n_cells.to_string(),
            num(m.h),
            num(m.epsilon),
            num(m.dt),
            m.steps.to_string(),
            format!("{:.3}", m.wall_seconds),
            num(m.burnt_zone_distance),
        ];
        r.extend(m.errors.iter().map(|&e| num(e)));
        r
    });
    rows(w, &cols, data)
}
