//! CSV tables, the flat JSON manifest and the text report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use super::config::{oh_masses, Temperatures};
use super::{ScenarioResult, TemperatureResult};
use crate::error::Result;
use crate::model::{units, Potential};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn table(t: &TemperatureResult, field: impl Fn(&super::ColumnData, usize) -> f64) -> Option<String> {
    let grid = t.grid?;
    let mut s = String::from("x");
    for c in &t.columns {
        s.push(',');
        s.push_str(c.column.key());
    }
    s.push('\n');
    for i in 0..grid.len() {
        s.push_str(&num(grid.x(i)));
        for c in &t.columns {
            s.push(',');
            s.push_str(&num(field(c, i)));
        }
        s.push('\n');
    }
    Some(s)
}

/// Density table: `x` then one column per method in fixed order.
pub fn density_csv(t: &TemperatureResult) -> Option<String> {
    table(t, |c, i| c.profile.values()[i])
}

pub fn potential_csv(t: &TemperatureResult) -> Option<String> {
    table(t, |c, i| c.v_eff[i])
}

pub fn sample_csv(t: &TemperatureResult) -> Option<String> {
    let (grid, s) = (t.grid?, t.sampler.as_ref()?);
    let quad = t.column(s.method.into())?;
    let mut out = String::from("x,quadrature,histogram\n");
    for i in 0..grid.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            num(grid.x(i)),
            num(quad.profile.values()[i]),
            num(s.histogram.values()[i])
        );
    }
    Some(out)
}

fn potential_entries(m: &mut BTreeMap<String, Value>, p: &str, potential: &Potential) {
    m.insert(format!("{p}.potential"), json!(potential.name()));
    match potential {
        Potential::HarmonicQuartic { mass, omega, g } | Potential::DoubleWell { mass, omega, g } => {
            m.insert(format!("{p}.potential.mass"), json!(mass));
            m.insert(format!("{p}.potential.omega"), json!(omega));
            m.insert(format!("{p}.potential.g"), json!(g));
        }
        Potential::Morse { d, alpha, x_e } => {
            m.insert(format!("{p}.potential.d"), json!(d));
            m.insert(format!("{p}.potential.alpha"), json!(alpha));
            m.insert(format!("{p}.potential.x_e"), json!(x_e));
        }
        Potential::MonomialSum { coefficients } => {
            m.insert(format!("{p}.potential.coefficients"), json!(coefficients));
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

/// Flat metadata: units, conventions, per-temperature files and, when the
/// exact density was computed, the comparison block.
pub fn manifest(results: &[ScenarioResult], preset: Option<&str>) -> BTreeMap<String, Value> {
    let mut m = BTreeMap::new();
    m.insert("tool".into(), json!("qepot"));
    m.insert("tool_version".into(), json!(TOOL_VERSION));
    if let Some(p) = preset {
        m.insert("preset".into(), json!(p));
    }
    m.insert("units.energy".into(), json!("hartree"));
    m.insert("units.length".into(), json!("bohr"));
    m.insert("units.mass".into(), json!("electron mass"));
    m.insert("units.temperature".into(), json!("kelvin"));
    m.insert("units.hbar".into(), json!(1.0));
    m.insert("units.cm1_per_hartree".into(), json!(units::CM1_PER_HARTREE));
    m.insert("units.angstrom_per_bohr".into(), json!(units::ANGSTROM_PER_BOHR));
    m.insert("units.me_per_amu".into(), json!(units::ME_PER_AMU));
    m.insert("units.kb_hartree_per_k".into(), json!(units::KB_HARTREE_PER_K));
    m.insert("csv.float_format".into(), json!("17 significant digits"));

    let mut ok = true;
    for r in results {
        let c = &r.config;
        let p = c.name.clone();
        potential_entries(&mut m, &p, &c.potential);
        m.insert(format!("{p}.mass"), json!(c.mass));
        if let Some(s) = c.spectroscopy {
            m.insert(format!("{p}.spectroscopy.omega_e_cm1"), json!(s.omega_e_cm1));
            m.insert(
                format!("{p}.spectroscopy.omega_e_chi_e_cm1"),
                json!(s.omega_e_chi_e_cm1),
            );
            m.insert(format!("{p}.spectroscopy.x_e_angstrom"), json!(s.x_e_angstrom));
            m.insert(format!("{p}.spectroscopy.reduced_mass_amu"), json!(s.reduced_mass_amu));
            if s.reduced_mass_amu == units::oh_reduced_mass_amu() {
                for (k, v) in oh_masses() {
                    m.insert(format!("{p}.oh.{k}"), json!(v));
                }
            }
        }
        let (kind, temps) = match &c.temperatures {
            Temperatures::Beta(v) => ("beta", v),
            Temperatures::Kelvin(v) => ("kelvin", v),
        };
        m.insert(format!("{p}.temperatures.{kind}"), json!(list(temps)));
        m.insert(
            format!("{p}.methods"),
            json!(c.columns.iter().map(|c| c.key()).collect::<Vec<_>>().join(", ")),
        );
        m.insert(format!("{p}.fh_a2_convention"), json!(c.options.fh_convention.name()));
        match c.options.policy {
            crate::effective::CurvaturePolicy::ClampToZero => {
                m.insert(format!("{p}.policy"), json!("clamp"));
            }
            crate::effective::CurvaturePolicy::ContinuationCapped { cap } => {
                m.insert(format!("{p}.policy"), json!("continuation"));
                m.insert(format!("{p}.policy.cap"), json!(cap));
            }
        }
        match c.grid.window {
            Some(_) => m.insert(format!("{p}.grid.mode"), json!("fixed")),
            None => m.insert(format!("{p}.grid.coverage"), json!(c.grid.coverage)),
        };
        if let Some(s) = c.sampler {
            m.insert(format!("{p}.sampler.method"), json!(s.method.key()));
            m.insert(format!("{p}.sampler.seed"), json!(s.chain.seed));
            m.insert(format!("{p}.sampler.seed_scheme"), json!("chain i uses seed + i"));
            m.insert(format!("{p}.sampler.n_steps"), json!(s.chain.n_steps));
            m.insert(format!("{p}.sampler.burn_in"), json!(s.chain.burn_in));
            m.insert(format!("{p}.sampler.n_chains"), json!(s.chain.n_chains));
            m.insert(format!("{p}.sampler.step_size"), json!(s.chain.step_size));
        }
        for (k, v) in &c.notes {
            m.insert(format!("{p}.note.{k}"), json!(v));
        }

        for t in &r.temperatures {
            let q = format!("{p}.{}", t.label);
            m.insert(format!("{q}.beta"), json!(t.beta));
            if let Some(g) = t.grid {
                m.insert(format!("{q}.file"), json!(file_stem(&p, t) + ".csv"));
                m.insert(format!("{q}.grid.x_min"), json!(g.x_min()));
                m.insert(format!("{q}.grid.x_max"), json!(g.x_max()));
                m.insert(format!("{q}.grid.n_points"), json!(g.len()));
            }
            for col in &t.columns {
                let k = format!("{q}.{}", col.column.key());
                m.insert(format!("{k}.ln_z"), json!(col.ln_z));
                m.insert(format!("{k}.mean"), json!(col.profile.mean()));
                m.insert(format!("{k}.second_moment"), json!(col.profile.second_moment()));
                if col.flagged > 0 {
                    m.insert(format!("{k}.flagged_points"), json!(col.flagged));
                }
                if col.failed > 0 {
                    m.insert(format!("{k}.unconverged_points"), json!(col.failed));
                }
            }
            for (col, rep) in &t.comparisons {
                let k = format!("{q}.comparison.{}", col.key());
                m.insert(format!("{k}.l1"), json!(rep.l1_distance));
                m.insert(format!("{k}.kl"), json!(rep.kl_divergence));
                m.insert(format!("{k}.js"), json!(rep.js_divergence));
                m.insert(format!("{k}.delta_mean"), json!(rep.delta_mean));
                m.insert(format!("{k}.delta_second_moment"), json!(rep.delta_second_moment));
                if let Some(v) = rep.delta_potential {
                    m.insert(format!("{k}.delta_potential"), json!(v));
                }
            }
            if let Some(s) = &t.sampler {
                let k = format!("{q}.sampler");
                m.insert(format!("{k}.l1"), json!(s.l1));
                m.insert(format!("{k}.acceptance_rate"), json!(s.acceptance_rate));
                m.insert(format!("{k}.second_moment"), json!(s.second_moment.value));
                m.insert(format!("{k}.second_moment_error"), json!(s.second_moment.std_error));
                m.insert(
                    format!("{k}.second_moment_quadrature"),
                    json!(s.second_moment_quadrature),
                );
                for (i, w) in s.warnings.iter().enumerate() {
                    m.insert(format!("{k}.warning.{i}"), json!(w));
                }
            }
            for (stage, msg) in &t.failures {
                ok = false;
                m.insert(format!("failures.{q}.{stage}"), json!(msg));
            }
        }
        for (i, chk) in r.checks.iter().enumerate() {
            ok &= chk.passed;
            let verdict = if chk.passed { "pass" } else { "fail" };
            m.insert(
                format!("{p}.check.{i:03}"),
                json!(format!("{verdict}: {}: {}", chk.label, chk.description)),
            );
        }
    }
    m.insert("status".into(), json!(if ok { "ok" } else { "failed" }));
    m
}

fn file_stem(name: &str, t: &TemperatureResult) -> String {
    format!("{name}_{}", t.label)
}

/// Summary table: L1, KL and second-moment delta per method, then checks.
pub fn report(results: &[ScenarioResult]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<14} {:<10} {:<10} {:>11} {:>11} {:>11}",
        "scenario", "temp", "method", "l1", "kl", "d<x^2>"
    );
    for r in results {
        for t in &r.temperatures {
            for (c, rep) in &t.comparisons {
                let _ = writeln!(
                    s,
                    "{:<14} {:<10} {:<10} {:>11.3e} {:>11.3e} {:>11.3e}",
                    r.config.name,
                    t.label,
                    c.key(),
                    rep.l1_distance,
                    rep.kl_divergence,
                    rep.delta_second_moment
                );
            }
            if let Some(sm) = &t.sampler {
                let _ = writeln!(
                    s,
                    "{:<14} {:<10} sampler {} l1 {:.3e}, acceptance {:.3}, <x^2> {:.6} +- {:.1e} (quadrature {:.6})",
                    r.config.name,
                    t.label,
                    sm.method,
                    sm.l1,
                    sm.acceptance_rate,
                    sm.second_moment.value,
                    sm.second_moment.std_error,
                    sm.second_moment_quadrature
                );
            }
            for (stage, msg) in &t.failures {
                let _ = writeln!(s, "{:<14} {:<10} ERROR {stage}: {msg}", r.config.name, t.label);
            }
        }
    }
    let checks: Vec<_> = results.iter().flat_map(|r| &r.checks).collect();
    if !checks.is_empty() {
        let _ = writeln!(s);
        for c in checks {
            let _ = writeln!(
                s,
                "{} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.label,
                c.description
            );
        }
    }
    s
}

/// Write every table, `manifest.json` and `report.txt` into `dir`.
pub fn write_outputs(dir: &Path, results: &[ScenarioResult], preset: Option<&str>) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut put = |name: String, body: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    for r in results {
        for t in &r.temperatures {
            let stem = file_stem(&r.config.name, t);
            if let Some(body) = density_csv(t) {
                put(format!("{stem}.csv"), body)?;
            }
            if let Some(body) = potential_csv(t) {
                put(format!("{stem}_veff.csv"), body)?;
            }
            if let Some(body) = sample_csv(t) {
                put(format!("{stem}_sample.csv"), body)?;
            }
        }
    }
    let json =
        serde_json::to_string_pretty(&manifest(results, preset)).map_err(|e| crate::error::Error::Io(e.to_string()))?;
    put("manifest.json".into(), json + "\n")?;
    put("report.txt".into(), report(results))?;
    Ok(written)
}
