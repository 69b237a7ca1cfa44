//! Effective classical potentials and the densities `exp(-beta V_eff)` they
//! generate on a grid.

pub mod centroid;
pub mod local_harmonic;

use crate::error::{Error, Result};
use crate::model::{Grid, Potential, ThermoState};
use crate::stats::density::{normalize_log, DensityProfile};
pub use centroid::{fk_width, solve_feynman_kleinert, solve_fk_point, v_feynman_hibbs, FhConvention, FkPoint};
pub use local_harmonic::{
    p_lh_bare, p_lh_mapped, p_lh_renormalized, v_lh_bare, v_lh_mapped, CurvaturePolicy, LhTable, LocalHarmonicFields,
};
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Classical,
    FeynmanHibbs,
    FeynmanKleinert,
    LhBare,
    LhRenormalized,
    LhMapped,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Classical,
        Method::FeynmanHibbs,
        Method::FeynmanKleinert,
        Method::LhBare,
        Method::LhRenormalized,
        Method::LhMapped,
    ];

    /// Column name used in output files.
    pub fn key(&self) -> &'static str {
        match self {
            Method::Classical => "classical",
            Method::FeynmanHibbs => "fh",
            Method::FeynmanKleinert => "fk",
            Method::LhBare => "lh_bare",
            Method::LhRenormalized => "lh_renorm",
            Method::LhMapped => "lh_mapped",
        }
    }

    /// Whether `-ln Z / beta` of this method bounds the exact free energy from above.
    pub fn is_variational(&self) -> bool {
        matches!(self, Method::FeynmanHibbs | Method::FeynmanKleinert)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.key() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MethodOptions {
    pub fh_convention: FhConvention,
    pub policy: CurvaturePolicy,
}

/// A method evaluated on a grid.
#[derive(Debug, Clone)]
pub struct MethodTable {
    pub method: Method,
    pub v_eff: Vec<f64>,
    pub profile: DensityProfile,
    /// ln of `sqrt(m / 2 pi beta hbar^2) * int exp(-beta V_eff)`.
    pub ln_z: f64,
    /// Points where the curvature policy acted or the FK frequency was floored.
    pub flagged: Vec<bool>,
    /// Points where the FK iteration did not converge.
    pub failed: Vec<bool>,
}

impl MethodTable {
    pub fn free_energy(&self, thermo: &ThermoState) -> f64 {
        -self.ln_z / thermo.beta()
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|f| **f).count()
    }

    pub fn failed_count(&self) -> usize {
        self.failed.iter().filter(|f| **f).count()
    }
}

/// Tabulate `V_eff` and its normalized density for one method.
pub fn evaluate_method(
    method: Method,
    potential: &Potential,
    thermo: &ThermoState,
    grid: &Grid,
    options: &MethodOptions,
) -> Result<MethodTable> {
    let n = grid.len();
    let (v_eff, flagged, failed) = match method {
        Method::Classical => (
            grid.points().iter().map(|&x| potential.value(x)).collect(),
            vec![false; n],
            vec![false; n],
        ),
        Method::FeynmanHibbs => {
            let v = grid
                .points()
                .par_iter()
                .map(|&x| v_feynman_hibbs(potential, thermo, options.fh_convention, x))
                .collect::<Result<Vec<f64>>>()?;
            (v, vec![false; n], vec![false; n])
        }
        Method::FeynmanKleinert => {
            let pts = solve_feynman_kleinert(potential, thermo, grid)?;
            (
                pts.iter().map(|p| p.value).collect(),
                pts.iter().map(|p| p.floored).collect(),
                pts.iter().map(|p| !p.converged).collect(),
            )
        }
        Method::LhBare | Method::LhRenormalized | Method::LhMapped => {
            let t = match method {
                Method::LhBare => p_lh_bare(potential, thermo, grid, options.policy)?,
                Method::LhRenormalized => p_lh_renormalized(potential, thermo, grid, options.policy)?,
                _ => p_lh_mapped(potential, thermo, grid, options.policy)?,
            };
            (t.v_eff, t.policy_points, vec![false; n])
        }
    };
    let context = || {
        format!(
            "{method} at beta = {} on [{}, {}]",
            thermo.beta(),
            grid.x_min(),
            grid.x_max()
        )
    };
    if let Some(i) = v_eff.iter().position(|v: &f64| !v.is_finite()) {
        return Err(
            Error::Normalization(format!("non-finite effective potential at x = {}", grid.x(i))).context(context()),
        );
    }
    let logs: Vec<f64> = v_eff.iter().map(|v| -thermo.beta() * v).collect();
    let profile = normalize_log(&logs, grid).map_err(|e| e.context(context()))?;
    let ln_z = thermo.ln_free_prefactor() + profile.log_normalizer();
    Ok(MethodTable {
        method,
        v_eff,
        profile,
        ln_z,
        flagged,
        failed,
    })
}

/// `ln Z = ln sqrt(m / 2 pi beta hbar^2) + ln int exp(-beta V_eff)` by the trapezoid rule.
pub fn partition_estimate(v_eff: &[f64], thermo: &ThermoState, grid: &Grid) -> Result<f64> {
    let logs: Vec<f64> = v_eff.iter().map(|v| -thermo.beta() * v).collect();
    Ok(thermo.ln_free_prefactor() + normalize_log(&logs, grid)?.log_normalizer())
}
