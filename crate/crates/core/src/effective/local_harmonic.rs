//! Starting-point local-harmonic densities and potentials.
//!
//! Everything is written in terms of the signed variable `s = xi^2`,
//! `xi = beta hbar omega_a / 2`, so that `omega_a^2 -> 0` is an ordinary point.
//! For `s < 0` the functions continue analytically (`tanh -> tan`,
//! `sinh -> sin`), which is only used under [`CurvaturePolicy::ContinuationCapped`].

use crate::error::{Error, Result};
use crate::model::{Grid, Potential, ThermoState};
use crate::stats::density::{normalize_log, DensityProfile};
use rayon::prelude::*;

/// Below this `|s|` the power series are used.
const SERIES_LIMIT: f64 = 1e-2;

/// Taylor coefficients of tanh(xi)/xi in powers of xi^2.
const TANHC: [f64; 9] = [
    1.0,
    -1.0 / 3.0,
    2.0 / 15.0,
    -17.0 / 315.0,
    62.0 / 2835.0,
    -1382.0 / 155_925.0,
    21_844.0 / 6_081_075.0,
    -929_569.0 / 638_512_875.0,
    6_404_582.0 / 10_854_718_875.0,
];

/// How negative local curvature is handled.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum CurvaturePolicy {
    /// Treat `omega_a^2 < 0` as zero: `Xi = 1`, no quantum correction.
    #[default]
    ClampToZero,
    /// Continue to `tan|xi| / |xi|` with `|xi|` capped below pi/2.
    ContinuationCapped { cap: f64 },
}

impl CurvaturePolicy {
    pub fn continuation(cap: f64) -> Result<Self> {
        if !(cap > 0.0 && cap < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "continuation cap must lie in (0, pi/2), got {cap}"
            )));
        }
        Ok(CurvaturePolicy::ContinuationCapped { cap })
    }

    /// Effective `s` and whether the policy acted (any `s < 0`).
    pub fn apply(&self, s: f64) -> (f64, bool) {
        if s >= 0.0 {
            return (s, false);
        }
        match *self {
            CurvaturePolicy::ClampToZero => (0.0, true),
            CurvaturePolicy::ContinuationCapped { cap } => (s.max(-cap * cap), true),
        }
    }
}

/// Local harmonic quantities at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalHarmonicFields {
    /// V'(x') / m
    pub k_a: f64,
    /// V''(x') / m, any sign
    pub omega2: f64,
    /// beta hbar omega_a / 2, defined for omega2 >= 0
    pub xi: Option<f64>,
    /// x' - k_a / omega2, defined for omega2 > 0
    pub x0: Option<f64>,
}

impl LocalHarmonicFields {
    pub fn at(potential: &Potential, thermo: &ThermoState, x: f64) -> Self {
        let d = potential.evaluate(x);
        let m = thermo.mass();
        let (k_a, omega2) = (d.first / m, d.second / m);
        let xi = (omega2 >= 0.0).then(|| 0.5 * thermo.beta() * thermo.hbar() * omega2.sqrt());
        let x0 = (omega2 > 0.0).then(|| x - k_a / omega2);
        Self { k_a, omega2, xi, x0 }
    }

    /// Signed `xi^2`.
    pub fn s(&self, thermo: &ThermoState) -> f64 {
        let b = thermo.beta() * thermo.hbar();
        0.25 * b * b * self.omega2
    }
}

fn series(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

/// `Xi(s) = tanh(xi) / xi`, continued to `tan|xi| / |xi|` for `s < 0`.
pub fn tanhc(s: f64) -> f64 {
    if s.abs() < SERIES_LIMIT {
        series(&TANHC, s)
    } else if s > 0.0 {
        let xi = s.sqrt();
        xi.tanh() / xi
    } else {
        let y = (-s).sqrt();
        y.tan() / y
    }
}

/// `G(s) = 3 (1 - Xi(s)) / s`, with `G(0) = 1`.
pub fn tanhc_gap(s: f64) -> f64 {
    if s.abs() < SERIES_LIMIT {
        -3.0 * series(&TANHC[1..], s)
    } else {
        3.0 * (1.0 - tanhc(s)) / s
    }
}

/// `ln(sinh(y) / y)` as a function of `u = y^2` (signed, `sin` for `u < 0`).
pub fn ln_sinhc(u: f64) -> f64 {
    if u.abs() < 4.0 * SERIES_LIMIT {
        // sinh(y)/y - 1 = u/6 + u^2/120 + u^3/5040 + u^4/362880 + u^5/39916800
        let c = [
            1.0 / 6.0,
            1.0 / 120.0,
            1.0 / 5040.0,
            1.0 / 362_880.0,
            1.0 / 39_916_800.0,
        ];
        (u * series(&c, u)).ln_1p()
    } else if u > 0.0 {
        let y = u.sqrt();
        if y < 20.0 {
            (y.sinh() / y).ln()
        } else {
            y - std::f64::consts::LN_2 + (-(-2.0 * y).exp()).ln_1p() - y.ln()
        }
    } else {
        let y = (-u).sqrt();
        (y.sin() / y).ln()
    }
}

/// One local-harmonic evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhPoint {
    /// Xi after the curvature policy.
    pub xi_factor: f64,
    /// beta^2 hbar^2 V'^2 / (24 m) * G(s), the finite form of
    /// (m k_a^2 / 2 omega_a^2)(1 - Xi).
    pub correction: f64,
    /// ln(sinh(2 xi) / (2 xi)).
    pub ln_spread: f64,
    pub policy_active: bool,
}

/// Local-harmonic ingredients at `x` under `policy`.
pub fn local_harmonic_point(potential: &Potential, thermo: &ThermoState, x: f64, policy: CurvaturePolicy) -> LhPoint {
    let d = potential.evaluate(x);
    let (beta, hbar, m) = (thermo.beta(), thermo.hbar(), thermo.mass());
    let raw = 0.25 * beta * beta * hbar * hbar * d.second / m;
    let (s, policy_active) = policy.apply(raw);
    LhPoint {
        xi_factor: tanhc(s),
        correction: beta * beta * hbar * hbar * d.first * d.first / (24.0 * m) * tanhc_gap(s),
        ln_spread: ln_sinhc(4.0 * s),
        policy_active,
    }
}

/// Bare local-harmonic effective potential
/// `V + (m k_a^2 / 2 omega_a^2)(Xi - 1) + ln(sinh 2xi / 2xi) / (2 beta)`.
pub fn v_lh_bare(potential: &Potential, thermo: &ThermoState, x: f64, policy: CurvaturePolicy) -> (f64, bool) {
    let p = local_harmonic_point(potential, thermo, x, policy);
    let v = potential.value(x) - p.correction + p.ln_spread / (2.0 * thermo.beta());
    (v, p.policy_active)
}

/// Renormalized local-harmonic log-weight
/// `ln sqrt(Xi) - beta V + beta (m k_a^2 / 2 omega_a^2)(1 - Xi)`.
pub fn lh_renormalized_log_weight(
    potential: &Potential,
    thermo: &ThermoState,
    x: f64,
    policy: CurvaturePolicy,
) -> (f64, bool) {
    let p = local_harmonic_point(potential, thermo, x, policy);
    let beta = thermo.beta();
    (
        0.5 * p.xi_factor.ln() - beta * potential.value(x) + beta * p.correction,
        p.policy_active,
    )
}

/// Mapped local-harmonic potential `V Xi - ln(Xi) / (2 beta)` with `V`
/// measured from `origin`, the energy that the harmonic reference
/// `m k_a^2 / 2 omega_a^2` is zero at. The result is shifted back by `origin`.
pub fn v_lh_mapped(
    potential: &Potential,
    thermo: &ThermoState,
    x: f64,
    policy: CurvaturePolicy,
    origin: f64,
) -> (f64, bool) {
    let p = local_harmonic_point(potential, thermo, x, policy);
    let v = origin + (potential.value(x) - origin) * p.xi_factor - p.xi_factor.ln() / (2.0 * thermo.beta());
    (v, p.policy_active)
}

/// Tabulated local-harmonic result: the density, its effective potential and
/// the points where the curvature policy changed the input.
#[derive(Debug, Clone)]
pub struct LhTable {
    pub profile: DensityProfile,
    pub v_eff: Vec<f64>,
    pub policy_points: Vec<bool>,
}

fn tabulate(grid: &Grid, thermo: &ThermoState, f: impl Fn(f64) -> (f64, bool) + Sync) -> Result<LhTable> {
    let rows: Vec<(f64, bool)> = grid.points().par_iter().map(|&x| f(x)).collect();
    let (v_eff, policy_points): (Vec<f64>, Vec<bool>) = rows.into_iter().unzip();
    if let Some(i) = v_eff.iter().position(|v| !v.is_finite()) {
        return Err(Error::Normalization(format!(
            "non-finite effective potential at x = {}",
            grid.x(i)
        )));
    }
    let logs: Vec<f64> = v_eff.iter().map(|v| -thermo.beta() * v).collect();
    Ok(LhTable {
        profile: normalize_log(&logs, grid)?,
        v_eff,
        policy_points,
    })
}

/// Normalized density `exp(-beta V_bare)` on `grid`.
pub fn p_lh_bare(potential: &Potential, thermo: &ThermoState, grid: &Grid, policy: CurvaturePolicy) -> Result<LhTable> {
    tabulate(grid, thermo, |x| v_lh_bare(potential, thermo, x, policy))
}

/// Renormalized local-harmonic density; `v_eff` is minus the log-weight over beta.
pub fn p_lh_renormalized(
    potential: &Potential,
    thermo: &ThermoState,
    grid: &Grid,
    policy: CurvaturePolicy,
) -> Result<LhTable> {
    tabulate(grid, thermo, |x| {
        let (w, active) = lh_renormalized_log_weight(potential, thermo, x, policy);
        (-w / thermo.beta(), active)
    })
}

/// Mapped local-harmonic density `sqrt(Xi) exp(-beta (V - V_min) Xi)` and `V_LH`.
pub fn p_lh_mapped(
    potential: &Potential,
    thermo: &ThermoState,
    grid: &Grid,
    policy: CurvaturePolicy,
) -> Result<LhTable> {
    let (_, origin) = potential.global_minimum()?;
    tabulate(grid, thermo, |x| v_lh_mapped(potential, thermo, x, policy, origin))
}
