//! Centroid effective potentials: Feynman-Hibbs and Feynman-Kleinert.

use super::local_harmonic::ln_sinhc;
use crate::error::{Error, Result};
use crate::model::{Grid, Potential, ThermoState};
use crate::smearing::{smear, smear_second_derivative, SmearKernel};
use rayon::prelude::*;

/// Floor for the trial frequency squared.
pub const OMEGA2_FLOOR: f64 = 1e-10;
/// Relative residual demanded of the self-consistency equations.
pub const FK_TOLERANCE: f64 = 1e-10;
pub const FK_MAX_ITERATIONS: usize = 500;
pub const FK_DAMPING: f64 = 0.5;

/// Width convention for the Feynman-Hibbs Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FhConvention {
    /// a^2 = beta hbar^2 / 12 m, the variance of the Gaussian kernel
    /// exp(-6 m (x - xbar)^2 / beta hbar^2).
    #[default]
    Twelfth,
    /// a^2 = beta hbar^2 / 3 m.
    Third,
}

impl FhConvention {
    pub fn a2(&self, thermo: &ThermoState) -> f64 {
        let base = thermo.beta() * thermo.hbar() * thermo.hbar() / thermo.mass();
        match self {
            FhConvention::Twelfth => base / 12.0,
            FhConvention::Third => base / 3.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FhConvention::Twelfth => "twelfth",
            FhConvention::Third => "third",
        }
    }
}

impl std::str::FromStr for FhConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twelfth" => Ok(FhConvention::Twelfth),
            "third" => Ok(FhConvention::Third),
            other => Err(Error::InvalidParameter(format!(
                "unknown Feynman-Hibbs width convention '{other}' (expected twelfth or third)"
            ))),
        }
    }
}

/// `V_FH(xbar) = V_{a^2}(xbar)`.
pub fn v_feynman_hibbs(
    potential: &Potential,
    thermo: &ThermoState,
    convention: FhConvention,
    xbar: f64,
) -> Result<f64> {
    let kernel = SmearKernel::for_potential(potential, convention.a2(thermo))?;
    smear(potential, &kernel, xbar)
}

/// `(xi coth xi - 1) / xi^2` in terms of `s = xi^2`.
fn coth_gap(s: f64) -> f64 {
    if s < 1e-2 {
        // 1/3 - s/45 + 2 s^2/945 - s^3/4725 + 2 s^4/93555
        let c = [1.0 / 3.0, -1.0 / 45.0, 2.0 / 945.0, -1.0 / 4725.0, 2.0 / 93_555.0];
        c.iter().rev().fold(0.0, |acc, k| acc * s + k)
    } else {
        let xi = s.sqrt();
        (xi / xi.tanh() - 1.0) / s
    }
}

/// Fluctuation width for trial frequency `omega2`:
/// `a^2 = (beta hbar^2 / 4m) (xi coth xi - 1) / xi^2`, `xi = beta hbar Omega / 2`.
pub fn fk_width(thermo: &ThermoState, omega2: f64) -> f64 {
    let (beta, hbar, m) = (thermo.beta(), thermo.hbar(), thermo.mass());
    let s = 0.25 * beta * beta * hbar * hbar * omega2;
    beta * hbar * hbar / (4.0 * m) * coth_gap(s)
}

/// Feynman-Kleinert solution at one centroid position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FkPoint {
    pub a2: f64,
    pub omega2: f64,
    pub value: f64,
    pub iterations: usize,
    /// Relative residual of the frequency equation (the width equation is
    /// satisfied exactly by construction).
    pub residual: f64,
    /// Smeared curvature fell below the floor.
    pub floored: bool,
    pub converged: bool,
}

/// Damped fixed-point solution of `a^2 = a^2(Omega^2)`,
/// `Omega^2 = V''_{a^2}(xbar) / m` at one point.
pub fn solve_fk_point(potential: &Potential, thermo: &ThermoState, xbar: f64) -> Result<FkPoint> {
    let m = thermo.mass();
    let base = SmearKernel::for_potential(potential, 0.0)?;
    let target = |omega2: f64| -> Result<(f64, bool)> {
        let kernel = base.with_a2(fk_width(thermo, omega2))?;
        let c = smear_second_derivative(potential, &kernel, xbar)? / m;
        Ok((c.max(OMEGA2_FLOOR), c < OMEGA2_FLOOR))
    };
    let mut omega2 = (potential.evaluate(xbar).second / m).max(OMEGA2_FLOOR);
    let mut residual = f64::INFINITY;
    let mut floored = false;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < FK_MAX_ITERATIONS {
        iterations += 1;
        let (t, f) = target(omega2)?;
        floored = f;
        residual = (t - omega2).abs() / t.abs().max(OMEGA2_FLOOR);
        if residual < FK_TOLERANCE {
            omega2 = t;
            converged = true;
            break;
        }
        omega2 += FK_DAMPING * (t - omega2);
    }
    // (1/beta hbar) ln(sinh xi / xi) - m Omega^2 a^2 / 2 + V_{a^2}
    let kernel = base.with_a2(fk_width(thermo, omega2))?;
    let (beta, hbar) = (thermo.beta(), thermo.hbar());
    let s = 0.25 * beta * beta * hbar * hbar * omega2;
    let value = ln_sinhc(s) / (beta * hbar) - 0.5 * m * omega2 * kernel.a2() + smear(potential, &kernel, xbar)?;
    Ok(FkPoint {
        a2: kernel.a2(),
        omega2,
        value,
        iterations,
        residual,
        floored,
        converged,
    })
}

/// Feynman-Kleinert solution on every grid point.
pub fn solve_feynman_kleinert(potential: &Potential, thermo: &ThermoState, grid: &Grid) -> Result<Vec<FkPoint>> {
    grid.points()
        .par_iter()
        .map(|&x| solve_fk_point(potential, thermo, x).map_err(|e| e.context(format!("Feynman-Kleinert at x = {x}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fh_harmonic_shift() {
        let p = Potential::harmonic_quartic(1.3, 0.9, 0.0).unwrap();
        let t = ThermoState::new(2.0, 1.3).unwrap();
        let a2 = 2.0 / (12.0 * 1.3);
        for x in [-1.0, 0.0, 0.6] {
            let expect = 0.5 * 1.3 * 0.81 * (x * x + a2);
            let got = v_feynman_hibbs(&p, &t, FhConvention::Twelfth, x).unwrap();
            assert!((got - expect).abs() < 1e-14);
        }
        assert!((FhConvention::Third.a2(&t) - 4.0 * a2).abs() < 1e-15);
    }

    #[test]
    fn fh_quartic_moments() {
        let p = Potential::harmonic_quartic(1.0, 1.0, 1.0).unwrap();
        let t = ThermoState::new(3.0, 1.0).unwrap();
        let a2: f64 = 0.25;
        for x in [0.0f64, 0.7, -1.9] {
            let expect = 0.5 * (x * x + a2) + 0.25 * (x.powi(4) + 6.0 * a2 * x * x + 3.0 * a2 * a2);
            assert!((v_feynman_hibbs(&p, &t, FhConvention::Twelfth, x).unwrap() - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn fh_cold_limit_is_bare_potential() {
        let p = Potential::morse(0.2, 1.1, 1.8).unwrap();
        let t = ThermoState::new(1e-12, 1700.0).unwrap();
        for x in [1.5, 1.8, 3.0] {
            assert!((v_feynman_hibbs(&p, &t, FhConvention::Twelfth, x).unwrap() - p.value(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn width_function() {
        let t = ThermoState::new(2.0, 1.0).unwrap();
        // Omega = 1: xi = 1, a^2 = (coth 1 - 1) / 2
        let expect = (1.0 / 1f64.tanh() - 1.0) / 2.0;
        assert!((fk_width(&t, 1.0) - expect).abs() < 1e-15);
        // zero frequency reduces to the free-particle width beta / 12m
        assert!((fk_width(&t, 0.0) - 2.0 / 12.0).abs() < 1e-16);
        let lo = fk_width(&t, 0.01 / 1.0 - 1e-12);
        let hi = fk_width(&t, 0.01 / 1.0 + 1e-12);
        assert!((lo - hi).abs() < 1e-13);
    }

    #[test]
    fn harmonic_fixed_point_is_exact() {
        let p = Potential::harmonic_quartic(1.0, 1.0, 0.0).unwrap();
        for beta in [0.1, 1.0, 10.0] {
            let t = ThermoState::new(beta, 1.0).unwrap();
            let xi: f64 = beta / 2.0;
            for x in [-2.0, 0.0, 1.3] {
                let fk = solve_fk_point(&p, &t, x).unwrap();
                assert!(fk.converged && !fk.floored);
                assert!((fk.omega2 - 1.0).abs() < 1e-12);
                assert!((fk.a2 - (xi / xi.tanh() - 1.0) / beta).abs() < 1e-12);
                let expect = 0.5 * x * x + (xi.sinh() / xi).ln() / beta;
                assert!((fk.value - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quartic_fixed_point_matches_bisection() {
        let p = Potential::harmonic_quartic(1.0, 1.0, 1.0).unwrap();
        let t = ThermoState::new(10.0, 1.0).unwrap();
        let fk = solve_fk_point(&p, &t, 0.0).unwrap();
        assert!(fk.converged && fk.residual < 1e-10 && fk.omega2 > 0.0);
        // Omega^2 = 1 + 3 a^2(Omega^2) at the origin
        let h = |w2: f64| 1.0 + 3.0 * fk_width(&t, w2) - w2;
        let (mut lo, mut hi) = (1.0, 10.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((fk.omega2 - 0.5 * (lo + hi)).abs() < 1e-9);
    }

    #[test]
    fn hot_limit_is_classical() {
        let p = Potential::double_well(1.0, 1.0, 0.5).unwrap();
        let t = ThermoState::new(1e-6, 1.0).unwrap();
        for x in [-1.5, 0.0, 0.2] {
            let fk = solve_fk_point(&p, &t, x).unwrap();
            assert!(fk.a2 < 1e-6);
            assert!((fk.value - p.value(x)).abs() < 1e-5);
        }
    }

    #[test]
    fn double_well_barrier_floors_frequency() {
        let p = Potential::double_well(1.0, 1.0, 0.1).unwrap();
        let t = ThermoState::new(1.0, 1.0).unwrap();
        let fk = solve_fk_point(&p, &t, 0.0).unwrap();
        assert!(fk.floored && fk.converged);
        assert_eq!(fk.omega2, OMEGA2_FLOOR);
        assert!(fk.value.is_finite());
    }

    #[test]
    fn morse_solves_with_quadrature() {
        let p = Potential::morse_from_spectroscopy(crate::model::oh_spectroscopy()).unwrap();
        let u = crate::model::UnitTable::ATOMIC;
        let t = ThermoState::new(
            u.beta_from_kelvin(300.0),
            u.amu_to_me(crate::model::units::oh_reduced_mass_amu()),
        )
        .unwrap();
        let Potential::Morse { x_e, .. } = p else {
            unreachable!()
        };
        for x in [x_e - 0.2, x_e, x_e + 0.4] {
            let fk = solve_fk_point(&p, &t, x).unwrap();
            assert!(fk.converged && fk.residual < 1e-10, "{fk:?}");
        }
    }
}
