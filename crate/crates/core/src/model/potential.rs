use super::units::{self, UnitTable};
use crate::error::{Error, Result};

/// Analytic one-dimensional potential with closed-form first and second
/// derivatives. All parameters are in internal atomic units.
#[derive(Debug, Clone, PartialEq)]
pub enum Potential {
    /// m w^2 x^2 / 2 + g x^4 / 4
    HarmonicQuartic { mass: f64, omega: f64, g: f64 },
    /// D (1 - exp(-alpha (x - x_e)))^2
    Morse { d: f64, alpha: f64, x_e: f64 },
    /// -m w^2 x^2 / 2 + g x^4 / 4 + m w^4 / (16 g)
    DoubleWell { mass: f64, omega: f64, g: f64 },
    /// sum_p c_p x^p, coefficient index = power
    MonomialSum { coefficients: Vec<f64> },
}

/// Value, first derivative and second derivative at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub first: f64,
    pub second: f64,
}

/// Spectroscopic inputs a Morse potential was built from, kept for output metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorseSpectroscopy {
    pub omega_e_cm1: f64,
    pub omega_e_chi_e_cm1: f64,
    pub x_e_angstrom: f64,
    pub reduced_mass_amu: f64,
}

impl Potential {
    pub fn harmonic_quartic(mass: f64, omega: f64, g: f64) -> Result<Self> {
        check_finite(&[("mass", mass), ("omega", omega), ("g", g)])?;
        if mass <= 0.0 {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        Ok(Potential::HarmonicQuartic { mass, omega, g })
    }

    pub fn morse(d: f64, alpha: f64, x_e: f64) -> Result<Self> {
        check_finite(&[("D", d), ("alpha", alpha), ("x_e", x_e)])?;
        if d <= 0.0 || alpha <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "Morse needs D > 0 and alpha > 0, got D = {d}, alpha = {alpha}"
            )));
        }
        Ok(Potential::Morse { d, alpha, x_e })
    }

    pub fn double_well(mass: f64, omega: f64, g: f64) -> Result<Self> {
        check_finite(&[("mass", mass), ("omega", omega), ("g", g)])?;
        if mass <= 0.0 || g <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "double well needs mass > 0 and g > 0, got mass = {mass}, g = {g}"
            )));
        }
        Ok(Potential::DoubleWell { mass, omega, g })
    }

    pub fn monomial_sum(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "monomial sum needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("monomial coefficients must be finite".into()));
        }
        Ok(Potential::MonomialSum { coefficients })
    }

    /// Morse potential from spectroscopic constants. `D = w_e^2 / (4 w_e x_e)`
    /// and `alpha = sqrt(2 mu w_e x_e) / hbar`, converted to atomic units.
    pub fn morse_from_spectroscopy(spec: MorseSpectroscopy) -> Result<Self> {
        let MorseSpectroscopy {
            omega_e_cm1,
            omega_e_chi_e_cm1,
            x_e_angstrom,
            reduced_mass_amu,
        } = spec;
        for (name, v) in [
            ("omega_e", omega_e_cm1),
            ("omega_e chi_e", omega_e_chi_e_cm1),
            ("x_e", x_e_angstrom),
            ("mu", reduced_mass_amu),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        let u = UnitTable::ATOMIC;
        let d = u.cm1_to_hartree(omega_e_cm1 * omega_e_cm1 / (4.0 * omega_e_chi_e_cm1));
        let mu = u.amu_to_me(reduced_mass_amu);
        let alpha = (2.0 * mu * u.cm1_to_hartree(omega_e_chi_e_cm1)).sqrt();
        Potential::morse(d, alpha, u.angstrom_to_bohr(x_e_angstrom))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Potential::HarmonicQuartic { .. } => "harmonic_quartic",
            Potential::Morse { .. } => "morse",
            Potential::DoubleWell { .. } => "double_well",
            Potential::MonomialSum { .. } => "monomial_sum",
        }
    }

    /// Particle mass implied by the potential parameters, if any.
    pub fn natural_mass(&self) -> Option<f64> {
        match self {
            Potential::HarmonicQuartic { mass, .. } | Potential::DoubleWell { mass, .. } => Some(*mass),
            _ => None,
        }
    }

    /// Power-series coefficients for the polynomial family.
    pub fn polynomial_coefficients(&self) -> Option<Vec<f64>> {
        match *self {
            Potential::HarmonicQuartic { mass, omega, g } => {
                Some(vec![0.0, 0.0, 0.5 * mass * omega * omega, 0.0, 0.25 * g])
            }
            Potential::DoubleWell { mass, omega, g } => {
                let w2 = omega * omega;
                Some(vec![mass * w2 * w2 / (16.0 * g), 0.0, -0.5 * mass * w2, 0.0, 0.25 * g])
            }
            Potential::MonomialSum { ref coefficients } => Some(coefficients.clone()),
            Potential::Morse { .. } => None,
        }
    }

    pub fn is_polynomial(&self) -> bool {
        !matches!(self, Potential::Morse { .. })
    }

    /// True when V(-x) = V(x) for all x.
    pub fn is_even(&self) -> bool {
        match self {
            Potential::Morse { .. } => false,
            Potential::MonomialSum { coefficients } => coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0),
            _ => true,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.evaluate(x).value
    }

    pub fn evaluate(&self, x: f64) -> Derivatives {
        match *self {
            Potential::Morse { d, alpha, x_e } => {
                let e = (-alpha * (x - x_e)).exp();
                let one_minus = 1.0 - e;
                Derivatives {
                    value: d * one_minus * one_minus,
                    first: 2.0 * d * alpha * e * one_minus,
                    second: 2.0 * d * alpha * alpha * e * (2.0 * e - 1.0),
                }
            }
            Potential::MonomialSum { ref coefficients } => poly_eval(coefficients, x),
            Potential::HarmonicQuartic { mass, omega, g } => {
                let k = mass * omega * omega;
                let x2 = x * x;
                Derivatives {
                    value: 0.5 * k * x2 + 0.25 * g * x2 * x2,
                    first: k * x + g * x2 * x,
                    second: k + 3.0 * g * x2,
                }
            }
            Potential::DoubleWell { mass, omega, g } => {
                let k = mass * omega * omega;
                let x2 = x * x;
                Derivatives {
                    value: -0.5 * k * x2 + 0.25 * g * x2 * x2 + k * omega * omega / (16.0 * g),
                    first: -k * x + g * x2 * x,
                    second: -k + 3.0 * g * x2,
                }
            }
        }
    }

    /// Position and value of the global minimum: closed form where one exists,
    /// otherwise a sampled search polished by golden sections.
    pub fn global_minimum(&self) -> Result<(f64, f64)> {
        match *self {
            Potential::HarmonicQuartic { g, .. } if g < 0.0 => Err(Error::UnboundedBelow {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }),
            Potential::HarmonicQuartic { .. } => Ok((0.0, 0.0)),
            Potential::Morse { x_e, .. } => Ok((x_e, 0.0)),
            Potential::DoubleWell { mass, omega, g } => {
                let x = (mass * omega * omega / g).sqrt();
                Ok((x, self.value(x)))
            }
            Potential::MonomialSum { .. } => {
                let (center, scale) = self.search_hint();
                super::grid::locate_minimum(self, center, scale)
            }
        }
    }

    /// Rough location of the interesting region and its length scale, used to
    /// seed the minimum search.
    pub(crate) fn search_hint(&self) -> (f64, f64) {
        match *self {
            Potential::HarmonicQuartic { .. } => (0.0, 1.0),
            Potential::Morse { alpha, x_e, .. } => (x_e, 1.0 / alpha),
            Potential::DoubleWell { mass, omega, g } => (0.0, (mass * omega * omega / g).sqrt().max(1.0)),
            Potential::MonomialSum { .. } => (0.0, 1.0),
        }
    }

    /// Upper bound of the potential, if it is bounded above.
    pub(crate) fn plateau(&self) -> Option<f64> {
        match *self {
            Potential::Morse { d, .. } => Some(d),
            _ => None,
        }
    }
}

fn poly_eval(c: &[f64], x: f64) -> Derivatives {
    // Horner for value and both derivatives at once
    let mut v = 0.0;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for &coef in c.iter().rev() {
        d2 = d2 * x + 2.0 * d1;
        d1 = d1 * x + v;
        v = v * x + coef;
    }
    Derivatives {
        value: v,
        first: d1,
        second: d2,
    }
}

fn check_finite(values: &[(&str, f64)]) -> Result<()> {
    for (name, v) in values {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
    }
    Ok(())
}

/// OH bond parameters used by the Morse benchmark.
pub fn oh_spectroscopy() -> MorseSpectroscopy {
    MorseSpectroscopy {
        omega_e_cm1: 3737.76,
        omega_e_chi_e_cm1: 84.881,
        x_e_angstrom: 0.9697,
        reduced_mass_amu: units::oh_reduced_mass_amu(),
    }
}
