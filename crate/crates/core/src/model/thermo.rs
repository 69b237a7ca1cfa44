use crate::error::{Error, Result};

/// Inverse temperature, particle mass and hbar in internal atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    beta: f64,
    mass: f64,
    hbar: f64,
}

impl ThermoState {
    /// Atomic units with hbar = 1.
    pub fn new(beta: f64, mass: f64) -> Result<Self> {
        Self::with_hbar(beta, mass, 1.0)
    }

    pub fn with_hbar(beta: f64, mass: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("mass", mass), ("hbar", hbar)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(Self { beta, mass, hbar })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::with_hbar(beta, self.mass, self.hbar)
    }

    /// Thermal de Broglie length hbar * sqrt(beta / m).
    pub fn thermal_length(&self) -> f64 {
        self.hbar * (self.beta / self.mass).sqrt()
    }

    /// ln of the free-particle prefactor sqrt(m / (2 pi beta hbar^2)).
    pub fn ln_free_prefactor(&self) -> f64 {
        0.5 * (self.mass / (2.0 * std::f64::consts::PI * self.beta * self.hbar * self.hbar)).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_positive() {
        assert!(ThermoState::new(0.0, 1.0).is_err());
        assert!(ThermoState::new(1.0, -1.0).is_err());
        assert!(ThermoState::with_hbar(1.0, 1.0, f64::NAN).is_err());
        assert!(ThermoState::new(1.0, 1.0).is_ok());
    }
}
