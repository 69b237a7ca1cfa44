//! Conversion constants into the internal atomic units (Hartree, bohr,
//! electron mass, hbar = 1).

/// Wavenumbers per Hartree (CODATA 2018).
pub const CM1_PER_HARTREE: f64 = 219_474.631_363_20;
/// Angstrom per bohr (CODATA 2018).
pub const ANGSTROM_PER_BOHR: f64 = 0.529_177_210_903;
/// Electron masses per unified atomic mass unit.
pub const ME_PER_AMU: f64 = 1_822.888_486;
/// Boltzmann constant in Hartree per kelvin (CODATA 2018).
pub const KB_HARTREE_PER_K: f64 = 3.166_811_563_455_6e-6;

/// Standard atomic masses used for the OH reduced mass.
pub const MASS_O_AMU: f64 = 15.999;
pub const MASS_H_AMU: f64 = 1.008;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTable {
    pub cm1_per_hartree: f64,
    pub angstrom_per_bohr: f64,
    pub me_per_amu: f64,
    pub kb_hartree_per_k: f64,
}

impl Default for UnitTable {
    fn default() -> Self {
        Self::ATOMIC
    }
}

impl UnitTable {
    pub const ATOMIC: UnitTable = UnitTable {
        cm1_per_hartree: CM1_PER_HARTREE,
        angstrom_per_bohr: ANGSTROM_PER_BOHR,
        me_per_amu: ME_PER_AMU,
        kb_hartree_per_k: KB_HARTREE_PER_K,
    };

    pub fn cm1_to_hartree(&self, cm1: f64) -> f64 {
        cm1 / self.cm1_per_hartree
    }

    pub fn hartree_to_cm1(&self, e: f64) -> f64 {
        e * self.cm1_per_hartree
    }

    pub fn angstrom_to_bohr(&self, a: f64) -> f64 {
        a / self.angstrom_per_bohr
    }

    pub fn bohr_to_angstrom(&self, b: f64) -> f64 {
        b * self.angstrom_per_bohr
    }

    pub fn amu_to_me(&self, amu: f64) -> f64 {
        amu * self.me_per_amu
    }

    pub fn me_to_amu(&self, me: f64) -> f64 {
        me / self.me_per_amu
    }

    pub fn kelvin_to_hartree(&self, t: f64) -> f64 {
        t * self.kb_hartree_per_k
    }

    pub fn hartree_to_kelvin(&self, e: f64) -> f64 {
        e / self.kb_hartree_per_k
    }

    /// Inverse temperature in 1/Hartree for a temperature in kelvin.
    pub fn beta_from_kelvin(&self, t: f64) -> f64 {
        1.0 / self.kelvin_to_hartree(t)
    }

    pub fn kelvin_from_beta(&self, beta: f64) -> f64 {
        self.hartree_to_kelvin(1.0 / beta)
    }
}

/// Reduced mass of two atoms, in amu.
pub fn reduced_mass_amu(m1: f64, m2: f64) -> f64 {
    m1 * m2 / (m1 + m2)
}

/// Reduced mass of the OH bond with the standard atomic masses, in amu.
pub fn oh_reduced_mass_amu() -> f64 {
    reduced_mass_amu(MASS_O_AMU, MASS_H_AMU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn oh_reduced_mass() {
        let mu = UnitTable::ATOMIC.amu_to_me(oh_reduced_mass_amu());
        assert!((mu - 1728.565180844).abs() < 1e-6);
    }

    #[test]
    fn room_temperature_beta() {
        // kT at 300 K is about 9.5e-4 Hartree
        let beta = UnitTable::ATOMIC.beta_from_kelvin(300.0);
        assert!((beta - 1052.58).abs() < 0.05, "{beta}");
    }

    proptest! {
        #[test]
        fn round_trips_are_identity(v in 1e-6f64..1e6) {
            let u = UnitTable::ATOMIC;
            let rel = |a: f64| (a - v).abs() / v;
            prop_assert!(rel(u.hartree_to_cm1(u.cm1_to_hartree(v))) < 1e-12);
            prop_assert!(rel(u.bohr_to_angstrom(u.angstrom_to_bohr(v))) < 1e-12);
            prop_assert!(rel(u.me_to_amu(u.amu_to_me(v))) < 1e-12);
            prop_assert!(rel(u.hartree_to_kelvin(u.kelvin_to_hartree(v))) < 1e-12);
            prop_assert!(rel(u.kelvin_from_beta(u.beta_from_kelvin(v))) < 1e-12);
        }
    }
}
