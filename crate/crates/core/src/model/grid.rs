use super::potential::Potential;
use super::thermo::ThermoState;
use crate::error::{Error, Result};
use statrs::distribution::{ContinuousCDF, Normal};

/// Uniform position grid including both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    x_min: f64,
    x_max: f64,
    n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "grid needs finite x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        if n_points < 3 {
            return Err(Error::InvalidParameter(format!(
                "grid needs at least 3 points, got {n_points}"
            )));
        }
        Ok(Self { x_min, x_max, n_points })
    }

    /// Grid with spacing `h` starting at `x_min`.
    pub fn from_spacing(x_min: f64, h: f64, n_points: usize) -> Result<Self> {
        Self::new(x_min, x_min + h * (n_points - 1) as f64, n_points)
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.n_points {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// Halve the spacing; every node of `self` is a node of the result.
    pub fn refined(&self) -> Grid {
        Grid {
            n_points: 2 * (self.n_points - 1) + 1,
            ..*self
        }
    }

    /// Add whole spacings on either side, keeping existing nodes.
    pub fn extended(&self, left: usize, right: usize) -> Grid {
        let h = self.spacing();
        Grid {
            x_min: self.x_min - left as f64 * h,
            x_max: self.x_max + right as f64 * h,
            n_points: self.n_points + left + right,
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && (self.x_min - other.x_min).abs() <= 1e-12 * (1.0 + self.x_min.abs())
            && (self.x_max - other.x_max).abs() <= 1e-12 * (1.0 + self.x_max.abs())
    }

    /// Trapezoid weights summing to the extent.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n_points];
        w[0] = 0.5 * h;
        w[self.n_points - 1] = 0.5 * h;
        w
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let h = self.spacing();
        let n = values.len();
        let inner: f64 = values[1..n - 1].iter().sum();
        h * (inner + 0.5 * (values[0] + values[n - 1]))
    }
}

/// Extent and resolution chosen by [`auto_grid`], with the intermediate
/// quantities kept for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPlan {
    pub grid: Grid,
    pub x_at_minimum: f64,
    pub v_min: f64,
    pub e_cap: f64,
    /// Ground-state length scale at the minimum.
    pub quantum_length: f64,
}

const MIN_POINTS: usize = 129;
const MAX_POINTS: usize = 1 << 16;
const CURVATURE_FLOOR: f64 = 1e-12;

/// Choose a grid that holds every x with `V(x) - V_min <= E_cap`, where
/// `E_cap = max(20 / beta, 10 hbar w_char)`, padded so that the ground state
/// and the classical density keep at least `coverage` of their mass inside.
pub fn auto_grid(potential: &Potential, thermo: &ThermoState, coverage: f64) -> Result<Grid> {
    plan_grid(potential, thermo, coverage).map(|p| p.grid)
}

pub fn plan_grid(potential: &Potential, thermo: &ThermoState, coverage: f64) -> Result<GridPlan> {
    if !(coverage > 0.0 && coverage < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "coverage must lie in (0, 1), got {coverage}"
        )));
    }
    let (m, hbar, beta) = (thermo.mass(), thermo.hbar(), thermo.beta());
    let (center, scale) = potential.search_hint();

    let (x0, v_min) = locate_minimum(potential, center, scale)?;
    let curvature = potential.evaluate(x0).second;
    let w_char = (curvature.max(CURVATURE_FLOOR) / m).sqrt();
    let e_cap = (20.0 / beta).max(10.0 * hbar * w_char);
    if let Some(top) = potential.plateau() {
        if v_min + e_cap >= top {
            return Err(Error::Unconfined {
                e_cap,
                reach: f64::INFINITY,
            });
        }
    }

    let (mut lo, mut hi) = level_set_extent(potential, x0, v_min, e_cap, scale)?;

    let ell = quantum_length(potential, x0, v_min, m, hbar, scale);
    let z = Normal::new(0.0, 1.0)
        .expect("unit normal")
        .inverse_cdf(1.0 - 0.5 * (1.0 - coverage));
    let pad = 0.5 * z * ell;
    lo -= pad;
    hi += pad;

    // widen until the classical density is covered
    let tail_target = 1.0 - coverage;
    for _ in 0..64 {
        let (left, right) = classical_tails(potential, beta, v_min, lo, hi);
        if left + right <= tail_target {
            break;
        }
        if left > 0.5 * tail_target {
            lo -= ell;
        }
        if right > 0.5 * tail_target {
            hi += ell;
        }
    }

    if let Some(top) = potential.plateau() {
        // keep to the region below 5 D on the repulsive side
        let wall = 5.0 * top;
        if potential.value(lo) > wall {
            lo = bisect_level(potential, lo, x0, wall);
        }
        if potential.value(hi) > wall {
            hi = bisect_level(potential, x0, hi, wall);
        }
    }

    let h_target = ell.min(thermo.thermal_length()) / 8.0;
    let mut n = ((hi - lo) / h_target).ceil() as usize + 1;
    n = n.clamp(MIN_POINTS, MAX_POINTS);
    if n.is_multiple_of(2) {
        n += 1;
    }
    Ok(GridPlan {
        grid: Grid::new(lo, hi, n)?,
        x_at_minimum: x0,
        v_min,
        e_cap,
        quantum_length: ell,
    })
}

pub(crate) fn locate_minimum(potential: &Potential, center: f64, scale: f64) -> Result<(f64, f64)> {
    const SAMPLES: usize = 4001;
    let mut half = 32.0 * scale;
    for _ in 0..4 {
        let (lo, hi) = (center - half, center + half);
        let step = (hi - lo) / (SAMPLES - 1) as f64;
        let (mut best_i, mut best_v) = (0, f64::INFINITY);
        for i in 0..SAMPLES {
            let v = potential.value(lo + i as f64 * step);
            if v < best_v {
                best_v = v;
                best_i = i;
            }
        }
        if !best_v.is_finite() {
            return Err(Error::UnboundedBelow { lo, hi });
        }
        if best_i == 0 || best_i == SAMPLES - 1 {
            half *= 4.0;
            continue;
        }
        // golden-section polish inside the bracketing cell pair
        let mut a = lo + (best_i - 1) as f64 * step;
        let mut b = lo + (best_i + 1) as f64 * step;
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - r * (b - a);
        let mut d = a + r * (b - a);
        for _ in 0..100 {
            if potential.value(c) < potential.value(d) {
                b = d;
            } else {
                a = c;
            }
            c = b - r * (b - a);
            d = a + r * (b - a);
        }
        let x = 0.5 * (a + b);
        let v = potential.value(x);
        return Ok(if v <= best_v {
            (x, v)
        } else {
            (lo + best_i as f64 * step, best_v)
        });
    }
    Err(Error::UnboundedBelow {
        lo: center - half,
        hi: center + half,
    })
}

fn level_set_extent(potential: &Potential, x0: f64, v_min: f64, e_cap: f64, scale: f64) -> Result<(f64, f64)> {
    const SAMPLES: usize = 8001;
    let mut half = 16.0 * scale;
    for _ in 0..8 {
        let (lo, hi) = (x0 - half, x0 + half);
        let step = (hi - lo) / (SAMPLES - 1) as f64;
        let inside = |i: usize| potential.value(lo + i as f64 * step) - v_min <= e_cap;
        let first = (0..SAMPLES).find(|&i| inside(i));
        let last = (0..SAMPLES).rev().find(|&i| inside(i));
        match (first, last) {
            (Some(f), Some(l)) if f > 0 && l < SAMPLES - 1 => {
                let level = v_min + e_cap;
                let a = bisect_level(potential, lo + (f - 1) as f64 * step, lo + f as f64 * step, level);
                let b = bisect_level(potential, lo + l as f64 * step, lo + (l + 1) as f64 * step, level);
                return Ok((a, b));
            }
            _ => half *= 4.0,
        }
    }
    Err(Error::Unconfined { e_cap, reach: half })
}

/// Point in [a, b] where V crosses `level`, V(a) and V(b) on opposite sides.
fn bisect_level(potential: &Potential, mut a: f64, mut b: f64, level: f64) -> f64 {
    let above_a = potential.value(a) > level;
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        if (potential.value(mid) > level) == above_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    if above_a {
        b
    } else {
        a
    }
}

/// Length l with mean rise of V over +-l equal to hbar^2 / (2 m l^2).
fn quantum_length(potential: &Potential, x0: f64, v_min: f64, m: f64, hbar: f64, scale: f64) -> f64 {
    let f =
        |l: f64| 0.5 * (potential.value(x0 + l) + potential.value(x0 - l)) - v_min - hbar * hbar / (2.0 * m * l * l);
    let (mut a, mut b) = (1e-8 * scale, scale);
    while f(b) < 0.0 && b < 1e8 * scale {
        b *= 2.0;
    }
    for _ in 0..200 {
        let mid = (a * b).sqrt();
        if f(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    (a * b).sqrt()
}

/// Classical Boltzmann mass outside [lo, hi] on each side, relative to the total.
fn classical_tails(potential: &Potential, beta: f64, v_min: f64, lo: f64, hi: f64) -> (f64, f64) {
    let width = hi - lo;
    let n = 4000;
    let h = 3.0 * width / n as f64;
    let mut left = 0.0;
    let mut mid = 0.0;
    let mut right = 0.0;
    for i in 0..=n {
        let x = lo - width + i as f64 * h;
        let w = (-beta * (potential.value(x) - v_min)).exp();
        let w = if w.is_finite() { w } else { 0.0 };
        if x < lo {
            left += w;
        } else if x > hi {
            right += w;
        } else {
            mid += w;
        }
    }
    let total = left + mid + right;
    (left / total, right / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::potential::oh_spectroscopy;

    #[test]
    fn refinement_nests_nodes() {
        let g = Grid::new(-1.0, 2.0, 7).unwrap();
        let r = g.refined();
        assert_eq!(r.len(), 13);
        for i in 0..g.len() {
            assert!((g.x(i) - r.x(2 * i)).abs() < 1e-15);
        }
        let e = g.extended(2, 3);
        assert!((e.spacing() - g.spacing()).abs() < 1e-15);
        assert!((e.x(2) - g.x(0)).abs() < 1e-14);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid::new(0.0, 1.0, 2).is_err());
        assert!(Grid::new(1.0, 1.0, 5).is_err());
    }

    #[test]
    fn trapezoid_of_linear_is_exact() {
        let g = Grid::new(0.0, 2.0, 11).unwrap();
        let v: Vec<f64> = g.points().iter().map(|x| 3.0 * x + 1.0).collect();
        assert!((g.integrate(&v) - 8.0).abs() < 1e-13);
        assert!((g.trapezoid_weights().iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_extent_covers_six_sigma() {
        let p = Potential::harmonic_quartic(1.0, 1.0, 0.0).unwrap();
        let t = ThermoState::new(10.0, 1.0).unwrap();
        let g = auto_grid(&p, &t, 0.999_999).unwrap();
        let sigma = (1.0 / (5f64).tanh() / 2.0).sqrt();
        assert!(g.x_min() <= -6.0 * sigma && g.x_max() >= 6.0 * sigma, "{g:?}");
    }

    #[test]
    fn extent_grows_with_coverage() {
        let p = Potential::harmonic_quartic(1.0, 1.0, 0.1).unwrap();
        let t = ThermoState::new(1.0, 1.0).unwrap();
        let mut prev = 0.0;
        for c in [0.9, 0.99, 0.999_999, 0.999_999_999] {
            let g = auto_grid(&p, &t, c).unwrap();
            let w = g.x_max() - g.x_min();
            assert!(w >= prev);
            prev = w;
        }
    }

    #[test]
    fn morse_grid_stays_below_five_d() {
        let p = Potential::morse_from_spectroscopy(oh_spectroscopy()).unwrap();
        let Potential::Morse { d, .. } = p else { unreachable!() };
        for kelvin in [50.0, 300.0, 1000.0] {
            let beta = crate::model::units::UnitTable::ATOMIC.beta_from_kelvin(kelvin);
            let t = ThermoState::new(beta, crate::model::units::UnitTable::ATOMIC.amu_to_me(0.948)).unwrap();
            let g = auto_grid(&p, &t, 0.999_999).unwrap();
            assert!(g.x_min() > 0.0);
            // scan of V over the grid
            for x in g.points() {
                assert!(p.value(x) < 5.0 * d);
            }
        }
    }

    #[test]
    fn double_well_holds_both_wells() {
        let p = Potential::double_well(1.0, 1.0, 0.1).unwrap();
        let t = ThermoState::new(10.0, 1.0).unwrap();
        let g = auto_grid(&p, &t, 0.999_999).unwrap();
        assert!(g.x_min() < -10f64.sqrt() - 1.0 && g.x_max() > 10f64.sqrt() + 1.0);
    }

    #[test]
    fn unbounded_potentials_fail() {
        let t = ThermoState::new(1.0, 1.0).unwrap();
        let cubic = Potential::monomial_sum(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert!(matches!(auto_grid(&cubic, &t, 0.99), Err(Error::UnboundedBelow { .. })));
        let inverted = Potential::harmonic_quartic(1.0, 1.0, -1.0).unwrap();
        assert!(auto_grid(&inverted, &t, 0.99).is_err());
        let p = Potential::morse(0.1, 1.0, 0.0).unwrap();
        let hot = ThermoState::new(10.0, 1.0).unwrap();
        assert!(matches!(auto_grid(&p, &hot, 0.99), Err(Error::Unconfined { .. })));
        assert!(auto_grid(&p, &hot, 1.0).is_err());
    }
}
