use crate::error::{Error, Result};
use crate::model::Grid;

/// Non-negative function tabulated on a grid, normalized to unit trapezoid
/// integral. `log_normalizer` is ln of the integral of the raw input.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    grid: Grid,
    values: Vec<f64>,
    log_normalizer: f64,
}

impl DensityProfile {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Trapezoid quadrature of `O(x) P(x)`.
    pub fn expectation(&self, observable: impl Fn(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self
            .grid
            .points()
            .into_iter()
            .zip(&self.values)
            .map(|(x, p)| observable(x) * p)
            .collect();
        self.grid.integrate(&vals)
    }

    pub fn mean(&self) -> f64 {
        self.expectation(|x| x)
    }

    pub fn second_moment(&self) -> f64 {
        self.expectation(|x| x * x)
    }

    /// Positions of interior local maxima, refined by a parabola through the
    /// three nodes around each.
    pub fn local_maxima(&self) -> Vec<f64> {
        let v = &self.values;
        let h = self.grid.spacing();
        let peak = v.iter().cloned().fold(0.0, f64::max);
        (1..v.len() - 1)
            .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1] && v[i] > 1e-6 * peak)
            .map(|i| {
                let denom = v[i - 1] - 2.0 * v[i] + v[i + 1];
                let shift = if denom < 0.0 {
                    0.5 * (v[i - 1] - v[i + 1]) / denom
                } else {
                    0.0
                };
                self.grid.x(i) + shift * h
            })
            .collect()
    }
}

/// Normalize a tabulated non-negative function on `grid`.
pub fn normalize(raw: &[f64], grid: &Grid) -> Result<DensityProfile> {
    if raw.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values for a {}-point grid",
            raw.len(),
            grid.len()
        )));
    }
    if let Some(bad) = raw.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Normalization(format!(
            "value {bad} is not a finite non-negative number"
        )));
    }
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    if peak <= 0.0 {
        return Err(Error::Normalization("all values are zero".into()));
    }
    let integral = grid.integrate(raw);
    // mass concentrated on a single node is not a resolved density
    if integral / peak < 1.5 * grid.spacing() {
        return Err(Error::Normalization(format!(
            "support narrower than the grid spacing (effective width {:.3e}, spacing {:.3e})",
            integral / peak,
            grid.spacing()
        )));
    }
    Ok(DensityProfile {
        grid: *grid,
        values: raw.iter().map(|v| v / integral).collect(),
        log_normalizer: integral.ln(),
    })
}

/// Normalize a density given by its logarithm, without forming the raw values.
/// Entries of `-inf` mean zero density.
pub fn normalize_log(log_raw: &[f64], grid: &Grid) -> Result<DensityProfile> {
    if log_raw.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values for a {}-point grid",
            log_raw.len(),
            grid.len()
        )));
    }
    if let Some(bad) = log_raw.iter().find(|v| v.is_nan() || **v == f64::INFINITY) {
        return Err(Error::Normalization(format!("log-density value {bad} is not usable")));
    }
    let top = log_raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return Err(Error::Normalization("all values are zero".into()));
    }
    let scaled: Vec<f64> = log_raw.iter().map(|l| (l - top).exp()).collect();
    let mut profile = normalize(&scaled, grid)?;
    profile.log_normalizer += top;
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_on_unit_interval() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        let p = normalize(&[3.0; 11], &g).unwrap();
        assert!(p.values().iter().all(|v| (v - 1.0).abs() < 1e-14));
        assert!((p.log_normalizer() - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn gaussian_log_normalizer() {
        let g = Grid::new(-12.0, 12.0, 2001).unwrap();
        let raw: Vec<f64> = g.points().iter().map(|x| (-x * x).exp()).collect();
        let p = normalize(&raw, &g).unwrap();
        let expected = std::f64::consts::PI.sqrt().ln();
        assert!((p.log_normalizer() - expected).abs() < 1e-10);
        assert!((g.integrate(p.values()) - 1.0).abs() < 1e-12);
        // same answer from the log route with a huge offset
        let logs: Vec<f64> = g.points().iter().map(|x| 1000.0 - x * x).collect();
        let q = normalize_log(&logs, &g).unwrap();
        assert!((q.log_normalizer() - (expected + 1000.0)).abs() < 1e-10);
        for (a, b) in p.values().iter().zip(q.values()) {
            assert!((a - b).abs() < 1e-13 * a.max(1e-300) + 1e-300);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        let g = Grid::new(0.0, 1.0, 11).unwrap();
        assert!(matches!(normalize(&[0.0; 11], &g), Err(Error::Normalization(_))));
        let mut spike = vec![0.0; 11];
        spike[5] = 1.0;
        assert!(matches!(normalize(&spike, &g), Err(Error::Normalization(_))));
        let mut nan = vec![1.0; 11];
        nan[3] = f64::NAN;
        assert!(normalize(&nan, &g).is_err());
        assert!(matches!(normalize(&[1.0; 4], &g), Err(Error::GridMismatch(_))));
        assert!(normalize_log(&[f64::NEG_INFINITY; 11], &g).is_err());
    }

    #[test]
    fn expectation_is_linear() {
        let g = Grid::new(-5.0, 5.0, 201).unwrap();
        let raw: Vec<f64> = g.points().iter().map(|x| (-(x - 0.3) * (x - 0.3)).exp()).collect();
        let p = normalize(&raw, &g).unwrap();
        assert!((p.expectation(|_| 1.0) - 1.0).abs() < 1e-12);
        let a = p.expectation(|x| x * x);
        let b = p.expectation(|x| x.sin());
        let c = p.expectation(|x| 2.5 * x * x - 3.0 * x.sin());
        assert!((c - (2.5 * a - 3.0 * b)).abs() < 1e-12);
    }

    #[test]
    fn maxima_of_bimodal() {
        let g = Grid::new(-4.0, 4.0, 401).unwrap();
        let raw: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-4.0 * (x - 1.5) * (x - 1.5)).exp() + (-4.0 * (x + 1.5) * (x + 1.5)).exp())
            .collect();
        let m = normalize(&raw, &g).unwrap().local_maxima();
        assert_eq!(m.len(), 2);
        assert!((m[0] + 1.5).abs() < 1e-3 && (m[1] - 1.5).abs() < 1e-3);
    }
}
