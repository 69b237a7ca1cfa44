use crate::error::{Error, Result};
use crate::model::Potential;
use crate::stats::DensityProfile;

/// Probability floor inside the KL logarithm.
pub const KL_FLOOR: f64 = 1e-300;

/// Distances and moment differences between a reference density and a
/// candidate on the same grid. Deltas are `candidate - reference`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonReport {
    pub l1_distance: f64,
    /// `KL(reference || candidate)`.
    pub kl_divergence: f64,
    pub js_divergence: f64,
    pub delta_mean: f64,
    pub delta_second_moment: f64,
    /// Present when a potential was supplied.
    pub delta_potential: Option<f64>,
}

/// Compare two densities. `potential` adds the `<V>` difference.
pub fn compare(
    reference: &DensityProfile,
    candidate: &DensityProfile,
    potential: Option<&Potential>,
) -> Result<ComparisonReport> {
    let grid = reference.grid();
    if !grid.same_as(candidate.grid()) {
        return Err(Error::GridMismatch(format!(
            "reference on [{}, {}] with {} points, candidate on [{}, {}] with {} points",
            grid.x_min(),
            grid.x_max(),
            grid.len(),
            candidate.grid().x_min(),
            candidate.grid().x_max(),
            candidate.grid().len()
        )));
    }
    let w = grid.trapezoid_weights();
    let (p, q) = (reference.values(), candidate.values());
    let l1: f64 = (0..w.len()).map(|i| w[i] * (p[i] - q[i]).abs()).sum();
    let mid: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let js = 0.5 * kl(&w, p, &mid) + 0.5 * kl(&w, q, &mid);
    Ok(ComparisonReport {
        l1_distance: l1.clamp(0.0, 2.0),
        kl_divergence: kl(&w, p, q),
        js_divergence: js.clamp(0.0, std::f64::consts::LN_2),
        delta_mean: candidate.mean() - reference.mean(),
        delta_second_moment: candidate.second_moment() - reference.second_moment(),
        delta_potential: potential
            .map(|v| candidate.expectation(|x| v.value(x)) - reference.expectation(|x| v.value(x))),
    })
}

fn kl(w: &[f64], p: &[f64], q: &[f64]) -> f64 {
    let sum: f64 = (0..w.len())
        .filter(|&i| p[i] > 0.0)
        .map(|i| w[i] * p[i] * (p[i] / q[i].max(KL_FLOOR)).ln())
        .sum();
    sum.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Grid;
    use crate::stats::normalize;

    fn profile(grid: &Grid, f: impl Fn(f64) -> f64) -> DensityProfile {
        normalize(&grid.points().iter().map(|&x| f(x)).collect::<Vec<_>>(), grid).unwrap()
    }

    #[test]
    fn identical_densities() {
        let g = Grid::new(-5.0, 5.0, 201).unwrap();
        let p = profile(&g, |x| (-x * x).exp());
        let pot = Potential::harmonic_quartic(1.0, 1.0, 0.0).unwrap();
        let r = compare(&p, &p, Some(&pot)).unwrap();
        assert_eq!(r.l1_distance, 0.0);
        assert_eq!(r.kl_divergence, 0.0);
        assert_eq!(r.js_divergence, 0.0);
        assert_eq!(r.delta_mean, 0.0);
        assert_eq!(r.delta_potential, Some(0.0));
    }

    #[test]
    fn disjoint_boxes() {
        let g = Grid::new(0.0, 4.0, 401).unwrap();
        let a = profile(&g, |x| if x < 1.5 { 1.0 } else { 0.0 });
        let b = profile(&g, |x| if x > 2.5 { 1.0 } else { 0.0 });
        let r = compare(&a, &b, None).unwrap();
        assert!((r.l1_distance - 2.0).abs() < 1e-12);
        assert!((r.js_divergence - std::f64::consts::LN_2).abs() < 1e-12);
        assert!(r.kl_divergence > 600.0);
        assert!(r.delta_potential.is_none());
    }

    #[test]
    fn gaussian_shift_kl() {
        // KL between unit Gaussians a distance d apart is d^2 / 2
        let g = Grid::new(-12.0, 12.0, 2401).unwrap();
        let a = profile(&g, |x| (-0.5 * x * x).exp());
        let b = profile(&g, |x| (-0.5 * (x - 0.3) * (x - 0.3)).exp());
        let r = compare(&a, &b, None).unwrap();
        assert!((r.kl_divergence - 0.045).abs() < 1e-9);
        assert!((r.delta_mean - 0.3).abs() < 1e-12);
        assert!((r.delta_second_moment - 0.09).abs() < 1e-10);
        let back = compare(&b, &a, None).unwrap();
        assert!((back.l1_distance - r.l1_distance).abs() < 1e-15);
    }

    #[test]
    fn grid_mismatch() {
        let a = profile(&Grid::new(0.0, 1.0, 11).unwrap(), |_| 1.0);
        let b = profile(&Grid::new(0.0, 1.0, 21).unwrap(), |_| 1.0);
        assert!(matches!(compare(&a, &b, None), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn zero_candidate_bins_are_floored() {
        let g = Grid::new(0.0, 1.0, 101).unwrap();
        let a = profile(&g, |_| 1.0);
        let b = profile(&g, |x| if x < 0.5 { 1.0 } else { 0.0 });
        let r = compare(&a, &b, None).unwrap();
        assert!(r.kl_divergence.is_finite() && r.kl_divergence > 100.0);
        assert!(r.js_divergence <= std::f64::consts::LN_2);
    }
}
