//! Selected eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration with a pivoted tridiagonal LU, followed by Gram-Schmidt within
//! clusters of close eigenvalues.

use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    off_sq: Vec<f64>,
    pivmin: f64,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty(), "empty matrix");
        assert_eq!(off.len() + 1, diag.len(), "off-diagonal length");
        let off_sq: Vec<f64> = off.iter().map(|e| e * e).collect();
        let pivmin = f64::MIN_POSITIVE * off_sq.iter().cloned().fold(1.0f64, f64::max);
        Self {
            diag,
            off,
            off_sq,
            pivmin,
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let pivmin = self.pivmin;
        let mut q = self.diag[0] - lambda;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        let mut count = usize::from(q < 0.0);
        for (d, e2) in self.diag[1..].iter().zip(&self.off_sq) {
            q = d - lambda - e2 / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.bisect(k, 0.0)
    }

    /// Bisection for the `k`-th eigenvalue until the bracket is narrower than
    /// `width` or than working precision.
    fn bisect(&self, k: usize, width: f64) -> f64 {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm_bound() * 4.0 + self.pivmin;
        lo -= pad;
        hi += pad;
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= width.max(2.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        let count = count.min(self.dim());
        (0..count).into_par_iter().map(|k| self.eigenvalue(k)).collect()
    }

    /// Unit eigenvector for an eigenvalue computed to working accuracy.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let lu = TridiagLu::factor(self, lambda);
        // deterministic, non-degenerate start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_749_895).fract() - 0.5))
            .collect();
        for _ in 0..5 {
            lu.solve(&mut v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm.is_finite() && norm > 0.0) {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        fix_sign(&mut v);
        v
    }

    fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut num = 0.0;
        for i in 0..n {
            let mut tv = self.diag[i] * v[i];
            if i > 0 {
                tv += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                tv += self.off[i] * v[i + 1];
            }
            num += v[i] * tv;
        }
        num / v.iter().map(|x| x * x).sum::<f64>()
    }

    /// Lowest `count` eigenpairs with unit Euclidean eigenvectors.
    ///
    /// Well-separated eigenvalues are bisected only to a coarse bracket and
    /// then replaced by the Rayleigh quotient of their inverse-iteration
    /// eigenvector; close ones are bisected to full precision.
    pub fn lowest_eigenpairs(&self, count: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        let count = count.min(self.dim());
        let width = COARSE_WIDTH * self.norm_bound();
        let probe = (count + 1).min(self.dim());
        let coarse: Vec<f64> = (0..probe).into_par_iter().map(|k| self.bisect(k, width)).collect();
        let isolated = |k: usize| {
            let below = k == 0 || coarse[k] - coarse[k - 1] > ISOLATION * width;
            let above = k + 1 >= probe || coarse[k + 1] - coarse[k] > ISOLATION * width;
            below && above
        };
        let pairs: Vec<(f64, Vec<f64>)> = (0..count)
            .into_par_iter()
            .map(|k| {
                if isolated(k) {
                    let v = self.eigenvector(coarse[k]);
                    (self.rayleigh_quotient(&v), v)
                } else {
                    let l = self.bisect(k, 0.0);
                    (l, self.eigenvector(l))
                }
            })
            .collect();
        let (values, mut vectors): (Vec<f64>, Vec<Vec<f64>>) = pairs.into_iter().unzip();
        let threshold = CLUSTER_GAP * self.norm_bound();
        // modified Gram-Schmidt inside clusters
        let mut start = 0;
        for k in 1..vectors.len() {
            if values[k] - values[k - 1] > threshold {
                start = k;
                continue;
            }
            let (done, rest) = vectors.split_at_mut(k);
            let v = &mut rest[0];
            for u in &done[start..k] {
                let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            fix_sign(v);
        }
        (values, vectors)
    }
}

/// Relative eigenvalue gap, as a fraction of the matrix norm, below which
/// eigenvectors are explicitly orthogonalized.
const CLUSTER_GAP: f64 = 1e-5;

/// Coarse bisection bracket, as a fraction of the matrix norm.
const COARSE_WIDTH: f64 = 1e-10;

/// Gap, in units of the coarse bracket, that counts as well separated.
const ISOLATION: f64 = 1e3;

fn fix_sign(v: &mut [f64]) {
    // largest component positive
    let mut best = 0.0f64;
    for &x in v.iter() {
        if x.abs() > best.abs() {
            best = x;
        }
    }
    if best < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// LU factorization of `T - shift I` with partial pivoting (two super-diagonals
/// of fill).
struct TridiagLu {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagLu {
    fn factor(t: &SymTridiagonal, shift: f64) -> Self {
        let n = t.dim();
        let mut d: Vec<f64> = t.diag.iter().map(|x| x - shift).collect();
        let mut dl = t.off.clone();
        let mut du = t.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        let tiny = f64::EPSILON * t.norm_bound();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1])
    }

    #[test]
    fn discrete_laplacian_spectrum() {
        // eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 50;
        let t = laplacian(n);
        let vals = t.lowest_eigenvalues(n);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / (n + 1) as f64).cos();
            assert!((v - exact).abs() < 1e-13, "k={k}: {v} vs {exact}");
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal_and_satisfy_equation() {
        let n = 200;
        let diag: Vec<f64> = (0..n).map(|i| 2.0 + 0.01 * (i as f64 - 100.0).powi(2)).collect();
        let t = SymTridiagonal::new(diag, vec![-1.0; n - 1]);
        let (vals, vecs) = t.lowest_eigenpairs(12);
        for (i, v) in vecs.iter().enumerate() {
            // residual
            let mut r = 0.0f64;
            for j in 0..n {
                let mut tv = t.diag[j] * v[j];
                if j > 0 {
                    tv += t.off[j - 1] * v[j - 1];
                }
                if j + 1 < n {
                    tv += t.off[j] * v[j + 1];
                }
                r = r.max((tv - vals[i] * v[j]).abs());
            }
            assert!(r < 1e-12, "residual {r}");
            for (k, u) in vecs.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                let expect = if i == k { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-11, "<{i}|{k}> = {dot}");
            }
        }
        // ground state has one sign
        assert!(vecs[0].iter().all(|&x| x > 0.0));
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let t = laplacian(30);
        assert_eq!(t.count_below(-1.0), 0);
        assert_eq!(t.count_below(5.0), 30);
        assert_eq!(t.count_below(2.0 + 1e-9), 15);
    }

    #[test]
    fn one_by_one() {
        let t = SymTridiagonal::new(vec![3.5], vec![]);
        let (v, e) = t.lowest_eigenpairs(1);
        assert!((v[0] - 3.5).abs() < 1e-14);
        assert_eq!(e[0], vec![1.0]);
    }
}
