//! Gaussian smearing `V_{a^2}(x) = E[V(x + a Z)]`, `Z ~ N(0, 1)`.
//!
//! Polynomials use the closed-form moment sum. Everything else goes through
//! Gauss-Hermite quadrature with node doubling until the result is stable.

mod hermite;

use crate::error::{Error, Result};
use crate::model::Potential;
pub use hermite::{gauss_hermite_rule, HermiteRule};

/// Smallest node count accepted for quadrature mode.
pub const MIN_NODES: usize = 40;
/// Node count at which doubling stops.
pub const MAX_NODES: usize = 320;
/// Relative stability demanded under node doubling.
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;
/// Changes below this absolute size (energy units) count as stable.
pub const QUADRATURE_ABS_FLOOR: f64 = 1e-20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmearMode {
    AnalyticPolynomial,
    GaussHermite { nodes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearKernel {
    a2: f64,
    mode: SmearMode,
}

impl SmearKernel {
    pub fn new(a2: f64, mode: SmearMode) -> Result<Self> {
        if !(a2.is_finite() && a2 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "smearing variance must be finite and >= 0, got {a2}"
            )));
        }
        if let SmearMode::GaussHermite { nodes } = mode {
            if !(MIN_NODES..=MAX_NODES).contains(&nodes) {
                return Err(Error::InvalidParameter(format!(
                    "Gauss-Hermite node count must lie in [{MIN_NODES}, {MAX_NODES}], got {nodes}"
                )));
            }
        }
        Ok(Self { a2, mode })
    }

    /// Analytic mode for polynomials, quadrature otherwise.
    pub fn for_potential(potential: &Potential, a2: f64) -> Result<Self> {
        let mode = if potential.is_polynomial() {
            SmearMode::AnalyticPolynomial
        } else {
            SmearMode::GaussHermite { nodes: MIN_NODES }
        };
        Self::new(a2, mode)
    }

    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn mode(&self) -> SmearMode {
        self.mode
    }

    pub fn with_a2(&self, a2: f64) -> Result<Self> {
        Self::new(a2, self.mode)
    }
}

/// `V_{a^2}(xbar)`.
pub fn smear(potential: &Potential, kernel: &SmearKernel, xbar: f64) -> Result<f64> {
    if kernel.a2 == 0.0 {
        return Ok(potential.value(xbar));
    }
    match kernel.mode {
        SmearMode::AnalyticPolynomial => {
            let c = polynomial(potential)?;
            Ok(smeared_polynomial(&c, kernel.a2, xbar, 0))
        }
        SmearMode::GaussHermite { nodes } => adaptive(|x| potential.value(x), kernel.a2, xbar, nodes),
    }
}

/// `d^2/dxbar^2 V_{a^2}(xbar)`, equal to the smearing of `V''`.
pub fn smear_second_derivative(potential: &Potential, kernel: &SmearKernel, xbar: f64) -> Result<f64> {
    if kernel.a2 == 0.0 {
        return Ok(potential.evaluate(xbar).second);
    }
    match kernel.mode {
        SmearMode::AnalyticPolynomial => {
            let c = polynomial(potential)?;
            Ok(smeared_polynomial(&c, kernel.a2, xbar, 2))
        }
        SmearMode::GaussHermite { nodes } => adaptive(|x| potential.evaluate(x).second, kernel.a2, xbar, nodes),
    }
}

fn polynomial(potential: &Potential) -> Result<Vec<f64>> {
    potential
        .polynomial_coefficients()
        .ok_or(Error::ModeMismatch(potential.name()))
}

/// `order`-th derivative (0 or 2) of the smeared polynomial with ascending
/// coefficients `c`: sum over n, p of C(n, 2p) (2p-1)!! a^{2p} d^k/dx^k x^{n-2p}.
fn smeared_polynomial(c: &[f64], a2: f64, x: f64, order: u32) -> f64 {
    let mut total = 0.0;
    for (n, &cn) in c.iter().enumerate() {
        if cn == 0.0 {
            continue;
        }
        let mut binom = 1.0; // C(n, 2p)
        let mut dfact = 1.0; // (2p - 1)!!
        let mut a_pow = 1.0; // a^{2p}
        let mut p = 0;
        while 2 * p <= n {
            let k = n - 2 * p;
            let falling = match order {
                0 => 1.0,
                _ if k < 2 => 0.0,
                _ => (k * (k - 1)) as f64,
            };
            if falling != 0.0 {
                let power = if order == 0 { k } else { k - 2 };
                total += cn * binom * dfact * a_pow * falling * x.powi(power as i32);
            }
            if 2 * p + 2 > n {
                break;
            }
            binom *= ((n - 2 * p) * (n - 2 * p - 1)) as f64 / ((2 * p + 1) * (2 * p + 2)) as f64;
            dfact *= (2 * p + 1) as f64;
            a_pow *= a2;
            p += 1;
        }
    }
    total
}

fn quadrature(f: &impl Fn(f64) -> f64, rule: &HermiteRule, a2: f64, xbar: f64) -> (f64, f64) {
    let scale = (2.0 * a2).sqrt();
    let mut sum = 0.0;
    let mut abs = 0.0;
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(xbar + scale * t);
        sum += w * v;
        abs += w * v.abs();
    }
    let norm = std::f64::consts::PI.sqrt();
    (sum / norm, abs / norm)
}

fn adaptive(f: impl Fn(f64) -> f64, a2: f64, xbar: f64, start: usize) -> Result<f64> {
    let mut nodes = start;
    let (mut prev, _) = quadrature(&f, &gauss_hermite_rule(nodes), a2, xbar);
    let mut change = f64::INFINITY;
    while nodes * 2 <= MAX_NODES {
        nodes *= 2;
        let (next, abs) = quadrature(&f, &gauss_hermite_rule(nodes), a2, xbar);
        change = (next - prev).abs();
        if !next.is_finite() {
            break;
        }
        if change <= QUADRATURE_TOLERANCE * abs + QUADRATURE_ABS_FLOOR {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::QuadratureNotConverged { x: xbar, nodes, change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::oh_spectroscopy;
    use proptest::prelude::*;

    fn analytic(a2: f64) -> SmearKernel {
        SmearKernel::new(a2, SmearMode::AnalyticPolynomial).unwrap()
    }

    fn quad(a2: f64) -> SmearKernel {
        SmearKernel::new(a2, SmearMode::GaussHermite { nodes: 40 }).unwrap()
    }

    fn morse_oh() -> Potential {
        Potential::morse_from_spectroscopy(oh_spectroscopy()).unwrap()
    }

    /// E[exp(-k alpha (x + aZ - x_e))] in closed form.
    fn morse_smeared(p: &Potential, a2: f64, x: f64) -> (f64, f64) {
        let Potential::Morse { d, alpha, x_e } = *p else {
            unreachable!()
        };
        let e = |k: f64| (-k * alpha * (x - x_e) + 0.5 * k * k * alpha * alpha * a2).exp();
        let value = d * (1.0 - 2.0 * e(1.0) + e(2.0));
        let second = d * alpha * alpha * (-2.0 * e(1.0) + 4.0 * e(2.0));
        (value, second)
    }

    #[test]
    fn pure_quartic_moments() {
        let p = Potential::monomial_sum(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        for (a2, x) in [(0.3f64, 1.7f64), (1.0, -0.4), (0.05, 0.0)] {
            let expect = x.powi(4) + 6.0 * a2 * x * x + 3.0 * a2 * a2;
            assert!((smear(&p, &analytic(a2), x).unwrap() - expect).abs() < 1e-12);
            let curv = 12.0 * x * x + 12.0 * a2;
            assert!((smear_second_derivative(&p, &analytic(a2), x).unwrap() - curv).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_width_is_identity() {
        for p in [morse_oh(), Potential::double_well(1.0, 1.0, 0.3).unwrap()] {
            let k = SmearKernel::for_potential(&p, 0.0).unwrap();
            for x in [1.2, 1.8, 2.5] {
                assert_eq!(smear(&p, &k, x).unwrap(), p.value(x));
                assert_eq!(smear_second_derivative(&p, &k, x).unwrap(), p.evaluate(x).second);
            }
        }
    }

    #[test]
    fn harmonic_curvature_is_constant() {
        let p = Potential::harmonic_quartic(1.7, 0.8, 0.0).unwrap();
        for a2 in [0.0, 0.2, 3.0] {
            for x in [-2.0, 0.0, 1.1] {
                let c = smear_second_derivative(&p, &analytic(a2), x).unwrap();
                assert!((c - 1.7 * 0.64).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn morse_quadrature_is_stable_and_exact() {
        let p = morse_oh();
        let Potential::Morse { x_e, d, .. } = p else {
            unreachable!()
        };
        let a2 = 0.01;
        let (r40, _) = quadrature(&|x| p.value(x), &gauss_hermite_rule(40), a2, x_e);
        let (r80, _) = quadrature(&|x| p.value(x), &gauss_hermite_rule(80), a2, x_e);
        assert!((r40 - r80).abs() < 1e-10 * d);
        let (exact, exact2) = morse_smeared(&p, a2, x_e);
        let got = smear(&p, &quad(a2), x_e).unwrap();
        assert!((got - exact).abs() < 1e-10 * exact.abs());
        let got2 = smear_second_derivative(&p, &quad(a2), x_e).unwrap();
        assert!((got2 - exact2).abs() < 1e-10 * exact2.abs());
    }

    #[test]
    fn morse_curvature_matches_finite_difference() {
        let p = morse_oh();
        let k = quad(0.02);
        for x in [1.4, 1.83, 2.6] {
            let h = 1e-3;
            let fd = (smear(&p, &k, x + h).unwrap() - 2.0 * smear(&p, &k, x).unwrap() + smear(&p, &k, x - h).unwrap())
                / (h * h);
            let c = smear_second_derivative(&p, &k, x).unwrap();
            assert!((fd - c).abs() < 1e-6 * c.abs().max(1.0), "{fd} vs {c}");
        }
    }

    #[test]
    fn analytic_mode_rejects_morse() {
        assert!(matches!(
            smear(&morse_oh(), &analytic(0.1), 1.0),
            Err(Error::ModeMismatch(_))
        ));
    }

    #[test]
    fn invalid_kernels() {
        assert!(SmearKernel::new(-1e-3, SmearMode::AnalyticPolynomial).is_err());
        assert!(SmearKernel::new(0.1, SmearMode::GaussHermite { nodes: 20 }).is_err());
        assert!(SmearKernel::new(f64::NAN, SmearMode::AnalyticPolynomial).is_err());
    }

    #[test]
    fn quadrature_gives_up_on_superexponential_growth() {
        let p = Potential::morse(1.0, 60.0, 0.0).unwrap();
        assert!(matches!(
            smear(&p, &quad(1.0), 0.0),
            Err(Error::QuadratureNotConverged { .. })
        ));
    }

    proptest! {
        #[test]
        fn modes_agree_on_quartic_family(
            m in 0.5f64..2.0, w in 0.0f64..2.0, g in 0.0f64..2.0, a2 in 0.0f64..1.0, x in -3.0f64..3.0,
            double in proptest::bool::ANY,
        ) {
            let p = if double {
                Potential::double_well(m, w.max(0.1), g.max(0.05)).unwrap()
            } else {
                Potential::harmonic_quartic(m, w, g).unwrap()
            };
            let a = smear(&p, &analytic(a2), x).unwrap();
            let q = smear(&p, &quad(a2), x).unwrap();
            prop_assert!((a - q).abs() < 1e-9 * a.abs().max(1.0));
            let a = smear_second_derivative(&p, &analytic(a2), x).unwrap();
            let q = smear_second_derivative(&p, &quad(a2), x).unwrap();
            prop_assert!((a - q).abs() < 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn constant_shift_commutes(c in proptest::collection::vec(-2.0f64..2.0, 1..8), shift in -5.0f64..5.0,
                                   a2 in 0.0f64..1.0, x in -2.0f64..2.0) {
            let p = Potential::monomial_sum(c.clone()).unwrap();
            let mut c2 = c;
            c2[0] += shift;
            let q = Potential::monomial_sum(c2).unwrap();
            let (a, b) = (smear(&p, &analytic(a2), x).unwrap(), smear(&q, &analytic(a2), x).unwrap());
            prop_assert!((b - a - shift).abs() < 1e-9 * a.abs().max(1.0));
        }

        #[test]
        fn convex_quartics_stay_convex(m in 0.5f64..2.0, w in 0.0f64..2.0, g in 0.0f64..2.0, a2 in 0.0f64..1.0) {
            let p = Potential::harmonic_quartic(m, w, g).unwrap();
            let k = analytic(a2);
            let xs: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();
            let v: Vec<f64> = xs.iter().map(|&x| smear(&p, &k, x).unwrap()).collect();
            for i in 1..v.len() - 1 {
                prop_assert!(v[i - 1] - 2.0 * v[i] + v[i + 1] >= -1e-12 * v[i].abs().max(1.0));
            }
        }
    }
}
