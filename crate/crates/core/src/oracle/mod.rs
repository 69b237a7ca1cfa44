//! Numerically exact thermal position density from the discretized Hamiltonian.
//!
//! The kinetic term uses second-order central differences with Dirichlet ends.
//! Only the eigenpairs whose Boltzmann weight relative to the ground state
//! exceeds [`WEIGHT_FLOOR`] are computed. [`converge`] refines the grid by
//! halving the spacing and Richardson-extrapolates successive levels; it stops
//! when two successive extrapolated densities agree in L1.

pub mod tridiag;

use crate::error::{Error, Result};
use crate::model::{auto_grid, Grid, Potential, ThermoState};
use crate::stats::density::{normalize, DensityProfile};
pub use tridiag::SymTridiagonal;

/// Relative Boltzmann weight below which eigenpairs are dropped.
pub const WEIGHT_FLOOR: f64 = 1e-14;
/// Most eigenvector entries one solve may hold (about 320 MB).
pub const EIGENVECTOR_BUDGET: usize = 40_000_000;

/// Finite-difference Hamiltonian on the interior nodes of `grid`.
pub fn discretize_hamiltonian(potential: &Potential, thermo: &ThermoState, grid: &Grid) -> SymTridiagonal {
    let h = grid.spacing();
    let t = thermo.hbar() * thermo.hbar() / (2.0 * thermo.mass() * h * h);
    let n = grid.len() - 2;
    let diag = (1..=n).map(|i| 2.0 * t + potential.value(grid.x(i))).collect();
    SymTridiagonal::new(diag, vec![-t; n.saturating_sub(1)])
}

/// Retained eigenpairs on a grid. Eigenvectors cover every grid node (zero at
/// both ends) and are normalized as `sum_i psi_i^2 h = 1`.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub grid: Grid,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

impl SpectralSolution {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigenpairs of the discretized Hamiltonian needed at inverse temperature
/// `thermo.beta()`.
pub fn solve(potential: &Potential, thermo: &ThermoState, grid: &Grid) -> Result<SpectralSolution> {
    let ham = discretize_hamiltonian(potential, thermo, grid);
    let dim = ham.dim();
    let e0 = ham.eigenvalue(0);
    let span = -WEIGHT_FLOOR.ln() / thermo.beta();
    let retained = ham.count_below(e0 + span).max(1);
    if retained >= dim {
        let top = ham.eigenvalue(dim - 1);
        return Err(Error::TruncationNotConverged {
            retained,
            span: top - e0,
            needed: span,
        });
    }
    if retained.saturating_mul(dim) > EIGENVECTOR_BUDGET {
        return Err(Error::OracleBudget {
            retained,
            n_points: grid.len(),
            budget: EIGENVECTOR_BUDGET,
        });
    }
    let (eigenvalues, vectors) = ham.lowest_eigenpairs(retained);
    let scale = 1.0 / grid.spacing().sqrt();
    let eigenvectors = vectors
        .into_iter()
        .map(|v| {
            let mut full = Vec::with_capacity(grid.len());
            full.push(0.0);
            full.extend(v.iter().map(|x| x * scale));
            full.push(0.0);
            full
        })
        .collect();
    Ok(SpectralSolution {
        grid: *grid,
        eigenvalues,
        eigenvectors,
    })
}

/// Diagonal Boltzmann density with its partition function.
#[derive(Debug, Clone)]
pub struct ThermalDensity {
    pub profile: DensityProfile,
    /// ln Z_QM = ln sum_n exp(-beta E_n)
    pub ln_z: f64,
}

impl ThermalDensity {
    pub fn z(&self) -> f64 {
        self.ln_z.exp()
    }

    pub fn free_energy(&self, beta: f64) -> f64 {
        -self.ln_z / beta
    }

    /// Effective potential -ln(rho)/beta + ln(m / 2 pi beta hbar^2) / (2 beta),
    /// with rho floored at 1e-300 where the density vanishes.
    pub fn effective_potential(&self, thermo: &ThermoState) -> Vec<f64> {
        let beta = thermo.beta();
        self.profile
            .values()
            .iter()
            .map(|p| {
                let ln_rho = p.max(1e-300).ln() + self.ln_z;
                -ln_rho / beta + thermo.ln_free_prefactor() / beta
            })
            .collect()
    }
}

/// rho(x) = sum_n exp(-beta E_n) |psi_n(x)|^2, normalized to P_QM.
pub fn thermal_density(solution: &SpectralSolution, thermo: &ThermoState) -> Result<ThermalDensity> {
    let beta = thermo.beta();
    let e0 = solution.ground_energy();
    let weights: Vec<f64> = solution.eigenvalues.iter().map(|e| (-beta * (e - e0)).exp()).collect();
    let n = solution.grid.len();
    let mut rho = vec![0.0; n];
    for (w, psi) in weights.iter().zip(&solution.eigenvectors) {
        for (r, p) in rho.iter_mut().zip(psi) {
            *r += w * p * p;
        }
    }
    let ln_z = -beta * e0 + weights.iter().sum::<f64>().ln();
    Ok(ThermalDensity {
        profile: normalize(&rho, &solution.grid)?,
        ln_z,
    })
}

/// Trapezoid expectation of an observable over a normalized density.
pub fn expectation(profile: &DensityProfile, observable: impl Fn(f64) -> f64) -> f64 {
    profile.expectation(observable)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefinementEvent {
    /// Solved on a grid; `delta` is the L1 change of the extrapolated density
    /// against the previous extrapolation, when one exists.
    Solved {
        n_points: usize,
        retained: usize,
        delta: Option<f64>,
    },
    /// Too few eigenpairs fit on the grid for the requested temperature.
    Truncated { n_points: usize },
    /// Boundary mass exceeded the limit; the base grid grew.
    Extended { boundary_mass: f64, n_points: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergeOptions {
    pub tolerance: f64,
    pub max_doublings: usize,
    pub boundary_mass_limit: f64,
    pub max_extensions: usize,
}

impl Default for ConvergeOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_doublings: 12,
            boundary_mass_limit: 1e-10,
            max_extensions: 8,
        }
    }
}

/// Converged oracle result tabulated on the (possibly extended) base grid.
#[derive(Debug, Clone)]
pub struct ConvergedOracle {
    pub density: ThermalDensity,
    pub finest: SpectralSolution,
    pub log: Vec<RefinementEvent>,
}

impl ConvergedOracle {
    pub fn grid(&self) -> &Grid {
        self.density.profile.grid()
    }
}

/// Converge the oracle starting from [`auto_grid`].
pub fn converge(potential: &Potential, thermo: &ThermoState, coverage: f64) -> Result<ConvergedOracle> {
    let grid = auto_grid(potential, thermo, coverage)?;
    converge_on(potential, thermo, &grid, &ConvergeOptions::default())
}

/// Converge the oracle with results restricted to the nodes of `base`.
pub fn converge_on(
    potential: &Potential,
    thermo: &ThermoState,
    base: &Grid,
    opts: &ConvergeOptions,
) -> Result<ConvergedOracle> {
    let mut base = *base;
    let mut log = Vec::new();
    let mut extensions = 0;
    'restart: loop {
        let mut grid = base;
        // previous level: (stride to base nodes, rho/Z restricted to base nodes, ln Z)
        let mut previous: Option<(Vec<f64>, f64)> = None;
        let mut previous_extrapolation: Option<(Vec<f64>, f64)> = None;
        let mut last_delta = f64::NAN;
        for level in 0..=opts.max_doublings {
            let stride = 1usize << level;
            let solution = match solve(potential, thermo, &grid) {
                Ok(s) => s,
                Err(Error::TruncationNotConverged { .. }) => {
                    log.push(RefinementEvent::Truncated { n_points: grid.len() });
                    previous = None;
                    previous_extrapolation = None;
                    grid = grid.refined();
                    continue;
                }
                Err(e) => return Err(e),
            };
            let dens = thermal_density(&solution, thermo)?;

            if extensions < opts.max_extensions {
                let (left, right) = boundary_mass(&dens.profile);
                if left > opts.boundary_mass_limit || right > opts.boundary_mass_limit {
                    let grow = (base.len() / 4).max(2);
                    base = base.extended(
                        if left > opts.boundary_mass_limit { grow } else { 0 },
                        if right > opts.boundary_mass_limit { grow } else { 0 },
                    );
                    extensions += 1;
                    log.push(RefinementEvent::Extended {
                        boundary_mass: left.max(right),
                        n_points: base.len(),
                    });
                    continue 'restart;
                }
            }

            // unnormalized rho / Z on base nodes: P values are exact for that
            let restricted: Vec<f64> = (0..base.len()).map(|j| dens.profile.values()[j * stride]).collect();
            let mut delta = None;
            if let Some((coarse, coarse_ln_z)) = &previous {
                let extrapolated: Vec<f64> = restricted
                    .iter()
                    .zip(coarse)
                    .map(|(f, c)| ((4.0 * f - c) / 3.0).max(0.0))
                    .collect();
                let extrapolated = normalize(&extrapolated, &base)?;
                let ratio = (coarse_ln_z - dens.ln_z).exp();
                let ln_z = dens.ln_z + ((4.0 - ratio) / 3.0).ln();
                if let Some((prev, prev_ln_z)) = &previous_extrapolation {
                    let diff: Vec<f64> = extrapolated
                        .values()
                        .iter()
                        .zip(prev)
                        .map(|(a, b)| (a - b).abs())
                        .collect();
                    let d = base.integrate(&diff);
                    delta = Some(d);
                    last_delta = d;
                    if d < opts.tolerance {
                        // second Richardson step removes the h^4 term of ln Z
                        let ln_z = ln_z + (ln_z - prev_ln_z) / 15.0;
                        log.push(RefinementEvent::Solved {
                            n_points: grid.len(),
                            retained: solution.eigenvalues.len(),
                            delta,
                        });
                        return Ok(ConvergedOracle {
                            density: ThermalDensity {
                                profile: extrapolated,
                                ln_z,
                            },
                            finest: solution,
                            log,
                        });
                    }
                }
                previous_extrapolation = Some((extrapolated.values().to_vec(), ln_z));
            }
            log.push(RefinementEvent::Solved {
                n_points: grid.len(),
                retained: solution.eigenvalues.len(),
                delta,
            });
            previous = Some((restricted, dens.ln_z));
            grid = grid.refined();
        }
        return Err(Error::RefinementNotConverged {
            doublings: opts.max_doublings,
            last_delta,
        });
    }
}

/// Mass of a normalized density within the outermost 2% (at least two
/// intervals) at each end.
pub fn boundary_mass(profile: &DensityProfile) -> (f64, f64) {
    let n = profile.grid().len();
    let k = (n / 50).max(2).min(n - 1);
    let h = profile.grid().spacing();
    let v = profile.values();
    let side = |idx: &mut dyn Iterator<Item = usize>| idx.map(|i| v[i]).sum::<f64>() * h;
    (side(&mut (0..=k)), side(&mut (n - 1 - k..n)))
}
