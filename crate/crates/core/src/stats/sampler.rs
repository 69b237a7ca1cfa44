//! Metropolis sampling of `exp(-beta V_eff)` with `V_eff` tabulated on a grid.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Grid, ThermoState};
use crate::stats::{normalize, DensityProfile};

/// Acceptance fraction the burn-in tuning aims for.
pub const TARGET_ACCEPTANCE: f64 = 0.4;
/// Acceptance rates outside this band produce a warning.
pub const ACCEPTANCE_BAND: (f64, f64) = (0.1, 0.9);
const TUNING_WINDOW: usize = 100;
pub const BATCHES_PER_CHAIN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainConfig {
    /// Steps per chain, burn-in included.
    pub n_steps: usize,
    pub burn_in: usize,
    /// Initial proposal half-width (bohr).
    pub step_size: f64,
    pub seed: u64,
    pub n_chains: usize,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_steps <= self.burn_in {
            return Err(Error::InvalidParameter(format!(
                "n_steps ({}) must exceed burn_in ({})",
                self.n_steps, self.burn_in
            )));
        }
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "step_size must be positive, got {}",
                self.step_size
            )));
        }
        if self.n_chains == 0 {
            return Err(Error::InvalidParameter("n_chains must be at least 1".into()));
        }
        Ok(())
    }
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            n_steps: 1_000_000,
            burn_in: 10_000,
            step_size: 0.5,
            seed: 20_240_101,
            n_chains: 4,
        }
    }
}

/// One chain after burn-in.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub samples: Vec<f64>,
    pub acceptance_rate: f64,
    /// Proposal width frozen at the end of burn-in.
    pub step_size: f64,
}

impl Chain {
    pub fn mean(&self) -> f64 {
        self.average(|x| x)
    }

    pub fn average(&self, observable: impl Fn(f64) -> f64) -> f64 {
        self.samples.iter().map(|&x| observable(x)).sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub chains: Vec<Chain>,
    /// Pooled histogram on the input grid, normalized like a density.
    pub histogram: DensityProfile,
    pub warnings: Vec<String>,
}

impl SampleSet {
    /// Accepted fraction over all measured steps.
    pub fn acceptance_rate(&self) -> f64 {
        self.chains.iter().map(|c| c.acceptance_rate).sum::<f64>() / self.chains.len() as f64
    }

    pub fn chain_means(&self) -> Vec<f64> {
        self.chains.iter().map(Chain::mean).collect()
    }

    pub fn total_samples(&self) -> usize {
        self.chains.iter().map(|c| c.samples.len()).sum()
    }
}

/// Linear interpolation of a table on a uniform grid.
fn interpolate(table: &[f64], grid: &Grid, x: f64) -> f64 {
    let t = (x - grid.x_min()) / grid.spacing();
    let i = (t.floor() as usize).min(grid.len() - 2);
    let f = t - i as f64;
    table[i] * (1.0 - f) + table[i + 1] * f
}

fn reflect(mut x: f64, lo: f64, hi: f64) -> f64 {
    let width = hi - lo;
    loop {
        if x < lo {
            x = 2.0 * lo - x;
        } else if x > hi {
            x = 2.0 * hi - x;
        } else {
            return x;
        }
        if (x - lo).abs() > 2.0 * width {
            x = lo + (x - lo).rem_euclid(2.0 * width);
        }
    }
}

fn run_chain(v_eff: &[f64], grid: &Grid, beta: f64, config: &ChainConfig, index: usize) -> Chain {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index as u64));
    let (lo, hi) = (grid.x_min(), grid.x_max());
    let start = v_eff
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| grid.x(i))
        .unwrap_or(0.5 * (lo + hi));
    let mut x = start;
    let mut energy = beta * interpolate(v_eff, grid, x);
    let mut step = config.step_size.min(hi - lo);
    let mut window_accepted = 0;
    let measured = config.n_steps - config.burn_in;
    let mut samples = Vec::with_capacity(measured);
    let mut accepted = 0usize;
    for n in 0..config.n_steps {
        let trial = reflect(x + step * (2.0 * rng.gen::<f64>() - 1.0), lo, hi);
        let trial_energy = beta * interpolate(v_eff, grid, trial);
        let accept = trial_energy <= energy || rng.gen::<f64>() < (energy - trial_energy).exp();
        if accept {
            x = trial;
            energy = trial_energy;
        }
        if n < config.burn_in {
            window_accepted += usize::from(accept);
            if (n + 1) % TUNING_WINDOW == 0 {
                let rate = window_accepted as f64 / TUNING_WINDOW as f64;
                step = (step * (rate - TARGET_ACCEPTANCE).exp()).min(hi - lo);
                window_accepted = 0;
            }
        } else {
            accepted += usize::from(accept);
            samples.push(x);
        }
    }
    Chain {
        samples,
        acceptance_rate: accepted as f64 / measured as f64,
        step_size: step,
    }
}

/// Run `n_chains` independent Metropolis chains targeting `exp(-beta V_eff)`.
/// Chain `i` is seeded with `seed + i`.
pub fn sample_metropolis(v_eff: &[f64], grid: &Grid, thermo: &ThermoState, config: &ChainConfig) -> Result<SampleSet> {
    config.validate()?;
    if v_eff.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} values for a {}-point grid",
            v_eff.len(),
            grid.len()
        )));
    }
    if let Some(i) = v_eff.iter().position(|v| !v.is_finite()) {
        return Err(Error::Sampler(format!(
            "effective potential not finite at x = {}",
            grid.x(i)
        )));
    }
    let chains: Vec<Chain> = (0..config.n_chains)
        .into_par_iter()
        .map(|i| run_chain(v_eff, grid, thermo.beta(), config, i))
        .collect();

    // nearest-node bins: width h inside, h/2 at the two ends
    let mut counts = vec![0u64; grid.len()];
    for c in &chains {
        for &x in &c.samples {
            let i = ((x - grid.x_min()) / grid.spacing()).round() as usize;
            counts[i.min(grid.len() - 1)] += 1;
        }
    }
    let w = grid.trapezoid_weights();
    let raw: Vec<f64> = counts.iter().zip(&w).map(|(&c, w)| c as f64 / w).collect();
    let histogram = normalize(&raw, grid).map_err(|e| Error::Sampler(format!("histogram: {e}")))?;

    let warnings = chains
        .iter()
        .enumerate()
        .filter(|(_, c)| c.acceptance_rate < ACCEPTANCE_BAND.0 || c.acceptance_rate > ACCEPTANCE_BAND.1)
        .map(|(i, c)| format!("chain {i}: acceptance rate {:.3} outside [0.1, 0.9]", c.acceptance_rate))
        .collect();
    Ok(SampleSet {
        chains,
        histogram,
        warnings,
    })
}

/// Scalar estimate with its standard error (zero for quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Where an average is taken from.
#[derive(Debug, Clone, Copy)]
pub enum Ensemble<'a> {
    Quadrature(&'a DensityProfile),
    Samples(&'a SampleSet),
}

/// `<O>` by quadrature, or by the pooled sample mean. The sampling error is
/// the spread of batch means, `BATCHES_PER_CHAIN` contiguous batches per chain.
pub fn observable_average(ensemble: Ensemble<'_>, observable: impl Fn(f64) -> f64 + Sync) -> Result<Estimate> {
    match ensemble {
        Ensemble::Quadrature(profile) => Ok(Estimate {
            value: profile.expectation(&observable),
            std_error: 0.0,
        }),
        Ensemble::Samples(set) => {
            let k = set.chains.len();
            if k < 2 {
                return Err(Error::Sampler(format!(
                    "error estimate needs at least 2 chains, got {k}"
                )));
            }
            let batches: Vec<f64> = set
                .chains
                .par_iter()
                .flat_map_iter(|c| {
                    let len = c.samples.len() / BATCHES_PER_CHAIN;
                    c.samples[..len * BATCHES_PER_CHAIN]
                        .chunks(len.max(1))
                        .map(|b| b.iter().map(|&x| observable(x)).sum::<f64>() / b.len() as f64)
                        .collect::<Vec<_>>()
                })
                .collect();
            let nb = batches.len();
            let mean = batches.iter().sum::<f64>() / nb as f64;
            let var = batches.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (nb - 1) as f64;
            Ok(Estimate {
                value: mean,
                std_error: (var / nb as f64).sqrt(),
            })
        }
    }
}
