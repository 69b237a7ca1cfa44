//! Scenario runner: exact and approximate densities for a list of
//! temperatures, comparisons, threshold checks and output files.

pub mod config;
pub mod output;
pub mod presets;

use rayon::prelude::*;

use crate::effective::{evaluate_method, Method};
use crate::error::{Error, Result};
use crate::model::{auto_grid, Grid, ThermoState};
use crate::oracle::{converge_on, ConvergeOptions};
use crate::stats::{
    compare, observable_average, sample_metropolis, ComparisonReport, DensityProfile, Ensemble, Estimate,
};
pub use config::{parse_config, Column, Criterion, GridSpec, SamplerSpec, ScenarioConfig, Temperatures, Threshold};
pub use output::{manifest, report, write_outputs};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "QEPOT_THREADS";

/// One tabulated column.
#[derive(Debug, Clone)]
pub struct ColumnData {
    pub column: Column,
    pub profile: DensityProfile,
    pub v_eff: Vec<f64>,
    pub ln_z: f64,
    pub flagged: usize,
    pub failed: usize,
}

#[derive(Debug, Clone)]
pub struct SamplerOutcome {
    pub method: Method,
    pub seed: u64,
    pub histogram: DensityProfile,
    /// Histogram L1 against the quadrature density of the same method.
    pub l1: f64,
    pub acceptance_rate: f64,
    pub second_moment: Estimate,
    pub second_moment_quadrature: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TemperatureResult {
    pub label: String,
    /// Temperature as written in the config (beta or kelvin).
    pub nominal: f64,
    pub beta: f64,
    pub grid: Option<Grid>,
    pub columns: Vec<ColumnData>,
    /// Each non-exact column against the exact density.
    pub comparisons: Vec<(Column, ComparisonReport)>,
    /// `(column or stage, message)`.
    pub failures: Vec<(String, String)>,
    pub sampler: Option<SamplerOutcome>,
}

impl TemperatureResult {
    pub fn column(&self, c: Column) -> Option<&ColumnData> {
        self.columns.iter().find(|d| d.column == c)
    }

    pub fn comparison(&self, c: Column) -> Option<&ComparisonReport> {
        self.comparisons.iter().find(|(k, _)| *k == c).map(|(_, r)| r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: String,
    pub description: String,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub temperatures: Vec<TemperatureResult>,
    pub checks: Vec<CheckOutcome>,
}

impl ScenarioResult {
    pub fn failure_count(&self) -> usize {
        self.temperatures.iter().map(|t| t.failures.len()).sum()
    }

    /// No module errors and every threshold met.
    pub fn passed(&self) -> bool {
        self.failure_count() == 0 && self.checks.iter().all(|c| c.passed)
    }
}

/// Worker count from `QEPOT_THREADS`, else the available cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Run several scenarios on a pool sized by [`thread_count`].
pub fn run_all(configs: &[ScenarioConfig], sample: bool) -> Result<Vec<ScenarioResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(|| configs.par_iter().map(|c| run_scenario(c, sample)).collect()))
}

/// Evaluate one scenario. Module errors are recorded in the result rather
/// than returned, so that partial output can still be written.
pub fn run_scenario(config: &ScenarioConfig, sample: bool) -> ScenarioResult {
    let points = config.temperatures.points();
    let nominal = match &config.temperatures {
        Temperatures::Beta(v) | Temperatures::Kelvin(v) => v.clone(),
    };
    let temperatures: Vec<TemperatureResult> = points
        .into_par_iter()
        .zip(nominal)
        .map(|((beta, label), nominal)| run_temperature(config, beta, label, nominal, sample))
        .collect();
    let checks = temperatures
        .iter()
        .flat_map(|t| evaluate_checks(config, t, sample))
        .collect();
    ScenarioResult {
        config: config.clone(),
        temperatures,
        checks,
    }
}

fn base_grid(config: &ScenarioConfig, thermo: &ThermoState) -> Result<Grid> {
    match config.grid.window {
        Some((lo, hi, n)) => Grid::new(lo, hi, n),
        None => auto_grid(&config.potential, thermo, config.grid.coverage),
    }
}

fn run_temperature(config: &ScenarioConfig, beta: f64, label: String, nominal: f64, sample: bool) -> TemperatureResult {
    let mut out = TemperatureResult {
        label,
        nominal,
        beta,
        grid: None,
        columns: Vec::new(),
        comparisons: Vec::new(),
        failures: Vec::new(),
        sampler: None,
    };
    let thermo = match ThermoState::new(beta, config.mass) {
        Ok(t) => t,
        Err(e) => {
            out.failures.push(("setup".into(), e.to_string()));
            return out;
        }
    };
    let base = match base_grid(config, &thermo) {
        Ok(g) => g,
        Err(e) => {
            out.failures
                .push(("grid".into(), e.context(format!("grid at beta = {beta}")).to_string()));
            return out;
        }
    };
    let mut grid = base;
    let mut exact = None;
    if config.has_exact() {
        match converge_on(&config.potential, &thermo, &base, &ConvergeOptions::default()) {
            Ok(o) => {
                grid = *o.grid();
                exact = Some(ColumnData {
                    column: Column::Exact,
                    v_eff: o.density.effective_potential(&thermo),
                    ln_z: o.density.ln_z,
                    profile: o.density.profile,
                    flagged: 0,
                    failed: 0,
                });
            }
            Err(e) => {
                let ctx = format!("exact at beta = {beta} on [{}, {}]", base.x_min(), base.x_max());
                out.failures.push(("exact".into(), e.context(ctx).to_string()));
            }
        }
    }
    out.grid = Some(grid);

    let evaluated: Vec<(Method, Result<ColumnData>)> = config
        .methods()
        .into_par_iter()
        .map(|m| {
            let r = evaluate_method(m, &config.potential, &thermo, &grid, &config.options).map(|t| ColumnData {
                column: Column::from(m),
                flagged: t.flagged_count(),
                failed: t.failed_count(),
                v_eff: t.v_eff,
                profile: t.profile,
                ln_z: t.ln_z,
            });
            (m, r)
        })
        .collect();
    out.columns.extend(exact);
    for (m, r) in evaluated {
        match r {
            Ok(c) => out.columns.push(c),
            Err(e) => out.failures.push((m.key().into(), e.to_string())),
        }
    }
    out.columns.sort_by_key(|c| c.column.rank());

    if let Some(ex) = out.column(Column::Exact) {
        let reference = ex.profile.clone();
        for c in out.columns.iter().filter(|c| c.column != Column::Exact) {
            match compare(&reference, &c.profile, Some(&config.potential)) {
                Ok(r) => out.comparisons.push((c.column, r)),
                Err(e) => out.failures.push((c.column.key().into(), e.to_string())),
            }
        }
    }

    if let (true, Some(spec)) = (sample, config.sampler) {
        match run_sampler(&out, &thermo, &grid, spec) {
            Ok(s) => out.sampler = Some(s),
            Err(e) => out.failures.push((
                "sampler".into(),
                e.context(format!("sampler at beta = {beta}")).to_string(),
            )),
        }
    }
    out
}

fn run_sampler(t: &TemperatureResult, thermo: &ThermoState, grid: &Grid, spec: SamplerSpec) -> Result<SamplerOutcome> {
    let col = t
        .column(Column::from(spec.method))
        .ok_or_else(|| Error::Sampler(format!("no table for {}", spec.method)))?;
    let set = sample_metropolis(&col.v_eff, grid, thermo, &spec.chain)?;
    let l1 = compare(&col.profile, &set.histogram, None)?.l1_distance;
    Ok(SamplerOutcome {
        method: spec.method,
        seed: spec.chain.seed,
        l1,
        acceptance_rate: set.acceptance_rate(),
        second_moment: observable_average(Ensemble::Samples(&set), |x| x * x)?,
        second_moment_quadrature: col.profile.second_moment(),
        warnings: set.warnings,
        histogram: set.histogram,
    })
}

fn applies(threshold: &Threshold, nominal: f64) -> bool {
    threshold
        .at
        .as_ref()
        .is_none_or(|v| v.iter().any(|t| (t - nominal).abs() <= 1e-12 * t.abs()))
}

fn evaluate_checks(config: &ScenarioConfig, t: &TemperatureResult, sample: bool) -> Vec<CheckOutcome> {
    let label = format!("{} {}", config.name, t.label);
    config
        .thresholds
        .iter()
        .filter(|th| applies(th, t.nominal) && (sample || th.column.is_some()))
        .map(|th| {
            let (passed, description) = check(th, t);
            CheckOutcome {
                label: label.clone(),
                description,
                passed,
            }
        })
        .collect()
}

fn second_moment_error(t: &TemperatureResult, c: Column) -> Option<f64> {
    t.comparison(c).map(|r| r.delta_second_moment.abs())
}

fn check(th: &Threshold, t: &TemperatureResult) -> (bool, String) {
    let Some(column) = th.column else {
        let Criterion::SamplerL1Max(limit) = th.criterion else {
            return (false, "unsupported sampler threshold".into());
        };
        return match &t.sampler {
            Some(s) => (
                s.l1 < limit,
                format!("sampler {} histogram l1 {:.3e} < {limit:e}", s.method, s.l1),
            ),
            None => (false, "sampler did not run".into()),
        };
    };
    let name = column.key();
    let Some(r) = t.comparison(column) else {
        return (false, format!("{name}: no comparison available"));
    };
    match &th.criterion {
        Criterion::L1Max(limit) => (
            r.l1_distance < *limit,
            format!("{name} l1 {:.3e} < {limit:e}", r.l1_distance),
        ),
        Criterion::KlMax(limit) => (
            r.kl_divergence < *limit,
            format!("{name} kl {:.3e} < {limit:e}", r.kl_divergence),
        ),
        Criterion::MeanDeltaMax(limit) => (
            r.delta_mean.abs() < *limit,
            format!("{name} |d<x>| {:.3e} < {limit:e}", r.delta_mean.abs()),
        ),
        Criterion::SecondMomentRelMax(limit) => {
            let reference = t
                .column(Column::Exact)
                .map(|e| e.profile.second_moment())
                .unwrap_or(f64::NAN);
            let rel = (r.delta_second_moment / reference).abs();
            (rel < *limit, format!("{name} |d<x^2>|/<x^2> {rel:.3e} < {limit:e}"))
        }
        Criterion::L1Below(others) => {
            let mut ok = true;
            let mut parts = Vec::new();
            for o in others {
                let v = t.comparison(*o).map_or(f64::NAN, |c| c.l1_distance);
                ok &= r.l1_distance < v;
                parts.push(format!("{o} {v:.3e}"));
            }
            (
                ok,
                format!("{name} l1 {:.3e} below {}", r.l1_distance, parts.join(", ")),
            )
        }
        Criterion::SecondMomentBelow(others) => {
            let mine = r.delta_second_moment.abs();
            let mut ok = true;
            let mut parts = Vec::new();
            for o in others {
                let v = second_moment_error(t, *o).unwrap_or(f64::NAN);
                ok &= mine < v;
                parts.push(format!("{o} {v:.3e}"));
            }
            (ok, format!("{name} |d<x^2>| {mine:.3e} below {}", parts.join(", ")))
        }
        Criterion::MaximaMatch => {
            let (Some(ex), Some(me), Some(grid)) = (t.column(Column::Exact), t.column(column), t.grid) else {
                return (false, format!("{name}: tables missing"));
            };
            let (a, b) = (ex.profile.local_maxima(), me.profile.local_maxima());
            let h = grid.spacing();
            let ok = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= h);
            let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ");
            (
                ok,
                format!("{name} maxima [{}] vs exact [{}] within h = {h:.3e}", fmt(&b), fmt(&a)),
            )
        }
        Criterion::SamplerL1Max(_) => (false, "sampler threshold attached to a method".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_text(extra: &str) -> String {
        format!(
            "name = h\npotential.variant = harmonic_quartic\npotential.g = 0\ntemperature.beta = 1, 10\n\
             methods = classical, exact, fh, lh_mapped\n{extra}"
        )
    }

    #[test]
    fn harmonic_run_and_thresholds() {
        let cfg = parse_config(&harmonic_text(
            "threshold.lh_mapped.l1_max = 1e-6\nthreshold.lh_mapped.l1_below = classical\nthreshold.at = 10\n",
        ))
        .unwrap();
        let res = run_scenario(&cfg, false);
        assert_eq!(res.failure_count(), 0);
        assert_eq!(res.checks.len(), 2);
        assert!(res.passed(), "{:?}", res.checks);
        let t = &res.temperatures[1];
        assert_eq!(t.label, "beta10");
        let keys: Vec<&str> = t.columns.iter().map(|c| c.column.key()).collect();
        assert_eq!(keys, ["classical", "exact", "fh", "lh_mapped"]);
        let (ex, lh) = (
            t.column(Column::Exact).unwrap(),
            t.column(Column::Approx(Method::LhMapped)).unwrap(),
        );
        let linf = ex
            .profile
            .values()
            .iter()
            .zip(lh.profile.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(linf < 1e-8, "{linf}");
    }

    #[test]
    fn failing_threshold_is_reported() {
        let cfg = parse_config(&harmonic_text("threshold.classical.l1_max = 1e-6\n")).unwrap();
        let res = run_scenario(&cfg, false);
        assert!(!res.passed());
        assert!(res.checks.iter().all(|c| !c.passed));
    }

    #[test]
    fn no_exact_means_no_comparisons() {
        let cfg = parse_config(&harmonic_text("").replace("classical, exact, fh", "classical, fh")).unwrap();
        let res = run_scenario(&cfg, false);
        assert!(res.temperatures.iter().all(|t| t.comparisons.is_empty()));
        assert!(res.passed());
    }

    #[test]
    fn module_errors_are_recorded_with_context() {
        // window too narrow for the spike: normalization of the classical density fails
        let text = "name = bad\npotential.variant = monomial_sum\npotential.coefficients = 0, 0, 1e6\npotential.mass = 1\n\
                    temperature.beta = 100\nmethods = classical, fh\ngrid.x_min = -1\ngrid.x_max = 1\ngrid.n_points = 5\n";
        let res = run_scenario(&parse_config(text).unwrap(), false);
        let t = &res.temperatures[0];
        assert!(!res.passed());
        assert!(t
            .failures
            .iter()
            .any(|(k, m)| k == "classical" && m.contains("beta = 100") && m.contains("[-1, 1]")));
    }

    #[test]
    fn sampler_block_runs_on_request() {
        let cfg = parse_config(&harmonic_text(
            "sampler.n_steps = 40000\nsampler.burn_in = 2000\nsampler.n_chains = 2\nthreshold.sampler.l1_max = 0.2\n",
        ))
        .unwrap();
        let res = run_scenario(&cfg, true);
        let s = res.temperatures[0].sampler.as_ref().unwrap();
        assert_eq!(s.method, Method::LhMapped);
        assert!(s.l1 < 0.2 && res.passed(), "{:?}", res.checks);
        assert!(run_scenario(&cfg, false).temperatures[0].sampler.is_none());
    }
}
