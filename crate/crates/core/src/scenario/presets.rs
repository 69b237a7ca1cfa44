//! Built-in benchmark sets.

use std::collections::BTreeMap;

use super::config::{Column, Criterion, GridSpec, SamplerSpec, ScenarioConfig, Temperatures, Threshold};
use crate::effective::{CurvaturePolicy, FhConvention, Method, MethodOptions};
use crate::error::{Error, Result};
use crate::model::{oh_spectroscopy, units::UnitTable, Potential};
use crate::stats::ChainConfig;

pub const PRESETS: [&str; 3] = ["fig1", "fig2", "fig3"];
/// Morse temperatures (K). An implementation choice.
pub const FIG2_KELVIN: [f64; 4] = [50.0, 100.0, 300.0, 1000.0];
pub const FIG13_BETAS: [f64; 3] = [0.1, 1.0, 10.0];

/// Settings the command line may change on a preset.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PresetOverrides {
    pub policy: Option<CurvaturePolicy>,
    pub fh_convention: Option<FhConvention>,
    pub seed: Option<u64>,
}

fn all_columns() -> Vec<Column> {
    Column::ORDER.to_vec()
}

fn lh() -> Option<Column> {
    Some(Column::Approx(Method::LhMapped))
}

fn threshold(criterion: Criterion, at: Option<&[f64]>) -> Threshold {
    Threshold {
        column: lh(),
        criterion,
        at: at.map(<[f64]>::to_vec),
    }
}

fn base(
    name: &str,
    potential: Potential,
    mass: f64,
    temperatures: Temperatures,
    o: &PresetOverrides,
) -> ScenarioConfig {
    let mut chain = ChainConfig::default();
    if let Some(seed) = o.seed {
        chain.seed = seed;
    }
    ScenarioConfig {
        name: name.into(),
        potential,
        mass,
        spectroscopy: None,
        temperatures,
        columns: all_columns(),
        grid: GridSpec::default(),
        options: MethodOptions {
            fh_convention: o.fh_convention.unwrap_or_default(),
            policy: o.policy.unwrap_or_default(),
        },
        sampler: Some(SamplerSpec {
            chain,
            method: Method::LhMapped,
        }),
        output_dir: None,
        thresholds: Vec::new(),
        notes: BTreeMap::new(),
    }
}

/// Harmonic-quartic family at three temperatures.
pub fn fig1(o: &PresetOverrides) -> Result<Vec<ScenarioConfig>> {
    let betas = Temperatures::Beta(FIG13_BETAS.to_vec());
    let cold: &[f64] = &[1.0, 10.0];
    let mut out = Vec::new();
    for (name, omega, g) in [
        ("hq_g0", 1.0, 0.0),
        ("hq_g0.1", 1.0, 0.1),
        ("hq_g1", 1.0, 1.0),
        ("quartic", 0.0, 1.0),
    ] {
        let mut c = base(name, Potential::harmonic_quartic(1.0, omega, g)?, 1.0, betas.clone(), o);
        c.thresholds = match name {
            "hq_g0" => vec![threshold(Criterion::L1Max(1e-6), None)],
            "quartic" => vec![
                threshold(Criterion::SecondMomentRelMax(0.25), Some(cold)),
                threshold(Criterion::SecondMomentBelow(vec![Column::Classical]), Some(cold)),
            ],
            _ => vec![threshold(
                Criterion::L1Below(vec![Column::Classical, Column::Approx(Method::FeynmanHibbs)]),
                Some(cold),
            )],
        };
        out.push(c);
    }
    Ok(out)
}

/// Morse OH bond at four temperatures.
pub fn fig2(o: &PresetOverrides) -> Result<Vec<ScenarioConfig>> {
    let spec = oh_spectroscopy();
    let mass = UnitTable::ATOMIC.amu_to_me(spec.reduced_mass_amu);
    let mut c = base(
        "morse_oh",
        Potential::morse_from_spectroscopy(spec)?,
        mass,
        Temperatures::Kelvin(FIG2_KELVIN.to_vec()),
        o,
    );
    c.spectroscopy = Some(spec);
    c.thresholds = vec![
        threshold(Criterion::L1Max(0.05), None),
        threshold(Criterion::MeanDeltaMax(0.02), None),
    ];
    c.notes.insert(
        "temperatures".into(),
        "implementation default, not taken from a published list".into(),
    );
    Ok(vec![c])
}

/// Symmetric double wells at three temperatures.
pub fn fig3(o: &PresetOverrides) -> Result<Vec<ScenarioConfig>> {
    let betas = Temperatures::Beta(FIG13_BETAS.to_vec());
    let mut shallow = base("dw_g0.1", Potential::double_well(1.0, 1.0, 0.1)?, 1.0, betas.clone(), o);
    shallow.thresholds = vec![threshold(Criterion::MaximaMatch, Some(&[10.0]))];
    let mut deep = base("dw_g0.5", Potential::double_well(1.0, 1.0, 0.5)?, 1.0, betas, o);
    deep.notes.insert(
        "expectation".into(),
        "known failure mode at beta = 10: minima not localized; recorded only".into(),
    );
    Ok(vec![shallow, deep])
}

pub fn preset(name: &str, o: &PresetOverrides) -> Result<Vec<ScenarioConfig>> {
    match name {
        "fig1" => fig1(o),
        "fig2" => fig2(o),
        "fig3" => fig3(o),
        other => Err(Error::InvalidParameter(format!(
            "unknown preset '{other}' (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        for name in PRESETS {
            for c in preset(name, &PresetOverrides::default()).unwrap() {
                c.validate().unwrap();
                assert_eq!(c.columns.len(), 7);
            }
        }
        assert!(preset("fig4", &PresetOverrides::default()).is_err());
    }

    #[test]
    fn fig1_cases() {
        let cases = fig1(&PresetOverrides::default()).unwrap();
        let names: Vec<&str> = cases.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(names, ["hq_g0", "hq_g0.1", "hq_g1", "quartic"]);
        assert_eq!(
            cases[3].potential,
            Potential::HarmonicQuartic {
                mass: 1.0,
                omega: 0.0,
                g: 1.0
            }
        );
        assert_eq!(cases[0].temperatures, Temperatures::Beta(vec![0.1, 1.0, 10.0]));
    }

    #[test]
    fn overrides_apply() {
        let o = PresetOverrides {
            policy: Some(CurvaturePolicy::ContinuationCapped { cap: 1.0 }),
            fh_convention: Some(FhConvention::Third),
            seed: Some(99),
        };
        for c in fig3(&o).unwrap() {
            assert_eq!(c.options.fh_convention, FhConvention::Third);
            assert_eq!(c.options.policy, CurvaturePolicy::ContinuationCapped { cap: 1.0 });
            assert_eq!(c.sampler.unwrap().chain.seed, 99);
        }
    }

    #[test]
    fn fig2_uses_kelvin() {
        let c = &fig2(&PresetOverrides::default()).unwrap()[0];
        let labels: Vec<String> = c.temperatures.points().into_iter().map(|(_, l)| l).collect();
        assert_eq!(labels, ["T50K", "T100K", "T300K", "T1000K"]);
        assert!((c.mass - 1728.0).abs() < 5.0);
    }
}
