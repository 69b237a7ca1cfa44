//! Flat `key = value` scenario files.
//!
//! ```text
//! # comment
//! name = quartic
//! potential.variant = harmonic_quartic
//! potential.g = 1.0
//! temperature.beta = 0.1, 1, 10
//! methods = classical, exact, lh_mapped
//! threshold.lh_mapped.l1_below = classical
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::effective::{CurvaturePolicy, FhConvention, Method, MethodOptions};
use crate::error::{Error, Result};
use crate::model::units::{self, UnitTable};
use crate::model::{oh_spectroscopy, MorseSpectroscopy, Potential};
use crate::stats::ChainConfig;

/// Cap on `|xi|` used when `policy = continuation` gives no `policy.cap`.
pub const DEFAULT_CONTINUATION_CAP: f64 = 1.4;
pub const DEFAULT_COVERAGE: f64 = 0.999_999;

/// One output column: the exact oracle or an approximate method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Column {
    Classical,
    Exact,
    Approx(Method),
}

impl Column {
    /// Every column in file order.
    pub const ORDER: [Column; 7] = [
        Column::Classical,
        Column::Exact,
        Column::Approx(Method::FeynmanHibbs),
        Column::Approx(Method::FeynmanKleinert),
        Column::Approx(Method::LhBare),
        Column::Approx(Method::LhRenormalized),
        Column::Approx(Method::LhMapped),
    ];

    pub fn key(&self) -> &'static str {
        match self {
            Column::Classical => "classical",
            Column::Exact => "exact",
            Column::Approx(m) => m.key(),
        }
    }

    pub fn rank(&self) -> usize {
        Column::ORDER.iter().position(|c| c == self).unwrap_or(usize::MAX)
    }

    /// The effective-potential method behind this column, if any.
    pub fn method(&self) -> Option<Method> {
        match self {
            Column::Classical => Some(Method::Classical),
            Column::Exact => None,
            Column::Approx(m) => Some(*m),
        }
    }

    pub fn parse(s: &str) -> Option<Column> {
        let s = s.replace('-', "_");
        Column::ORDER.into_iter().find(|c| c.key() == s)
    }
}

impl From<Method> for Column {
    fn from(m: Method) -> Self {
        match m {
            Method::Classical => Column::Classical,
            other => Column::Approx(other),
        }
    }
}

impl std::fmt::Display for Column {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.key())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Temperatures {
    Beta(Vec<f64>),
    Kelvin(Vec<f64>),
}

impl Temperatures {
    /// `(beta, label)` pairs in the given order.
    pub fn points(&self) -> Vec<(f64, String)> {
        match self {
            Temperatures::Beta(b) => b.iter().map(|&b| (b, format!("beta{b}"))).collect(),
            Temperatures::Kelvin(t) => t
                .iter()
                .map(|&t| (UnitTable::ATOMIC.beta_from_kelvin(t), format!("T{t}K")))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub coverage: f64,
    /// Fixed `(x_min, x_max, n_points)` in place of the automatic choice.
    pub window: Option<(f64, f64, usize)>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            coverage: DEFAULT_COVERAGE,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec {
    pub chain: ChainConfig,
    pub method: Method,
}

/// A pass/fail condition on the comparison against the exact density.
#[derive(Debug, Clone, PartialEq)]
pub enum Criterion {
    L1Max(f64),
    KlMax(f64),
    /// `|<x>_method - <x>_exact|` bound.
    MeanDeltaMax(f64),
    /// `|<x^2>_method / <x^2>_exact - 1|` bound.
    SecondMomentRelMax(f64),
    /// L1 strictly below that of each listed column.
    L1Below(Vec<Column>),
    /// `|<x^2>` error| strictly below that of each listed column.
    SecondMomentBelow(Vec<Column>),
    /// Same number of local maxima as the exact density, each within one grid spacing.
    MaximaMatch,
    /// Sampler histogram L1 against the quadrature density.
    SamplerL1Max(f64),
}

impl Criterion {
    pub fn name(&self) -> &'static str {
        match self {
            Criterion::L1Max(_) => "l1_max",
            Criterion::KlMax(_) => "kl_max",
            Criterion::MeanDeltaMax(_) => "mean_delta_max",
            Criterion::SecondMomentRelMax(_) => "second_moment_rel_max",
            Criterion::L1Below(_) => "l1_below",
            Criterion::SecondMomentBelow(_) => "second_moment_below",
            Criterion::MaximaMatch => "maxima_match",
            Criterion::SamplerL1Max(_) => "l1_max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    /// `None` for sampler thresholds.
    pub column: Option<Column>,
    pub criterion: Criterion,
    /// Restrict to these temperatures, in the units of the temperature list.
    pub at: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub name: String,
    pub potential: Potential,
    pub mass: f64,
    /// Spectroscopic inputs, kept for the manifest.
    pub spectroscopy: Option<MorseSpectroscopy>,
    pub temperatures: Temperatures,
    pub columns: Vec<Column>,
    pub grid: GridSpec,
    pub options: MethodOptions,
    pub sampler: Option<SamplerSpec>,
    pub output_dir: Option<PathBuf>,
    pub thresholds: Vec<Threshold>,
    /// Free-form manifest notes.
    pub notes: BTreeMap<String, String>,
}

impl ScenarioConfig {
    pub fn has_exact(&self) -> bool {
        self.columns.contains(&Column::Exact)
    }

    /// Approximate methods requested, in column order.
    pub fn methods(&self) -> Vec<Method> {
        self.columns.iter().filter_map(Column::method).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.columns.is_empty() {
            return Err(Error::ConfigKey {
                key: "methods".into(),
                message: "at least one method is required".into(),
            });
        }
        let temps = match &self.temperatures {
            Temperatures::Beta(v) | Temperatures::Kelvin(v) => v,
        };
        if temps.is_empty() || temps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::ConfigKey {
                key: "temperature".into(),
                message: "need at least one positive temperature or beta".into(),
            });
        }
        if self.thresholds.iter().any(|t| t.column.is_some()) && !self.has_exact() {
            return Err(Error::ConfigKey {
                key: "threshold".into(),
                message: "thresholds compare against the exact density, add 'exact' to methods".into(),
            });
        }
        for t in &self.thresholds {
            let mut needed: Vec<Column> = t.column.into_iter().collect();
            if let Criterion::L1Below(v) | Criterion::SecondMomentBelow(v) = &t.criterion {
                needed.extend(v);
            }
            if let Some(c) = needed.iter().find(|c| !self.columns.contains(c)) {
                return Err(Error::ConfigKey {
                    key: format!("threshold.{}", t.column.map_or("sampler", |c| c.key())),
                    message: format!("refers to method '{c}' which is not in methods"),
                });
            }
            if t.column.is_none() && self.sampler.is_none() {
                return Err(Error::ConfigKey {
                    key: "threshold.sampler".into(),
                    message: "needs a sampler block".into(),
                });
            }
            if t.column == Some(Column::Exact) {
                return Err(Error::ConfigKey {
                    key: "threshold.exact".into(),
                    message: "the exact density is the reference".into(),
                });
            }
        }
        if let Some(s) = &self.sampler {
            s.chain.validate()?;
            if !self.columns.contains(&Column::from(s.method)) {
                return Err(Error::ConfigKey {
                    key: "sampler.method".into(),
                    message: format!("'{}' must also be listed in methods", s.method),
                });
            }
        }
        Ok(())
    }
}

struct Entry {
    line: usize,
    value: String,
    used: bool,
}

/// Key table that remembers which keys were read.
struct Table {
    entries: BTreeMap<String, Entry>,
}

impl Table {
    fn parse(text: &str) -> Result<Table> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((key, value)) = body.split_once('=') else {
                return Err(Error::Config {
                    line,
                    message: format!("expected 'key = value', got '{body}'"),
                });
            };
            let key = key.trim();
            if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) {
                return Err(Error::Config {
                    line,
                    message: format!("malformed key '{key}'"),
                });
            }
            let entry = Entry {
                line,
                value: value.trim().to_string(),
                used: false,
            };
            if let Some(prev) = entries.insert(key.to_string(), entry) {
                return Err(Error::Config {
                    line,
                    message: format!("duplicate key '{key}' (first set on line {})", prev.line),
                });
            }
        }
        Ok(Table { entries })
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.line, e.value.clone())
        })
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }

    fn keys_with_prefix(&self, prefix: &str) -> Vec<String> {
        self.entries.keys().filter(|k| k.starts_with(prefix)).cloned().collect()
    }

    fn string(&mut self, key: &str) -> Option<(usize, String)> {
        self.take(key)
    }

    fn float(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key).map(|(line, v)| parse_float(key, line, &v)).transpose()
    }

    fn require_float(&mut self, key: &str) -> Result<f64> {
        self.float(key)?.ok_or_else(|| missing(key))
    }

    fn integer(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key)
            .map(|(line, v)| {
                v.replace('_', "").parse::<u64>().map_err(|_| Error::Config {
                    line,
                    message: format!("'{key}' expects a non-negative integer, got '{v}'"),
                })
            })
            .transpose()
    }

    fn float_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|(line, v)| split_list(&v).iter().map(|s| parse_float(key, line, s)).collect())
            .transpose()
    }

    /// First unread key, by line.
    fn leftover(&self) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .filter(|(_, e)| !e.used)
            .map(|(k, e)| (k.as_str(), e.line))
            .min_by_key(|(_, l)| *l)
    }
}

fn missing(key: &str) -> Error {
    Error::ConfigKey {
        key: key.into(),
        message: "missing".into(),
    }
}

fn parse_float(key: &str, line: usize, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Config {
            line,
            message: format!("'{key}' expects a finite number, got '{v}'"),
        })
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn columns_from(key: &str, line: usize, v: &str) -> Result<Vec<Column>> {
    let mut out = Vec::new();
    for item in split_list(v) {
        let c = Column::parse(item).ok_or_else(|| Error::Config {
            line,
            message: format!("'{key}': unknown method '{item}'"),
        })?;
        if !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

fn parse_potential(t: &mut Table) -> Result<(Potential, f64, Option<MorseSpectroscopy>)> {
    let (line, variant) = t
        .string("potential.variant")
        .ok_or_else(|| missing("potential.variant"))?;
    let at = |e: Error| match e {
        Error::InvalidParameter(m) => Error::Config { line, message: m },
        other => other,
    };
    match variant.as_str() {
        "harmonic_quartic" | "double_well" => {
            let mass = t.float("potential.mass")?.unwrap_or(1.0);
            let omega = t.float("potential.omega")?.unwrap_or(1.0);
            let g = t.require_float("potential.g")?;
            let p = if variant == "harmonic_quartic" {
                Potential::harmonic_quartic(mass, omega, g)
            } else {
                Potential::double_well(mass, omega, g)
            };
            Ok((p.map_err(at)?, mass, None))
        }
        "morse" => {
            let spectro = ["potential.omega_e_cm1", "potential.omega_e_chi_e_cm1", "potential.x_e_angstrom", "potential.mass_amu"];
            if spectro.iter().any(|k| t.entries.contains_key(*k)) {
                let spec = MorseSpectroscopy {
                    omega_e_cm1: t.require_float(spectro[0])?,
                    omega_e_chi_e_cm1: t.require_float(spectro[1])?,
                    x_e_angstrom: t.require_float(spectro[2])?,
                    reduced_mass_amu: t.require_float(spectro[3])?,
                };
                let p = Potential::morse_from_spectroscopy(spec).map_err(at)?;
                Ok((p, UnitTable::ATOMIC.amu_to_me(spec.reduced_mass_amu), Some(spec)))
            } else {
                let p = Potential::morse(
                    t.require_float("potential.d")?,
                    t.require_float("potential.alpha")?,
                    t.require_float("potential.x_e")?,
                )
                .map_err(at)?;
                Ok((p, positive_mass(t)?, None))
            }
        }
        "morse_oh" => {
            let spec = oh_spectroscopy();
            let p = Potential::morse_from_spectroscopy(spec).map_err(at)?;
            Ok((p, UnitTable::ATOMIC.amu_to_me(spec.reduced_mass_amu), Some(spec)))
        }
        "monomial_sum" => {
            let (cl, cv) = t.take("potential.coefficients").ok_or_else(|| missing("potential.coefficients"))?;
            let coeffs = split_list(&cv)
                .iter()
                .map(|s| parse_float("potential.coefficients", cl, s))
                .collect::<Result<Vec<_>>>()?;
            let p = Potential::monomial_sum(coeffs).map_err(at)?;
            Ok((p, positive_mass(t)?, None))
        }
        other => Err(Error::Config {
            line,
            message: format!(
                "unknown potential variant '{other}' (expected harmonic_quartic, double_well, morse, morse_oh or monomial_sum)"
            ),
        }),
    }
}

fn positive_mass(t: &mut Table) -> Result<f64> {
    let mass = match (t.float("potential.mass")?, t.float("potential.mass_amu")?) {
        (Some(m), None) => m,
        (None, Some(amu)) => UnitTable::ATOMIC.amu_to_me(amu),
        (None, None) => return Err(missing("potential.mass")),
        (Some(_), Some(_)) => {
            return Err(Error::ConfigKey {
                key: "potential.mass".into(),
                message: "give either mass or mass_amu, not both".into(),
            })
        }
    };
    if mass > 0.0 {
        Ok(mass)
    } else {
        Err(Error::ConfigKey {
            key: "potential.mass".into(),
            message: format!("must be positive, got {mass}"),
        })
    }
}

fn parse_thresholds(t: &mut Table) -> Result<Vec<Threshold>> {
    let at = t.float_list("threshold.at")?;
    let mut out = Vec::new();
    for key in t.keys_with_prefix("threshold.") {
        if key == "threshold.at" {
            continue;
        }
        let parts: Vec<&str> = key.splitn(3, '.').collect();
        if parts.len() != 3 {
            continue;
        }
        let (target, metric) = (parts[1], parts[2]);
        let (line, value) = t.take(&key).expect("listed key");
        let bad = |m: String| Error::Config { line, message: m };
        let column = if target == "sampler" {
            None
        } else {
            Some(Column::parse(target).ok_or_else(|| bad(format!("unknown method '{target}' in '{key}'")))?)
        };
        let criterion = match (column.is_some(), metric) {
            (true, "l1_max") => Criterion::L1Max(parse_float(&key, line, &value)?),
            (true, "kl_max") => Criterion::KlMax(parse_float(&key, line, &value)?),
            (true, "mean_delta_max") => Criterion::MeanDeltaMax(parse_float(&key, line, &value)?),
            (true, "second_moment_rel_max") => Criterion::SecondMomentRelMax(parse_float(&key, line, &value)?),
            (true, "l1_below") => Criterion::L1Below(columns_from(&key, line, &value)?),
            (true, "second_moment_below") => Criterion::SecondMomentBelow(columns_from(&key, line, &value)?),
            (true, "maxima_match") => match value.as_str() {
                "true" => Criterion::MaximaMatch,
                "false" => continue,
                _ => return Err(bad(format!("'{key}' expects true or false"))),
            },
            (false, "l1_max") => Criterion::SamplerL1Max(parse_float(&key, line, &value)?),
            _ => return Err(bad(format!("unknown threshold '{key}'"))),
        };
        out.push(Threshold {
            column,
            criterion,
            at: at.clone(),
        });
    }
    Ok(out)
}

/// Parse a scenario file. Unknown keys are errors.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut t = Table::parse(text)?;
    let name = t.string("name").map(|(_, v)| v).unwrap_or_else(|| "scenario".into());
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || "._-".contains(c)) {
        return Err(Error::ConfigKey {
            key: "name".into(),
            message: format!("'{name}' is not usable in file names"),
        });
    }
    let (potential, mass, spectroscopy) = parse_potential(&mut t)?;

    let temperatures = match (t.float_list("temperature.beta")?, t.float_list("temperature.kelvin")?) {
        (Some(b), None) => Temperatures::Beta(b),
        (None, Some(k)) => Temperatures::Kelvin(k),
        (None, None) => return Err(missing("temperature.beta")),
        (Some(_), Some(_)) => {
            return Err(Error::ConfigKey {
                key: "temperature".into(),
                message: "give either temperature.beta or temperature.kelvin".into(),
            })
        }
    };

    let (ml, mv) = t.take("methods").ok_or_else(|| missing("methods"))?;
    let mut columns = columns_from("methods", ml, &mv)?;
    columns.sort_by_key(Column::rank);
    if columns.is_empty() {
        return Err(Error::Config {
            line: ml,
            message: "'methods' is empty".into(),
        });
    }

    let mut grid = GridSpec::default();
    if let Some(c) = t.float("grid.coverage")? {
        grid.coverage = c;
    }
    let window = (
        t.float("grid.x_min")?,
        t.float("grid.x_max")?,
        t.integer("grid.n_points")?,
    );
    grid.window = match window {
        (None, None, None) => None,
        (Some(lo), Some(hi), Some(n)) => Some((lo, hi, n as usize)),
        _ => {
            return Err(Error::ConfigKey {
                key: "grid".into(),
                message: "x_min, x_max and n_points must be given together".into(),
            })
        }
    };

    let mut options = MethodOptions::default();
    if let Some((line, v)) = t.string("fh_a2_convention") {
        options.fh_convention = v.parse::<FhConvention>().map_err(|e| Error::Config {
            line,
            message: e.to_string(),
        })?;
    }
    let cap = t.float("policy.cap")?;
    if let Some((line, v)) = t.string("policy") {
        options.policy = match v.as_str() {
            "clamp" => CurvaturePolicy::ClampToZero,
            "continuation" => {
                CurvaturePolicy::continuation(cap.unwrap_or(DEFAULT_CONTINUATION_CAP)).map_err(|e| Error::Config {
                    line,
                    message: e.to_string(),
                })?
            }
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown policy '{v}' (expected clamp or continuation)"),
                })
            }
        };
    }

    let sampler = if t.has_prefix("sampler.") {
        let d = ChainConfig::default();
        let chain = ChainConfig {
            n_steps: t.integer("sampler.n_steps")?.map_or(d.n_steps, |v| v as usize),
            burn_in: t.integer("sampler.burn_in")?.map_or(d.burn_in, |v| v as usize),
            step_size: t.float("sampler.step_size")?.unwrap_or(d.step_size),
            seed: t.integer("sampler.seed")?.unwrap_or(d.seed),
            n_chains: t.integer("sampler.n_chains")?.map_or(d.n_chains, |v| v as usize),
        };
        let method = match t.string("sampler.method") {
            Some((line, v)) => v.replace('-', "_").parse::<Method>().map_err(|e| Error::Config {
                line,
                message: e.to_string(),
            })?,
            None => Method::LhMapped,
        };
        Some(SamplerSpec { chain, method })
    } else {
        None
    };

    let output_dir = t.string("output.dir").map(|(_, v)| PathBuf::from(v));
    let thresholds = parse_thresholds(&mut t)?;
    let mut notes = BTreeMap::new();
    for key in t.keys_with_prefix("note.") {
        let (_, v) = t.take(&key).expect("listed key");
        notes.insert(key["note.".len()..].to_string(), v);
    }
    if let Some((key, line)) = t.leftover() {
        return Err(Error::Config {
            line,
            message: format!("unknown key '{key}'"),
        });
    }
    let config = ScenarioConfig {
        name,
        potential,
        mass,
        spectroscopy,
        temperatures,
        columns,
        grid,
        options,
        sampler,
        output_dir,
        thresholds,
        notes,
    };
    config.validate()?;
    Ok(config)
}

/// Masses behind the OH reduced mass, for output metadata.
pub fn oh_masses() -> [(&'static str, f64); 3] {
    [
        ("mass_o_amu", units::MASS_O_AMU),
        ("mass_h_amu", units::MASS_H_AMU),
        ("reduced_mass_amu", units::oh_reduced_mass_amu()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC: &str = "\
# quartic benchmark
name = quartic
potential.variant = harmonic_quartic
potential.g = 1.0
temperature.beta = 0.1, 1, 10
methods = lh-mapped, exact, classical
";

    #[test]
    fn parses_basic_file() {
        let c = parse_config(BASIC).unwrap();
        assert_eq!(c.name, "quartic");
        assert_eq!(c.potential, Potential::harmonic_quartic(1.0, 1.0, 1.0).unwrap());
        assert_eq!(c.temperatures, Temperatures::Beta(vec![0.1, 1.0, 10.0]));
        assert_eq!(
            c.columns,
            vec![Column::Classical, Column::Exact, Column::Approx(Method::LhMapped)]
        );
        assert_eq!(c.options, MethodOptions::default());
        assert!(c.sampler.is_none() && c.thresholds.is_empty());
    }

    #[test]
    fn unknown_key_names_line() {
        let text = format!("{BASIC}potential.omgea = 2\n");
        match parse_config(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 7);
                assert!(message.contains("potential.omgea"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn key_of_another_variant_is_unknown() {
        let text = format!("{BASIC}potential.alpha = 1\n");
        assert!(matches!(parse_config(&text), Err(Error::Config { line: 7, .. })));
    }

    #[test]
    fn malformed_values_name_key_and_line() {
        let text = BASIC.replace("potential.g = 1.0", "potential.g = one");
        match parse_config(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("potential.g"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_config(&format!("{BASIC}policy = maybe\n")),
            Err(Error::Config { line: 7, .. })
        ));
        assert!(matches!(
            parse_config(&format!("{BASIC}just words\n")),
            Err(Error::Config { line: 7, .. })
        ));
        assert!(matches!(
            parse_config(&format!("{BASIC}name = again\n")),
            Err(Error::Config { line: 7, .. })
        ));
    }

    #[test]
    fn empty_methods_rejected() {
        let text = BASIC.replace("methods = lh-mapped, exact, classical", "methods = ");
        assert!(parse_config(&text).is_err());
        let text = BASIC.replace("methods = lh-mapped, exact, classical\n", "");
        assert!(matches!(parse_config(&text), Err(Error::ConfigKey { .. })));
    }

    #[test]
    fn kelvin_and_spectroscopic_morse() {
        let text = "\
name = oh
potential.variant = morse
potential.omega_e_cm1 = 3737.76
potential.omega_e_chi_e_cm1 = 84.881
potential.x_e_angstrom = 0.9697
potential.mass_amu = 0.9481
temperature.kelvin = 300
methods = classical, fk
fh_a2_convention = third
policy = continuation
policy.cap = 1.2
";
        let c = parse_config(text).unwrap();
        assert!(matches!(c.potential, Potential::Morse { .. }));
        assert!((c.mass - 0.9481 * units::ME_PER_AMU).abs() < 1e-9);
        let (beta, label) = c.temperatures.points()[0].clone();
        assert_eq!(label, "T300K");
        assert!((beta - 1.0 / (300.0 * units::KB_HARTREE_PER_K)).abs() < 1e-6);
        assert_eq!(c.options.fh_convention, FhConvention::Third);
        assert_eq!(c.options.policy, CurvaturePolicy::ContinuationCapped { cap: 1.2 });
    }

    #[test]
    fn thresholds_and_sampler() {
        let text = format!(
            "{BASIC}threshold.at = 1, 10\nthreshold.lh_mapped.l1_below = classical\nthreshold.lh_mapped.l1_max = 0.1\n\
             sampler.n_steps = 1000\nsampler.burn_in = 100\nthreshold.sampler.l1_max = 0.05\n"
        );
        let c = parse_config(&text).unwrap();
        assert_eq!(c.thresholds.len(), 3);
        assert!(c.thresholds.iter().all(|t| t.at == Some(vec![1.0, 10.0])));
        assert!(c.thresholds.contains(&Threshold {
            column: Some(Column::Approx(Method::LhMapped)),
            criterion: Criterion::L1Below(vec![Column::Classical]),
            at: Some(vec![1.0, 10.0]),
        }));
        let s = c.sampler.unwrap();
        assert_eq!(
            (s.chain.n_steps, s.chain.burn_in, s.method),
            (1000, 100, Method::LhMapped)
        );
    }

    #[test]
    fn threshold_needs_referenced_methods() {
        let text = format!("{BASIC}threshold.fh.l1_max = 0.1\n");
        assert!(matches!(parse_config(&text), Err(Error::ConfigKey { .. })));
        let text =
            BASIC.replace("lh-mapped, exact, classical", "lh_mapped, classical") + "threshold.lh_mapped.l1_max = 0.1\n";
        assert!(matches!(parse_config(&text), Err(Error::ConfigKey { .. })));
    }

    #[test]
    fn grid_window_is_all_or_nothing() {
        let text = format!("{BASIC}grid.x_min = -5\n");
        assert!(parse_config(&text).is_err());
        let text = format!("{BASIC}grid.x_min = -5\ngrid.x_max = 5\ngrid.n_points = 201\n");
        assert_eq!(parse_config(&text).unwrap().grid.window, Some((-5.0, 5.0, 201)));
    }
}
