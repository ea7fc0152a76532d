//! Checked-in experiment recipes with accepted ranges.
//!
//! A recipe file holds a run description and a list of checks. Running it
//! produces named series of values; each check reduces the series it selects
//! to one number and compares that number with its bounds. The schema is
//! documented in `recipes/README.md`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{estimate_on_grid, lag_window_on_grid, EstimationGrid};
use crate::fields::{simulate, spectrum_sup, FieldGrid, FieldModel};
use crate::harness::{median, run_experiment, ExperimentConfig};
use crate::kernels::KernelConfig;
use crate::lattice::LatticeSpec;
use crate::rng::split_seed;
use crate::spectra::{
    autocovariance_brute_force, dft_naive_oracle, fourier_coefficients, periodogram_of, sample_autocovariance,
    FourierTable, MeanMode,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub name: String,
    /// Acceptance criterion this recipe decides.
    pub criterion: u32,
    /// The property under test, in words.
    pub probes: String,
    /// Wall-clock limit; adds an `elapsed_seconds` check when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_seconds: Option<f64>,
    pub run: Run,
    pub checks: Vec<Check>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedExperiment {
    pub label: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Run {
    /// Partition, symmetry, mean-point and mean-shift identities on every
    /// lattice with sides in `min_side..=max_side`.
    ExactIdentities {
        min_side: usize,
        max_side: usize,
        fields_per_lattice: usize,
        seed: u64,
    },
    /// FFT coefficients and FFT autocovariance against direct sums.
    OracleEquivalence {
        lattices: Vec<LatticeSpec>,
        fields_per_lattice: usize,
        autocov_lattice: LatticeSpec,
        autocov_fields: usize,
        seed: u64,
    },
    Experiment { experiments: Vec<NamedExperiment> },
    /// Smoothed periodogram against the lag-window form on the Fourier grid.
    EstimatorEquivalence {
        model: FieldModel,
        lattice: LatticeSpec,
        kernel: KernelConfig,
        replications: usize,
        seed: u64,
    },
    /// Every other recipe in the directory, timed, then rerun on a pool of
    /// `threads` workers and compared bit for bit.
    Suite { threads: usize },
}

/// Reduction applied to the selected series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    Mean,
    Median,
    Max,
    Min,
    /// Number of values strictly below the threshold.
    CountBelow(f64),
    /// Number of values at or below the threshold.
    CountAtMost(f64),
    /// Number of NaN or infinite values.
    NonFinite,
    /// `max / min` of the per-lattice medians.
    MedianRatio,
    /// Largest ratio of consecutive per-lattice medians, lattices ordered by
    /// size. Below 1 means strictly decreasing.
    MedianDecreaseRatio,
}

impl Measure {
    fn across_lattices(&self) -> bool {
        matches!(self, Measure::MedianRatio | Measure::MedianDecreaseRatio)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Mean => f.write_str("mean"),
            Measure::Median => f.write_str("median"),
            Measure::Max => f.write_str("max"),
            Measure::Min => f.write_str("min"),
            Measure::CountBelow(t) => write!(f, "count(< {})", num(*t)),
            Measure::CountAtMost(t) => write!(f, "count(<= {})", num(*t)),
            Measure::NonFinite => f.write_str("non-finite count"),
            Measure::MedianRatio => f.write_str("median max/min"),
            Measure::MedianDecreaseRatio => f.write_str("median step ratio"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    None,
    /// Divide values by `sup f` of the experiment's model.
    SupF,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    /// Experiment label; may be omitted when the run has one source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    /// Series name, or a prefix followed by `*`.
    pub statistic: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    pub measure: Measure,
    #[serde(default)]
    pub scale: Scale,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_least: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub at_most: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub above: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub below: Option<f64>,
}

impl Check {
    fn bounds(&self) -> Bounds {
        Bounds {
            at_least: self.at_least,
            at_most: self.at_most,
            above: self.above,
            below: self.below,
        }
    }

    fn matches(&self, name: &str) -> bool {
        match self.statistic.strip_suffix('*') {
            Some(prefix) => name.starts_with(prefix),
            None => name == self.statistic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Bounds {
    at_least: Option<f64>,
    at_most: Option<f64>,
    above: Option<f64>,
    below: Option<f64>,
}

impl Bounds {
    fn is_empty(&self) -> bool {
        self.at_least.is_none() && self.at_most.is_none() && self.above.is_none() && self.below.is_none()
    }

    fn admits(&self, v: f64) -> bool {
        !v.is_nan()
            && self.at_least.is_none_or(|b| v >= b)
            && self.at_most.is_none_or(|b| v <= b)
            && self.above.is_none_or(|b| v > b)
            && self.below.is_none_or(|b| v < b)
    }
}

/// Plain notation for moderate magnitudes, scientific otherwise.
fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(b) = self.at_least {
            parts.push(format!(">= {}", num(b)));
        }
        if let Some(b) = self.above {
            parts.push(format!("> {}", num(b)));
        }
        if let Some(b) = self.at_most {
            parts.push(format!("<= {}", num(b)));
        }
        if let Some(b) = self.below {
            parts.push(format!("< {}", num(b)));
        }
        f.write_str(&parts.join(" and "))
    }
}

/// Values produced by a run, keyed by source, lattice and name.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub source: String,
    pub lattice: Option<LatticeSpec>,
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub label: String,
    pub measured: f64,
    pub accepted: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecipeOutcome {
    pub name: String,
    pub criterion: u32,
    pub probes: String,
    pub elapsed_seconds: f64,
    pub checks: Vec<CheckOutcome>,
    pub series: Vec<Series>,
}

impl RecipeOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Bit patterns of every produced value, for reproducibility checks.
    pub fn fingerprint(&self) -> Vec<u64> {
        self.series.iter().flat_map(|s| s.values.iter().map(|v| v.to_bits())).collect()
    }

    /// `criterion  3 PASS thm2c_whitenoise (1.2 s)` followed by one indented
    /// line per check.
    pub fn summary(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let mut out = format!(
            "criterion {:>2} {verdict} {} ({:.1} s): {}",
            self.criterion, self.name, self.elapsed_seconds, self.probes
        );
        for c in &self.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            let measured = if c.measured.fract() == 0.0 && c.measured.abs() < 1e9 {
                format!("{}", c.measured)
            } else if (1e-3..1e6).contains(&c.measured.abs()) {
                format!("{:.6}", c.measured)
            } else {
                format!("{:.6e}", c.measured)
            };
            out.push_str(&format!("\n    {mark} {} = {measured} (accepted {})", c.label, c.accepted));
        }
        out
    }
}

impl Recipe {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let recipe: Recipe = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                Error::Json(inner)
            } else {
                Error::Config(format!("{path}: {inner}"))
            }
        })?;
        recipe.validate()?;
        Ok(recipe)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    fn validate(&self) -> Result<()> {
        if self.checks.is_empty() && !matches!(self.run, Run::Suite { .. }) {
            return Err(Error::Config(format!("recipe `{}` has no checks", self.name)));
        }
        for (k, c) in self.checks.iter().enumerate() {
            if c.bounds().is_empty() {
                return Err(Error::Config(format!("recipe `{}`: checks[{k}] has no bound", self.name)));
            }
            if c.measure.across_lattices() && c.lattice.is_some() {
                return Err(Error::Config(format!(
                    "recipe `{}`: checks[{k}] compares lattices and cannot fix one",
                    self.name
                )));
            }
        }
        if let Run::Experiment { experiments } = &self.run {
            for e in experiments {
                e.config.validate()?;
            }
        }
        Ok(())
    }
}

/// Loads every `*.json` recipe in `dir`, ordered by criterion then name.
pub fn load_dir(dir: &Path) -> Result<Vec<(PathBuf, Recipe)>> {
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let recipe = Recipe::from_file(&path)?;
            out.push((path, recipe));
        }
    }
    out.sort_by(|a, b| (a.1.criterion, &a.1.name).cmp(&(b.1.criterion, &b.1.name)));
    Ok(out)
}

fn random_field(spec: LatticeSpec, rng: &mut ChaCha8Rng) -> FieldGrid {
    FieldGrid::from_fn(spec, |_, _| rng.random_range(-2.0..3.0)).expect("finite values")
}

fn exact_identities(min_side: usize, max_side: usize, fields: usize, seed: u64) -> Result<Vec<Series>> {
    let mut violations = 0.0;
    let (mut symmetry, mut m_points, mut shift) = (0.0f64, 0.0f64, 0.0f64);
    for d2 in min_side..=max_side {
        for d1 in min_side..=max_side {
            let spec = LatticeSpec::new(d1, d2)?;
            let p = spec.partition();
            let mut seen = vec![0u8; spec.size()];
            for j in p.n_set.iter().chain(&p.n_tilde_set).chain(&p.m_set) {
                seen[spec.offset(j.j1, j.j2)] += 1;
            }
            let mirrored = p.n_set.iter().zip(&p.n_tilde_set).all(|(a, b)| spec.reflect(*a) == *b);
            if seen.iter().any(|&c| c != 1)
                || 2 * p.n_set.len() + p.m_set.len() != spec.size()
                || p.n_tilde_set.len() != p.n_set.len()
                || !mirrored
            {
                violations += 1.0;
            }

            let mut rng = ChaCha8Rng::seed_from_u64(split_seed(seed, (d1 * 100 + d2) as u64));
            for _ in 0..fields {
                let v = random_field(spec, &mut rng);
                let t = fourier_coefficients(&v);
                for j in spec.indices() {
                    let r = spec.reflect(j);
                    let (a, b) = (spec.offset(j.j1, j.j2), spec.offset(r.j1, r.j2));
                    symmetry = symmetry
                        .max((t.x_values()[a] - t.x_values()[b]).abs())
                        .max((t.y_values()[a] + t.y_values()[b]).abs());
                }
                m_points = m_points.max(m_point_error(&v, &t));

                let c = rng.random_range(-10.0..10.0);
                let s = fourier_coefficients(&v.map(|x| x + c));
                for j in &p.n_set {
                    let o = spec.offset(j.j1, j.j2);
                    shift = shift
                        .max((s.x_values()[o] - t.x_values()[o]).abs())
                        .max((s.y_values()[o] - t.y_values()[o]).abs());
                }
            }
        }
    }
    Ok([
        ("partition_violations", violations),
        ("symmetry_error", symmetry),
        ("m_point_error", m_points),
        ("mean_shift_error", shift),
    ]
    .into_iter()
    .map(|(name, v)| Series {
        source: String::new(),
        lattice: None,
        name: name.into(),
        values: vec![v],
    })
    .collect())
}

/// Largest deviation from the closed forms of the coefficients on `M`.
fn m_point_error(v: &FieldGrid, t: &FourierTable) -> f64 {
    let spec = v.spec();
    let (d1, d2) = spec.dims();
    let root = (spec.size() as f64).sqrt();
    let alternating = |s1: bool, s2: bool| {
        spec.indices()
            .map(|i| {
                let e = (if s1 { i.j1 } else { 0 }) + (if s2 { i.j2 } else { 0 });
                let sign = if e % 2 == 0 { 1.0 } else { -1.0 };
                sign * v.get(i.j1, i.j2)
            })
            .sum::<f64>()
            / root
    };
    let mut err = 0.0f64;
    for m in spec.partition().m_set {
        let want = alternating(m.j1 * 2 == d1, m.j2 * 2 == d2);
        let o = spec.offset(m.j1, m.j2);
        err = err.max((t.x_values()[o] - want).abs()).max(t.y_values()[o].abs());
    }
    err
}

fn oracle_equivalence(
    lattices: &[LatticeSpec],
    fields: usize,
    autocov_lattice: LatticeSpec,
    autocov_fields: usize,
    seed: u64,
) -> Vec<Series> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dft = Vec::new();
    for &spec in lattices {
        for _ in 0..fields {
            let v = random_field(spec, &mut rng);
            let (fast, slow) = (fourier_coefficients(&v), dft_naive_oracle(&v));
            let scale = slow.x_values().iter().chain(slow.y_values()).fold(0.0f64, |m, x| m.max(x.abs()));
            let err = fast
                .x_values()
                .iter()
                .chain(fast.y_values())
                .zip(slow.x_values().iter().chain(slow.y_values()))
                .map(|(a, b)| (a - b).abs() / scale)
                .fold(0.0, f64::max);
            dft.push(err);
        }
    }
    let mut acov = Vec::new();
    for _ in 0..autocov_fields {
        let v = random_field(autocov_lattice, &mut rng);
        for mode in [MeanMode::Estimated, MeanMode::Known(0.5)] {
            let fast = sample_autocovariance(&v, mode);
            let slow = autocovariance_brute_force(&v, mode);
            let err = fast.iter().zip(slow.iter()).map(|((_, a), (_, b))| (a - b).abs()).fold(0.0, f64::max);
            acov.push(err);
        }
    }
    vec![
        Series {
            source: String::new(),
            lattice: None,
            name: "dft_relative_error".into(),
            values: dft,
        },
        Series {
            source: String::new(),
            lattice: Some(autocov_lattice),
            name: "autocov_abs_error".into(),
            values: acov,
        },
    ]
}

fn estimator_equivalence(
    model: &FieldModel,
    spec: LatticeSpec,
    kernel: &KernelConfig,
    reps: usize,
    seed: u64,
) -> Result<Vec<Series>> {
    let k = kernel.resolve(spec)?;
    let gaps = (0..reps)
        .into_par_iter()
        .map(|r| {
            let v = simulate(model, spec, split_seed(seed, r as u64))?;
            let smoothed = estimate_on_grid(&periodogram_of(&v), &k, EstimationGrid::Fourier)?;
            let lagged = lag_window_on_grid(&v, &k, EstimationGrid::Fourier)?;
            let gap = smoothed
                .values
                .iter()
                .zip(&lagged.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Ok(gap / smoothed.sup())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![Series {
        source: String::new(),
        lattice: Some(spec),
        name: "sup_gap_ratio".into(),
        values: gaps,
    }])
}

fn reduce(measure: Measure, values: &[f64]) -> f64 {
    let n = values.len() as f64;
    match measure {
        Measure::Mean => values.iter().sum::<f64>() / n,
        Measure::Median => median(values),
        Measure::Max => values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        Measure::Min => values.iter().cloned().fold(f64::INFINITY, f64::min),
        Measure::CountBelow(t) => values.iter().filter(|v| **v < t).count() as f64,
        Measure::CountAtMost(t) => values.iter().filter(|v| **v <= t).count() as f64,
        Measure::NonFinite => values.iter().filter(|v| !v.is_finite()).count() as f64,
        Measure::MedianRatio | Measure::MedianDecreaseRatio => unreachable!("handled per statistic"),
    }
}

/// Medians per lattice in increasing lattice size.
fn lattice_medians(group: &[&Series]) -> Vec<f64> {
    let mut g: Vec<&&Series> = group.iter().collect();
    g.sort_by_key(|s| s.lattice.map(|l| l.size()).unwrap_or(0));
    g.iter().map(|s| median(&s.values)).collect()
}

fn evaluate(
    recipe: &Recipe,
    series: &[Series],
    models: &[(String, FieldModel)],
) -> Result<Vec<CheckOutcome>> {
    let sources: Vec<&str> = {
        let mut s: Vec<&str> = series.iter().map(|s| s.source.as_str()).collect();
        s.dedup();
        s
    };
    let mut out = Vec::new();
    for (k, check) in recipe.checks.iter().enumerate() {
        let source = match (&check.experiment, sources.as_slice()) {
            (Some(l), _) => l.as_str(),
            (None, [only]) => only,
            (None, _) => {
                return Err(Error::Config(format!(
                    "recipe `{}`: checks[{k}] must name an experiment",
                    recipe.name
                )))
            }
        };
        let scale = match check.scale {
            Scale::None => 1.0,
            Scale::SupF => {
                let model = models.iter().find(|(l, _)| l == source).map(|(_, m)| m).ok_or_else(|| {
                    Error::Config(format!("recipe `{}`: checks[{k}] scales by a model it cannot find", recipe.name))
                })?;
                spectrum_sup(model)?
            }
        };
        let selected: Vec<&Series> = series
            .iter()
            .filter(|s| s.source == source && check.matches(&s.name))
            .filter(|s| check.lattice.is_none() || s.lattice == check.lattice)
            .collect();
        if selected.is_empty() {
            return Err(Error::Config(format!(
                "recipe `{}`: checks[{k}] selects no series",
                recipe.name
            )));
        }
        let prefix = if source.is_empty() { String::new() } else { format!("{source} ") };
        let bounds = check.bounds();
        let mut push = |label: String, measured: f64| {
            out.push(CheckOutcome {
                label,
                measured,
                accepted: bounds.to_string(),
                passed: bounds.admits(measured),
            })
        };
        let mut names: Vec<&str> = selected.iter().map(|s| s.name.as_str()).collect();
        names.sort();
        names.dedup();
        for name in names {
            let group: Vec<&Series> = selected.iter().copied().filter(|s| s.name == name).collect();
            if check.measure.across_lattices() {
                let medians: Vec<f64> = lattice_medians(&group).into_iter().map(|m| m / scale).collect();
                let measured = match check.measure {
                    Measure::MedianRatio => {
                        let hi = medians.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                        let lo = medians.iter().cloned().fold(f64::INFINITY, f64::min);
                        if medians.iter().all(|m| m.is_finite()) && lo > 0.0 {
                            hi / lo
                        } else {
                            f64::NAN
                        }
                    }
                    _ => medians.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max),
                };
                push(format!("{prefix}{name} {}", check.measure), measured);
            } else {
                for s in group {
                    let values: Vec<f64> = s.values.iter().map(|v| v / scale).collect();
                    let at = s.lattice.map(|l| format!("@{l}")).unwrap_or_default();
                    let scaled = if check.scale == Scale::SupF { " / sup f" } else { "" };
                    push(format!("{prefix}{name}{at} {}{scaled}", check.measure), reduce(check.measure, &values));
                }
            }
        }
    }
    Ok(out)
}

/// Runs a single recipe. Suite recipes need the rest of their directory;
/// use [`run_dir`] for them.
pub fn run_recipe(recipe: &Recipe) -> Result<RecipeOutcome> {
    let start = Instant::now();
    let mut models = Vec::new();
    let series = match &recipe.run {
        Run::ExactIdentities {
            min_side,
            max_side,
            fields_per_lattice,
            seed,
        } => exact_identities(*min_side, *max_side, *fields_per_lattice, *seed)?,
        Run::OracleEquivalence {
            lattices,
            fields_per_lattice,
            autocov_lattice,
            autocov_fields,
            seed,
        } => oracle_equivalence(lattices, *fields_per_lattice, *autocov_lattice, *autocov_fields, *seed),
        Run::Experiment { experiments } => {
            let mut all = Vec::new();
            for e in experiments {
                let report = run_experiment(&e.config)?;
                models.push((e.label.clone(), e.config.model.clone()));
                all.extend(report.rows.into_iter().map(|r| Series {
                    source: e.label.clone(),
                    lattice: Some(r.lattice),
                    name: r.statistic,
                    values: r.values,
                }));
            }
            all
        }
        Run::EstimatorEquivalence {
            model,
            lattice,
            kernel,
            replications,
            seed,
        } => estimator_equivalence(model, *lattice, kernel, *replications, *seed)?,
        Run::Suite { .. } => {
            return Err(Error::Config(format!(
                "recipe `{}` runs a whole directory; use run_dir",
                recipe.name
            )))
        }
    };
    let elapsed_seconds = start.elapsed().as_secs_f64();
    let mut checks = evaluate(recipe, &series, &models)?;
    if let Some(budget) = recipe.budget_seconds {
        checks.push(budget_check(elapsed_seconds, budget));
    }
    Ok(RecipeOutcome {
        name: recipe.name.clone(),
        criterion: recipe.criterion,
        probes: recipe.probes.clone(),
        elapsed_seconds,
        checks,
        series,
    })
}

fn budget_check(elapsed: f64, budget: f64) -> CheckOutcome {
    CheckOutcome {
        label: "elapsed_seconds".into(),
        measured: elapsed,
        accepted: format!("< {}", num(budget)),
        passed: elapsed < budget,
    }
}

/// Runs every recipe in `dir`. Suite recipes rerun the others on their own
/// thread pool and compare every produced value bit for bit.
pub fn run_dir(dir: &Path) -> Result<Vec<RecipeOutcome>> {
    run_recipes(&load_dir(dir)?.into_iter().map(|(_, r)| r).collect::<Vec<_>>())
}

pub fn run_recipes(recipes: &[Recipe]) -> Result<Vec<RecipeOutcome>> {
    let (suites, plain): (Vec<&Recipe>, Vec<&Recipe>) =
        recipes.iter().partition(|r| matches!(r.run, Run::Suite { .. }));
    let mut outcomes = plain.iter().map(|r| run_recipe(r)).collect::<Result<Vec<_>>>()?;
    let total: f64 = outcomes.iter().map(|o| o.elapsed_seconds).sum();
    for suite in suites {
        let Run::Suite { threads } = suite.run else { unreachable!() };
        let start = Instant::now();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        let rerun = pool.install(|| plain.iter().map(|r| run_recipe(r)).collect::<Result<Vec<_>>>())?;
        let mismatched = outcomes
            .iter()
            .zip(&rerun)
            .filter(|(a, b)| a.fingerprint() != b.fingerprint())
            .count();
        let series = vec![
            Series {
                source: String::new(),
                lattice: None,
                name: "first_pass_seconds".into(),
                values: vec![total],
            },
            Series {
                source: String::new(),
                lattice: None,
                name: "irreproducible_recipes".into(),
                values: vec![mismatched as f64],
            },
            Series {
                source: String::new(),
                lattice: None,
                name: "recipes_run".into(),
                values: vec![plain.len() as f64],
            },
        ];
        let mut checks = evaluate(suite, &series, &[])?;
        if let Some(budget) = suite.budget_seconds {
            checks.push(budget_check(total, budget));
        }
        outcomes.push(RecipeOutcome {
            name: suite.name.clone(),
            criterion: suite.criterion,
            probes: suite.probes.clone(),
            elapsed_seconds: start.elapsed().as_secs_f64(),
            checks,
            series,
        });
    }
    outcomes.sort_by(|a, b| (a.criterion, &a.name).cmp(&(b.criterion, &b.name)));
    Ok(outcomes)
}
