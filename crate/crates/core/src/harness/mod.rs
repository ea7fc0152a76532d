//! Monte Carlo experiments over simulated fields.
//!
//! A run simulates each replication with seed `split_seed(seed, r)`,
//! evaluates the requested statistics and reduces the replications in index
//! order, so reports are bit-identical across thread counts.

mod stats;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use stats::{
    coefficient_sums, exponential_moment, log_slope, normal_cdf, stat_coro1_ks, stat_thm2a, stat_thm2c, stat_thm2d, stat_thm2e,
    stat_thm3, stat_thm4_sup, weighted_ks, ReferenceSpectrum, WeightedItem,
};

use crate::error::{Error, Result};
use crate::estimators::{
    detrend_least_squares, estimate_on_grid, estimated_field_report, EstimatedFieldReport, EstimationGrid,
    DEFAULT_Q,
};
use crate::fields::{gmc_samples, simulate, FieldGrid, FieldModel};
use crate::kernels::{build_weights, KernelConfig, KernelSpec, WeightTable};
use crate::lattice::LatticeSpec;
use crate::rng::split_seed;
use crate::spectra::{fourier_coefficients, periodogram};

/// Lattices with `|N|` below this are flagged in reports.
pub const LOW_N: usize = 8;

/// Largest accepted side ratio `max(d1, d2) / min(d1, d2)`.
pub const MAX_ASPECT: f64 = 8.0;

/// Statistic selectors accepted in experiment configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Thm2a,
    Thm2c,
    Thm2d,
    Thm2e,
    Coro1Ks,
    Thm3a,
    Thm3b,
    Thm3c,
    Thm3d,
    Thm4Sup,
    Thm5Suite,
    Gmc,
}

impl Statistic {
    pub const ALL: [Statistic; 12] = [
        Statistic::Thm2a,
        Statistic::Thm2c,
        Statistic::Thm2d,
        Statistic::Thm2e,
        Statistic::Coro1Ks,
        Statistic::Thm3a,
        Statistic::Thm3b,
        Statistic::Thm3c,
        Statistic::Thm3d,
        Statistic::Thm4Sup,
        Statistic::Thm5Suite,
        Statistic::Gmc,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Thm2a => "thm2a",
            Statistic::Thm2c => "thm2c",
            Statistic::Thm2d => "thm2d",
            Statistic::Thm2e => "thm2e",
            Statistic::Coro1Ks => "coro1_ks",
            Statistic::Thm3a => "thm3a",
            Statistic::Thm3b => "thm3b",
            Statistic::Thm3c => "thm3c",
            Statistic::Thm3d => "thm3d",
            Statistic::Thm4Sup => "thm4_sup",
            Statistic::Thm5Suite => "thm5_suite",
            Statistic::Gmc => "gmc",
        }
    }

    fn needs_kernel(&self) -> bool {
        matches!(
            self,
            Statistic::Thm3a
                | Statistic::Thm3b
                | Statistic::Thm3c
                | Statistic::Thm3d
                | Statistic::Thm4Sup
                | Statistic::Thm5Suite
        )
    }

    fn needs_spectrum(&self) -> bool {
        !matches!(self, Statistic::Gmc)
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Statistic::ALL.into_iter().find(|k| k.name() == s.trim()).ok_or_else(|| {
            let names: Vec<&str> = Statistic::ALL.iter().map(|k| k.name()).collect();
            Error::Config(format!("unknown statistic `{s}`; valid names: {}", names.join(", ")))
        })
    }
}

/// Weights of the empirical-distribution statistic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum KsWeights {
    /// `w_j = 1 / |N|`
    #[default]
    Equal,
    /// Explicit weights in the order of the lattice's `N` set.
    Custom(Vec<f64>),
}

/// A polynomial surface `sum c (t1/d1)^a (t2/d2)^b` added to simulated fields
/// before detrending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendConfig {
    /// Degree of the least-squares fit.
    pub degree: usize,
    /// `(a, b, c)` triples of the true surface.
    #[serde(default = "TrendConfig::default_terms")]
    pub terms: Vec<(u32, u32, f64)>,
}

impl TrendConfig {
    fn default_terms() -> Vec<(u32, u32, f64)> {
        vec![(0, 0, 2.0), (1, 0, -3.0), (0, 1, 1.5), (2, 0, 4.0), (1, 1, -2.0), (0, 2, 2.5)]
    }

    pub fn surface(&self, spec: LatticeSpec) -> FieldGrid {
        let (d1, d2) = (spec.d1() as f64, spec.d2() as f64);
        let values = spec
            .indices()
            .map(|t| {
                let (u, v) = (t.j1 as f64 / d1, t.j2 as f64 / d2);
                self.terms.iter().map(|&(a, b, c)| c * u.powi(a as i32) * v.powi(b as i32)).sum()
            })
            .collect();
        FieldGrid::new(spec, values).expect("finite trend surface")
    }
}

impl Default for TrendConfig {
    fn default() -> Self {
        Self {
            degree: 2,
            terms: Self::default_terms(),
        }
    }
}

/// Settings of the coupling-decay diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GmcConfig {
    pub radii: Vec<i64>,
    #[serde(default = "GmcConfig::default_alpha")]
    pub alpha: f64,
}

impl GmcConfig {
    fn default_alpha() -> f64 {
        2.0
    }
}

fn default_grid() -> EstimationGrid {
    EstimationGrid::DEFAULT_SUP
}

fn default_q() -> f64 {
    DEFAULT_Q
}

/// A Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: FieldModel,
    pub lattices: Vec<LatticeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<KernelConfig>,
    pub replications: usize,
    pub seed: u64,
    pub statistics: Vec<Statistic>,
    #[serde(default)]
    pub weights_coro1: KsWeights,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default = "default_grid")]
    pub grid: EstimationGrid,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gmc: Option<GmcConfig>,
}

impl ExperimentConfig {
    /// Parses and validates a configuration. Errors name the offending JSON
    /// path; syntax errors carry the line number.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = match serde_path_to_error::deserialize(de) {
            Ok(cfg) => cfg,
            Err(e) => {
                let path = e.path().to_string();
                let inner = e.into_inner();
                if inner.is_syntax() || inner.is_eof() {
                    return Err(Error::Json(inner));
                }
                if path == "model" || path.starts_with("model.") {
                    if let Ok(v) = serde_json::from_str::<serde_json::Value>(text) {
                        if let Some(m) = v.get("model") {
                            if let Err(Error::InvalidModel { field, reason }) = FieldModel::from_json(&m.to_string()) {
                                return Err(Error::model(format!("model.{field}"), reason));
                            }
                        }
                    }
                }
                return Err(Error::Config(format!("{path}: {inner}")));
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.model
            .validate()
            .map_err(|e| match e {
                Error::InvalidModel { field, reason } => Error::model(format!("model.{field}"), reason),
                other => other,
            })?;
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.lattices.is_empty() {
            return Err(Error::Config("lattices must not be empty".into()));
        }
        if self.statistics.is_empty() {
            return Err(Error::Config("statistics must not be empty".into()));
        }
        for s in &self.lattices {
            let (a, b) = (s.d1().max(s.d2()) as f64, s.d1().min(s.d2()) as f64);
            if a / b > MAX_ASPECT {
                return Err(Error::Config(format!("lattice {s} exceeds the aspect-ratio limit {MAX_ASPECT}")));
            }
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(Error::Config(format!("q must be positive, got {}", self.q)));
        }
        if let KsWeights::Custom(w) = &self.weights_coro1 {
            let total: f64 = w.iter().sum();
            if w.iter().any(|v| v.is_nan() || *v < 0.0) || (total - 1.0).abs() > 1e-9 {
                return Err(Error::Config(format!("weights_coro1 must be nonnegative and sum to 1 (sum {total})")));
            }
        }
        let kernel_needed = self.statistics.iter().any(|s| s.needs_kernel());
        match (&self.kernel, kernel_needed) {
            (None, true) => return Err(Error::Config("the selected statistics need a `kernel` entry".into())),
            (Some(k), _) => {
                for &s in &self.lattices {
                    k.resolve(s)?.check_feasible(s)?;
                }
            }
            _ => {}
        }
        if self.statistics.contains(&Statistic::Gmc) {
            let g = self
                .gmc
                .as_ref()
                .ok_or_else(|| Error::Config("statistic `gmc` needs a `gmc` entry".into()))?;
            if g.radii.len() < 2 {
                return Err(Error::Config("gmc.radii needs at least two radii".into()));
            }
        }
        Ok(())
    }
}

/// One statistic on one lattice, aggregated over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub lattice: LatticeSpec,
    pub statistic: String,
    pub estimate: f64,
    /// Standard deviation over replications divided by `sqrt(reps)`;
    /// `None` for a single replication or an aggregate-only statistic.
    pub se: Option<f64>,
    pub reps: usize,
    pub median: f64,
    pub low_n: bool,
    pub values: Vec<f64>,
}

impl ReportRow {
    fn from_values(lattice: LatticeSpec, statistic: String, values: Vec<f64>, low_n: bool) -> Self {
        let reps = values.len();
        let mean = values.iter().sum::<f64>() / reps as f64;
        let se = (reps > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
            (var / reps as f64).sqrt()
        });
        Self {
            lattice,
            statistic,
            estimate: mean,
            se,
            reps,
            median: median(&values),
            low_n,
            values,
        }
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub rows: Vec<ReportRow>,
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn row(&self, lattice: LatticeSpec, statistic: &str) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.lattice == lattice && r.statistic == statistic)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }

    /// Tidy CSV: one row per lattice and statistic.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["lattice", "statistic", "estimate", "se", "reps", "median", "low_n"])?;
        for r in &self.rows {
            w.write_record([
                r.lattice.to_string(),
                r.statistic.clone(),
                format!("{:.16e}", r.estimate),
                r.se.map(|s| format!("{s:.16e}")).unwrap_or_default(),
                r.reps.to_string(),
                format!("{:.16e}", r.median),
                r.low_n.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Everything that depends on the lattice but not on the replication.
struct LatticeContext {
    spec: LatticeSpec,
    f: Option<ReferenceSpectrum>,
    kernel: Option<KernelSpec>,
    weights: Option<WeightTable>,
    truth_on_grid: Option<Vec<f64>>,
    trend: Option<(TrendConfig, FieldGrid)>,
    ks_weights: Vec<f64>,
}

fn prepare(cfg: &ExperimentConfig, spec: LatticeSpec) -> Result<LatticeContext> {
    let needs_f = cfg.statistics.iter().any(|s| s.needs_spectrum());
    let f = needs_f.then(|| ReferenceSpectrum::from_model(&cfg.model, spec)).transpose()?;
    let kernel = cfg.kernel.map(|k| k.resolve(spec)).transpose()?;
    let weights = kernel.map(|k| build_weights(spec, &k)).transpose()?;
    let truth_on_grid = if cfg.statistics.contains(&Statistic::Thm4Sup) {
        Some(
            cfg.grid
                .points(spec)
                .into_iter()
                .map(|l| cfg.model.theoretical_spectrum(l))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };
    let trend = cfg.statistics.contains(&Statistic::Thm5Suite).then(|| {
        let t = cfg.trend.clone().unwrap_or_default();
        let surface = t.surface(spec);
        (t, surface)
    });
    let n = spec.partition().n_set.len();
    let ks_weights = match &cfg.weights_coro1 {
        KsWeights::Equal => vec![1.0 / n.max(1) as f64; n],
        KsWeights::Custom(w) => w.clone(),
    };
    Ok(LatticeContext {
        spec,
        f,
        kernel,
        weights,
        truth_on_grid,
        trend,
        ks_weights,
    })
}

fn replication(cfg: &ExperimentConfig, ctx: &LatticeContext, seed: u64) -> Result<Vec<(String, f64)>> {
    let v = simulate(&cfg.model, ctx.spec, seed)?;
    let table = fourier_coefficients(&v);
    let pg = periodogram(&table);
    let f = || ctx.f.as_ref().expect("spectrum prepared");
    let w = || ctx.weights.as_ref().expect("weights prepared");
    let mut out = Vec::new();
    for &stat in &cfg.statistics {
        let name = stat.name().to_string();
        match stat {
            Statistic::Thm2a => out.push((name, stat_thm2a(&table, f())?)),
            Statistic::Thm2c => out.push((name, stat_thm2c(&pg, f())?)),
            Statistic::Thm2d => out.push((name, stat_thm2d(&pg, f())?)),
            Statistic::Thm2e => out.push((name, stat_thm2e(&pg, f(), cfg.q)?)),
            Statistic::Coro1Ks => out.push((name, stat_coro1_ks(&table, f(), &ctx.ks_weights)?)),
            Statistic::Thm3a => out.push((name, stat_thm3(WeightedItem::A, &table, &pg, w(), f(), cfg.q)?)),
            Statistic::Thm3b => out.push((name, stat_thm3(WeightedItem::B, &table, &pg, w(), f(), cfg.q)?)),
            Statistic::Thm3c => out.push((name, stat_thm3(WeightedItem::C, &table, &pg, w(), f(), cfg.q)?)),
            Statistic::Thm3d => out.push((name, stat_thm3(WeightedItem::D, &table, &pg, w(), f(), cfg.q)?)),
            Statistic::Thm4Sup => {
                let mut est = estimate_on_grid(&pg, &ctx.kernel.expect("kernel prepared"), cfg.grid)?;
                est.truth = ctx.truth_on_grid.clone();
                out.push((name, stat_thm4_sup(&est)?));
            }
            Statistic::Thm5Suite => {
                let (trend, surface) = ctx.trend.as_ref().expect("trend prepared");
                let y = v.add(surface)?;
                let fit = detrend_least_squares(&y, trend.degree)?;
                let model = &cfg.model;
                let rep: EstimatedFieldReport = estimated_field_report(
                    &v,
                    &fit.v_hat,
                    &ctx.kernel.expect("kernel prepared"),
                    w(),
                    &|l| model.theoretical_spectrum(l).unwrap_or(f64::NAN),
                    cfg.q,
                )?;
                for (k, value) in rep.entries() {
                    out.push((format!("thm5_suite.{k}"), value));
                }
            }
            Statistic::Gmc => {}
        }
    }
    Ok(out)
}

fn gmc_rows(cfg: &ExperimentConfig, spec: LatticeSpec, low_n: bool) -> Result<Vec<ReportRow>> {
    let g = cfg.gmc.as_ref().expect("validated");
    let samples = gmc_samples(&cfg.model, spec, &g.radii, cfg.replications, g.alpha, cfg.seed)?;
    let mut rows = Vec::new();
    let mut means = Vec::new();
    for (k, r) in g.radii.iter().enumerate() {
        let column: Vec<f64> = samples.iter().map(|row| row[k]).collect();
        let row = ReportRow::from_values(spec, format!("gmc.r{r}"), column, low_n);
        means.push(row.estimate);
        rows.push(row);
    }
    let radii: Vec<f64> = g.radii.iter().map(|&r| r as f64).collect();
    let slope = log_slope(&radii, &means);
    rows.push(ReportRow {
        lattice: spec,
        statistic: "gmc.slope".into(),
        estimate: slope,
        se: None,
        reps: cfg.replications,
        median: slope,
        low_n,
        values: vec![slope],
    });
    Ok(rows)
}

/// Runs every lattice and replication of an experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let mut rows = Vec::new();
    for &spec in &cfg.lattices {
        let low_n = spec.partition().n_set.len() < LOW_N;
        let per_rep = cfg.statistics.iter().any(|s| *s != Statistic::Gmc);
        if per_rep {
            let ctx = prepare(cfg, spec)?;
            let results: Vec<Result<Vec<(String, f64)>>> = (0..cfg.replications)
                .into_par_iter()
                .map(|r| replication(cfg, &ctx, split_seed(cfg.seed, r as u64)))
                .collect();
            let mut columns: Vec<(String, Vec<f64>)> = Vec::new();
            for (r, res) in results.into_iter().enumerate() {
                let values = res.map_err(|e| match e {
                    Error::Simulation(msg) => Error::Simulation(format!("lattice {spec}, replication {r}: {msg}")),
                    other => other,
                })?;
                if columns.is_empty() {
                    columns = values.iter().map(|(k, _)| (k.clone(), Vec::new())).collect();
                }
                for ((_, col), (_, v)) in columns.iter_mut().zip(values) {
                    col.push(v);
                }
            }
            rows.extend(
                columns
                    .into_iter()
                    .map(|(name, values)| ReportRow::from_values(spec, name, values, low_n)),
            );
        }
        if cfg.statistics.contains(&Statistic::Gmc) {
            rows.extend(gmc_rows(cfg, spec, low_n)?);
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        rows,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::InnovationSpec;
    use crate::kernels::{Bandwidth, KernelFamily};

    fn base(stats: Vec<Statistic>, reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            model: FieldModel::white_noise(InnovationSpec::gaussian(1.0)),
            lattices: vec![LatticeSpec::new(32, 32).unwrap()],
            kernel: Some(KernelConfig {
                family: KernelFamily::Epanechnikov,
                bandwidth: Bandwidth::Fixed(0.4, 0.4),
            }),
            replications: reps,
            seed: 7,
            statistics: stats,
            weights_coro1: KsWeights::Equal,
            q: DEFAULT_Q,
            grid: EstimationGrid::Fourier,
            trend: None,
            gmc: None,
        }
    }

    #[test]
    fn single_replication_has_no_se() {
        let rep = run_experiment(&base(vec![Statistic::Thm2c], 1)).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].se, None);
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"se\":null"));
    }

    #[test]
    fn runs_are_bit_identical() {
        let cfg = base(Statistic::ALL[..11].to_vec(), 6);
        let a = run_experiment(&cfg).unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap());
        assert_eq!(a.rows, b.rows);
        assert!(a.rows.iter().all(|r| r.se.unwrap().is_finite()));
        assert_eq!(a.rows.len(), 10 + 10);
    }

    #[test]
    fn white_noise_thm2a_centred() {
        let cfg = ExperimentConfig {
            lattices: vec![LatticeSpec::new(64, 64).unwrap()],
            ..base(vec![Statistic::Thm2a, Statistic::Thm2c], 50)
        };
        let rep = run_experiment(&cfg).unwrap();
        let a = &rep.rows[0];
        assert!(a.estimate.abs() < 3.0 * a.se.unwrap(), "{} {:?}", a.estimate, a.se);
    }

    #[test]
    fn seed_independence() {
        let mut a = base(vec![Statistic::Thm2c, Statistic::Thm3c], 30);
        let ra = run_experiment(&a).unwrap();
        a.seed = 1001;
        let rb = run_experiment(&a).unwrap();
        for (x, y) in ra.rows.iter().zip(&rb.rows) {
            let se = (x.se.unwrap().powi(2) + y.se.unwrap().powi(2)).sqrt();
            assert!((x.estimate - y.estimate).abs() < 4.0 * se, "{}", x.statistic);
        }
    }

    #[test]
    fn ma_thm2c_near_one() {
        let cfg = ExperimentConfig {
            model: FieldModel::linear_ma(&[([0, 0], 1.0), ([1, 0], 0.5)], InnovationSpec::gaussian(1.0)),
            lattices: vec![LatticeSpec::new(64, 64).unwrap()],
            ..base(vec![Statistic::Thm2c], 50)
        };
        let rep = run_experiment(&cfg).unwrap();
        assert!((rep.rows[0].estimate - 1.0).abs() < 0.05);
    }

    #[test]
    fn thm3c_bounded_for_white_noise() {
        let cfg = ExperimentConfig {
            lattices: vec![LatticeSpec::new(32, 32).unwrap(), LatticeSpec::new(64, 64).unwrap()],
            kernel: Some(KernelConfig {
                family: KernelFamily::Epanechnikov,
                bandwidth: Bandwidth::Fixed(1.0, 1.0),
            }),
            ..base(vec![Statistic::Thm3c], 10)
        };
        let rep = run_experiment(&cfg).unwrap();
        // E I^2 = 2 sigma^4; the sup over N stays within a small multiple
        for row in &rep.rows {
            assert!(row.median < 3.0 * 2.0, "{} {}", row.lattice, row.median);
        }
    }

    #[test]
    fn low_n_flag() {
        let cfg = ExperimentConfig {
            lattices: vec![LatticeSpec::new(3, 3).unwrap()],
            kernel: None,
            ..base(vec![Statistic::Thm2c], 3)
        };
        let rep = run_experiment(&cfg).unwrap();
        assert!(rep.rows[0].low_n);
    }

    #[test]
    fn config_errors() {
        let text = r#"{"model": {"kind": "white_noise", "innovation": {"distribution": "gaussian", "sigma": 1}},
            "lattices": [[16, 16]], "replications": 2, "seed": 1, "statistics": ["thm9"]}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("thm2c") && err.contains("statistics"), "{err}");

        let text = r#"{"model": {"kind": "white_noise", "innovation": {"distribution": "gaussian", "sigma": -1}},
            "lattices": [[16, 16]], "replications": 2, "seed": 1, "statistics": ["thm2c"]}"#;
        let err = ExperimentConfig::from_json(text).unwrap_err().to_string();
        assert!(err.contains("model.innovation.sigma"), "{err}");

        let text = r#"{"model": {"kind": "white_noise", "innovation": {"distribution": "gaussian", "sigma": 1}},
            "lattices": [[16, 16]], "replications": 2, "seed": 1, "statistics": ["thm3b"]}"#;
        assert!(ExperimentConfig::from_json(text).is_err());

        let text = r#"{"model": {"kind": "white_noise", "innovation": {"distribution": "gaussian", "sigma": 1}},
            "lattices": [[4, 64]], "replications": 2, "seed": 1, "statistics": ["thm2c"]}"#;
        assert!(ExperimentConfig::from_json(text).unwrap_err().to_string().contains("aspect"));

        let err = ExperimentConfig::from_json("{\n\"seed\": 1,,\n}").unwrap_err();
        assert!(matches!(err, Error::Json(_)));
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = base(vec![Statistic::Thm5Suite, Statistic::Gmc], 3);
        cfg.trend = Some(TrendConfig::default());
        cfg.gmc = Some(GmcConfig {
            radii: vec![1, 2, 3],
            alpha: 2.0,
        });
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
    }

    #[test]
    fn gmc_rows_present() {
        let mut cfg = base(vec![Statistic::Gmc], 50);
        cfg.kernel = None;
        cfg.lattices = vec![LatticeSpec::new(12, 12).unwrap()];
        cfg.model = FieldModel::geometric_ma(0.5, 3, InnovationSpec::gaussian(1.0));
        cfg.gmc = Some(GmcConfig {
            radii: vec![1, 2, 3],
            alpha: 2.0,
        });
        let rep = run_experiment(&cfg).unwrap();
        let names: Vec<&str> = rep.rows.iter().map(|r| r.statistic.as_str()).collect();
        assert_eq!(names, ["gmc.r1", "gmc.r2", "gmc.r3", "gmc.slope"]);
        assert!(rep.rows[3].estimate < 0.0);
    }
}
