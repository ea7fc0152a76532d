use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{FieldGrid, FieldModel};
use crate::kernels::{KernelSpec, FOUR_PI_SQ};
use crate::lattice::LatticeSpec;
use crate::spectra::{fft2, sample_autocovariance, MeanMode, PeriodogramGrid};

/// Lag-window terms with `|k| < LAG_CUTOFF` are dropped.
pub const LAG_CUTOFF: f64 = 1e-14;

/// Indices `j` with `|mu - 2 pi j / d| <= reach`, paired with their kernel
/// profile values.
fn axis_terms(kernel: &KernelSpec, mu: f64, h: f64, d: usize) -> Vec<(i64, f64)> {
    let reach = kernel.family.support_radius() * h;
    let scale = d as f64 / TAU;
    let lo = ((mu - reach) * scale).ceil() as i64;
    let hi = ((mu + reach) * scale).floor() as i64;
    (lo..=hi)
        .map(|j| (j, kernel.family.profile((mu - TAU * j as f64 / d as f64) / h)))
        .filter(|&(_, w)| w > 0.0)
        .collect()
}

/// `f_hat(lambda) = (1 / 4 pi^2) sum_j K((lambda - lambda_j) / h) I(j) / sum_j K((lambda - lambda_j) / h)`,
/// evaluated term by term with periodic periodogram lookups.
pub fn kernel_density_estimate(pg: &PeriodogramGrid, kernel: &KernelSpec, lambda: (f64, f64)) -> Result<f64> {
    let spec = pg.spec();
    kernel.check_feasible(spec)?;
    let a1 = axis_terms(kernel, lambda.0, kernel.h1, spec.d1());
    let a2 = axis_terms(kernel, lambda.1, kernel.h2, spec.d2());
    let mut num = 0.0;
    let mut den = 0.0;
    for &(j2, w2) in &a2 {
        for &(j1, w1) in &a1 {
            let w = w1 * w2;
            num += w * pg.at(j1, j2);
            den += w;
        }
    }
    Ok(num / den / FOUR_PI_SQ)
}

/// Real and imaginary parts of the lag-window sum.
pub(crate) fn lag_window_complex(field: &FieldGrid, kernel: &KernelSpec, lambda: (f64, f64)) -> Result<(f64, f64)> {
    let spec = field.spec();
    kernel.check_feasible(spec)?;
    let r = sample_autocovariance(field, MeanMode::Estimated);
    let (mut re, mut im) = (0.0, 0.0);
    for ((r1, r2), v) in r.iter() {
        let k = kernel.inverse_transform((r1 as f64 * kernel.h1, r2 as f64 * kernel.h2));
        if k.abs() < LAG_CUTOFF {
            continue;
        }
        let phase = r1 as f64 * lambda.0 + r2 as f64 * lambda.1;
        re += v * k * phase.cos();
        im -= v * k * phase.sin();
    }
    Ok((re / FOUR_PI_SQ, im / FOUR_PI_SQ))
}

/// `f_tilde(lambda) = (1 / 4 pi^2) sum_r R(r) k(r1 h1, r2 h2) exp(-i r . lambda)`
/// with the sample autocovariance centred at the sample mean.
pub fn lag_window_estimate(field: &FieldGrid, kernel: &KernelSpec, lambda: (f64, f64)) -> Result<f64> {
    lag_window_complex(field, kernel, lambda).map(|(re, _)| re)
}

/// Frequencies at which an estimate is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationGrid {
    /// `lambda_j` for `j in T`.
    Fourier,
    /// `(2 pi a / m, 2 pi b / m)` for `0 <= a, b < m`.
    Uniform(usize),
    /// The Fourier grid followed by `Uniform(m)`.
    FourierAndUniform(usize),
}

impl EstimationGrid {
    /// The default for sup-norm statistics.
    pub const DEFAULT_SUP: EstimationGrid = EstimationGrid::FourierAndUniform(64);

    pub fn points(&self, spec: LatticeSpec) -> Vec<(f64, f64)> {
        let fourier = || spec.indices().map(|j| spec.frequency_of(j)).collect::<Vec<_>>();
        let uniform = |m: usize| {
            let mut out = Vec::with_capacity(m * m);
            for b in 0..m {
                for a in 0..m {
                    out.push((TAU * a as f64 / m as f64, TAU * b as f64 / m as f64));
                }
            }
            out
        };
        match *self {
            EstimationGrid::Fourier => fourier(),
            EstimationGrid::Uniform(m) => uniform(m),
            EstimationGrid::FourierAndUniform(m) => {
                let mut out = fourier();
                out.extend(uniform(m));
                out
            }
        }
    }

    /// Axis coordinates of the product blocks making up the grid.
    fn blocks(&self, spec: LatticeSpec) -> Vec<(Vec<f64>, Vec<f64>)> {
        let fourier = || {
            let ax = |d: usize| (1..=d).map(|j| TAU * j as f64 / d as f64).collect::<Vec<_>>();
            (ax(spec.d1()), ax(spec.d2()))
        };
        let uniform = |m: usize| {
            let ax = (0..m).map(|a| TAU * a as f64 / m as f64).collect::<Vec<_>>();
            (ax.clone(), ax)
        };
        match *self {
            EstimationGrid::Fourier => vec![fourier()],
            EstimationGrid::Uniform(m) => vec![uniform(m)],
            EstimationGrid::FourierAndUniform(m) => vec![fourier(), uniform(m)],
        }
    }
}

impl FromStr for EstimationGrid {
    type Err = Error;

    /// `fourier`, `uniform:<m>` or `fourier+uniform:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad grid `{s}` (expected fourier | uniform:<m> | fourier+uniform:<m>)"));
        let s = s.trim();
        let size = |m: &str| match m.trim().parse::<usize>() {
            Ok(m) if m >= 1 => Ok(m),
            _ => Err(bad()),
        };
        if s == "fourier" {
            Ok(EstimationGrid::Fourier)
        } else if let Some(m) = s.strip_prefix("fourier+uniform:") {
            Ok(EstimationGrid::FourierAndUniform(size(m)?))
        } else if let Some(m) = s.strip_prefix("uniform:") {
            Ok(EstimationGrid::Uniform(size(m)?))
        } else {
            Err(bad())
        }
    }
}

impl fmt::Display for EstimationGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimationGrid::Fourier => write!(f, "fourier"),
            EstimationGrid::Uniform(m) => write!(f, "uniform:{m}"),
            EstimationGrid::FourierAndUniform(m) => write!(f, "fourier+uniform:{m}"),
        }
    }
}

impl Serialize for EstimationGrid {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(ser)
    }
}

impl<'de> Deserialize<'de> for EstimationGrid {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(de)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorForm {
    /// Normalized kernel average of periodogram ordinates.
    Kernel,
    /// Kernel-transform weighted sum of sample autocovariances.
    LagWindow,
}

/// An estimate evaluated on a grid, optionally with the true spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEstimate {
    pub spec: LatticeSpec,
    pub kernel: KernelSpec,
    pub grid: EstimationGrid,
    pub form: EstimatorForm,
    pub points: Vec<(f64, f64)>,
    pub values: Vec<f64>,
    pub truth: Option<Vec<f64>>,
}

impl SpectralEstimate {
    /// Attaches `f(lambda)` at every grid point.
    pub fn with_truth(mut self, model: &FieldModel) -> Result<Self> {
        let truth = self
            .points
            .iter()
            .map(|&l| model.theoretical_spectrum(l))
            .collect::<Result<Vec<_>>>()?;
        self.truth = Some(truth);
        Ok(self)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// `max |f_hat - f|` over the grid, if the truth is attached.
    pub fn sup_abs_error(&self) -> Option<f64> {
        self.truth.as_ref().map(|t| {
            t.iter()
                .zip(&self.values)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
    }
}

/// Folded per-axis weights: row `a` holds the normalized weights of the
/// Fourier indices `1..=d` contributing at `mu[a]`.
fn folded_axis(kernel: &KernelSpec, mu: &[f64], h: f64, d: usize) -> Vec<f64> {
    let mut w = vec![0.0; mu.len() * d];
    for (a, &m) in mu.iter().enumerate() {
        let terms = axis_terms(kernel, m, h, d);
        let total: f64 = terms.iter().map(|t| t.1).sum();
        for (j, v) in terms {
            let col = (j - 1).rem_euclid(d as i64) as usize;
            w[a * d + col] += v / total;
        }
    }
    w
}

/// Kernel estimate on a product block as `W1 I W2^T / 4 pi^2`.
fn kernel_block(pg: &PeriodogramGrid, kernel: &KernelSpec, mu1: &[f64], mu2: &[f64]) -> Vec<f64> {
    let (d1, d2) = pg.spec().dims();
    let w1 = folded_axis(kernel, mu1, kernel.h1, d1);
    let w2 = folded_axis(kernel, mu2, kernel.h2, d2);
    let i = pg.values();
    let (m1, m2) = (mu1.len(), mu2.len());
    let mut tmp = vec![0.0; m1 * d2];
    for c2 in 0..d2 {
        for a in 0..m1 {
            let row = &w1[a * d1..(a + 1) * d1];
            tmp[a + c2 * m1] = row.iter().zip(&i[c2 * d1..(c2 + 1) * d1]).map(|(w, v)| w * v).sum();
        }
    }
    let mut out = vec![0.0; m1 * m2];
    for b in 0..m2 {
        let row = &w2[b * d2..(b + 1) * d2];
        for a in 0..m1 {
            let mut acc = 0.0;
            for (c2, w) in row.iter().enumerate() {
                acc += w * tmp[a + c2 * m1];
            }
            out[a + b * m1] = acc / FOUR_PI_SQ;
        }
    }
    out
}

/// Evaluates the kernel estimate on a grid through its separable structure.
pub fn estimate_on_grid(pg: &PeriodogramGrid, kernel: &KernelSpec, grid: EstimationGrid) -> Result<SpectralEstimate> {
    let spec = pg.spec();
    kernel.check_feasible(spec)?;
    let mut values = Vec::new();
    for (mu1, mu2) in grid.blocks(spec) {
        values.extend(kernel_block(pg, kernel, &mu1, &mu2));
    }
    Ok(SpectralEstimate {
        spec,
        kernel: *kernel,
        grid,
        form: EstimatorForm::Kernel,
        points: grid.points(spec),
        values,
        truth: None,
    })
}

/// Lag-window estimate at every Fourier frequency, by folding the weighted
/// autocovariances onto the lattice and transforming once.
fn lag_window_fourier(field: &FieldGrid, kernel: &KernelSpec) -> Vec<f64> {
    let spec = field.spec();
    let (d1, d2) = spec.dims();
    let r = sample_autocovariance(field, MeanMode::Estimated);
    let mut buf = vec![Complex64::new(0.0, 0.0); d1 * d2];
    for ((r1, r2), v) in r.iter() {
        let k = kernel.inverse_transform((r1 as f64 * kernel.h1, r2 as f64 * kernel.h2));
        if k.abs() < LAG_CUTOFF {
            continue;
        }
        let a = r1.rem_euclid(d1 as i64) as usize;
        let b = r2.rem_euclid(d2 as i64) as usize;
        buf[a + b * d1].re += v * k;
    }
    fft2(&mut buf, d1, d2, false);
    spec.indices()
        .map(|j| buf[(j.j1 % d1) + (j.j2 % d2) * d1].re / FOUR_PI_SQ)
        .collect()
}

/// Evaluates the lag-window estimate on a grid (FFT on the Fourier block,
/// direct sums elsewhere).
pub fn lag_window_on_grid(field: &FieldGrid, kernel: &KernelSpec, grid: EstimationGrid) -> Result<SpectralEstimate> {
    let spec = field.spec();
    kernel.check_feasible(spec)?;
    let mut values = lag_window_fourier(field, kernel);
    match grid {
        EstimationGrid::Fourier => {}
        EstimationGrid::Uniform(_) | EstimationGrid::FourierAndUniform(_) => {
            if matches!(grid, EstimationGrid::Uniform(_)) {
                values.clear();
            }
            let m = match grid {
                EstimationGrid::Uniform(m) | EstimationGrid::FourierAndUniform(m) => m,
                EstimationGrid::Fourier => unreachable!(),
            };
            for l in EstimationGrid::Uniform(m).points(spec) {
                values.push(lag_window_estimate(field, kernel, l)?);
            }
        }
    }
    Ok(SpectralEstimate {
        spec,
        kernel: *kernel,
        grid,
        form: EstimatorForm::LagWindow,
        points: grid.points(spec),
        values,
        truth: None,
    })
}
