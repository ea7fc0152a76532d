use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::estimators::SpectralEstimate;
use crate::fields::FieldModel;
use crate::kernels::{WeightTable, FOUR_PI_SQ};
use crate::lattice::{FreqIndex, LatticeSpec};
use crate::spectra::{FourierTable, PeriodogramGrid};

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

/// `f(lambda_j)` at every `j in T`, in lattice order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSpectrum {
    spec: LatticeSpec,
    values: Vec<f64>,
}

impl ReferenceSpectrum {
    pub fn from_model(model: &FieldModel, spec: LatticeSpec) -> Result<Self> {
        let values = spec
            .indices()
            .map(|j| model.theoretical_spectrum(spec.frequency_of(j)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { spec, values })
    }

    pub fn from_fn(spec: LatticeSpec, f: impl Fn((f64, f64)) -> f64) -> Self {
        let values = spec.indices().map(|j| f(spec.frequency_of(j))).collect();
        Self { spec, values }
    }

    pub fn constant(spec: LatticeSpec, value: f64) -> Self {
        Self {
            spec,
            values: vec![value; spec.size()],
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn at(&self, j: FreqIndex) -> f64 {
        self.values[self.spec.offset(j.j1, j.j2)]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

fn check(spec: LatticeSpec, f: &ReferenceSpectrum) -> Result<Vec<FreqIndex>> {
    if f.spec() != spec {
        return Err(Error::LatticeMismatch(format!("data {spec}, spectrum {}", f.spec())));
    }
    let n = spec.partition().n_set;
    if let Some(j) = n.iter().find(|j| f.at(**j).is_nan() || f.at(**j) <= 0.0) {
        return Err(Error::Config(format!(
            "reference spectrum must be positive, got {} at ({}, {})",
            f.at(*j),
            j.j1,
            j.j2
        )));
    }
    Ok(n)
}

fn mean_over<F: Fn(FreqIndex) -> f64>(n: &[FreqIndex], g: F) -> f64 {
    if n.is_empty() {
        return 0.0;
    }
    n.iter().map(|&j| g(j)).sum::<f64>() / n.len() as f64
}

/// `(1 / 2|N|) sum_N (x(j) + y(j)) / sqrt f(lambda_j)`; tends to 0.
pub fn stat_thm2a(table: &FourierTable, f: &ReferenceSpectrum) -> Result<f64> {
    let spec = table.spec();
    let n = check(spec, f)?;
    Ok(0.5
        * mean_over(&n, |j| {
            let (a, b) = (j.j1 as i64, j.j2 as i64);
            (table.x(a, b) + table.y(a, b)) / f.at(j).sqrt()
        }))
}

/// `(1 / 4 pi^2 |N|) sum_N I(j) / f(lambda_j)`; tends to 1.
pub fn stat_thm2c(pg: &PeriodogramGrid, f: &ReferenceSpectrum) -> Result<f64> {
    let n = check(pg.spec(), f)?;
    Ok(mean_over(&n, |j| pg.at(j.j1 as i64, j.j2 as i64) / f.at(j)) / FOUR_PI_SQ)
}

/// `(1/|N|) sum_N I^2 / f^2`, divided by its limit `2 (4 pi^2)^2`.
pub fn stat_thm2d(pg: &PeriodogramGrid, f: &ReferenceSpectrum) -> Result<f64> {
    let n = check(pg.spec(), f)?;
    let raw = mean_over(&n, |j| (pg.at(j.j1 as i64, j.j2 as i64) / f.at(j)).powi(2));
    Ok(raw / (2.0 * FOUR_PI_SQ * FOUR_PI_SQ))
}

/// `(1/|N|) sum_N I^q / f^q`.
pub fn stat_thm2e(pg: &PeriodogramGrid, f: &ReferenceSpectrum, q: f64) -> Result<f64> {
    let n = check(pg.spec(), f)?;
    Ok(mean_over(&n, |j| (pg.at(j.j1 as i64, j.j2 as i64) / f.at(j)).powf(q)))
}

/// `E (4 pi^2 f E)^q = (4 pi^2 f)^q Gamma(q + 1)` for a standard exponential
/// `E`: the limit scale of [`stat_thm2e`] when `f` is exact.
pub fn exponential_moment(q: f64) -> f64 {
    FOUR_PI_SQ.powf(q) * statrs::function::gamma::gamma(q + 1.0)
}

/// Weighted Kolmogorov-Smirnov distance between the normalized coefficients
/// `x(j), y(j) / sqrt(2 pi^2 f)`, `j in N`, and the standard normal law.
///
/// `weights` follow the order of `LatticeSpec::partition().n_set` and must
/// sum to one. The supremum is attained at a jump of the empirical CDF, so
/// it is evaluated exactly there (both one-sided limits).
pub fn stat_coro1_ks(table: &FourierTable, f: &ReferenceSpectrum, weights: &[f64]) -> Result<f64> {
    let spec = table.spec();
    let n = check(spec, f)?;
    if weights.len() != n.len() {
        return Err(Error::Config(format!(
            "{} weights supplied but |N| = {} on a {spec} lattice",
            weights.len(),
            n.len()
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("weights sum to {total}, not 1")));
    }
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(2 * n.len());
    for (j, &w) in n.iter().zip(weights) {
        let scale = (2.0 * PI * PI * f.at(*j)).sqrt();
        let (a, b) = (j.j1 as i64, j.j2 as i64);
        atoms.push((table.x(a, b) / scale, 0.5 * w));
        atoms.push((table.y(a, b) / scale, 0.5 * w));
    }
    Ok(weighted_ks(&mut atoms))
}

/// `sup_z |F_w(z) - Phi(z)|` for the weighted empirical CDF of `atoms`.
pub fn weighted_ks(atoms: &mut [(f64, f64)]) -> f64 {
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut cdf = 0.0;
    let mut best: f64 = 0.0;
    let mut k = 0;
    while k < atoms.len() {
        let z = atoms[k].0;
        let phi = normal_cdf(z);
        best = best.max((cdf - phi).abs());
        while k < atoms.len() && atoms[k].0 == z {
            cdf += atoms[k].1;
            k += 1;
        }
        best = best.max((cdf - phi).abs());
    }
    best
}

/// Items of the weighted-average statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightedItem {
    /// `sup_N |sum_s p_s (x + y)(j + s)|`
    A,
    /// `sup_N |sum_s p_s I(j + s) - 4 pi^2 f(lambda_j)|`
    B,
    /// `sup_N sum_s p_s I^2(j + s)`
    C,
    /// `sup_N sum_s p_s I^q(j + s)`
    D,
}

/// `x(j) + y(j)` on `T`, with the mean-carrying ordinate at `(d1, d2)`
/// set to zero like the periodogram on `D`.
pub fn coefficient_sums(table: &FourierTable) -> Vec<f64> {
    let spec = table.spec();
    let mut g: Vec<f64> = table.x_values().iter().zip(table.y_values()).map(|(x, y)| x + y).collect();
    g[spec.size() - 1] = 0.0;
    g
}

/// Suprema over `N` of local weighted averages of coefficients or
/// periodogram ordinates.
pub fn stat_thm3(
    which: WeightedItem,
    table: &FourierTable,
    pg: &PeriodogramGrid,
    weights: &WeightTable,
    f: &ReferenceSpectrum,
    q: f64,
) -> Result<f64> {
    let spec = table.spec();
    if weights.spec() != spec || pg.spec() != spec {
        return Err(Error::LatticeMismatch(format!(
            "coefficients {spec}, periodogram {}, weights {}",
            pg.spec(),
            weights.spec()
        )));
    }
    let n = check(spec, f)?;
    let g: Vec<f64> = match which {
        WeightedItem::A => coefficient_sums(table),
        WeightedItem::B => pg.values().to_vec(),
        WeightedItem::C => pg.values().iter().map(|v| v * v).collect(),
        WeightedItem::D => pg.values().iter().map(|v| v.powf(q)).collect(),
    };
    let smoothed = weights.smooth_periodic(&g);
    Ok(n.iter()
        .map(|j| {
            let v = smoothed[spec.offset(j.j1, j.j2)];
            match which {
                WeightedItem::B => (v - FOUR_PI_SQ * f.at(*j)).abs(),
                _ => v.abs(),
            }
        })
        .fold(0.0, f64::max))
}

/// `max |f_hat - f|` over the estimate's grid.
pub fn stat_thm4_sup(estimate: &SpectralEstimate) -> Result<f64> {
    estimate
        .sup_abs_error()
        .ok_or_else(|| Error::Config("the estimate carries no reference spectrum".into()))
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    use super::*;
    use crate::fields::{simulate, FieldGrid, InnovationSpec};
    use crate::kernels::{build_weights, KernelFamily, KernelSpec};
    use crate::spectra::{fourier_coefficients, periodogram};

    /// Phi by its Maclaurin series, summed in high precision terms.
    fn phi_series(z: f64) -> f64 {
        let mut term = z;
        let mut sum = z;
        let mut k = 0.0;
        while term.abs() > 1e-18 {
            k += 1.0;
            term *= -z * z / (2.0 * k);
            sum += term / (2.0 * k + 1.0);
        }
        0.5 + sum / (2.0 * PI).sqrt()
    }

    #[test]
    fn normal_cdf_values() {
        assert_eq!(normal_cdf(0.0), 0.5);
        assert!((normal_cdf(1.959964) - 0.975).abs() < 1e-6);
        for k in -40..=40 {
            let z = k as f64 / 10.0;
            assert!((normal_cdf(z) - phi_series(z)).abs() < 1e-7, "{z}");
        }
        let mut prev = 0.0;
        for k in 0..10_000 {
            let z = -8.0 + 16.0 * k as f64 / 10_000.0;
            let p = normal_cdf(z);
            assert!((p + normal_cdf(-z) - 1.0).abs() < 1e-12);
            assert!(p >= prev);
            prev = p;
        }
    }

    fn white(spec: LatticeSpec, seed: u64) -> FieldGrid {
        simulate(&FieldModel::white_noise(InnovationSpec::gaussian(1.0)), spec, seed).unwrap()
    }

    fn flat(spec: LatticeSpec) -> ReferenceSpectrum {
        ReferenceSpectrum::constant(spec, 1.0 / FOUR_PI_SQ)
    }

    #[test]
    fn constant_field_statistics_vanish() {
        let s = LatticeSpec::new(12, 12).unwrap();
        let v = FieldGrid::constant(s, 4.0);
        let t = fourier_coefficients(&v);
        let pg = periodogram(&t);
        let f = flat(s);
        assert_eq!(stat_thm2a(&t, &f).unwrap(), 0.0);
        assert_eq!(stat_thm2c(&pg, &f).unwrap(), 0.0);
        assert_eq!(stat_thm2d(&pg, &f).unwrap(), 0.0);
        assert_eq!(stat_thm2e(&pg, &f, 4.5).unwrap(), 0.0);
        let w = build_weights(s, &KernelSpec::new(KernelFamily::Epanechnikov, 0.5, 0.5).unwrap()).unwrap();
        assert!((stat_thm3(WeightedItem::B, &t, &pg, &w, &f, 4.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thm2a_is_odd() {
        let s = LatticeSpec::new(10, 9).unwrap();
        let v = white(s, 1);
        let f = flat(s);
        let a = stat_thm2a(&fourier_coefficients(&v), &f).unwrap();
        let b = stat_thm2a(&fourier_coefficients(&v.map(|x| -x)), &f).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn thm2e_with_q_one() {
        let s = LatticeSpec::new(16, 16).unwrap();
        let pg = periodogram(&fourier_coefficients(&white(s, 2)));
        let f = flat(s);
        let e = stat_thm2e(&pg, &f, 1.0).unwrap();
        let c = stat_thm2c(&pg, &f).unwrap();
        assert!((e - FOUR_PI_SQ * c).abs() < 1e-12 * e);
    }

    /// Synthetic standard-normal coefficients: the weighted distance becomes
    /// the classical one-sample KS statistic, whose mean is close to
    /// 0.8687 / sqrt(n) for moderate n.
    #[test]
    fn ks_reduces_to_classical_statistic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let reps = 400;
        let mut total = 0.0;
        for _ in 0..reps {
            let mut atoms: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.sample::<f64, _>(StandardNormal), 1.0 / n as f64)).collect();
            // classical D_n computed independently from the sorted sample
            let mut xs: Vec<f64> = atoms.iter().map(|a| a.0).collect();
            xs.sort_by(f64::total_cmp);
            let classical = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let p = normal_cdf(x);
                    ((i + 1) as f64 / n as f64 - p).max(p - i as f64 / n as f64)
                })
                .fold(0.0, f64::max);
            let ks = weighted_ks(&mut atoms);
            assert!((ks - classical).abs() < 1e-12);
            total += ks;
        }
        let mean = total / reps as f64 * (n as f64).sqrt();
        assert!((mean - 0.8687).abs() < 0.05, "{mean}");
    }

    #[test]
    fn ks_single_atom_weights() {
        let s = LatticeSpec::new(16, 16).unwrap();
        let t = fourier_coefficients(&white(s, 4));
        let n = s.partition().n_set.len();
        let mut w = vec![0.0; n];
        w[3] = 1.0;
        let ks = stat_coro1_ks(&t, &flat(s), &w).unwrap();
        // two atoms of mass 1/2 cannot track Phi closer than 1/4
        assert!(ks >= 0.25);
        assert!(stat_coro1_ks(&t, &flat(s), &w[1..]).is_err());
    }

    #[test]
    fn ks_scale_invariance() {
        let s = LatticeSpec::new(20, 20).unwrap();
        let v = white(s, 5);
        let n = s.partition().n_set.len();
        let w = vec![1.0 / n as f64; n];
        let base = stat_coro1_ks(&fourier_coefficients(&v), &flat(s), &w).unwrap();
        let scaled = stat_coro1_ks(&fourier_coefficients(&v.map(|x| 4.0 * x)), &flat(s).scaled(16.0), &w).unwrap();
        assert_eq!(base, scaled);
    }

    #[test]
    fn statistics_invariant_under_mean_shift() {
        let s = LatticeSpec::new(14, 11).unwrap();
        let v = white(s, 6);
        let u = v.map(|x| x + 3.0);
        let f = flat(s);
        let w = build_weights(s, &KernelSpec::new(KernelFamily::Gaussian, 0.6, 0.6).unwrap()).unwrap();
        let (ta, tb) = (fourier_coefficients(&v), fourier_coefficients(&u));
        let (pa, pb) = (periodogram(&ta), periodogram(&tb));
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        assert!(close(stat_thm2a(&ta, &f).unwrap(), stat_thm2a(&tb, &f).unwrap()));
        assert!(close(stat_thm2c(&pa, &f).unwrap(), stat_thm2c(&pb, &f).unwrap()));
        assert!(close(stat_thm2e(&pa, &f, 4.5).unwrap(), stat_thm2e(&pb, &f, 4.5).unwrap()));
        for item in [WeightedItem::A, WeightedItem::B, WeightedItem::C, WeightedItem::D] {
            let a = stat_thm3(item, &ta, &pa, &w, &f, 4.5).unwrap();
            let b = stat_thm3(item, &tb, &pb, &w, &f, 4.5).unwrap();
            assert!(close(a, b), "{item:?}");
        }
    }

    #[test]
    fn thm3_direct_sum_oracle() {
        let s = LatticeSpec::new(11, 13).unwrap();
        let t = fourier_coefficients(&white(s, 7));
        let pg = periodogram(&t);
        let f = flat(s);
        let w = build_weights(s, &KernelSpec::new(KernelFamily::Epanechnikov, 1.1, 0.9).unwrap()).unwrap();
        let direct = s
            .partition()
            .n_set
            .iter()
            .map(|j| {
                let avg: f64 = w
                    .iter()
                    .map(|((a, b), p)| p * pg.at(j.j1 as i64 + a, j.j2 as i64 + b).powi(2))
                    .sum();
                avg
            })
            .fold(0.0, f64::max);
        let fast = stat_thm3(WeightedItem::C, &t, &pg, &w, &f, 4.5).unwrap();
        assert!((direct - fast).abs() < 1e-12 * direct);
    }

    #[test]
    fn slope_of_geometric_sequence() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|r| 3.0 * 0.5f64.powf(*r)).collect();
        assert!((log_slope(&x, &y) - 0.5f64.ln()).abs() < 1e-12);
    }
}
