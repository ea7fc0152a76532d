//! Finite-sample transforms: Fourier coefficients, the periodogram and the
//! sample autocovariance.
//!
//! Coefficients follow the 1-based convention
//! `x(j) + i y(j) = |T|^{-1/2} sum_{t in T} V(t) exp(-i lambda_j . t)`,
//! so a standard (0-based) FFT bin is multiplied by
//! `exp(-i (lambda_{j1} + lambda_{j2}))`.

use std::f64::consts::TAU;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::fields::FieldGrid;
use crate::lattice::LatticeSpec;

/// `x(j)`, `y(j)` for every `j in T`, stored row-major like the field.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    spec: LatticeSpec,
    x: Vec<f64>,
    y: Vec<f64>,
}

impl FourierTable {
    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn x_values(&self) -> &[f64] {
        &self.x
    }

    pub fn y_values(&self) -> &[f64] {
        &self.y
    }

    /// `x(j)` at any integer pair, reduced periodically into `T`.
    pub fn x(&self, j1: i64, j2: i64) -> f64 {
        self.x[self.spec.reduced_offset(j1, j2)]
    }

    /// `y(j)` at any integer pair, reduced periodically into `T`.
    pub fn y(&self, j1: i64, j2: i64) -> f64 {
        self.y[self.spec.reduced_offset(j1, j2)]
    }
}

/// Forward 2-D DFT of a row-major `d1 x d2` array (0-based sites), in place.
pub(crate) fn fft2(data: &mut [Complex64], d1: usize, d2: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row, col) = if inverse {
        (planner.plan_fft_inverse(d1), planner.plan_fft_inverse(d2))
    } else {
        (planner.plan_fft_forward(d1), planner.plan_fft_forward(d2))
    };
    row.process(data);
    let mut column = vec![Complex64::new(0.0, 0.0); d2];
    for c in 0..d1 {
        for (r, slot) in column.iter_mut().enumerate() {
            *slot = data[c + r * d1];
        }
        col.process(&mut column);
        for (r, v) in column.iter().enumerate() {
            data[c + r * d1] = *v;
        }
    }
}

/// Fourier coefficients via a mixed-radix 2-D FFT.
///
/// The sample mean is removed before transforming and restored exactly at
/// `j = (d1, d2)`, where `x = sqrt(|T|) * mean` and `y = 0`. The other
/// mean-carrying points of `M` get `y = 0` exactly.
pub fn fourier_coefficients(field: &FieldGrid) -> FourierTable {
    let spec = field.spec();
    let (d1, d2) = spec.dims();
    let n = spec.size();
    let mean = field.mean();
    let mut buf: Vec<Complex64> = field
        .values()
        .iter()
        .map(|&v| Complex64::new(v - mean, 0.0))
        .collect();
    fft2(&mut buf, d1, d2, false);

    let scale = 1.0 / (n as f64).sqrt();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for j in spec.indices() {
        // bin k = j mod d, phase shift for the 1-based site origin
        let bin = buf[(j.j1 % d1) + (j.j2 % d2) * d1];
        let phase = -TAU * (j.j1 as f64 / d1 as f64 + j.j2 as f64 / d2 as f64);
        let z = bin * Complex64::from_polar(1.0, phase) * scale;
        let o = spec.offset(j.j1, j.j2);
        x[o] = z.re;
        y[o] = z.im;
    }
    for m in spec.partition().m_set {
        y[spec.offset(m.j1, m.j2)] = 0.0;
    }
    x[spec.offset(d1, d2)] = (n as f64).sqrt() * mean;
    FourierTable { spec, x, y }
}

/// Direct `O(|T|^2)` evaluation of the coefficient sums; the reference
/// against which [`fourier_coefficients`] is tested.
pub fn dft_naive_oracle(field: &FieldGrid) -> FourierTable {
    let spec = field.spec();
    let (d1, d2) = spec.dims();
    let n = spec.size();
    let scale = 1.0 / (n as f64).sqrt();
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for j in spec.indices() {
        let (mut sx, mut sy) = (0.0, 0.0);
        for t in spec.indices() {
            // exact integer phase reduction before the trig call
            let p1 = (j.j1 * t.j1) % d1;
            let p2 = (j.j2 * t.j2) % d2;
            let angle = TAU * (p1 as f64 / d1 as f64 + p2 as f64 / d2 as f64);
            let v = field.get(t.j1, t.j2);
            sx += v * angle.cos();
            sy -= v * angle.sin();
        }
        let o = spec.offset(j.j1, j.j2);
        x[o] = sx * scale;
        y[o] = sy * scale;
    }
    FourierTable { spec, x, y }
}

/// The periodogram `I(j)`, zero on `D`, with periodic lookups over `Z^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodogramGrid {
    spec: LatticeSpec,
    values: Vec<f64>,
}

impl PeriodogramGrid {
    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    /// Values indexed like the field (row-major over `T`).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `I(j)` at any integer pair.
    pub fn at(&self, j1: i64, j2: i64) -> f64 {
        self.values[self.spec.reduced_offset(j1, j2)]
    }

    /// A periodogram built directly from values on `T`. The entry at
    /// `(d1, d2)` is forced to zero.
    pub fn from_values(spec: LatticeSpec, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.size() {
            return Err(Error::LatticeMismatch(format!(
                "{} periodogram values for a {} lattice",
                values.len(),
                spec
            )));
        }
        values[spec.size() - 1] = 0.0;
        Ok(Self { spec, values })
    }
}

pub fn periodogram(table: &FourierTable) -> PeriodogramGrid {
    let spec = table.spec;
    let mut values: Vec<f64> = table
        .x
        .iter()
        .zip(&table.y)
        .map(|(x, y)| x * x + y * y)
        .collect();
    // D meets T only at (d1, d2)
    values[spec.offset(spec.d1(), spec.d2())] = 0.0;
    PeriodogramGrid { spec, values }
}

/// Convenience: `periodogram(fourier_coefficients(field))`.
pub fn periodogram_of(field: &FieldGrid) -> PeriodogramGrid {
    periodogram(&fourier_coefficients(field))
}

/// Centring used by the sample autocovariance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanMode {
    Known(f64),
    /// Centre at the sample mean.
    Estimated,
}

/// `R(r) = |T|^{-1} sum_{j, j+r in T} (V(j) - mu)(V(j+r) - mu)` for
/// `|r_k| < d_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocovTable {
    spec: LatticeSpec,
    values: Vec<f64>,
}

impl AutocovTable {
    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    fn width(&self) -> usize {
        2 * self.spec.d1() - 1
    }

    pub fn get(&self, r1: i64, r2: i64) -> Result<f64> {
        let (d1, d2) = (self.spec.d1() as i64, self.spec.d2() as i64);
        if r1.abs() >= d1 || r2.abs() >= d2 {
            return Err(Error::LagOutOfRange { r1, r2 });
        }
        Ok(self.values[(r1 + d1 - 1) as usize + (r2 + d2 - 1) as usize * self.width()])
    }

    /// All `(lag, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        let (d1, d2) = (self.spec.d1() as i64, self.spec.d2() as i64);
        let w = self.width();
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (((k % w) as i64 - d1 + 1, (k / w) as i64 - d2 + 1), v))
    }
}

/// Sample autocovariance over all lags, computed by a zero-padded FFT
/// autocorrelation. Divides by `|T|`, never by the overlap count.
pub fn sample_autocovariance(field: &FieldGrid, mean_mode: MeanMode) -> AutocovTable {
    let spec = field.spec();
    let (d1, d2) = spec.dims();
    let mu = match mean_mode {
        MeanMode::Known(m) => m,
        MeanMode::Estimated => field.mean(),
    };
    let (p1, p2) = (2 * d1, 2 * d2);
    let mut buf = vec![Complex64::new(0.0, 0.0); p1 * p2];
    for t in spec.indices() {
        buf[(t.j1 - 1) + (t.j2 - 1) * p1] = Complex64::new(field.get(t.j1, t.j2) - mu, 0.0);
    }
    fft2(&mut buf, p1, p2, false);
    for z in buf.iter_mut() {
        *z = Complex64::new(z.norm_sqr(), 0.0);
    }
    fft2(&mut buf, p1, p2, true);
    // inverse is unnormalized: divide by p1 p2, then by |T|
    let norm = 1.0 / (p1 * p2) as f64 / spec.size() as f64;
    let circ = |r1: i64, r2: i64| {
        let a = r1.rem_euclid(p1 as i64) as usize;
        let b = r2.rem_euclid(p2 as i64) as usize;
        buf[a + b * p1].re * norm
    };
    let w = 2 * d1 - 1;
    let h = 2 * d2 - 1;
    let mut values = vec![0.0; w * h];
    for b in 0..h {
        for a in 0..w {
            let r1 = a as i64 - d1 as i64 + 1;
            let r2 = b as i64 - d2 as i64 + 1;
            values[a + b * w] = 0.5 * (circ(r1, r2) + circ(-r1, -r2));
        }
    }
    AutocovTable { spec, values }
}

/// Direct double loop over site pairs; the reference for
/// [`sample_autocovariance`].
pub fn autocovariance_brute_force(field: &FieldGrid, mean_mode: MeanMode) -> AutocovTable {
    let spec = field.spec();
    let (d1, d2) = (spec.d1() as i64, spec.d2() as i64);
    let mu = match mean_mode {
        MeanMode::Known(m) => m,
        MeanMode::Estimated => field.mean(),
    };
    let mut values = Vec::with_capacity(((2 * d1 - 1) * (2 * d2 - 1)) as usize);
    for r2 in 1 - d2..d2 {
        for r1 in 1 - d1..d1 {
            let mut acc = 0.0;
            for j in spec.indices() {
                let (a, b) = (j.j1 as i64 + r1, j.j2 as i64 + r2);
                if (1..=d1).contains(&a) && (1..=d2).contains(&b) {
                    acc += (field.get(j.j1, j.j2) - mu) * (field.get(a as usize, b as usize) - mu);
                }
            }
            values.push(acc / spec.size() as f64);
        }
    }
    AutocovTable { spec, values }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn spec(d1: usize, d2: usize) -> LatticeSpec {
        LatticeSpec::new(d1, d2).unwrap()
    }

    fn random_field(s: LatticeSpec, seed: u64) -> FieldGrid {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        FieldGrid::from_fn(s, |_, _| rng.random_range(-2.0..3.0)).unwrap()
    }

    fn max_rel_err(a: &FourierTable, b: &FourierTable) -> f64 {
        let scale = b.x.iter().chain(&b.y).fold(0.0f64, |m, v| m.max(v.abs()));
        a.x.iter()
            .chain(&a.y)
            .zip(b.x.iter().chain(&b.y))
            .map(|(p, q)| (p - q).abs() / scale)
            .fold(0.0, f64::max)
    }

    #[test]
    fn fft_matches_naive_oracle() {
        for (k, dims) in [(7, 7), (7, 8), (8, 7), (8, 8), (2, 3), (17, 5)].iter().enumerate() {
            let f = random_field(spec(dims.0, dims.1), k as u64);
            let err = max_rel_err(&fourier_coefficients(&f), &dft_naive_oracle(&f));
            assert!(err < 1e-12, "{dims:?}: {err}");
        }
    }

    #[test]
    fn constant_field_vanishes_off_m() {
        let s = spec(7, 7);
        let f = FieldGrid::constant(s, 5.0);
        let t = fourier_coefficients(&f);
        let p = s.partition();
        for j in p.n_set.iter().chain(&p.n_tilde_set) {
            assert_eq!(t.x(j.j1 as i64, j.j2 as i64), 0.0);
            assert_eq!(t.y(j.j1 as i64, j.j2 as i64), 0.0);
        }
        assert!((t.x(7, 7) - 7.0 * 5.0).abs() < 1e-12);
        let naive = dft_naive_oracle(&f);
        for j in &p.n_set {
            assert!(naive.x(j.j1 as i64, j.j2 as i64).abs() < 1e-12);
        }
        assert!(periodogram(&t).values().iter().all(|&v| v == 0.0));
    }

    /// Oracle: a single cosine at k puts sqrt(|T|)/2 at k and its mirror.
    #[test]
    fn single_cosine_spike() {
        let s = spec(7, 7);
        let (l1, l2) = s.frequency(2, 3);
        let f = FieldGrid::from_fn(s, |t1, t2| (l1 * t1 as f64 + l2 * t2 as f64).cos()).unwrap();
        let t = fourier_coefficients(&f);
        let half = 7.0 / 2.0;
        assert!((t.x(2, 3) - half).abs() < 1e-12);
        assert!(t.y(2, 3).abs() < 1e-12);
        let mirror = s.reflect(crate::lattice::FreqIndex::new(2, 3));
        for j in s.partition().n_set {
            if j != crate::lattice::FreqIndex::new(2, 3) && j != mirror {
                assert!(t.x(j.j1 as i64, j.j2 as i64).abs() < 1e-12);
            }
        }
        let naive = dft_naive_oracle(&f);
        assert!((naive.x(2, 3) - half).abs() < 1e-12);
    }

    #[test]
    fn grand_mean_bin() {
        let f = random_field(spec(6, 5), 3);
        let t = fourier_coefficients(&f);
        assert!((t.x(6, 5) - 30f64.sqrt() * f.mean()).abs() < 1e-12);
        assert_eq!(t.y(6, 5), 0.0);
    }

    #[test]
    fn parseval_with_zeroed_d() {
        let f = random_field(spec(5, 5), 8);
        let ip = periodogram_of(&f);
        let total: f64 = ip.values().iter().sum();
        let m = f.mean();
        let ss: f64 = f.values().iter().map(|v| (v - m) * (v - m)).sum();
        assert!((total - ss).abs() < 1e-10 * ss);
    }

    #[test]
    fn periodic_lookup() {
        let s = spec(7, 6);
        let ip = periodogram_of(&random_field(s, 1));
        assert_eq!(ip.at(7 + 2, 3), ip.at(2, 3));
        assert_eq!(ip.at(-5, 3 - 12), ip.at(2, 3));
        assert_eq!(ip.at(0, 0), 0.0);
        assert_eq!(ip.at(14, -6), 0.0);
    }

    #[test]
    fn autocovariance_impulse_and_constant() {
        let s = spec(4, 4);
        let imp = FieldGrid::from_fn(s, |t1, t2| if (t1, t2) == (1, 1) { 1.0 } else { 0.0 }).unwrap();
        let r = sample_autocovariance(&imp, MeanMode::Known(0.0));
        for ((r1, r2), v) in r.iter() {
            let want = if (r1, r2) == (0, 0) { 1.0 / 16.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-15, "({r1},{r2}) {v}");
        }
        let c = sample_autocovariance(&FieldGrid::constant(s, 3.0), MeanMode::Estimated);
        assert!(c.iter().all(|(_, v)| v.abs() < 1e-15));
        assert!(matches!(r.get(4, 0), Err(Error::LagOutOfRange { .. })));
    }

    #[test]
    fn autocovariance_matches_brute_force() {
        let s = spec(6, 6);
        let f = random_field(s, 77);
        for mode in [MeanMode::Known(0.25), MeanMode::Estimated] {
            let table = sample_autocovariance(&f, mode);
            let oracle = autocovariance_brute_force(&f, mode);
            for ((r, a), (r_o, b)) in table.iter().zip(oracle.iter()) {
                assert_eq!(r, r_o);
                assert!((a - b).abs() < 1e-12, "{r:?}: {a} vs {b}");
                assert_eq!(a, table.get(-r.0, -r.1).unwrap());
            }
        }
    }
}
