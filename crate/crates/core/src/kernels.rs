//! Smoothing kernels for spectral estimation.
//!
//! All shipped families are products of a one-dimensional profile,
//! `K(t1, t2) = k1(t1) k1(t2)`, and the library exploits that throughout:
//! wrapped kernels, weights and grid estimates are computed axis by axis.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

/// Gaussian sums are truncated at this many standard deviations.
pub const GAUSSIAN_TRUNCATION: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    /// `(1/4) 1{|t1| <= 1} 1{|t2| <= 1}`
    Uniform,
    /// `(9/16) (1 - t1^2)(1 - t2^2)` on `[-1, 1]^2`
    Epanechnikov,
    /// `(1 / 2 pi) exp(-(t1^2 + t2^2) / 2)`
    Gaussian,
}

impl KernelFamily {
    pub const ALL: [KernelFamily; 3] = [KernelFamily::Uniform, KernelFamily::Epanechnikov, KernelFamily::Gaussian];

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Uniform => "uniform",
            KernelFamily::Epanechnikov => "epanechnikov",
            KernelFamily::Gaussian => "gaussian",
        }
    }

    /// One-dimensional factor of the product kernel.
    pub fn profile(&self, t: f64) -> f64 {
        match self {
            KernelFamily::Uniform => {
                if t.abs() <= 1.0 {
                    0.5
                } else {
                    0.0
                }
            }
            KernelFamily::Epanechnikov => {
                if t.abs() <= 1.0 {
                    0.75 * (1.0 - t * t)
                } else {
                    0.0
                }
            }
            KernelFamily::Gaussian => (-0.5 * t * t).exp() / TAU.sqrt(),
        }
    }

    /// One-dimensional factor of the inverse Fourier transform
    /// `int k1(t) exp(i x t) dt`.
    pub fn profile_transform(&self, x: f64) -> f64 {
        match self {
            KernelFamily::Uniform => {
                if x.abs() < 1e-4 {
                    1.0 - x * x / 6.0
                } else {
                    x.sin() / x
                }
            }
            KernelFamily::Epanechnikov => {
                if x.abs() < 1e-2 {
                    let x2 = x * x;
                    1.0 - x2 / 10.0 + x2 * x2 / 280.0
                } else {
                    3.0 * (x.sin() - x * x.cos()) / (x * x * x)
                }
            }
            KernelFamily::Gaussian => (-0.5 * x * x).exp(),
        }
    }

    /// Half-width of the (truncated) support of the profile.
    pub fn support_radius(&self) -> f64 {
        match self {
            KernelFamily::Uniform | KernelFamily::Epanechnikov => 1.0,
            KernelFamily::Gaussian => GAUSSIAN_TRUNCATION,
        }
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(KernelFamily::Uniform),
            "epanechnikov" => Ok(KernelFamily::Epanechnikov),
            "gaussian" => Ok(KernelFamily::Gaussian),
            other => Err(Error::InvalidKernel(format!(
                "unknown kernel `{other}` (expected uniform | epanechnikov | gaussian)"
            ))),
        }
    }
}

/// A kernel family with a bandwidth pair `h = (h1, h2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub h1: f64,
    pub h2: f64,
}

impl KernelSpec {
    pub fn new(family: KernelFamily, h1: f64, h2: f64) -> Result<Self> {
        if !(h1 > 0.0 && h2 > 0.0 && h1.is_finite() && h2.is_finite()) {
            return Err(Error::InvalidKernel(format!("bandwidth must be positive, got ({h1}, {h2})")));
        }
        Ok(Self { family, h1, h2 })
    }

    /// `|h| = h1 h2`.
    pub fn h_area(&self) -> f64 {
        self.h1 * self.h2
    }

    /// `K(t)`, without bandwidth scaling.
    pub fn value(&self, t: (f64, f64)) -> f64 {
        self.family.profile(t.0) * self.family.profile(t.1)
    }

    /// `k(x) = int K(lambda) exp(i x . lambda) d lambda`.
    pub fn inverse_transform(&self, x: (f64, f64)) -> f64 {
        self.family.profile_transform(x.0) * self.family.profile_transform(x.1)
    }

    /// One axis of the wrapped kernel: `h^{-1} sum_j k1((lambda + 2 pi j) / h)`.
    fn wrapped_axis(&self, lambda: f64, h: f64) -> f64 {
        let reach = self.family.support_radius() * h;
        let base = lambda.rem_euclid(TAU);
        let lo = ((-reach - base) / TAU).floor() as i64;
        let hi = ((reach - base) / TAU).ceil() as i64;
        (lo..=hi)
            .map(|j| self.family.profile((base + TAU * j as f64) / h))
            .sum::<f64>()
            / h
    }

    /// `K_h(lambda) = |h|^{-1} sum_{j in Z^2} K((lambda + 2 pi j) / h)`.
    pub fn wrapped(&self, lambda: (f64, f64)) -> f64 {
        self.wrapped_axis(lambda.0, self.h1) * self.wrapped_axis(lambda.1, self.h2)
    }

    pub fn check_feasible(&self, spec: LatticeSpec) -> Result<()> {
        if self.h1 * spec.d1() as f64 >= 2.0 && self.h2 * spec.d2() as f64 >= 2.0 {
            Ok(())
        } else {
            Err(Error::BandwidthTooSmall {
                h1: self.h1,
                h2: self.h2,
                d1: spec.d1(),
                d2: spec.d2(),
            })
        }
    }
}

/// `K(t)` for a family at an unscaled point.
pub fn kernel_value(kernel: &KernelSpec, t: (f64, f64)) -> f64 {
    kernel.value(t)
}

/// Bandwidth as a fixed pair or as the rule `h_k = d_k^{-beta}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Fixed(f64, f64),
    Power(f64),
}

impl Bandwidth {
    pub fn resolve(&self, spec: LatticeSpec) -> (f64, f64) {
        match *self {
            Bandwidth::Fixed(a, b) => (a, b),
            Bandwidth::Power(beta) => ((spec.d1() as f64).powf(-beta), (spec.d2() as f64).powf(-beta)),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    /// Accepts `pow:<beta>`, `h` or `h1,h2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidKernel(format!("bad bandwidth `{s}`: {why}"));
        let s = s.trim();
        if let Some(beta) = s.strip_prefix("pow:") {
            let beta: f64 = beta.trim().parse().map_err(|_| bad("exponent is not a number"))?;
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(bad("exponent must be positive"));
            }
            return Ok(Bandwidth::Power(beta));
        }
        let parts: Vec<&str> = s.split(',').collect();
        let nums = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("expected pow:<beta>, <h> or <h1>,<h2>"))?;
        let (a, b) = match nums.as_slice() {
            [h] => (*h, *h),
            [a, b] => (*a, *b),
            _ => return Err(bad("expected one or two numbers")),
        };
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(bad("bandwidths must be positive"));
        }
        Ok(Bandwidth::Fixed(a, b))
    }
}

impl std::fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bandwidth::Fixed(a, b) => write!(f, "{a},{b}"),
            Bandwidth::Power(beta) => write!(f, "pow:{beta}"),
        }
    }
}

impl Serialize for Bandwidth {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Bandwidth::Fixed(a, b) => [a, b].serialize(ser),
            Bandwidth::Power(_) => self.to_string().serialize(ser),
        }
    }
}

impl<'de> Deserialize<'de> for Bandwidth {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Pair([f64; 2]),
            Text(String),
        }
        match Raw::deserialize(de)? {
            Raw::Pair([a, b]) => format!("{a},{b}").parse().map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Kernel family plus bandwidth rule, as written in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: KernelFamily,
    pub bandwidth: Bandwidth,
}

impl KernelConfig {
    pub fn resolve(&self, spec: LatticeSpec) -> Result<KernelSpec> {
        let (h1, h2) = self.bandwidth.resolve(spec);
        KernelSpec::new(self.family, h1, h2)
    }
}

/// Per-axis kernel values at lattice offsets `-n..=n`.
fn axis_weights(family: KernelFamily, h: f64, d: usize) -> Vec<f64> {
    let step = TAU / (h * d as f64);
    let n = (family.support_radius() / step).floor() as i64;
    (-n..=n).map(|s| family.profile(s as f64 * step)).collect()
}

/// Discrete smoothing weights `p_{s,T}` proportional to
/// `K(2 pi s1 / (h1 d1), 2 pi s2 / (h2 d2))`, normalized to sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    spec: LatticeSpec,
    kernel: KernelSpec,
    axis1: Vec<f64>,
    axis2: Vec<f64>,
}

impl WeightTable {
    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn kernel(&self) -> KernelSpec {
        self.kernel
    }

    /// Offsets `(n1, n2)` such that the support is `[-n1, n1] x [-n2, n2]`.
    pub fn radius(&self) -> (i64, i64) {
        ((self.axis1.len() / 2) as i64, (self.axis2.len() / 2) as i64)
    }

    pub fn weight(&self, s1: i64, s2: i64) -> f64 {
        let (n1, n2) = self.radius();
        if s1.abs() > n1 || s2.abs() > n2 {
            return 0.0;
        }
        self.axis1[(s1 + n1) as usize] * self.axis2[(s2 + n2) as usize]
    }

    /// All `(s, p_s)` with `p_s > 0`.
    pub fn iter(&self) -> impl Iterator<Item = ((i64, i64), f64)> + '_ {
        let (n1, n2) = self.radius();
        (-n2..=n2).flat_map(move |s2| {
            (-n1..=n1).filter_map(move |s1| {
                let w = self.weight(s1, s2);
                (w > 0.0).then_some(((s1, s2), w))
            })
        })
    }

    /// `sum_s p_s g(j + s)` for every `j in T`, with `g` given row-major on
    /// `T` and extended periodically.
    pub fn smooth_periodic(&self, g: &[f64]) -> Vec<f64> {
        let (d1, d2) = self.spec.dims();
        assert_eq!(g.len(), d1 * d2);
        let (n1, n2) = self.radius();
        let mut tmp = vec![0.0; d1 * d2];
        for r in 0..d2 {
            for c in 0..d1 {
                let mut acc = 0.0;
                for (k, w) in self.axis1.iter().enumerate() {
                    let cc = (c as i64 + k as i64 - n1).rem_euclid(d1 as i64) as usize;
                    acc += w * g[cc + r * d1];
                }
                tmp[c + r * d1] = acc;
            }
        }
        let mut out = vec![0.0; d1 * d2];
        for r in 0..d2 {
            for c in 0..d1 {
                let mut acc = 0.0;
                for (k, w) in self.axis2.iter().enumerate() {
                    let rr = (r as i64 + k as i64 - n2).rem_euclid(d2 as i64) as usize;
                    acc += w * tmp[c + rr * d1];
                }
                out[c + r * d1] = acc;
            }
        }
        out
    }
}

/// Builds the normalized weights; requires `h_k d_k >= 2`.
pub fn build_weights(spec: LatticeSpec, kernel: &KernelSpec) -> Result<WeightTable> {
    kernel.check_feasible(spec)?;
    let normalize = |mut v: Vec<f64>| {
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|w| *w /= total);
        v
    };
    Ok(WeightTable {
        spec,
        kernel: *kernel,
        axis1: normalize(axis_weights(kernel.family, kernel.h1, spec.d1())),
        axis2: normalize(axis_weights(kernel.family, kernel.h2, spec.d2())),
    })
}

/// Composite Simpson rule on `[a, b]` with `n` (even) intervals.
pub(crate) fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Numerical probes of the regularity conditions on a kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelReport {
    /// `|4 pi^2 / (|h| |T|) sum_j K(2 pi j / (h d)) - 1|`
    pub k1_residual: f64,
    /// `sup_lambda |h| K_h(lambda)` over the Fourier grid; should stay O(1).
    pub k2_sup_scaled: f64,
    /// `int |K|` by quadrature.
    pub k3_integral: f64,
    /// Largest `|h|^{3/2} |K_h(l_s) - K_h(l_t)| / ||l_s - l_t||` over
    /// adjacent Fourier frequencies.
    pub k5_lipschitz_ratio: f64,
    /// Fraction of `int |k|` over `[-L, L]^2` (L = 64) lying outside
    /// `[-1, 1]^2`; zero iff `k` is supported on the unit square.
    pub k4_mass_outside_unit_square: f64,
}

pub fn validate_kernel(kernel: &KernelSpec, spec: LatticeSpec) -> KernelReport {
    let fam = kernel.family;
    let (d1, d2) = spec.dims();

    let riemann_axis = |h: f64, d: usize| {
        let step = TAU / (h * d as f64);
        let n = (fam.support_radius() / step).floor() as i64;
        step * (-n..=n).map(|s| fam.profile(s as f64 * step)).sum::<f64>()
    };
    let k1 = (riemann_axis(kernel.h1, d1) * riemann_axis(kernel.h2, d2) - 1.0).abs();

    let wrapped1: Vec<f64> = (1..=d1)
        .map(|j| kernel.wrapped_axis(TAU * j as f64 / d1 as f64, kernel.h1))
        .collect();
    let wrapped2: Vec<f64> = (1..=d2)
        .map(|j| kernel.wrapped_axis(TAU * j as f64 / d2 as f64, kernel.h2))
        .collect();
    let max1 = wrapped1.iter().cloned().fold(0.0, f64::max);
    let max2 = wrapped2.iter().cloned().fold(0.0, f64::max);
    let k2 = kernel.h_area() * max1 * max2;

    let r = fam.support_radius();
    let axis_integral = simpson(|t| fam.profile(t).abs(), -r, r, 4000);
    let k3 = axis_integral * axis_integral;

    // adjacent frequencies differ along one axis only
    let scale = kernel.h_area().powf(1.5);
    let mut k5: f64 = 0.0;
    for (a, wa) in wrapped1.iter().enumerate() {
        for (b, wb) in wrapped2.iter().enumerate() {
            let here = wa * wb;
            let right = wrapped1[(a + 1) % d1] * wb;
            let up = wa * wrapped2[(b + 1) % d2];
            k5 = k5.max(scale * (here - right).abs() / (TAU / d1 as f64));
            k5 = k5.max(scale * (here - up).abs() / (TAU / d2 as f64));
        }
    }

    let big = 64.0;
    let inner = simpson(|x| fam.profile_transform(x).abs(), -1.0, 1.0, 400);
    let outer = simpson(|x| fam.profile_transform(x).abs(), -big, big, 40_000);
    let k4 = 1.0 - (inner * inner) / (outer * outer);

    KernelReport {
        k1_residual: k1,
        k2_sup_scaled: k2,
        k3_integral: k3,
        k5_lipschitz_ratio: k5,
        k4_mass_outside_unit_square: k4,
    }
}

/// `4 pi^2`, the periodogram-to-spectrum scale.
pub const FOUR_PI_SQ: f64 = 4.0 * PI * PI;

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    fn k(family: KernelFamily, h: f64) -> KernelSpec {
        KernelSpec::new(family, h, h).unwrap()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(k(KernelFamily::Epanechnikov, 1.0).value((0.0, 0.0)), 9.0 / 16.0);
        assert_eq!(k(KernelFamily::Uniform, 1.0).value((1.5, 0.0)), 0.0);
        assert_eq!(k(KernelFamily::Uniform, 1.0).value((1.0, -1.0)), 0.25);
        assert!((k(KernelFamily::Gaussian, 1.0).value((0.0, 0.0)) - 1.0 / TAU).abs() < 1e-16);
    }

    #[test]
    fn kernels_are_even_nonnegative_and_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for fam in KernelFamily::ALL {
            let kern = k(fam, 1.0);
            for _ in 0..10_000 {
                let t = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
                let v = kern.value(t);
                assert!(v >= 0.0);
                assert_eq!(v, kern.value((-t.0, -t.1)));
            }
            let r = fam.support_radius();
            let axis = simpson(|t| fam.profile(t), -r, r, 4000);
            assert!((axis * axis - 1.0).abs() < 1e-6, "{fam:?}");
        }
    }

    #[test]
    fn inverse_transform_closed_forms() {
        for fam in KernelFamily::ALL {
            assert!((k(fam, 1.0).inverse_transform((0.0, 0.0)) - 1.0).abs() < 1e-15);
        }
        let g = k(KernelFamily::Gaussian, 1.0).inverse_transform((1.0, 0.0));
        assert!((g - (-0.5f64).exp()).abs() < 1e-15);
        assert!((g - 0.6065).abs() < 1e-4);
        // series branch joins the closed form smoothly
        let e = KernelFamily::Epanechnikov;
        assert!((e.profile_transform(0.0099) - e.profile_transform(0.0101)).abs() < 1e-5);
    }

    /// Quadrature oracle: int K(l) exp(i x.l) dl at random x.
    #[test]
    fn inverse_transform_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for fam in KernelFamily::ALL {
            let r = fam.support_radius();
            for _ in 0..20 {
                let x = (rng.random_range(-6.0..6.0), rng.random_range(-6.0..6.0));
                // imaginary part vanishes by evenness; integrate the real part
                let axis = |xi: f64| simpson(|t| fam.profile(t) * (xi * t).cos(), -r, r, 20_000);
                let quad = axis(x.0) * axis(x.1);
                let closed = k(fam, 1.0).inverse_transform(x);
                assert!((quad - closed).abs() < 1e-6, "{fam:?} {x:?}: {quad} vs {closed}");
            }
        }
    }

    #[test]
    fn wrapped_kernel_examples() {
        let u = k(KernelFamily::Uniform, 0.5);
        assert!((u.wrapped((0.0, 0.0)) - 1.0).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for fam in KernelFamily::ALL {
            let kern = KernelSpec::new(fam, 0.7, 2.5).unwrap();
            for _ in 0..100 {
                let l = (rng.random_range(-7.0..7.0), rng.random_range(-7.0..7.0));
                let a = kern.wrapped(l);
                assert!((a - kern.wrapped((l.0 + TAU, l.1))).abs() < 1e-12);
                assert!((a - kern.wrapped((l.0, l.1 - TAU))).abs() < 1e-12);
            }
        }
    }

    /// The Riemann sum oracle: 4 pi^2 / (|h| |T|) sum_j K(2 pi j / (h d)) ~ 1.
    #[test]
    fn riemann_sum_close_to_one() {
        let s = LatticeSpec::new(64, 64).unwrap();
        for fam in KernelFamily::ALL {
            let kern = k(fam, 0.4);
            let mut sum = 0.0;
            for j2 in -200i64..=200 {
                for j1 in -200i64..=200 {
                    sum += kern.value((TAU * j1 as f64 / (0.4 * 64.0), TAU * j2 as f64 / (0.4 * 64.0)));
                }
            }
            let riemann = FOUR_PI_SQ / (kern.h_area() * s.size() as f64) * sum;
            // the box kernel's jump makes its sum converge at rate 1 / (h d) only
            let tol = if fam == KernelFamily::Uniform { 0.25 } else { 0.02 };
            assert!((riemann - 1.0).abs() < tol, "{fam:?}: {riemann}");
            assert!((validate_kernel(&kern, s).k1_residual - (riemann - 1.0).abs()).abs() < 1e-9);
        }
    }

    #[test]
    fn uniform_weights_on_unit_box() {
        let s = LatticeSpec::new(8, 8).unwrap();
        // h d / 2 pi = 1.2: offsets -1..=1 fall inside the support
        let w = build_weights(s, &k(KernelFamily::Uniform, 0.3 * PI)).unwrap();
        assert_eq!(w.radius(), (1, 1));
        let all: Vec<_> = w.iter().collect();
        assert_eq!(all.len(), 9);
        for (_, p) in all {
            assert!((p - 1.0 / 9.0).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_normalized_and_even() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let s = LatticeSpec::new(rng.random_range(8..70), rng.random_range(8..70)).unwrap();
            let fam = KernelFamily::ALL[rng.random_range(0..3)];
            let h1 = rng.random_range(2.0 / s.d1() as f64..1.5);
            let h2 = rng.random_range(2.0 / s.d2() as f64..1.5);
            let w = build_weights(s, &KernelSpec::new(fam, h1, h2).unwrap()).unwrap();
            let total: f64 = w.iter().map(|(_, p)| p).sum();
            assert!((total - 1.0).abs() < 1e-12);
            for ((s1, s2), p) in w.iter() {
                assert_eq!(p, w.weight(-s1, -s2));
            }
        }
    }

    #[test]
    fn infeasible_bandwidth() {
        let s = LatticeSpec::new(8, 8).unwrap();
        assert!(matches!(
            build_weights(s, &k(KernelFamily::Epanechnikov, 0.2)),
            Err(Error::BandwidthTooSmall { .. })
        ));
    }

    #[test]
    fn periodic_smoothing_matches_direct_sum() {
        let s = LatticeSpec::new(9, 6).unwrap();
        let w = build_weights(s, &KernelSpec::new(KernelFamily::Gaussian, 0.9, 1.3).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g: Vec<f64> = (0..s.size()).map(|_| rng.random::<f64>()).collect();
        let fast = w.smooth_periodic(&g);
        for j in s.indices() {
            let direct: f64 = w
                .iter()
                .map(|((s1, s2), p)| p * g[s.reduced_offset(j.j1 as i64 + s1, j.j2 as i64 + s2)])
                .sum();
            assert!((fast[s.offset(j.j1, j.j2)] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn validator_reports() {
        let s = LatticeSpec::new(64, 64).unwrap();
        let g = validate_kernel(&k(KernelFamily::Gaussian, 0.4), s);
        assert!(g.k1_residual < 0.02);
        let u = validate_kernel(&k(KernelFamily::Uniform, 0.4), s);
        assert!((u.k3_integral - 1.0).abs() < 1e-9);
        assert!(u.k4_mass_outside_unit_square > 0.5);
        let ratios: Vec<f64> = [0.6, 0.4, 0.3]
            .iter()
            .map(|&h| validate_kernel(&k(KernelFamily::Epanechnikov, h), s).k5_lipschitz_ratio)
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi / lo < 2.0, "{ratios:?}");
        assert!(g.k2_sup_scaled > 0.0 && g.k2_sup_scaled < 1.0);
    }

    #[test]
    fn bandwidth_parsing() {
        assert_eq!("pow:0.5".parse::<Bandwidth>().unwrap(), Bandwidth::Power(0.5));
        assert_eq!("0.4".parse::<Bandwidth>().unwrap(), Bandwidth::Fixed(0.4, 0.4));
        assert_eq!("0.4, 0.3".parse::<Bandwidth>().unwrap(), Bandwidth::Fixed(0.4, 0.3));
        assert!("-1".parse::<Bandwidth>().is_err());
        assert!("pow:x".parse::<Bandwidth>().is_err());
        let s = LatticeSpec::new(64, 16).unwrap();
        let (a, b) = Bandwidth::Power(0.5).resolve(s);
        assert_eq!((a, b), (0.125, 0.25));
        let cfg: KernelConfig = serde_json::from_str(r#"{"family": "gaussian", "bandwidth": "pow:0.25"}"#).unwrap();
        assert_eq!(cfg.bandwidth, Bandwidth::Power(0.25));
        let cfg: KernelConfig = serde_json::from_str(r#"{"family": "uniform", "bandwidth": [0.4, 0.5]}"#).unwrap();
        assert_eq!(cfg.bandwidth, Bandwidth::Fixed(0.4, 0.5));
        assert!("triangle".parse::<KernelFamily>().is_err());
    }
}
