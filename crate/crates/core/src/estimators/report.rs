use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::FieldGrid;
use crate::kernels::{build_weights, KernelSpec, WeightTable, FOUR_PI_SQ};
use crate::lattice::LatticeSpec;
use crate::spectra::{fourier_coefficients, periodogram};

/// Default exponent for the `I^q` statistics.
pub const DEFAULT_Q: f64 = 4.5;

/// Discrepancies between spectral quantities of a field `V` and of an
/// estimate `V_hat` of it. Signed averages are reported in absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatedFieldReport {
    /// `(1/|T|) sum (V - V_hat)^2`
    pub mse: f64,
    /// `sup_{j in T} |f_hat_V(lambda_j) - f_hat_Vhat(lambda_j)|`
    pub fhat_sup_diff: f64,
    /// `|(1/|N|) sum_N (x_V - x_Vhat + y_V - y_Vhat) / sqrt f|`
    pub coef_mean_diff: f64,
    /// `|(1/|N|) sum_N (I_V - I_Vhat) / f|`
    pub pg_mean_diff: f64,
    /// `|(1/|N|) sum_N (I_V^2 - I_Vhat^2) / f^2|`
    pub pg2_mean_diff: f64,
    /// `|(1/|N|) sum_N (I_V^q - I_Vhat^q) / f^q|`
    pub pgq_mean_diff: f64,
    /// `sup_{k in N} |sum_j p_j (x_V - x_Vhat + y_V - y_Vhat)(k + j)|`
    pub coef_weighted_sup: f64,
    /// `sup_{k in N} |sum_j p_j (I_V - I_Vhat)(k + j)|`
    pub pg_weighted_sup: f64,
    /// `sup_{k in N} |sum_j p_j (I_V^2 - I_Vhat^2)(k + j)|`
    pub pg2_weighted_sup: f64,
    /// `sup_{k in N} |sum_j p_j (I_V^q - I_Vhat^q)(k + j)|`
    pub pgq_weighted_sup: f64,
}

impl EstimatedFieldReport {
    pub const NAMES: [&'static str; 10] = [
        "mse",
        "fhat_sup_diff",
        "coef_mean_diff",
        "pg_mean_diff",
        "pg2_mean_diff",
        "pgq_mean_diff",
        "coef_weighted_sup",
        "pg_weighted_sup",
        "pg2_weighted_sup",
        "pgq_weighted_sup",
    ];

    /// `(name, value)` pairs in [`Self::NAMES`] order.
    pub fn entries(&self) -> [(&'static str, f64); 10] {
        let v = [
            self.mse,
            self.fhat_sup_diff,
            self.coef_mean_diff,
            self.pg_mean_diff,
            self.pg2_mean_diff,
            self.pgq_mean_diff,
            self.coef_weighted_sup,
            self.pg_weighted_sup,
            self.pg2_weighted_sup,
            self.pgq_weighted_sup,
        ];
        let mut out = [("", 0.0); 10];
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = (Self::NAMES[k], v[k]);
        }
        out
    }
}

fn sup_over_n(spec: LatticeSpec, values: &[f64]) -> f64 {
    spec.partition()
        .n_set
        .iter()
        .map(|j| values[spec.offset(j.j1, j.j2)].abs())
        .fold(0.0, f64::max)
}

/// Computes every discrepancy statistic between `v` and `v_hat`.
///
/// `kernel` defines the spectral estimate, `weights` the local averages and
/// `f` the reference spectrum used for normalization.
pub fn estimated_field_report(
    v: &FieldGrid,
    v_hat: &FieldGrid,
    kernel: &KernelSpec,
    weights: &WeightTable,
    f: &dyn Fn((f64, f64)) -> f64,
    q: f64,
) -> Result<EstimatedFieldReport> {
    let spec = v.spec();
    if v_hat.spec() != spec || weights.spec() != spec {
        return Err(Error::LatticeMismatch(format!(
            "field {spec}, estimate {}, weights {}",
            v_hat.spec(),
            weights.spec()
        )));
    }
    let n_all = spec.size();
    let diff = v.sub(v_hat)?;
    let mse = diff.values().iter().map(|d| d * d).sum::<f64>() / n_all as f64;

    let (ta, tb) = (fourier_coefficients(v), fourier_coefficients(v_hat));
    let (ia, ib) = (periodogram(&ta), periodogram(&tb));

    let smoother = build_weights(spec, kernel)?;
    let fa = smoother.smooth_periodic(ia.values());
    let fb = smoother.smooth_periodic(ib.values());
    let fhat_sup_diff = fa
        .iter()
        .zip(&fb)
        .map(|(a, b)| (a - b).abs() / FOUR_PI_SQ)
        .fold(0.0, f64::max);

    let n_set = spec.partition().n_set;
    let count = n_set.len().max(1) as f64;
    let (mut s_coef, mut s1, mut s2, mut sq) = (0.0, 0.0, 0.0, 0.0);
    for j in &n_set {
        let o = spec.offset(j.j1, j.j2);
        let fj = f(spec.frequency_of(*j));
        let coef = ta.x_values()[o] - tb.x_values()[o] + ta.y_values()[o] - tb.y_values()[o];
        let (a, b) = (ia.values()[o], ib.values()[o]);
        s_coef += coef / fj.sqrt();
        s1 += (a - b) / fj;
        s2 += (a * a - b * b) / (fj * fj);
        sq += (a.powf(q) - b.powf(q)) / fj.powf(q);
    }

    // the ordinate at (d1, d2) carries the sample mean and is left out, as
    // the periodogram is on D
    let mut coef_diff: Vec<f64> = (0..n_all)
        .map(|o| ta.x_values()[o] - tb.x_values()[o] + ta.y_values()[o] - tb.y_values()[o])
        .collect();
    coef_diff[n_all - 1] = 0.0;
    let pg_diff = |pow: f64| -> Vec<f64> {
        ia.values()
            .iter()
            .zip(ib.values())
            .map(|(a, b)| a.powf(pow) - b.powf(pow))
            .collect()
    };
    let weighted = |g: &[f64]| sup_over_n(spec, &weights.smooth_periodic(g));

    Ok(EstimatedFieldReport {
        mse,
        fhat_sup_diff,
        coef_mean_diff: (s_coef / count).abs(),
        pg_mean_diff: (s1 / count).abs(),
        pg2_mean_diff: (s2 / count).abs(),
        pgq_mean_diff: (sq / count).abs(),
        coef_weighted_sup: weighted(&coef_diff),
        pg_weighted_sup: weighted(&pg_diff(1.0)),
        pg2_weighted_sup: weighted(&pg_diff(2.0)),
        pgq_weighted_sup: weighted(&pg_diff(q)),
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::kernels::KernelFamily;

    fn setup(spec: LatticeSpec) -> (KernelSpec, WeightTable) {
        let k = KernelSpec::new(KernelFamily::Epanechnikov, 0.5, 0.5).unwrap();
        (k, build_weights(spec, &k).unwrap())
    }

    fn flat(_: (f64, f64)) -> f64 {
        1.0 / FOUR_PI_SQ
    }

    #[test]
    fn identical_fields_give_zero() {
        let s = LatticeSpec::new(16, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = FieldGrid::from_fn(s, |_, _| rng.random::<f64>()).unwrap();
        let (k, w) = setup(s);
        let rep = estimated_field_report(&v, &v, &k, &w, &flat, DEFAULT_Q).unwrap();
        for (name, value) in rep.entries() {
            assert_eq!(value, 0.0, "{name}");
        }
    }

    #[test]
    fn small_perturbation_within_algebraic_bound() {
        let s = LatticeSpec::new(16, 16).unwrap();
        let n = s.size() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let v = FieldGrid::from_fn(s, |_, _| rng.random::<f64>() - 0.5).unwrap();
        let delta = FieldGrid::from_fn(s, |_, _| rng.random_range(-1.0..1.0) / n).unwrap();
        let v_hat = v.add(&delta).unwrap();
        let (k, w) = setup(s);
        let rep = estimated_field_report(&v, &v_hat, &k, &w, &flat, DEFAULT_Q).unwrap();
        // |I_V - I_Vhat| <= 2 |z_V| B + B^2 with B = |T|^{-1/2} sum |delta|
        let b = delta.values().iter().map(|d| d.abs()).sum::<f64>() / n.sqrt();
        let t = fourier_coefficients(&v);
        let zmax = t
            .x_values()
            .iter()
            .zip(t.y_values())
            .map(|(x, y)| x.hypot(*y))
            .fold(0.0, f64::max);
        let bound = (2.0 * zmax * b + b * b) / FOUR_PI_SQ;
        assert!(rep.fhat_sup_diff <= bound, "{} > {bound}", rep.fhat_sup_diff);
        assert!(rep.entries().iter().all(|(_, v)| v.is_finite()));
    }

    #[test]
    fn mismatched_lattices() {
        let a = FieldGrid::constant(LatticeSpec::new(8, 8).unwrap(), 0.0);
        let b = FieldGrid::constant(LatticeSpec::new(8, 9).unwrap(), 0.0);
        let (k, w) = setup(a.spec());
        assert!(matches!(
            estimated_field_report(&a, &b, &k, &w, &flat, DEFAULT_Q),
            Err(Error::LatticeMismatch(_))
        ));
    }
}
