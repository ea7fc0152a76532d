use std::f64::consts::TAU;

use super::FieldModel;
use crate::error::{Error, Result};

const FOUR_PI_SQ: f64 = 4.0 * std::f64::consts::PI * std::f64::consts::PI;

impl FieldModel {
    fn closed_form_coefficients(&self, op: &'static str) -> Result<Vec<((i64, i64), f64)>> {
        self.ma_coefficients().ok_or(Error::UnsupportedModel {
            op,
            model: self.kind_name(),
        })
    }

    /// `gamma(h) = sigma^2 sum_s a_s a_{s+h}` for white noise and moving
    /// averages.
    pub fn theoretical_autocovariance(&self, h: (i64, i64)) -> Result<f64> {
        let coefs = self.closed_form_coefficients("theoretical_autocovariance")?;
        let var = self.innovation.variance();
        let mut acc = 0.0;
        for &(s, a) in &coefs {
            let target = (s.0 + h.0, s.1 + h.1);
            for &(u, b) in &coefs {
                if u == target {
                    acc += a * b;
                }
            }
        }
        Ok(var * acc)
    }

    /// `f(lambda) = sigma^2 / (4 pi^2) |sum_s a_s e^{-i s.lambda}|^2`.
    pub fn theoretical_spectrum(&self, lambda: (f64, f64)) -> Result<f64> {
        let coefs = self.closed_form_coefficients("theoretical_spectrum")?;
        let (mut re, mut im) = (0.0, 0.0);
        for &(s, a) in &coefs {
            let phase = s.0 as f64 * lambda.0 + s.1 as f64 * lambda.1;
            re += a * phase.cos();
            im -= a * phase.sin();
        }
        Ok(self.innovation.variance() * (re * re + im * im) / FOUR_PI_SQ)
    }

    /// Lags with possibly nonzero autocovariance: the Minkowski difference of
    /// the coefficient support with itself.
    pub fn autocovariance_support(&self) -> Result<Vec<(i64, i64)>> {
        let coefs = self.closed_form_coefficients("autocovariance_support")?;
        let mut lags: Vec<(i64, i64)> = coefs
            .iter()
            .flat_map(|&(s, _)| coefs.iter().map(move |&(u, _)| (u.0 - s.0, u.1 - s.1)))
            .collect();
        lags.sort_unstable();
        lags.dedup();
        Ok(lags)
    }
}

/// `sup_lambda f(lambda)` over a `256 x 256` frequency grid.
pub fn spectrum_sup(model: &FieldModel) -> Result<f64> {
    let m = 256;
    let mut best: f64 = 0.0;
    for a in 0..m {
        for b in 0..m {
            let l = (TAU * a as f64 / m as f64, TAU * b as f64 / m as f64);
            best = best.max(model.theoretical_spectrum(l)?);
        }
    }
    Ok(best)
}
