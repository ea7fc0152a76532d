use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fields::FieldGrid;

/// Residuals and fitted trend of a polynomial least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct DetrendResult {
    pub v_hat: FieldGrid,
    pub trend: FieldGrid,
    pub degree: usize,
    /// `(1/|T|) sum (V - V_hat)^2`, when the stationary field is known.
    pub mse_vs_truth: Option<f64>,
}

impl DetrendResult {
    pub fn with_truth(mut self, truth: &FieldGrid) -> Result<Self> {
        let diff = truth.sub(&self.v_hat)?;
        let n = diff.values().len() as f64;
        self.mse_vs_truth = Some(diff.values().iter().map(|d| d * d).sum::<f64>() / n);
        Ok(self)
    }
}

/// Exponent pairs `(a, b)` with `a + b <= degree`.
pub fn monomials(degree: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for total in 0..=degree {
        for b in 0..=total {
            out.push((total - b, b));
        }
    }
    out
}

/// Design matrix with columns `(t1/d1)^a (t2/d2)^b`, rows in field order.
pub fn design_matrix(field: &FieldGrid, degree: usize) -> DMatrix<f64> {
    let spec = field.spec();
    let (d1, d2) = spec.dims();
    let basis = monomials(degree);
    DMatrix::from_fn(spec.size(), basis.len(), |row, col| {
        let u = ((row % d1) + 1) as f64 / d1 as f64;
        let v = ((row / d1) + 1) as f64 / d2 as f64;
        let (a, b) = basis[col];
        u.powi(a as i32) * v.powi(b as i32)
    })
}

/// Removes a bivariate polynomial trend of total degree `degree`.
pub fn detrend_least_squares(y: &FieldGrid, degree: usize) -> Result<DetrendResult> {
    let spec = y.spec();
    let p = (degree + 1) * (degree + 2) / 2;
    if 4 * p > spec.size() {
        return Err(Error::Config(format!(
            "degree {degree} needs {p} basis functions, more than |T|/4 = {} on a {spec} lattice",
            spec.size() / 4
        )));
    }
    if degree == 0 {
        let mean = y.mean();
        return Ok(DetrendResult {
            v_hat: y.map(|v| v - mean),
            trend: FieldGrid::constant(spec, mean),
            degree,
            mse_vs_truth: None,
        });
    }
    let x = design_matrix(y, degree);
    let qr = x.clone().qr();
    let r = qr.r();
    let diag: Vec<f64> = r.diagonal().iter().map(|v| v.abs()).collect();
    let largest = diag.iter().cloned().fold(0.0, f64::max);
    if diag.iter().any(|&v| v <= 1e-10 * largest) {
        return Err(Error::RankDeficient(format!(
            "degree-{degree} design on a {spec} lattice is rank deficient"
        )));
    }
    let rhs = qr.q().transpose() * DVector::from_column_slice(y.values());
    let beta = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::RankDeficient("singular triangular factor".into()))?;
    let fitted = x * beta;
    let trend = FieldGrid::new(spec, fitted.iter().cloned().collect())?;
    let v_hat = y.sub(&trend)?;
    Ok(DetrendResult {
        v_hat,
        trend,
        degree,
        mse_vs_truth: None,
    })
}
