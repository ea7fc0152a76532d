//! Random-field models on `Z^2`, their simulation on a finite lattice and
//! closed-form second-order structure where it exists.

mod simulate;
mod theory;

use rand::Rng;
use rand_distr::{Distribution, Normal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;

pub use simulate::{
    coupled_simulate, coupling_origin, gmc_decay_estimate, gmc_samples, simulate, CoupledPair, CouplingMode,
    AR_TOLERANCE,
};
pub use theory::spectrum_sup;

/// Observed values `V(t)` on a lattice, row-major with `t1` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    spec: LatticeSpec,
    values: Vec<f64>,
}

impl FieldGrid {
    pub fn new(spec: LatticeSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.size() {
            return Err(Error::LatticeMismatch(format!(
                "{} values for a {} lattice",
                values.len(),
                spec
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let t = spec.index_at(pos);
            return Err(Error::Simulation(format!(
                "non-finite value at t=({}, {})",
                t.j1, t.j2
            )));
        }
        Ok(Self { spec, values })
    }

    /// Builds a field from `V(t1, t2)` evaluated at every 1-based site.
    pub fn from_fn(spec: LatticeSpec, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let values = spec.indices().map(|t| f(t.j1, t.j2)).collect();
        Self::new(spec, values)
    }

    pub fn constant(spec: LatticeSpec, c: f64) -> Self {
        Self {
            spec,
            values: vec![c; spec.size()],
        }
    }

    pub fn spec(&self) -> LatticeSpec {
        self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, t1: usize, t2: usize) -> f64 {
        self.values[self.spec.offset(t1, t2)]
    }

    /// The sample mean `V_T`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Population (divide-by-|T|) variance around the sample mean.
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / self.values.len() as f64
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Elementwise `self + other`.
    pub fn add(&self, other: &FieldGrid) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { spec: self.spec, values })
    }

    /// Elementwise `self - other`.
    pub fn sub(&self, other: &FieldGrid) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { spec: self.spec, values })
    }

    pub(crate) fn check_same(&self, other: &FieldGrid) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::LatticeMismatch(format!("{} vs {}", self.spec, other.spec)));
        }
        Ok(())
    }
}

/// Innovation distribution. All variants are centred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "distribution", rename_all = "snake_case", deny_unknown_fields)]
pub enum Innovation {
    Gaussian { sigma: f64 },
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
    /// `scale * t_nu`.
    StudentT { nu: f64, scale: f64 },
}

impl Innovation {
    pub fn variance(&self) -> f64 {
        match *self {
            Innovation::Gaussian { sigma } => sigma * sigma,
            Innovation::Uniform { half_width } => half_width * half_width / 3.0,
            Innovation::StudentT { nu, scale } => scale * scale * nu / (nu - 2.0),
        }
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            Innovation::Gaussian { sigma } => {
                sigma * Normal::new(0.0, 1.0).expect("unit normal").sample(rng)
            }
            Innovation::Uniform { half_width } => rng.random_range(-half_width..=half_width),
            Innovation::StudentT { nu, scale } => {
                scale * StudentT::new(nu).expect("validated degrees of freedom").sample(rng)
            }
        }
    }
}

/// Innovation law of the driving i.i.d. field.
///
/// Student-t innovations need `nu > 8` unless `allow_heavy_tails` is set
/// (finite variance, `nu > 2`, is always required).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationSpec {
    #[serde(flatten)]
    pub distribution: Innovation,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_heavy_tails: bool,
}

impl InnovationSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            distribution: Innovation::Gaussian { sigma },
            allow_heavy_tails: false,
        }
    }

    pub fn variance(&self) -> f64 {
        self.distribution.variance()
    }

    fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::model(format!("innovation.{name}"), format!("must be positive and finite, got {v}")))
            }
        };
        match self.distribution {
            Innovation::Gaussian { sigma } => positive("sigma", sigma),
            Innovation::Uniform { half_width } => positive("half_width", half_width),
            Innovation::StudentT { nu, scale } => {
                positive("scale", scale)?;
                positive("nu", nu)?;
                if nu <= 2.0 {
                    return Err(Error::model("innovation.nu", "variance is infinite for nu <= 2"));
                }
                if nu <= 8.0 && !self.allow_heavy_tails {
                    return Err(Error::model(
                        "innovation.nu",
                        "nu must exceed 8 (set allow_heavy_tails to override)",
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Moving-average coefficient `a_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaCoefficient {
    pub s: [i64; 2],
    pub a: f64,
}

/// Second-order Volterra coefficient `a_{s1,s2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolterraCoefficient {
    pub s1: [i64; 2],
    pub s2: [i64; 2],
    pub a: f64,
}

/// Neighbour `s` of the autoregressive update with Lipschitz weight `u_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArNeighbor {
    pub s: [i64; 2],
    pub u: f64,
}

/// The shipped update functions `G` of the nonlinear autoregression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArUpdate {
    /// `G = sum_s u_s V(t - s) + eps_t`
    Affine,
    /// `G = sum_s u_s tanh(V(t - s)) + eps_t`
    Tanh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    WhiteNoise,
    LinearMa {
        coefficients: Vec<MaCoefficient>,
    },
    Volterra2 {
        coefficients: Vec<VolterraCoefficient>,
    },
    NonlinearAr {
        update: ArUpdate,
        neighbors: Vec<ArNeighbor>,
    },
}

/// A generative random-field model `V(t) = mu + G(eps_{t-s} : s)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldModel {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default)]
    pub mean: f64,
    pub innovation: InnovationSpec,
}

impl FieldModel {
    pub fn white_noise(innovation: InnovationSpec) -> Self {
        Self {
            kind: ModelKind::WhiteNoise,
            mean: 0.0,
            innovation,
        }
    }

    pub fn linear_ma(coefficients: &[([i64; 2], f64)], innovation: InnovationSpec) -> Self {
        Self {
            kind: ModelKind::LinearMa {
                coefficients: coefficients
                    .iter()
                    .map(|&(s, a)| MaCoefficient { s, a })
                    .collect(),
            },
            mean: 0.0,
            innovation,
        }
    }

    /// `a_s = rho^{||s||}` on the window `||s|| <= radius` (max norm).
    pub fn geometric_ma(rho: f64, radius: i64, innovation: InnovationSpec) -> Self {
        let mut coefficients = Vec::new();
        for s2 in -radius..=radius {
            for s1 in -radius..=radius {
                let norm = s1.abs().max(s2.abs());
                coefficients.push(([s1, s2], rho.powi(norm as i32)));
            }
        }
        Self::linear_ma(&coefficients, innovation)
    }

    pub fn volterra2(coefficients: &[([i64; 2], [i64; 2], f64)], innovation: InnovationSpec) -> Self {
        Self {
            kind: ModelKind::Volterra2 {
                coefficients: coefficients
                    .iter()
                    .map(|&(s1, s2, a)| VolterraCoefficient { s1, s2, a })
                    .collect(),
            },
            mean: 0.0,
            innovation,
        }
    }

    pub fn nonlinear_ar(update: ArUpdate, neighbors: &[([i64; 2], f64)], innovation: InnovationSpec) -> Self {
        Self {
            kind: ModelKind::NonlinearAr {
                update,
                neighbors: neighbors.iter().map(|&(s, u)| ArNeighbor { s, u }).collect(),
            },
            mean: 0.0,
            innovation,
        }
    }

    pub fn with_mean(mut self, mean: f64) -> Self {
        self.mean = mean;
        self
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ModelKind::WhiteNoise => "white_noise",
            ModelKind::LinearMa { .. } => "linear_ma",
            ModelKind::Volterra2 { .. } => "volterra2",
            ModelKind::NonlinearAr { .. } => "nonlinear_ar",
        }
    }

    /// Checks every model invariant, naming the offending field on failure.
    pub fn validate(&self) -> Result<()> {
        if !self.mean.is_finite() {
            return Err(Error::model("mean", "must be finite"));
        }
        self.innovation.validate()?;
        match &self.kind {
            ModelKind::WhiteNoise => Ok(()),
            ModelKind::LinearMa { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::model("coefficients", "support must not be empty"));
                }
                for (i, c) in coefficients.iter().enumerate() {
                    if !c.a.is_finite() {
                        return Err(Error::model(format!("coefficients[{i}].a"), "must be finite"));
                    }
                }
                Ok(())
            }
            ModelKind::Volterra2 { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::model("coefficients", "support must not be empty"));
                }
                for (i, c) in coefficients.iter().enumerate() {
                    if !c.a.is_finite() {
                        return Err(Error::model(format!("coefficients[{i}].a"), "must be finite"));
                    }
                    if c.s1 == c.s2 && c.a != 0.0 {
                        return Err(Error::model(
                            format!("coefficients[{i}]"),
                            "diagonal coefficients a_{s,s} must be zero",
                        ));
                    }
                }
                Ok(())
            }
            ModelKind::NonlinearAr { neighbors, .. } => {
                if neighbors.is_empty() {
                    return Err(Error::model("neighbors", "neighbourhood must not be empty"));
                }
                for (i, n) in neighbors.iter().enumerate() {
                    if n.s == [0, 0] {
                        return Err(Error::model(format!("neighbors[{i}].s"), "the origin is not a neighbour"));
                    }
                    if !(n.u.is_finite() && n.u >= 0.0) {
                        return Err(Error::model(format!("neighbors[{i}].u"), "weights must be nonnegative"));
                    }
                }
                let total: f64 = neighbors.iter().map(|n| n.u).sum();
                if total >= 1.0 {
                    return Err(Error::model(
                        "neighbors",
                        format!("contraction weights sum to {total}, need < 1"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Parses and validates a model from JSON text. Errors carry the JSON
    /// path (and line/column for syntax errors).
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let model: FieldModel = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path.is_empty() || path == "." {
                // flattened fields hide their path; probe them one by one
                match locate_field_error(text) {
                    Some((field, reason)) => Error::model(field, reason),
                    None => Error::Json(inner),
                }
            } else {
                Error::model(path, inner.to_string())
            }
        })?;
        model.validate()?;
        Ok(model)
    }

    /// Coefficient pairs of a moving-average model, or `None`.
    pub(crate) fn ma_coefficients(&self) -> Option<Vec<((i64, i64), f64)>> {
        match &self.kind {
            ModelKind::WhiteNoise => Some(vec![((0, 0), 1.0)]),
            ModelKind::LinearMa { coefficients } => {
                Some(coefficients.iter().map(|c| ((c.s[0], c.s[1]), c.a)).collect())
            }
            _ => None,
        }
    }
}

fn probe<T: serde::de::DeserializeOwned>(v: &serde_json::Value, key: &str) -> Option<(String, String)> {
    let sub = v.get(key)?;
    let err = serde_path_to_error::deserialize::<_, T>(sub).err()?;
    let path = err.path().to_string();
    let field = if path.is_empty() || path == "." {
        key.to_string()
    } else if path.starts_with('[') {
        format!("{key}{path}")
    } else {
        format!("{key}.{path}")
    };
    Some((field, err.into_inner().to_string()))
}

fn locate_field_error(text: &str) -> Option<(String, String)> {
    let v: serde_json::Value = serde_json::from_str(text).ok()?;
    if let Some(found) = probe::<InnovationSpec>(&v, "innovation") {
        return Some(found);
    }
    if v.get("mean").is_some() {
        if let Some(found) = probe::<f64>(&v, "mean") {
            return Some(found);
        }
    }
    match v.get("kind")?.as_str()? {
        "linear_ma" => probe::<Vec<MaCoefficient>>(&v, "coefficients"),
        "volterra2" => probe::<Vec<VolterraCoefficient>>(&v, "coefficients"),
        "nonlinear_ar" => probe::<ArUpdate>(&v, "update").or_else(|| probe::<Vec<ArNeighbor>>(&v, "neighbors")),
        _ => None,
    }
}
