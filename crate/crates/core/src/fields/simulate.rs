use rayon::prelude::*;

use super::{ArUpdate, FieldGrid, FieldModel, Innovation, ModelKind};
use crate::error::{Error, Result};
use crate::lattice::LatticeSpec;
use crate::rng::{split_seed, Copy, SiteRng};

/// Sup-norm tolerance of the autoregressive fixed-point iteration.
pub const AR_TOLERANCE: f64 = 1e-10;

type Site = (i64, i64);

fn max_norm(s: Site) -> i64 {
    s.0.abs().max(s.1.abs())
}

/// Innovations drawn eagerly on a rectangle of sites.
struct Region {
    lo: Site,
    w: usize,
    h: usize,
    vals: Vec<f64>,
}

impl Region {
    fn around(spec: LatticeSpec, margin: i64) -> (Site, usize, usize) {
        let lo = (1 - margin, 1 - margin);
        let w = spec.d1() + 2 * margin as usize;
        let h = spec.d2() + 2 * margin as usize;
        (lo, w, h)
    }

    fn draw(rng: &SiteRng, dist: &Innovation, spec: LatticeSpec, margin: i64, copy: Copy) -> Self {
        let (lo, w, h) = Self::around(spec, margin);
        let vals = (0..w * h)
            .map(|k| {
                let site = (lo.0 + (k % w) as i64, lo.1 + (k / w) as i64);
                dist.sample(&mut rng.at(site, copy))
            })
            .collect();
        Self { lo, w, h, vals }
    }

    fn index(&self, site: Site) -> Option<usize> {
        let a = site.0 - self.lo.0;
        let b = site.1 - self.lo.1;
        if a < 0 || b < 0 || a as usize >= self.w || b as usize >= self.h {
            None
        } else {
            Some(a as usize + b as usize * self.w)
        }
    }

    fn get(&self, site: Site) -> f64 {
        self.vals[self.index(site).expect("site inside innovation region")]
    }

    fn site_at(&self, k: usize) -> Site {
        (self.lo.0 + (k % self.w) as i64, self.lo.1 + (k / self.w) as i64)
    }
}

/// Lattice margin needed so every `V(t)`, `t in T`, sees its full stencil
/// (or, for the autoregression, so boundary effects fall below tolerance).
fn margin(model: &FieldModel) -> i64 {
    match &model.kind {
        ModelKind::WhiteNoise => 0,
        ModelKind::LinearMa { coefficients } => coefficients
            .iter()
            .map(|c| max_norm((c.s[0], c.s[1])))
            .max()
            .unwrap_or(0),
        ModelKind::Volterra2 { coefficients } => coefficients
            .iter()
            .map(|c| max_norm((c.s1[0], c.s1[1])).max(max_norm((c.s2[0], c.s2[1]))))
            .max()
            .unwrap_or(0),
        ModelKind::NonlinearAr { neighbors, .. } => {
            let total: f64 = neighbors.iter().map(|n| n.u).sum();
            let reach = neighbors.iter().map(|n| max_norm((n.s[0], n.s[1]))).max().unwrap_or(0);
            if total <= 0.0 {
                0
            } else {
                let sweeps = (AR_TOLERANCE.ln() / total.ln()).ceil() as i64;
                sweeps.max(1) * reach
            }
        }
    }
}

/// `V(t)` for the finite-stencil models, given an innovation accessor.
fn value_at(model: &FieldModel, t: Site, eps: &dyn Fn(Site) -> f64) -> f64 {
    let centred = match &model.kind {
        ModelKind::WhiteNoise => eps(t),
        ModelKind::LinearMa { coefficients } => coefficients
            .iter()
            .map(|c| c.a * eps((t.0 - c.s[0], t.1 - c.s[1])))
            .sum(),
        ModelKind::Volterra2 { coefficients } => coefficients
            .iter()
            .map(|c| c.a * eps((t.0 - c.s1[0], t.1 - c.s1[1])) * eps((t.0 - c.s2[0], t.1 - c.s2[1])))
            .sum(),
        ModelKind::NonlinearAr { .. } => unreachable!("autoregression has no finite stencil"),
    };
    model.mean + centred
}

/// Solves the autoregression on the region by Gauss-Seidel sweeps from a
/// zero start; sites outside the region count as zero.
fn solve_ar(model: &FieldModel, region_of: &Region, eps: &dyn Fn(usize) -> f64) -> Result<Vec<f64>> {
    let ModelKind::NonlinearAr { update, neighbors } = &model.kind else {
        unreachable!()
    };
    let total: f64 = neighbors.iter().map(|n| n.u).sum();
    let expected = if total > 0.0 {
        (AR_TOLERANCE.ln() / total.ln()).ceil() as usize
    } else {
        1
    };
    let max_sweeps = 10 * expected + 100;
    let n = region_of.w * region_of.h;
    let innov: Vec<f64> = (0..n).map(eps).collect();
    // neighbour offsets resolved once against the region layout
    let offsets: Vec<(Site, f64)> = neighbors.iter().map(|nb| ((nb.s[0], nb.s[1]), nb.u)).collect();
    let g = |v: f64| match update {
        ArUpdate::Affine => v,
        ArUpdate::Tanh => v.tanh(),
    };
    let mut v = vec![0.0; n];
    for _ in 0..max_sweeps {
        let mut delta: f64 = 0.0;
        for k in 0..n {
            let site = region_of.site_at(k);
            let mut acc = innov[k];
            for &(s, u) in &offsets {
                if let Some(idx) = region_of.index((site.0 - s.0, site.1 - s.1)) {
                    acc += u * g(v[idx]);
                }
            }
            delta = delta.max((acc - v[k]).abs());
            v[k] = acc;
        }
        if delta < AR_TOLERANCE {
            return Ok(v);
        }
    }
    Err(Error::Simulation(format!(
        "autoregressive sweep did not converge within {max_sweeps} sweeps"
    )))
}

fn crop(spec: LatticeSpec, region: &Region, vals: &[f64], mean: f64) -> Vec<f64> {
    spec.indices()
        .map(|t| mean + vals[region.index((t.j1 as i64, t.j2 as i64)).expect("lattice inside region")])
        .collect()
}

fn render(model: &FieldModel, spec: LatticeSpec, region: &Region) -> Result<Vec<f64>> {
    if matches!(model.kind, ModelKind::NonlinearAr { .. }) {
        let vals = solve_ar(model, region, &|k| region.vals[k])?;
        Ok(crop(spec, region, &vals, model.mean))
    } else {
        Ok(spec
            .indices()
            .map(|t| value_at(model, (t.j1 as i64, t.j2 as i64), &|s| region.get(s)))
            .collect())
    }
}

/// One realization of `{V(t) : t in T}`, deterministic in `(model, spec, seed)`.
pub fn simulate(model: &FieldModel, spec: LatticeSpec, seed: u64) -> Result<FieldGrid> {
    model.validate()?;
    let rng = SiteRng::new(seed);
    let region = Region::draw(&rng, &model.innovation.distribution, spec, margin(model), Copy::Primary);
    FieldGrid::new(spec, render(model, spec, &region)?)
}

/// Which innovations the coupled copy replaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMode {
    /// Replace the single innovation at the coupling origin.
    ReplaceOrigin,
    /// For the output site `origin + j`, replace every `eps_{origin + j - s}`
    /// with `||s|| >= ||j||` (max norm).
    ReplaceFar,
}

/// A field and its coupled copy sharing all but the replaced innovations.
#[derive(Debug, Clone)]
pub struct CoupledPair {
    pub primary: FieldGrid,
    pub coupled: FieldGrid,
    /// The lattice site playing the role of the origin `0` of `Z^2`.
    pub origin: (i64, i64),
}

/// The coupling origin used for a lattice: its (upper) centre site.
pub fn coupling_origin(spec: LatticeSpec) -> (i64, i64) {
    (spec.d1().div_ceil(2) as i64, spec.d2().div_ceil(2) as i64)
}

/// Simulates `(V, V~)` under the requested coupling.
///
/// `ReplaceFar` under the autoregression re-solves the whole field once per
/// lattice site and is only practical on small lattices.
pub fn coupled_simulate(
    model: &FieldModel,
    spec: LatticeSpec,
    seed: u64,
    mode: CouplingMode,
) -> Result<CoupledPair> {
    model.validate()?;
    let rng = SiteRng::new(seed);
    let dist = model.innovation.distribution;
    let m = margin(model);
    let primary_region = Region::draw(&rng, &dist, spec, m, Copy::Primary);
    let replacement = Region::draw(&rng, &dist, spec, m, Copy::Replacement);
    let origin = coupling_origin(spec);
    let primary = FieldGrid::new(spec, render(model, spec, &primary_region)?)?;

    let coupled_vals = match mode {
        CouplingMode::ReplaceOrigin => {
            let mut swapped = Region {
                lo: primary_region.lo,
                w: primary_region.w,
                h: primary_region.h,
                vals: primary_region.vals.clone(),
            };
            let k = swapped.index(origin).expect("origin inside region");
            swapped.vals[k] = replacement.vals[k];
            render(model, spec, &swapped)?
        }
        CouplingMode::ReplaceFar => {
            let far_eps = |t: Site, u: Site| {
                let radius = max_norm((t.0 - origin.0, t.1 - origin.1));
                if max_norm((t.0 - u.0, t.1 - u.1)) < radius {
                    primary_region.get(u)
                } else {
                    replacement.get(u)
                }
            };
            if matches!(model.kind, ModelKind::NonlinearAr { .. }) {
                let mut out = Vec::with_capacity(spec.size());
                for t in spec.indices() {
                    let ts = (t.j1 as i64, t.j2 as i64);
                    let vals = solve_ar(model, &primary_region, &|k| far_eps(ts, primary_region.site_at(k)))?;
                    out.push(model.mean + vals[primary_region.index(ts).expect("inside")]);
                }
                out
            } else {
                spec.indices()
                    .map(|t| {
                        let ts = (t.j1 as i64, t.j2 as i64);
                        value_at(model, ts, &|u| far_eps(ts, u))
                    })
                    .collect()
            }
        }
    };
    Ok(CoupledPair {
        primary,
        coupled: FieldGrid::new(spec, coupled_vals)?,
        origin,
    })
}

/// Per-replication samples of `|V(j) - V~(j)|^alpha` under the
/// far-replacement coupling, for `j = (r, 0)` at each radius `r`.
///
/// Row `k` uses seed `split_seed(seed, k)`; the result does not depend on
/// thread scheduling.
pub fn gmc_samples(
    model: &FieldModel,
    spec: LatticeSpec,
    radii: &[i64],
    reps: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    model.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Config(format!("moment order must be positive, got {alpha}")));
    }
    if reps == 0 {
        return Err(Error::Config("replications must be at least 1".into()));
    }
    let origin = coupling_origin(spec);
    for &r in radii {
        if r < 0 || origin.0 + r > spec.d1() as i64 {
            return Err(Error::Config(format!("radius {r} outside the {spec} lattice")));
        }
    }
    let dist = model.innovation.distribution;
    let is_ar = matches!(model.kind, ModelKind::NonlinearAr { .. });
    let m = margin(model);

    let per_rep: Vec<Result<Vec<f64>>> = (0..reps)
        .into_par_iter()
        .map(|k| {
            let rng = SiteRng::new(split_seed(seed, k as u64));
            let mut out = Vec::with_capacity(radii.len());
            if is_ar {
                let prim = Region::draw(&rng, &dist, spec, m, Copy::Primary);
                let repl = Region::draw(&rng, &dist, spec, m, Copy::Replacement);
                let base = solve_ar(model, &prim, &|i| prim.vals[i])?;
                for &r in radii {
                    let t = (origin.0 + r, origin.1);
                    let coupled = solve_ar(model, &prim, &|i| {
                        let u = prim.site_at(i);
                        if max_norm((t.0 - u.0, t.1 - u.1)) < r {
                            prim.vals[i]
                        } else {
                            repl.vals[i]
                        }
                    })?;
                    let idx = prim.index(t).expect("inside");
                    out.push((base[idx] - coupled[idx]).abs().powf(alpha));
                }
            } else {
                let primary = |u: Site| dist.sample(&mut rng.at(u, Copy::Primary));
                let replaced = |u: Site| dist.sample(&mut rng.at(u, Copy::Replacement));
                for &r in radii {
                    let t = (origin.0 + r, origin.1);
                    let v = value_at(model, t, &primary);
                    let vt = value_at(model, t, &|u| {
                        if max_norm((t.0 - u.0, t.1 - u.1)) < r {
                            primary(u)
                        } else {
                            replaced(u)
                        }
                    });
                    out.push((v - vt).abs().powf(alpha));
                }
            }
            Ok(out)
        })
        .collect();
    per_rep.into_iter().collect()
}

/// Monte Carlo estimate of `E|V(j) - V~(j)|^alpha` at each radius: the
/// column means of [`gmc_samples`].
pub fn gmc_decay_estimate(
    model: &FieldModel,
    spec: LatticeSpec,
    radii: &[i64],
    reps: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    let rows = gmc_samples(model, spec, radii, reps, alpha, seed)?;
    let mut sums = vec![0.0; radii.len()];
    for row in &rows {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    Ok(sums.into_iter().map(|s| s / reps as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::InnovationSpec;

    fn spec(d1: usize, d2: usize) -> LatticeSpec {
        LatticeSpec::new(d1, d2).unwrap()
    }

    fn white() -> FieldModel {
        FieldModel::white_noise(InnovationSpec::gaussian(1.0))
    }

    #[test]
    fn simulation_is_deterministic() {
        let a = simulate(&white(), spec(4, 4), 11).unwrap();
        let b = simulate(&white(), spec(4, 4), 11).unwrap();
        assert_eq!(a.values().len(), 16);
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let c = simulate(&white(), spec(4, 4), 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn identity_filter_reproduces_innovations() {
        let g = InnovationSpec::gaussian(1.0);
        let ma = FieldModel::linear_ma(&[([0, 0], 1.0)], g).with_mean(3.0);
        let wn = FieldModel::white_noise(g);
        let a = simulate(&ma, spec(5, 6), 3).unwrap();
        let b = simulate(&wn, spec(5, 6), 3).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(*x, y + 3.0);
        }
    }

    #[test]
    fn ma_stencil_shifts_innovations() {
        let g = InnovationSpec::gaussian(1.0);
        let shift = FieldModel::linear_ma(&[([1, 0], 1.0)], g);
        let wn = FieldModel::white_noise(g);
        let a = simulate(&shift, spec(6, 6), 5).unwrap();
        let b = simulate(&wn, spec(6, 6), 5).unwrap();
        // V(t) = eps(t - (1,0))
        for t2 in 1..=6 {
            for t1 in 2..=6 {
                assert_eq!(a.get(t1, t2), b.get(t1 - 1, t2));
            }
        }
    }

    #[test]
    fn volterra_matches_direct_products() {
        let g = InnovationSpec::gaussian(1.0);
        let v = FieldModel::volterra2(&[([0, 0], [1, 0], 0.5), ([0, 1], [1, 1], -0.25)], g);
        let wn = simulate(&FieldModel::white_noise(g), spec(8, 8), 21).unwrap();
        let out = simulate(&v, spec(8, 8), 21).unwrap();
        for t2 in 3..=8 {
            for t1 in 3..=8 {
                let e = |a: usize, b: usize| wn.get(a, b);
                let want = 0.5 * e(t1, t2) * e(t1 - 1, t2) - 0.25 * e(t1, t2 - 1) * e(t1 - 1, t2 - 1);
                assert!((out.get(t1, t2) - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn ar_solution_satisfies_recursion() {
        let g = InnovationSpec::gaussian(1.0);
        let m = FieldModel::nonlinear_ar(ArUpdate::Tanh, &[([1, 0], 0.3), ([0, 1], 0.3)], g);
        let v = simulate(&m, spec(10, 10), 1).unwrap();
        let wn = simulate(&FieldModel::white_noise(g), spec(10, 10), 1).unwrap();
        for t2 in 2..=10 {
            for t1 in 2..=10 {
                let want = 0.3 * v.get(t1 - 1, t2).tanh() + 0.3 * v.get(t1, t2 - 1).tanh() + wn.get(t1, t2);
                assert!((v.get(t1, t2) - want).abs() < 1e-9);
            }
        }
    }

    /// Oracle: stationary variance of a row-wise AR(1) is 1 / (1 - 0.16).
    #[test]
    fn ar1_variance_matches_closed_form() {
        let m = FieldModel::nonlinear_ar(ArUpdate::Affine, &[([1, 0], 0.4)], InnovationSpec::gaussian(1.0));
        let s = spec(6, 6);
        let reps = 2000;
        let vals: Vec<f64> = (0..reps)
            .map(|r| simulate(&m, s, split_seed(99, r)).unwrap().get(3, 3))
            .collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
        let want = 1.0 / (1.0 - 0.16);
        assert!((var / want - 1.0).abs() < 0.1, "{var} vs {want}");
    }

    #[test]
    fn origin_coupling_is_local_for_identity_filter() {
        let m = FieldModel::linear_ma(&[([0, 0], 1.0)], InnovationSpec::gaussian(1.0));
        let s = spec(7, 6);
        let pair = coupled_simulate(&m, s, 5, CouplingMode::ReplaceOrigin).unwrap();
        let primary = simulate(&m, s, 5).unwrap();
        assert_eq!(pair.primary, primary);
        let o = s.offset(pair.origin.0 as usize, pair.origin.1 as usize);
        for (k, (a, b)) in pair.primary.values().iter().zip(pair.coupled.values()).enumerate() {
            if k == o {
                assert_ne!(a, b);
            } else {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn far_coupling_keeps_near_innovations() {
        let s = spec(9, 9);
        let pair = coupled_simulate(&white(), s, 8, CouplingMode::ReplaceFar).unwrap();
        let (o1, o2) = pair.origin;
        for t in s.indices() {
            let r = (t.j1 as i64 - o1).abs().max((t.j2 as i64 - o2).abs());
            let same = pair.primary.get(t.j1, t.j2) == pair.coupled.get(t.j1, t.j2);
            // eps_t itself sits at s = 0, kept whenever ||j|| > 0
            assert_eq!(same, r > 0, "t={t:?}");
        }
    }

    #[test]
    fn far_coupling_ar_small_lattice() {
        let m = FieldModel::nonlinear_ar(ArUpdate::Affine, &[([1, 0], 0.3)], InnovationSpec::gaussian(1.0));
        let s = spec(5, 5);
        let pair = coupled_simulate(&m, s, 4, CouplingMode::ReplaceFar).unwrap();
        let (o1, o2) = pair.origin;
        assert_ne!(
            pair.primary.get(o1 as usize, o2 as usize),
            pair.coupled.get(o1 as usize, o2 as usize)
        );
        // far sites differ only through tiny contraction tails
        let far = (pair.primary.get(5, 3) - pair.coupled.get(5, 3)).abs();
        assert!(far < 0.5, "{far}");
    }

    #[test]
    fn gmc_identity_and_white_noise() {
        let s = spec(16, 16);
        let ident = FieldModel::linear_ma(&[([0, 0], 1.0)], InnovationSpec::gaussian(1.0));
        let est = gmc_decay_estimate(&ident, s, &[1, 2, 3], 50, 2.0, 1).unwrap();
        assert!(est.iter().all(|&v| v == 0.0));

        let est = gmc_decay_estimate(&white(), s, &[0], 4000, 2.0, 2).unwrap();
        assert!((est[0] - 2.0).abs() < 0.15, "{}", est[0]);
        assert!(gmc_decay_estimate(&white(), s, &[20], 10, 2.0, 2).is_err());
        assert!(gmc_decay_estimate(&white(), s, &[1], 10, 0.0, 2).is_err());
    }

    /// Exact second moment: 2 sigma^2 sum_{||s|| >= r} a_s^2.
    #[test]
    fn gmc_matches_coefficient_tails() {
        let m = FieldModel::geometric_ma(0.5, 4, InnovationSpec::gaussian(1.0));
        let s = spec(24, 24);
        let radii = [1, 2, 3, 4];
        let est = gmc_decay_estimate(&m, s, &radii, 3000, 2.0, 17).unwrap();
        for (k, &r) in radii.iter().enumerate() {
            let tail: f64 = (r..=4).map(|n| 8.0 * n as f64 * 0.25f64.powi(n as i32)).sum();
            let want = 2.0 * tail;
            assert!((est[k] / want - 1.0).abs() < 0.12, "r={r}: {} vs {want}", est[k]);
        }
    }

    #[test]
    fn origin_coupling_decays_geometrically() {
        let m = FieldModel::geometric_ma(0.5, 4, InnovationSpec::gaussian(1.0));
        let s = spec(15, 15);
        let reps = 500;
        let mut sq = [0.0f64; 4];
        for r in 0..reps {
            let pair = coupled_simulate(&m, s, split_seed(3, r), CouplingMode::ReplaceOrigin).unwrap();
            let (o1, o2) = pair.origin;
            for (k, acc) in sq.iter_mut().enumerate() {
                let t1 = (o1 + k as i64 + 1) as usize;
                let d = pair.primary.get(t1, o2 as usize) - pair.coupled.get(t1, o2 as usize);
                *acc += d * d;
            }
        }
        for (k, acc) in sq.iter().enumerate() {
            let l2 = (acc / reps as f64).sqrt();
            let want = 0.5f64.powi(k as i32 + 1) * 2f64.sqrt();
            assert!(l2 / want < 2.0 && l2 / want > 0.5, "||j||={}: {l2} vs {want}", k + 1);
        }
    }
}
