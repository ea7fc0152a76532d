//! Fourier coefficients of a cosine wave plus noise: the periodogram peaks
//! at the wave's frequency and its mirror, and the mean sits at (d1, d2).

use std::f64::consts::TAU;

use latticespec::fields::{simulate, FieldModel, InnovationSpec};
use latticespec::lattice::LatticeSpec;
use latticespec::spectra::{fourier_coefficients, periodogram};

fn main() -> latticespec::Result<()> {
    let spec = LatticeSpec::new(24, 16)?;
    let noise = simulate(&FieldModel::white_noise(InnovationSpec::gaussian(0.3)), spec, 5)?;
    let (k1, k2) = (3.0, 2.0);
    let wave = noise.add(&latticespec::fields::FieldGrid::from_fn(spec, |t1, t2| {
        4.0 + 2.0 * (TAU * (k1 * t1 as f64 / 24.0 + k2 * t2 as f64 / 16.0)).cos()
    })?)?;

    let table = fourier_coefficients(&wave);
    let pg = periodogram(&table);
    println!("x(d1, d2) = {:.4}, sqrt|T| * mean = {:.4}", table.x(24, 16), (spec.size() as f64).sqrt() * wave.mean());

    let mut ranked: Vec<(f64, usize, usize)> = spec.indices().map(|j| (pg.at(j.j1 as i64, j.j2 as i64), j.j1, j.j2)).collect();
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));
    println!("largest ordinates:");
    for (i, j1, j2) in ranked.iter().take(4) {
        let (l1, l2) = spec.frequency(*j1 as i64, *j2 as i64);
        println!("  j = ({j1:>2}, {j2:>2})  lambda = ({l1:.3}, {l2:.3})  I = {i:.3}");
    }
    Ok(())
}
