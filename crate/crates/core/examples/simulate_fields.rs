//! Simulates each shipped model family and compares sample moments with the
//! model's autocovariance where it has one.

use latticespec::fields::{simulate, ArUpdate, FieldModel, InnovationSpec};
use latticespec::lattice::LatticeSpec;
use latticespec::spectra::{sample_autocovariance, MeanMode};

fn main() -> latticespec::Result<()> {
    let spec = LatticeSpec::new(128, 128)?;
    let g = InnovationSpec::gaussian(1.0);
    let models = [
        FieldModel::white_noise(g),
        FieldModel::linear_ma(&[([0, 0], 1.0), ([1, 0], 0.5)], g),
        FieldModel::geometric_ma(0.5, 3, g).with_mean(2.0),
        FieldModel::volterra2(&[([0, 0], [1, 0], 0.8), ([0, 1], [1, 1], -0.4)], g),
        FieldModel::nonlinear_ar(ArUpdate::Tanh, &[([1, 0], 0.3), ([0, 1], 0.3)], g),
    ];
    println!("{:<14} {:>9} {:>9} {:>10} {:>10}", "model", "mean", "var", "R(1,0)", "gamma(1,0)");
    for (k, m) in models.iter().enumerate() {
        let v = simulate(m, spec, 100 + k as u64)?;
        let r = sample_autocovariance(&v, MeanMode::Estimated);
        let theory = m
            .theoretical_autocovariance((1, 0))
            .map(|g| format!("{g:>10.4}"))
            .unwrap_or_else(|_| format!("{:>10}", "-"));
        println!(
            "{:<14} {:>9.4} {:>9.4} {:>10.4} {theory}",
            m.kind_name(),
            v.mean(),
            v.variance(),
            r.get(1, 0)?
        );
    }
    Ok(())
}
