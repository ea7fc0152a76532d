//! A stationary field plus a quadratic surface, detrended by least squares.
//! Compares the spectral statistics of the residual field with those of the
//! field that generated it.

use latticespec::estimators::{detrend_least_squares, estimated_field_report, DEFAULT_Q};
use latticespec::fields::{simulate, FieldModel, InnovationSpec};
use latticespec::harness::TrendConfig;
use latticespec::kernels::{build_weights, KernelFamily, KernelSpec};
use latticespec::lattice::LatticeSpec;

fn main() -> latticespec::Result<()> {
    let model = FieldModel::linear_ma(&[([0, 0], 1.0), ([0, 1], -0.4)], InnovationSpec::gaussian(1.0));
    let trend = TrendConfig::default();
    for d in [32, 64, 128] {
        let spec = LatticeSpec::new(d, d)?;
        let v = simulate(&model, spec, 9)?;
        let y = v.add(&trend.surface(spec))?;
        let fit = detrend_least_squares(&y, trend.degree)?.with_truth(&v)?;
        let k = KernelSpec::new(KernelFamily::Gaussian, 0.5, 0.5)?;
        let w = build_weights(spec, &k)?;
        let rep = estimated_field_report(&v, &fit.v_hat, &k, &w, &|l| model.theoretical_spectrum(l).unwrap(), DEFAULT_Q)?;
        println!("{spec}");
        for (name, value) in rep.entries() {
            println!("  {name:<18} {value:.3e}");
        }
    }
    Ok(())
}
