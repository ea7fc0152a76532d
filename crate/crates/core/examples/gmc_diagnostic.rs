//! Coupling diagnostic: how far a field moves when innovations beyond radius
//! r are redrawn, for a geometric moving average and a nonlinear
//! autoregression.

use latticespec::fields::{gmc_decay_estimate, ArUpdate, FieldModel, InnovationSpec};
use latticespec::harness::log_slope;
use latticespec::lattice::LatticeSpec;

fn main() -> latticespec::Result<()> {
    let g = InnovationSpec::gaussian(1.0);
    let radii = [1, 2, 3, 4];
    let cases = [
        ("geometric ma 0.5", FieldModel::geometric_ma(0.5, 4, g), 16, 300),
        ("tanh ar", FieldModel::nonlinear_ar(ArUpdate::Tanh, &[([1, 0], 0.3), ([0, 1], 0.3)], g), 10, 20),
    ];
    for (name, model, d, reps) in cases {
        let spec = LatticeSpec::new(d, d)?;
        let decay = gmc_decay_estimate(&model, spec, &radii, reps, 2.0, 77)?;
        let x: Vec<f64> = radii.iter().map(|&r| r as f64).collect();
        println!("{name} on {spec}, {reps} reps");
        for (r, e) in radii.iter().zip(&decay) {
            println!("  r = {r}  E|V - V'|^2 = {e:.3e}");
        }
        println!("  log-decay slope {:.3}", log_slope(&x, &decay));
    }
    Ok(())
}
