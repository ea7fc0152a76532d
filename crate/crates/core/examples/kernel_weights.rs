//! Smoothing weights and regularity probes for the three kernel families.

use latticespec::kernels::{build_weights, validate_kernel, KernelFamily, KernelSpec};
use latticespec::lattice::LatticeSpec;

fn main() -> latticespec::Result<()> {
    let spec = LatticeSpec::new(64, 64)?;
    for family in KernelFamily::ALL {
        let k = KernelSpec::new(family, 0.4, 0.4)?;
        let w = build_weights(spec, &k)?;
        let (r1, r2) = w.radius();
        let shown = r1.min(4);
        let row: Vec<String> = (-shown..=shown).map(|s| format!("{:.4}", w.weight(s, 0))).collect();
        println!("{} h = 0.4 on {spec}: radius ({r1}, {r2})", family.name());
        println!("  p(s, 0) for |s| <= {shown}: [{}]", row.join(", "));
        let rep = validate_kernel(&k, spec);
        println!(
            "  K1 residual {:.2e}  K2 {:.3}  K3 {:.6}  K5 {:.3}  k mass outside unit square {:.3}",
            rep.k1_residual, rep.k2_sup_scaled, rep.k3_integral, rep.k5_lipschitz_ratio, rep.k4_mass_outside_unit_square
        );
    }
    Ok(())
}
