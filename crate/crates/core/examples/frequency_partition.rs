//! The split of Fourier indices into N, its mirror image and the mean points,
//! drawn as a character grid for each parity case.
//!
//! cargo run --example frequency_partition [-- d1 d2]

use latticespec::lattice::LatticeSpec;

fn draw(spec: LatticeSpec) {
    let p = spec.partition();
    let mut cells = vec!['.'; spec.size()];
    for j in &p.n_set {
        cells[spec.offset(j.j1, j.j2)] = 'N';
    }
    for j in &p.n_tilde_set {
        cells[spec.offset(j.j1, j.j2)] = 'n';
    }
    for j in &p.m_set {
        cells[spec.offset(j.j1, j.j2)] = 'M';
    }
    println!(
        "{spec} ({:?}): |N| = {}, |M| = {}, 2|N| + |M| = {}",
        p.parity,
        p.n_set.len(),
        p.m_set.len(),
        2 * p.n_set.len() + p.m_set.len()
    );
    // j2 grows upwards, j1 to the right
    for j2 in (1..=spec.d2()).rev() {
        let row: String = (1..=spec.d1()).map(|j1| cells[spec.offset(j1, j2)]).collect();
        println!("  {j2:>3} {row}");
    }
    println!();
}

fn main() -> latticespec::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if let [d1, d2] = args[..] {
        draw(LatticeSpec::new(d1, d2)?);
        return Ok(());
    }
    for (d1, d2) in [(5, 5), (5, 6), (6, 5), (6, 6)] {
        draw(LatticeSpec::new(d1, d2)?);
    }
    Ok(())
}
