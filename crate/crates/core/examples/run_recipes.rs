//! Runs the checked-in recipes and prints one verdict per criterion.
//!
//! cargo run --release --example run_recipes [-- <recipes dir> [name ...]]

use std::path::PathBuf;

use latticespec::recipes::{load_dir, run_recipes};

fn main() -> latticespec::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../recipes"));
    let only: Vec<String> = args.collect();
    let recipes: Vec<_> = load_dir(&dir)?
        .into_iter()
        .map(|(_, r)| r)
        .filter(|r| only.is_empty() || only.contains(&r.name))
        .collect();
    let outcomes = run_recipes(&recipes)?;
    for o in &outcomes {
        println!("{}", o.summary());
    }
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("{} of {} criteria pass", outcomes.len() - failed, outcomes.len());
    Ok(())
}
