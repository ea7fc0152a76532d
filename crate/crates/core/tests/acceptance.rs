//! Runs every recipe under `recipes/` and prints one verdict per acceptance
//! criterion, followed by the individual checks.
//!
//! Criteria 7 and 9 cannot be met at their stated lattice sizes (see the
//! README); they are run and reported as FAIL like any other. This target
//! exits nonzero when the set of failing criteria differs from that list, so
//! a regression or an unexpected pass is noticed either way.

use std::path::PathBuf;
use std::process::ExitCode;

use latticespec::recipes::run_dir;

const KNOWN_FAILING: [u32; 2] = [7, 9];

fn main() -> ExitCode {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../recipes");
    let outcomes = match run_dir(&dir) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance: {e}");
            return ExitCode::FAILURE;
        }
    };

    println!();
    for o in &outcomes {
        let line = o.summary();
        let mut lines = line.lines();
        let head = lines.next().unwrap_or_default();
        let note = if !o.passed() && KNOWN_FAILING.contains(&o.criterion) { "  [known]" } else { "" };
        println!("{head}{note}");
        for l in lines {
            println!("{l}");
        }
    }

    let mut criteria: Vec<u32> = outcomes.iter().map(|o| o.criterion).collect();
    criteria.sort();
    let complete = criteria == (1..=12).collect::<Vec<_>>();
    let failing: Vec<u32> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.criterion).collect();
    let passed = outcomes.len() - failing.len();
    println!("\nacceptance: {passed} of {} criteria pass; failing {failing:?}", outcomes.len());

    if !complete {
        eprintln!("acceptance: expected exactly one recipe per criterion 1..=12, found {criteria:?}");
        return ExitCode::FAILURE;
    }
    if failing != KNOWN_FAILING {
        eprintln!("acceptance: failing set {failing:?} differs from the known set {KNOWN_FAILING:?}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
