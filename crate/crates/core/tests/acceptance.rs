//! One PASS/FAIL line per acceptance criterion.
//!
//! Criteria listed in `KNOWN_RED` print their real result but do not fail the
//! target; see the decisions ledger for the measured shortfall. Any other
//! failing criterion, or a known-red one that starts passing, fails the run.

use std::path::PathBuf;
use std::process::ExitCode;

use qepot::acceptance::{run, Options};

const KNOWN_RED: [usize; 2] = [4, 5];

fn main() -> ExitCode {
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let pins = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/fig2_exact.json");
    let outcomes = run(&only, &Options { pins: Some(pins) });
    let mut unexpected = Vec::new();
    for o in &outcomes {
        println!("{o}");
        if o.passed == KNOWN_RED.contains(&o.id) {
            unexpected.push(o.id);
        }
    }
    let red: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id.to_string())
        .collect();
    println!(
        "\n{} of {} criteria pass; red: [{}]",
        outcomes.len() - red.len(),
        outcomes.len(),
        red.join(", ")
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected outcome for criteria {unexpected:?} (known red: {KNOWN_RED:?})");
        ExitCode::FAILURE
    }
}
