//! The full acceptance suite, one line per criterion. Same code path as
//! `dplab verify`, with the default seed. Runs without the libtest harness so
//! the lines show up in plain `cargo test` output.

use std::process::ExitCode;
use std::time::Instant;

use dplab::verify::{line, run_criterion};
use dplab_core::rng::DEFAULT_SEED;

fn main() -> ExitCode {
    println!("acceptance suite");
    let mut failed = Vec::new();
    for id in 1..=8u8 {
        let start = Instant::now();
        let outcome = run_criterion(id, DEFAULT_SEED, 0.0);
        println!("{}", line(&outcome, start.elapsed().as_secs_f64()));
        for n in &outcome.notes {
            println!("    note: {n}");
        }
        for c in outcome.checks.iter().filter(|c| !c.passed) {
            println!("    failed: {} = {:e} (lo {:?}, hi {:?})", c.what, c.value, c.lo, c.hi);
        }
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: 8/8 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
