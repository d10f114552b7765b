//! Runs the nine acceptance criteria and prints one line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use borcherds_core::battery::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let t = Instant::now();
        let r = run_criterion(id);
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {:<30} {status} [{:.1}s] {}", r.id, r.name, t.elapsed().as_secs_f64(), r.detail);
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", CRITERIA.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
