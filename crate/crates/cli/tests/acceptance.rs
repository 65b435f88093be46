//! Runs every acceptance criterion at its stated tolerance and prints one
//! pass/fail line per criterion.

use std::process::{Command, ExitCode};
use std::time::Instant;

use wavekit::checks::{run_criterion, CRITERIA};

fn selfcheck_end_to_end() -> (bool, String) {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_wavekit")).arg("selfcheck").output();
    let secs = start.elapsed().as_secs_f64();
    match out {
        Ok(o) => {
            let ok = o.status.success() && secs <= 300.0;
            (ok, format!("exit status {:?}, {secs:.2} s (limit 300 s)", o.status.code()))
        }
        Err(e) => (false, format!("could not launch wavekit: {e}")),
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let report = run_criterion(id);
        println!("{}", report.summary_line());
        if !report.passed() {
            failed += 1;
        }
    }
    let (ok, detail) = selfcheck_end_to_end();
    println!(
        "criterion 10 [{}] selfcheck end to end ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    if !ok {
        failed += 1;
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
