//! Runs every acceptance criterion and prints one PASS/FAIL line for each.
//!
//! Lines go to the stderr handle directly so they show without `--nocapture`.

use std::io::Write;

use curveflow::suite::{criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, CriterionReport, Status, SuiteConfig};

fn report(r: &CriterionReport) -> bool {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", r.summary_line());
    for c in r.checks.iter().filter(|c| c.status != Status::Pass) {
        let _ = writeln!(err, "    {}: {}", c.name, c.detail);
    }
    r.status == Status::Pass
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let _ = writeln!(std::io::stderr());
    let results = [
        report(&criterion1(&cfg)),
        report(&criterion2(&cfg)),
        report(&criterion3(&cfg)),
        report(&criterion4(&cfg)),
        report(&criterion5()),
        report(&criterion6()),
    ];
    assert!(results.iter().all(|ok| *ok), "acceptance criteria failed");
}
