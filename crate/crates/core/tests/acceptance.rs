//! End-to-end acceptance run: each check is one suite invocation with fixed
//! seeds, and prints a single pass/fail line.

use std::time::Instant;

use bergman_core::experiment::{run_suite, write_csv, ExperimentConfig, SuiteReport};

const CHECKS: [(&str, &str); 15] = [
    ("standard-weight kernel identity", "kernel-standard"),
    ("Lebesgue-nu kernel identity", "kernel-lebesgue"),
    ("example-3 coefficients", "kernel-example3"),
    ("complete monotonicity", "monotone"),
    ("Stieltjes lower bound", "stieltjes"),
    ("kernel difference bound", "pointwise"),
    ("tail-Stieltjes comparability", "tail-stieltjes"),
    ("dyadic containment", "containment"),
    ("kernel comparability", "comparability"),
    ("dyadic maximal weak (1,1)", "maximal"),
    ("Calderon-Zygmund decomposition", "czd"),
    ("stopping squares", "stopping"),
    ("two-weight testing", "twoweight"),
    ("one-weight norm", "oneweight"),
    ("weak (1,1) for the projection", "weak11"),
];

fn config(suite: &str) -> ExperimentConfig {
    ExperimentConfig {
        suite: suite.to_string(),
        seed: 20240611,
        timestamp: false,
        ..ExperimentConfig::default()
    }
}

fn describe(report: &SuiteReport) -> String {
    report
        .failures()
        .map(|r| format!("{} / {} = {:e} (bound {:?})", r.case, r.quantity, r.value, r.bound))
        .collect::<Vec<_>>()
        .join("; ")
}

// Runs without the libtest harness so the criterion lines are never captured.
fn main() {
    let mut failed = Vec::new();
    let mut csvs = Vec::new();
    for (k, (name, suite)) in CHECKS.iter().enumerate() {
        let start = Instant::now();
        let report = run_suite(&config(suite)).unwrap_or_else(|e| panic!("{suite}: {e}"));
        let secs = start.elapsed().as_secs_f64();
        let ok = report.passed() && secs < 60.0;
        println!(
            "criterion {:>2} [{}] {name} (suite {suite}, {secs:.1}s){}",
            k + 1,
            if ok { "PASS" } else { "FAIL" },
            if ok { String::new() } else { format!(": {}", describe(&report)) }
        );
        if !ok {
            failed.push(k + 1);
        }
        csvs.push(write_csv(&report, false).unwrap());
    }

    // Reruns must reproduce the CSV byte for byte.
    let mut mismatched = Vec::new();
    for ((_, suite), first) in CHECKS.iter().zip(&csvs) {
        let again = write_csv(&run_suite(&config(suite)).unwrap(), false).unwrap();
        if &again != first {
            mismatched.push(*suite);
        }
    }
    let ok = mismatched.is_empty();
    println!(
        "criterion 16 [{}] determinism of every suite{}",
        if ok { "PASS" } else { "FAIL" },
        if ok { String::new() } else { format!(": {mismatched:?}") }
    );
    if !ok {
        failed.push(16);
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
