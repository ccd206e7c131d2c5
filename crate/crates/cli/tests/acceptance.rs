use enriques_tools::checks::run_check;
use enriques_tools::{Context, Status};
use std::io::Write;
use std::time::{Duration, Instant};

/// Check id and runtime budget per criterion.
const CRITERIA: [(&str, u64); 13] = [
    ("ac01", 1),
    ("ac02", 5),
    ("ac03", 5),
    ("ac04", 5),
    ("ac05", 10),
    ("ac06", 30),
    ("ac07", 120),
    ("ac08", 60),
    ("ac09", 60),
    ("ac10", 1),
    ("ac11", 1),
    ("ac12", 120),
    ("ac13", 60),
];

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    let mut err = std::io::stderr().lock();
    for (n, (id, budget)) in CRITERIA.iter().enumerate() {
        // fresh inputs so each criterion pays for everything it uses
        let ctx = Context::new();
        let t = Instant::now();
        let r = run_check(id, &ctx).expect("criterion has a check");
        let dt = t.elapsed();
        let in_time = dt < Duration::from_secs(*budget);
        let pass = r.status == Status::Pass && in_time;
        writeln!(
            err,
            "criterion {}: {} ({:.3} s, budget {} s){}",
            n + 1,
            if pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            budget,
            if r.status == Status::Fail { format!(" witness: {}", r.witness) } else { String::new() }
        )
        .unwrap();
        if !pass {
            failed.push(n + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
