//! Acceptance criteria, one PASS/FAIL line each.

use std::io::Write as _;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chernoff_tradeoff::fixtures::example_model;
use chernoff_tradeoff::verify::{run_suite, Suite};

const SEED: u64 = 7;

struct Outcome {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn suite_criterion(
    id: usize,
    name: &'static str,
    suite: Suite,
    trials: usize,
    budget: u64,
) -> Outcome {
    let start = Instant::now();
    let report = run_suite(suite, &example_model(), Some(trials), SEED).expect("suite runs");
    Outcome {
        id,
        name,
        pass: report.passed(),
        detail: format!(
            "checks={} failures={} worst_delta={:.3e} tolerance={:.0e}",
            report.checks, report.failures, report.worst_delta, report.tolerance
        ),
        elapsed: start.elapsed(),
        budget: Duration::from_secs(budget),
    }
}

struct Row {
    lambda: f64,
    s: f64,
    privacy: f64,
    feasible: bool,
}

fn run_tradeoff(csv: &Path) -> Vec<u8> {
    let status = Command::new(env!("CARGO_BIN_EXE_ctrade"))
        .args(["tradeoff", "--s", "1,2", "--lambda-grid", "0:0.16:0.01"])
        .args(["--k", "1", "--correction", "off", "--seed", "11"])
        .arg("--out-csv")
        .arg(csv)
        .status()
        .expect("ctrade runs");
    assert!(status.success(), "tradeoff exited with {status}");
    std::fs::read(csv).expect("csv written")
}

fn rows(bytes: &[u8]) -> Vec<Row> {
    csv::Reader::from_reader(bytes)
        .records()
        .map(|r| {
            let r = r.expect("record");
            Row {
                lambda: r[0].parse().unwrap(),
                s: r[1].parse().unwrap(),
                privacy: r[3].parse().unwrap(),
                feasible: r[5].parse().unwrap(),
            }
        })
        .collect()
}

fn curve_shape(rows: &[Row]) -> (bool, String) {
    const TOL: f64 = 1e-4;
    let curve = |s: f64| -> Vec<&Row> { rows.iter().filter(|r| r.s == s).collect() };
    let (one, two) = (curve(1.0), curve(2.0));
    let all_feasible = rows.iter().all(|r| r.feasible);
    let monotone = [&one, &two]
        .iter()
        .all(|c| c.windows(2).all(|w| w[1].privacy >= w[0].privacy - TOL));
    let ordered = one.len() == two.len()
        && one
            .iter()
            .zip(&two)
            .all(|(a, b)| a.lambda == b.lambda && b.privacy <= a.privacy + TOL);
    let pass = rows.len() == 34 && all_feasible && monotone && ordered;
    (
        pass,
        format!(
            "points={} feasible={all_feasible} monotone={monotone} s2<=s1={ordered}",
            rows.len()
        ),
    )
}

#[test]
fn acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let mut outcomes = vec![
        suite_criterion(1, "two-ordering identity", Suite::OrderingIdentity, 200, 10),
        suite_criterion(2, "primal-dual T agreement", Suite::PrimalDual, 50, 30),
        suite_criterion(
            3,
            "three-way exponent consistency",
            Suite::Exponents,
            20,
            60,
        ),
        suite_criterion(4, "exponent convergence", Suite::Convergence, 1, 20),
        suite_criterion(5, "finite-length lower bound", Suite::FiniteBound, 50, 60),
    ];

    let start = Instant::now();
    let first = run_tradeoff(&dir.path().join("first.csv"));
    let sweep_time = start.elapsed();
    let (pass, detail) = curve_shape(&rows(&first));
    outcomes.push(Outcome {
        id: 6,
        name: "trade-off curves",
        pass,
        detail,
        elapsed: sweep_time,
        budget: Duration::from_secs(120),
    });

    outcomes.push(suite_criterion(
        7,
        "monotonicity in block length",
        Suite::Monotonicity,
        1,
        120,
    ));

    let start = Instant::now();
    let second = run_tradeoff(&dir.path().join("second.csv"));
    outcomes.push(Outcome {
        id: 8,
        name: "deterministic csv",
        pass: first == second,
        detail: format!("{} bytes, identical={}", first.len(), first == second),
        elapsed: start.elapsed(),
        budget: Duration::from_secs(120),
    });

    let mut failed = Vec::new();
    for o in &outcomes {
        let ok = o.pass && o.elapsed <= o.budget;
        // straight to the stream so the lines show without --nocapture
        let _ = writeln!(
            std::io::stderr(),
            "criterion {} {:<32} {}  {}  time={:.2}s budget={}s",
            o.id,
            o.name,
            if ok { "PASS" } else { "FAIL" },
            o.detail,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs()
        );
        if !ok {
            failed.push(o.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
