//! Runs every acceptance criterion and prints one line each. Thresholds and time limits are
//! restated here rather than read from the suite, so a drifting suite cannot pass itself.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use summa_core::suite::{Comparison, CriterionOutcome, SuiteConfig, CRITERIA};

struct Expect {
    id: u32,
    limit: Option<Duration>,
    /// Check name, comparison and threshold.
    checks: &'static [(&'static str, Comparison, f64)],
}

use Comparison::{AtLeast, AtMost, Equal};

const EXPECT: [Expect; 10] = [
    Expect { id: 1, limit: Some(Duration::from_secs(1)), checks: &[("max |frobenius - l2(singular values)|", AtMost, 1e-10)] },
    Expect {
        id: 2,
        limit: Some(Duration::from_secs(10)),
        checks: &[
            ("max |pi_2 upper - sqrt(n)|", AtMost, 1e-4),
            ("max |pi_2 lower - sqrt(n)|", AtMost, 1e-4),
            ("min certificate eigenvalue slack", AtLeast, -1e-8),
            ("max factorization residual", AtMost, 1e-8),
        ],
    },
    Expect {
        id: 3,
        limit: Some(Duration::from_secs(5)),
        checks: &[("max |sign sup - weak l_1| / max(1, sign sup)", AtMost, 1e-10)],
    },
    Expect {
        id: 4,
        limit: None,
        checks: &[
            ("max |Rademacher average of the basis - 1|", Equal, 0.0),
            ("max |basis cotype ratio - sqrt(N)|", AtMost, 1e-9),
        ],
    },
    Expect { id: 5, limit: Some(Duration::from_secs(60)), checks: &[("violations", Equal, 0.0)] },
    Expect {
        id: 6,
        limit: Some(Duration::from_secs(60)),
        checks: &[
            ("|ratio(H_2) - sqrt(2)|", AtMost, 1e-5),
            ("min ratio over random sign matrices", AtLeast, 1.0 - 1e-12),
            ("max ratio over random sign matrices", AtMost, 1.8),
        ],
    },
    Expect { id: 7, limit: Some(Duration::from_secs(30)), checks: &[("max pi_1 lower / norm", AtMost, 1.8)] },
    Expect {
        id: 8,
        limit: None,
        checks: &[("max reconstruction error", AtMost, 1e-10), ("max |weak l_1 - ||tau||_2|", AtMost, 1e-8)],
    },
    Expect {
        id: 9,
        limit: Some(Duration::from_secs(60)),
        checks: &[
            ("growth slope, sigma_n = n^-0.6", AtMost, 0.02),
            ("growth slope, sigma_n = n^-0.4", AtLeast, 0.05),
            ("verdicts disagreeing with partial sums", Equal, 0.0),
        ],
    },
    Expect {
        id: 10,
        limit: None,
        checks: &[
            ("max phs lower - pi_2 upper", AtMost, 1e-8),
            ("min pinch phs lower / pi_2 upper", AtLeast, 0.5),
            ("max relative spread on Hilbert instances", AtMost, 0.05),
        ],
    },
];

fn holds(observed: f64, cmp: Comparison, threshold: f64) -> bool {
    match cmp {
        AtMost => observed <= threshold,
        AtLeast => observed >= threshold,
        Equal => observed == threshold,
    }
}

/// Problems with an outcome, judged against the restated expectations.
fn judge(outcome: &CriterionOutcome, expect: &Expect, elapsed: Duration) -> Vec<String> {
    let mut problems = Vec::new();
    if let Some(e) = &outcome.error {
        problems.push(format!("error: {e}"));
    }
    for &(name, cmp, threshold) in expect.checks {
        match outcome.checks.iter().find(|c| c.name == name) {
            None => problems.push(format!("missing check {name:?}")),
            Some(c) if !holds(c.observed, cmp, threshold) => {
                let op = match cmp {
                    AtMost => "<=",
                    AtLeast => ">=",
                    Equal => "==",
                };
                problems.push(format!("{name}: observed {:e}, need {op} {threshold:e}", c.observed));
            }
            Some(_) => {}
        }
    }
    if let Some(limit) = expect.limit {
        if elapsed > limit {
            problems.push(format!("took {elapsed:.2?}, limit {limit:?}"));
        }
    }
    problems
}

fn determinism() -> Vec<String> {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_summa"))
            .args(["suite", "--seed", "42"])
            .env_remove("SUMMA_SEED")
            .output()
            .expect("the summa binary runs")
    };
    let (a, b) = (run(), run());
    let mut problems = Vec::new();
    if a.stdout.is_empty() {
        problems.push("empty report".into());
    }
    if a.stdout != b.stdout {
        problems.push("reports differ between runs".into());
    }
    if a.status.code() != b.status.code() {
        problems.push(format!("exit codes differ: {:?} vs {:?}", a.status.code(), b.status.code()));
    }
    problems
}

fn line(id: u32, title: &str, elapsed: Duration, problems: &[String]) {
    let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {id:>2} {verdict} [{elapsed:>9.2?}] {title}");
    for p in problems {
        println!("    {p}");
    }
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let mut failures = 0;
    for ((id, title, run), expect) in CRITERIA.iter().zip(&EXPECT) {
        assert_eq!(*id, expect.id);
        let start = Instant::now();
        let outcome = run(&cfg);
        let elapsed = start.elapsed();
        let problems = judge(&outcome, expect, elapsed);
        failures += usize::from(!problems.is_empty());
        line(*id, title, elapsed, &problems);
    }
    let start = Instant::now();
    let problems = determinism();
    failures += usize::from(!problems.is_empty());
    line(11, "suite twice with seed 42 gives byte-identical reports", start.elapsed(), &problems);

    println!("{} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
