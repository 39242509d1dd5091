//! Acceptance criteria 1 to 9, one printed line each. All criteria run even
//! when an earlier one fails; the test fails at the end if any did.

use std::time::{Duration, Instant};

use dualpair::classify::{classification_table, DEFAULT_CLASSIFY_BUDGET};
use dualpair::corresp::{verify_theorem, DEFAULT_BUDGET};
use dualpair_cli::config::build_model;
use dualpair_cli::report::Record;
use dualpair_cli::{bundled, run, suite, Command, BUNDLED, DEFAULT_SAMPLES, JUMP_SAMPLES};

type Criterion = (&'static str, Duration, Box<dyn Fn() -> Outcome>);

struct Outcome {
    passed: bool,
    detail: String,
}

fn all_pass(records: &[Record]) -> Outcome {
    let failed: Vec<&str> = records
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.name.as_str())
        .collect();
    let work: u64 = records.iter().map(|r| r.work).sum();
    Outcome {
        passed: failed.is_empty() && !records.is_empty(),
        detail: if failed.is_empty() {
            match work {
                0 => format!("{} checks", records.len()),
                w => format!("{} checks, {w} evaluations", records.len()),
            }
        } else {
            format!("failed: {}", failed.join("; "))
        },
    }
}

fn classification() -> Outcome {
    let f5 = suite::prime_field(5);
    let t2 = classification_table(2, &f5, DEFAULT_CLASSIFY_BUDGET, 1).expect("rank 2 table");
    let t1 = classification_table(1, &f5, DEFAULT_CLASSIFY_BUDGET, 1).expect("rank 1 table");
    let certified = t2
        .rows
        .iter()
        .filter(|r| r.verdict.is_yes())
        .all(|r| r.certified == Some(true));
    let nested = t1.yes_set().iter().all(|p| t2.yes_set().contains(p));
    let expected: Vec<&str> = t2
        .rows
        .iter()
        .filter(|r| r.expected)
        .map(|r| r.pair.as_str())
        .collect();
    Outcome {
        passed: t2.matches() && t2.exhaustive_nos() && certified && nested && expected.len() == 8,
        detail: format!(
            "yes = {:?}; every no exhaustive: {}; witnesses certified: {certified}",
            t2.yes_set(),
            t2.exhaustive_nos()
        ),
    }
}

/// Every bundled model, three stable instances each, with the named checks
/// required to be present and passing.
fn correspondence(required: &[&str], required_e: &[&str]) -> Outcome {
    let mut failures = Vec::new();
    let (mut instances, mut case_e) = (0, 0);
    for (name, _) in BUNDLED {
        let cfg = bundled(name).unwrap();
        let inst = cfg.instance.clone().unwrap();
        let field = cfg.field_or(3).unwrap();
        let model = build_model(&inst, &field).unwrap();
        let found = model.stable_instances(3, DEFAULT_BUDGET).unwrap();
        if found.len() < 3 {
            failures.push(format!("{name}: {} stable instances", found.len()));
        }
        for (i, ci) in found.iter().enumerate() {
            let rep = verify_theorem(ci, DEFAULT_BUDGET).unwrap();
            instances += 1;
            case_e += rep.case_e as usize;
            let names: &[&str] = if rep.case_e { required_e } else { required };
            for n in names {
                match rep.checks.iter().find(|c| c.name == *n) {
                    Some(c) if c.passed => {}
                    Some(c) => failures.push(format!("{name} #{i} {n}: {}", c.detail)),
                    None => failures.push(format!("{name} #{i} {n}: missing")),
                }
            }
        }
    }
    if case_e == 0 {
        failures.push("no case E instance".into());
    }
    Outcome {
        passed: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "{instances} instances over {} models, {case_e} in case E",
                BUNDLED.len()
            )
        } else {
            failures.join("; ")
        },
    }
}

fn splitting() -> Outcome {
    let mut records: Vec<Record> = suite::random_split_cases(JUMP_SAMPLES, 1)
        .iter()
        .map(suite::splitting_record)
        .collect();
    for (name, _) in BUNDLED {
        let cfg = bundled(name).unwrap();
        let inst = cfg.instance.clone().unwrap();
        if inst.model == "formed" {
            let report = run(Command::Verify, &cfg).unwrap();
            records.extend(
                report
                    .records
                    .into_iter()
                    .filter(|r| r.name.starts_with("splitting")),
            );
        }
    }
    all_pass(&records)
}

fn determinism() -> Outcome {
    let cfg = dualpair_cli::config::RunConfig::default();
    let a = run(Command::Selftest, &cfg).unwrap();
    let b = run(Command::Selftest, &cfg).unwrap();
    let (ja, jb) = (a.to_json(), b.to_json());
    let same = ja == jb && a.to_markdown() == b.to_markdown();
    Outcome {
        passed: same && a.passed(),
        detail: format!(
            "{} bytes of JSON, identical: {same}, selftest verdict {}",
            ja.len(),
            a.summary.verdict
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<Criterion> = vec![
        (
            "1 classification up to rank 2 over F5",
            Duration::from_secs(300),
            Box::new(classification),
        ),
        (
            "2 moment identities and equivariance",
            Duration::from_secs(60),
            Box::new(|| all_pass(&suite::moment_checks(DEFAULT_SAMPLES, 1, false))),
        ),
        (
            "3 fiber equals orbit, free action, case E count",
            Duration::from_secs(180 * BUNDLED.len() as u64),
            Box::new(|| {
                correspondence(
                    &[
                        "preconditions",
                        "stabilizers_prime_to_p",
                        "fiber_equals_orbit",
                        "free_action",
                    ],
                    &[
                        "preconditions",
                        "stabilizers_prime_to_p",
                        "fiber_equals_orbit",
                        "stabilizer_of_w_equals_sbar",
                        "orbit_stabilizer_count",
                    ],
                )
            }),
        ),
        (
            "4 character matching",
            Duration::from_secs(180 * BUNDLED.len() as u64),
            Box::new(|| {
                correspondence(
                    &[
                        "multiplicities_zero_one",
                        "burnside_totals",
                        "support_is_lift_graph",
                        "stabilizer_is_graph",
                    ],
                    &[
                        "multiplicities_zero_one",
                        "burnside_totals",
                        "support_is_lift_graph",
                        "lift_count_is_index",
                    ],
                )
            }),
        ),
        (
            "5 jump-set laws",
            Duration::MAX,
            Box::new(|| all_pass(&suite::jump_checks(JUMP_SAMPLES, 1))),
        ),
        (
            "6 first-order oscillator identity",
            Duration::MAX,
            Box::new(|| all_pass(&suite::oscillator_checks(DEFAULT_SAMPLES, 1))),
        ),
        (
            "7 P-oracle agreement",
            Duration::MAX,
            Box::new(|| all_pass(&suite::p_oracle_checks(DEFAULT_SAMPLES, 1))),
        ),
        ("8 splitting dimensions", Duration::MAX, Box::new(splitting)),
        (
            "9 selftest determinism",
            Duration::MAX,
            Box::new(determinism),
        ),
    ];
    let mut failed = Vec::new();
    for (name, limit, check) in &criteria {
        let start = Instant::now();
        let out = check();
        let took = start.elapsed();
        let ok = out.passed && took <= *limit;
        let limit_note = if *limit == Duration::MAX {
            String::new()
        } else {
            format!(" (limit {}s)", limit.as_secs())
        };
        println!(
            "{} criterion {name}: {} [{:.1}s{limit_note}]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
        if !ok {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
