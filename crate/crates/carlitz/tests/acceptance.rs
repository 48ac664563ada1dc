//! The thirteen acceptance criteria at the default scale: q = 2, M = 40,
//! N = 8. Prints one PASS/FAIL line per criterion and fails if any does.

use std::time::Instant;

use carlitz::verify::{run_suite, CheckRecord, Suite};
use carlitz::RunConfig;

const CRITERIA: [(&str, &[Suite]); 13] = [
    ("Carlitz exponential fixed by d", &[Suite::Exponential]),
    ("commutation relations", &[Suite::Commutation]),
    ("eigenstructure of the Carlitz basis", &[Suite::Eigenstructure]),
    ("coefficient recovery", &[Suite::Recovery]),
    ("integral table", &[Suite::Integrals]),
    ("regular solver", &[Suite::Regular]),
    ("power function", &[Suite::Power]),
    ("regular-singular solver", &[Suite::RegularSingular]),
    ("hypergeometric equation and contiguity", &[Suite::Hypergeometric]),
    ("l_1 branches and zeta identities", &[Suite::ZetaIdentities]),
    ("umbral calculus", &[Suite::Umbral]),
    ("Weyl-Carlitz ring", &[Suite::Weyl]),
    ("arithmetic kernel", &[Suite::Arithmetic]),
];

fn run(suites: &[Suite], cfg: &RunConfig) -> Result<Vec<CheckRecord>, String> {
    let mut out = Vec::new();
    for s in suites {
        out.extend(run_suite(*s, cfg).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

#[test]
fn acceptance() {
    let cfg = RunConfig::default();
    assert_eq!((cfg.p, cfg.prec, cfg.t_order), (2, 40, 8));
    let mut failed = Vec::new();
    for (i, (name, suites)) in CRITERIA.iter().enumerate() {
        let start = Instant::now();
        let outcome = run(suites, &cfg);
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(records) if !records.is_empty() && records.iter().all(|r| r.passed) => {
                println!("criterion {:>2} PASS {name} ({} checks, {secs:.1}s)", i + 1, records.len());
            }
            Ok(records) => {
                let bad: Vec<String> = records
                    .iter()
                    .filter(|r| !r.passed)
                    .map(|r| format!("{} min {} floor {}", r.check, r.min_valuation, r.floor))
                    .collect();
                println!("criterion {:>2} FAIL {name}: {}", i + 1, bad.join("; "));
                failed.push(i + 1);
            }
            Err(e) => {
                println!("criterion {:>2} FAIL {name}: {e}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn records_meet_their_floors() {
    // each passing record with a numeric floor reports a residual above it
    let cfg = RunConfig::default();
    for s in [Suite::Integrals, Suite::ZetaIdentities] {
        for r in run_suite(s, &cfg).unwrap() {
            assert!(r.passed, "{}/{}", r.suite, r.check);
            if let Some(f) = r.floor.strip_prefix(">= ") {
                let floor: i64 = f.split_whitespace().next().unwrap().parse().unwrap();
                if r.min_valuation != "inf" {
                    let v: f64 = match r.min_valuation.split_once('/') {
                        Some((a, b)) => a.parse::<f64>().unwrap() / b.parse::<f64>().unwrap(),
                        None => r.min_valuation.parse().unwrap(),
                    };
                    assert!(v >= floor as f64, "{}/{}", r.suite, r.check);
                }
            }
        }
    }
}
