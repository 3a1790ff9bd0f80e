//! Acceptance run: every criterion at its stated tolerance and runtime limit,
//! one PASS/FAIL line each. Criteria run one after another so their timings
//! do not compete for cores.

use std::process::Command;
use std::time::{Duration, Instant};

use tracelab_cli::verify::{run_criterion, CRITERIA};

const SEED: u64 = 7;

fn runtime_limit(id: u32) -> Option<Duration> {
    let secs = match id {
        1 => 10,
        2 => 1,
        3 => 30,
        4 => 60,
        6 => 20,
        8 => 120,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

fn verify_bytes() -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_tracelab"))
        .args(["verify", "--seed", "7"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "verify exited with {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (id, name) in CRITERIA {
        let t0 = Instant::now();
        let result = run_criterion(id, SEED);
        let elapsed = t0.elapsed();
        let (ok, detail) = match &result {
            Ok(c) => {
                let bad: Vec<String> = c
                    .checks
                    .iter()
                    .filter(|k| !k.pass)
                    .map(|k| format!("{} = {} vs {}", k.name, k.value, k.limit))
                    .collect();
                (c.pass, bad.join("; "))
            }
            Err(e) => (false, format!("error: {e:#}")),
        };
        let in_time = runtime_limit(id).is_none_or(|lim| elapsed < lim);
        let limit = runtime_limit(id).map_or(String::new(), |l| format!(" (limit {}s)", l.as_secs()));
        let pass = ok && in_time;
        println!(
            "criterion {id:>2} {name:<14} {} in {:.2}s{limit}{}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if detail.is_empty() { String::new() } else { format!(" [{detail}]") }
        );
        if !pass {
            failed.push(id);
        }
    }

    let (a, b) = (verify_bytes(), verify_bytes());
    let same = a == b && !a.is_empty();
    println!("criterion 11 determinism     {}", if same { "PASS" } else { "FAIL" });
    if !same {
        failed.push(11);
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
