use std::process::Command;

use checkers_cli::{run, Status};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_checkers"))
}

fn ok(args: &[&str]) -> Value {
    let argv = std::iter::once("checkers").chain(args.iter().copied());
    let r = run(argv);
    assert_eq!(r.status, Status::Ok, "{args:?}: {}", r.payload);
    r.payload
}

#[test]
fn bounds_report() {
    let v = ok(&["bounds", "--m", "3", "--k", "2", "--d", "2"]);
    assert_eq!(v["lower"], 6);
    assert_eq!(v["upper"], 7);
    assert_eq!(v["achieved"], 6);
    assert_eq!(v["bound_element"]["coeffs"], serde_json::json!(["6", "9"]));
    assert_eq!(v["bound_element"]["exact"], false);
}

#[test]
fn construct_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for k in 2..=4usize {
        for m in 1..=6u64 {
            let top = checkers_core::bounds::max_row_1d(m, k).unwrap();
            for n in 1..=top {
                let path = dir.path().join(format!("t-{k}-{m}-{n}.jsonl"));
                let p = path.to_str().unwrap();
                let (ms, ks, ns) = (m.to_string(), k.to_string(), n.to_string());
                ok(&["construct", "--m", &ms, "--k", &ks, "--n", &ns, "--out", p]);
                let v = ok(&["verify", "--trace", p, "--energy-check"]);
                assert_eq!(v["passed"], true, "k={k} m={m} n={n}");
            }
        }
    }
}

#[test]
fn construct_above_max_row_is_refused() {
    let r = run(["checkers", "construct", "--m", "3", "--k", "2", "--n", "5"]);
    assert_eq!(r.status, Status::VerificationFailed);
    assert_eq!(r.payload["feasible"], false);
}

#[test]
fn amass_in_two_dimensions_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.jsonl");
    let p = path.to_str().unwrap();
    let v = ok(&["amass", "--m", "2", "--k", "2", "--d", "2", "--out", p]);
    assert!(v["count"].as_u64().unwrap() <= v["energy_cap"].as_u64().unwrap());
    assert_eq!(ok(&["verify", "--trace", p])["passed"], true);
}

#[test]
fn scan_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scan.csv");
    ok(&["scan", "--k", "2", "--d", "2", "--m-from", "2", "--m-to", "50", "--out", path.to_str().unwrap()]);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("m,upper,achieved\n"));
    assert!(!text.contains('\r'));
    // one row per m where the construction stops short of the upper bound
    let rows: Vec<Vec<u64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.iter().all(|f| f[2] < f[1]));
    let gaps: Vec<u64> = rows.iter().map(|f| f[0]).collect();
    for m in [3, 7, 18, 47] {
        assert!(gaps.contains(&m), "{m} missing from {gaps:?}");
    }
    assert!(!gaps.contains(&4));
}

#[test]
fn energy_at_row_five_is_exactly_one() {
    let v = ok(&["energy", "--m", "1", "--k", "2", "--d", "2", "--row", "5"]);
    assert_eq!(v["energy"]["coeffs"], serde_json::json!(["1", "0"]));
    assert_eq!(v["energy"]["exact"], true);
    assert_eq!(v["verdict"], "unreachable_infinite");
}

#[test]
fn oracle_sequence_constant() {
    let v = ok(&["oracle", "--m", "2", "--k", "2", "--depth", "6"]);
    assert_eq!(v["value"], 3);
    assert_eq!(v["exhausted"], true);
    let v = ok(&["oracle", "--m", "2", "--k", "2", "--depth", "6", "--objective", "count", "--at", "1"]);
    assert_eq!(v["value"], 3);
    let v = ok(&["sequence", "--kind", "knacci", "--k", "4", "--count", "10"]);
    assert_eq!(v["terms"], serde_json::json!(["0", "0", "0", "1", "1", "2", "4", "8", "15", "29"]));
    let v = ok(&["sequence", "--kind", "lucas", "--count", "5"]);
    assert_eq!(v["terms"], serde_json::json!(["2", "1", "3", "4", "7"]));
    let v = ok(&["constant", "--k", "3", "--digits", "15"]);
    assert_eq!(v["decimal"], "1.839286755214161");
}

#[test]
fn invalid_input() {
    for args in [
        vec!["checkers", "bounds", "--m", "0"],
        vec!["checkers", "bounds", "--m", "2", "--wat"],
        vec!["checkers", "frobnicate"],
        vec!["checkers", "verify", "--trace", "/nonexistent/trace.jsonl"],
        vec!["checkers", "scan", "--m-from", "9", "--m-to", "3"],
    ] {
        assert_eq!(run(args.clone()).status, Status::InvalidInput, "{args:?}");
    }
}

#[test]
fn exit_codes_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.jsonl");
    let out = bin().args(["construct", "--m", "2", "--k", "3"]).output().unwrap();
    assert!(out.status.success());
    std::fs::write(&good, &out.stdout).unwrap();
    let again = bin().args(["construct", "--m", "2", "--k", "3"]).output().unwrap();
    assert_eq!(out.stdout, again.stdout);

    let verify = bin().args(["verify", "--energy-check", "--trace"]).arg(&good).output().unwrap();
    assert_eq!(verify.status.code(), Some(0));

    let text = String::from_utf8(out.stdout).unwrap();
    let lying = text.replace("{\"claim\":{\"row\":", "{\"claim\":{\"row\":1");
    let lying_path = dir.path().join("lying.jsonl");
    std::fs::write(&lying_path, lying).unwrap();
    let failed = bin().args(["verify", "--trace"]).arg(&lying_path).output().unwrap();
    assert_eq!(failed.status.code(), Some(1));

    let broken_path = dir.path().join("broken.jsonl");
    std::fs::write(&broken_path, "{\"version\":1}\n").unwrap();
    let broken = bin().args(["verify", "--trace"]).arg(&broken_path).output().unwrap();
    assert_eq!(broken.status.code(), Some(2));

    let a = bin().args(["bounds", "--m", "5", "--k", "3", "--d", "3"]).output().unwrap();
    let b = bin().args(["bounds", "--m", "5", "--k", "3", "--d", "3"]).output().unwrap();
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn illegal_trace_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("illegal.jsonl");
    std::fs::write(
        &path,
        "{\"version\":1,\"m\":1,\"k\":2,\"d\":1,\"background\":\"halfspace\"}\n{\"from\":[0],\"axis\":0,\"sign\":1}\n",
    )
    .unwrap();
    let r = run(["checkers", "verify", "--trace", path.to_str().unwrap()]);
    assert_eq!(r.status, Status::VerificationFailed);
}
