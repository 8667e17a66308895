//! End-to-end acceptance run through the command-line binary. Prints one
//! PASS/FAIL line per criterion and fails if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_assocgr"))
}

fn run(args: &[&str]) -> (Output, Duration) {
    let t = Instant::now();
    let out = bin().args(args).output().expect("binary runs");
    (out, t.elapsed())
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("unparsable output ({e}): {}", String::from_utf8_lossy(&out.stderr))
    })
}

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("assocgr-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

struct Gate {
    lines: Vec<String>,
    failed: usize,
}

impl Gate {
    fn record(&mut self, id: usize, name: &str, ok: bool, detail: String) {
        let line = format!("criterion {id} {name}: {} ({detail})", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        self.lines.push(line);
        if !ok {
            self.failed += 1;
        }
    }
}

fn verify(theorem: &str, trials: usize, seed: u64, dir: &Path) -> (Value, Duration, i32) {
    let repro = dir.join(format!("repro-{theorem}"));
    let (out, t) = run(&[
        "verify",
        theorem,
        "--trials",
        &trials.to_string(),
        "--seed",
        &seed.to_string(),
        "--format",
        "structured",
        "--reproducers",
        repro.to_str().unwrap(),
    ]);
    (json(&out), t, out.status.code().unwrap_or(-1))
}

fn tally(v: &Value, key: &str) -> u64 {
    v["tally"][key].as_u64().unwrap()
}

fn verdicts(v: &Value) -> &Vec<Value> {
    v["verdicts"].as_array().unwrap()
}

fn criterion_examples(gate: &mut Gate) -> Value {
    let (out, t) = run(&["examples", "--format", "structured"]);
    let v = json(&out);
    let rows = v.as_array().unwrap();
    let by_name: BTreeMap<&str, &Value> = rows.iter().map(|r| (r["name"].as_str().unwrap(), r)).collect();
    // The published examples and the invariants they must reproduce.
    let mut required: Vec<(String, Option<&str>, u64)> = vec![
        ("2gen-linear".into(), Some("2"), 1),
        ("2gen-minimal-multiplicity".into(), Some("2 + z"), 1),
        ("2gen-depth-zero".into(), Some("2 + z^2"), 0),
        ("3gen-depth-0".into(), None, 0),
        ("3gen-depth-1".into(), None, 1),
        ("3gen-depth-2".into(), None, 2),
    ];
    for a1 in 1..=3 {
        for a2 in a1..=3 {
            required.push((format!("2gen-diagonal-{a1}-{a2}"), None, 1));
        }
    }
    let cm = ["2 + z", "3 + z", "4 + z"];
    let dz = ["2 + z^2", "3 + z^2", "4 + z^2"];
    for r in 2..=4 {
        required.push((format!("rgen-{r}-cohen-macaulay"), Some(cm[r - 2]), 1));
        required.push((format!("rgen-{r}-depth-zero"), Some(dz[r - 2]), 0));
    }
    let mut bad = Vec::new();
    for (name, h, depth) in &required {
        let ok = by_name.get(name.as_str()).is_some_and(|row| {
            let rep = &row["report"];
            row["matches"] == Value::Bool(true)
                && rep["depth"].as_u64() == Some(*depth)
                && h.is_none_or(|h| row["expected_h"].as_str() == Some(h))
        });
        if !ok {
            bad.push(name.clone());
        }
    }
    let all_match = rows.iter().all(|r| r["matches"] == Value::Bool(true));
    let ok = bad.is_empty() && all_match && out.status.code() == Some(0) && t < Duration::from_secs(10);
    gate.record(
        1,
        "golden corpus",
        ok,
        format!("{} entries, {} required, mismatches {:?}, {:.2} s", rows.len(), required.len(), bad, t.as_secs_f64()),
    );
    v
}

fn criterion_thm31(gate: &mut Gate, dir: &Path) {
    let (v, t, code) = verify("thm3.1", 60, 31, dir);
    let passed: Vec<&Value> = verdicts(&v).iter().filter(|x| x["status"] == "pass").collect();
    let dims: BTreeSet<u64> = passed.iter().map(|x| x["witness"]["dim"].as_u64().unwrap()).collect();
    let hyp = passed.iter().all(|x| {
        let w = &x["witness"];
        w["ord_det"].as_u64().unwrap() == w["mu"].as_u64().unwrap() * w["i_m"].as_u64().unwrap() + 1
    });
    let ok = passed.len() >= 50
        && tally(&v, "fail") == 0
        && hyp
        && code == 0
        && [1, 2, 3].iter().all(|d| dims.contains(d))
        && t < Duration::from_secs(120);
    gate.record(
        2,
        "e = mu i + 1",
        ok,
        format!(
            "{} pass, {} fail, {} inconclusive, dims {:?}, {:.1} s",
            passed.len(),
            tally(&v, "fail"),
            tally(&v, "inconclusive"),
            dims,
            t.as_secs_f64()
        ),
    );
}

fn criterion_cor32(gate: &mut Gate, dir: &Path) {
    let (v, t, code) = verify("cor3.2", 40, 32, dir);
    let counted = verdicts(&v)
        .iter()
        .filter(|x| {
            let w = &x["witness"];
            x["status"] == "pass"
                && w["ord_det"].as_u64() == w["mu"].as_u64().map(|m| m + 1)
                && w["reduction_number"].as_u64().is_some_and(|r| r <= 2)
        })
        .count();
    let ok = counted >= 30 && tally(&v, "fail") == 0 && code == 0;
    gate.record(
        3,
        "ord det = r + 1",
        ok,
        format!("{counted} pass with red <= 2, {} fail, {:.1} s", tally(&v, "fail"), t.as_secs_f64()),
    );
}

fn criterion_e3(gate: &mut Gate, dir: &Path) {
    // The first trials are the untransformed seeds (9 with two generators,
    // 3 with three); the rest are transforms.
    let (a, ta, ca) = verify("e3mu2", 110, 41, dir);
    let (b, tb, cb) = verify("e3mu3", 110, 42, dir);
    let transforms = (110 - 9) + (110 - 3);
    let all_pass = |v: &Value| tally(v, "pass") == 110;
    let ok = all_pass(&a) && all_pass(&b) && ca == 0 && cb == 0 && transforms >= 100;
    gate.record(
        4,
        "e(A) = 3",
        ok,
        format!(
            "mu = 2: {} pass / {} fail; mu = 3: {} pass / {} fail; {transforms} transforms; {:.1} s",
            tally(&a, "pass"),
            tally(&a, "fail"),
            tally(&b, "pass"),
            tally(&b, "fail"),
            (ta + tb).as_secs_f64()
        ),
    );
}

fn criterion_universal(gate: &mut Gate, dir: &Path) {
    let (v, t, code) = verify("universal", 200, 55, dir);
    let mut per: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for x in verdicts(&v) {
        let e = per.entry(x["theorem"].as_str().unwrap().to_string()).or_default();
        match x["status"].as_str().unwrap() {
            "pass" => e.0 += 1,
            "fail" => e.1 += 1,
            _ => {}
        }
    }
    let trials: BTreeSet<u64> = verdicts(&v).iter().map(|x| x["trial"].as_u64().unwrap()).collect();
    let required = [
        "singh-equality",
        "multiplicity-bound",
        "e2-nonnegative",
        "coefficient-invariance",
        "h-two-routes",
        "ratliff-rush-identity",
        "five-term-sequence",
        "degree-two-sequence",
        "dimension-one-sequence",
        "fiber-shape",
    ];
    let missing: Vec<&str> = required.iter().copied().filter(|r| per.get(*r).is_none_or(|e| e.0 == 0)).collect();
    let ok = missing.is_empty()
        && tally(&v, "fail") == 0
        && code == 0
        && trials.len() == 200
        && t < Duration::from_secs(600);
    let summary: Vec<String> = per.iter().map(|(k, (p, f))| format!("{k} {p}/{f}")).collect();
    gate.record(
        5,
        "universal identities",
        ok,
        format!("pass/fail per identity: {}; missing {:?}; {:.1} s", summary.join(", "), missing, t.as_secs_f64()),
    );
}

fn criterion_truncation(gate: &mut Gate, examples: &Value) {
    let rows = examples.as_array().unwrap();
    let rechecked = rows
        .iter()
        .filter(|r| {
            let rep = &r["report"];
            r["rechecked"] == Value::Bool(true)
                && rep["recheck_truncation"].as_u64() == rep["truncation"].as_u64().map(|n| n + 2)
        })
        .count();
    gate.record(
        6,
        "truncation robustness",
        rechecked == rows.len(),
        format!("{rechecked} of {} corpus runs reproduced at N + 2", rows.len()),
    );
}

fn criterion_determinism(gate: &mut Gate, dir: &Path) {
    let file = dir.join("instance.txt");
    std::fs::write(
        &file,
        "variables: x, y, z\nhypersurface: x^2*(x-y)\nmatrix:\n  [x, y, 0]\n  [x^2, x^2, 0]\n  [0, 0, x^2]\n",
    )
    .unwrap();
    let f = file.to_str().unwrap();
    let args = ["report", f, "--seed", "7", "--format", "structured"];
    let (a, _) = run(&args);
    let (b, _) = run(&args);
    let reports_equal = a.status.success() && !a.stdout.is_empty() && a.stdout == b.stdout;
    let strip = |mut v: Value| {
        v["elapsed_seconds"] = Value::Null;
        serde_json::to_string(&v).unwrap()
    };
    let (x, _, _) = verify("universal", 12, 9, dir);
    let (y, _, _) = verify("universal", 12, 9, dir);
    let verify_equal = strip(x) == strip(y);
    gate.record(
        7,
        "determinism",
        reports_equal && verify_equal,
        format!("report bytes equal: {reports_equal}, verify output equal: {verify_equal}"),
    );
}

#[test]
fn acceptance() {
    let dir = scratch_dir();
    let mut gate = Gate { lines: Vec::new(), failed: 0 };
    let examples = criterion_examples(&mut gate);
    criterion_thm31(&mut gate, &dir);
    criterion_cor32(&mut gate, &dir);
    criterion_e3(&mut gate, &dir);
    criterion_universal(&mut gate, &dir);
    criterion_truncation(&mut gate, &examples);
    criterion_determinism(&mut gate, &dir);
    let _ = std::fs::remove_dir_all(&dir);
    assert_eq!(gate.failed, 0, "failing criteria:\n{}", gate.lines.join("\n"));
}
