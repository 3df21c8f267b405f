use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qmask(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmask")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success() || out.status.code() == Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn repro_json_is_byte_identical_across_runs() {
    for name in ["entmask", "maskcon", "counterexample-d2", "hide-not-mask", "bott"] {
        let a = qmask(&["repro", name, "--n", "40", "--seed", "3"]);
        let b = qmask(&["repro", name, "--n", "40", "--seed", "3"]);
        assert_eq!(a.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{name}");
        assert!(!String::from_utf8_lossy(&a.stdout).contains("wall_time"));
    }
    let timed = json(&qmask(&["repro", "bott", "--timing"]));
    assert!(timed["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn csv_and_json_carry_the_same_numbers() {
    for name in ["maskcon", "entmask", "hide-not-mask"] {
        let j = json(&qmask(&["repro", name, "--n", "25", "--seed", "8"]));
        let c = qmask(&["repro", name, "--n", "25", "--seed", "8", "--format", "csv"]);
        let text = String::from_utf8(c.stdout).unwrap();
        let mut sections = text.split("\n\n");
        let claims = sections.next().unwrap();
        let mut reader = csv::Reader::from_reader(claims.as_bytes());
        let records: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        let expected = j["claims"].as_array().unwrap();
        assert_eq!(records.len(), expected.len());
        for (r, e) in records.iter().zip(expected) {
            assert_eq!(&r[1], e["description"].as_str().unwrap());
            for (col, key) in [(3, "expected"), (4, "observed"), (5, "tolerance")] {
                let parsed: f64 = r[col].parse().unwrap();
                assert_eq!(parsed.to_bits(), e[key].as_f64().unwrap().to_bits(), "{name} {key}");
            }
            assert_eq!(&r[6] == "true", e["pass"].as_bool().unwrap());
        }
        let Some(table) = sections.next() else {
            assert!(j["table"].is_null(), "{name}");
            continue;
        };
        let mut reader = csv::Reader::from_reader(table.as_bytes());
        let rows = j["table"]["rows"].as_array().unwrap();
        let parsed: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
        assert_eq!(parsed.len(), rows.len());
        for (r, row) in parsed.iter().zip(rows) {
            for (cell, v) in r.iter().zip(row.as_array().unwrap()) {
                assert_eq!(cell.parse::<f64>().unwrap().to_bits(), v.as_f64().unwrap().to_bits());
            }
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qmask(&["repro", "counterexample-d2"]).status.code(), Some(0));
    assert_eq!(qmask(&["nonsense"]).status.code(), Some(2));
    assert_eq!(qmask(&["repro", "maskcon", "--d", "2"]).status.code(), Some(2));
    assert_eq!(qmask(&["hr", "kappa", "--max-d", "200"]).status.code(), Some(3));
    assert_eq!(qmask(&["hr", "gen", "--count", "3", "--dim", "64", "--max-dim", "32"]).status.code(), Some(3));
    assert_eq!(qmask(&["repro", "hide-not-mask", "--config", "/nonexistent/run.cfg"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("m.json");
    let built = qmask(&["mask", "build", "--kind", "canonical", "--d", "5", "--out", path(&m)]);
    assert_eq!(built.status.code(), Some(0));
    assert_eq!(qmask(&["mask", "verify", path(&m), "--set", "real", "--n", "50"]).status.code(), Some(0));
    // non-real states are not masked: the check fails with a claim failure
    let complex = qmask(&["mask", "verify", path(&m), "--set", "complex", "--n", "50"]);
    assert_eq!(complex.status.code(), Some(1));
    assert!(json(&complex)["witness_state"].is_object());
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "seed = 5\nn = 30\n").unwrap();
    let from_file = json(&qmask(&["repro", "maskcon", "--config", path(&cfg)]));
    assert_eq!(from_file["parameters"]["seed"], 5.0);
    assert_eq!(from_file["parameters"]["n"], 30.0);
    let flagged = json(&qmask(&["repro", "maskcon", "--config", path(&cfg), "--seed", "6"]));
    assert_eq!(flagged["parameters"]["seed"], 6.0);
    assert_eq!(flagged["parameters"]["n"], 30.0);
    std::fs::write(&cfg, "format = csv\n").unwrap();
    let csv = qmask(&["repro", "bott", "--config", path(&cfg)]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("report,description"));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(qmask(&["repro", "bott", "--config", path(&cfg)]).status.code(), Some(2));
}

#[test]
fn hr_and_masker_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.json");
    assert!(qmask(&["hr", "gen", "--count", "7", "--dim", "16", "--real", "--out", path(&h)]).status.success());
    let set: Value = serde_json::from_str(&std::fs::read_to_string(&h).unwrap()).unwrap();
    assert_eq!(set["real_orthogonal"], true);
    assert_eq!(set["matrices"].as_array().unwrap().len(), 7);
    let report = json(&qmask(&["hr", "verify", path(&h), "--tol", "1e-11"]));
    assert_eq!(report["pass"], true);

    let m = dir.path().join("magic.json");
    assert!(qmask(&["mask", "build", "--kind", "magic", "--out", path(&m)]).status.success());
    let hidden = qmask(&["mask", "verify", path(&m), "--set", "constrained", "--side", "a", "--n", "200"]);
    assert_eq!(hidden.status.code(), Some(0));
    let hidden = json(&hidden);
    assert_eq!(hidden["is_partial_masker_a"], true);
    assert_eq!(qmask(&["mask", "verify", path(&m), "--set", "constrained", "--n", "200"]).status.code(), Some(1));

    let extracted = json(&qmask(&["mask", "extract-hr", path(&m)]));
    let a = dir.path().join("a.json");
    std::fs::write(&a, serde_json::to_string(&extracted["a"]).unwrap()).unwrap();
    assert_eq!(json(&qmask(&["hr", "verify", path(&a), "--tol", "1e-9"]))["pass"], true);

    let kappa = String::from_utf8(qmask(&["hr", "kappa", "--max-d", "9"]).stdout).unwrap();
    assert_eq!(kappa.lines().next().unwrap(), "d,kappa,kappa_R,kappa_tilde");
    assert_eq!(kappa.lines().count(), 9);

    let q = dir.path().join("q.json");
    assert!(qmask(&["mask", "build", "--kind", "qubit", "--mu", "0.25,0.25,0.5", "--out", path(&q)]).status.success());
    let masker: Value = serde_json::from_str(&std::fs::read_to_string(&q).unwrap()).unwrap();
    assert_eq!((masker["d"].as_u64(), masker["dA"].as_u64()), (Some(2), Some(3)));
    assert!((masker["purity"].as_f64().unwrap() - 0.375).abs() < 1e-12);

    let p = dir.path().join("p.json");
    assert!(qmask(&["mask", "build", "--kind", "phase", "--d", "3", "--out", path(&p)]).status.success());
    let phase = qmask(&["mask", "verify", path(&p), "--set", "phase", "--profile", "0.6,0.48,0.64", "--n", "100"]);
    assert_eq!(phase.status.code(), Some(0), "{}", String::from_utf8_lossy(&phase.stderr));
}

#[test]
fn ic_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    for (name, ic, design) in [("sic2", true, true), ("mub3", true, true), ("basis3", false, false)] {
        let f = dir.path().join(format!("{name}.json"));
        assert!(qmask(&["ic", "fixtures", "--name", name, "--out", path(&f)]).status.success());
        let check = json(&qmask(&["ic", "check", path(&f)]));
        assert_eq!(check["informationally_complete"], ic, "{name}");
        assert_eq!(check["separating_observable"].is_null(), ic, "{name}");
        let d = json(&qmask(&["ic", "design", path(&f), "--t", "2"]));
        assert_eq!(d["is_design"], design, "{name}");
    }
    let sic = dir.path().join("sic2.json");
    assert_eq!(json(&qmask(&["ic", "disk", path(&sic)]))["contained_in_disk"], false);
    assert_eq!(qmask(&["ic", "design", path(&sic), "--t", "3"]).status.code(), Some(2));
    assert_eq!(qmask(&["ic", "disk", path(&dir.path().join("mub3.json"))]).status.code(), Some(2));

    let triple = json(&qmask(&["ic", "triple", "--d", "2", "--c0-sq", "0.5"]));
    assert!(triple["im"].as_f64().unwrap().abs() < 1e-12);
    let grid = json(&qmask(&["ic", "obstruction"]));
    assert!(grid["min_max_violation"].as_f64().unwrap() >= 0.5);
    let conj = json(&qmask(&["ic", "conjecture", "--profile", "0.6,0.8", "--n", "20"]));
    assert_eq!(conj["samples"], 20);
}

#[test]
fn measure_commands() {
    let dir = tempfile::tempdir().unwrap();
    let state = dir.path().join("state.json");
    let h = 0.5;
    let matrix = serde_json::json!({"rows": 2, "cols": 2, "entries": [[h, 0.0], [0.0, -h], [0.0, h], [h, 0.0]]});
    std::fs::write(&state, matrix.to_string()).unwrap();
    let roi = json(&qmask(&["measure", "roi", path(&state)]));
    assert!((roi["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let table = String::from_utf8(qmask(&["measure", "table", "--max-d", "9", "--format", "csv"]).stdout).unwrap();
    assert!(table.lines().nth(8).unwrap().starts_with("9.0,4.0,4.0,"));

    let m = dir.path().join("m.json");
    assert!(qmask(&["mask", "build", "--kind", "canonical", "--d", "5", "--out", path(&m)]).status.success());
    let curve = qmask(&["measure", "maskcon", "--masker", path(&m), "--n", "30", "--format", "csv"]);
    assert_eq!(curve.status.code(), Some(0));
    let text = String::from_utf8(curve.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "imaginarity,concurrence,curve");
    assert_eq!(text.lines().count(), 31);
}
