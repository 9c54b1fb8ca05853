use std::process::Command;

use qgaudin::scalar::{rat, RatFunc};
use serde_json::Value;

fn qgaudin(args: &[&str]) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_qgaudin")).args(args).output().unwrap();
    (o.status.code().unwrap_or(-1), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = qgaudin(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}\n{err}"));
    (code, v)
}

fn multiplets(v: &Value) -> Vec<&Value> {
    v["results"].as_array().unwrap().iter().filter(|r| r["kind"] == "multiplet").collect()
}

#[test]
fn verify_algebra_exact() {
    let (code, v) = json(&["verify-algebra", "--sites", "2", "--spin", "1/2", "--backend", "exact"]);
    assert_eq!(code, 0);
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["holds"] == true));
}

#[test]
fn verify_algebra_float_six_sites() {
    let (code, v) = json(&["verify-algebra", "--sites", "6", "--spin", "1/2", "--z", "0.7"]);
    assert_eq!(code, 0);
    for (k, r) in v["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-10, "{k}: {r}");
    }
}

#[test]
fn tight_tolerance_fails_float_checks() {
    let (code, _, _) = qgaudin(&["verify-algebra", "--sites", "4", "--z", "0.7", "--tol", "1e-300"]);
    assert_eq!(code, 2);
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, err) = qgaudin(&["verify-algebra", "--spin", "2/3"]);
    assert_eq!(code, 1);
    assert!(err.contains("parse error"), "{err}");
    for args in [
        &["spectrum", "--frobnicate"][..],
        &["spectrum", "--backend", "float"],
        &["spectrum", "--z", "abc"],
        &["spectrum", "--grading", "ffb"],
        &["appendix2", "--sites", "3"],
        &["spectrum", "--sites", "0"],
        &[],
    ] {
        assert_eq!(qgaudin(args).0, 1, "{args:?}");
    }
}

#[test]
fn spectrum_two_sites_three_rows() {
    let (code, v) = json(&["spectrum", "--sites", "2"]);
    assert_eq!(code, 0);
    let rows = multiplets(&v);
    assert_eq!(rows.len(), 3);
    let c2: Vec<RatFunc> = rows.iter().map(|r| r["lambda"][1].as_str().unwrap().parse().unwrap()).collect();
    let want: Vec<RatFunc> =
        [5, 3, 1].iter().map(|&t| RatFunc::sinh_ratio(qgaudin::scalar::HalfInt::from_twice(t), 2)).collect();
    assert_eq!(c2, want);
    let mult: Vec<u64> = rows.iter().map(|r| r["multiplicity"].as_u64().unwrap()).collect();
    assert_eq!(mult, vec![5, 3, 1]);
    assert!(rows.iter().all(|r| r["multiplicity"] == r["oracle_multiplicity"]));
}

#[test]
fn spectrum_one_site_limit() {
    let (code, v) = json(&["spectrum", "--sites", "1"]);
    assert_eq!(code, 0);
    let rows = multiplets(&v);
    assert_eq!(rows.len(), 1);
    let l: RatFunc = rows[0]["lambda"][0].as_str().unwrap().parse().unwrap();
    assert_eq!(l.eval_at_one(), Some(rat(9, 4)));
}

#[test]
fn spectrum_four_sites_counts() {
    for extra in [&[][..], &["--z", "0.3", "--grading", "bfb"]] {
        let mut args = vec!["spectrum", "--sites", "4"];
        args.extend_from_slice(extra);
        let (code, v) = json(&args);
        assert_eq!(code, 0, "{args:?}");
        let total: u64 = multiplets(&v).iter().map(|r| r["multiplicity"].as_u64().unwrap()).sum();
        assert_eq!(total, 81);
        let degs: Vec<&Value> = v["results"].as_array().unwrap().iter().filter(|r| r["kind"] == "degeneracy").collect();
        assert!(degs.iter().all(|d| d["agrees"] == true));
    }
}

#[test]
fn spectrum_csv_one_row_per_state() {
    let (code, out, _) = qgaudin(&["spectrum", "--sites", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "label,l,lambda_1,lambda_2,lambda_3,multiplicity");
    assert_eq!(lines.len(), 1 + 27);
    assert!(lines[1].starts_with("\"phi(0;0,0)\",3/2,"));
}

#[test]
fn out_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("qgaudin-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("spec.json");
    let (code, out, _) = qgaudin(&["spectrum", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (_, direct, _) = qgaudin(&["spectrum"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), direct);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_round_trips() {
    for args in [&["errata"][..], &["spectrum", "--sites", "3", "--z", "0.7"], &["appendix2"]] {
        let (_, out, _) = qgaudin(args);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()), out);
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["config", "errata", "residuals", "results"]);
    }
}

fn appendix_errata(v: &Value) -> Vec<String> {
    v["errata"].as_array().unwrap().iter().map(|e| e["id"].as_str().unwrap().to_string()).collect()
}

#[test]
fn appendix2_reports_differences() {
    let (code, v) = json(&["appendix2"]);
    assert_eq!(code, 3);
    assert_eq!(v["residuals"]["rows"], 18.0);
    assert_eq!(v["residuals"]["rows_matched"], 14.0);
    assert!(!appendix_errata(&v).iter().any(|e| e.contains("phi(1;0,0)")));
}

#[test]
fn appendix2_injected_sign_flip() {
    let mut g: Value = serde_json::from_str(qgaudin::cli::golden::APPENDIX2).unwrap();
    let row = g["tables"]["fbf"]
        .as_array_mut()
        .unwrap()
        .iter_mut()
        .find(|r| r["k"] == 1 && r["ladder"].as_array().unwrap().is_empty())
        .unwrap();
    let c = row["components"]["0d"].as_str().unwrap().to_string();
    row["components"]["0d"] = Value::String(format!("-({c})"));
    let dir = std::env::temp_dir().join(format!("qgaudin-golden-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("golden.json");
    std::fs::write(&path, serde_json::to_string(&g).unwrap()).unwrap();
    let (code, v) = json(&["appendix2", "--golden", path.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(appendix_errata(&v).contains(&"appendix2-fbf-phi(1;0,0)".to_string()));
    let (_, text, _) = qgaudin(&["appendix2", "--golden", path.to_str().unwrap(), "--format", "text"]);
    assert!(text.lines().any(|l| l.contains("phi(1;0,0)") && l.contains("MISMATCH")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn errata_flags_required_entries() {
    let (code, v) = json(&["errata"]);
    assert_eq!(code, 0);
    let entries = v["errata"].as_array().unwrap();
    for id in ["hf-sign-q1", "deg-qH", "alpha-general-j-at-half", "lambda-classical"] {
        let e = entries.iter().find(|e| e["id"] == id).unwrap();
        assert_eq!(e["verdict"], "flagged", "{id}");
    }
    for id in ["comm", "cs", "cazzetti"] {
        let e = entries.iter().find(|e| e["id"] == id).unwrap();
        assert_eq!(e["verdict"], "verified", "{id}");
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_qgaudin"))
            .args(["spectrum", "--sites", "4", "--z", "0.7"])
            .env("QGAUDIN_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
