use std::path::{Path, PathBuf};
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn snewton(args: &[&str]) -> Out {
    let out = Command::new(env!("CARGO_BIN_EXE_snewton")).args(args).output().unwrap();
    Out {
        code: out.status.code().expect("killed by a signal"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Out) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{}: {}", e, out.stdout))
}

fn coeff(series: &Value, k: i64) -> (f64, f64) {
    let base = series["base"].as_i64().unwrap();
    let c = &series["coeffs"][(k - base) as usize];
    (c[0].as_f64().unwrap(), c[1].as_f64().unwrap())
}

fn component<'a>(run: &'a Value, name: &str) -> &'a Value {
    &run["series"].as_array().unwrap().iter().find(|s| s["name"] == name).unwrap()["series"]
}

#[test]
fn viviani_json_carries_the_degree_fifteen_coefficient() {
    let out = snewton(&["solve", "--degree", "16", path_str(&fixture("viviani.sn")), "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = json(&out);
    let run = &doc["runs"][0];
    assert_eq!(run["status"], "converged");
    let (re, im) = coeff(component(run, "x2"), 15);
    assert!((re + 33.0 / 1024.0).abs() < 1e-12 && im.abs() < 1e-12);
    assert!(run["original_residual_order"].as_i64().unwrap() >= 18);
}

#[test]
fn apollonius_start_is_singular() {
    let out = snewton(&["classify", path_str(&fixture("apollonius.sn"))]);
    assert_eq!(out.code, 0);
    assert!(out.stdout.contains("SingularStart"), "{}", out.stdout);
}

#[test]
fn apollonius_reports_one_block_per_start() {
    let out = snewton(&["solve", "--degree", "3", path_str(&fixture("apollonius.sn")), "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(json(&out)["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn exact_solution_round_trips_to_an_infinite_residual_order() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("solution.json");
    let out = snewton(&["solve", "--degree", "3", path_str(&fixture("example22.sn")), "--json"]);
    assert_eq!(out.code, 0);
    let doc = json(&out);
    assert!(doc["steps"].as_array().unwrap().len() <= 3);
    assert_eq!(doc["runs"][0]["residual_order"], "inf");
    std::fs::write(&saved, &out.stdout).unwrap();
    let res = snewton(&["residual", path_str(&fixture("example22.sn")), "--series-json", path_str(&saved)]);
    assert_eq!(res.code, 0, "{}", res.stderr);
    assert_eq!(res.stdout.trim(), "start 0: residual order inf");
}

#[test]
fn classify_only_report_has_an_empty_step_list() {
    let out = snewton(&["classify", path_str(&fixture("cyclic8.sn")), "--json"]);
    assert_eq!(out.code, 0);
    let doc = json(&out);
    assert_eq!(doc["classification"], "EmptyAugmented");
    assert_eq!(doc["steps"], Value::Array(vec![]));
    assert!(out.stdout.starts_with("{\"classification\": \"EmptyAugmented\", \"steps\": []"), "{}", out.stdout);
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for name in ["viviani.sn", "apollonius.sn", "four_spheres.sn", "cyclic8.sn"] {
        let fx = fixture(name);
        let args = ["solve", "--degree", "6", path_str(&fx), "--json", "--dump-blocks"];
        let a = snewton(&args);
        let b = snewton(&args);
        assert_eq!(a.code, b.code);
        assert_eq!(a.stdout, b.stdout, "{}", name);
    }
}

/// Replaces the start lines of a fixture with the `start series` lines of a text report.
/// Indented lines right after a start line continue it.
fn restart(fixture_text: &str, report: &str) -> String {
    let mut kept = String::new();
    let mut in_start = false;
    for line in fixture_text.lines() {
        in_start = line.starts_with("start") || in_start && line.starts_with(' ');
        if !in_start {
            kept.push_str(line);
            kept.push('\n');
        }
    }
    for line in report.lines().filter(|l| l.trim_start().starts_with("start series")) {
        kept.push_str(line.trim_start());
        kept.push('\n');
    }
    kept
}

#[test]
fn emitted_series_reingest_with_the_same_residual_order() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["example22.sn", "viviani.sn", "apollonius.sn", "four_spheres.sn", "cyclic8.sn"] {
        let fx = fixture(name);
        let text = snewton(&["solve", "--degree", "8", path_str(&fx)]);
        let js = json(&snewton(&["solve", "--degree", "8", path_str(&fx), "--json"]));
        let file = dir.path().join(name);
        std::fs::write(&file, restart(&std::fs::read_to_string(&fx).unwrap(), &text.stdout)).unwrap();
        let res = snewton(&["residual", path_str(&file), "--json"]);
        assert_eq!(res.code, 0, "{}: {}", name, res.stderr);
        let got = json(&res);
        let runs = js["runs"].as_array().unwrap();
        assert_eq!(got["residuals"].as_array().unwrap().len(), runs.len(), "{}", name);
        for (k, run) in runs.iter().enumerate() {
            assert_eq!(got["residuals"][k]["residual_order"], run["residual_order"], "{} run {}", name, k);
        }
    }
}

#[test]
fn exit_codes_separate_input_from_numerical_failures() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sn");
    std::fs::write(&bad, "param t;\nvars x;\npoly x^2 - ;\n").unwrap();
    let out = snewton(&["solve", path_str(&bad)]);
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("snewton:"));
    assert_eq!(snewton(&["solve", path_str(&dir.path().join("missing.sn"))]).code, 1);
    assert_eq!(snewton(&["frobnicate"]).code, 1);
    assert_eq!(snewton(&["--help"]).code, 0);

    // A start point off the curve is an input error.
    let off = dir.path().join("off.sn");
    std::fs::write(&off, "param t;\nvars x;\npoly x^2 - 1 - t;\nstart point 0, 3;\n").unwrap();
    assert_eq!(snewton(&["classify", path_str(&off)]).code, 1);

    // One step is not enough to reach degree 16: the partial report still prints.
    let out = snewton(&["solve", "--degree", "16", "--max-steps", "1", path_str(&fixture("viviani.sn")), "--json"]);
    assert_eq!(out.code, 2);
    assert_eq!(json(&out)["runs"][0]["status"], "max_steps");
}

#[test]
fn pade_of_a_supplied_series() {
    let out = snewton(&["pade", "1", "1", "--series", "1 - 3/4*t + 39/32*t^2", "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = json(&out);
    let num = &doc["num"];
    let den = &doc["den"];
    assert!((num[1][0].as_f64().unwrap() - 0.875).abs() < 1e-14);
    assert!((den[1][0].as_f64().unwrap() - 1.625).abs() < 1e-14);
}

#[test]
fn pade_of_a_computed_solution() {
    let out = snewton(&["pade", "1", "1", path_str(&fixture("pade_homotopy.sn")), "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let doc = json(&out);
    let first = &doc["pade"][0];
    assert_eq!(first["name"], "x");
    let num = &first["approximant"]["num"];
    let den = &first["approximant"]["den"];
    assert!((num[1][0].as_f64().unwrap() - 0.875).abs() < 1e-10);
    assert!((den[1][0].as_f64().unwrap() - 1.625).abs() < 1e-10);
}

fn mutate(text: &str, edits: &[(usize, u8, u8)]) -> String {
    const ALPHABET: &[u8] = b" ;,*^+-()[]/0123456789.etixrp\n";
    let mut bytes = text.as_bytes().to_vec();
    for &(pos, kind, ch) in edits {
        let i = pos % (bytes.len() + 1);
        let c = ALPHABET[ch as usize % ALPHABET.len()];
        match kind % 3 {
            0 if i < bytes.len() => {
                bytes.remove(i);
            }
            1 => bytes.insert(i, c),
            _ if i < bytes.len() => bytes[i] = c,
            _ => bytes.push(c),
        }
    }
    String::from_utf8_lossy(&bytes).into_owned()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mutated_inputs_never_crash(which in 0usize..5, edits in prop::collection::vec((0usize..2000, 0u8..3, 0u8..255), 1..6)) {
        let names = ["example22.sn", "viviani.sn", "apollonius.sn", "four_spheres.sn", "pade_homotopy.sn"];
        let text = std::fs::read_to_string(fixture(names[which])).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let file = dir.path().join("fuzz.sn");
        std::fs::write(&file, mutate(&text, &edits)).unwrap();
        let f = path_str(&file);
        for args in [vec!["classify", f], vec!["solve", "--degree", "4", "--max-steps", "6", f]] {
            let out = snewton(&args);
            prop_assert!(out.code <= 2, "exit {} for {:?}: {}", out.code, args, out.stderr);
            prop_assert!(!out.stderr.contains("panicked"), "{}", out.stderr);
        }
    }
}
