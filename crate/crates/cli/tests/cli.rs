use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn gmra(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_gmra"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // the binary may exit before reading its input
    let _ = child.stdin.take().unwrap().write_all(stdin.as_bytes());
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn example(name: &str) -> String {
    let out = gmra(&["example", name], "");
    assert!(out.status.success());
    stdout(&out)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn journe_example_verifies() {
    let out = gmra(&["msystem-verify"], &example("journe"));
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let report = json(&out);
    assert_eq!(report["kind"], "report");
    assert_eq!(report["payload"]["orthogonality"]["ortho2"]["exact"], true);
}

#[test]
fn matrix_at_zero_is_the_first_permutation() {
    let out = gmra(&["msystem-matrix", "--at", "0"], &example("journe"));
    assert!(out.status.success());
    let report = json(&out);
    let entries: Vec<Vec<&str>> = report["payload"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|e| e.as_str().unwrap()).collect())
        .collect();
    assert_eq!(entries, [["1", "0", "0"], ["0", "0", "1"], ["0", "1", "0"]]);
    assert_eq!(report["payload"]["dimension"], 3);
}

#[test]
fn matrix_accepts_negative_points() {
    let out = gmra(&["msystem-matrix", "--at", "-13/28"], &example("journe"));
    assert!(out.status.success());
    assert_eq!(json(&out)["payload"]["entries"], serde_json::json!([["0", "1"], ["1", "0"]]));
}

#[test]
fn self_connection_is_the_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("journe.json");
    std::fs::write(&path, example("journe")).unwrap();
    let p = path.to_str().unwrap();
    let out = gmra(&["loop-connect", "--from", p, "--to", p], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let element = stdout(&out);
    assert_eq!(json(&out)["kind"], "loop-element");
    let verify = gmra(&["loop-verify"], &element);
    assert!(verify.status.success(), "{}", stdout(&verify));
    let acted = gmra(&["loop-act", "--element", "-", "--system", p], &element);
    assert!(acted.status.success(), "{}", String::from_utf8_lossy(&acted.stderr));
}

#[test]
fn random_systems_round_trip_through_the_loop_group() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let mu = dir.path().join("mu.json");
    std::fs::write(&mu, example("journe-mu")).unwrap();
    for (path, seed) in [(&a, "1"), (&b, "2")] {
        let out = gmra(&["msystem-random", "--seed", seed, "--mu", mu.to_str().unwrap()], "");
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::write(path, &out.stdout).unwrap();
    }
    let k = gmra(&["loop-connect", "--from", a.to_str().unwrap(), "--to", b.to_str().unwrap()], "");
    assert!(k.status.success());
    let moved = gmra(&["loop-act", "--element", "-", "--system", a.to_str().unwrap()], &stdout(&k));
    assert!(moved.status.success());
    let check = gmra(&["msystem-verify"], &stdout(&moved));
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["example", "journe"][..],
        &["msystem-random", "--seed", "9", "--n", "3"],
        &["scaling", "--filter", "haar", "--depth", "8", "--extent", "2", "--grid-step", "1/16"],
        &["frame-check", "--wavelet", "shannon", "--interval", "1/2,1"],
    ] {
        let first = gmra(args, "");
        let second = gmra(args, "");
        assert!(first.status.success(), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn unknown_subcommand_exits_with_two() {
    assert_eq!(gmra(&["no-such-command"], "").status.code(), Some(2));
}

#[test]
fn malformed_input_exits_with_two() {
    let out = gmra(&["mu-check"], "{ not json");
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = gmra(&["msystem-matrix", "--at", "one half"], &example("journe"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn broken_bank_reports_the_failing_relation() {
    let mut doc: Value = serde_json::from_str(&example("journe")).unwrap();
    // drop the √2 from the low-pass filter on its first nonzero cell
    let values = doc["payload"]["h"]["1,1"]["values"].as_array_mut().unwrap();
    let cell = values.iter_mut().find(|v| v[0] != "0").unwrap();
    cell[0] = Value::from("1");
    let out = gmra(&["msystem-verify"], &doc.to_string());
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let report = json(&out);
    let payload = &report["payload"];
    assert_eq!(payload["pass"], false);
    let ortho1 = &payload["orthogonality"]["ortho1"];
    assert_eq!(ortho1["pass"], false);
    assert_eq!(ortho1["equation"], "ortho1");
    assert_eq!(ortho1["worst_cell"], serde_json::json!(["0", "1/7"]));
    assert_eq!(payload["orthogonality"]["ortho2"]["pass"], true);
    assert_eq!(payload["unitarity"]["worst_cell"], "[0, 1/7)");
}

#[test]
fn multiplicity_commands() {
    let mu = example("journe-mu");
    let check = gmra(&["mu-check"], &mu);
    assert_eq!(check.status.code(), Some(0), "{}", stdout(&check));
    let conj = json(&gmra(&["mu-conjugate"], &mu));
    assert_eq!(conj["payload"]["mu_tilde"]["values"], serde_json::json!([1]));
    let levels = json(&gmra(&["mu-levelsets"], &mu));
    assert_eq!(levels["payload"]["S"][0]["measure"], "5/7");
    assert_eq!(levels["payload"]["S"][1]["measure"], "2/7");

    let bad = r#"{"kind":"multiplicity","version":1,"payload":{"N":2,"breakpoints":["0","1/2"],"values":[3,0]}}"#;
    let out = gmra(&["mu-check"], bad);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn scaling_csv_has_a_header_and_grid_rows() {
    let out = gmra(
        &["scaling", "--filter", "shannon", "--depth", "4", "--extent", "1", "--grid-step", "1/4"],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,re,im"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows[4].starts_with("0,1,"), "{}", rows[4]);
}

#[test]
fn frame_check_reports_the_ratio() {
    let out = gmra(&["frame-check", "--wavelet", "journe", "--interval", "2/7,1/2", "--jmax", "6", "--vmax", "64"], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ratio = json(&out)["payload"]["ratio"].as_f64().unwrap();
    assert!((0.98..=1.0 + 1e-12).contains(&ratio), "{ratio}");
    let strict = gmra(&["frame-check", "--wavelet", "journe", "--interval", "2/7,1/2", "--jmax", "0", "--vmax", "1", "--min-ratio", "0.98"], "");
    assert_eq!(strict.status.code(), Some(1));
}
