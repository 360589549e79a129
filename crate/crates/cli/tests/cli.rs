use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn horo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horo")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn verify_exit_codes() {
    let ok = horo(&["verify", "--lemma", "cocycle", "--trials", "50", "--seed", "3"]);
    assert_eq!(code(&ok), 0, "{}", String::from_utf8_lossy(&ok.stderr));
    let report: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(report["lemma_id"], "cocycle");
    assert_eq!(report["failures"], 0);

    assert_eq!(code(&horo(&["verify", "--lemma", "appendix_const", "--trials", "1"])), 2);
    let unknown = horo(&["verify", "--lemma", "no_such_lemma"]);
    assert_eq!(code(&unknown), 3);
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("no_such_lemma"));
    assert_eq!(code(&horo(&["verify", "--lemma", "thin", "--trials", "0"])), 3);
    assert_eq!(code(&horo(&["no-such-command"])), 3);
    assert_eq!(code(&horo(&["--help"])), 0);
}

#[test]
fn verify_output_is_reproducible() {
    let args = ["verify", "--lemma", "contracting", "--trials", "300", "--seed", "9", "--workers", "1"];
    let (a, b) = (horo(&args), horo(&args));
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    // the worker count does not change the report
    let many = horo(&["verify", "--lemma", "contracting", "--trials", "300", "--seed", "9", "--workers", "4"]);
    assert_eq!(a.stdout, many.stdout);
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn pipeline_files_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let out = horo(&["pipeline", "--L", "6", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (fa, fb) = (read_dir_sorted(a.path()), read_dir_sorted(b.path()));
    let names: Vec<&str> = fa.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["census.csv", "delta.json", "measure.json", "quasi_invariance.json", "residual_a.csv"] {
        assert!(names.contains(&expected), "{names:?}");
    }
    assert_eq!(fa, fb);
}

#[test]
fn short_pipeline_writes_only_the_census() {
    let dir = tempfile::tempdir().unwrap();
    let out = horo(&["pipeline", "--L", "3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let names: Vec<String> = read_dir_sorted(dir.path()).into_iter().map(|(n, _)| n).collect();
    assert_eq!(names, vec!["census.csv"]);
}

#[test]
fn malformed_specs_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"r\": 2, \"generators\": ").unwrap();
    let out = horo(&["delta", "--spec", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(!out.stderr.is_empty());

    let singular = dir.path().join("singular.json");
    fs::write(
        &singular,
        r#"{"r": 1, "generators": {"a": [[[1.0, 1.0], [1.0, 1.0]]]}, "basepoint": [[0.0, 1.0]]}"#,
    )
    .unwrap();
    assert_eq!(code(&horo(&["ball", "--L", "1", "--spec", singular.to_str().unwrap()])), 3);
    assert_eq!(code(&horo(&["delta", "--psi", "1,2,3"])), 3);
    assert_eq!(code(&horo(&["ball", "--spec", "/nonexistent/spec.json"])), 3);
}

#[test]
fn ball_cap_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_horo"))
        .args(["ball", "--L", "6"])
        .env("HORO_BALL_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("100"), "{err}");

    let ok = horo(&["ball", "--L", "2"]);
    assert_eq!(code(&ok), 0);
    let text = String::from_utf8(ok.stdout).unwrap();
    let mut rows = text.lines();
    assert!(rows.next().unwrap().starts_with("word,word_length"));
    assert_eq!(rows.count(), 17);
}

#[test]
fn measure_commands_run_on_the_fixture() {
    let br = horo(&["br-check", "--L", "6"]);
    assert_eq!(code(&br), 0, "{}", String::from_utf8_lossy(&br.stderr));
    let tr = horo(&["transverse", "--L", "6"]);
    assert_eq!(code(&tr), 0);
    let ess = horo(&["essential", "--L", "6", "--phi", "a"]);
    assert_eq!(code(&ess), 0, "{}", String::from_utf8_lossy(&ess.stderr));
    let out = tempfile::tempdir().unwrap();
    let file = out.path().join("delta.json");
    assert_eq!(code(&horo(&["delta", "--L", "8", "--out", file.to_str().unwrap()])), 0);
    let delta: serde_json::Value = serde_json::from_str(&fs::read_to_string(file).unwrap()).unwrap();
    assert!(delta["delta"].as_f64().unwrap() > 0.0);
}
