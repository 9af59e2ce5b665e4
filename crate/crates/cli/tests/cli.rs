use std::io::Write as _;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const CHAIN: &str = r#"{"id": "demo", "namespace": "demo",
  "lyphs": [{"id": "seg", "isTemplate": true, "ontologyTerms": ["UBERON:0001"]}],
  "chains": [{"id": "c", "numLevels": 3, "lyphTemplate": "seg"}]}"#;

fn lyphforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lyphforge"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn generate_writes_generated_model() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "model.json", CHAIN);
    let out = dir.path().join("out");
    let o = lyphforge(&["generate", &input, "-o", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("model.generated.json")).unwrap();
    assert!(text.contains("c_lnk3"));
}

#[test]
fn broken_model_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(
        dir.path(),
        "broken.json",
        r#"{"chains": [{"id": "c", "numLevels": "three"}]}"#,
    );
    let o = lyphforge(&["validate", &input]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("E "));
}

#[test]
fn warnings_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(
        dir.path(),
        "dup.json",
        r#"{"nodes": [{"id": "a"}, {"id": "a"}]}"#,
    );
    assert_eq!(code(&lyphforge(&["validate", &input])), 1);
}

#[test]
fn bad_flags_exit_2() {
    let o = lyphforge(&["layout", "x.json", "--mode", "4d"]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&lyphforge(&["frobnicate"])), 2);
}

#[test]
fn validate_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_lyphforge"))
        .args(["validate", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(CHAIN.as_bytes())
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout), "OK\n");
}

#[test]
fn convert_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "model.json", CHAIN);
    let csv = dir.path().join("model.csvdir");
    let back = dir.path().join("back.json");
    assert_eq!(
        code(&lyphforge(&[
            "convert",
            &input,
            "-o",
            csv.to_str().unwrap()
        ])),
        0
    );
    assert!(csv.join("chains.csv").exists());
    assert_eq!(
        code(&lyphforge(&[
            "convert",
            csv.to_str().unwrap(),
            "-o",
            back.to_str().unwrap()
        ])),
        0
    );
    let once = dir.path().join("once.json");
    assert_eq!(
        code(&lyphforge(&[
            "convert",
            &input,
            "-o",
            once.to_str().unwrap()
        ])),
        0
    );
    assert_eq!(
        std::fs::read_to_string(back).unwrap(),
        std::fs::read_to_string(once).unwrap()
    );
}

#[test]
fn export_writes_three_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "model.json", CHAIN);
    let out = dir.path().join("exp");
    let o = lyphforge(&[
        "export",
        &input,
        "-o",
        out.to_str().unwrap(),
        "--base-iri",
        "http://x.org/",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ld = std::fs::read_to_string(out.join("model.jsonld")).unwrap();
    assert!(ld.contains("http://x.org/demo#c_lnk1"));
    assert!(out.join("model.generated.json").exists());
    let map = std::fs::read_to_string(out.join("model.resource-map.json")).unwrap();
    assert!(map.contains("\"provenance\": \"generated\""));
}

#[test]
fn layout_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "model.json", CHAIN);
    let a = lyphforge(&["layout", &input, "--seed", "7", "--iters", "50"]);
    let b = lyphforge(&["layout", &input, "--seed", "7", "--iters", "50"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let svg = dir.path().join("v.svg");
    assert_eq!(
        code(&lyphforge(&[
            "layout",
            &input,
            "--svg",
            svg.to_str().unwrap(),
            "-o",
            dir.path().join("s.json").to_str().unwrap()
        ])),
        0
    );
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn edit_writes_model_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(
        dir.path(),
        "model.json",
        r#"{"lyphs": [{"id": "Ganglion", "isTemplate": true}, {"id": "wall", "layers": ["Ganglion"]}]}"#,
    );
    let script = fixture(
        dir.path(),
        "s.json",
        r#"[{"op": "DELETE", "target": "Ganglion"}]"#,
    );
    let out = dir.path().join("edited.json");
    let o = lyphforge(&[
        "edit",
        &input,
        "--script",
        &script,
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(
        stdout.contains("- Ganglion") && stdout.contains("~ wall"),
        "{stdout}"
    );
    assert!(dir.path().join("edited.json.editlog.json").exists());

    // Undo through the saved log restores the input.
    let undo = fixture(dir.path(), "u.json", r#"[{"op": "UNDO"}]"#);
    let log = dir.path().join("edited.json.editlog.json");
    let back = dir.path().join("back.json");
    let o = lyphforge(&[
        "edit",
        out.to_str().unwrap(),
        "--script",
        &undo,
        "--resume",
        log.to_str().unwrap(),
        "-o",
        back.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let canon = dir.path().join("canon.json");
    lyphforge(&["convert", &input, "-o", canon.to_str().unwrap()]);
    assert_eq!(
        std::fs::read_to_string(back).unwrap(),
        std::fs::read_to_string(canon).unwrap()
    );
}

#[test]
fn failing_script_changes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(dir.path(), "model.json", r#"{"nodes": [{"id": "a"}]}"#);
    let script = fixture(
        dir.path(),
        "s.json",
        r#"[{"op": "DELETE", "target": "a"}, {"op": "DELETE", "target": "zz"}]"#,
    );
    let out = dir.path().join("out.json");
    let o = lyphforge(&[
        "edit",
        &input,
        "--script",
        &script,
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn merge_and_join() {
    let dir = tempfile::tempdir().unwrap();
    let a = fixture(
        dir.path(),
        "a.json",
        r#"{"namespace": "a", "nodes": [{"id": "n"}]}"#,
    );
    let b = fixture(
        dir.path(),
        "b.json",
        r#"{"namespace": "b", "nodes": [{"id": "n"}]}"#,
    );
    let out = dir.path().join("m.json");
    assert_eq!(
        code(&lyphforge(&["merge", &a, &b, "-o", out.to_str().unwrap()])),
        1
    );
    assert_eq!(
        code(&lyphforge(&["join", &a, &b, "-o", out.to_str().unwrap()])),
        0
    );
    assert!(std::fs::read_to_string(out).unwrap().contains("b:n"));
}

#[test]
fn neurulate_and_query() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture(
        dir.path(),
        "neuron.json",
        r#"{"lyphs": [{"id": "soma", "topology": "BAG-right"}, {"id": "axon", "topology": "BAG-left"}],
            "links": [{"id": "s", "source": "n0", "target": "n1", "conveyingLyph": "soma"},
                      {"id": "a", "source": "n1", "target": "n2", "conveyingLyph": "axon"}]}"#,
    );
    let o = lyphforge(&["neurulate", &input]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1);
    let q = lyphforge(&["query", &input, "--start", "soma"]);
    assert!(code(&q) <= 1);
    let text = String::from_utf8_lossy(&q.stdout);
    assert!(text.contains("\"a\"") && text.contains("\"s\""), "{text}");
}
