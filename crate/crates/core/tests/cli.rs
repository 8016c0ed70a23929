use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use quador_fillet::io::read_stl;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn quador(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quador")).args(args).output().unwrap()
}

fn out_path(dir: &Path, name: &str) -> String {
    dir.join(name).to_string_lossy().into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(quador(&["--help"]).status.code(), Some(0));
    assert_eq!(quador(&["--version"]).status.code(), Some(0));
    assert_eq!(quador(&["mesh", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(quador(&[]).status.code(), Some(1));
    assert_eq!(quador(&["frobnicate"]).status.code(), Some(1));
    let f = fixture("two_beam_beta1");
    assert_eq!(quador(&["mesh", &f, "--resolution", "1", "-o", "/dev/null"]).status.code(), Some(1));
    assert_eq!(quador(&["mesh", &f, "--bounds", "1,2,3", "-o", "/dev/null"]).status.code(), Some(1));
    // --points and --grid are mutually exclusive
    assert_eq!(quador(&["sample", &f, "--points", "a.csv", "--grid", "2,2,2"]).status.code(), Some(1));
}

#[test]
fn missing_input_exits_two() {
    let out = quador(&["verify", "/nonexistent/lattice.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn invalid_lattice_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(dir.path(), "bad.json");
    std::fs::write(&path, r#"{"hubs":[{"id":"a","center":[0,0,0],"radius":-1}],"beams":[]}"#).unwrap();
    assert_eq!(quador(&["verify", &path]).status.code(), Some(1));
    std::fs::write(&path, "{ not json").unwrap();
    let out = quador(&["mesh", &path, "-o", &out_path(dir.path(), "m.stl")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_passes_and_corruption_exits_three() {
    let f = fixture("two_beam_beta1");
    let out = quador(&["verify", &f]);
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["summary"]["fail"], 0);

    let out = quador(&["verify", &f, "--corrupt-fillet"]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let detail = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "fillet_identity")
        .unwrap()["detail"]
        .as_str()
        .unwrap()
        .to_owned();
    assert!(detail.starts_with("IDENTITY_VIOLATION"), "{detail}");
}

#[test]
fn conics_without_fillets_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = quador(&["conics", &fixture("two_beam_bare"), "-o", &out_path(dir.path(), "c.obj")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn chamfer_conics_are_four_lines() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(dir.path(), "c.obj");
    let out = quador(&["conics", &fixture("two_beam_chamfer"), "--samples-per-curve", "16", "-o", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "polylines: 4");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("l ")).count(), 4);
    assert!(text.contains("PARALLEL_LINES"));
}

#[test]
fn malformed_csv_names_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = out_path(dir.path(), "p.csv");
    std::fs::write(&csv, "x,y,z\n0,0,0\n1,two,3\n").unwrap();
    let out = quador(&["sample", &fixture("two_beam_beta1"), "--points", &csv, "-o", &out_path(dir.path(), "s.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 3"), "{err}");
}

#[test]
fn grid_sampling_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(dir.path(), "s.csv");
    let out = quador(&["sample", &fixture("two_beam_beta1"), "--grid", "3,4,5", "-o", &path]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 1 + 60);
}

/// Every edge of the OBJ mesh is shared by exactly two faces.
#[test]
fn obj_mesh_is_closed() {
    let dir = tempfile::tempdir().unwrap();
    let path = out_path(dir.path(), "m.obj");
    let out = quador(&["mesh", &fixture("two_beam_beta1"), "--resolution", "32", "--format", "obj", "-o", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut edges = std::collections::HashMap::new();
    for line in text.lines().filter(|l| l.starts_with("f ")) {
        let idx: Vec<u32> = line[2..].split_whitespace().map(|s| s.parse().unwrap()).collect();
        for i in 0..3 {
            let (a, b) = (idx[i], idx[(i + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    assert!(!edges.is_empty());
    assert!(edges.values().all(|&n| n == 2));
}

#[test]
fn mesh_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (out_path(dir.path(), "a.stl"), out_path(dir.path(), "b.stl"));
    let f = fixture("asymmetric_beam");
    for p in [&a, &b] {
        assert_eq!(quador(&["mesh", &f, "--resolution", "40", "-o", p]).status.code(), Some(0));
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert!(!read_stl(x.as_slice()).unwrap().is_empty());
}

#[test]
fn classify_lists_every_surface() {
    let out = quador(&["classify", &fixture("two_beam_chamfer")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("b0") && text.contains("b1"));
    assert!(text.contains("PARALLEL_PLANES"));
    assert!(text.contains("chamfer"));
}
