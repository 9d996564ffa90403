use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn linkforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linkforge"))
        .args(args)
        .env_remove("LINKFORGE_SEED")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn report(germ: &str, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "report",
        germ,
        "--depth",
        "6",
        "--refute-samples",
        "20000",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    linkforge(&args)
}

#[test]
fn rudolph_g_report_identifies_figure_eight() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle.json");
    let svg = dir.path().join("knot.svg");
    let o = report("rudolph_g", &out, &["-r", "2,3,4", "--svg", svg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let b = read(&out);
    assert_eq!(b["schema"], "linkforge/1");
    assert_eq!(b["label"], "figure-eight (4₁)");
    assert_eq!(b["fox_orders"], serde_json::json!({"2": 5, "3": 16, "4": 45}));
    assert_eq!(b["passed"], true);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn trivial_plane_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bundle.json");
    let o = report("trivial_plane", &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read(&out)["passed"], true);
}

#[test]
fn bundle_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let t = dir.path().join("t.json");
    report("rudolph_g", &a, &["--timings", t.to_str().unwrap()]);
    report("rudolph_g", &b, &["--jobs", "1"]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(read(&t)["wall_ms"].is_object());
}

#[test]
fn missing_germ_is_bad_input() {
    let o = linkforge(&["certify", "no_such_germ"]);
    assert_eq!(o.status.code(), Some(2));
    let o = linkforge(&["trace", "trivial_plane", "--eps", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_germ_fails_certification() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("degenerate.txt");
    std::fs::write(&src, "x1 ; x1\n").unwrap();
    let out = dir.path().join("cert.json");
    let o = linkforge(&[
        "certify",
        src.to_str().unwrap(),
        "--nvars",
        "4",
        "--depth",
        "3",
        "--refute-samples",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let c = read(&out);
    assert_eq!(c["schema"], "linkforge/1");
    assert!(!c["witnesses"].as_array().unwrap().is_empty());
}

#[test]
fn trace_knot_and_cover_chain() {
    let dir = tempfile::tempdir().unwrap();
    let link = dir.path().join("link.json");
    let knot = dir.path().join("knot.json");
    let cover = dir.path().join("cover.json");
    let l = link.to_str().unwrap();
    assert!(linkforge(&["trace", "rudolph_g", "--out", l]).status.success());
    assert_eq!(read(&link)["schema"], "linkforge/1");

    let o = linkforge(&["knot", "--link", l, "-r", "2,3", "--out", knot.to_str().unwrap()]);
    assert!(o.status.success());
    let k = read(&knot);
    assert_eq!(k["label"], "figure-eight (4₁)");
    assert_eq!(k["fox_orders"], serde_json::json!({"2": 5, "3": 16}));

    let o = linkforge(&["verify-cover", "rudolph_g", "-r", "3", "--link", l, "--out", cover.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(read(&cover)["passed"], true);

    // a link traced for another germ is rejected
    let o = linkforge(&["verify-cover", "trivial_plane", "-r", "2", "--link", l]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn catalog_lists_builtins() {
    let o = linkforge(&["catalog", "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = v["germs"].as_array().unwrap().iter().map(|g| g["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"rudolph_g") && names.contains(&"trivial_plane"));
}
