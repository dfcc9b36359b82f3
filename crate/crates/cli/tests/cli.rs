use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sqpers(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqpers"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = sqpers(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(dir: &Path, args: &[&str]) -> Value {
    serde_json::from_str(&ok(dir, args)).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    sqpers(dir, args).status.code().unwrap()
}

fn dmat(dir: &Path, name: &str) -> Vec<Vec<f64>> {
    let text = std::fs::read_to_string(dir.join(name)).unwrap();
    let mut lines = text.lines();
    let n: usize = lines.next().unwrap().trim().parse().unwrap();
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), n);
    rows
}

#[test]
fn make_circle_grid() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["make", "circle", "--count", "40", "--radius", "1", "--grid", "-o", "c.dmat"]);
    let d = dmat(dir.path(), "c.dmat");
    assert_eq!(d.len(), 40);
    for i in 0..40 {
        assert!((d[i][(i + 1) % 40] - PI / 20.0).abs() < 1e-12);
    }
}

#[test]
fn make_projective_plane_sample() {
    let dir = TempDir::new().unwrap();
    ok(dir.path(), &["make", "rp", "--dim", "2", "--count", "30", "--seed", "7", "-o", "rp.dmat"]);
    let d = dmat(dir.path(), "rp.dmat");
    assert_eq!(d.len(), 30);
    assert!(d.iter().flatten().all(|&x| x <= PI + 1e-9));
    ok(dir.path(), &["make", "rp", "--dim", "2", "--count", "30", "--seed", "7", "-o", "again.dmat"]);
    assert_eq!(
        std::fs::read(dir.path().join("rp.dmat")).unwrap(),
        std::fs::read(dir.path().join("again.dmat")).unwrap()
    );
}

#[test]
fn make_wedge_and_product() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "circle", "--count", "6", "--grid", "-o", "circle.dmat"]);
    ok(p, &["make", "sphere", "--count", "10", "--grid", "-o", "sphere.dmat"]);
    ok(p, &["make", "wedge", "--a", "circle.dmat", "--a-base", "0", "--b", "sphere.dmat", "--b-base", "0", "-o", "w.dmat"]);
    let w = dmat(p, "w.dmat");
    assert_eq!(w.len(), 15);
    let c = dmat(p, "circle.dmat");
    let s = dmat(p, "sphere.dmat");
    assert_eq!(w[2][6 + 3], c[2][0] + s[0][4]);
    ok(p, &["make", "product", "--a", "circle.dmat", "--b", "circle.dmat", "-o", "p.dmat"]);
    assert_eq!(dmat(p, "p.dmat").len(), 36);
    assert_eq!(code(p, &["make", "wedge", "--a", "circle.dmat"]), 2);
    assert_eq!(code(p, &["make", "circle"]), 2);
}

#[test]
fn circle_barcode_and_radius() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "circle", "--count", "40", "--grid", "-o", "c.dmat"]);
    let args = [
        "barcode", "c.dmat", "--max-dim", "2", "--max-scale", "2.5", "--degree", "1", "--radius", "dominant", "--svg",
        "c.svg", "--csv", "c.csv",
    ];
    let v = json(p, &args);
    assert_eq!(v["operation"], "id");
    let bars = v["bars"].as_array().unwrap();
    let long: Vec<&Value> = bars
        .iter()
        .filter(|b| b["death"].as_f64().unwrap() - b["birth"].as_f64().unwrap() > 0.5)
        .collect();
    assert_eq!(long.len(), 1);
    let death = long[0]["death"].as_f64().unwrap();
    assert!((death - 2.0 * PI / 3.0).abs() <= PI / 20.0);
    assert_eq!(v["radius"]["vr_scale"].as_f64().unwrap(), death);
    assert!((v["radius"]["u_scale"].as_f64().unwrap() - death / 2.0).abs() < 1e-8);
    assert!(std::fs::read_to_string(p.join("c.svg")).unwrap().starts_with("<svg"));
    assert!(std::fs::read_to_string(p.join("c.csv")).unwrap().starts_with("degree,birth,death,mult,infinite"));
    // Byte-identical on a rerun.
    let again = ok(p, &["barcode", "c.dmat", "--max-dim", "2", "--max-scale", "2.5", "--degree", "1"]);
    assert_eq!(again, ok(p, &["barcode", "c.dmat", "--max-dim", "2", "--max-scale", "2.5", "--degree", "1"]));
}

#[test]
fn reduced_drops_one_essential_component() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "circle", "--count", "5", "--grid", "-o", "c.dmat"]);
    let full = json(p, &["barcode", "c.dmat", "--max-dim", "1", "--max-scale", "inf", "--degree", "0"]);
    let reduced = json(p, &["barcode", "c.dmat", "--max-dim", "1", "--max-scale", "inf", "--degree", "0", "--reduced"]);
    let infinite = |v: &Value| v["bars"].as_array().unwrap().iter().filter(|b| b["death"].is_null()).count();
    assert_eq!(infinite(&full), 1);
    assert_eq!(infinite(&reduced), 0);
}

#[test]
fn projective_plane_square() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "rp2-complex", "-o", "rp2.cplx"]);
    let v = json(p, &["image-barcode", "rp2.cplx", "--op", "sq:1", "--source-degree", "1"]);
    assert_eq!(v["operation"], "Sq1");
    assert_eq!(
        v["bars"],
        serde_json::json!([{"degree": 2, "birth": 0.0, "death": null, "death_u_scale": null, "mult": 1}])
    );
    let k = json(p, &["kernel-barcode", "rp2.cplx", "--op", "sq:1", "--source-degree", "1"]);
    assert_eq!(k["bars"], serde_json::json!([]));
    assert_eq!(code(p, &["image-barcode", "rp2.cplx", "--op", "steenrod", "--source-degree", "1"]), 2);
}

#[test]
fn empty_complex_gives_empty_bars() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("empty.cplx"), "# nothing\n").unwrap();
    let v = json(dir.path(), &["barcode", "empty.cplx"]);
    assert_eq!(v["bars"], serde_json::json!([]));
}

#[test]
fn validation_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "circle", "--count", "4", "--grid", "-o", "c.dmat"]);
    assert_eq!(code(p, &["barcode", "c.dmat"]), 2, "caps are mandatory");
    assert_eq!(code(p, &["barcode", "c.dmat", "--max-dim", "2"]), 2);
    assert_eq!(code(p, &["barcode", "missing.dmat", "--max-dim", "2", "--max-scale", "1"]), 2);
    assert_eq!(code(p, &["make", "circle", "--count", "4", "--grid", "-o", "c.dmat"]), 2, "no silent overwrite");
    ok(p, &["make", "circle", "--count", "4", "--grid", "-o", "c.dmat", "--force"]);
    std::fs::write(p.join("bad.dmat"), "2\n0 1\n2 0\n").unwrap();
    assert_eq!(code(p, &["vr", "bad.dmat", "--max-dim", "1", "--max-scale", "1"]), 2);
}

#[test]
fn vr_from_points() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(p.join("pts.csv"), "x,y\n0,0\n1,0\n0,1\n").unwrap();
    let text = ok(p, &["vr", "pts.csv", "--max-dim", "2", "--max-scale", "inf"]);
    assert_eq!(text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()).count(), 7);
    std::fs::write(p.join("off.csv"), "1,0,0\n0,2,0\n").unwrap();
    assert_eq!(code(p, &["vr", "off.csv", "--max-dim", "1", "--max-scale", "1", "--metric", "sphere:1"]), 2);
}

#[test]
fn bottleneck_between_files() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    std::fs::write(
        p.join("a.json"),
        r#"{"field":"F2","operation":"id","bars":[{"degree":1,"birth":0,"death":2,"mult":1}]}"#,
    )
    .unwrap();
    std::fs::write(
        p.join("b.json"),
        r#"{"field":"F2","operation":"id","bars":[{"degree":1,"birth":0.5,"death":2,"mult":1},{"degree":0,"birth":0,"death":null}]}"#,
    )
    .unwrap();
    let v = json(p, &["bottleneck", "a.json", "b.json"]);
    assert_eq!(v["per_degree"], serde_json::json!([{"degree": 0, "d_B": null}, {"degree": 1, "d_B": 0.5}]));
    let same = json(p, &["bottleneck", "a.json", "a.json", "--degree", "1"]);
    assert_eq!(same["per_degree"][0]["d_B"], 0.0);
}

#[test]
fn gh_bound_of_a_space_with_itself_is_zero() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(p, &["make", "circle", "--count", "12", "--grid", "-o", "c.dmat"]);
    let v = json(
        p,
        &["gh-bound", "c.dmat", "c.dmat", "--max-dim", "3", "--max-scale", "inf", "--op", "sq:1", "--source-degree", "1"],
    );
    assert_eq!(v["gh_lower_bound"], 0.0);
    let names: Vec<&str> = v["per_invariant"].as_array().unwrap().iter().map(|d| d["invariant"].as_str().unwrap()).collect();
    assert_eq!(names, ["H0", "H1", "H2", "imgSq1@deg2"]);
    assert_eq!(code(p, &["gh-bound", "c.dmat", "c.dmat", "--max-dim", "2", "--max-scale", "inf"]), 2, "H2 needs dim 3");
}

#[test]
fn verify_suites() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let v = json(p, &["verify", "wedge", "--seed", "3"]);
    assert_eq!(v["passed"], true);
    assert_eq!(json(p, &["verify", "adem-sq1"])["passed"], true);
    assert_eq!(json(p, &["verify", "bottleneck-oracle", "--trials", "200"])["passed"], true);
    let all = json(p, &["verify", "all", "--trials", "3"]);
    assert_eq!(all.as_array().unwrap().len(), 7);
    assert_eq!(code(p, &["verify", "nope"]), 2);
}
