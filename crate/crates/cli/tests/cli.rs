use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hardy_core::corpus::arc_indicator;
use hardy_core::format::{write_function, FileKind};
use hardy_core::spectral::{CircleFunction, Grid};
use num_complex::Complex64;
use serde_json::Value;
use tempfile::TempDir;

fn hardy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn save(dir: &TempDir, name: &str, f: &CircleFunction) -> PathBuf {
    let path = dir.path().join(name);
    write_function(&path, f, FileKind::Samples).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn grid(n: usize) -> Grid {
    Grid::new(n).unwrap()
}

#[test]
fn norm_of_constant_one() {
    let dir = TempDir::new().unwrap();
    let one = save(&dir, "one.txt", &CircleFunction::constant(grid(256), Complex64::new(1.0, 0.0)));
    for norm in ["lp:1", "lp:3", "linf", "mix", "lorentz:2:1", "orlicz:llogl"] {
        let out = hardy(&["norm", s(&one), "--norm", norm]);
        assert_eq!(code(&out), 0, "{norm}: {}", String::from_utf8_lossy(&out.stderr));
        let v: f64 = stdout(&out).trim().parse().unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{norm}: {v}");
    }
    let out = hardy(&["norm", s(&one), "--norm", "lp:1.5", "--dual"]);
    assert_eq!(stdout(&out).trim(), "1.0");
}

#[test]
fn dual_methods_agree_on_l2() {
    let dir = TempDir::new().unwrap();
    let f = CircleFunction::from_angle_fn(grid(64), |t| Complex64::new(t.cos() + 0.5, t.sin()));
    let path = save(&dir, "f.txt", &f);
    let mut values = Vec::new();
    for method in ["closed_form", "ascent"] {
        let out = hardy(&["norm", s(&path), "--norm", "lp:2", "--dual", "--method", method]);
        assert_eq!(code(&out), 0);
        values.push(stdout(&out).trim().parse::<f64>().unwrap());
    }
    assert!((values[0] - values[1]).abs() < 1e-6 * values[0]);
    assert!((values[0] - f.l2_norm()).abs() < 1e-12);
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "grid_size 8\nkind samples\n0 1.0\n").unwrap();
    assert_eq!(code(&hardy(&["norm", s(&bad)])), 2);
    let one = save(&dir, "one.txt", &CircleFunction::constant(grid(8), Complex64::new(1.0, 0.0)));
    assert_eq!(code(&hardy(&["norm", s(&one), "--norm", "lp:banana"])), 2);
    assert_eq!(code(&hardy(&["norm", s(&one), "--dual", "--method", "newton"])), 2);
}

#[test]
fn invalid_orlicz_table_exits_3() {
    let dir = TempDir::new().unwrap();
    let one = save(&dir, "one.txt", &CircleFunction::constant(grid(8), Complex64::new(1.0, 0.0)));
    let config = dir.path().join("norm.toml");
    // slopes 2 then 1: not convex
    std::fs::write(&config, "variant = \"orlicz\"\ntable = [[0.0, 0.0], [1.0, 2.0], [2.0, 3.0]]\n").unwrap();
    let rep = dir.path().join("r.json");
    let out = hardy(&["norm", s(&one), "--norm-config", s(&config), "--report", s(&rep)]);
    assert_eq!(code(&out), 3);
    let r = report(&rep);
    assert_eq!(r["error"]["kind"], "axiom_validation");
    assert_eq!(r["exit_code"], 3);
}

#[test]
fn arc_modulus_exits_4() {
    let dir = TempDir::new().unwrap();
    let arc = save(&dir, "arc.txt", &arc_indicator(grid(1024), &[(0.0, PI)]));
    assert_eq!(code(&hardy(&["outer", s(&arc)])), 4);
    // not analytic, so rejected before the modulus is examined
    assert_eq!(code(&hardy(&["factorize", s(&arc)])), 1);
}

#[test]
fn vanishing_symbol_exits_5() {
    let dir = TempDir::new().unwrap();
    let k = CircleFunction::from_angle_fn(grid(1024), |t| Complex64::new(2.0 + 2.0 * t.cos(), 0.0));
    let path = save(&dir, "k.txt", &k);
    assert_eq!(code(&hardy(&["factorize", s(&path), "--inverse-bounded"])), 5);
}

#[test]
fn zero_generator_exits_6() {
    let dir = TempDir::new().unwrap();
    let zero = save(&dir, "zero.txt", &CircleFunction::constant(grid(256), Complex64::new(0.0, 0.0)));
    assert_eq!(code(&hardy(&["classify", s(&zero), "--n-basis", "8", "--m-trunc", "32"])), 6);
}

#[test]
fn missing_file_exits_7() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.txt");
    assert_eq!(code(&hardy(&["norm", s(&missing)])), 7);
}

#[test]
fn classify_exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = grid(1024);
    let z2 = save(&dir, "z2.txt", &CircleFunction::monomial(g, 2));
    let phi = dir.path().join("phi.txt");
    let rep = dir.path().join("r.json");
    let out = hardy(&["classify", s(&z2), "--n-basis", "16", "--m-trunc", "128", "--phi-out", s(&phi), "--report", s(&rep)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "simply");
    let back = hardy_core::format::read_function(&phi).unwrap();
    assert!(back.max_distance(&CircleFunction::monomial(g, 2)).unwrap() < 1e-10);
    let r = report(&rep);
    assert_eq!(r["verdict"], "simply");
    assert_eq!(r["verification"]["passed"], true);
    assert!(r.get("runtime_seconds").is_none());

    let arc = save(&dir, "arc.txt", &arc_indicator(g, &[(0.0, PI / 2.0)]));
    let out = hardy(&["classify", s(&arc), "--n-basis", "16", "--m-trunc", "128", "--report", s(&rep), "--timing"]);
    assert_eq!(code(&out), 10);
    let r = report(&rep);
    assert_eq!(r["verdict"], "doubly");
    assert_eq!(r["e_mask"]["nodes"], 256);
    assert!(r["runtime_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn under_resolved_arc_exits_11() {
    let dir = TempDir::new().unwrap();
    let arc = save(&dir, "arc.txt", &arc_indicator(grid(256), &[(0.0, 1.5 * PI)]));
    assert_eq!(code(&hardy(&["classify", s(&arc), "--n-basis", "1", "--m-trunc", "8"])), 11);
}

#[test]
fn resolution_errors_exit_1() {
    let dir = TempDir::new().unwrap();
    let z = save(&dir, "z.txt", &CircleFunction::monomial(grid(64), 1));
    assert_eq!(code(&hardy(&["classify", s(&z), "--n-basis", "64", "--m-trunc", "1024"])), 1);
}

#[test]
fn outer_and_factorize_write_outputs() {
    let dir = TempDir::new().unwrap();
    let g = grid(512);
    let modulus = CircleFunction::from_angle_fn(g, |t| Complex64::new(t.cos().exp(), 0.0));
    let path = save(&dir, "phi.txt", &modulus);
    let outer = dir.path().join("g.txt");
    let out = hardy(&["outer", s(&path), "--out", s(&outer)]);
    assert_eq!(code(&out), 0);
    let gfun = hardy_core::format::read_function(&outer).unwrap();
    let expected = CircleFunction::from_fn(g, |z| z.exp());
    assert!(gfun.max_distance(&expected).unwrap() < 1e-10);

    let f = CircleFunction::from_fn(g, |z| z * (z + 1.0) * 0.5);
    let fp = save(&dir, "f.txt", &f);
    let u = dir.path().join("u.txt");
    let o = dir.path().join("o.txt");
    let rep = dir.path().join("r.json");
    let out = hardy(&["factorize", s(&fp), "--unimodular-out", s(&u), "--outer-out", s(&o), "--report", s(&rep)]);
    assert_eq!(code(&out), 0);
    let r = report(&rep);
    assert!(r["residuals"]["reconstruction"].as_f64().unwrap() < 1e-8);
    let uf = hardy_core::format::read_function(&u).unwrap();
    let of = hardy_core::format::read_function(&o).unwrap();
    assert!(uf.try_mul(&of).unwrap().max_distance(&f).unwrap() < 1e-8);
}

#[test]
fn approx_writes_stages() {
    let dir = TempDir::new().unwrap();
    let f = CircleFunction::from_fn(grid(1024), |z| (z * 0.5 + 1.0).ln() + 2.0);
    let path = save(&dir, "f.txt", &f);
    let stages = dir.path().join("stages");
    let rep = dir.path().join("r.json");
    let out = hardy(&["approx", s(&path), "--stages", "4", "--out-dir", s(&stages), "--report", s(&rep)]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 4);
    for j in 0..4 {
        assert!(stages.join(format!("stage_{j}.txt")).exists());
    }
    assert_eq!(report(&rep)["non_increasing"], true);
}

#[test]
fn validate_reports_continuity() {
    let dir = TempDir::new().unwrap();
    let rep = dir.path().join("r.json");
    let out = hardy(&["validate", "--norm", "linf", "--trials", "20", "--grid", "256", "--report", s(&rep)]);
    assert_eq!(code(&out), 0);
    let r = report(&rep);
    assert_eq!(r["axioms"]["passed"], true);
    assert_eq!(r["continuity"]["continuous"], false);
    let out = hardy(&["validate", "--norm", "lp:2", "--trials", "20", "--grid", "256", "--report", s(&rep)]);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&rep)["continuity"]["continuous"], true);
}

#[test]
fn corpus_writes_manifest() {
    let dir = TempDir::new().unwrap();
    let out = hardy(&["corpus", s(dir.path()), "--grid", "256"]);
    assert_eq!(code(&out), 0);
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let items = manifest["items"].as_array().unwrap();
    assert!(items.len() >= 20);
    for item in items {
        assert!(dir.path().join(item["file"].as_str().unwrap()).exists());
    }
}

#[test]
fn half_circle_l1_norm() {
    let dir = TempDir::new().unwrap();
    let arc = save(&dir, "arc.txt", &arc_indicator(grid(1024), &[(0.0, PI)]));
    let out = hardy(&["norm", s(&arc), "--norm", "lp:1"]);
    assert_eq!(stdout(&out).trim(), "0.5");
}

#[test]
fn outer_of_modulus_of_one_plus_z() {
    let dir = TempDir::new().unwrap();
    let g = grid(4096);
    let modulus = CircleFunction::from_fn(g, |z| Complex64::new((z + 1.0).norm(), 0.0));
    let path = save(&dir, "m.txt", &modulus);
    let outer = dir.path().join("g.txt");
    assert_eq!(code(&hardy(&["outer", s(&path), "--out", s(&outer)])), 0);
    let gfun = hardy_core::format::read_function(&outer).unwrap();
    assert!(gfun.max_distance(&CircleFunction::from_fn(g, |z| z + 1.0)).unwrap() < 1e-8);
}

#[test]
fn blaschke_factor_is_its_own_inner_part() {
    let dir = TempDir::new().unwrap();
    let g = grid(1024);
    let b = CircleFunction::from_fn(g, hardy_core::corpus::blaschke_factor(Complex64::new(0.5, 0.0)));
    let path = save(&dir, "b.txt", &b);
    let u = dir.path().join("u.txt");
    let o = dir.path().join("o.txt");
    assert_eq!(code(&hardy(&["factorize", s(&path), "--unimodular-out", s(&u), "--outer-out", s(&o)])), 0);
    let uf = hardy_core::format::read_function(&u).unwrap();
    let of = hardy_core::format::read_function(&o).unwrap();
    assert!(uf.max_distance(&b).unwrap() < 1e-10);
    assert!(of.max_distance(&CircleFunction::constant(g, Complex64::new(1.0, 0.0))).unwrap() < 1e-10);
}

#[test]
fn outer_generator_has_trivial_phi() {
    let dir = TempDir::new().unwrap();
    let g = grid(1024);
    let f = save(&dir, "f.txt", &CircleFunction::from_fn(g, |z| z * 0.5 + 1.0));
    let phi = dir.path().join("phi.txt");
    let out = hardy(&["classify", s(&f), "--n-basis", "16", "--m-trunc", "128", "--phi-out", s(&phi)]);
    assert_eq!(code(&out), 0);
    let pf = hardy_core::format::read_function(&phi).unwrap();
    assert!(pf.max_distance(&CircleFunction::constant(g, Complex64::new(1.0, 0.0))).unwrap() < 1e-8);
}
