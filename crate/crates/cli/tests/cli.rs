use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn tt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tt")).args(args).env_remove("TT_LOG").output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn c(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn near(a: (f64, f64), b: (f64, f64)) -> bool {
    (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9
}

#[test]
fn run_all_square_weave() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sw");
    let r = tt(&["run-all", s(&fixture("square_weave")), "-o", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let stdout = String::from_utf8(r.stdout).unwrap();
    assert!(stdout.contains("2 nondegenerate"), "{stdout}");
    for f in ["system.json", "solutions.json", "report.json"] {
        assert!(out.join(f).exists());
    }
    assert!(!out.join("packing.json").exists());
    let report = json(&out.join("report.json"));
    let geo = report["geometric"].as_array().unwrap();
    assert_eq!(geo.len(), 1);
    let root = &report["solutions"][geo[0].as_u64().unwrap() as usize];
    let labels = &root["labels"];
    assert!(near(c(&labels["w:g:c1"]), (0.0, -0.25)));
    let u = c(&labels["u:eL:h2"]);
    assert!(near((-u.0, -u.1), (0.5, -0.5)));
}

#[test]
fn run_all_borromean_writes_a_packing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let svg = dir.path().join("pic.svg");
    let r = tt(&["run-all", s(&fixture("borromean_fal")), "-o", s(&out), "--svg", s(&svg)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let report = json(&out.join("report.json"));
    assert_eq!(report["geometric"].as_array().unwrap().len(), 1);
    let packing = json(&out.join("packing.json"));
    assert_eq!(packing["verdict"], "univalent");
    assert_eq!(packing["circles"].as_array().unwrap().len(), 4);
    let pic = fs::read_to_string(&svg).unwrap();
    assert!(pic.starts_with("<svg") || pic.starts_with("<?xml"));
    assert!(pic.trim_end().ends_with("</svg>"));
}

#[test]
fn staged_commands_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let diagram = fixture("borromean_fal");
    let run = |tag: &str| -> Vec<Vec<u8>> {
        let f = |n: &str| d.join(format!("{tag}-{n}"));
        let steps: Vec<Vec<String>> = vec![
            vec!["build".into(), s(&diagram).into(), "-o".into(), s(&f("system.json")).into()],
            vec!["solve".into(), s(&f("system.json")).into(), "--seed".into(), "3".into(), "-o".into(), s(&f("solutions.json")).into()],
            vec![
                "classify".into(),
                s(&f("solutions.json")).into(),
                "--diagram".into(),
                s(&diagram).into(),
                "-o".into(),
                s(&f("report.json")).into(),
            ],
            vec![
                "pack".into(),
                s(&f("solutions.json")).into(),
                "--diagram".into(),
                s(&diagram).into(),
                "--svg".into(),
                s(&f("packing.svg")).into(),
                "-o".into(),
                s(&f("packing.json")).into(),
            ],
            vec!["cusp".into(), s(&f("solutions.json")).into(), "--diagram".into(), s(&diagram).into(), "-o".into(), s(&f("cusps.json")).into()],
        ];
        for args in steps {
            let args: Vec<&str> = args.iter().map(String::as_str).collect();
            let r = tt(&args);
            assert!(r.status.success(), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
        }
        ["system.json", "solutions.json", "report.json", "packing.json", "packing.svg", "cusps.json"]
            .iter()
            .map(|n| fs::read(f(n)).unwrap())
            .collect()
    };
    let a = run("a");
    let b = run("b");
    assert_eq!(a, b);
    let cusps: Value = serde_json::from_slice(&a[5]).unwrap();
    let shapes: Vec<(f64, f64)> =
        cusps.as_array().unwrap().iter().flat_map(|m| m.as_object().unwrap().values().map(c).collect::<Vec<_>>()).collect();
    assert!(shapes.iter().any(|&z| near(z, (0.0, 2.0))));
}

#[test]
fn build_to_stdout_matches_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("sys.json");
    let r = tt(&["build", s(&fixture("trefoil")), "-o", s(&f)]);
    assert!(r.status.success());
    let r2 = tt(&["build", s(&fixture("trefoil"))]);
    assert_eq!(r2.stdout, fs::read(&f).unwrap());
}

#[test]
fn missing_input_is_a_validation_error() {
    let r = tt(&["build", "/nonexistent/diagram.json"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&r.stderr).contains("cannot read"));
}

#[test]
fn crossingless_diagram_is_a_validation_error() {
    let r = tt(&["build", s(&fixture("unknot"))]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn bad_meridian_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    for m in ["K0", "nosuchcusp=1:0", "K0=banana"] {
        let r = tt(&["run-all", s(&fixture("square_weave")), "--meridian", m, "-o", s(dir.path())]);
        assert_eq!(r.status.code(), Some(2), "{m}: {}", String::from_utf8_lossy(&r.stderr));
    }
}

#[test]
fn inconsistent_system_does_not_converge() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    assert!(tt(&["build", s(&fixture("augmented_unknot_pair")), "-o", s(&sys)]).status.success());
    let r = tt(&["solve", s(&sys), "-o", s(&dir.path().join("sol.json"))]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn invalid_solver_settings_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("sys.json");
    assert!(tt(&["build", s(&fixture("trefoil")), "-o", s(&sys)]).status.success());
    let r = tt(&["solve", s(&sys), "--tol", "1e-3", "--dedupe-tol", "1e-4"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn log_level_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("sys.json");
    let out = Command::new(env!("CARGO_BIN_EXE_tt"))
        .args(["build", s(&fixture("trefoil")), "-o", s(&f)])
        .env("TT_LOG", "info")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(!out.stderr.is_empty());
    let quiet = tt(&["build", s(&fixture("trefoil")), "-o", s(&f)]);
    assert!(quiet.stderr.is_empty());
}
