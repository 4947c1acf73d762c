use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenes").join(name)
}

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wulffkit"))
        .args(args)
        .env("WULFFKIT_CACHE_DIR", cache)
        .output()
        .expect("run wulffkit")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn square_ball_profile_passes_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cache = dir.path().join("cache");
    let s = scene("square_ball.json");
    let args = ["profile", "--scene", s.to_str().unwrap(), "--seed", "7", "--out", out.to_str().unwrap()];
    let o = run(&args, &cache);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["profile.csv", "reports.json", "profile.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let csv = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    assert!(csv.starts_with("# seed=7\nv,I,psi,method,descriptor\n"));
    let rep = json(&out.join("reports.json"));
    assert_eq!(rep["seed"], 7);
    assert_eq!(rep["pass"], true);
    for c in rep["reports"]["checks"].as_array().unwrap() {
        assert!(c.get("value").is_some() && c.get("tolerance").is_some() && c.get("source").is_some());
    }
    assert!(std::fs::read_to_string(out.join("profile.svg")).unwrap().contains("seed=7"));

    // Second run is served from the cache and reproduces the table.
    let out2 = dir.path().join("again");
    let args2 = ["profile", "--scene", s.to_str().unwrap(), "--seed", "7", "--out", out2.to_str().unwrap()];
    let o2 = run(&args2, &cache);
    assert_eq!(o2.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o2.stdout).contains("cache hit"));
    assert_eq!(
        std::fs::read(out.join("profile.csv")).unwrap(),
        std::fs::read(out2.join("profile.csv")).unwrap()
    );
}

#[test]
fn negative_radius_is_an_input_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("bad_radius.json");
    let o = run(
        &["profile", "--scene", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--no-cache"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("body") && err.contains("radius"), "{err}");
}

#[test]
fn unknown_keys_and_tolerances_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("typo.json");
    std::fs::write(
        &bad,
        r#"{"body": {"kind": "ball", "dim": 2, "radius": 1}, "domain": {"kind": "disk2d", "center": [0, 0], "radius": 1}, "gird": 5}"#,
    )
    .unwrap();
    let o = run(&["profile", "--scene", bad.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gird"));

    let s = scene("wulff_dilation.json");
    let o = run(
        &["variation", "--scene", s.to_str().unwrap(), "--tol", "nonsense=1", "--out", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nonsense"));
}

#[test]
fn wulff_dilation_has_first_variation_two_pi() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("wulff_dilation.json");
    let o = run(&["variation", "--scene", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("variation.json"));
    let a1 = rep["report"]["a_prime_analytic"].as_f64().unwrap();
    let fd = rep["report"]["a_prime_fd"]["value"].as_f64().unwrap();
    assert!((a1 - std::f64::consts::TAU).abs() < 1e-10, "{a1}");
    assert!((fd - std::f64::consts::TAU).abs() < 1e-6, "{fd}");
    let csv = std::fs::read_to_string(dir.path().join("flow.csv")).unwrap();
    assert!(csv.starts_with("# seed=7\nt,A_K,V\n"));
}

#[test]
fn failing_tolerance_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let s = scene("wulff_dilation.json");
    let o = run(
        &["variation", "--scene", s.to_str().unwrap(), "--tol", "fd_rel=1e-300", "--out", dir.path().to_str().unwrap()],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));
}

#[test]
fn body_and_surface_commands_record_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let b = scene("fourier_body.json");
    let o = run(&["body", "--scene", b.to_str().unwrap(), "--seed", "11", "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("body.json"));
    assert_eq!(rep["seed"], 11);
    assert!(rep["ellipticity"]["lower"].as_f64().unwrap() > 0.0);

    let s = scene("ellipse_on_wulff.json");
    let o = run(&["surface", "--scene", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = json(&dir.path().join("surface.json"));
    assert!((rep["curvature"]["mean"].as_f64().unwrap() + 1.0).abs() < 1e-8);
    let csv = std::fs::read_to_string(dir.path().join("surface.csv")).unwrap();
    assert!(csv.starts_with("# seed=7\nu,v,x,y,z,Nx,Ny,Nz,phiK,HK,trace_gap\n"));
}

#[test]
fn suite_summary_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(
            &["suite", "--criteria", "1,4", "--seed", "7", "--jobs", "1", "--out", out.to_str().unwrap()],
            dir.path(),
        );
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let sa = std::fs::read(a.join("summary.json")).unwrap();
    assert_eq!(sa, std::fs::read(b.join("summary.json")).unwrap());
    let summary: serde_json::Value = serde_json::from_slice(&sa).unwrap();
    assert_eq!(summary["seed"], 7);
    assert_eq!(summary["criteria"].as_array().unwrap().len(), 2);
}
