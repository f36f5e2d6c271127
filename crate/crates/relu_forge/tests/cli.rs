use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relu-forge"))
        .args(args)
        .env_remove("RELU_FORGE_EVAL_CAP")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

fn build(dir: &TempDir, name: &str, extra: &[&str]) -> String {
    let p = path(dir, name);
    let mut args = vec!["build", "--out", &p];
    args.extend_from_slice(extra);
    let out = forge(&args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    p
}

#[test]
fn build_then_certify() {
    let dir = TempDir::new().unwrap();
    let net = build(&dir, "abs.json", &["--target", "abs", "--N", "2", "--L", "2"]);
    let out = forge(&["certify", "--network", &net]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,L,K,delta,norm,measured_out,bound_out,measured_global,bound_global,pass");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], &["2", "2", "16"]);
    assert_eq!(row[9], "true");

    let inspect = forge(&["inspect", "--network", &net]);
    assert_eq!(code(&inspect), 0);
    let info = String::from_utf8(inspect.stdout).unwrap();
    assert!(info.contains("meta.target: abs"));
    assert!(info.contains("input_dim: 1"));
}

#[test]
fn constant_target_certifies() {
    let dir = TempDir::new().unwrap();
    let net = build(&dir, "c.json", &["--target", "const", "--N", "1", "--L", "1"]);
    assert_eq!(code(&forge(&["certify", "--network", &net])), 0);
}

#[test]
fn certification_failure_exit_code() {
    let dir = TempDir::new().unwrap();
    let net = build(&dir, "c.json", &["--target", "const", "--N", "1", "--L", "1"]);
    let out = forge(&["certify", "--network", &net, "--target", "abs"]);
    assert_eq!(code(&out), 4);
    assert!(String::from_utf8(out.stdout).unwrap().trim_end().ends_with("false"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&forge(&[])), 2);
    assert_eq!(code(&forge(&["build", "--target", "abs"])), 2);
    assert_eq!(code(&forge(&["build", "--target", "abs", "--N", "x", "--L", "1"])), 2);
    assert_eq!(code(&forge(&["build", "--target", "nope", "--N", "1", "--L", "1"])), 2);
    assert_eq!(code(&forge(&["build", "--target", "abs", "--N", "1", "--L", "1", "--norm", "inf"])), 2);
    assert_eq!(code(&forge(&["plan", "--epsilon", "1.5", "--d", "2", "--p", "4"])), 2);
    assert_eq!(code(&forge(&["--help"])), 0);
}

#[test]
fn capacity_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_relu-forge"))
        .args(["build", "--target", "holder_sqrt", "--N", "4", "--L", "4"])
        .env("RELU_FORGE_EVAL_CAP", "10")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("RELU_FORGE_EVAL_CAP"));
}

#[test]
fn bad_documents_exit_3() {
    let dir = TempDir::new().unwrap();
    let net = build(&dir, "abs.json", &["--target", "abs", "--N", "1", "--L", "1"]);
    let text = std::fs::read_to_string(&net).unwrap();
    let broken = path(&dir, "broken.json");
    std::fs::write(&broken, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&forge(&["certify", "--network", &broken])), 3);
    assert_eq!(code(&forge(&["inspect", "--network", &broken])), 3);
    let versioned = path(&dir, "v9.json");
    std::fs::write(&versioned, text.replacen("\"format_version\": 1", "\"format_version\": 9", 1).replacen("\"format_version\":1", "\"format_version\":9", 1)).unwrap();
    assert_eq!(code(&forge(&["inspect", "--network", &versioned])), 3);
    assert_eq!(code(&forge(&["inspect", "--network", &path(&dir, "missing.json")])), 3);
}

#[test]
fn extend_and_manifold_rows() {
    let dir = TempDir::new().unwrap();
    let dom = path(&dir, "dom.csv");
    let mut csv = String::from("x,value\n");
    for i in 0..=20 {
        let x = -1.0 + i as f64 / 10.0;
        csv.push_str(&format!("{x},{}\n", (x as f64).abs()));
    }
    std::fs::write(&dom, csv).unwrap();
    let net = path(&dir, "ext.json");
    let out = forge(&["extend", "--domain", &dom, "--modulus", "lipschitz:1", "--N", "2", "--L", "2", "--network-out", &net]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("N,L,d,R,samples,measured_sup,bound,pass\n2,2,1,1,21,"));
    assert!(Path::new(&net).exists());
    assert_eq!(code(&forge(&["certify", "--network", &net])), 2);

    let bad = path(&dir, "bad.csv");
    std::fs::write(&bad, "0,0\n0.01,5\n").unwrap();
    assert_eq!(code(&forge(&["extend", "--domain", &bad, "--modulus", "lipschitz:1", "--N", "1", "--L", "1"])), 3);

    let out = forge(&["manifold", "--cloud", "helix", "--d-delta", "3", "--N", "2", "--L", "2", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("d,d_delta,delta,epsilon,N,L,seed,measured_sup,bound,pass\n10,3,0.5,0.01,2,2,"));
    assert!(text.trim_end().ends_with("true"));
}

#[test]
fn plan_rows() {
    let out = forge(&["plan", "--epsilon", "0.1", "--d", "2", "--p", "1000000"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let cost = 1.0 + 10f64.ln();
    assert_eq!(text.lines().nth(1).unwrap(), format!("0.1,1,2,1000000,case2.1,10,1,{cost}"));
}

#[test]
fn commands_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["sweep", "--target", "abs", "--N", "1,2", "--L", "1,2", "--samples", "2000"],
        vec!["sweep", "--target", "holder_sqrt", "--N", "1,2", "--L", "1", "--samples", "5000", "--seed", "3"],
        vec!["plan", "--epsilon", "0.01", "--d", "2", "--p", "100"],
        vec!["manifold", "--cloud", "helix", "--d-delta", "3", "--N", "1", "--L", "1", "--seed", "2"],
    ];
    for args in runs {
        let a = forge(&args);
        let b = forge(&args);
        assert_eq!(code(&a), 0, "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let x = build(&dir, "x.json", &["--target", "sin_sum", "--d", "2", "--N", "2", "--L", "1"]);
    let y = build(&dir, "y.json", &["--target", "sin_sum", "--d", "2", "--N", "2", "--L", "1"]);
    assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
}
