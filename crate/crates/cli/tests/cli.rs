use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cohertk"));
    c.env_remove("COHERTK_SEED");
    c
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn state(dir: &Path, name: &str, dims: &[usize], probs: &[f64]) -> PathBuf {
    let amps: Vec<[f64; 2]> = probs.iter().map(|p| [p.sqrt(), 0.0]).collect();
    write(dir, name, &serde_json::json!({"dims": dims, "amps": amps}).to_string())
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn classify_uniform_two_qubit_state() {
    let d = TempDir::new().unwrap();
    let s = state(d.path(), "psi.json", &[2, 2], &[0.25; 4]);
    let v = json(&run(&["classify", "--state", p(&s)]));
    assert_eq!(v["R"], 4);
    assert_eq!(v["r"], serde_json::json!([1.0, 0.0]));
}

#[test]
fn source_coherence_of_qubit_example() {
    let d = TempDir::new().unwrap();
    let s = state(d.path(), "psi.json", &[2], &[0.6, 0.4]);
    let v = json(&run(&["monotone", "--kind", "source", "--class", "IC", "--state", p(&s)]));
    assert_eq!(v["value"].as_f64().unwrap(), 0.8);
}

#[test]
fn qutrit_plot_metadata() {
    let d = TempDir::new().unwrap();
    let s = state(d.path(), "phi.json", &[3], &[0.5, 0.3, 0.2]);
    let o = run(&["plot", "--figure", "qutrit", "--state", p(&s)]);
    assert!(o.status.success());
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg"));
    let meta = svg.split("<metadata>").nth(1).unwrap().split("</metadata>").next().unwrap();
    let m: Value = serde_json::from_str(meta).unwrap();
    assert!((m["measure"].as_f64().unwrap() - 0.275).abs() < 1e-12);

    let csv = run(&["plot", "--figure", "qutrit", "--state", p(&s), "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("loop,p0,p1\n"));
}

#[test]
fn output_is_deterministic_and_seeded() {
    let args = ["volume", "--kind", "accessible", "--class", "SIO", "--bloch", "0.3,0,-0.4", "--samples", "20000"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let env = bin().args(args).env("COHERTK_SEED", "7").output().unwrap();
    let flag = run(&[&args[..], &["--seed", "7"]].concat());
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(env.stdout, a.stdout);
    assert_eq!(json(&env)["mc"]["seed"], 7);
    let both = bin().args(args).args(["--seed", "8"]).env("COHERTK_SEED", "7").output().unwrap();
    assert_eq!(json(&both)["mc"]["seed"], 8);
}

#[test]
fn out_flag_writes_file() {
    let d = TempDir::new().unwrap();
    let target = d.path().join("v.json");
    let o = run(&["monotone", "--kind", "source", "--class", "IC", "--spectrum", "0.5,0.5", "--out", p(&target)]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(v["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn exit_codes() {
    let d = TempDir::new().unwrap();
    let coherent = state(d.path(), "c.json", &[2, 2], &[0.25; 4]);
    let bad = write(d.path(), "bad.json", r#"{"dims":[2],"amps":[[1,0]]}"#);
    let unnormalized = write(d.path(), "n.json", r#"{"dims":[2],"amps":[[1,0],[1,0]]}"#);

    assert_eq!(run(&["monotone", "--kind", "source", "--class", "LICC", "--state", p(&coherent)]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--state", p(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--state", p(&unnormalized)]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--state", "/nonexistent.json"]).status.code(), Some(1));
    assert_eq!(run(&["classify", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    let ok = run(&["monotone", "--kind", "source", "--class", "IC", "--state", p(&unnormalized), "--renormalize"]);
    assert_eq!(json(&ok)["value"].as_f64().unwrap(), 1.0);
}

#[test]
fn feasibility_and_equivalence() {
    let d = TempDir::new().unwrap();
    let a = state(d.path(), "a.json", &[3], &[0.5, 0.3, 0.2]);
    let b = state(d.path(), "b.json", &[3], &[0.7, 0.2, 0.1]);
    assert_eq!(json(&run(&["feasible", "--class", "IC", "--from", p(&a), "--to", p(&b)]))["feasible"], true);
    assert_eq!(json(&run(&["feasible", "--class", "IC", "--from", p(&b), "--to", p(&a)]))["feasible"], false);
    assert_eq!(json(&run(&["feasible", "--class", "PIO", "--from-bloch", "0,0,-1", "--to-bloch", "0,0,1"]))["feasible"], true);

    let c = write(d.path(), "c.json", r#"{"dims":[3],"amps":[[0,0.4472135954999579],[0.7071067811865476,0],[0,-0.5477225575051661]]}"#);
    assert_eq!(json(&run(&["equiv", "--state", p(&a), "--other", p(&c), "--mode", "liu"]))["equivalent"], true);
    assert_eq!(json(&run(&["equiv", "--state", p(&a), "--other", p(&b), "--mode", "liu"]))["equivalent"], false);
}

#[test]
fn channel_check() {
    let d = TempDir::new().unwrap();
    let ch = write(d.path(), "k.json", r#"{"class":"PIO","kraus":[{"entries":[[0,0,1,0]]},{"entries":[[1,1,0,1]]}]}"#);
    let v = json(&run(&["check", "channel", "--channel", p(&ch)]));
    assert_eq!(v["class"], "PIO");
    assert_eq!(v["dim"], 2);
    let sparse = write(d.path(), "s.json", r#"{"class":"SIO","kraus":[{"entries":[[0,0,1,0],[0,1,1,0]]}]}"#);
    assert_eq!(run(&["check", "channel", "--channel", p(&sparse)]).status.code(), Some(1));
}

#[test]
fn monotonicity_check_passes() {
    let v = json(&run(&["check", "monotonicity", "--monotone", "pure-cs", "--class", "SIO", "--trials", "300"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["violations"], 0);
}
