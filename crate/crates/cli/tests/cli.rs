use std::path::PathBuf;
use std::process::{Command, Output};

fn twistcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twistcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("twistcalc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Drops wall-clock fields so two reports can be compared.
fn strip_timing(v: &mut serde_json::Value) {
    match v {
        serde_json::Value::Object(m) => {
            m.retain(|k, _| !k.contains("ms") && k != "jobs");
            m.values_mut().for_each(strip_timing);
        }
        serde_json::Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

#[test]
fn expand_fermion_product() {
    let o = twistcalc(&["expand", "fermion", "Y(psi,x) psi"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x^-1: (1)·|0⟩"), "{}", stdout(&o));
}

#[test]
fn expand_twisted_vertex_operator_on_ramond_vacuum() {
    let o = twistcalc(&["expand", "ramond", "Ytw(vac,x) psi"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("x^-1/2: (e^{-πi/2}·2^{-1/2})·|-⟩"), "{}", stdout(&o));
}

#[test]
fn expand_json_is_an_array() {
    let o = twistcalc(&["expand", "fermion", "Y(psi,x) psi", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!v.as_array().unwrap().is_empty());
}

#[test]
fn malformed_expression_exits_2() {
    let o = twistcalc(&["expand", "fermion", "Y(vac..."]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expression"));
}

#[test]
fn unknown_model_and_suite_exit_2() {
    assert_eq!(twistcalc(&["run", "--model", "nosuch", "--suite", "axioms"]).status.code(), Some(2));
    assert_eq!(twistcalc(&["run", "--model", "fermion", "--suite", "nosuch"]).status.code(), Some(2));
    assert_eq!(twistcalc(&["run", "--suite", "axioms"]).status.code(), Some(2));
}

#[test]
fn small_run_passes_and_writes_report() {
    let path = scratch("axioms.json");
    let o = twistcalc(&[
        "run", "--model", "fermion", "--suite", "axioms", "--max-weight", "3/2", "--window", "3",
        "--report", path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["summary"]["failed"], 0);
    assert!(v["summary"]["passed"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_and_flags_agree() {
    let cfg = scratch("run.toml");
    std::fs::write(&cfg, "model = \"fermion\"\nsuite = \"twist-all\"\nmax_weight = \"1\"\nmodule_weight = \"1/2\"\nwindow = 3\n").unwrap();
    let a = twistcalc(&["run", "--config", cfg.to_str().unwrap()]);
    let b = twistcalc(&[
        "run", "--model", "fermion", "--suite", "twist-all", "--max-weight", "1", "--module-weight", "1/2", "--window", "3",
        "--seed-order", "5",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let mut va: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let mut vb: serde_json::Value = serde_json::from_slice(&b.stdout).unwrap();
    strip_timing(&mut va);
    strip_timing(&mut vb);
    assert_eq!(va["summary"], vb["summary"]);
}

#[test]
fn unknown_config_key_exits_2() {
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "model = \"fermion\"\nsuite = \"axioms\"\nspeed = 11\n").unwrap();
    assert_eq!(twistcalc(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn faulted_model_exits_1() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../models/fermion.model")).unwrap();
    let model = scratch("faulted.model");
    std::fs::write(&model, format!("faults = [{{ BracketSign = {{ twice = 1 }} }}]\n{text}")).unwrap();
    let o = twistcalc(&[
        "run", "--model", model.to_str().unwrap(), "--suite", "twisted-jacobi", "--max-weight", "1/2", "--window", "3",
        "--fail-fast",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("first failure"));
}

#[test]
fn decompose_parity_and_unipotent() {
    let o = twistcalc(&["decompose", "fermion", "parity"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("P_V = {0, 1/2}"), "{s}");
    assert!(s.contains("N_g = 0: true"), "{s}");

    let s = stdout(&twistcalc(&["decompose", "fermion", "identity"]));
    assert!(s.contains("P_V = {0}"), "{s}");

    let o = twistcalc(&["decompose", "heis3-unipotent", "--max-weight", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("N_g = 0: false"), "{s}");
    assert!(s.contains("nilpotency index 3"), "{s}");
    assert!(s.contains("2πi·N_g:"), "{s}");
}

#[test]
fn dump_basis_counts() {
    // fermion PBW dimensions 1, 0, 1, 1, 1 up to weight 2
    let s = stdout(&twistcalc(&["dump-basis", "fermion", "--max-weight", "2"]));
    assert_eq!(s.lines().count(), 4, "{s}");
    let s = stdout(&twistcalc(&["dump-basis", "ramond", "--max-weight", "1", "--module"]));
    assert!(s.lines().count() >= 2, "{s}");
}
