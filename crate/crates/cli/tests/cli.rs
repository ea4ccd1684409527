use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nlflow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlflow")).args(args).current_dir(cwd).output().expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(name).join("report.json")).unwrap()).unwrap()
}

const SIM: &str = r#"
[sim]
dt = 0.01
t_end = 200.0
integrator = "rk45_adaptive"
adapt_tol = 1e-9
stationarity_tol = 1e-10
snapshot_stride = 10
rng_seed = 0
"#;

fn write_config(dir: &Path, file: &str, head: &str, sim: &str) -> String {
    let path = dir.join(file);
    fs::write(&path, format!("{head}\n{sim}")).unwrap();
    path.display().to_string()
}

#[test]
fn thm14_left_classifies_constant() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlflow(&["run", "thm14_left", "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&tmp.path().join("res"), "thm14_left");
    assert_eq!(r["omega_limit"]["class"], "constant");
    assert_eq!(r["passed"], true);
    for f in ["trajectory.csv", "energy.dat", "mass_defect.dat", "profile_initial.dat", "profile_final.dat", "final_state.csv"] {
        assert!(tmp.path().join("res/thm14_left").join(f).is_file(), "{f}");
    }
    let csv = fs::read_to_string(tmp.path().join("res/thm14_left/trajectory.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t,lambda,energy,mass,min,max"));
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row.len(), 6);
    assert!(row.iter().all(|x| x.contains('e')));
}

#[test]
fn thm15_ramp_classifies_two_valued() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlflow(&["run", "thm15_ramp", "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&tmp.path().join("res"), "thm15_ramp");
    assert_eq!(r["omega_limit"]["class"], "two_valued");
    let dat = fs::read_to_string(tmp.path().join("res/thm15_ramp/energy.dat")).unwrap();
    assert_eq!(dat.lines().next(), Some("# t energy"));
    assert_eq!(dat.lines().nth(1).unwrap().split(' ').count(), 2);
}

#[test]
fn missing_t_end_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = SIM.replace("t_end = 200.0\n", "");
    let cfg = write_config(tmp.path(), "bad.toml", "name = \"bad\"\nnonlinearity = \"cubic\"\n[u0]\nkind = \"two_cell\"\na = 0.5\nb = -0.5", &sim);
    let out = nlflow(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(nlflow::EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_end"));
}

#[test]
fn unknown_nonlinearity_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "bad.toml", "name = \"bad\"\nnonlinearity = \"quartic\"\n[u0]\nkind = \"two_cell\"\na = 0.5\nb = -0.5", SIM);
    let out = nlflow(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(nlflow::EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`nonlinearity`"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(nlflow(&["list-presets", "--bogus"], tmp.path()).status.code(), Some(2));
    assert_eq!(nlflow(&["run", "thm14_left", "--fast"], tmp.path()).status.code(), Some(2));
    assert_eq!(nlflow(&["run"], tmp.path()).status.code(), Some(2));
}

#[test]
fn list_presets_text_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let names = ["thm14_left", "thm14_right", "thm15_ramp", "thm15_random", "multistable_sine", "isometry_check"];
    let text = String::from_utf8(nlflow(&["list-presets"], tmp.path()).stdout).unwrap();
    let json = nlflow(&["list-presets", "--json"], tmp.path());
    assert_eq!(json.status.code(), Some(0));
    let arr: Value = serde_json::from_slice(&json.stdout).unwrap();
    let listed: Vec<&str> = arr.as_array().unwrap().iter().map(|p| p["name"].as_str().unwrap()).collect();
    for n in names {
        assert!(text.lines().any(|l| l.starts_with(n)), "{n}");
        assert!(listed.contains(&n), "{n}");
    }
}

#[test]
fn outputs_are_deterministic_and_parallel_safe() {
    let tmp = tempfile::tempdir().unwrap();
    let set = ["thm15_random", "thm14_right", "multistable_sine"];
    let mut seq = vec!["run", "--out", "a"];
    seq.extend(set);
    let mut par = vec!["run", "--out", "b", "--parallel", "3"];
    par.extend(set);
    assert_eq!(nlflow(&seq, tmp.path()).status.code(), Some(0));
    assert_eq!(nlflow(&par, tmp.path()).status.code(), Some(0));
    for name in set {
        for f in ["trajectory.csv", "report.json", "energy.dat", "mass_defect.dat", "profile_final.dat"] {
            let a = fs::read(tmp.path().join("a").join(name).join(f)).unwrap();
            let b = fs::read(tmp.path().join("b").join(name).join(f)).unwrap();
            assert!(a == b, "{name}/{f} differs");
        }
    }
}

#[test]
fn failed_check_sets_exit_status() {
    let tmp = tempfile::tempdir().unwrap();
    let head = "name = \"wrong\"\nnonlinearity = \"cubic\"\nchecks = [\"mass\", \"classify\"]\nexpect_class = \"constant\"\n[u0]\nkind = \"linear_ramp\"\nlo = -1.0\nhi = 1.0\nn = 32";
    let cfg = write_config(tmp.path(), "wrong.toml", head, SIM);
    let out = nlflow(&["run", &cfg, "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(nlflow::EXIT_CHECK_FAILED));
    let r = report(&tmp.path().join("res"), "wrong");
    assert_eq!(r["failures"], serde_json::json!(["classify"]));
    assert_eq!(r["passed"], false);
}

#[test]
fn blowup_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = SIM.replace("dt = 0.01", "dt = 1.5").replace("\"rk45_adaptive\"", "\"rk4_fixed\"").replace("snapshot_stride = 10", "snapshot_stride = 1");
    let head = "name = \"boom\"\nnonlinearity = \"cubic\"\nchecks = [\"mass\"]\n[u0]\nkind = \"linear_ramp\"\nlo = -1.5\nhi = 1.5\nn = 3";
    let cfg = write_config(tmp.path(), "boom.toml", head, &sim);
    let out = nlflow(&["run", &cfg], tmp.path());
    assert_eq!(out.status.code(), Some(nlflow::EXIT_RUNTIME));
    assert!(String::from_utf8_lossy(&out.stderr).contains("blow"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn csv_datum_and_custom_nonlinearity() {
    let tmp = tempfile::tempdir().unwrap();
    fs::create_dir(tmp.path().join("cfg")).unwrap();
    let mut csv = String::from("measure,value\n");
    for i in 0..16 {
        csv.push_str(&format!("0.5,{}\n", -0.9 + 0.12 * i as f64));
    }
    fs::write(tmp.path().join("cfg/u0.csv"), csv).unwrap();
    // u - u³ spelled out as a one-piece polynomial.
    let head = "name = \"poly\"\nnonlinearity = \"custom\"\nchecks = [\"mass\", \"dissipation\", \"classify\", \"level_sets\"]\nexpect_class = \"two_valued\"\n[custom]\nbreaks = []\npieces = [[0.0, 1.0, 0.0, -1.0]]\n[u0]\nkind = \"from_csv\"\npath = \"u0.csv\"";
    let cfg = write_config(&tmp.path().join("cfg"), "poly.toml", head, SIM);
    let out = nlflow(&["run", &cfg, "--out", "res"], tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    let r = report(&tmp.path().join("res"), "poly");
    assert_eq!(r["cells"], 16);
    assert!((r["total_measure"].as_f64().unwrap() - 8.0).abs() < 1e-12);
}

#[test]
fn duplicate_names_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nlflow(&["run", "thm14_left", "thm14_left"], tmp.path());
    assert_eq!(out.status.code(), Some(nlflow::EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`name`"));
}
