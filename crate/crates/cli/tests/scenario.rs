use nlflow::{presets, Check, Scenario};

const BASE: &str = r#"
name = "s"
nonlinearity = "cubic"
checks = ["mass", "classify"]

[u0]
kind = "two_cell"
a = 0.5
b = -0.5

[sim]
dt = 0.01
t_end = 20.0
integrator = "rk4_fixed"
adapt_tol = 1e-9
stationarity_tol = 1e-10
snapshot_stride = 10
rng_seed = 3
"#;

fn parse(text: &str) -> Result<Scenario, String> {
    Scenario::parse(text, "test", None).map_err(|e| e.to_string())
}

#[test]
fn base_parses() {
    let sc = parse(BASE).unwrap();
    assert_eq!(sc.checks, vec![Check::Mass, Check::Classify]);
    assert_eq!(sc.sim.t_end, 20.0);
    assert!(!sc.write_snapshots);
}

#[test]
fn errors_name_the_key() {
    let cases = [
        (BASE.replace("t_end = 20.0\n", ""), "t_end"),
        (BASE.replace("t_end = 20.0", "t_end = -1.0"), "t_end"),
        (BASE.replace("snapshot_stride = 10", "snapshot_stride = 0"), "snapshot_stride"),
        (BASE.replace("rng_seed = 3", "rng_seed = 3\nspeed = 2"), "speed"),
        (BASE.replace("\"classify\"", "\"vibes\""), "vibes"),
        (BASE.replace("\"cubic\"", "\"custom\""), "custom"),
        (BASE.replace("a = 0.5", "a = -0.5") + "", "u0"),
        (BASE.replace("name = \"s\"", "name = \"a/b\""), "name"),
    ];
    for (i, (text, key)) in cases.iter().enumerate() {
        let text = if i == 6 { text.replace("checks", "expect_class = \"two_valued\"\nchecks") } else { text.clone() };
        let err = parse(&text).unwrap_err();
        assert!(err.contains(key), "case {i}: {err}");
    }
}

#[test]
fn every_preset_parses() {
    for p in presets::PRESETS {
        let sc = presets::load(p.name).unwrap();
        assert_eq!(sc.name, p.name);
        assert!(sc.exercises.is_some());
        let n = sc.initial_field().unwrap().len();
        assert!((256..=1024).contains(&n), "{} has {n} cells", p.name);
        assert_eq!(sc.sim.t_end, 200.0);
    }
}

#[test]
fn two_valued_presets_have_distinct_values() {
    for name in ["thm15_ramp", "thm15_random"] {
        let sc = presets::load(name).unwrap();
        assert!(sc.u0.distinct_values());
    }
}

#[test]
fn json_floats_are_scientific() {
    let s = nlflow::output::to_json(&serde_json::json!({"x": 0.5, "n": 3, "v": [1e-300, -2.0]}));
    assert!(s.contains("5.0000000000000000e-1"));
    assert!(s.contains("\"n\": 3"));
    assert!(s.contains("1.0000000000000000e-300") && s.contains("-2.0000000000000000e0"));
    let back: serde_json::Value = serde_json::from_str(&s).unwrap();
    assert_eq!(back["x"], 0.5);
}
