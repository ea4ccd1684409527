use serde::Serialize;

use crate::scenario::{ConfigError, Scenario};

pub struct Preset {
    pub name: &'static str,
    pub source: &'static str,
}

macro_rules! preset {
    ($name:literal) => {
        Preset { name: $name, source: include_str!(concat!("../presets/", $name, ".toml")) }
    };
}

pub const PRESETS: &[Preset] = &[
    preset!("thm14_left"),
    preset!("thm14_right"),
    preset!("thm15_ramp"),
    preset!("thm15_random"),
    preset!("multistable_sine"),
    preset!("isometry_check"),
    preset!("trichotomy_inner"),
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn load(name: &str) -> Result<Scenario, ConfigError> {
    let p = find(name).ok_or_else(|| ConfigError {
        source: name.to_string(),
        message: format!("no config file or preset named {name:?}"),
    })?;
    Scenario::parse(p.source, &format!("preset {name}"), None)
}

#[derive(Debug, Serialize)]
pub struct PresetInfo {
    pub name: String,
    pub nonlinearity: String,
    pub exercises: String,
    pub checks: Vec<&'static str>,
}

pub fn table() -> Vec<PresetInfo> {
    PRESETS
        .iter()
        .map(|p| {
            let sc = load(p.name).expect("embedded presets are valid");
            PresetInfo {
                name: sc.name,
                nonlinearity: sc.nonlinearity,
                exercises: sc.exercises.unwrap_or_default(),
                checks: sc.checks.iter().map(|c| c.as_str()).collect(),
            }
        })
        .collect()
}
