use std::fmt;
use std::path::{Path, PathBuf};

use nonlocal_flow::diagnostics::LimitClass;
use nonlocal_flow::dynamics::SimulationConfig;
use nonlocal_flow::initial::InitialData;
use nonlocal_flow::nonlinearity::{Nonlinearity, PiecewisePolynomial};
use nonlocal_flow::{Field, Nl};
use serde::{Deserialize, Serialize};

/// A scenario file could not be turned into a runnable scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub source: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error in {}: {}", self.source, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Mass,
    Bounds,
    Dissipation,
    Stationarity,
    Classify,
    ConstantLimit,
    Rate,
    Isometry,
    Rearranged,
    LevelSets,
    Envelope,
    Trichotomy,
    LayoutInvariance,
}

impl Check {
    pub fn as_str(&self) -> &'static str {
        match self {
            Check::Mass => "mass",
            Check::Bounds => "bounds",
            Check::Dissipation => "dissipation",
            Check::Stationarity => "stationarity",
            Check::Classify => "classify",
            Check::ConstantLimit => "constant_limit",
            Check::Rate => "rate",
            Check::Isometry => "isometry",
            Check::Rearranged => "rearranged",
            Check::LevelSets => "level_sets",
            Check::Envelope => "envelope",
            Check::Trichotomy => "trichotomy",
            Check::LayoutInvariance => "layout_invariance",
        }
    }
}

/// Coefficients of a `custom` nonlinearity, ascending powers per piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomSpec {
    pub breaks: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub exercises: Option<String>,
    /// `cubic`, `sine` or `custom`.
    pub nonlinearity: String,
    #[serde(default)]
    pub custom: Option<CustomSpec>,
    pub u0: InitialData<f64>,
    pub sim: SimulationConfig<f64>,
    #[serde(default)]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub expect_class: Option<LimitClass>,
    /// Also write every snapshot as a `measure,value` CSV.
    #[serde(default)]
    pub write_snapshots: bool,
}

impl Scenario {
    /// Parses and validates a scenario. `source` labels error messages;
    /// relative `from_csv` paths are resolved against `base_dir`.
    pub fn parse(text: &str, source: &str, base_dir: Option<&Path>) -> Result<Self, ConfigError> {
        let err = |message: String| ConfigError { source: source.to_string(), message };
        let mut sc: Scenario = toml::from_str(text).map_err(|e| err(e.to_string().trim_end().to_string()))?;
        if let (InitialData::FromCsv { path }, Some(base)) = (&mut sc.u0, base_dir) {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        sc.validate().map_err(err)?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let source = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { source: source.clone(), message: e.to_string() })?;
        Self::parse(&text, &source, path.parent())
    }

    fn validate(&self) -> Result<(), String> {
        let name_ok = !self.name.is_empty()
            && self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !name_ok {
            return Err(format!("`name` must be non-empty [A-Za-z0-9_-], got {:?}", self.name));
        }
        self.sim.validate().map_err(|e| format!("[sim] {e}"))?;
        self.nonlinearity_fn()?;
        let u0 = self.initial_field()?;
        if self.expect_class == Some(LimitClass::TwoValued) {
            let mut v = u0.values().to_vec();
            v.sort_by(f64::total_cmp);
            if v.windows(2).any(|w| w[0] == w[1]) {
                return Err("`u0` must have pairwise distinct values when `expect_class` is two_valued".into());
            }
        }
        Ok(())
    }

    pub fn nonlinearity_fn(&self) -> Result<Nl, String> {
        match (self.nonlinearity.as_str(), &self.custom) {
            ("cubic", None) => Ok(Nonlinearity::cubic()),
            ("sine", None) => Ok(Nonlinearity::sine()),
            ("custom", Some(c)) => PiecewisePolynomial::new(c.breaks.clone(), c.pieces.clone())
                .map(Nonlinearity::piecewise_polynomial)
                .map_err(|e| format!("`custom`: {e}")),
            ("custom", None) => Err("`custom` table is required when `nonlinearity` is \"custom\"".into()),
            ("cubic" | "sine", Some(_)) => Err("`custom` table is only allowed with `nonlinearity = \"custom\"`".into()),
            (other, _) => Err(format!("`nonlinearity`: unknown preset {other:?}, expected cubic, sine or custom")),
        }
    }

    pub fn initial_field(&self) -> Result<Field, String> {
        self.u0.generate().map_err(|e| format!("`u0`: {e}"))
    }

    pub fn csv_path(&self) -> Option<&PathBuf> {
        match &self.u0 {
            InitialData::FromCsv { path } => Some(path),
            _ => None,
        }
    }
}
