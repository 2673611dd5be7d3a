//! Run configuration: a TOML document checked in full before any computation.
//!
//! ```toml
//! schema = "radial-conformal/config/v1"
//!
//! [problem]
//! n = 4
//! profile = { kind = "constant", value = 8.0 }
//! reference = { kind = "bubble", lambda = 1.0 }   # optional
//!
//! [solve]
//! u0 = 0.5            # or a [solve.cylinder] or [solve.bracket] table
//! r_max = 1e4
//!
//! [outputs]
//! directory = "out"
//! formats = ["csv", "json"]
//!
//! [scenario]
//! name = "bubble"
//! checks = ["POHOZAEV_IDENTITY", "APP_A1_BOUNDS"]
//! sweep = { path = "initial.u0", values = [0.25, 0.5, 1.0] }
//! ```

use std::path::PathBuf;

use radial_conformal::exact::ExactKind;
use radial_conformal::harness::{Check, Initial, Scenario};
use radial_conformal::{Calibration, DecayClass, Dimension, ProfileSpec, Tolerances};
use serde::Deserialize;

use crate::CliError;

pub const CONFIG_SCHEMA: &str = "radial-conformal/config/v1";

/// A strictly positive finite number.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(try_from = "f64")]
pub struct Positive(pub f64);

impl TryFrom<f64> for Positive {
    type Error = String;

    fn try_from(x: f64) -> Result<Self, String> {
        if x > 0.0 && x.is_finite() {
            Ok(Positive(x))
        } else {
            Err(format!("must be positive and finite, got {x}"))
        }
    }
}

/// A profile spec that passed its own validation.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(try_from = "ProfileSpec")]
pub struct ValidProfile(pub ProfileSpec);

impl TryFrom<ProfileSpec> for ValidProfile {
    type Error = String;

    fn try_from(p: ProfileSpec) -> Result<Self, String> {
        p.validate().map_err(|e| e.to_string())?;
        Ok(ValidProfile(p))
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub n: Dimension,
    pub profile: ValidProfile,
    /// Closed-form solution that `solve` compares against, with `K = K∞`.
    pub reference: Option<ExactKind>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CylinderStart {
    pub s0: Option<f64>,
    pub v0: Option<Positive>,
    pub fraction: Option<Positive>,
    #[serde(default)]
    pub dv0: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketStart {
    pub lo: Positive,
    pub hi: Positive,
    pub target: DecayClass,
    pub max_iter: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solve {
    pub u0: Option<Positive>,
    pub cylinder: Option<CylinderStart>,
    pub bracket: Option<BracketStart>,
    pub r_max: Option<Positive>,
    pub tolerances: Option<Tolerances>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        self != Format::Json
    }

    pub fn json(self) -> bool {
        self != Format::Csv
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FileKind {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub directory: Option<PathBuf>,
    pub formats: Option<Vec<FileKind>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub name: Option<String>,
    #[serde(default)]
    pub checks: Vec<Check>,
    pub sweep: Option<SweepAxis>,
    pub calibration: Option<Calibration>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: String,
    pub problem: Problem,
    pub solve: Solve,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub scenario: ScenarioSection,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    /// Parses and validates; errors name the offending key and line.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::Config {
            path: String::new(),
            line: e.span().map(|s| line_of(text, s.start)),
            message: e.message().to_string(),
        })?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            CliError::Config {
                path: if path == "." { String::new() } else { path },
                line: inner.span().map(|s| line_of(text, s.start)),
                message: inner.message().to_string(),
            }
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    fn validate(&self, text: &str) -> Result<(), CliError> {
        let at = |path: &str, message: String| {
            let key = path.rsplit('.').next().unwrap_or(path);
            let line = text.lines().position(|l| l.trim_start().starts_with(key)).map(|i| i + 1);
            CliError::Config { path: path.into(), line, message }
        };
        if self.schema != CONFIG_SCHEMA {
            return Err(at("schema", format!("expected `{CONFIG_SCHEMA}`, found `{}`", self.schema)));
        }
        let starts = [self.solve.u0.is_some(), self.solve.cylinder.is_some(), self.solve.bracket.is_some()];
        if starts.iter().filter(|&&b| b).count() != 1 {
            return Err(at("solve", "exactly one of `u0`, `cylinder` or `bracket` is required".into()));
        }
        if let Some(b) = &self.solve.bracket {
            if b.hi.0 <= b.lo.0 {
                return Err(at("solve.bracket.hi", format!("must exceed lo = {}", b.lo.0)));
            }
        }
        if let Some(t) = &self.solve.tolerances {
            t.validate().map_err(|e| at("solve.tolerances", e.to_string()))?;
        }
        if let Some(s) = &self.scenario.sweep {
            if s.values.iter().any(|v| !v.is_finite()) {
                return Err(at("scenario.sweep.values", "values must be finite".into()));
            }
        }
        Ok(())
    }

    pub fn r_max(&self) -> f64 {
        self.solve.r_max.map_or(1e4, |r| r.0)
    }

    pub fn tolerances(&self) -> Tolerances {
        self.solve.tolerances.unwrap_or_default()
    }

    pub fn initial(&self) -> Initial {
        if let Some(u0) = self.solve.u0 {
            Initial::Height { u0: u0.0 }
        } else if let Some(c) = &self.solve.cylinder {
            Initial::Cylinder {
                s0: c.s0.unwrap_or(-5.0 * std::f64::consts::LN_10),
                v0: c.v0.map(|v| v.0),
                fraction: c.fraction.map_or(1.0, |f| f.0),
                dv0: c.dv0,
            }
        } else {
            let b = self.solve.bracket.as_ref().expect("validated");
            Initial::Bracket { lo: b.lo.0, hi: b.hi.0, target: b.target, max_iter: b.max_iter.unwrap_or(60) }
        }
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            name: self.scenario.name.clone().unwrap_or_else(|| "scenario".into()),
            n: self.problem.n,
            profile: self.problem.profile.0.clone(),
            initial: self.initial(),
            r_max: self.r_max(),
            tolerances: self.tolerances(),
            checks: self.scenario.checks.clone(),
            calibration: self.calibration(),
        }
    }

    pub fn calibration(&self) -> Calibration {
        self.scenario.calibration.clone().unwrap_or_default()
    }

    pub fn format(&self) -> Format {
        match self.outputs.formats.as_deref() {
            Some([FileKind::Csv]) => Format::Csv,
            Some([FileKind::Json]) => Format::Json,
            _ => Format::Both,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"schema = "radial-conformal/config/v1"

[problem]
n = 4
profile = { kind = "constant", value = 8.0 }

[solve]
u0 = 0.5
"#;

    fn err(text: &str) -> (String, Option<usize>, String) {
        match RunConfig::parse(text).unwrap_err() {
            CliError::Config { path, line, message } => (path, line, message),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn minimal_config() {
        let c = RunConfig::parse(BASE).unwrap();
        assert_eq!(c.initial(), Initial::Height { u0: 0.5 });
        assert_eq!(c.r_max(), 1e4);
        assert_eq!(c.format(), Format::Both);
    }

    #[test]
    fn unknown_keys_name_path_and_line() {
        let (path, line, message) = err(&BASE.replace("u0 = 0.5", "u0 = 0.5\nbogus = 1"));
        assert_eq!(path, "solve.bogus");
        assert_eq!(line, Some(9));
        assert!(message.contains("bogus"), "{message}");
    }

    #[test]
    fn small_dimension_is_rejected() {
        let (path, line, message) = err(&BASE.replace("n = 4", "n = 2"));
        assert_eq!(path, "problem.n");
        assert_eq!(line, Some(4));
        assert!(message.contains("n must be ≥ 3"), "{message}");
    }

    #[test]
    fn nonpositive_numbers_are_rejected() {
        let (path, _, _) = err(&BASE.replace("u0 = 0.5", "u0 = -0.5"));
        assert_eq!(path, "solve.u0");
        let (path, _, _) = err(&BASE.replace("value = 8.0", "value = -8.0"));
        assert_eq!(path, "problem.profile");
    }

    #[test]
    fn exactly_one_start() {
        let (path, _, _) = err(&BASE.replace("u0 = 0.5", ""));
        assert_eq!(path, "solve");
        let (path, _, _) = err(&format!("{BASE}\n[solve.cylinder]\nfraction = 1.0\n"));
        assert_eq!(path, "solve");
    }

    #[test]
    fn schema_is_checked() {
        let (path, line, _) = err(&BASE.replace("config/v1", "config/v0"));
        assert_eq!((path.as_str(), line), ("schema", Some(1)));
    }

    #[test]
    fn unknown_checks_are_rejected() {
        let (path, _, _) = err(&format!("{BASE}\n[scenario]\nchecks = [\"THM_Z\"]\n"));
        assert!(path.starts_with("scenario.checks"), "{path}");
    }

    proptest::proptest! {
        #[test]
        fn positivity_is_enforced_per_key(x in -1e6f64..1e6, key in proptest::sample::select(vec!["u0", "r_max"])) {
            let text = format!("{BASE}{}", if key == "r_max" { format!("r_max = {x:?}\n") } else { String::new() });
            let text = if key == "u0" { text.replace("u0 = 0.5", &format!("u0 = {x:?}")) } else { text };
            match RunConfig::parse(&text) {
                Ok(_) => proptest::prop_assert!(x > 0.0),
                Err(CliError::Config { path, .. }) => {
                    proptest::prop_assert!(x <= 0.0);
                    proptest::prop_assert_eq!(path, format!("solve.{key}"));
                }
                Err(e) => proptest::prop_assert!(false, "{}", e),
            }
        }
    }
}
