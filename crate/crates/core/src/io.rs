//! File formats: trajectories, Pohozaev and asymptotics reports, curves.
//!
//! JSON documents carry a versioned `schema` id. Floats are written in their
//! shortest round-trip form, so reading a document back gives identical bits.
//! CSV uses a fixed header, `,` separators, LF line endings and 17 significant
//! digits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoticsReport, CurvePoint, OmegaSample};
use crate::curvature::{CurvatureProfile, ProfileSpec};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::pohozaev::PohozaevReport;
use crate::solver::{RadialSample, RadialSolution, Status, Tolerances};

pub const TRAJECTORY_SCHEMA: &str = "radial-conformal/trajectory/v1";
pub const POHOZAEV_SCHEMA: &str = "radial-conformal/pohozaev/v1";
pub const ASYMPTOTICS_SCHEMA: &str = "radial-conformal/asymptotics/v1";
pub const REPORT_SCHEMA: &str = "radial-conformal/report/v1";
pub const SWEEP_SCHEMA: &str = "radial-conformal/sweep/v1";

/// A JSON document: schema id plus payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document<T> {
    pub schema: String,
    pub data: T,
}

impl<T: Serialize> Document<T> {
    pub fn new(schema: &str, data: T) -> Self {
        Document { schema: schema.to_string(), data }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

impl<T: for<'de> Deserialize<'de>> Document<T> {
    /// Parses a document and checks its schema id.
    pub fn from_json(text: &str, schema: &str) -> Result<T> {
        let doc: Document<T> = serde_json::from_str(text)?;
        if doc.schema != schema {
            return Err(Error::Serialization(format!("expected schema `{schema}`, found `{}`", doc.schema)));
        }
        Ok(doc.data)
    }
}

/// Everything needed to rebuild a [`RadialSolution`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Trajectory {
    pub n: Dimension,
    /// Built-in profiles round-trip through their spec; custom ones only by name.
    pub profile: Option<ProfileSpec>,
    pub profile_name: String,
    pub status: Status,
    pub tolerances: Tolerances,
    pub satisfies_equation: bool,
    pub log_grid: Vec<usize>,
    /// `[r, u, u′]` rows.
    pub samples: Vec<[f64; 3]>,
}

impl Trajectory {
    pub fn from_solution(sol: &RadialSolution) -> Self {
        Trajectory {
            n: sol.n(),
            profile: sol.profile().spec().cloned(),
            profile_name: sol.profile().name(),
            status: sol.status(),
            tolerances: sol.tolerances(),
            satisfies_equation: sol.satisfies_equation(),
            log_grid: sol.log_grid().to_vec(),
            samples: sol.grid().iter().map(|p| [p.r, p.u, p.du]).collect(),
        }
    }

    /// Rebuilds the solution. `custom` supplies the profile when the file
    /// does not carry a built-in spec.
    pub fn into_solution(self, custom: Option<CurvatureProfile>) -> Result<RadialSolution> {
        let profile = match (self.profile, custom) {
            (_, Some(p)) => p,
            (Some(spec), None) => spec.build()?,
            (None, None) => {
                return Err(Error::InvalidArgument(format!(
                    "trajectory uses custom profile `{}`, which must be supplied",
                    self.profile_name
                )))
            }
        };
        let grid = self.samples.iter().map(|&[r, u, du]| RadialSample { r, u, du }).collect();
        RadialSolution::from_parts(self.n, profile, grid, self.status, self.tolerances, self.log_grid, self.satisfies_equation)
    }

    pub fn to_json(&self) -> Result<String> {
        Document::new(TRAJECTORY_SCHEMA, self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Document::from_json(text, TRAJECTORY_SCHEMA)
    }
}

fn num(out: &mut String, x: f64) {
    if x.is_finite() {
        let _ = write!(out, "{x:.16e}");
    } else {
        let _ = write!(out, "{x}");
    }
}

fn csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [f64; N]>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            num(&mut out, *x);
        }
        out.push('\n');
    }
    out
}

pub fn trajectory_csv(sol: &RadialSolution) -> String {
    csv(["r", "u", "du"], sol.grid().iter().map(|p| [p.r, p.u, p.du]))
}

/// Reads the `r,u,du` table written by [`trajectory_csv`].
pub fn parse_trajectory_csv(text: &str) -> Result<Vec<RadialSample>> {
    let mut lines = text.lines();
    match lines.next() {
        Some("r,u,du") => {}
        other => return Err(Error::Serialization(format!("expected header `r,u,du`, found {other:?}"))),
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let cells: Vec<&str> = line.split(',').collect();
            let bad = || Error::Serialization(format!("line {}: expected three numbers, found `{line}`", i + 2));
            if cells.len() != 3 {
                return Err(bad());
            }
            let x: Vec<f64> = cells.iter().map(|c| c.trim().parse::<f64>()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
            Ok(RadialSample { r: x[0], u: x[1], du: x[2] })
        })
        .collect()
}

pub fn pohozaev_csv(report: &PohozaevReport) -> String {
    csv(["r", "surface", "volume", "residual"], report.samples.iter().map(|s| [s.r, s.surface, s.volume, s.residual]))
}

pub fn omega_csv(samples: &[OmegaSample]) -> String {
    csv(["r", "omega", "r_domega", "fd"], samples.iter().map(|s| [s.r, s.omega, s.r_domega, s.fd]))
}

pub fn curve_csv(points: &[CurvePoint]) -> String {
    csv(["r", "value"], points.iter().map(|p| [p.r, p.value]))
}

pub fn pohozaev_json(report: &PohozaevReport) -> Result<String> {
    Document::new(POHOZAEV_SCHEMA, report).to_json()
}

pub fn asymptotics_json(report: &AsymptoticsReport) -> Result<String> {
    Document::new(ASYMPTOTICS_SCHEMA, report).to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::integrate_radial;

    fn solution() -> RadialSolution {
        let k = CurvatureProfile::exp_perturbed(1.0, 0.5, 1.0).unwrap();
        integrate_radial(Dimension::new(4).unwrap(), &k, 0.8, 50.0, Tolerances::default()).unwrap()
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let sol = solution();
        let text = Trajectory::from_solution(&sol).to_json().unwrap();
        let back = Trajectory::from_json(&text).unwrap().into_solution(None).unwrap();
        assert_eq!(back.grid(), sol.grid());
        assert_eq!(back.log_grid(), sol.log_grid());
        assert_eq!(back.status(), sol.status());
        assert_eq!(Trajectory::from_solution(&back).to_json().unwrap(), text);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let sol = solution();
        let rows = parse_trajectory_csv(&trajectory_csv(&sol)).unwrap();
        assert_eq!(rows, sol.grid());
        assert!(parse_trajectory_csv("x,y\n").is_err());
        assert!(parse_trajectory_csv("r,u,du\n1,2\n").is_err());
    }

    #[test]
    fn wrong_schema_is_rejected() {
        let text = Trajectory::from_solution(&solution()).to_json().unwrap().replace(TRAJECTORY_SCHEMA, "other/v9");
        assert!(Trajectory::from_json(&text).is_err());
    }

    #[test]
    fn custom_profiles_must_be_supplied() {
        let k = CurvatureProfile::custom("flat", Some(1.0), crate::curvature::Bounds::new(1.0, 1.0, 0.0).unwrap(), |_| Ok((1.0, 0.0))).unwrap();
        let sol = integrate_radial(Dimension::new(3).unwrap(), &k, 1.0, 10.0, Tolerances::default()).unwrap();
        let t = Trajectory::from_solution(&sol);
        assert!(t.clone().into_solution(None).is_err());
        assert!(t.into_solution(Some(k)).is_ok());
    }

    #[test]
    fn csv_formatting() {
        let text = curve_csv(&[CurvePoint { r: 1.0, value: -0.1 }, CurvePoint { r: 2.0, value: f64::NAN }]);
        assert_eq!(text, "r,value\n1.0000000000000000e0,-1.0000000000000001e-1\n2.0000000000000000e0,NaN\n");
    }
}
