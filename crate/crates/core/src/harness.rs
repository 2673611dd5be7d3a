//! Named verification scenarios.
//!
//! A [`Scenario`] fixes a dimension, a curvature profile, initial data and a
//! list of checks from a fixed catalogue. [`run_scenario`] integrates once,
//! computes the Pohozaev and asymptotics reports, and evaluates each check
//! on that shared, read-only analysis. Every check first tests the premises
//! of the statement it instantiates; when a premise cannot be established
//! the outcome is Inconclusive with a reason code, never Fail.

use std::f64::consts::LN_10;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{local_extrema_scan, slow_decay_bounds, AsymptoticsReport, Completeness, DecayClass, ExtremumKind, VolumeGrowth};
use crate::calibration::Calibration;
use crate::curvature::{check_exp_lower_bound, check_lemma24_conditions, CurvatureProfile, ProfileSpec};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exact;
use crate::io::{Document, REPORT_SCHEMA};
use crate::pohozaev::{LimitStatus, PohozaevReport};
use crate::solver::{
    cylinder_transform, integrate_cylinder, integrate_radial, inverse_transform, shoot, CylinderSolution, RadialSolution,
    Status, Tolerances,
};

/// The check catalogue. Serialized ids are stable across versions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Check {
    /// Bounded `K`, exponentially controlled `K′⁻` and a bounded gradient ratio give a bounded `r^m u`.
    #[serde(rename = "THM_A")]
    SlowDecayBound,
    /// `P(u) ≤ 0` for slow-decay solutions when `K → K∞ > 0` and the Pohozaev limit exists.
    #[serde(rename = "THM_B_SIGN")]
    PohozaevSign,
    /// With `r K′ ≤ 0` on the tail, `P(u) = 0` forces fast decay.
    #[serde(rename = "THM_B_FAST")]
    ZeroPohozaevFastDecay,
    /// Fast decay or completeness, and completeness iff infinite volume.
    #[serde(rename = "THM_C_DICHOTOMY")]
    CompletenessVolume,
    /// Vanishing cylinder energy gives `P(u) ≤ 0`, and `P(u) = 0` gives `liminf r^m u = 0`.
    #[serde(rename = "THM_D")]
    VanishingEnergy,
    /// `|P(u, r)|` bounded away from zero gives `V(R) ≥ C′ ln R`.
    #[serde(rename = "THM_215_LOG")]
    LogVolumeGrowth,
    /// `c₁ r^(2−n) ≤ u ≤ c₂ r^(2−n)` on the tail of a fast-decay solution.
    #[serde(rename = "APP_A1_BOUNDS")]
    FastDecayBounds,
    /// The integral formula for `lim r^(n−2) u` agrees with the direct value.
    #[serde(rename = "APP_A1_C0")]
    FastDecayLimit,
    /// Surface form minus volume form is constant along the solution.
    #[serde(rename = "POHOZAEV_IDENTITY")]
    PohozaevIdentity,
    /// Tail maxima of `v` respect the lower bound and, when `P(u) = 0`, look like `C cosh(s)^(−m)`.
    #[serde(rename = "DELAUNAY_LIMIT")]
    DelaunayLimit,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::SlowDecayBound,
        Check::PohozaevSign,
        Check::ZeroPohozaevFastDecay,
        Check::CompletenessVolume,
        Check::VanishingEnergy,
        Check::LogVolumeGrowth,
        Check::FastDecayBounds,
        Check::FastDecayLimit,
        Check::PohozaevIdentity,
        Check::DelaunayLimit,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Check::SlowDecayBound => "THM_A",
            Check::PohozaevSign => "THM_B_SIGN",
            Check::ZeroPohozaevFastDecay => "THM_B_FAST",
            Check::CompletenessVolume => "THM_C_DICHOTOMY",
            Check::VanishingEnergy => "THM_D",
            Check::LogVolumeGrowth => "THM_215_LOG",
            Check::FastDecayBounds => "APP_A1_BOUNDS",
            Check::FastDecayLimit => "APP_A1_C0",
            Check::PohozaevIdentity => "POHOZAEV_IDENTITY",
            Check::DelaunayLimit => "DELAUNAY_LIMIT",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.id() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown check `{s}`")))
    }
}

fn default_s0() -> f64 {
    -5.0 * LN_10
}

fn one() -> f64 {
    1.0
}

fn default_max_iter() -> usize {
    60
}

fn default_r_max() -> f64 {
    1e4
}

/// How the solution is started.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    /// Regular solution with `u(0) = u0`.
    Height { u0: f64 },
    /// Cylinder solution from `(s0, v0, v0′)`, pulled back to the radial picture.
    /// Without `v0` the start is `fraction` times the constant-cylinder level of `K(e^s0)`.
    Cylinder {
        #[serde(default = "default_s0")]
        s0: f64,
        #[serde(default)]
        v0: Option<f64>,
        #[serde(default = "one")]
        fraction: f64,
        #[serde(default)]
        dv0: f64,
    },
    /// Shooting on `u(0)`; the endpoint of the final bracket classified as `target` is verified.
    Bracket {
        lo: f64,
        hi: f64,
        target: DecayClass,
        #[serde(default = "default_max_iter")]
        max_iter: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub n: Dimension,
    pub profile: ProfileSpec,
    pub initial: Initial,
    #[serde(default = "default_r_max")]
    pub r_max: f64,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub checks: Vec<Check>,
    #[serde(default)]
    pub calibration: Calibration,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        self.tolerances.validate()?;
        if !(self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::InvalidArgument(format!("r_max must be positive and finite, got {}", self.r_max)));
        }
        match self.initial {
            Initial::Height { u0 } if !(u0 > 0.0 && u0.is_finite()) => {
                Err(Error::InvalidArgument(format!("u0 must be positive and finite, got {u0}")))
            }
            Initial::Cylinder { s0, v0, fraction, dv0 } => {
                if !(s0.is_finite() && dv0.is_finite() && s0 < self.r_max.ln()) {
                    return Err(Error::InvalidArgument(format!("need finite s0 < ln r_max and finite dv0, got s0 = {s0}")));
                }
                if !(fraction > 0.0 && fraction.is_finite()) || v0.is_some_and(|v| !(v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidArgument("cylinder start must be positive".into()));
                }
                Ok(())
            }
            Initial::Bracket { lo, hi, target, max_iter } => {
                if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                    return Err(Error::InvalidArgument(format!("need 0 < lo < hi, got [{lo}, {hi}]")));
                }
                if target == DecayClass::Undetermined || max_iter == 0 {
                    return Err(Error::InvalidArgument("bracket needs a decided target class and max_iter ≥ 1".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reason {
    /// Fewer tail samples than the fits need.
    InsufficientTail,
    /// The solution crossed zero, so it is not a positive entire solution.
    NotPositive,
    /// Integration stopped early on overflow or step underflow.
    SolverStopped,
    /// A hypothesis of the statement could not be established.
    PremiseNotMet,
    /// A classifier returned Undetermined.
    Undetermined,
    /// The Pohozaev limit did not settle on the tail.
    LimitNotConverged,
    /// No local maxima of `v` on the tail.
    NoExtrema,
    /// Shooting kept landing on Undetermined midpoints.
    ShootingUndetermined,
    /// A numerical routine failed; the detail carries its message.
    Numerical,
}

impl Reason {
    /// The statement does not apply to this solution, as opposed to a
    /// computation that could not decide.
    pub fn is_inapplicable(self) -> bool {
        matches!(self, Reason::PremiseNotMet | Reason::NotPositive)
    }
}

/// A number that entered a decision, with where it came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
    /// Dotted path of the quantity in the pipeline reports, or the routine that produced it.
    pub source: String,
}

fn measure(name: &str, value: f64, threshold: Option<f64>, source: &str) -> Measurement {
    Measurement { name: name.into(), value, threshold, source: source.into() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub outcome: Outcome,
    pub reason: Option<Reason>,
    pub measurements: Vec<Measurement>,
    pub detail: String,
}

impl CheckResult {
    fn pass(check: Check, measurements: Vec<Measurement>, detail: impl Into<String>) -> Self {
        CheckResult { check, outcome: Outcome::Pass, reason: None, measurements, detail: detail.into() }
    }

    fn fail(check: Check, measurements: Vec<Measurement>, detail: impl Into<String>) -> Self {
        debug_assert!(measurements.iter().any(|m| m.threshold.is_some()));
        CheckResult { check, outcome: Outcome::Fail, reason: None, measurements, detail: detail.into() }
    }

    fn inconclusive(check: Check, reason: Reason, measurements: Vec<Measurement>, detail: impl Into<String>) -> Self {
        CheckResult { check, outcome: Outcome::Inconclusive, reason: Some(reason), measurements, detail: detail.into() }
    }

    fn decide(check: Check, ok: bool, measurements: Vec<Measurement>, detail: impl Into<String>) -> Self {
        if ok {
            Self::pass(check, measurements, detail)
        } else {
            Self::fail(check, measurements, detail)
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShootingSummary {
    pub threshold: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub n: Dimension,
    pub profile: String,
    pub initial: Initial,
    /// Height `u(0)` of the verified solution, when it is a regular one.
    pub u0: Option<f64>,
    pub shooting: Option<ShootingSummary>,
    pub r_max: f64,
    pub status: Option<Status>,
    pub decay_class: Option<DecayClass>,
    pub kappa: Option<f64>,
    pub pohozaev: Option<f64>,
    pub pohozaev_uncertainty: Option<f64>,
    pub tally: Tally,
    pub checks: Vec<CheckResult>,
    pub tolerances: Tolerances,
    pub calibration: Calibration,
}

impl VerificationReport {
    /// Fail beats Inconclusive beats Pass; an empty report passes.
    pub fn overall(&self) -> Outcome {
        self.checks.iter().map(|c| c.outcome).max().unwrap_or(Outcome::Pass)
    }

    /// Like [`overall`](Self::overall), but checks whose premises do not
    /// hold for this solution count as passed.
    pub fn verdict(&self) -> Outcome {
        self.checks
            .iter()
            .map(|c| match (c.outcome, c.reason) {
                (Outcome::Inconclusive, Some(r)) if r.is_inapplicable() => Outcome::Pass,
                (o, _) => o,
            })
            .max()
            .unwrap_or(Outcome::Pass)
    }

    pub fn outcome_of(&self, check: Check) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn to_json(&self) -> Result<String> {
        Document::new(REPORT_SCHEMA, self).to_json()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Document::from_json(text, REPORT_SCHEMA)
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.16e}"));
        let head = [
            ("schema", REPORT_SCHEMA.to_string()),
            ("scenario", self.scenario.clone()),
            ("n", self.n.get().to_string()),
            ("profile", self.profile.clone()),
            ("u0", opt(self.u0)),
            ("r_max", format!("{:.16e}", self.r_max)),
            ("status", self.status.map_or("-".into(), |s| format!("{s:?}"))),
            ("decay", self.decay_class.map_or("-".into(), |c| format!("{c:?}"))),
            ("kappa", opt(self.kappa)),
            ("pohozaev", opt(self.pohozaev)),
            ("uncertainty", opt(self.pohozaev_uncertainty)),
            (
                "result",
                format!("{} pass, {} fail, {} inconclusive", self.tally.pass, self.tally.fail, self.tally.inconclusive),
            ),
        ];
        for (k, v) in head {
            let _ = writeln!(out, "{k:<12} {v}");
        }
        if let Some(s) = &self.shooting {
            let _ = writeln!(out, "{:<12} threshold {:.16e} in [{:.16e}, {:.16e}] after {} steps", "shooting", s.threshold, s.lo, s.hi, s.iterations);
        }
        out.push('\n');

        let id_w = self.checks.iter().map(|c| c.check.id().len()).max().unwrap_or(5).max(5);
        let reason = |c: &CheckResult| c.reason.map_or("-".to_string(), |r| format!("{r:?}"));
        let reason_w = self.checks.iter().map(|c| reason(c).len()).max().unwrap_or(6).max(6);
        let _ = writeln!(out, "{:<id_w$}  {:<12}  {:<reason_w$}  detail", "check", "outcome", "reason");
        for c in &self.checks {
            let _ = writeln!(out, "{:<id_w$}  {:<12}  {:<reason_w$}  {}", c.check.id(), format!("{:?}", c.outcome), reason(c), c.detail);
            let name_w = c.measurements.iter().map(|m| m.name.len()).max().unwrap_or(0);
            for m in &c.measurements {
                let _ = writeln!(
                    out,
                    "{:<id_w$}    {:<name_w$}  {:>23}  {:>23}  {}",
                    "",
                    m.name,
                    format!("{:.16e}", m.value),
                    m.threshold.map_or("-".to_string(), |t| format!("{t:.16e}")),
                    m.source
                );
            }
        }
        out
    }
}

/// Solution plus the reports every check reads from.
struct Analysis<'a> {
    sol: &'a RadialSolution,
    cal: &'a Calibration,
    pohozaev: std::result::Result<PohozaevReport, String>,
    asymptotics: std::result::Result<AsymptoticsReport, String>,
}

impl Analysis<'_> {
    fn r_end(&self) -> f64 {
        self.sol.range().1
    }

    fn n(&self) -> Dimension {
        self.sol.n()
    }

    fn profile(&self) -> &CurvatureProfile {
        self.sol.profile()
    }

    /// Gate shared by every tail statement: positive, complete, long enough.
    fn tail(&self, check: Check) -> std::result::Result<&AsymptoticsReport, CheckResult> {
        match self.sol.status() {
            Status::CrossedZero(r) => {
                return Err(CheckResult::inconclusive(check, Reason::NotPositive, vec![], format!("u crossed zero at r = {r:.6e}")))
            }
            Status::Overflow(r) | Status::StepUnderflow(r) => {
                return Err(CheckResult::inconclusive(check, Reason::SolverStopped, vec![], format!("integration stopped at r = {r:.6e}")))
            }
            Status::ReachedRmax => {}
        }
        let asy = self.asymptotics.as_ref().map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.clone()))?;
        if asy.insufficient_tail {
            return Err(CheckResult::inconclusive(
                check,
                Reason::InsufficientTail,
                vec![measure("tail_samples", asy.decay.samples as f64, Some(self.cal.min_tail_samples as f64), "asymptotics.decay.samples")],
                format!("tail window [{:.3e}, {:.3e}] is too short", asy.decay.window.0, asy.decay.window.1),
            ));
        }
        Ok(asy)
    }

    fn pohozaev(&self, check: Check) -> std::result::Result<&PohozaevReport, CheckResult> {
        self.pohozaev.as_ref().map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.clone()))
    }

    /// The Pohozaev limit, required to have settled.
    fn limit(&self, check: Check) -> std::result::Result<(f64, f64), CheckResult> {
        let rep = self.pohozaev(check)?;
        if rep.limit.status != LimitStatus::Converged {
            return Err(CheckResult::inconclusive(
                check,
                Reason::LimitNotConverged,
                vec![],
                format!("Pohozaev limit is {:?} on the tail", rep.limit.status),
            ));
        }
        Ok((rep.limit.estimate, rep.limit.uncertainty))
    }

    fn bounds_premise(&self, check: Check) -> std::result::Result<(), CheckResult> {
        match self.profile().bounds_hold(self.r_end()) {
            Ok(true) => Ok(()),
            Ok(false) => Err(premise(check, "declared bounds a² ≤ K ≤ b² fail on the sampled tail")),
            Err(e) => Err(CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string())),
        }
    }

    /// `u ≤ C r^(−m)` on the tail: both decay classes qualify.
    fn slow_decay_premise(&self, check: Check, asy: &AsymptoticsReport) -> std::result::Result<(), CheckResult> {
        match asy.decay.class {
            DecayClass::Fast | DecayClass::Slow => Ok(()),
            c => Err(CheckResult::inconclusive(check, Reason::Undetermined, vec![], format!("decay class is {c:?}"))),
        }
    }

    /// `K → K∞ > 0`, bounded `|K′|`, and one of the three conditions under which `P(u)` exists.
    fn pohozaev_sign_premises(&self, check: Check) -> std::result::Result<Vec<Measurement>, CheckResult> {
        let k_inf = match self.profile().k_infinity() {
            Some(k) if k > 0.0 => k,
            _ => return Err(premise(check, "K has no positive limit at infinity")),
        };
        let mut sup = 0.0f64;
        for j in 0..=256 {
            let r = 1e-3 * (self.r_end() / 1e-3).powf(j as f64 / 256.0);
            let dk = self.profile().eval(r).map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string()))?.1;
            sup = sup.max(dk.abs());
        }
        if !sup.is_finite() {
            return Err(premise(check, "K′ is unbounded"));
        }
        let cal = self.cal;
        let conditions = check_lemma24_conditions(self.profile(), self.n(), cal.integrability_exponent, cal.log_decay_epsilon, self.r_end())
            .map_err(|e| CheckResult::inconclusive(check, Reason::InsufficientTail, vec![], e.to_string()))?;
        if !conditions.any_holds() {
            return Err(premise(check, "none of the conditions for the existence of P(u) could be established"));
        }
        Ok(vec![measure("k_infinity", k_inf, None, "profile.k_infinity"), measure("sup_abs_dk", sup, None, "profile.eval")])
    }

    /// Largest `r K′` on the tail window.
    fn max_radial_derivative(&self, check: Check) -> std::result::Result<f64, CheckResult> {
        let lo = (self.r_end() / 100.0).max(self.profile().bounds().radius).min(self.r_end());
        let mut top = f64::NEG_INFINITY;
        for j in 0..=256 {
            let r = lo * (self.r_end() / lo).powf(j as f64 / 256.0);
            let dk = self.profile().eval(r).map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string()))?.1;
            top = top.max(r * dk);
        }
        Ok(top)
    }
}

fn premise(check: Check, detail: &str) -> CheckResult {
    CheckResult::inconclusive(check, Reason::PremiseNotMet, vec![], detail)
}

/// Collapses the `Result`-as-control-flow used by the check bodies.
fn settle(r: std::result::Result<CheckResult, CheckResult>) -> CheckResult {
    r.unwrap_or_else(|c| c)
}

fn slow_decay_bound(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::SlowDecayBound;
    let asy = a.tail(check)?;
    a.bounds_premise(check)?;
    let exp = check_exp_lower_bound(a.profile(), a.r_end())
        .map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string()))?;
    if !exp.holds {
        return Err(premise(check, &format!("K′ ≥ −C e^(−c r) not established: {}", exp.detail)));
    }
    let harnack = match &asy.harnack {
        Some(h) if h.stable && h.sup.is_finite() => h,
        _ => return Err(premise(check, "gradient ratio r|u′|/u is not stable on the tail")),
    };
    let mut ms = vec![measure("gradient_ratio_sup", harnack.sup, None, "asymptotics.harnack.sup")];

    // Bounded r^m u: the tail window must not climb above what the
    // solution reached before it. Comparing against the whole history, not
    // the previous decade, keeps slow oscillations from reading as growth.
    let (lo, _) = asy.decay.window;
    let m = a.n().m();
    let (mut history, mut tail) = (0.0f64, 0.0f64);
    for p in a.sol.grid().iter().filter(|p| p.r > 0.0) {
        let v = p.r.powf(m) * p.u;
        if p.r < lo {
            history = history.max(v);
        } else {
            tail = tail.max(v);
        }
    }
    let limit = 1.0 + a.cal.harnack_stability;
    let ratio = tail / history;
    let source = "sup of r^m u on the tail window over its sup before the window";
    ms.push(measure("amplitude_growth", ratio, Some(limit), source));
    Ok(CheckResult::decide(check, ratio <= limit, ms, "instance consistent with bounded r^m u (slow decay)"))
}

fn pohozaev_sign(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::PohozaevSign;
    let asy = a.tail(check)?;
    a.slow_decay_premise(check, asy)?;
    let mut ms = a.pohozaev_sign_premises(check)?;
    let (p, unc) = a.limit(check)?;
    ms.push(measure("pohozaev", p, Some(unc), "pohozaev.limit.estimate"));
    Ok(CheckResult::decide(check, p <= unc, ms, format!("P(u) = {p:.10e} ± {unc:.3e}")))
}

fn zero_pohozaev_fast_decay(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::ZeroPohozaevFastDecay;
    let asy = a.tail(check)?;
    a.slow_decay_premise(check, asy)?;
    let mut ms = a.pohozaev_sign_premises(check)?;
    let top = a.max_radial_derivative(check)?;
    if top > 0.0 {
        return Err(premise(check, &format!("r K′ reaches {top:.3e} > 0 on the tail")));
    }
    let (p, unc) = a.limit(check)?;
    if p.abs() > unc {
        return Err(premise(check, &format!("P(u) = {p:.6e} is not zero within {unc:.3e}")));
    }
    ms.push(measure("pohozaev", p, Some(unc), "pohozaev.limit.estimate"));
    let band = (a.n().as_f64() - 2.0) * (1.0 - a.cal.class_band);
    ms.push(measure("kappa", asy.decay.kappa.unwrap_or(f64::NAN), Some(band), "asymptotics.decay.kappa"));
    let fast = asy.decay.class == DecayClass::Fast;
    Ok(CheckResult::decide(check, fast, ms, format!("P(u) = 0 and decay class {:?}", asy.decay.class)))
}

fn completeness_volume(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::CompletenessVolume;
    let asy = a.tail(check)?;
    a.bounds_premise(check)?;
    a.slow_decay_premise(check, asy)?;
    let mut ms = Vec::new();
    if let Some(l) = &asy.length {
        ms.push(measure("length_slope", l.slope, None, "asymptotics.length.slope"));
        ms.push(measure("length_increment_ratio", l.increment_ratio, Some(a.cal.finite_ratio), "asymptotics.length.increment_ratio"));
    }
    if let Some(v) = &asy.volume {
        ms.push(measure("volume_slope", v.slope, None, "asymptotics.volume.slope"));
        ms.push(measure("volume_increment_ratio", v.increment_ratio, Some(a.cal.finite_ratio), "asymptotics.volume.increment_ratio"));
    }
    if asy.completeness == Completeness::Undetermined || asy.volume_growth == VolumeGrowth::Undetermined {
        return Err(CheckResult::inconclusive(
            check,
            Reason::Undetermined,
            ms,
            format!("completeness {:?}, volume {:?}", asy.completeness, asy.volume_growth),
        ));
    }
    let complete = asy.completeness == Completeness::Complete;
    let alternative = asy.decay.class == DecayClass::Fast || complete;
    let equivalence = complete == asy.volume_growth.is_divergent();
    Ok(CheckResult::decide(
        check,
        alternative && equivalence,
        ms,
        format!("decay {:?}, completeness {:?}, volume {:?}", asy.decay.class, asy.completeness, asy.volume_growth),
    ))
}

fn vanishing_energy(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::VanishingEnergy;
    let asy = a.tail(check)?;
    a.bounds_premise(check)?;
    let energy = asy.omega.tail_energy;
    if !(energy < a.cal.theorem_d_threshold) {
        return Err(CheckResult::inconclusive(
            check,
            Reason::PremiseNotMet,
            vec![measure("tail_energy", energy, Some(a.cal.theorem_d_threshold), "asymptotics.omega.tail_energy")],
            "cylinder energy ω_n v′² does not vanish on the tail",
        ));
    }
    let (p, unc) = a.limit(check)?;
    let mut ms = vec![
        measure("tail_energy", energy, Some(a.cal.theorem_d_threshold), "asymptotics.omega.tail_energy"),
        measure("pohozaev", p, Some(unc), "pohozaev.limit.estimate"),
    ];
    if p > unc {
        return Ok(CheckResult::fail(check, ms, format!("P(u) = {p:.10e} > 0")));
    }
    if p.abs() > unc {
        return Ok(CheckResult::pass(check, ms, format!("P(u) = {p:.10e} < 0")));
    }
    // P(u) = 0: r^m u must come arbitrarily close to zero.
    let (lo, hi) = slow_decay_bounds(a.sol, a.cal).unwrap_or((f64::NAN, f64::NAN));
    let ratio = lo / hi;
    ms.push(measure("tail_min_over_max", ratio, Some(a.cal.lower_bound_floor), "slow_decay_bounds"));
    let vanishes = asy.decay.class == DecayClass::Fast || ratio < a.cal.lower_bound_floor;
    Ok(CheckResult::decide(check, vanishes, ms, format!("P(u) = 0, decay {:?}", asy.decay.class)))
}

fn log_volume_growth(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::LogVolumeGrowth;
    let asy = a.tail(check)?;
    a.bounds_premise(check)?;
    let rep = a.pohozaev(check)?;
    let (lo, _) = asy.decay.window;
    let floor = rep
        .samples
        .iter()
        .filter(|s| s.r >= lo)
        .map(|s| s.surface.abs())
        .fold(f64::INFINITY, f64::min);
    let unc = rep.limit.uncertainty.max(rep.max_residual);
    let margin = a.cal.nonzero_margin * unc;
    let mut ms = vec![measure("min_abs_pohozaev_tail", floor, Some(margin), "pohozaev.samples.surface")];
    if !(floor > margin) {
        return Err(CheckResult::inconclusive(check, Reason::PremiseNotMet, ms, "|P(u, r)| is not bounded away from zero on the tail"));
    }
    let Some(v) = &asy.volume else {
        return Err(CheckResult::inconclusive(check, Reason::Undetermined, ms, "no volume fit on the tail"));
    };
    ms.push(measure("volume_log_slope", v.slope, Some(0.0), "asymptotics.volume.slope"));
    ms.push(measure("volume_fit_relative_rms", v.relative_rms, None, "asymptotics.volume.relative_rms"));
    if asy.volume_growth == VolumeGrowth::Undetermined {
        return Err(CheckResult::inconclusive(check, Reason::Undetermined, ms, "volume growth is Undetermined"));
    }
    let ok = asy.volume_growth.is_divergent() && v.slope > 0.0;
    Ok(CheckResult::decide(check, ok, ms, format!("volume {:?}, C′ = {:.10e}", asy.volume_growth, v.slope)))
}

fn fast_decay_bounds(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::FastDecayBounds;
    let asy = a.tail(check)?;
    a.bounds_premise(check)?;
    if asy.decay.class != DecayClass::Fast {
        return Err(premise(check, &format!("decay class is {:?}, not Fast", asy.decay.class)));
    }
    let Some((c1, c2)) = asy.bounds else {
        return Err(CheckResult::inconclusive(check, Reason::InsufficientTail, vec![], "no tail samples for the bounds"));
    };
    let ratio = c2 / c1;
    let ms = vec![
        measure("c1", c1, None, "asymptotics.bounds.0"),
        measure("c2", c2, None, "asymptotics.bounds.1"),
        measure("c2_over_c1", ratio, Some(a.cal.bounds_ratio), "asymptotics.bounds"),
    ];
    Ok(CheckResult::decide(check, c1 > 0.0 && ratio < a.cal.bounds_ratio, ms, format!("c₂/c₁ = {ratio:.10}")))
}

fn fast_decay_limit(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::FastDecayLimit;
    let asy = a.tail(check)?;
    let Some(c0) = &asy.c0 else {
        return Err(premise(check, &format!("decay class is {:?}, not Fast", asy.decay.class)));
    };
    let ms = vec![
        measure("c0_formula", c0.formula, None, "asymptotics.c0.formula"),
        measure("c0_direct", c0.direct, None, "asymptotics.c0.direct"),
        measure("relative_gap", c0.relative_gap, Some(a.cal.c0_agreement), "asymptotics.c0.relative_gap"),
    ];
    Ok(CheckResult::decide(check, c0.relative_gap < a.cal.c0_agreement, ms, format!("c₀ = {:.12e}", c0.formula)))
}

fn pohozaev_identity(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::PohozaevIdentity;
    let rep = a.pohozaev(check)?;
    let threshold = rep.identity_tol * (1.0 + rep.p0.abs());
    let ms = vec![
        measure("p0", rep.p0, None, "pohozaev.p0"),
        measure("max_residual", rep.max_residual, Some(threshold), "pohozaev.max_residual"),
    ];
    Ok(CheckResult::decide(check, rep.identity_holds, ms, format!("{} log-grid samples", rep.samples.len())))
}

fn delaunay_limit(a: &Analysis) -> std::result::Result<CheckResult, CheckResult> {
    let check = Check::DelaunayLimit;
    let asy = a.tail(check)?;
    if asy.decay.class == DecayClass::Fast {
        let ms = vec![measure("kappa", asy.decay.kappa.unwrap_or(f64::NAN), None, "asymptotics.decay.kappa")];
        return Ok(CheckResult::pass(check, ms, "fast-decay alternative"));
    }
    let numerical = |e: Error| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string());
    let cyl = cylinder_transform(a.sol, asy.decay.window.0.ln()).map_err(numerical)?;
    let maxima: Vec<_> = local_extrema_scan(&cyl, a.cal)
        .map_err(numerical)?
        .into_iter()
        .filter(|e| e.kind == ExtremumKind::Max)
        .collect();
    let Some(last) = maxima.last().copied() else {
        return flat_tail(check, &cyl);
    };
    let worst = maxima
        .iter()
        .filter_map(|e| e.lower_bound.map(|b| e.v / b))
        .fold(f64::INFINITY, f64::min);
    let mut ms = vec![
        measure("maxima", maxima.len() as f64, None, "local_extrema_scan"),
        measure("min_max_over_bound", worst, Some(1.0), "local_extrema_scan.lower_bound"),
    ];
    let mut ok = worst >= 1.0;
    let mut detail = format!("{} tail maxima, all at or above the lower bound: {ok}", maxima.len());

    // With P(u) = 0 the profile around each maximum approaches the separatrix.
    if let Ok(rep) = &a.pohozaev {
        if rep.limit.status == LimitStatus::Converged && rep.limit.estimate.abs() <= rep.limit.uncertainty {
            let k = a.profile().k_infinity().unwrap_or_else(|| a.profile().eval(last.s.exp()).map_or(f64::NAN, |e| e.0));
            let (s_lo, s_hi) = cyl.range();
            let mut gap = 0.0f64;
            let amp = exact::separatrix_amplitude(a.n(), k);
            for j in -20..=20 {
                let s = last.s + j as f64 / 20.0;
                if s < s_lo || s > s_hi {
                    continue;
                }
                let (v, _) = cyl.at(s).map_err(numerical)?;
                let (c, _) = exact::cosh_separatrix(a.n(), k, s, last.s);
                gap = gap.max((v - c).abs() / amp);
            }
            ms.push(measure("cosh_profile_gap", gap, Some(a.cal.cosh_profile_tol), "cylinder interpolant vs separatrix"));
            ok &= gap <= a.cal.cosh_profile_tol;
            detail.push_str(&format!("; P(u) = 0, cosh profile gap {gap:.3e}"));
        }
    }
    Ok(CheckResult::decide(check, ok, ms, detail))
}

/// Relative spread of `v` below which a tail without maxima counts as the
/// constant solution.
const FLAT_TAIL: f64 = 1e-8;

/// No maxima: the constant cylinder solution is the degenerate member of the
/// family and meets the bound with equality; anything else is undecided.
fn flat_tail(check: Check, cyl: &CylinderSolution) -> std::result::Result<CheckResult, CheckResult> {
    let n = cyl.n();
    let m = n.m();
    let (lo, hi) = cyl.grid().iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), p| (lo.min(p.v), hi.max(p.v)));
    let spread = (hi - lo) / hi;
    if !(spread <= FLAT_TAIL) {
        let ms = vec![measure("relative_spread", spread, Some(FLAT_TAIL), "cylinder tail")];
        return Err(CheckResult::inconclusive(check, Reason::NoExtrema, ms, "v has no local maximum on the tail"));
    }
    let mut worst = f64::INFINITY;
    for p in cyl.grid() {
        let (k, _) = cyl
            .profile()
            .eval_log(p.s)
            .map_err(|e| CheckResult::inconclusive(check, Reason::Numerical, vec![], e.to_string()))?;
        worst = worst.min(p.v / (m * m / k).powf((n.as_f64() - 2.0) / 4.0));
    }
    let ok = worst >= 1.0 - 1e-9;
    let ms = vec![
        measure("relative_spread", spread, Some(FLAT_TAIL), "cylinder tail"),
        measure("min_v_over_bound", worst, Some(1.0 - 1e-9), "cylinder tail"),
    ];
    Ok(CheckResult::decide(check, ok, ms, format!("constant tail, v/bound ≥ {worst:.12}")))
}

fn evaluate(check: Check, a: &Analysis) -> CheckResult {
    settle(match check {
        Check::SlowDecayBound => slow_decay_bound(a),
        Check::PohozaevSign => pohozaev_sign(a),
        Check::ZeroPohozaevFastDecay => zero_pohozaev_fast_decay(a),
        Check::CompletenessVolume => completeness_volume(a),
        Check::VanishingEnergy => vanishing_energy(a),
        Check::LogVolumeGrowth => log_volume_growth(a),
        Check::FastDecayBounds => fast_decay_bounds(a),
        Check::FastDecayLimit => fast_decay_limit(a),
        Check::PohozaevIdentity => pohozaev_identity(a),
        Check::DelaunayLimit => delaunay_limit(a),
    })
}

fn tally(checks: &[CheckResult]) -> Tally {
    let mut t = Tally::default();
    for c in checks {
        match c.outcome {
            Outcome::Pass => t.pass += 1,
            Outcome::Fail => t.fail += 1,
            Outcome::Inconclusive => t.inconclusive += 1,
        }
    }
    t
}

fn empty_report(s: &Scenario, profile: &CurvatureProfile) -> VerificationReport {
    VerificationReport {
        scenario: s.name.clone(),
        n: s.n,
        profile: profile.name(),
        initial: s.initial.clone(),
        u0: None,
        shooting: None,
        r_max: s.r_max,
        status: None,
        decay_class: None,
        kappa: None,
        pohozaev: None,
        pohozaev_uncertainty: None,
        tally: Tally::default(),
        checks: Vec::new(),
        tolerances: s.tolerances,
        calibration: s.calibration.clone(),
    }
}

/// Evaluates the scenario's checks on an already computed solution.
pub fn verify_solution(s: &Scenario, sol: &RadialSolution) -> VerificationReport {
    let cal = &s.calibration;
    let a = Analysis {
        sol,
        cal,
        pohozaev: PohozaevReport::compute(sol, cal).map_err(|e| e.to_string()),
        asymptotics: AsymptoticsReport::compute(sol, cal).map_err(|e| e.to_string()),
    };
    let mut report = empty_report(s, sol.profile());
    report.r_max = sol.range().1;
    report.status = Some(sol.status());
    if let Some(first) = sol.grid().first().filter(|p| p.r == 0.0) {
        report.u0 = Some(first.u);
    }
    if let Ok(asy) = &a.asymptotics {
        report.decay_class = Some(asy.decay.class);
        report.kappa = asy.decay.kappa;
    }
    if let Ok(rep) = &a.pohozaev {
        report.pohozaev = Some(rep.limit.estimate).filter(|x| x.is_finite());
        report.pohozaev_uncertainty = Some(rep.limit.uncertainty).filter(|x| x.is_finite());
    }
    report.checks = s.checks.iter().map(|&c| evaluate(c, &a)).collect();
    report.tally = tally(&report.checks);
    report
}

/// Runs the scenario with its built-in profile.
pub fn run_scenario(s: &Scenario) -> Result<VerificationReport> {
    let profile = s.profile.build()?;
    run_scenario_with_profile(s, &profile)
}

/// Integrates the scenario's initial condition. A bracket is bisected and
/// the endpoint on the `target` side is returned with the shooting summary.
pub fn solve_scenario(s: &Scenario, profile: &CurvatureProfile) -> Result<(RadialSolution, Option<ShootingSummary>)> {
    s.validate()?;
    let tol = s.tolerances;
    match s.initial {
        Initial::Height { u0 } => Ok((integrate_radial(s.n, profile, u0, s.r_max, tol)?, None)),
        Initial::Cylinder { s0, v0, fraction, dv0 } => {
            let v0 = match v0 {
                Some(v) => v,
                None => fraction * exact::constant_cylinder(s.n, profile.eval(s0.exp())?.0),
            };
            Ok((inverse_transform(&integrate_cylinder(s.n, profile, s0, v0, dv0, s.r_max.ln(), tol)?)?, None))
        }
        Initial::Bracket { lo, hi, target, max_iter } => {
            let res = shoot(s.n, profile, lo, hi, target, max_iter, s.r_max, tol, &s.calibration)?;
            let summary = ShootingSummary { threshold: res.threshold, lo: res.lo, hi: res.hi, iterations: res.iterations };
            let sol = if res.lo_report.decay.class == target { res.lo_solution } else { res.hi_solution };
            Ok((sol, Some(summary)))
        }
    }
}

/// Runs the scenario with `profile` in place of `s.profile`, which lets
/// callers supply custom curvature functions.
pub fn run_scenario_with_profile(s: &Scenario, profile: &CurvatureProfile) -> Result<VerificationReport> {
    match solve_scenario(s, profile) {
        Ok((sol, shooting)) => {
            let mut report = verify_solution(s, &sol);
            report.shooting = shooting;
            Ok(report)
        }
        Err(Error::Inconclusive(k)) => {
            let mut report = empty_report(s, profile);
            report.checks = s
                .checks
                .iter()
                .map(|&c| CheckResult::inconclusive(c, Reason::ShootingUndetermined, vec![], format!("{k} consecutive Undetermined midpoints")))
                .collect();
            report.tally = tally(&report.checks);
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

/// Reports of a one-parameter sweep, in the order of `values`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub path: String,
    pub values: Vec<f64>,
    pub reports: Vec<VerificationReport>,
}

/// Writes `value` at the dotted `path` of the scenario's serialized form.
/// The path must already hold a number.
pub fn with_parameter(base: &Scenario, path: &str, value: f64) -> Result<Scenario> {
    let mut doc = serde_json::to_value(base)?;
    let mut slot = &mut doc;
    for key in path.split('.') {
        slot = match slot {
            serde_json::Value::Object(map) => map.get_mut(key),
            serde_json::Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)),
            _ => None,
        }
        .ok_or_else(|| Error::InvalidPath(path.to_string()))?;
    }
    let serde_json::Value::Number(old) = slot else {
        return Err(Error::InvalidPath(path.to_string()));
    };
    *slot = if old.is_f64() {
        serde_json::Number::from_f64(value).map(serde_json::Value::Number).ok_or_else(|| {
            Error::InvalidArgument(format!("{value} cannot be stored at `{path}`"))
        })?
    } else if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        serde_json::Value::from(value as u64)
    } else {
        return Err(Error::InvalidArgument(format!("`{path}` holds an integer, got {value}")));
    };
    let mut s: Scenario = serde_json::from_value(doc).map_err(|e| Error::InvalidArgument(format!("`{path}` = {value}: {e}")))?;
    s.name = format!("{}[{path}={value}]", base.name);
    Ok(s)
}

/// Runs `base` once per value of the parameter at `path`. Runs are
/// independent and may execute in parallel; results keep input order.
pub fn sweep(base: &Scenario, path: &str, values: &[f64]) -> Result<SweepResult> {
    // Resolve the path even when there is nothing to run.
    with_parameter(base, path, base_value(base, path)?)?;
    let scenarios = values.iter().map(|&v| with_parameter(base, path, v)).collect::<Result<Vec<_>>>()?;
    let reports = scenarios.par_iter().map(run_scenario).collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { path: path.to_string(), values: values.to_vec(), reports })
}

fn base_value(base: &Scenario, path: &str) -> Result<f64> {
    let doc = serde_json::to_value(base)?;
    path.split('.')
        .try_fold(&doc, |v, key| match v {
            serde_json::Value::Object(map) => map.get(key),
            serde_json::Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get(i)),
            _ => None,
        })
        .and_then(|v| v.as_f64())
        .ok_or_else(|| Error::InvalidPath(path.to_string()))
}

impl SweepResult {
    /// One row per run: parameter value, headline numbers, then one column per check.
    pub fn summary_csv(&self) -> String {
        let checks: Vec<Check> = self.reports.first().map_or(Vec::new(), |r| r.checks.iter().map(|c| c.check).collect());
        let mut out = String::from("index,value,status,decay_class,kappa,pohozaev,pohozaev_uncertainty");
        for c in &checks {
            out.push(',');
            out.push_str(c.id());
        }
        out.push('\n');
        let num = |x: Option<f64>| x.map_or(String::new(), |v| format!("{v:.16e}"));
        for (i, (value, r)) in self.values.iter().zip(&self.reports).enumerate() {
            let status = match r.status {
                Some(Status::ReachedRmax) => "reached_rmax",
                Some(Status::CrossedZero(_)) => "crossed_zero",
                Some(Status::Overflow(_)) => "overflow",
                Some(Status::StepUnderflow(_)) => "step_underflow",
                None => "",
            };
            let _ = write!(
                out,
                "{i},{value:.16e},{status},{},{},{},{}",
                r.decay_class.map_or(String::new(), |c| format!("{c:?}")),
                num(r.kappa),
                num(r.pohozaev),
                num(r.pohozaev_uncertainty)
            );
            for c in &r.checks {
                let _ = write!(out, ",{:?}", c.outcome);
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scenario(initial: Initial, value: f64, checks: Vec<Check>) -> Scenario {
        Scenario {
            name: "t".into(),
            n: Dimension::new(4).unwrap(),
            profile: ProfileSpec::Constant { value },
            initial,
            r_max: 1e4,
            tolerances: Tolerances::default(),
            checks,
            calibration: Calibration::default(),
        }
    }

    #[test]
    fn catalogue_ids_round_trip() {
        for c in Check::ALL {
            assert_eq!(c.id().parse::<Check>().unwrap(), c);
            assert_eq!(serde_json::to_string(&c).unwrap(), format!("\"{}\"", c.id()));
        }
        assert!("THM_Z".parse::<Check>().is_err());
        assert!(serde_json::from_str::<Check>("\"THM_Z\"").is_err());
    }

    #[test]
    fn bubble_scenario_passes() {
        let s = scenario(
            Initial::Height { u0: 0.5 },
            8.0,
            vec![Check::PohozaevIdentity, Check::FastDecayBounds, Check::FastDecayLimit],
        );
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.tally, Tally { pass: 3, fail: 0, inconclusive: 0 }, "{}", r.to_text());
        assert_eq!(r.u0, Some(0.5));
    }

    #[test]
    fn cylinder_fixed_point_scenario() {
        let s = scenario(
            Initial::Cylinder { s0: default_s0(), v0: None, fraction: 1.0, dv0: 0.0 },
            1.0,
            vec![Check::PohozaevSign, Check::LogVolumeGrowth, Check::CompletenessVolume],
        );
        let r = run_scenario(&s).unwrap();
        assert_eq!(r.overall(), Outcome::Pass, "{}", r.to_text());
        let p = r.pohozaev.unwrap();
        assert!((p / (-PI * PI / 2.0) - 1.0).abs() < 1e-8, "{p}");
    }

    #[test]
    fn short_tail_is_inconclusive() {
        let s = Scenario {
            r_max: 3.0,
            ..scenario(Initial::Height { u0: 0.5 }, 8.0, vec![Check::FastDecayBounds, Check::PohozaevSign, Check::CompletenessVolume])
        };
        let r = run_scenario(&s).unwrap();
        for c in &r.checks {
            assert_eq!(c.outcome, Outcome::Inconclusive);
            assert_eq!(c.reason, Some(Reason::InsufficientTail));
        }
    }

    #[test]
    fn crossed_solutions_are_not_positive() {
        // Curvature jumping up past the bubble's core drives u through zero.
        let mut s = scenario(Initial::Height { u0: 1.0 }, 1.0, vec![Check::PohozaevSign, Check::PohozaevIdentity]);
        s.profile = ProfileSpec::Plateau { inner: 1.0, outer: 4.0, radius: 1.0 };
        let r = run_scenario(&s).unwrap();
        assert!(matches!(r.status, Some(Status::CrossedZero(_))));
        assert_eq!(r.checks[0].reason, Some(Reason::NotPositive));
        assert_eq!(r.checks[1].outcome, Outcome::Pass);
    }

    #[test]
    fn fail_and_inconclusive_carry_their_evidence() {
        let s = scenario(Initial::Height { u0: 0.5 }, 8.0, Check::ALL.to_vec());
        let r = run_scenario(&s).unwrap();
        for c in &r.checks {
            match c.outcome {
                Outcome::Fail => assert!(c.measurements.iter().any(|m| m.threshold.is_some())),
                Outcome::Inconclusive => assert!(c.reason.is_some()),
                Outcome::Pass => {}
            }
        }
        assert_eq!(r.checks.len(), 10);
    }

    #[test]
    fn reports_are_deterministic_and_round_trip() {
        let s = scenario(Initial::Height { u0: 0.7 }, 2.0, vec![Check::PohozaevIdentity, Check::FastDecayLimit]);
        let a = run_scenario(&s).unwrap().to_json().unwrap();
        let b = run_scenario(&s).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let back = VerificationReport::from_json(&a).unwrap();
        assert_eq!(back.to_json().unwrap(), a);
    }

    #[test]
    fn parameter_paths() {
        let s = scenario(Initial::Height { u0: 0.5 }, 8.0, vec![]);
        assert_eq!(with_parameter(&s, "initial.u0", 0.25).unwrap().initial, Initial::Height { u0: 0.25 });
        assert_eq!(with_parameter(&s, "n", 5.0).unwrap().n.get(), 5);
        assert!(with_parameter(&s, "n", 4.5).is_err());
        assert!(matches!(with_parameter(&s, "initial.bogus", 1.0), Err(Error::InvalidPath(_))));
        assert!(matches!(with_parameter(&s, "name", 1.0), Err(Error::InvalidPath(_))));
        assert!(matches!(sweep(&s, "initial.nope", &[]), Err(Error::InvalidPath(_))));
        assert!(sweep(&s, "initial.u0", &[]).unwrap().reports.is_empty());
    }

    #[test]
    fn sweep_keeps_input_order() {
        let s = scenario(Initial::Height { u0: 0.5 }, 8.0, vec![Check::PohozaevIdentity]);
        let values = [0.9, 0.2, 0.5];
        let out = sweep(&s, "initial.u0", &values).unwrap();
        let heights: Vec<f64> = out.reports.iter().map(|r| r.u0.unwrap()).collect();
        assert_eq!(heights, values);
        let csv = out.summary_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("index,value,status,decay_class,kappa,pohozaev,pohozaev_uncertainty,POHOZAEV_IDENTITY\n"));
    }

    #[test]
    fn text_rendering_lists_every_check() {
        let s = scenario(Initial::Height { u0: 0.5 }, 8.0, vec![Check::PohozaevIdentity, Check::FastDecayLimit]);
        let text = run_scenario(&s).unwrap().to_text();
        assert!(text.contains("POHOZAEV_IDENTITY"));
        assert!(text.contains("APP_A1_C0"));
        assert!(text.contains("max_residual"));
    }
}
