//! Radial curvature functions `K(r)` with analytic derivatives.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};

/// User callback returning `(K(r), K′(r))`.
pub type CustomFn = Arc<dyn Fn(f64) -> std::result::Result<(f64, f64), String> + Send + Sync>;

/// `a² ≤ K(r) ≤ b²` for `r ≥ radius`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
    pub radius: f64,
}

impl Bounds {
    pub fn new(lower: f64, upper: f64, radius: f64) -> Result<Self> {
        if !(lower > 0.0 && upper >= lower && upper.is_finite() && radius >= 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "bounds need 0 < a² ≤ b² < ∞ and r₀ ≥ 0, got a² = {lower}, b² = {upper}, r₀ = {radius}"
            )));
        }
        Ok(Bounds { lower, upper, radius })
    }
}

/// Declarative form of the built-in families, as read from configuration files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    /// `K ≡ value`.
    Constant { value: f64 },
    /// `inner` on `[0, radius]`, `outer` beyond `1.1·radius`, smoothstep blend between.
    Plateau { inner: f64, outer: f64, radius: f64 },
    /// `K = limit + amplitude·e^(−rate·r)`.
    ExpPerturbed { limit: f64, amplitude: f64, rate: f64 },
    /// `K = limit + amplitude·r^(−exponent)` for `r ≥ 1`, quadratic cap inside the unit ball.
    PowerPerturbed { limit: f64, amplitude: f64, exponent: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Constant,
    Plateau,
    ExpPerturbed,
    PowerPerturbed,
    Custom,
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

fn finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {x}")))
    }
}

impl ProfileSpec {
    pub fn kind(&self) -> ProfileKind {
        match self {
            ProfileSpec::Constant { .. } => ProfileKind::Constant,
            ProfileSpec::Plateau { .. } => ProfileKind::Plateau,
            ProfileSpec::ExpPerturbed { .. } => ProfileKind::ExpPerturbed,
            ProfileSpec::PowerPerturbed { .. } => ProfileKind::PowerPerturbed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ProfileSpec::Constant { value } => positive("value", value),
            ProfileSpec::Plateau { inner, outer, radius } => {
                positive("inner", inner)?;
                positive("outer", outer)?;
                positive("radius", radius)
            }
            ProfileSpec::ExpPerturbed { limit, amplitude, rate } => {
                positive("limit", limit)?;
                finite("amplitude", amplitude)?;
                positive("rate", rate)?;
                positive("K(0)", limit + amplitude)
            }
            ProfileSpec::PowerPerturbed { limit, amplitude, exponent } => {
                positive("limit", limit)?;
                finite("amplitude", amplitude)?;
                positive("exponent", exponent)?;
                positive("K(0)", limit + amplitude * (1.0 + exponent / 2.0))
            }
        }
    }

    fn eval(&self, r: f64) -> (f64, f64) {
        match *self {
            ProfileSpec::Constant { value } => (value, 0.0),
            ProfileSpec::Plateau { inner, outer, radius } => {
                let width = 0.1 * radius;
                if r <= radius {
                    (inner, 0.0)
                } else if r >= radius + width {
                    (outer, 0.0)
                } else {
                    let t = (r - radius) / width;
                    let jump = outer - inner;
                    (inner + jump * t * t * (3.0 - 2.0 * t), jump * 6.0 * t * (1.0 - t) / width)
                }
            }
            ProfileSpec::ExpPerturbed { limit, amplitude, rate } => {
                let e = amplitude * (-rate * r).exp();
                (limit + e, -rate * e)
            }
            ProfileSpec::PowerPerturbed { limit, amplitude, exponent: l } => {
                if r >= 1.0 {
                    let e = amplitude * r.powf(-l);
                    (limit + e, -l * e / r)
                } else {
                    (
                        limit + amplitude * (1.0 + 0.5 * l * (1.0 - r * r)),
                        -l * amplitude * r,
                    )
                }
            }
        }
    }

    fn limit(&self) -> f64 {
        match *self {
            ProfileSpec::Constant { value } => value,
            ProfileSpec::Plateau { outer, .. } => outer,
            ProfileSpec::ExpPerturbed { limit, .. } | ProfileSpec::PowerPerturbed { limit, .. } => limit,
        }
    }

    fn bounds(&self) -> Bounds {
        let (lo, hi, radius) = match *self {
            ProfileSpec::Constant { value } => (value, value, 0.0),
            ProfileSpec::Plateau { inner, outer, .. } => (inner.min(outer), inner.max(outer), 0.0),
            ProfileSpec::ExpPerturbed { limit, amplitude, .. } => {
                (limit.min(limit + amplitude), limit.max(limit + amplitude), 0.0)
            }
            ProfileSpec::PowerPerturbed { limit, amplitude, .. } => {
                (limit.min(limit + amplitude), limit.max(limit + amplitude), 1.0)
            }
        };
        Bounds { lower: lo, upper: hi, radius }
    }

    /// Whether `K` is exactly constant on `[a, b]`.
    fn is_flat_on(&self, a: f64, b: f64) -> bool {
        match *self {
            ProfileSpec::Constant { .. } => true,
            ProfileSpec::Plateau { inner, outer, radius } => {
                inner == outer || b <= radius || a >= 1.1 * radius
            }
            ProfileSpec::ExpPerturbed { amplitude, .. } | ProfileSpec::PowerPerturbed { amplitude, .. } => {
                amplitude == 0.0
            }
        }
    }

    /// Radii where `K` or one of its first two derivatives jumps.
    fn breakpoints(&self) -> Vec<f64> {
        match *self {
            ProfileSpec::Plateau { inner, outer, radius } if inner != outer => vec![radius, 1.1 * radius],
            ProfileSpec::PowerPerturbed { amplitude, .. } if amplitude != 0.0 => vec![1.0],
            _ => Vec::new(),
        }
    }

    pub fn build(&self) -> Result<CurvatureProfile> {
        CurvatureProfile::from_spec(self.clone())
    }
}

#[derive(Clone)]
enum Family {
    Builtin(ProfileSpec),
    Custom { name: String, f: CustomFn, flat: Vec<(f64, f64)> },
    Rescaled { base: Arc<CurvatureProfile>, lambda: f64 },
}

/// A radial curvature function with its structural metadata.
///
/// Immutable after construction and cheap to clone.
#[derive(Clone)]
pub struct CurvatureProfile {
    family: Family,
    k_infinity: Option<f64>,
    bounds: Bounds,
}

impl fmt::Debug for CurvatureProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CurvatureProfile")
            .field("name", &self.name())
            .field("k_infinity", &self.k_infinity)
            .field("bounds", &self.bounds)
            .finish()
    }
}

impl CurvatureProfile {
    pub fn from_spec(spec: ProfileSpec) -> Result<Self> {
        spec.validate()?;
        Ok(CurvatureProfile { k_infinity: Some(spec.limit()), bounds: spec.bounds(), family: Family::Builtin(spec) })
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::Constant { value })
    }

    pub fn plateau(inner: f64, outer: f64, radius: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::Plateau { inner, outer, radius })
    }

    pub fn exp_perturbed(limit: f64, amplitude: f64, rate: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::ExpPerturbed { limit, amplitude, rate })
    }

    pub fn power_perturbed(limit: f64, amplitude: f64, exponent: f64) -> Result<Self> {
        Self::from_spec(ProfileSpec::PowerPerturbed { limit, amplitude, exponent })
    }

    /// A profile given by a callback. `k_infinity` is the limit at infinity if
    /// there is one; `bounds` must hold on `[bounds.radius, ∞)`.
    pub fn custom<F>(name: impl Into<String>, k_infinity: Option<f64>, bounds: Bounds, f: F) -> Result<Self>
    where
        F: Fn(f64) -> std::result::Result<(f64, f64), String> + Send + Sync + 'static,
    {
        if let Some(k) = k_infinity {
            positive("k_infinity", k)?;
        }
        let bounds = Bounds::new(bounds.lower, bounds.upper, bounds.radius)?;
        Ok(CurvatureProfile {
            family: Family::Custom { name: name.into(), f: Arc::new(f), flat: Vec::new() },
            k_infinity,
            bounds,
        })
    }

    /// Declares `K` exactly constant on `[a, b]` (only meaningful for custom profiles).
    /// The solver uses this to hold the cylinder first integral fixed there.
    pub fn with_flat_interval(mut self, a: f64, b: f64) -> Self {
        if let Family::Custom { flat, .. } = &mut self.family {
            flat.push((a.min(b), a.max(b)));
        }
        self
    }

    pub fn kind(&self) -> ProfileKind {
        match &self.family {
            Family::Builtin(spec) => spec.kind(),
            Family::Custom { .. } => ProfileKind::Custom,
            Family::Rescaled { base, .. } => base.kind(),
        }
    }

    pub fn spec(&self) -> Option<&ProfileSpec> {
        match &self.family {
            Family::Builtin(spec) => Some(spec),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.family {
            Family::Builtin(spec) => format!("{:?}", spec.kind()),
            Family::Custom { name, .. } => name.clone(),
            Family::Rescaled { base, lambda } => format!("{}(λ={lambda})", base.name()),
        }
    }

    pub fn k_infinity(&self) -> Option<f64> {
        self.k_infinity
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    /// `(K(r), K′(r))`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64)> {
        let (k, dk) = match &self.family {
            Family::Builtin(spec) => spec.eval(r),
            Family::Custom { f, .. } => f(r).map_err(|message| Error::Profile { r, message })?,
            Family::Rescaled { base, lambda } => {
                let (k, dk) = base.eval(lambda * r)?;
                (k, lambda * dk)
            }
        };
        if !(k.is_finite() && dk.is_finite()) {
            return Err(Error::Profile { r, message: format!("non-finite value K = {k}, K′ = {dk}") });
        }
        Ok((k, dk))
    }

    /// `(K(eˢ), dK/ds)` with `dK/ds = r K′(r)`.
    pub fn eval_log(&self, s: f64) -> Result<(f64, f64)> {
        let r = s.exp();
        let (k, dk) = self.eval(r)?;
        Ok((k, r * dk))
    }

    /// Whether `K` is exactly constant on `[a, b]`.
    pub fn is_flat_on(&self, a: f64, b: f64) -> bool {
        match &self.family {
            Family::Builtin(spec) => spec.is_flat_on(a, b),
            Family::Custom { flat, .. } => flat.iter().any(|&(lo, hi)| lo <= a && b <= hi),
            Family::Rescaled { base, lambda } => base.is_flat_on(lambda * a, lambda * b),
        }
    }

    /// Radii where `K` may fail to be smooth, ascending. The solver lands on
    /// them. Custom profiles report the ends of their flat intervals.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.family {
            Family::Builtin(spec) => spec.breakpoints(),
            Family::Custom { flat, .. } => flat.iter().flat_map(|&(a, b)| [a, b]).filter(|r| r.is_finite() && *r > 0.0).collect(),
            Family::Rescaled { base, lambda } => base.breakpoints().into_iter().map(|r| r / lambda).collect(),
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// The profile `r ↦ K(λr)`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        positive("λ", lambda)?;
        let bounds = Bounds { radius: self.bounds.radius / lambda, ..self.bounds };
        let family = match &self.family {
            Family::Builtin(spec) => match *spec {
                ProfileSpec::Constant { .. } => return Ok(self.clone()),
                ProfileSpec::Plateau { inner, outer, radius } => {
                    Family::Builtin(ProfileSpec::Plateau { inner, outer, radius: radius / lambda })
                }
                ProfileSpec::ExpPerturbed { limit, amplitude, rate } => {
                    Family::Builtin(ProfileSpec::ExpPerturbed { limit, amplitude, rate: rate * lambda })
                }
                ProfileSpec::PowerPerturbed { .. } => Family::Rescaled { base: Arc::new(self.clone()), lambda },
            },
            Family::Rescaled { base, lambda: inner } => Family::Rescaled { base: base.clone(), lambda: inner * lambda },
            Family::Custom { .. } => Family::Rescaled { base: Arc::new(self.clone()), lambda },
        };
        Ok(CurvatureProfile { family, k_infinity: self.k_infinity, bounds })
    }

    /// Samples `K` on a log grid over `[max(r₀, 1e−2), r_max]` and reports
    /// whether the declared bounds hold there.
    pub fn bounds_hold(&self, r_max: f64) -> Result<bool> {
        let lo = self.bounds.radius.max(1e-2);
        for r in log_grid(lo, r_max.max(lo), 64) {
            let (k, _) = self.eval(r)?;
            if k < self.bounds.lower || k > self.bounds.upper {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Points `lo·10^(j/per_decade)` up to and including `hi`.
pub(crate) fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let count = (decades * per_decade as f64).ceil().max(1.0) as usize;
    (0..=count)
        .map(|j| lo * 10f64.powf(decades * j as f64 / count as f64))
        .collect()
}

/// Outcome of one structural condition, with the number it was decided on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub holds: bool,
    pub inconclusive: bool,
    /// Fitted slope or ratio the decision rests on; `None` when the tail vanished identically.
    pub evidence: Option<f64>,
    pub detail: String,
}

impl ConditionCheck {
    fn decided(holds: bool, evidence: Option<f64>, detail: impl Into<String>) -> Self {
        ConditionCheck { holds, inconclusive: false, evidence, detail: detail.into() }
    }
}

/// Evidence for the three sufficient conditions under which the Pohozaev limit exists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `r K′ ∈ L^m` outside the unit ball.
    pub integrability: ConditionCheck,
    /// `|K′| ≤ C / (r (ln r)^(1+ε))` on the tail.
    pub log_decay: ConditionCheck,
    /// `r K′` keeps one sign on the tail.
    pub sign_constancy: ConditionCheck,
    pub window: (f64, f64),
}

impl ConditionReport {
    pub fn any_holds(&self) -> bool {
        [&self.integrability, &self.log_decay, &self.sign_constancy]
            .iter()
            .any(|c| c.holds && !c.inconclusive)
    }
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let rms = (xs.iter().zip(ys).map(|(x, y)| (y - icpt - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    (slope, icpt, rms)
}

/// Decides the three tail conditions on a log grid over
/// `[max(r_max/100, r₀, e), r_max]`. `m > 1` is the integrability exponent.
pub fn check_lemma24_conditions(
    profile: &CurvatureProfile,
    n: Dimension,
    m: f64,
    eps: f64,
    r_max: f64,
) -> Result<ConditionReport> {
    if !(m > 1.0) {
        return Err(Error::InvalidArgument(format!("integrability exponent must exceed 1, got {m}")));
    }
    positive("ε", eps)?;
    let r0 = profile.bounds().radius;
    if !(r_max >= 10.0 * r0) || !(r_max > std::f64::consts::E * 10.0) {
        return Err(Error::InvalidArgument(format!(
            "r_max = {r_max} does not reach the tail regime (r₀ = {r0})"
        )));
    }
    let lo = (r_max / 100.0).max(r0).max(std::f64::consts::E);
    let grid = log_grid(lo, r_max, 64);
    let mut rk = Vec::with_capacity(grid.len());
    for &r in &grid {
        rk.push(r * profile.eval(r)?.1);
    }

    // (I): slope of ln(|rK′|^m r^(n−1)) against ln r over the last decade.
    let last: Vec<usize> = (0..grid.len()).filter(|&i| grid[i] >= r_max / 10.0).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = last
        .iter()
        .filter(|&&i| rk[i] != 0.0)
        .map(|&i| {
            let r = grid[i];
            (r.ln(), m * rk[i].abs().ln() + (n.as_f64() - 1.0) * r.ln())
        })
        .filter(|(_, y)| y.is_finite())
        .unzip();
    let integrability = if xs.len() < 8 {
        ConditionCheck::decided(true, None, "r K′ vanishes on the tail")
    } else {
        let (slope, _, rms) = least_squares(&xs, &ys);
        let half = xs.len() / 2;
        let (early, _, _) = least_squares(&xs[..half], &ys[..half]);
        let (late, _, _) = least_squares(&xs[half..], &ys[half..]);
        let steepening = late < early;
        let margin = -1.05;
        if rms <= 0.05 {
            ConditionCheck::decided(slope < margin, Some(slope), format!("tail log-slope {slope:.4}"))
        } else if steepening && late < margin {
            ConditionCheck::decided(true, Some(late), format!("tail log-slope steepening to {late:.4}"))
        } else {
            ConditionCheck {
                holds: slope < margin,
                inconclusive: true,
                evidence: Some(slope),
                detail: format!("fit residual {rms:.3} too large; extend r_max"),
            }
        }
    };

    // (II): g = |K′| r (ln r)^(1+ε) must stay bounded on the tail.
    let g: Vec<f64> = grid
        .iter()
        .zip(&rk)
        .map(|(&r, &x)| x.abs() * r.ln().powf(1.0 + eps))
        .collect();
    let half = g.len() / 2;
    let sup_early = g[..half].iter().cloned().fold(0.0, f64::max);
    let sup_late = g[half..].iter().cloned().fold(0.0, f64::max);
    let log_decay = if sup_late == 0.0 {
        ConditionCheck::decided(true, Some(0.0), "K′ vanishes on the tail")
    } else {
        let ratio = sup_late / sup_early;
        ConditionCheck::decided(ratio <= 1.0 + 1e-9, Some(ratio), format!("sup ratio late/early {ratio:.4}"))
    };

    // (III): sign constancy of r K′, ignoring round-off sized values.
    let scale = rk.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let floor = 1e-14 * scale;
    let pos = rk.iter().any(|&x| x > floor);
    let neg = rk.iter().any(|&x| x < -floor);
    let changes = rk
        .iter()
        .filter(|x| x.abs() > floor)
        .collect::<Vec<_>>()
        .windows(2)
        .filter(|w| w[0].signum() != w[1].signum())
        .count();
    let sign_constancy = ConditionCheck::decided(
        !(pos && neg),
        Some(changes as f64),
        format!("{changes} sign changes of r K′ on the tail"),
    );

    Ok(ConditionReport { integrability, log_decay, sign_constancy, window: (lo, r_max) })
}

/// Checks `K′(r) ≥ −C e^(−c r)` on `[max(r₀, 1), r_max]`: the negative part
/// of `K′` must vanish or decay at a positive exponential rate.
pub fn check_exp_lower_bound(profile: &CurvatureProfile, r_max: f64) -> Result<ConditionCheck> {
    let lo = profile.bounds().radius.max(1.0);
    if !(r_max > lo) {
        return Err(Error::InvalidArgument(format!("r_max = {r_max} must exceed {lo}")));
    }
    let count = 4096;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 0..=count {
        let r = lo + (r_max - lo) * j as f64 / count as f64;
        let neg = (-profile.eval(r)?.1).max(0.0);
        if neg > 0.0 {
            xs.push(r);
            ys.push(neg.ln());
        }
    }
    if xs.len() < 2 {
        return Ok(ConditionCheck::decided(true, None, "negative part of K′ vanishes"));
    }
    // Exponential decay is linear in r, power decay is linear in ln r; take the better fit.
    let (slope, _, rms) = least_squares(&xs, &ys);
    let ln_xs: Vec<f64> = xs.iter().map(|r| r.ln()).collect();
    let (_, _, rms_power) = least_squares(&ln_xs, &ys);
    let exponential = rms <= rms_power;
    Ok(ConditionCheck::decided(
        slope <= -1e-3 && exponential,
        Some(slope),
        if exponential {
            format!("negative part of K′ decays at rate {:.4e}", -slope)
        } else {
            format!("negative part of K′ decays like a power (rms {rms:.3e} in r vs {rms_power:.3e} in ln r)")
        },
    ))
}
