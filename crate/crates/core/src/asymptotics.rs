//! Tail analysis of radial solutions: decay exponent, completeness of the
//! conformal metric, growth of its volume, the fast-decay constant `c₀`,
//! the gradient ratio `r|u′|/u`, and the `ω(r) = ω_n r^(n−2) u²` diagnostic.

use std::f64::consts::LN_10;

use serde::{Deserialize, Serialize};

use crate::calibration::Calibration;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::solver::{cylinder_transform, CylinderSolution, RadialSolution, Status, LOG_STEP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayClass {
    Fast,
    Slow,
    Crossed,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Completeness {
    Complete,
    Incomplete,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VolumeGrowth {
    Finite,
    LogDivergent,
    PolyDivergent,
    Undetermined,
}

impl VolumeGrowth {
    pub fn is_divergent(self) -> bool {
        matches!(self, VolumeGrowth::LogDivergent | VolumeGrowth::PolyDivergent)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    /// Least squares over every tail sample.
    AllSamples,
    /// Least squares over the maxima of `v = r^m u`, which sit at a common phase of an oscillating tail.
    SamePhase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub kappa: Option<f64>,
    /// 95% confidence interval of the slope when at least three points entered the fit.
    pub ci95: Option<(f64, f64)>,
    pub class: DecayClass,
    pub method: FitMethod,
    pub rms: f64,
    /// Exponents fitted on each decade of the window.
    pub decade_kappas: Vec<f64>,
    pub stable: bool,
    pub window: (f64, f64),
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub r: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// `d(value)/d(ln R)` fitted on the tail window.
    pub slope: f64,
    /// Rms of the linear-in-ln R fit relative to the range of the curve on the window.
    pub relative_rms: f64,
    /// Last-decade increment over the previous decade's.
    pub increment_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C0Estimate {
    pub r0: f64,
    /// From the integral representation, including the estimated truncated tail.
    pub formula: f64,
    /// `r_end^(n−2) u(r_end)`.
    pub direct: f64,
    /// Bound on the truncated tail `∫_{r_end}^∞`.
    pub tail_bound: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarnackStats {
    pub sup: f64,
    pub argmax: f64,
    pub last_decade_sup: f64,
    /// Sup over `[1, r_end/10)`, everything the last decade extends.
    pub earlier_sup: f64,
    pub stable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaSample {
    pub r: f64,
    pub omega: f64,
    /// `r ω′(r)` from the closed expression in `u, u′`.
    pub r_domega: f64,
    /// `dω/ds` by sixth-order central differences on the log grid (NaN near the ends).
    pub fd: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaDiagnostic {
    pub samples: Vec<OmegaSample>,
    pub max_rel_err: f64,
    pub agrees: bool,
    /// Largest gap between `ω_n r^n (u′ + m u/r)²` and `ω_n v′²`, relative to `ω_n r^n (u′² + m²u²/r²)`.
    pub energy_identity_gap: f64,
    /// Largest `ω_n v′²` over the tail window.
    pub tail_energy: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtremumKind {
    Max,
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub s: f64,
    pub kind: ExtremumKind,
    pub v: f64,
    /// `(m²/K(eˢ))^((n−2)/4)`, recorded at maxima.
    pub lower_bound: Option<f64>,
    pub meets_bound: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizedFit {
    pub a: f64,
    pub b: f64,
    /// `a` and `b` for the rescaled `w(s) = v(s_c + s)/v(s_c)`.
    pub a_scaled: f64,
    pub b_scaled: f64,
    pub residual: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsReport {
    pub n: Dimension,
    pub status: Status,
    pub decay: DecayFit,
    pub insufficient_tail: bool,
    pub completeness: Completeness,
    pub length: Option<GrowthFit>,
    pub volume_growth: VolumeGrowth,
    pub volume: Option<GrowthFit>,
    pub c0: Option<C0Estimate>,
    pub bounds: Option<(f64, f64)>,
    pub harnack: Option<HarnackStats>,
    pub omega: OmegaDiagnostic,
    pub length_curve: Vec<CurvePoint>,
    pub volume_curve: Vec<CurvePoint>,
    pub calibration: Calibration,
}

struct Line {
    slope: f64,
    rms: f64,
    se: f64,
}

fn fit_line(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let se = if xs.len() > 2 { (ss / (n - 2.0) / sxx).sqrt() } else { f64::NAN };
    Line { slope, rms: (ss / n).sqrt(), se }
}

/// Two-sided 97.5% Student t quantile, by its large-ν expansion.
fn t975(dof: f64) -> f64 {
    1.959964 + 2.372 / dof + 2.82 / (dof * dof)
}

/// Sample indices used for tail analyses: the forced log grid, or every
/// positive-radius sample when the grid carries none.
fn analysis_indices(sol: &RadialSolution) -> Vec<usize> {
    if sol.log_grid().is_empty() {
        (0..sol.grid().len()).filter(|&i| sol.grid()[i].r > 0.0).collect()
    } else {
        sol.log_grid().to_vec()
    }
}

/// Log-grid samples of the last `decades` decades, never reaching below `r = 1`.
fn tail_indices(sol: &RadialSolution, decades: f64) -> (Vec<usize>, (f64, f64)) {
    let r_end = sol.range().1;
    let start = (r_end / 10f64.powf(decades)).max(1.0f64.min(r_end));
    let idx = analysis_indices(sol)
        .into_iter()
        .filter(|&i| {
            let p = sol.grid()[i];
            p.r >= start * (1.0 - 1e-12) && p.u > 0.0
        })
        .collect();
    (idx, (start, r_end))
}

fn class_for(n: Dimension, kappa: f64, band: f64) -> DecayClass {
    if (kappa / (n.as_f64() - 2.0) - 1.0).abs() <= band {
        DecayClass::Fast
    } else if (kappa / n.m() - 1.0).abs() <= band {
        DecayClass::Slow
    } else {
        DecayClass::Undetermined
    }
}

/// Turning points of `v = r^m u` between consecutive samples, refined by
/// bisection on the interpolant. `true` marks a maximum.
fn turning_points(sol: &RadialSolution, idx: &[usize]) -> Result<Vec<(f64, bool)>> {
    let m = sol.n().m();
    let dv = |r: f64, u: f64, du: f64| r.powf(m) * (m * u + r * du);
    let vals: Vec<f64> = idx
        .iter()
        .map(|&i| {
            let p = sol.grid()[i];
            dv(p.r, p.u, p.du)
        })
        .collect();
    let scale = idx.iter().map(|&i| sol.grid()[i].u * sol.grid()[i].r.powf(m)).fold(0.0, f64::max);
    let tiny = 1e-10 * scale;
    let mut out = Vec::new();
    let mut last: Option<(usize, f64)> = None;
    for (j, &d) in vals.iter().enumerate() {
        if d.abs() <= tiny {
            continue;
        }
        if let Some((k, prev)) = last {
            if prev.signum() != d.signum() {
                let (mut lo, mut hi) = (sol.grid()[idx[k]].r, sol.grid()[idx[j]].r);
                while hi - lo > 1e-13 * hi {
                    let mid = 0.5 * (lo + hi);
                    let (u, du) = sol.at(mid)?;
                    if dv(mid, u, du).signum() == prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.push((0.5 * (lo + hi), prev > 0.0));
            }
        }
        last = Some((j, d));
    }
    Ok(out)
}

/// Whether `v` is still turning at the end of the tail: a turning point
/// inside the window, or, for periods longer than the window, within one
/// period of its end.
fn oscillation_ongoing(turns: &[(f64, bool)], window: (f64, f64)) -> bool {
    let maxima: Vec<f64> = turns.iter().filter(|t| t.1).map(|t| t.0).collect();
    let (Some(last), true) = (turns.last(), turns.len() >= 3 && maxima.len() >= 2) else {
        return false;
    };
    let period = (maxima[maxima.len() - 1] / maxima[maxima.len() - 2]).ln();
    last.0 >= window.0 || (window.1 / last.0).ln() <= period
}

/// Slope `κ` of `ln u` against `ln r` over the last `decades` decades.
pub fn fit_decay_exponent(sol: &RadialSolution, decades: f64, cal: &Calibration) -> Result<DecayFit> {
    let (idx, window) = tail_indices(sol, decades);
    if let Status::CrossedZero(_) = sol.status() {
        return Ok(DecayFit {
            kappa: None,
            ci95: None,
            class: DecayClass::Crossed,
            method: FitMethod::AllSamples,
            rms: f64::NAN,
            decade_kappas: Vec::new(),
            stable: false,
            window,
            samples: idx.len(),
        });
    }
    if idx.len() < cal.min_tail_samples {
        return Err(Error::InsufficientTail { found: idx.len(), needed: cal.min_tail_samples });
    }
    let point = |i: usize| {
        let p = sol.grid()[i];
        (p.r.ln(), p.u.ln())
    };
    let (xs, ys): (Vec<f64>, Vec<f64>) = idx.iter().map(|&i| point(i)).unzip();
    let all = fit_line(&xs, &ys);

    // An oscillating tail is fitted through its maxima, which share a phase. When
    // the window holds fewer than two, the window reaches back to the last two.
    let turns = turning_points(sol, &analysis_indices(sol))?;
    let all_maxima: Vec<f64> = turns.iter().filter(|t| t.1).map(|t| t.0).collect();
    let mut maxima: Vec<f64> = all_maxima.iter().copied().filter(|&r| r >= window.0).collect();
    if maxima.len() < 2 && all_maxima.len() >= 2 {
        maxima = all_maxima[all_maxima.len() - 2..].to_vec();
    }
    let oscillating = oscillation_ongoing(&turns, window) && maxima.len() >= 2;
    let (method, kappa, ci95, decade_kappas) = if oscillating {
        let mut px = Vec::new();
        let mut py = Vec::new();
        for &r in &maxima {
            px.push(r.ln());
            py.push(sol.at(r)?.0.ln());
        }
        let line = fit_line(&px, &py);
        let ci = if px.len() > 2 {
            let half = t975(px.len() as f64 - 2.0) * line.se;
            Some((-line.slope - half, -line.slope + half))
        } else {
            None
        };
        let pairwise: Vec<f64> = px.windows(2).zip(py.windows(2)).map(|(x, y)| -(y[1] - y[0]) / (x[1] - x[0])).collect();
        (FitMethod::SamePhase, -line.slope, ci, pairwise)
    } else {
        let half = t975(xs.len() as f64 - 2.0) * all.se;
        let mut per_decade = Vec::new();
        let mut lo = window.0;
        while lo * 10.0 <= window.1 * (1.0 + 1e-12) {
            let (dx, dy): (Vec<f64>, Vec<f64>) = xs
                .iter()
                .zip(&ys)
                .filter(|(x, _)| x.exp() >= lo * (1.0 - 1e-12) && x.exp() <= lo * 10.0 * (1.0 + 1e-12))
                .map(|(x, y)| (*x, *y))
                .unzip();
            if dx.len() >= 3 {
                per_decade.push(-fit_line(&dx, &dy).slope);
            }
            lo *= 10.0;
        }
        (FitMethod::AllSamples, -all.slope, Some((-all.slope - half, -all.slope + half)), per_decade)
    };
    let stable = decade_kappas.iter().all(|k| (k / kappa - 1.0).abs() <= cal.kappa_stability);
    let rms_ok = oscillating || all.rms <= cal.max_fit_rms;
    let class = if sol.status().is_complete() && stable && rms_ok && kappa.is_finite() {
        class_for(sol.n(), kappa, cal.class_band)
    } else {
        DecayClass::Undetermined
    };
    Ok(DecayFit {
        kappa: Some(kappa),
        ci95,
        class,
        method,
        rms: all.rms,
        decade_kappas,
        stable,
        window,
        samples: idx.len(),
    })
}

fn curve(sol: &RadialSolution, values: &[f64], from: f64) -> Vec<CurvePoint> {
    analysis_indices(sol)
        .into_iter()
        .filter(|&i| sol.grid()[i].r >= from * (1.0 - 1e-12))
        .map(|i| CurvePoint { r: sol.grid()[i].r, value: values[i] })
        .collect()
}

/// Curve value at `r`, linear in `ln r` between points.
fn value_at(points: &[CurvePoint], r: f64) -> Option<f64> {
    let j = points.partition_point(|p| p.r < r);
    if j < points.len() && (points[j].r / r - 1.0).abs() < 1e-12 {
        return Some(points[j].value);
    }
    if j == 0 || j == points.len() {
        return None;
    }
    let (a, b) = (points[j - 1], points[j]);
    let t = (r / a.r).ln() / (b.r / a.r).ln();
    Some(a.value + t * (b.value - a.value))
}

/// Length in `ln r` over which tail increments are compared: a decade, or a
/// whole number of oscillation periods covering at least one decade. `None`
/// when `v` turns more than once but the tail does not hold a full period.
fn increment_span(sol: &RadialSolution, window: (f64, f64)) -> Result<Option<f64>> {
    let turns = turning_points(sol, &analysis_indices(sol))?;
    let maxima: Vec<f64> = turns.iter().filter(|t| t.1).map(|t| t.0).collect();
    if turns.len() < 2 {
        return Ok(Some(LN_10));
    }
    if maxima.len() < 2 || !oscillation_ongoing(&turns, window) {
        return Ok(None);
    }
    let period = (maxima[maxima.len() - 1] / maxima[maxima.len() - 2]).ln();
    Ok(Some(period * (LN_10 / period).ceil()))
}

fn growth(points: &[CurvePoint], window: (f64, f64), span: f64) -> Option<GrowthFit> {
    let tail: Vec<&CurvePoint> = points.iter().filter(|p| p.r >= window.0 * (1.0 - 1e-12)).collect();
    if tail.len() < 3 {
        return None;
    }
    let r_end = window.1;
    let v_end = value_at(points, r_end)?;
    let v_mid = value_at(points, r_end * (-span).exp())?;
    let v_start = value_at(points, r_end * (-2.0 * span).exp())?;
    // increments lost in round-off count as converged
    let ratio = if (v_end - v_mid).abs() <= 1e-10 * v_end.abs() {
        0.0
    } else {
        (v_end - v_mid) / (v_mid - v_start)
    };
    let xs: Vec<f64> = tail.iter().map(|p| p.r.ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|p| p.value).collect();
    let line = fit_line(&xs, &ys);
    let range = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - ys.iter().cloned().fold(f64::INFINITY, f64::min);
    Some(GrowthFit {
        slope: line.slope,
        relative_rms: if range > 0.0 { line.rms / range } else { 0.0 },
        increment_ratio: ratio,
    })
}

/// Conformal length `L(R) = ∫₁^R u^(2/(n−2)) dr` on the log grid and its classification.
pub fn completeness_length(sol: &RadialSolution, cal: &Calibration) -> Result<(Vec<CurvePoint>, Option<GrowthFit>, Completeness)> {
    let n = sol.n();
    let e = n.length_exponent();
    let (lo, hi) = sol.range();
    if !(lo <= 1.0 && hi > 1.0) {
        return Ok((Vec::new(), None, Completeness::Undetermined));
    }
    let values = sol.integral_from(1.0, |_, u, _| Ok(u.abs().powf(e)))?;
    // Increments may reach below r = 1, where L is negative.
    let full = curve(sol, &values, 0.0);
    let window = (hi / 10f64.powf(cal.tail_decades), hi);
    let fit = match increment_span(sol, window)? {
        Some(span) if window.0 >= 1.0 => growth(&full, window, span),
        _ => None,
    };
    let points = full.into_iter().filter(|p| p.r >= 1.0 * (1.0 - 1e-12)).collect();
    let class = match &fit {
        Some(g) if sol.status().is_complete() && g.increment_ratio.is_finite() => {
            if g.increment_ratio < cal.finite_ratio {
                Completeness::Incomplete
            } else if g.slope > 0.0 {
                Completeness::Complete
            } else {
                Completeness::Undetermined
            }
        }
        _ => Completeness::Undetermined,
    };
    Ok((points, fit, class))
}

/// Volume `V(R) = ω_n ∫ u^q r^(n−1) dr` from the first sample, and its growth class.
pub fn total_volume(sol: &RadialSolution, cal: &Calibration) -> Result<(Vec<CurvePoint>, Option<GrowthFit>, VolumeGrowth)> {
    let n = sol.n();
    let w = n.sphere_area();
    let values = sol.cumulative_integral(|r, u, _| Ok(w * n.volume_power(u) * r.powf(n.as_f64() - 1.0)))?;
    let points = curve(sol, &values, 0.0);
    let hi = sol.range().1;
    let window = (hi / 10f64.powf(cal.tail_decades), hi);
    let fit = increment_span(sol, window)?.and_then(|span| growth(&points, window, span));
    let class = match &fit {
        Some(g) if sol.status().is_complete() && g.increment_ratio.is_finite() => {
            if g.increment_ratio < cal.finite_ratio {
                VolumeGrowth::Finite
            } else if g.increment_ratio <= cal.poly_ratio {
                VolumeGrowth::LogDivergent
            } else {
                VolumeGrowth::PolyDivergent
            }
        }
        _ => VolumeGrowth::Undetermined,
    };
    Ok((points, fit, class))
}

/// `c₀ = lim r^(n−2) u` from
/// `(1/(n−2)) [∫_{r0}^∞ K t^(n−1) u^p dt − r0^(n−1) u′(r0)]`, truncated at the
/// end of the grid and closed with the fitted power tail.
pub fn c0_limit(sol: &RadialSolution, r0: f64, cal: &Calibration) -> Result<C0Estimate> {
    let fit = fit_decay_exponent(sol, cal.tail_decades, cal)?;
    if fit.class != DecayClass::Fast {
        return Err(Error::ClassMismatch { found: fit.class });
    }
    let n = sol.n();
    let nf = n.as_f64();
    let (u0, du0) = sol.at(r0)?;
    if du0 > 0.0 || u0 <= 0.0 {
        return Err(Error::InvalidArgument(format!("r0 = {r0} is not in the decreasing positive tail")));
    }
    let profile = sol.profile();
    let integral = sol.integral_from(r0, |t, u, _| {
        let (k, _) = profile.eval(t)?;
        Ok(k * t.powf(nf - 1.0) * n.critical_power(u))
    })?;
    let last = sol.grid().len() - 1;
    let end = sol.grid()[last];
    let kappa = fit.kappa.unwrap_or(nf - 2.0);
    let p = n.critical_exponent();
    let amp = end.u * end.r.powf(kappa);
    let decay = kappa * p - nf;
    let tail_shape = amp.powf(p) * end.r.powf(-decay) / decay;
    let (k_end, _) = profile.eval(end.r)?;
    let tail_estimate = k_end * tail_shape;
    let tail_bound = profile.bounds().upper.max(k_end) * tail_shape;
    let formula = (integral[last] + tail_estimate - r0.powf(nf - 1.0) * du0) / (nf - 2.0);
    let direct = end.r.powf(nf - 2.0) * end.u;
    Ok(C0Estimate {
        r0,
        formula,
        direct,
        tail_bound: tail_bound / (nf - 2.0),
        relative_gap: (formula - direct).abs() / formula.abs(),
    })
}

/// `(min, max)` of `r^(n−2) u` over the tail window.
pub fn fast_decay_bounds(sol: &RadialSolution, cal: &Calibration) -> Option<(f64, f64)> {
    let (idx, _) = tail_indices(sol, cal.tail_decades);
    if idx.is_empty() {
        return None;
    }
    let k = sol.n().as_f64() - 2.0;
    Some(idx.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &i| {
        let p = sol.grid()[i];
        let x = p.r.powf(k) * p.u;
        (lo.min(x), hi.max(x))
    }))
}

/// `(min, max)` of `r^((n−2)/2) u` over the tail window.
pub fn slow_decay_bounds(sol: &RadialSolution, cal: &Calibration) -> Option<(f64, f64)> {
    let (idx, _) = tail_indices(sol, cal.tail_decades);
    if idx.is_empty() {
        return None;
    }
    let m = sol.n().m();
    Some(idx.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &i| {
        let p = sol.grid()[i];
        let x = p.r.powf(m) * p.u;
        (lo.min(x), hi.max(x))
    }))
}

/// Supremum of `r|u′|/u` over the tail window, and whether it is stable
/// under extension: the last decade must not exceed the sup over `[1, r_end/10)`.
pub fn harnack_gradient_ratio(sol: &RadialSolution, cal: &Calibration) -> Option<HarnackStats> {
    let (idx, (_, hi)) = tail_indices(sol, cal.tail_decades);
    if idx.is_empty() {
        return None;
    }
    let split = hi / 10.0;
    let mut stats = HarnackStats { sup: 0.0, argmax: f64::NAN, last_decade_sup: 0.0, earlier_sup: 0.0, stable: false };
    for &i in &idx {
        let p = sol.grid()[i];
        let ratio = p.r * p.du.abs() / p.u;
        if ratio > stats.sup || stats.argmax.is_nan() {
            stats.sup = ratio;
            stats.argmax = p.r;
        }
    }
    for p in sol.grid().iter().filter(|p| p.r >= 1.0f64.min(split)) {
        let ratio = p.r * p.du.abs() / p.u;
        if p.r >= split * (1.0 - 1e-12) {
            stats.last_decade_sup = stats.last_decade_sup.max(ratio);
        } else {
            stats.earlier_sup = stats.earlier_sup.max(ratio);
        }
    }
    stats.stable = stats.sup.is_finite()
        && stats.earlier_sup > 0.0
        && stats.last_decade_sup <= stats.earlier_sup * (1.0 + cal.harnack_stability);
    Some(stats)
}

/// `ω(r) = ω_n r^(n−2) u²` on the log grid, with its closed-form derivative
/// `ω′ = 2ω_n r^(n−2) u (u′ + m u/r)` checked against finite differences.
pub fn omega_diagnostic(sol: &RadialSolution, cal: &Calibration) -> OmegaDiagnostic {
    let n = sol.n();
    let m = n.m();
    let w = n.sphere_area();
    let idx = analysis_indices(sol);
    let mut samples: Vec<OmegaSample> = idx
        .iter()
        .map(|&i| {
            let p = sol.grid()[i];
            let rn2 = p.r.powf(n.as_f64() - 2.0);
            OmegaSample {
                r: p.r,
                omega: w * rn2 * p.u * p.u,
                r_domega: 2.0 * w * rn2 * p.u * (p.r * p.du + m * p.u),
                fd: f64::NAN,
            }
        })
        .collect();
    let ks: Vec<f64> = samples.iter().map(|s| (s.r.ln() / LOG_STEP).round()).collect();
    let uniform = !sol.log_grid().is_empty();
    let mut max_rel_err: f64 = 0.0;
    for j in 3..samples.len().saturating_sub(3) {
        if !uniform || (0..7).any(|d| ks[j - 3 + d] != ks[j] - 3.0 + d as f64) {
            continue;
        }
        let f = |d: isize| samples[(j as isize + d) as usize].omega;
        let fd = (-f(-3) + 9.0 * f(-2) - 45.0 * f(-1) + 45.0 * f(1) - 9.0 * f(2) + f(3)) / (60.0 * LOG_STEP);
        samples[j].fd = fd;
        let scale = samples[j].r_domega.abs().max(samples[j].omega);
        if scale > 0.0 {
            max_rel_err = max_rel_err.max((fd - samples[j].r_domega).abs() / scale);
        }
    }

    let mut energy_identity_gap: f64 = 0.0;
    let mut tail_energy: f64 = 0.0;
    let r_end = sol.range().1;
    let tail_start = r_end / 10f64.powf(cal.tail_decades);
    if let Ok(cyl) = cylinder_transform(sol, f64::NEG_INFINITY) {
        let offset = sol.grid().len() - cyl.grid().len();
        for &i in &idx {
            if i < offset {
                continue;
            }
            let p = sol.grid()[i];
            let q = cyl.grid()[i - offset];
            let radial = w * p.r.powf(n.as_f64()) * (p.du + m * p.u / p.r).powi(2);
            let cylinder = w * q.dv * q.dv;
            // both sides vanish at turning points of v, so measure against the terms
            let scale = w * p.r.powf(n.as_f64()) * (p.du * p.du + (m * p.u / p.r).powi(2));
            if scale > 0.0 {
                energy_identity_gap = energy_identity_gap.max((radial - cylinder).abs() / scale);
            }
            if p.r >= tail_start * (1.0 - 1e-12) {
                tail_energy = tail_energy.max(cylinder);
            }
        }
    }
    OmegaDiagnostic {
        samples,
        agrees: max_rel_err <= cal.omega_fd_tol,
        max_rel_err,
        energy_identity_gap,
        tail_energy,
    }
}

/// Least-squares fit of `a e^(−ms) + b e^(ms)` to `v(s_c + s)` on `|s| ≤ window`,
/// at a local minimum `s_c` of `v`.
pub fn fit_linearized_tail(sol: &CylinderSolution, s_center: f64, window: f64) -> Result<LinearizedFit> {
    let ss = sol.abscissae();
    let g = sol.grid();
    let right = ss.partition_point(|&s| s <= s_center);
    if right == 0 || right >= ss.len() {
        return Err(Error::NotALocalMin(s_center));
    }
    let left = if ss[right - 1] == s_center { right.checked_sub(2) } else { Some(right - 1) };
    let left = left.ok_or(Error::NotALocalMin(s_center))?;
    let (vc, _) = sol.at(s_center)?;
    if !(g[left].dv <= 0.0 && g[right].dv >= 0.0 && vc <= g[left].v && vc <= g[right].v) {
        return Err(Error::NotALocalMin(s_center));
    }
    let m = sol.n().m();
    let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let pts: Vec<(f64, f64)> = g
        .iter()
        .filter(|p| (p.s - s_center).abs() <= window)
        .map(|p| (p.s - s_center, p.v))
        .collect();
    if pts.len() < 3 {
        return Err(Error::InsufficientTail { found: pts.len(), needed: 3 });
    }
    for &(x, v) in &pts {
        let (e1, e2) = ((-m * x).exp(), (m * x).exp());
        s11 += e1 * e1;
        s12 += e1 * e2;
        s22 += e2 * e2;
        r1 += e1 * v;
        r2 += e2 * v;
    }
    let det = s11 * s22 - s12 * s12;
    let a = (r1 * s22 - r2 * s12) / det;
    let b = (s11 * r2 - s12 * r1) / det;
    let rss: f64 = pts
        .iter()
        .map(|&(x, v)| (v - a * (-m * x).exp() - b * (m * x).exp()).powi(2))
        .sum();
    Ok(LinearizedFit {
        a,
        b,
        a_scaled: a / vc,
        b_scaled: b / vc,
        residual: (rss / pts.len() as f64).sqrt() / vc,
        samples: pts.len(),
    })
}

/// Sign changes of `v′`, refined by bisection on the interpolant. Samples with
/// `|v′| ≤ flat_threshold·max|v|` are treated as flat and skipped.
pub fn local_extrema_scan(sol: &CylinderSolution, cal: &Calibration) -> Result<Vec<Extremum>> {
    let g = sol.grid();
    let n = sol.n();
    let m = n.m();
    let vmax = g.iter().fold(0.0f64, |a, p| a.max(p.v.abs()));
    let tau = cal.flat_threshold * vmax;
    let significant: Vec<usize> = (0..g.len()).filter(|&i| g[i].dv.abs() > tau).collect();
    let mut out = Vec::new();
    for pair in significant.windows(2) {
        let (i, j) = (pair[0], pair[1]);
        if g[i].dv.signum() == g[j].dv.signum() {
            continue;
        }
        let kind = if g[i].dv > 0.0 { ExtremumKind::Max } else { ExtremumKind::Min };
        let (mut lo, mut hi) = (g[i].s, g[j].s);
        let sign_lo = g[i].dv.signum();
        while hi - lo > 1e-13 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if sol.at(mid)?.1.signum() == sign_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let (v, _) = sol.at(s)?;
        let (lower_bound, meets_bound) = if kind == ExtremumKind::Max {
            let (k, _) = sol.profile().eval_log(s)?;
            let bound = (m * m / k).powf((n.as_f64() - 2.0) / 4.0);
            (Some(bound), Some(v >= bound * (1.0 - 1e-9)))
        } else {
            (None, None)
        };
        out.push(Extremum { s, kind, v, lower_bound, meets_bound });
    }
    Ok(out)
}

impl AsymptoticsReport {
    pub fn compute(sol: &RadialSolution, cal: &Calibration) -> Result<Self> {
        let (decay, insufficient_tail) = match fit_decay_exponent(sol, cal.tail_decades, cal) {
            Ok(fit) => (fit, false),
            Err(Error::InsufficientTail { found, .. }) => {
                let (_, window) = tail_indices(sol, cal.tail_decades);
                (
                    DecayFit {
                        kappa: None,
                        ci95: None,
                        class: DecayClass::Undetermined,
                        method: FitMethod::AllSamples,
                        rms: f64::NAN,
                        decade_kappas: Vec::new(),
                        stable: false,
                        window,
                        samples: found,
                    },
                    true,
                )
            }
            Err(e) => return Err(e),
        };
        let (length_curve, length, completeness) = completeness_length(sol, cal)?;
        let (volume_curve, volume, volume_growth) = total_volume(sol, cal)?;
        let (completeness, volume_growth) = if insufficient_tail {
            (Completeness::Undetermined, VolumeGrowth::Undetermined)
        } else {
            (completeness, volume_growth)
        };
        let c0 = if decay.class == DecayClass::Fast {
            let r0 = decay.window.0;
            Some(c0_limit(sol, r0, cal)?)
        } else {
            None
        };
        let bounds = if decay.class == DecayClass::Fast { fast_decay_bounds(sol, cal) } else { None };
        Ok(AsymptoticsReport {
            n: sol.n(),
            status: sol.status(),
            decay,
            insufficient_tail,
            completeness,
            length,
            volume_growth,
            volume,
            c0,
            bounds,
            harnack: if insufficient_tail { None } else { harnack_gradient_ratio(sol, cal) },
            omega: omega_diagnostic(sol, cal),
            length_curve,
            volume_curve,
            calibration: cal.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::CurvatureProfile;
    use crate::solver::{CylinderSample, RadialSample, Tolerances};
    use approx::assert_relative_eq;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    /// `u = c r^{−κ}` on the forced log grid over `[1e-2, 1e6]`.
    fn power_law(n: u32, kappa: f64, c: f64) -> RadialSolution {
        let grid: Vec<RadialSample> = (-128..=384)
            .map(|k| {
                let r = (k as f64 * LOG_STEP).exp();
                RadialSample { r, u: c * r.powf(-kappa), du: -kappa * c * r.powf(-kappa - 1.0) }
            })
            .collect();
        let idx = (0..grid.len()).collect();
        RadialSolution::from_parts(
            dim(n),
            CurvatureProfile::constant(1.0).unwrap(),
            grid,
            Status::ReachedRmax,
            Tolerances::default(),
            idx,
            false,
        )
        .unwrap()
    }

    #[test]
    fn synthetic_power_laws() {
        let cal = Calibration::default();
        let slow = power_law(4, 1.0, 1.0);
        let fit = fit_decay_exponent(&slow, 2.0, &cal).unwrap();
        assert_relative_eq!(fit.kappa.unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(fit.class, DecayClass::Slow);
        let fast = power_law(5, 3.0, 2.0);
        assert_eq!(fit_decay_exponent(&fast, 2.0, &cal).unwrap().class, DecayClass::Fast);
        let neither = power_law(5, 2.2, 2.0);
        assert_eq!(fit_decay_exponent(&neither, 2.0, &cal).unwrap().class, DecayClass::Undetermined);
    }

    #[test]
    fn harnack_ratio_of_power_law() {
        let cal = Calibration::default();
        let h = harnack_gradient_ratio(&power_law(4, 1.7, 1.0), &cal).unwrap();
        assert_relative_eq!(h.sup, 1.7, epsilon = 1e-12);
        assert!(h.stable);
    }

    #[test]
    fn slow_length_is_log() {
        // u^{2/(n−2)} = r^{−1} for u = r^{−m}, so L(R) = ln R
        let cal = Calibration::default();
        for n in [3, 4, 6] {
            let sol = power_law(n, dim(n).m(), 1.0);
            let (points, fit, class) = completeness_length(&sol, &cal).unwrap();
            assert_eq!(class, Completeness::Complete);
            assert_relative_eq!(fit.unwrap().slope, 1.0, epsilon = 1e-6);
            let last = points.last().unwrap();
            assert_relative_eq!(last.value, last.r.ln(), max_relative = 1e-6);
        }
    }

    #[test]
    fn omega_constant_for_slow_power() {
        let cal = Calibration::default();
        let sol = power_law(4, 1.0, 1.0);
        let om = omega_diagnostic(&sol, &cal);
        for s in &om.samples {
            assert_relative_eq!(s.omega, dim(4).sphere_area(), max_relative = 1e-12);
            assert!(s.r_domega.abs() < 1e-12);
        }
        assert!(om.agrees);
    }

    #[test]
    fn crossed_status_short_circuits() {
        let mut sol = power_law(4, 1.0, 1.0);
        sol = RadialSolution::from_parts(
            sol.n(),
            sol.profile().clone(),
            sol.grid().to_vec(),
            Status::CrossedZero(3.0),
            sol.tolerances(),
            sol.log_grid().to_vec(),
            false,
        )
        .unwrap();
        let fit = fit_decay_exponent(&sol, 2.0, &Calibration::default()).unwrap();
        assert_eq!(fit.class, DecayClass::Crossed);
        assert!(fit.kappa.is_none());
    }

    #[test]
    fn short_tail_is_reported() {
        let grid: Vec<RadialSample> = (0..10)
            .map(|k| {
                let r = 1.0 + k as f64;
                RadialSample { r, u: 1.0 / r, du: -1.0 / (r * r) }
            })
            .collect();
        let sol = RadialSolution::from_parts(
            dim(4),
            CurvatureProfile::constant(1.0).unwrap(),
            grid,
            Status::ReachedRmax,
            Tolerances::default(),
            vec![],
            false,
        )
        .unwrap();
        assert!(matches!(
            fit_decay_exponent(&sol, 2.0, &Calibration::default()),
            Err(Error::InsufficientTail { .. })
        ));
    }

    fn synthetic_cylinder(a: f64, b: f64, m: f64) -> CylinderSolution {
        let grid = (-200..=200)
            .map(|k| {
                let s = k as f64 * 0.01;
                CylinderSample { s, v: a * (-m * s).exp() + b * (m * s).exp(), dv: m * (b * (m * s).exp() - a * (-m * s).exp()) }
            })
            .collect();
        CylinderSolution::from_parts(
            dim(4),
            CurvatureProfile::constant(1.0).unwrap(),
            grid,
            Status::ReachedRmax,
            Tolerances::default(),
            vec![],
            false,
        )
        .unwrap()
    }

    #[test]
    fn linearized_fit_recovers_own_model() {
        let sol = synthetic_cylinder(1.0, 1.0, 1.0);
        let fit = fit_linearized_tail(&sol, 0.0, 1.5).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-10 && (fit.b - 1.0).abs() < 1e-10);
        assert_relative_eq!(fit.a_scaled, 0.5, epsilon = 1e-10);
        assert!(matches!(fit_linearized_tail(&sol, 1.0, 0.5), Err(Error::NotALocalMin(_))));
    }
}
