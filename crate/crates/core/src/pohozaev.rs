//! Pohozaev functional of a radial solution.
//!
//! Surface form on the sphere of radius `r`:
//!
//! ```text
//! P(u, r) = ω_n r^(n−1) [ (r/2) u′² + c r K u^q + m u u′ ],   c = (n−2)/(2n)
//! ```
//!
//! Volume form: `c ω_n ∫₀^r t^n K′(t) u^q dt`. The two agree for solutions
//! regular at the origin, and in cylinder variables the surface form is
//! `ω_n [½v′² − ½m²v² + c K v^q]`.

use serde::{Deserialize, Serialize};

use crate::calibration::Calibration;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::solver::{bracket, CylinderSolution, RadialSolution};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevSample {
    pub r: f64,
    pub surface: f64,
    pub volume: f64,
    /// `surface − volume − P₀`.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitStatus {
    Converged,
    Oscillating,
    Diverging,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevLimit {
    pub estimate: f64,
    pub uncertainty: f64,
    pub status: LimitStatus,
    pub tail_samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PohozaevReport {
    pub samples: Vec<PohozaevSample>,
    /// Radius at which the integration constant `P₀` is read off.
    pub anchor_r: f64,
    pub p0: f64,
    pub max_residual: f64,
    pub identity_tol: f64,
    /// Whether `max_residual < identity_tol·(1 + |P₀|)`.
    pub identity_holds: bool,
    pub limit: PohozaevLimit,
}

/// The surface-form formula at a single point.
pub fn surface_density(n: Dimension, k: f64, r: f64, u: f64, du: f64) -> f64 {
    let m = n.m();
    let c = n.pohozaev_coefficient();
    n.sphere_area() * r.powf(n.as_f64() - 1.0) * (0.5 * r * du * du + c * r * k * n.volume_power(u) + m * u * du)
}

/// `P(u, r)` in surface form, interpolating `(u, u′)` at `r`.
pub fn surface_form(sol: &RadialSolution, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::OutOfRange { value: r, lo: sol.range().0, hi: sol.range().1 });
    }
    let (u, du) = sol.at(r)?;
    let (k, _) = sol.profile().eval(r)?;
    Ok(surface_density(sol.n(), k, r, u, du))
}

fn volume_integrand(sol: &RadialSolution) -> impl Fn(f64, f64, f64) -> Result<f64> + '_ {
    let n = sol.n();
    move |t, u, _| {
        let (_, dk) = sol.profile().eval(t)?;
        Ok(if dk == 0.0 { 0.0 } else { t.powf(n.as_f64()) * dk * n.volume_power(u) })
    }
}

/// `c ω_n ∫ t^n K′ u^q dt` at every grid sample, from the first sample.
pub fn volume_form_cumulative(sol: &RadialSolution) -> Result<Vec<f64>> {
    let n = sol.n();
    let scale = n.pohozaev_coefficient() * n.sphere_area();
    Ok(sol.cumulative_integral(volume_integrand(sol))?.into_iter().map(|x| scale * x).collect())
}

/// Volume form from the first grid sample (the origin for solver output) to `r`.
pub fn volume_form(sol: &RadialSolution, r: f64) -> Result<f64> {
    let (lo, hi) = sol.range();
    let i = bracket(sol.radii(), r).ok_or(Error::OutOfRange { value: r, lo, hi })?;
    let cum = volume_form_cumulative(sol)?;
    let n = sol.n();
    let scale = n.pohozaev_coefficient() * n.sphere_area();
    let ri = sol.radii()[i];
    let f = volume_integrand(sol);
    let mut failure = None;
    let part = crate::quadrature::integrate(
        |t| {
            let (u, du) = sol.at(t).unwrap_or((0.0, 0.0));
            f(t, u, du).unwrap_or_else(|e| {
                failure.get_or_insert(e);
                0.0
            })
        },
        ri,
        r,
        sol.tolerances().quadrature_tol(),
        0.0,
        20,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(cum[i] + scale * part.value)
}

/// Cylinder form `ω_n [½v′² − ½m²v² + c K(eˢ) v^q]` at `s`.
pub fn cylinder_form(sol: &CylinderSolution, s: f64) -> Result<f64> {
    let (v, dv) = sol.at(s)?;
    let (k, _) = sol.profile().eval_log(s)?;
    Ok(cylinder_density(sol.n(), k, v, dv))
}

pub fn cylinder_density(n: Dimension, k: f64, v: f64, dv: f64) -> f64 {
    let m = n.m();
    n.sphere_area() * (0.5 * dv * dv - 0.5 * m * m * v * v + n.pohozaev_coefficient() * k * n.volume_power(v))
}

fn sample_indices(sol: &RadialSolution) -> Vec<usize> {
    if sol.log_grid().is_empty() {
        (0..sol.grid().len()).filter(|&i| sol.grid()[i].r > 0.0).collect()
    } else {
        sol.log_grid().to_vec()
    }
}

/// Largest `|surface − volume − P₀|` over the log grid, with `P₀` read at the
/// first log-grid radius at least ten times the first positive radius.
pub fn identity_check(sol: &RadialSolution) -> Result<f64> {
    Ok(PohozaevReport::compute(sol, &Calibration::default())?.max_residual)
}

impl PohozaevReport {
    pub fn compute(sol: &RadialSolution, cal: &Calibration) -> Result<Self> {
        let idx = sample_indices(sol);
        if idx.is_empty() {
            return Err(Error::EmptyRange);
        }
        let volume = volume_form_cumulative(sol)?;
        let first_positive = sol.grid().iter().find(|p| p.r > 0.0).map(|p| p.r).ok_or(Error::EmptyRange)?;
        let anchor = idx
            .iter()
            .copied()
            .find(|&i| sol.grid()[i].r >= 10.0 * first_positive)
            .unwrap_or(idx[0]);
        let n = sol.n();
        let surface_at = |i: usize| -> Result<f64> {
            let p = sol.grid()[i];
            let (k, _) = sol.profile().eval(p.r)?;
            Ok(surface_density(n, k, p.r, p.u, p.du))
        };
        let p0 = surface_at(anchor)? - volume[anchor];
        let mut samples = Vec::with_capacity(idx.len());
        for &i in &idx {
            let surface = surface_at(i)?;
            samples.push(PohozaevSample {
                r: sol.grid()[i].r,
                surface,
                volume: volume[i],
                residual: surface - volume[i] - p0,
            });
        }
        let identity_tol = cal.identity_tol(sol.tolerances().rel_tol);
        let max_residual = samples.iter().map(|s| s.residual.abs()).fold(0.0, f64::max);
        let identity_holds = max_residual < identity_tol * (1.0 + p0.abs());
        let limit = pohozaev_limit(&samples, max_residual, cal);
        Ok(PohozaevReport {
            samples,
            anchor_r: sol.grid()[anchor].r,
            p0,
            max_residual,
            identity_tol,
            identity_holds,
            limit,
        })
    }
}

/// Extrapolates `P(u) = lim P(u, r)` from the last `tail_decades` decades of samples.
pub fn pohozaev_limit(samples: &[PohozaevSample], identity_residual: f64, cal: &Calibration) -> PohozaevLimit {
    let r_end = samples.last().map_or(0.0, |s| s.r);
    let start = r_end / 10f64.powf(cal.tail_decades);
    let tail: Vec<&PohozaevSample> = samples.iter().filter(|s| s.r >= start * (1.0 - 1e-12)).collect();
    let count = tail.len();
    if count < cal.min_limit_samples.max(2) {
        return PohozaevLimit { estimate: f64::NAN, uncertainty: f64::NAN, status: LimitStatus::Undetermined, tail_samples: count };
    }
    let values: Vec<f64> = tail.iter().map(|s| s.surface).collect();
    let mean = values.iter().sum::<f64>() / count as f64;
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let half_range = 0.5 * (hi - lo);
    let steps: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let variation: f64 = steps.iter().map(|d| d.abs()).sum();
    let threshold = cal.limit_variation * (1.0 + mean.abs());

    let status = if variation < threshold {
        LimitStatus::Converged
    } else {
        let signs: Vec<f64> = steps.iter().filter(|d| d.abs() > 1e-3 * threshold / count as f64).map(|d| d.signum()).collect();
        let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
        let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
        let growing = abs.windows(2).all(|w| w[1] >= w[0]);
        let log_slope = if abs.iter().all(|&a| a > 0.0) {
            let xs: Vec<f64> = tail.iter().map(|s| s.r.ln()).collect();
            let ys: Vec<f64> = abs.iter().map(|a| a.ln()).collect();
            slope(&xs, &ys)
        } else {
            0.0
        };
        if growing && log_slope > cal.limit_log_slope {
            LimitStatus::Diverging
        } else if changes >= 2 {
            LimitStatus::Oscillating
        } else {
            LimitStatus::Undetermined
        }
    };
    PohozaevLimit {
        estimate: mean,
        uncertainty: half_range.max(identity_residual),
        status,
        tail_samples: count,
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
