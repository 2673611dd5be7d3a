//! Integration of the radial equation `u″ + (n−1)u′/r + K(r) u^p = 0` and of its
//! cylinder form `v″ = m²v − K(eˢ) v^p`, `v(s) = e^(ms) u(eˢ)`.
//!
//! Both are advanced in the cylinder variables, where the equation has no
//! singular coefficient and the slow-decay regime is bounded. Every accepted
//! step is stored, and steps are clipped so the grid contains the points
//! `r = 10^(k/64)` (`s = k ln10/64`) exactly; those indices are listed in
//! `log_grid`.

mod interp;
mod march;
mod shooting;

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::curvature::CurvatureProfile;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, kronrod15};

pub use interp::{bracket, cubic, quintic};
pub use march::{LOG_STEP, OVERFLOW};
pub use shooting::{shoot, ShootingResult};

use march::{march, Rhs, Stop};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub rel_tol: f64,
    /// Absolute error floor, measured relative to the magnitude of the state `(v, v′)`.
    pub abs_tol: f64,
    /// Project onto the cylinder first integral on steps where `K` is exactly constant.
    pub conserve_first_integral: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { rel_tol: 1e-10, abs_tol: 1e-12, conserve_first_integral: true }
    }
}

impl Tolerances {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Tolerances { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, t) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
            if !(t > 1e-14 && t < 1e-2) {
                return Err(Error::InvalidArgument(format!("{name} must lie in (1e-14, 1e-2), got {t}")));
            }
        }
        Ok(())
    }

    /// Tolerance used for quadratures over the solution interpolant.
    pub fn quadrature_tol(&self) -> f64 {
        (0.01 * self.rel_tol).max(1e-14)
    }
}

/// Why an integration stopped. The payload is the coordinate of the event in
/// the solution's own variable (`r` for radial, `s` for cylinder solutions).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "at", rename_all = "snake_case")]
pub enum Status {
    ReachedRmax,
    CrossedZero(f64),
    Overflow(f64),
    StepUnderflow(f64),
}

impl Status {
    fn map(self, f: impl Fn(f64) -> f64) -> Status {
        match self {
            Status::ReachedRmax => Status::ReachedRmax,
            Status::CrossedZero(x) => Status::CrossedZero(f(x)),
            Status::Overflow(x) => Status::Overflow(f(x)),
            Status::StepUnderflow(x) => Status::StepUnderflow(f(x)),
        }
    }

    pub fn is_complete(&self) -> bool {
        matches!(self, Status::ReachedRmax)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialSample {
    pub r: f64,
    pub u: f64,
    pub du: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderSample {
    pub s: f64,
    pub v: f64,
    pub dv: f64,
}

/// Trajectory `(r, u, u′)` of the radial equation starting at `r = 0`
/// (or, for transformed and synthetic grids, at the first sample).
#[derive(Clone, Debug)]
pub struct RadialSolution {
    n: Dimension,
    profile: CurvatureProfile,
    grid: Vec<RadialSample>,
    status: Status,
    tolerances: Tolerances,
    log_grid: Vec<usize>,
    satisfies_equation: bool,
    rs: Vec<f64>,
    // (v, v′, v″) in s at each sample with r > 0
    jets: Vec<[f64; 3]>,
    ddu: Vec<f64>,
}

/// Trajectory `(s, v, v′)` of the cylinder equation.
#[derive(Clone, Debug)]
pub struct CylinderSolution {
    n: Dimension,
    profile: CurvatureProfile,
    grid: Vec<CylinderSample>,
    status: Status,
    tolerances: Tolerances,
    log_grid: Vec<usize>,
    satisfies_equation: bool,
    ss: Vec<f64>,
    accel: Vec<f64>,
}

fn check_grid(xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::EmptyRange);
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

fn check_log_grid(idx: &[usize], len: usize) -> Result<()> {
    if idx.windows(2).any(|w| w[1] <= w[0]) || idx.last().is_some_and(|&i| i >= len) {
        return Err(Error::InvalidArgument("log-grid indices must be increasing and within the grid".into()));
    }
    Ok(())
}

impl RadialSolution {
    /// Assembles a solution from raw samples. With `satisfies_equation` the
    /// samples are taken to solve the ODE for `profile`, and interpolation
    /// uses second derivatives from the equation; otherwise cubic Hermite.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n: Dimension,
        profile: CurvatureProfile,
        grid: Vec<RadialSample>,
        status: Status,
        tolerances: Tolerances,
        log_grid: Vec<usize>,
        satisfies_equation: bool,
    ) -> Result<Self> {
        let rs: Vec<f64> = grid.iter().map(|p| p.r).collect();
        check_grid(&rs)?;
        check_log_grid(&log_grid, grid.len())?;
        if rs[0] < 0.0 {
            return Err(Error::InvalidArgument("radii must be non-negative".into()));
        }
        let m = n.m();
        let mut jets = Vec::with_capacity(grid.len());
        let mut ddus = Vec::with_capacity(grid.len());
        for p in &grid {
            if !satisfies_equation {
                jets.push([f64::NAN; 3]);
                ddus.push(f64::NAN);
                continue;
            }
            let (k, _) = profile.eval(p.r)?;
            if p.r == 0.0 {
                jets.push([f64::NAN; 3]);
                ddus.push(-k * n.nonlinearity(p.u) / n.as_f64());
                continue;
            }
            let ddu = -(n.as_f64() - 1.0) * p.du / p.r - k * n.nonlinearity(p.u);
            let rm = p.r.powf(m);
            jets.push([
                rm * p.u,
                rm * (m * p.u + p.r * p.du),
                rm * (m * m * p.u + (2.0 * m + 1.0) * p.r * p.du + p.r * p.r * ddu),
            ]);
            ddus.push(ddu);
        }
        Ok(RadialSolution { n, profile, grid, status, tolerances, log_grid, satisfies_equation, rs, jets, ddu: ddus })
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn grid(&self) -> &[RadialSample] {
        &self.grid
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    /// Indices of the samples on the forced log grid.
    pub fn log_grid(&self) -> &[usize] {
        &self.log_grid
    }

    pub fn satisfies_equation(&self) -> bool {
        self.satisfies_equation
    }

    pub fn radii(&self) -> &[f64] {
        &self.rs
    }

    pub fn range(&self) -> (f64, f64) {
        (self.rs[0], self.rs[self.rs.len() - 1])
    }

    /// `u″` at sample `i` from the equation (NaN for synthetic grids).
    pub fn second_derivative(&self, i: usize) -> f64 {
        self.ddu[i]
    }

    fn eval_in(&self, i: usize, r: f64) -> (f64, f64) {
        let (a, b) = (&self.grid[i], &self.grid[i + 1]);
        if !self.satisfies_equation {
            let (u, du) = cubic(a.r, b.r, [a.u, a.du], [b.u, b.du], r);
            return (u, du);
        }
        if a.r == 0.0 {
            return quintic(0.0, b.r, [a.u, a.du, self.ddu[i]], [b.u, b.du, self.ddu[i + 1]], r);
        }
        let m = self.n.m();
        let s = r.ln();
        let (v, dv) = quintic(a.r.ln(), b.r.ln(), self.jets[i], self.jets[i + 1], s);
        let rm = r.powf(-m);
        (v * rm, (dv - m * v) * rm / r)
    }

    /// Interpolated `(u, u′)` at `r`.
    pub fn at(&self, r: f64) -> Result<(f64, f64)> {
        if self.rs.len() == 1 && r == self.rs[0] {
            return Ok((self.grid[0].u, self.grid[0].du));
        }
        let (lo, hi) = self.range();
        let i = bracket(&self.rs, r).ok_or(Error::OutOfRange { value: r, lo, hi })?;
        Ok(self.eval_in(i, r))
    }

    /// `∫_{r₀}^{r_i} density(r, u, u′) dr` at every sample `i`, integrating the
    /// interpolant interval by interval.
    pub fn cumulative_integral<F>(&self, density: F) -> Result<Vec<f64>>
    where
        F: Fn(f64, f64, f64) -> Result<f64>,
    {
        cumulative(&self.rs, |i, r| self.eval_in(i, r), density, self.tolerances.quadrature_tol())
    }

    /// `∫_a^{r_i} density(r, u, u′) dr` at every sample `i` (negative below `a`).
    pub fn integral_from<F>(&self, a: f64, density: F) -> Result<Vec<f64>>
    where
        F: Fn(f64, f64, f64) -> Result<f64>,
    {
        let (lo, hi) = self.range();
        let i = bracket(&self.rs, a).ok_or(Error::OutOfRange { value: a, lo, hi })?;
        let cum = self.cumulative_integral(&density)?;
        let mut failure = None;
        let part = integrate(
            |r| {
                let (u, du) = self.eval_in(i, r);
                density(r, u, du).unwrap_or_else(|e| {
                    failure.get_or_insert(e);
                    0.0
                })
            },
            self.rs[i],
            a,
            self.tolerances.quadrature_tol(),
            0.0,
            20,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        let offset = cum[i] + part.value;
        Ok(cum.into_iter().map(|c| c - offset).collect())
    }

    /// Integrated defect of the equation on each grid interval: the change of
    /// `v′` across the interval minus the integral of `m²v − K v^p` over the
    /// interpolant, relative to the integral of the magnitudes of both terms.
    pub fn interval_defects(&self) -> Result<Vec<f64>> {
        require_equation(self.satisfies_equation)?;
        let start = usize::from(self.rs[0] == 0.0);
        let ss: Vec<f64> = self.rs[start..].iter().map(|r| r.ln()).collect();
        defects(self.n, &self.profile, &ss, |i, s| {
            let j = i + start;
            let (v, dv) = quintic(ss[i], ss[i + 1], self.jets[j], self.jets[j + 1], s);
            (v, dv)
        }, |i| (self.jets[i + start][1], self.jets[i + start + 1][1]))
    }
}

impl CylinderSolution {
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        n: Dimension,
        profile: CurvatureProfile,
        grid: Vec<CylinderSample>,
        status: Status,
        tolerances: Tolerances,
        log_grid: Vec<usize>,
        satisfies_equation: bool,
    ) -> Result<Self> {
        let ss: Vec<f64> = grid.iter().map(|p| p.s).collect();
        check_grid(&ss)?;
        check_log_grid(&log_grid, grid.len())?;
        let accel = if satisfies_equation {
            let rhs = Rhs { n, profile: &profile };
            grid.iter().map(|p| rhs.accel(p.s, p.v)).collect::<Result<Vec<_>>>()?
        } else {
            vec![f64::NAN; grid.len()]
        };
        Ok(CylinderSolution { n, profile, grid, status, tolerances, log_grid, satisfies_equation, ss, accel })
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn grid(&self) -> &[CylinderSample] {
        &self.grid
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn log_grid(&self) -> &[usize] {
        &self.log_grid
    }

    pub fn satisfies_equation(&self) -> bool {
        self.satisfies_equation
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.ss
    }

    pub fn range(&self) -> (f64, f64) {
        (self.ss[0], self.ss[self.ss.len() - 1])
    }

    /// `v″` at sample `i` from the equation (NaN for synthetic grids).
    pub fn second_derivative(&self, i: usize) -> f64 {
        self.accel[i]
    }

    fn eval_in(&self, i: usize, s: f64) -> (f64, f64) {
        let (a, b) = (&self.grid[i], &self.grid[i + 1]);
        if self.satisfies_equation {
            quintic(a.s, b.s, [a.v, a.dv, self.accel[i]], [b.v, b.dv, self.accel[i + 1]], s)
        } else {
            cubic(a.s, b.s, [a.v, a.dv], [b.v, b.dv], s)
        }
    }

    /// Interpolated `(v, v′)` at `s`.
    pub fn at(&self, s: f64) -> Result<(f64, f64)> {
        if self.ss.len() == 1 && s == self.ss[0] {
            return Ok((self.grid[0].v, self.grid[0].dv));
        }
        let (lo, hi) = self.range();
        let i = bracket(&self.ss, s).ok_or(Error::OutOfRange { value: s, lo, hi })?;
        Ok(self.eval_in(i, s))
    }

    /// `∫_{s₀}^{s_i} density(s, v, v′) ds` at every sample `i`.
    pub fn cumulative_integral<F>(&self, density: F) -> Result<Vec<f64>>
    where
        F: Fn(f64, f64, f64) -> Result<f64>,
    {
        cumulative(&self.ss, |i, s| self.eval_in(i, s), density, self.tolerances.quadrature_tol())
    }

    /// See [`RadialSolution::interval_defects`].
    pub fn interval_defects(&self) -> Result<Vec<f64>> {
        require_equation(self.satisfies_equation)?;
        defects(self.n, &self.profile, &self.ss, |i, s| self.eval_in(i, s), |i| {
            (self.grid[i].dv, self.grid[i + 1].dv)
        })
    }

    /// First integral `½v′² − ½m²v² + ((n−2)/(2n)) K(eˢ) v^q` at sample `i`.
    pub fn hamiltonian(&self, i: usize) -> Result<f64> {
        let p = self.grid[i];
        let m = self.n.m();
        let (k, _) = self.profile.eval_log(p.s)?;
        Ok(0.5 * p.dv * p.dv - 0.5 * m * m * p.v * p.v + self.n.pohozaev_coefficient() * k * self.n.volume_power(p.v))
    }
}

fn cumulative<E, F>(xs: &[f64], eval: E, density: F, tol: f64) -> Result<Vec<f64>>
where
    E: Fn(usize, f64) -> (f64, f64),
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let failure = RefCell::new(None);
    let f = |i: usize, x: f64| {
        let (y, dy) = eval(i, x);
        match density(x, y, dy) {
            Ok(val) => val,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let intervals = xs.len().saturating_sub(1);
    let mut first = Vec::with_capacity(intervals);
    for i in 0..intervals {
        first.push(kronrod15(&mut |x| f(i, x), xs[i], xs[i + 1]));
    }
    let total: f64 = first.iter().map(|(v, _)| v.abs()).sum();
    let floor = tol * total / intervals.max(1) as f64;
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for (i, &(v, e)) in first.iter().enumerate() {
        let piece = if e <= (tol * v.abs()).max(floor) {
            v
        } else {
            integrate(|x| f(i, x), xs[i], xs[i + 1], tol, floor, 12).value
        };
        acc += piece;
        out.push(acc);
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(out)
}

fn defects<E, D>(n: Dimension, profile: &CurvatureProfile, ss: &[f64], eval: E, ends: D) -> Result<Vec<f64>>
where
    E: Fn(usize, f64) -> (f64, f64),
    D: Fn(usize) -> (f64, f64),
{
    let m = n.m();
    let mut out = Vec::with_capacity(ss.len().saturating_sub(1));
    for i in 0..ss.len().saturating_sub(1) {
        let mut failure = None;
        let mut term = |s: f64, signed: bool| {
            let (v, _) = eval(i, s);
            let k = match profile.eval_log(s) {
                Ok((k, _)) => k,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            let (lin, nl) = (m * m * v, k * n.nonlinearity(v));
            if signed {
                lin - nl
            } else {
                lin.abs() + nl.abs()
            }
        };
        let (forcing, _) = kronrod15(&mut |s| term(s, true), ss[i], ss[i + 1]);
        let (scale, _) = kronrod15(&mut |s| term(s, false), ss[i], ss[i + 1]);
        if let Some(e) = failure {
            return Err(e);
        }
        let (w0, w1) = ends(i);
        out.push(if scale > 0.0 { ((w1 - w0) - forcing).abs() / scale } else { 0.0 });
    }
    Ok(out)
}

fn require_equation(flag: bool) -> Result<()> {
    if flag {
        Ok(())
    } else {
        Err(Error::InvalidArgument("defects are defined only for solver-produced grids".into()))
    }
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} must be positive, got {x}")))
    }
}

fn map_stop(stop: Stop, to_coordinate: impl Fn(f64) -> f64) -> Status {
    match stop {
        Stop::Reached => Status::ReachedRmax,
        Stop::Crossed(s) => Status::CrossedZero(to_coordinate(s)),
        Stop::Overflow(s) => Status::Overflow(to_coordinate(s)),
        Stop::Underflow(s) => Status::StepUnderflow(to_coordinate(s)),
    }
}

/// Integrates the radial equation from `u(0) = u0`, `u′(0) = 0` to `r_max`.
///
/// The first point `h₀ = min(1e−4, 1e−6·r_max)` comes from the Taylor series
/// at the origin; from there the cylinder equation is marched in `s = ln r`.
pub fn integrate_radial(
    n: Dimension,
    profile: &CurvatureProfile,
    u0: f64,
    r_max: f64,
    tol: Tolerances,
) -> Result<RadialSolution> {
    check_positive("u0", u0)?;
    if !(r_max >= 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("r_max must be non-negative, got {r_max}")));
    }
    tol.validate()?;
    let origin = RadialSample { r: 0.0, u: u0, du: 0.0 };
    if r_max == 0.0 {
        return RadialSolution::from_parts(n, profile.clone(), vec![origin], Status::ReachedRmax, tol, vec![], true);
    }

    let h0 = 1e-4f64.min(1e-6 * r_max);
    let (k0, dk0) = profile.eval(0.0)?;
    let f0 = n.nonlinearity(u0);
    let a = -k0 * f0 / (2.0 * n.as_f64());
    let b = -dk0 * f0 / (3.0 * (n.as_f64() + 1.0));
    let u1 = u0 + a * h0 * h0 + b * h0 * h0 * h0;
    let du1 = 2.0 * a * h0 + 3.0 * b * h0 * h0;

    let m = n.m();
    let s0 = h0.ln();
    let rm = h0.powf(m);
    let y0 = [rm * u1, rm * (m * u1 + h0 * du1)];
    let rhs = Rhs { n, profile };
    let overflow = |s: f64, v: f64| v * (-m * s).exp() > OVERFLOW;
    let track = march(&rhs, &tol, &overflow, s0, y0, r_max.ln())?;

    let mut grid = Vec::with_capacity(track.s.len() + 1);
    grid.push(origin);
    let last = track.s.len() - 1;
    for (j, ((&s, &v), &w)) in track.s.iter().zip(&track.v).zip(&track.w).enumerate() {
        let r = if j == 0 {
            h0
        } else if j == last && track.stop == Stop::Reached {
            r_max
        } else {
            s.exp()
        };
        let rm = r.powf(-m);
        let (u, du) = if j == 0 { (u1, du1) } else { (v * rm, (w - m * v) * rm / r) };
        grid.push(RadialSample { r, u, du });
    }
    let log_grid = track.forced.iter().map(|i| i + 1).collect();
    let status = map_stop(track.stop, f64::exp);
    RadialSolution::from_parts(n, profile.clone(), grid, status, tol, log_grid, true)
}

/// Integrates `v″ = m²v − K(eˢ)v^p` from `(s0, v0, v0′)` to `s_max`.
#[allow(clippy::too_many_arguments)]
pub fn integrate_cylinder(
    n: Dimension,
    profile: &CurvatureProfile,
    s0: f64,
    v0: f64,
    dv0: f64,
    s_max: f64,
    tol: Tolerances,
) -> Result<CylinderSolution> {
    check_positive("v0", v0)?;
    if !(s0.is_finite() && dv0.is_finite() && s_max.is_finite() && s_max >= s0) {
        return Err(Error::InvalidArgument(format!("need finite s0 ≤ s_max, got [{s0}, {s_max}]")));
    }
    tol.validate()?;
    let rhs = Rhs { n, profile };
    let overflow = |_: f64, v: f64| v > OVERFLOW;
    let track = march(&rhs, &tol, &overflow, s0, [v0, dv0], s_max)?;
    let last = track.s.len() - 1;
    let grid = (0..track.s.len())
        .map(|j| CylinderSample {
            s: if j == last && track.stop == Stop::Reached && last > 0 { s_max } else { track.s[j] },
            v: track.v[j],
            dv: track.w[j],
        })
        .collect();
    let status = map_stop(track.stop, |s| s);
    CylinderSolution::from_parts(n, profile.clone(), grid, status, tol, track.forced, true)
}

/// `v(s) = e^(ms) u(eˢ)`, `v′(s) = e^(ms)(m u + r u′)` at every sample with
/// `r ≥ e^(s_min)`. Samples map one to one, without resampling.
pub fn cylinder_transform(sol: &RadialSolution, s_min: f64) -> Result<CylinderSolution> {
    let m = sol.n.m();
    let r_min = s_min.exp();
    let first = sol.grid.iter().position(|p| p.r > 0.0 && p.r >= r_min).ok_or(Error::EmptyRange)?;
    let grid = sol.grid[first..]
        .iter()
        .map(|p| {
            let rm = p.r.powf(m);
            CylinderSample { s: p.r.ln(), v: rm * p.u, dv: rm * (m * p.u + p.r * p.du) }
        })
        .collect();
    let log_grid = sol.log_grid.iter().filter(|&&i| i >= first).map(|i| i - first).collect();
    CylinderSolution::from_parts(
        sol.n,
        sol.profile.clone(),
        grid,
        sol.status.map(f64::ln),
        sol.tolerances,
        log_grid,
        sol.satisfies_equation,
    )
}

/// Inverse of [`cylinder_transform`]: `u = r^(−m) v`, `u′ = r^(−m−1)(v′ − m v)`.
pub fn inverse_transform(sol: &CylinderSolution) -> Result<RadialSolution> {
    let m = sol.n.m();
    let grid = sol
        .grid
        .iter()
        .map(|p| {
            let r = p.s.exp();
            let rm = (-m * p.s).exp();
            RadialSample { r, u: rm * p.v, du: rm * (p.dv - m * p.v) / r }
        })
        .collect();
    RadialSolution::from_parts(
        sol.n,
        sol.profile.clone(),
        grid,
        sol.status.map(f64::exp),
        sol.tolerances,
        sol.log_grid.clone(),
        sol.satisfies_equation,
    )
}
