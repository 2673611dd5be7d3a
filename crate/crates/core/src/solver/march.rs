//! Dormand–Prince 5(4) integration of the cylinder equation
//! `v″ = m²v − K(eˢ) v^p` with forced log-grid landings, zero-crossing
//! location and optional projection onto the first integral where `K` is flat.

use crate::curvature::CurvatureProfile;
use crate::dimension::Dimension;
use crate::error::Result;

use super::interp::quintic;
use super::Tolerances;

/// Spacing of the forced sample grid in `s`: 64 points per decade of `r`.
pub const LOG_STEP: f64 = std::f64::consts::LN_10 / 64.0;

/// Largest admissible `u` (radial) or `v` (cylinder).
pub const OVERFLOW: f64 = 1e12;

const C: [f64; 6] = [0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B: [f64; 6] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0];
// fifth-order minus embedded fourth-order weights; the last entry multiplies the FSAL stage
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Stop {
    Reached,
    Crossed(f64),
    Overflow(f64),
    Underflow(f64),
}

#[derive(Clone, Debug)]
pub(crate) struct Track {
    pub s: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub forced: Vec<usize>,
    pub stop: Stop,
}

pub(crate) struct Rhs<'a> {
    pub n: Dimension,
    pub profile: &'a CurvatureProfile,
}

impl Rhs<'_> {
    pub fn accel(&self, s: f64, v: f64) -> Result<f64> {
        let m = self.n.m();
        let (k, _) = self.profile.eval_log(s)?;
        Ok(m * m * v - k * self.n.nonlinearity(v))
    }

    fn eval(&self, s: f64, y: [f64; 2]) -> Result<[f64; 2]> {
        Ok([y[1], self.accel(s, y[0])?])
    }

    /// First integral `½w² − ½m²v² + ((n−2)/(2n)) K |v|^q` and its gradient.
    fn energy(&self, k: f64, y: [f64; 2]) -> (f64, [f64; 2]) {
        let m = self.n.m();
        let [v, w] = y;
        let h = 0.5 * w * w - 0.5 * m * m * v * v + self.n.pohozaev_coefficient() * k * self.n.volume_power(v);
        (h, [-m * m * v + k * self.n.nonlinearity(v), w])
    }
}

fn next_forced(s: f64) -> f64 {
    let snap = 1e-12 * s.abs().max(1.0);
    let k = ((s + snap) / LOG_STEP).floor() + 1.0;
    k * LOG_STEP
}

fn on_forced(s: f64) -> bool {
    let snap = 1e-12 * s.abs().max(1.0);
    ((s / LOG_STEP).round() * LOG_STEP - s).abs() <= snap
}

pub(crate) fn march(
    rhs: &Rhs<'_>,
    tol: &Tolerances,
    overflow: &dyn Fn(f64, f64) -> bool,
    s0: f64,
    y0: [f64; 2],
    s_end: f64,
) -> Result<Track> {
    let mut track = Track { s: vec![s0], v: vec![y0[0]], w: vec![y0[1]], forced: Vec::new(), stop: Stop::Reached };
    if on_forced(s0) {
        track.forced.push(0);
    }
    let mut s = s0;
    let mut y = y0;
    let mut k1 = rhs.eval(s, y)?;
    let mut h_free = 0.01f64.min(s_end - s);
    let mut energy_ref: Option<f64> = None;
    let kinks: Vec<f64> = rhs.profile.breakpoints().into_iter().map(f64::ln).collect();

    while s < s_end {
        let snap = 1e-12 * s.abs().max(1.0);
        let kink = kinks.iter().copied().find(|&k| k > s + snap).unwrap_or(f64::INFINITY);
        let target = next_forced(s).min(kink).min(s_end);
        let mut landed = false;
        let mut h = h_free;
        if s + h >= target - 1e-12 * target.abs().max(1.0) {
            h = target - s;
            landed = true;
        }
        if h < 1e-13 * s.abs().max(1.0) {
            track.stop = Stop::Underflow(s);
            return Ok(track);
        }

        let stage = |c: f64, a: &[f64], ks: &[[f64; 2]]| -> Result<[f64; 2]> {
            let mut z = y;
            for (ai, ki) in a.iter().zip(ks) {
                z[0] += h * ai * ki[0];
                z[1] += h * ai * ki[1];
            }
            rhs.eval(s + c * h, z)
        };
        let k2 = stage(C[0], &A2, &[k1])?;
        let k3 = stage(C[1], &A3, &[k1, k2])?;
        let k4 = stage(C[2], &A4, &[k1, k2, k3])?;
        let k5 = stage(C[3], &A5, &[k1, k2, k3, k4])?;
        let k6 = stage(C[4], &A6, &[k1, k2, k3, k4, k5])?;
        let ks = [k1, k2, k3, k4, k5, k6];
        let mut y_new = y;
        for (b, k) in B.iter().zip(&ks) {
            y_new[0] += h * b * k[0];
            y_new[1] += h * b * k[1];
        }
        let s_new = if landed { target } else { s + h };
        let k7 = rhs.eval(s_new, y_new)?;

        let mut err = [0.0; 2];
        for (e, k) in E.iter().zip(ks.iter().chain(std::iter::once(&k7))) {
            err[0] += h * e * k[0];
            err[1] += h * e * k[1];
        }
        let magnitude = y[0].abs().max(y[1].abs()).max(y_new[0].abs()).max(y_new[1].abs());
        let mut norm = 0.0;
        for i in 0..2 {
            let sc = tol.rel_tol * y[i].abs().max(y_new[i].abs()) + tol.abs_tol * magnitude;
            norm += (err[i] / sc).powi(2);
        }
        let norm = (norm / 2.0).sqrt();

        if !norm.is_finite() || norm > 1.0 {
            let factor = if norm.is_finite() { (0.9 * norm.powf(-0.2)).max(0.2) } else { 0.2 };
            h_free = h * factor;
            continue;
        }

        let factor = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
        if !landed || h * factor < h_free {
            h_free = h * factor;
        }

        if y_new[0] <= 0.0 {
            let root = locate_zero(s, y, k1, s_new, y_new, k7);
            let w_root = quintic(s, s_new, [y[0], y[1], k1[1]], [y_new[0], y_new[1], k7[1]], root).1;
            track.s.push(root);
            track.v.push(0.0);
            track.w.push(w_root);
            track.stop = Stop::Crossed(root);
            return Ok(track);
        }
        if !y_new[0].is_finite() || !y_new[1].is_finite() || overflow(s_new, y_new[0]) {
            track.stop = Stop::Overflow(s_new);
            return Ok(track);
        }

        let mut k_next = k7;
        if tol.conserve_first_integral && rhs.profile.is_flat_on(s.exp(), s_new.exp()) {
            let (kval, _) = rhs.profile.eval_log(s_new)?;
            let reference = *energy_ref.get_or_insert_with(|| rhs.energy(kval, y).0);
            let (e, g) = rhs.energy(kval, y_new);
            let g2 = g[0] * g[0] + g[1] * g[1];
            if g2 > 0.0 {
                let d = (e - reference) / g2;
                let shift = d * g2.sqrt();
                if shift.abs() <= 100.0 * tol.rel_tol * magnitude {
                    y_new[0] -= d * g[0];
                    y_new[1] -= d * g[1];
                    k_next = rhs.eval(s_new, y_new)?;
                }
            }
        } else {
            energy_ref = None;
        }

        s = s_new;
        y = y_new;
        k1 = k_next;
        track.s.push(s);
        track.v.push(y[0]);
        track.w.push(y[1]);
        if landed && on_forced(s) {
            track.forced.push(track.s.len() - 1);
        }
    }
    Ok(track)
}

/// Bisection on the quintic Hermite interpolant of the accepted step.
fn locate_zero(s0: f64, y0: [f64; 2], k0: [f64; 2], s1: f64, y1: [f64; 2], k1: [f64; 2]) -> f64 {
    let a = [y0[0], y0[1], k0[1]];
    let b = [y1[0], y1[1], k1[1]];
    let (mut lo, mut hi) = (s0, s1);
    while hi - lo > 1e-12 * hi.abs().max(1.0) {
        let mid = 0.5 * (lo + hi);
        if quintic(s0, s1, a, b, mid).0 > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
