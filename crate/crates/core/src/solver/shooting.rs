//! Bisection on the initial height `u(0)` across a change of decay class.

use crate::asymptotics::{fit_decay_exponent, AsymptoticsReport, DecayClass};
use crate::calibration::Calibration;
use crate::curvature::CurvatureProfile;
use crate::dimension::Dimension;
use crate::error::{Error, Result};

use super::{integrate_radial, RadialSolution, Tolerances};

#[derive(Clone, Debug)]
pub struct ShootingResult {
    /// Midpoint of the final bracket.
    pub threshold: f64,
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
    pub lo_solution: RadialSolution,
    pub hi_solution: RadialSolution,
    pub lo_report: AsymptoticsReport,
    pub hi_report: AsymptoticsReport,
}

/// Consecutive Undetermined midpoints tolerated before giving up.
const MAX_UNDETERMINED: usize = 5;

/// An Undetermined tail is re-integrated this many times, each reaching
/// `EXTENSION` times further out.
const EXTENSIONS: usize = 6;
const EXTENSION: f64 = 1e4;

fn classify(n: Dimension, profile: &CurvatureProfile, u0: f64, r_max: f64, tol: Tolerances, cal: &Calibration) -> Result<(RadialSolution, DecayClass)> {
    let mut reach = r_max;
    let mut attempt = 0;
    loop {
        let sol = integrate_radial(n, profile, u0, reach, tol)?;
        let class = match fit_decay_exponent(&sol, cal.tail_decades, cal) {
            Ok(fit) => fit.class,
            Err(Error::InsufficientTail { .. }) => DecayClass::Undetermined,
            Err(e) => return Err(e),
        };
        // Near a threshold the solution shadows the separatrix before it
        // commits, so a longer tail usually decides it.
        if class != DecayClass::Undetermined || attempt == EXTENSIONS || !(reach * EXTENSION).is_finite() {
            return Ok((sol, class));
        }
        attempt += 1;
        reach *= EXTENSION;
    }
}

/// Bisects `[u0_lo, u0_hi]` on the predicate "classifies as `target`" until
/// `hi − lo < 1e−10·hi` or `max_iter` midpoints have been tried. Undetermined
/// solutions are re-integrated further out before they count as such.
#[allow(clippy::too_many_arguments)]
pub fn shoot(
    n: Dimension,
    profile: &CurvatureProfile,
    u0_lo: f64,
    u0_hi: f64,
    target: DecayClass,
    max_iter: usize,
    r_max: f64,
    tol: Tolerances,
    cal: &Calibration,
) -> Result<ShootingResult> {
    if !(u0_lo > 0.0 && u0_hi > u0_lo && u0_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < u0_lo < u0_hi, got [{u0_lo}, {u0_hi}]")));
    }
    let (mut lo_sol, lo_class) = classify(n, profile, u0_lo, r_max, tol, cal)?;
    let (mut hi_sol, hi_class) = classify(n, profile, u0_hi, r_max, tol, cal)?;
    let lo_is = lo_class == target;
    if lo_is == (hi_class == target) {
        return Err(Error::BracketInvalid(lo_class));
    }
    let (mut lo, mut hi) = (u0_lo, u0_hi);
    let mut iterations = 0;
    let mut undetermined = 0;
    while iterations < max_iter && hi - lo >= 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        let (sol, class) = classify(n, profile, mid, r_max, tol, cal)?;
        iterations += 1;
        if class == DecayClass::Undetermined {
            undetermined += 1;
            if undetermined >= MAX_UNDETERMINED {
                return Err(Error::Inconclusive(undetermined));
            }
        } else {
            undetermined = 0;
        }
        if (class == target) == lo_is {
            lo = mid;
            lo_sol = sol;
        } else {
            hi = mid;
            hi_sol = sol;
        }
    }
    let lo_report = AsymptoticsReport::compute(&lo_sol, cal)?;
    let hi_report = AsymptoticsReport::compute(&hi_sol, cal)?;
    Ok(ShootingResult {
        threshold: 0.5 * (lo + hi),
        lo,
        hi,
        iterations,
        lo_solution: lo_sol,
        hi_solution: hi_sol,
        lo_report,
        hi_report,
    })
}
