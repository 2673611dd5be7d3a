#![allow(dead_code)]

use radial_conformal::*;
use std::f64::consts::LN_10;

pub fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

/// Radial solve that is expected to succeed.
pub fn solve(n: u32, k: &CurvatureProfile, u0: f64, r_max: f64) -> RadialSolution {
    integrate_radial(dim(n), k, u0, r_max, Tolerances::default()).unwrap()
}

/// Cylinder solve from `r = 1e−5` to `r_max`, pulled back to the radial picture.
pub fn pullback(n: u32, k: &CurvatureProfile, v0: f64, dv0: f64, r_max: f64) -> RadialSolution {
    let cyl = integrate_cylinder(dim(n), k, -5.0 * LN_10, v0, dv0, r_max.ln(), Tolerances::default()).unwrap();
    inverse_transform(&cyl).unwrap()
}

pub fn profiles() -> Vec<(&'static str, CurvatureProfile)> {
    vec![
        ("constant", CurvatureProfile::constant(2.0).unwrap()),
        ("plateau", CurvatureProfile::plateau(2.0, 1.0, 3.0).unwrap()),
        ("exp", CurvatureProfile::exp_perturbed(1.0, 0.5, 1.0).unwrap()),
        ("power", CurvatureProfile::power_perturbed(1.0, 0.5, 2.0).unwrap()),
    ]
}

/// Tail length needed for a decided classification: the n = 3 oscillations
/// are slow.
pub fn r_max_for(n: u32) -> f64 {
    if n == 3 {
        1e8
    } else {
        1e4
    }
}

/// Solutions with entire and singular centers over dimensions and profiles.
pub fn corpus() -> Vec<(String, RadialSolution)> {
    let mut out = Vec::new();
    for n in [3u32, 4, 5] {
        let r_max = r_max_for(n);
        for (name, k) in profiles() {
            for u0 in [0.3, 1.0] {
                out.push((format!("n{n}-{name}-u{u0}"), solve(n, &k, u0, r_max)));
            }
            let (k0, _) = k.eval(0.0).unwrap();
            let vc = exact::constant_cylinder(dim(n), k0);
            for frac in [1.0, 0.7] {
                out.push((format!("n{n}-{name}-cyl{frac}"), pullback(n, &k, frac * vc, 0.0, r_max)));
            }
        }
    }
    out
}

/// `K = 1 − A(1 − ((r−c)/w)²)²` on `|r − c| < w`, 1 elsewhere. For n = 3 the
/// heights 0.8961 and 1.1649 bracket a change from Crossed to Slow.
pub fn well() -> CurvatureProfile {
    let (a, c, w) = (0.5, 2.0, 1.0);
    CurvatureProfile::custom("well", Some(1.0), Bounds::new(1.0 - a, 1.0, 0.0).unwrap(), move |r| {
        let x = (r - c) / w;
        if x.abs() >= 1.0 {
            Ok((1.0, 0.0))
        } else {
            let q = 1.0 - x * x;
            Ok((1.0 - a * q * q, 4.0 * a * q * x / w))
        }
    })
    .unwrap()
    .with_flat_interval(0.0, c - w)
    .with_flat_interval(c + w, f64::INFINITY)
}
