//! Acceptance gate: eleven criteria, one line each. Closed forms are
//! re-derived here rather than taken from the library.

use std::f64::consts::{LN_10, PI};
use std::fs;
use std::panic;
use std::path::Path;
use std::process::Command;

use radial_conformal::asymptotics::{fit_linearized_tail, local_extrema_scan, ExtremumKind};
use radial_conformal::curvature::check_lemma24_conditions;
use radial_conformal::exact::ExactSolution;
use radial_conformal::harness::{self, Check, Outcome, Scenario};
use radial_conformal::solver::CylinderSample;
use radial_conformal::*;

type Verdict = Result<String, String>;

fn dim(n: u32) -> Dimension {
    Dimension::new(n).unwrap()
}

fn r_max_for(n: u32) -> f64 {
    if n == 3 {
        1e8
    } else {
        1e4
    }
}

/// `vol(S^{n−1})` tabulated for the dimensions used here.
fn sphere_area(n: u32) -> f64 {
    match n {
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        5 => 8.0 * PI * PI / 3.0,
        6 => PI.powi(3),
        _ => unreachable!(),
    }
}

fn m_of(n: u32) -> f64 {
    (n as f64 - 2.0) / 2.0
}

fn p_of(n: u32) -> f64 {
    (n as f64 + 2.0) / (n as f64 - 2.0)
}

fn v_cyl(n: u32, k: f64) -> f64 {
    (m_of(n).powi(2) / k).powf((n as f64 - 2.0) / 4.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn ensure(ok: bool, msg: String) -> Verdict {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Bubble `A λ^m (λ² + r²)^(−m)` with value, first and second derivative.
fn bubble3(n: u32, k: f64, lambda: f64, r: f64) -> (f64, f64, f64) {
    let m = m_of(n);
    let a = (n as f64 * (n as f64 - 2.0) / k).powf(m / 2.0) * lambda.powf(m);
    let q = lambda * lambda + r * r;
    let u = a * q.powf(-m);
    let du = -2.0 * m * r * a * q.powf(-m - 1.0);
    let ddu = -2.0 * m * a * (q.powf(-m - 1.0) - 2.0 * (m + 1.0) * r * r * q.powf(-m - 2.0));
    (u, du, ddu)
}

fn radial_residual(n: u32, k: f64, r: f64, (u, du, ddu): (f64, f64, f64)) -> f64 {
    let first = if r > 0.0 { (n as f64 - 1.0) * du / r } else { (n as f64 - 1.0) * ddu };
    let nl = k * u.powf(p_of(n));
    (ddu + first + nl).abs() / (ddu.abs() + first.abs() + nl.abs())
}

fn cylinder_residual(n: u32, k: f64, (v, ddv): (f64, f64)) -> f64 {
    let lin = m_of(n).powi(2) * v;
    let nl = k * v.powf(p_of(n));
    (ddv - lin + nl).abs() / (ddv.abs() + lin.abs() + nl.abs())
}

fn residual_grid() -> Vec<f64> {
    let log = (0..128).map(|i| 10f64.powf(-4.0 + 8.0 * i as f64 / 127.0));
    let lin = (0..128).map(|i| 0.05 + 49.95 * i as f64 / 127.0);
    log.chain(lin).collect()
}

fn criterion_1() -> Verdict {
    let grid = residual_grid();
    let mut worst = [0.0f64; 2];
    for n in 3..=6 {
        for (k, lambda, shift) in [(1.0, 1.0, 0.0), (3.0, 0.5, 0.4)] {
            let b = ExactSolution::bubble(dim(n), k, lambda).unwrap();
            let c = ExactSolution::constant_cylinder(dim(n), k).unwrap();
            let sep = ExactSolution::cosh_separatrix(dim(n), k, shift).unwrap();
            let (m, amp) = (m_of(n), (n as f64 * (n as f64 - 2.0) / (4.0 * k)).powf((n as f64 - 2.0) / 4.0));
            for &r in &grid {
                let s = r.ln();
                let sigma = s - shift;
                let v = amp * sigma.cosh().powf(-m);
                let ddv = m * m * v * sigma.tanh().powi(2) - m * v / sigma.cosh().powi(2);
                let own = [
                    radial_residual(n, k, r, bubble3(n, k, lambda, r)),
                    cylinder_residual(n, k, (v_cyl(n, k), 0.0)),
                    cylinder_residual(n, k, (v, ddv)),
                ];
                let lib = [b.residual(r), c.residual(s), sep.residual(s)];
                worst[0] = own.iter().fold(worst[0], |a, &x| a.max(x));
                worst[1] = lib.iter().fold(worst[1], |a, &x| a.max(x));
                // The two routes must describe the same functions.
                let (u_lib, _) = b.value(r);
                if rel(u_lib, bubble3(n, k, lambda, r).0) > 1e-13 || rel(sep.value(s).0, v) > 1e-13 {
                    return Err(format!("closed forms disagree at n={n}, r={r}"));
                }
            }
        }
    }
    ensure(
        worst[0] < 1e-10 && worst[1] < 1e-10,
        format!("max residual {:.2e} (test-side) / {:.2e} (library), 3 solutions x n=3..6 x 256 points, tol 1e-10", worst[0], worst[1]),
    )
}

fn criterion_2() -> Verdict {
    let k = CurvatureProfile::constant(8.0).unwrap();
    let sol = integrate_radial(dim(4), &k, 1.0, 100.0, Tolerances::new(1e-10, 1e-12)).unwrap();
    let err = sol.grid().iter().map(|p| rel(p.u, 1.0 / (1.0 + p.r * p.r))).fold(0.0, f64::max);
    let reached = sol.range().1 == 100.0;
    let mut drift = 0.0f64;
    for n in 3..=6 {
        let k = CurvatureProfile::constant(1.0).unwrap();
        let vc = v_cyl(n, 1.0);
        let cyl = integrate_cylinder(dim(n), &k, 0.0, vc, 0.0, 50.0, Tolerances::new(1e-10, 1e-12)).unwrap();
        if cyl.range().1 != 50.0 {
            return Err(format!("cylinder run n={n} stopped at s={}", cyl.range().1));
        }
        drift = cyl.grid().iter().map(|p| rel(p.v, vc)).fold(drift, f64::max);
    }
    ensure(
        reached && err < 1e-6 && drift < 1e-10,
        format!("bubble max rel err {err:.2e} on [0,100] (tol 1e-6); v_cyl drift {drift:.2e} on s in [0,50], n=3..6 (tol 1e-10)"),
    )
}

fn profiles() -> Vec<(&'static str, ProfileSpec)> {
    vec![
        ("constant", ProfileSpec::Constant { value: 2.0 }),
        ("plateau", ProfileSpec::Plateau { inner: 2.0, outer: 1.0, radius: 3.0 }),
        ("exp", ProfileSpec::ExpPerturbed { limit: 1.0, amplitude: 0.5, rate: 1.0 }),
        ("power", ProfileSpec::PowerPerturbed { limit: 1.0, amplitude: 0.5, exponent: 2.0 }),
    ]
}

fn criterion_3() -> Verdict {
    let mut worst = 0.0f64;
    let mut count = 0;
    for n in [3, 4, 5] {
        for (name, spec) in profiles() {
            let k = spec.build().unwrap();
            let sol = integrate_radial(dim(n), &k, 1.0, r_max_for(n), Tolerances::default()).unwrap();
            let rep = PohozaevReport::compute(&sol, &Calibration::default()).unwrap();
            let scale = 1.0 + rep.p0.abs();
            for (i, smp) in rep.samples.iter().enumerate() {
                // Surface form re-evaluated here from the stored trajectory point.
                let g = sol.grid()[sol.log_grid()[i]];
                let (kr, _) = k.eval(g.r).unwrap();
                let nf = n as f64;
                let q = 2.0 * nf / (nf - 2.0);
                let bracket = 0.5 * g.r * g.du * g.du + (nf - 2.0) / (2.0 * nf) * g.r * kr * g.u.powf(q) + m_of(n) * g.u * g.du;
                let surface = sphere_area(n) * g.r.powf(nf - 1.0) * bracket;
                if g.r != smp.r || rel(surface, smp.surface) > 1e-12 && (surface - smp.surface).abs() > 1e-14 {
                    return Err(format!("{name} n={n}: surface form mismatch at r={}", smp.r));
                }
                let r = (smp.surface - smp.volume - rep.p0).abs() / scale;
                worst = worst.max(r).max(smp.residual.abs() / scale);
            }
            count += 1;
        }
    }
    ensure(count == 12 && worst < 1e-6, format!("{count} solutions, max |surface - volume - P0|/(1+|P0|) = {worst:.2e} on the log grid (tol 1e-6)"))
}

/// Radial and pulled-back cylinder solutions over dimensions and profiles.
fn corpus() -> Vec<(String, RadialSolution)> {
    let mut out = Vec::new();
    for n in [3, 4, 5] {
        for (name, spec) in profiles() {
            let k = spec.build().unwrap();
            for u0 in [0.3, 1.0] {
                out.push((format!("{name} n={n} u0={u0}"), integrate_radial(dim(n), &k, u0, r_max_for(n), Tolerances::default()).unwrap()));
            }
            for frac in [1.0, 0.7] {
                let (k0, _) = k.eval(1e-5).unwrap();
                let v0 = frac * v_cyl(n, k0);
                let cyl = integrate_cylinder(dim(n), &k, -5.0 * LN_10, v0, 0.0, r_max_for(n).ln(), Tolerances::default()).unwrap();
                out.push((format!("{name} n={n} cylinder {frac}"), inverse_transform(&cyl).unwrap()));
            }
        }
    }
    out
}

fn criterion_4() -> Verdict {
    let cal = Calibration::default();
    let mut bubble_p = 0.0f64;
    for n in 3..=6 {
        let k = CurvatureProfile::constant(1.0).unwrap();
        let sol = integrate_radial(dim(n), &k, 1.0, r_max_for(n), Tolerances::default()).unwrap();
        bubble_p = bubble_p.max(PohozaevReport::compute(&sol, &cal).unwrap().limit.estimate.abs());
    }

    let k = CurvatureProfile::constant(1.0).unwrap();
    let cyl = integrate_cylinder(dim(4), &k, -5.0 * LN_10, v_cyl(4, 1.0), 0.0, 1e4f64.ln(), Tolerances::default()).unwrap();
    let p_cyl = PohozaevReport::compute(&inverse_transform(&cyl).unwrap(), &cal).unwrap().limit.estimate;
    let oracle = -sphere_area(4) * m_of(4).powi(2) * v_cyl(4, 1.0).powi(2) / 4.0;
    let gap = rel(p_cyl, -PI * PI / 2.0).max(rel(p_cyl, oracle));

    let (mut slow, mut violations) = (0, Vec::new());
    for (name, sol) in corpus() {
        let asy = AsymptoticsReport::compute(&sol, &cal).unwrap();
        if asy.decay.class != DecayClass::Slow {
            continue;
        }
        let lemma = check_lemma24_conditions(sol.profile(), sol.n(), cal.integrability_exponent, cal.log_decay_epsilon, sol.range().1);
        if !lemma.is_ok_and(|c| c.any_holds()) {
            continue;
        }
        slow += 1;
        let lim = PohozaevReport::compute(&sol, &cal).unwrap().limit;
        if lim.estimate > lim.uncertainty {
            violations.push(format!("{name}: P = {:e} ± {:e}", lim.estimate, lim.uncertainty));
        }
    }
    ensure(
        bubble_p < 1e-7 && gap < 1e-8 && slow > 0 && violations.is_empty(),
        format!(
            "bubble |P| <= {bubble_p:.2e} (tol 1e-7); cylinder P = {p_cyl:.12} vs -pi^2/2, rel {gap:.2e} (tol 1e-8); {slow} slow-decay solutions with P <= uncertainty{}",
            if violations.is_empty() { String::new() } else { format!(", violations: {}", violations.join("; ")) }
        ),
    )
}

fn criterion_5() -> Verdict {
    let cal = Calibration::default();
    let mut fast_err = 0.0f64;
    let mut slow_err = 0.0f64;
    for n in 3..=6 {
        let k = CurvatureProfile::constant(1.0).unwrap();
        for u0 in [0.5, 2.0] {
            let sol = integrate_radial(dim(n), &k, u0, r_max_for(n), Tolerances::default()).unwrap();
            let d = AsymptoticsReport::compute(&sol, &cal).unwrap().decay;
            if d.class != DecayClass::Fast {
                return Err(format!("bubble n={n} u0={u0} classified {:?}", d.class));
            }
            fast_err = fast_err.max(rel(d.kappa.unwrap(), n as f64 - 2.0));
        }
        for frac in [1.0, 0.7, 0.3] {
            let cyl = integrate_cylinder(dim(n), &k, -5.0 * LN_10, frac * v_cyl(n, 1.0), 0.0, r_max_for(n).ln(), Tolerances::default()).unwrap();
            let d = AsymptoticsReport::compute(&inverse_transform(&cyl).unwrap(), &cal).unwrap().decay;
            if d.class != DecayClass::Slow {
                return Err(format!("cylinder n={n} fraction {frac} classified {:?}", d.class));
            }
            slow_err = slow_err.max(rel(d.kappa.unwrap(), m_of(n)));
        }
    }
    let mut stable = 0;
    let mut outside = Vec::new();
    for (name, sol) in corpus() {
        let d = AsymptoticsReport::compute(&sol, &cal).unwrap().decay;
        let Some(kappa) = d.kappa.filter(|_| d.stable && d.rms <= cal.max_fit_rms) else { continue };
        if matches!(d.class, DecayClass::Crossed | DecayClass::Undetermined) {
            continue;
        }
        stable += 1;
        let n = sol.n().get();
        let dist = rel(kappa, n as f64 - 2.0).min(rel(kappa, m_of(n)));
        if dist > cal.class_band {
            outside.push(format!("{name}: kappa {kappa}"));
        }
    }
    ensure(
        fast_err < 0.02 && slow_err < 0.02 && outside.is_empty(),
        format!(
            "bubble kappa within {:.3}% of n-2, cylinder/Delaunay within {:.3}% of (n-2)/2 (tol 2%); {stable} stable corpus fits, {} outside the +-{}% bands",
            100.0 * fast_err,
            100.0 * slow_err,
            outside.len(),
            100.0 * cal.class_band
        ),
    )
}

fn criterion_6() -> Verdict {
    let cal = Calibration::default();
    let (mut decided, mut exceptions) = (0, Vec::new());
    for (name, sol) in corpus() {
        let a = AsymptoticsReport::compute(&sol, &cal).unwrap();
        if a.completeness == Completeness::Undetermined || a.volume_growth == VolumeGrowth::Undetermined {
            continue;
        }
        decided += 1;
        let complete = a.completeness == Completeness::Complete;
        if complete != a.volume_growth.is_divergent() || (!complete && a.volume_growth != VolumeGrowth::Finite) {
            exceptions.push(format!("{name}: {:?} / {:?}", a.completeness, a.volume_growth));
        }
    }
    let mut slope_err = 0.0f64;
    for n in 3..=6 {
        let k = CurvatureProfile::constant(1.0).unwrap();
        let cyl = integrate_cylinder(dim(n), &k, -5.0 * LN_10, v_cyl(n, 1.0), 0.0, 1e4f64.ln(), Tolerances::default()).unwrap();
        let a = AsymptoticsReport::compute(&inverse_transform(&cyl).unwrap(), &cal).unwrap();
        let q = 2.0 * n as f64 / (n as f64 - 2.0);
        let slope = a.volume.map_or(f64::NAN, |g| g.slope);
        slope_err = slope_err.max(rel(slope, sphere_area(n) * v_cyl(n, 1.0).powf(q)));
    }
    ensure(
        decided > 0 && exceptions.is_empty() && slope_err < 1e-4,
        format!(
            "{decided} decided corpus solutions, {} exceptions{}; cylinder volume slope rel err {slope_err:.2e}, n=3..6 (tol 1e-4)",
            exceptions.len(),
            if exceptions.is_empty() { String::new() } else { format!(" ({})", exceptions.join("; ")) }
        ),
    )
}

fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn criterion_7() -> Verdict {
    let text = fs::read_to_string(fixture("constant_cylinder.toml")).unwrap();
    let mut s: Scenario = radial_conformal_cli::RunConfig::parse(&text).map_err(|e| e.to_string())?.scenario();
    s.checks = vec![Check::LogVolumeGrowth];
    let report = harness::run_scenario(&s).unwrap();
    let c = report.outcome_of(Check::LogVolumeGrowth).unwrap();
    let rms = c.measurements.iter().find(|m| m.name == "volume_fit_relative_rms").map(|m| m.value);

    // Direct route: the volume curve itself.
    let profile = s.profile.build().unwrap();
    let (sol, _) = harness::solve_scenario(&s, &profile).unwrap();
    let a = AsymptoticsReport::compute(&sol, &s.calibration).unwrap();
    let fit = a.volume.unwrap();
    let (lo, _) = a.decay.window;
    let c_min = a.volume_curve.iter().filter(|p| p.r >= lo && p.r > 1.0).map(|p| p.value / p.r.ln()).fold(f64::INFINITY, f64::min);
    let rms = rms.unwrap_or(f64::NAN);
    ensure(
        c.outcome == Outcome::Pass && fit.slope > 0.0 && c_min > 0.0 && rms < 0.01 && fit.relative_rms < 0.01,
        format!(
            "THM_215_LOG {:?}; C' = {:.10} (fit), min V(R)/ln R on the tail = {c_min:.6}; fit relative rms {rms:.2e} (tol 1e-2)",
            c.outcome, fit.slope
        ),
    )
}

fn criterion_8() -> Verdict {
    let cal = Calibration::default();
    let (mut ratio, mut formula_err, mut direct_err) = (0.0f64, 0.0f64, 0.0f64);
    for n in 3..=6 {
        for (k, u0) in [(1.0, 1.0), (2.0, 0.4)] {
            let profile = CurvatureProfile::constant(k).unwrap();
            let sol = integrate_radial(dim(n), &profile, u0, r_max_for(n), Tolerances::default()).unwrap();
            let a = AsymptoticsReport::compute(&sol, &cal).unwrap();
            let (c1, c2) = a.bounds.ok_or(format!("n={n}: no fast decay bounds"))?;
            ratio = ratio.max(c2 / c1);
            // u(0) = A λ^(−m) fixes λ; the tail is A λ^m r^(2−n).
            let m = m_of(n);
            let amp = (n as f64 * (n as f64 - 2.0) / k).powf(m / 2.0);
            let lambda = (amp / u0).powf(1.0 / m);
            let c0 = amp * lambda.powf(m);
            let est = a.c0.ok_or(format!("n={n}: no c0 estimate"))?;
            formula_err = formula_err.max(rel(est.formula, c0));
            let last = sol.grid().last().unwrap();
            let direct = last.r.powf(n as f64 - 2.0) * last.u;
            direct_err = direct_err.max(rel(est.direct, c0)).max(rel(direct, c0));
        }
    }
    ensure(
        ratio < 1.05 && formula_err < 1e-3 && direct_err < 1e-3,
        format!("max c2/c1 = {ratio:.6} (tol 1.05); c0 vs closed form rel {formula_err:.2e}, r^(n-2)u(r_max) rel {direct_err:.2e} (tol 1e-3)"),
    )
}

fn criterion_9() -> Verdict {
    let (mut trip, mut energy) = (0.0f64, 0.0f64);
    for n in 3..=6 {
        for spec in [ProfileSpec::Constant { value: 1.0 }, ProfileSpec::ExpPerturbed { limit: 1.0, amplitude: 0.5, rate: 1.0 }] {
            let k = spec.build().unwrap();
            let sol = integrate_radial(dim(n), &k, 0.8, 1e3, Tolerances::default()).unwrap();
            let s_min = (1e-3f64).ln();
            let cyl = cylinder_transform(&sol, s_min).unwrap();
            let back = inverse_transform(&cyl).unwrap();
            let start = sol.grid().iter().position(|p| p.r >= 1e-3).unwrap();
            for (a, b) in sol.grid()[start..].iter().zip(back.grid()) {
                trip = trip.max(rel(b.r, a.r)).max(rel(b.u, a.u)).max((b.du - a.du).abs() / (a.du.abs() + a.u / a.r));
            }
            let again = cylinder_transform(&back, s_min).unwrap();
            for (a, b) in cyl.grid().iter().zip(again.grid()) {
                trip = trip.max((b.v - a.v).abs() / a.v).max((b.dv - a.dv).abs() / (a.dv.abs() + a.v));
            }
            let m = m_of(n);
            let w = sphere_area(n);
            for (p, c) in sol.grid()[start..].iter().zip(cyl.grid()) {
                let CylinderSample { s, dv, .. } = *c;
                if rel(s.exp(), p.r) > 1e-14 {
                    return Err(format!("grids out of step at r={}", p.r));
                }
                let lhs = w * p.r.powf(n as f64) * (p.du + m * p.u / p.r).powi(2);
                let scale = w * p.r.powf(n as f64) * (p.du * p.du + m * m * p.u * p.u / (p.r * p.r));
                energy = energy.max((lhs - w * dv * dv).abs() / scale);
            }
            let gap = AsymptoticsReport::compute(&sol, &Calibration::default()).unwrap().omega.energy_identity_gap;
            energy = energy.max(gap);
        }
    }
    ensure(trip < 1e-12 && energy < 1e-9, format!("round trip max rel err {trip:.2e} (tol 1e-12); energy identity gap {energy:.2e} (tol 1e-9)"))
}

fn criterion_10() -> Verdict {
    let cal = Calibration::default();
    let k = CurvatureProfile::constant(1.0).unwrap();
    let (mut lo, mut hi, mut fits) = (f64::INFINITY, 0.0f64, 0);
    for n in 3..=6 {
        let cyl = integrate_cylinder(dim(n), &k, 0.0, 1e-3 * v_cyl(n, 1.0), 0.0, 60.0, Tolerances::default()).unwrap();
        for e in local_extrema_scan(&cyl, &cal).unwrap().into_iter().filter(|e| e.kind == ExtremumKind::Min) {
            let f = fit_linearized_tail(&cyl, e.s, 1.0).unwrap();
            lo = lo.min(f.a / f.b);
            hi = hi.max(f.a / f.b);
            fits += 1;
        }
    }
    let mut synth = 0.0f64;
    for n in 3..=6 {
        let m = m_of(n);
        let (a, b) = (0.3, 0.02);
        let grid = (0..=400)
            .map(|i| {
                let s = -2.0 + 8.0 * i as f64 / 400.0;
                CylinderSample { s, v: a * (-m * s).exp() + b * (m * s).exp(), dv: m * (b * (m * s).exp() - a * (-m * s).exp()) }
            })
            .collect();
        let centre = 0.5 * (a / b).ln() / m;
        let sol = CylinderSolution::from_parts(dim(n), k.clone(), grid, Status::ReachedRmax, Tolerances::default(), Vec::new(), false).unwrap();
        let f = fit_linearized_tail(&sol, centre, 1.5).unwrap();
        synth = synth.max((f.a - a * (-m * centre).exp()).abs()).max((f.b - b * (m * centre).exp()).abs());
    }
    ensure(
        fits > 0 && lo >= 0.9 && hi <= 1.1 && synth < 1e-10,
        format!("{fits} shallow minima, a/b in [{lo:.4}, {hi:.4}] (band [0.9, 1.1]); synthetic (a, b) max error {synth:.2e} (tol 1e-10)"),
    )
}

fn criterion_11() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut names: Vec<_> = fs::read_dir(fixture("")).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|x| x == "toml")).collect();
    names.sort();
    for cfg in &names {
        let mut outputs = Vec::new();
        for (run, jobs) in [(0, "1"), (1, "1"), (2, "4")] {
            let out = dir.path().join(format!("{}-{run}", cfg.file_stem().unwrap().to_string_lossy()));
            let status = Command::new(env!("CARGO_BIN_EXE_radial-conformal"))
                .args(["verify", "--quiet", "--format", "json", "--jobs", jobs, "--config"])
                .arg(cfg)
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            if status.code() == Some(1) {
                return Err(format!("{} failed to run", cfg.display()));
            }
            outputs.push(fs::read(out.join("report.json")).unwrap());
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{}: report.json differs between runs", cfg.display()));
        }
    }
    ensure(!names.is_empty(), format!("{} fixtures x 3 verify runs (jobs 1, 1, 4), report.json bit-identical", names.len()))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 11] = [
        ("exact-solution residuals", criterion_1),
        ("solver vs closed forms", criterion_2),
        ("Pohozaev identity on 12 solutions", criterion_3),
        ("Pohozaev values and sign", criterion_4),
        ("decay classification", criterion_5),
        ("completeness/volume dichotomy", criterion_6),
        ("logarithmic volume growth", criterion_7),
        ("fast decay bounds and c0", criterion_8),
        ("transform round trips and energy identity", criterion_9),
        ("linearized tail fit", criterion_10),
        ("determinism of verify", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(f).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match verdict {
            Ok(msg) => println!("criterion {:>2} PASS  {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
