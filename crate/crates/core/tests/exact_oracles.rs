use radial_conformal::exact::*;
use radial_conformal::*;

mod common;
use common::dim;

fn grids() -> Vec<f64> {
    let log: Vec<f64> = (0..128).map(|i| 10f64.powf(-3.0 + 6.0 * i as f64 / 127.0)).collect();
    let lin: Vec<f64> = (0..128).map(|i| 100.0 * i as f64 / 127.0).collect();
    log.into_iter().chain(lin).collect()
}

#[test]
fn residuals_vanish_on_log_and_linear_grids() {
    for n in 3..=6 {
        let solutions = [
            ExactSolution::bubble(dim(n), 8.0, 1.0).unwrap(),
            ExactSolution::constant_cylinder(dim(n), 1.0).unwrap(),
            ExactSolution::cosh_separatrix(dim(n), 1.0, 0.5).unwrap(),
        ];
        for sol in &solutions {
            for x in grids() {
                // cylinder solutions use s on a symmetric range
                let x = match sol.coordinate() {
                    Coordinate::Radial => x,
                    Coordinate::Cylinder => x.ln().clamp(-20.0, 20.0),
                };
                assert!(sol.residual(x) < 1e-10, "n={n} {:?} x={x}: {}", sol.kind, sol.residual(x));
            }
        }
    }
}

/// Derivatives against central differences of the values.
#[test]
fn derivatives_match_finite_differences() {
    let h = 1e-5;
    for n in 3..=6 {
        let d = dim(n);
        for r in [0.1, 0.7, 2.0, 9.0] {
            let fd = (bubble(d, 8.0, 1.0, r + h).0 - bubble(d, 8.0, 1.0, r - h).0) / (2.0 * h);
            assert!((fd - bubble(d, 8.0, 1.0, r).1).abs() < 1e-8);
        }
        for s in [-3.0, -0.2, 1.5] {
            let fd = (cosh_separatrix(d, 1.0, s + h, 0.0).0 - cosh_separatrix(d, 1.0, s - h, 0.0).0) / (2.0 * h);
            assert!((fd - cosh_separatrix(d, 1.0, s, 0.0).1).abs() < 1e-8);
        }
    }
}

#[test]
fn bubble_pulls_back_to_separatrix() {
    // v(s) = e^{ms} u(e^s) for the bubble equals the separatrix shifted by ln λ
    for n in 3..=6 {
        let d = dim(n);
        let lambda: f64 = 2.5;
        for s in [-4.0, -1.0, 0.0, 0.9, 3.0] {
            let r = f64::exp(s);
            let v = r.powf(d.m()) * bubble(d, 8.0, lambda, r).0;
            let sep = cosh_separatrix(d, 8.0, s, lambda.ln()).0;
            assert!((v / sep - 1.0).abs() < 1e-13);
        }
    }
}

#[test]
fn cylinder_level_balances_linear_and_nonlinear_terms() {
    for n in 3..=6 {
        let d = dim(n);
        let v = constant_cylinder(d, 3.0);
        let m = d.m();
        assert!((m * m * v - 3.0 * v.powf(d.critical_exponent())).abs() < 1e-13 * m * m * v);
    }
}

#[test]
fn constant_cylinder_pohozaev_number() {
    let sol = ExactSolution::constant_cylinder(dim(4), 1.0).unwrap();
    let expected = -std::f64::consts::PI.powi(2) / 2.0;
    assert!((sol.pohozaev_number() / expected - 1.0).abs() < 1e-14);
    assert_eq!(ExactSolution::bubble(dim(4), 1.0, 1.0).unwrap().pohozaev_number(), 0.0);
}

#[test]
fn invalid_constructors_are_rejected() {
    assert!(ExactSolution::bubble(dim(4), -1.0, 1.0).is_err());
    assert!(ExactSolution::bubble(dim(4), 1.0, 0.0).is_err());
    assert!(Dimension::new(2).is_err());
}

proptest::proptest! {
    #[test]
    fn bubble_and_separatrix_are_exact(n in 3u32..=8, k in 0.1f64..20.0, lambda in 0.05f64..20.0, s in -8.0f64..8.0) {
        let d = dim(n);
        let b = ExactSolution::bubble(d, k, lambda).unwrap();
        let r = s.exp();
        proptest::prop_assert!(b.residual(r) < 1e-10, "bubble residual {}", b.residual(r));
        let v = r.powf(d.m()) * bubble(d, k, lambda, r).0;
        let sep = cosh_separatrix(d, k, s, lambda.ln()).0;
        proptest::prop_assert!((v / sep - 1.0).abs() < 1e-12);
    }
}
