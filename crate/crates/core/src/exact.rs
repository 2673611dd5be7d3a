//! Closed-form solutions for constant curvature, used as oracles.
//!
//! * the bubble `u(r) = (n(n−2)/K)^((n−2)/4) (λ/(λ²+r²))^((n−2)/2)` of the radial equation,
//! * the constant solution `v ≡ (m²/K)^((n−2)/4)` of the cylinder equation,
//! * the separatrix `v(s) = C cosh(s − shift)^(−m)` of the cylinder equation,
//!   with `C = (n(n−2)/(4K))^((n−2)/4)`; it is the cylinder image of the bubble
//!   with `shift = ln λ`.

use serde::{Deserialize, Serialize};

use crate::dimension::Dimension;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExactKind {
    Bubble { lambda: f64 },
    ConstantCylinder,
    CoshSeparatrix { shift: f64 },
}

/// Which variable an [`ExactSolution`] is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coordinate {
    /// `u(r)` solving `u″ + (n−1)u′/r + K u^p = 0`.
    Radial,
    /// `v(s)` solving `v″ − m²v + K v^p = 0`.
    Cylinder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactSolution {
    pub kind: ExactKind,
    pub n: Dimension,
    pub k_infinity: f64,
}

fn check_curvature(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidArgument(format!("curvature must be positive, got {k}")));
    }
    Ok(())
}

/// Bubble value and r-derivative.
pub fn bubble(n: Dimension, k: f64, lambda: f64, r: f64) -> (f64, f64) {
    let m = n.m();
    let amp = (n.as_f64() * (n.as_f64() - 2.0) / k).powf(m / 2.0);
    let w = lambda * lambda + r * r;
    let u = amp * (lambda / w).powf(m);
    (u, -2.0 * m * r * u / w)
}

fn bubble_second_derivative(n: Dimension, k: f64, lambda: f64, r: f64) -> f64 {
    let m = n.m();
    let (u, _) = bubble(n, k, lambda, r);
    let w = lambda * lambda + r * r;
    (u / w) * (-2.0 * m + 4.0 * m * (m + 1.0) * r * r / w)
}

/// `lim r^(n−2) u(r)` for the bubble.
pub fn bubble_tail_constant(n: Dimension, k: f64, lambda: f64) -> f64 {
    let m = n.m();
    (n.as_f64() * (n.as_f64() - 2.0) / k).powf(m / 2.0) * lambda.powf(m)
}

/// Scale `λ` of the bubble whose central height is `u0`.
pub fn bubble_scale_for_height(n: Dimension, k: f64, u0: f64) -> f64 {
    let m = n.m();
    let amp = (n.as_f64() * (n.as_f64() - 2.0) / k).powf(m / 2.0);
    (amp / u0).powf(1.0 / m)
}

/// Positive constant solution of the cylinder equation.
pub fn constant_cylinder(n: Dimension, k: f64) -> f64 {
    n.cylinder_level(k)
}

/// Amplitude `C` of the separatrix.
pub fn separatrix_amplitude(n: Dimension, k: f64) -> f64 {
    (n.as_f64() * (n.as_f64() - 2.0) / (4.0 * k)).powf((n.as_f64() - 2.0) / 4.0)
}

/// Separatrix value and s-derivative.
pub fn cosh_separatrix(n: Dimension, k: f64, s: f64, shift: f64) -> (f64, f64) {
    let m = n.m();
    let sigma = s - shift;
    let v = separatrix_amplitude(n, k) * sigma.cosh().powf(-m);
    (v, -m * v * sigma.tanh())
}

fn separatrix_second_derivative(n: Dimension, k: f64, s: f64, shift: f64) -> f64 {
    let m = n.m();
    let sigma = s - shift;
    let (v, _) = cosh_separatrix(n, k, s, shift);
    let sech = 1.0 / sigma.cosh();
    m * m * v * sigma.tanh().powi(2) - m * v * sech * sech
}

impl ExactSolution {
    pub fn bubble(n: Dimension, k: f64, lambda: f64) -> Result<Self> {
        check_curvature(k)?;
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidArgument(format!("λ must be positive, got {lambda}")));
        }
        Ok(ExactSolution { kind: ExactKind::Bubble { lambda }, n, k_infinity: k })
    }

    pub fn constant_cylinder(n: Dimension, k: f64) -> Result<Self> {
        check_curvature(k)?;
        Ok(ExactSolution { kind: ExactKind::ConstantCylinder, n, k_infinity: k })
    }

    pub fn cosh_separatrix(n: Dimension, k: f64, shift: f64) -> Result<Self> {
        check_curvature(k)?;
        Ok(ExactSolution { kind: ExactKind::CoshSeparatrix { shift }, n, k_infinity: k })
    }

    pub fn from_kind(kind: ExactKind, n: Dimension, k: f64) -> Result<Self> {
        match kind {
            ExactKind::Bubble { lambda } => Self::bubble(n, k, lambda),
            ExactKind::ConstantCylinder => Self::constant_cylinder(n, k),
            ExactKind::CoshSeparatrix { shift } => Self::cosh_separatrix(n, k, shift),
        }
    }

    pub fn coordinate(&self) -> Coordinate {
        match self.kind {
            ExactKind::Bubble { .. } => Coordinate::Radial,
            _ => Coordinate::Cylinder,
        }
    }

    /// Value and first derivative in the solution's own coordinate.
    pub fn value(&self, x: f64) -> (f64, f64) {
        let (n, k) = (self.n, self.k_infinity);
        match self.kind {
            ExactKind::Bubble { lambda } => bubble(n, k, lambda, x),
            ExactKind::ConstantCylinder => (constant_cylinder(n, k), 0.0),
            ExactKind::CoshSeparatrix { shift } => cosh_separatrix(n, k, x, shift),
        }
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let (n, k) = (self.n, self.k_infinity);
        match self.kind {
            ExactKind::Bubble { lambda } => bubble_second_derivative(n, k, lambda, x),
            ExactKind::ConstantCylinder => 0.0,
            ExactKind::CoshSeparatrix { shift } => separatrix_second_derivative(n, k, x, shift),
        }
    }

    /// Radial value and r-derivative at `r > 0`, pulling cylinder solutions
    /// back through `u = r^(−m) v(ln r)`.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        match self.coordinate() {
            Coordinate::Radial => self.value(r),
            Coordinate::Cylinder => {
                let m = self.n.m();
                let (v, dv) = self.value(r.ln());
                let u = v * r.powf(-m);
                (u, r.powf(-m - 1.0) * (dv - m * v))
            }
        }
    }

    /// ODE residual normalized by the sum of the magnitudes of its terms.
    pub fn residual(&self, x: f64) -> f64 {
        let (f, df) = self.value(x);
        let ddf = self.second_derivative(x);
        let nonlinear = self.k_infinity * self.n.nonlinearity(f);
        let (res, scale) = match self.coordinate() {
            Coordinate::Radial => {
                let first = if x > 0.0 {
                    (self.n.as_f64() - 1.0) * df / x
                } else {
                    // u′/r → u″(0) at the origin
                    (self.n.as_f64() - 1.0) * ddf
                };
                (ddf + first + nonlinear, ddf.abs() + first.abs() + nonlinear.abs())
            }
            Coordinate::Cylinder => {
                let m = self.n.m();
                let lin = m * m * f;
                (ddf - lin + nonlinear, ddf.abs() + lin.abs() + nonlinear.abs())
            }
        };
        if scale == 0.0 {
            0.0
        } else {
            res.abs() / scale
        }
    }

    /// Pohozaev number `P(u)`: zero for the bubble and separatrix,
    /// `−ω_n m² v_cyl²/n` for the constant cylinder.
    pub fn pohozaev_number(&self) -> f64 {
        match self.kind {
            ExactKind::ConstantCylinder => {
                let m = self.n.m();
                let v = constant_cylinder(self.n, self.k_infinity);
                -self.n.sphere_area() * m * m * v * v / self.n.as_f64()
            }
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn dim(n: u32) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn bubble_examples() {
        let (u, du) = bubble(dim(3), 3.0, 1.0, 0.0);
        assert_relative_eq!(u, 1.0, max_relative = 1e-15);
        assert_eq!(du, 0.0);
        let r = 1e5;
        let (u, _) = bubble(dim(4), 8.0, 1.0, r);
        assert_relative_eq!(u * r * r, 1.0, max_relative = 1e-9);
        for n in 3..=6 {
            assert_eq!(bubble(dim(n), 2.5, 0.7, 0.0).1, 0.0);
        }
    }

    #[test]
    fn constant_cylinder_examples() {
        assert_relative_eq!(constant_cylinder(dim(4), 1.0), 1.0);
        assert_relative_eq!(constant_cylinder(dim(3), 1.0), 0.25f64.powf(0.25), max_relative = 1e-15);
        assert_relative_eq!(constant_cylinder(dim(3), 1.0), (0.5f64).sqrt(), epsilon = 1e-12);
        assert_relative_eq!(constant_cylinder(dim(6), 4.0), 1.0);
    }

    #[test]
    fn separatrix_examples() {
        let (v, dv) = cosh_separatrix(dim(4), 8.0, 1.3, 1.3);
        assert_relative_eq!(v, 0.5, max_relative = 1e-15);
        assert_eq!(dv, 0.0);
        let (v, _) = cosh_separatrix(dim(3), 3.0, 0.0, 0.0);
        assert_relative_eq!(v, 0.25f64.powf(0.25), max_relative = 1e-15);
        // far tail ~ C 2^m e^{−m|σ|}
        let n = dim(5);
        let c = separatrix_amplitude(n, 2.0);
        let (v, _) = cosh_separatrix(n, 2.0, 30.0, 0.0);
        assert_relative_eq!(v, c * 2f64.powf(n.m()) * (-n.m() * 30.0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn residuals_vanish() {
        for n in 3..=6 {
            let d = dim(n);
            let sols = [
                ExactSolution::bubble(d, 2.0, 0.8).unwrap(),
                ExactSolution::constant_cylinder(d, 2.0).unwrap(),
                ExactSolution::cosh_separatrix(d, 2.0, -0.4).unwrap(),
            ];
            for sol in &sols {
                for i in 0..50 {
                    let x = match sol.coordinate() {
                        Coordinate::Radial => 1e-3 * 1.3f64.powi(i),
                        Coordinate::Cylinder => -10.0 + 0.4 * i as f64,
                    };
                    assert!(sol.residual(x) < 1e-13, "{:?} n={n} x={x}", sol.kind);
                }
            }
        }
    }

    #[test]
    fn bubble_maps_to_separatrix() {
        let n = dim(4);
        let lambda = 2.5;
        let bub = ExactSolution::bubble(n, 8.0, lambda).unwrap();
        let sep = ExactSolution::cosh_separatrix(n, 8.0, lambda.ln()).unwrap();
        for i in -40..=40 {
            let s = 0.25 * i as f64;
            let r = s.exp();
            let (u, du) = bub.value(r);
            let v = r.powf(n.m()) * u;
            let dv = r.powf(n.m()) * (n.m() * u + r * du);
            let (ve, dve) = sep.value(s);
            assert!((v - ve).abs() < 1e-12, "s={s}");
            assert!((dv - dve).abs() < 1e-12, "s={s}");
        }
    }

    #[test]
    fn constant_cylinder_pohozaev_n4() {
        let sol = ExactSolution::constant_cylinder(dim(4), 1.0).unwrap();
        assert_relative_eq!(sol.pohozaev_number(), -PI * PI / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn bubble_height_scale_roundtrip() {
        let n = dim(5);
        let lambda = bubble_scale_for_height(n, 3.0, 0.37);
        assert_relative_eq!(bubble(n, 3.0, lambda, 0.0).0, 0.37, max_relative = 1e-14);
    }
}
