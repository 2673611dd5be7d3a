//! Space dimension and the exponents it fixes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Space dimension `n ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct Dimension(u32);

impl TryFrom<u32> for Dimension {
    type Error = Error;

    fn try_from(n: u32) -> Result<Self> {
        Dimension::new(n)
    }
}

impl From<Dimension> for u32 {
    fn from(d: Dimension) -> u32 {
        d.0
    }
}

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument("n must be ≥ 3".into()));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// `m = (n − 2)/2`, the cylinder decay rate.
    pub fn m(self) -> f64 {
        (self.as_f64() - 2.0) / 2.0
    }

    /// Critical exponent `p = (n + 2)/(n − 2)`.
    pub fn critical_exponent(self) -> f64 {
        (self.as_f64() + 2.0) / (self.as_f64() - 2.0)
    }

    /// Volume exponent `q = 2n/(n − 2) = p + 1`.
    pub fn volume_exponent(self) -> f64 {
        2.0 * self.as_f64() / (self.as_f64() - 2.0)
    }

    /// Conformal length exponent `2/(n − 2)`.
    pub fn length_exponent(self) -> f64 {
        2.0 / (self.as_f64() - 2.0)
    }

    /// `(n − 2)/(2n)`, the coefficient of the curvature terms in the Pohozaev functional.
    pub fn pohozaev_coefficient(self) -> f64 {
        (self.as_f64() - 2.0) / (2.0 * self.as_f64())
    }

    /// Odd extension `|v|^(p−1) v` of the nonlinearity, so the right-hand side
    /// stays defined for a step that overshoots a zero crossing.
    pub fn nonlinearity(self, v: f64) -> f64 {
        match self.0 {
            3 => v.powi(5),
            4 => v.powi(3),
            6 => v * v.abs(),
            _ => v.abs().powf(self.critical_exponent() - 1.0) * v,
        }
    }

    /// `|v|^q`.
    pub fn volume_power(self, v: f64) -> f64 {
        match self.0 {
            3 => v.powi(6),
            4 => v.powi(4),
            6 => v.abs().powi(3),
            _ => v.abs().powf(self.volume_exponent()),
        }
    }

    /// `|v|^p`.
    pub fn critical_power(self, v: f64) -> f64 {
        self.nonlinearity(v).abs()
    }

    /// `ω_n`, the area of the unit sphere `S^(n−1)`: `2π^(n/2)/Γ(n/2)`.
    pub fn sphere_area(self) -> f64 {
        2.0 * PI.powf(self.as_f64() / 2.0) / gamma_half(self.0)
    }

    /// Constant cylinder value `(m²/K)^((n−2)/4)` for curvature `k`.
    pub fn cylinder_level(self, k: f64) -> f64 {
        let m = self.m();
        (m * m / k).powf((self.as_f64() - 2.0) / 4.0)
    }
}

/// `Γ(j/2)` for a positive integer `j`, by the recursion `Γ(x + 1) = xΓ(x)`
/// from `Γ(1) = 1` and `Γ(1/2) = √π`.
pub(crate) fn gamma_half(j: u32) -> f64 {
    assert!(j > 0, "Γ(0) is undefined");
    let (mut x, mut g) = if j.is_multiple_of(2) { (1.0, 1.0) } else { (0.5, PI.sqrt()) };
    let target = j as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}
