//! Thresholds used by the classifiers and checks, kept in one record that is
//! serialized with every report.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Calibration {
    /// Number of final decades that form the tail window.
    pub tail_decades: f64,
    pub min_tail_samples: usize,
    /// Relative half-width of the Fast and Slow bands around `n−2` and `(n−2)/2`.
    pub class_band: f64,
    /// Allowed relative spread of per-decade exponent fits.
    pub kappa_stability: f64,
    /// Tail fits with larger rms (in ln u) are Undetermined.
    pub max_fit_rms: f64,
    /// Ratio of successive decade increments below which a growth integral converges.
    pub finite_ratio: f64,
    /// Ratio above which it grows polynomially.
    pub poly_ratio: f64,
    /// Total variation threshold of the Pohozaev tail, relative to `1 + |mean|`.
    pub limit_variation: f64,
    /// Log-slope above which `|P(u, r)|` counts as diverging.
    pub limit_log_slope: f64,
    pub min_limit_samples: usize,
    pub identity_floor: f64,
    /// `identity_tol = max(identity_floor, identity_factor·rel_tol)`.
    pub identity_factor: f64,
    pub harnack_stability: f64,
    /// Largest admissible `c₂/c₁` for the two-sided fast decay bound.
    pub bounds_ratio: f64,
    pub c0_agreement: f64,
    /// Tail level of `ω_n v′²` below which the vanishing-energy premise is met.
    pub theorem_d_threshold: f64,
    /// Tail min of `r^m u` must exceed this fraction of the tail max.
    pub lower_bound_floor: f64,
    pub omega_fd_tol: f64,
    /// Relative level below which `v′` is treated as zero when scanning extrema.
    pub flat_threshold: f64,
    /// Exponent `m > 1` used when testing `r K′ ∈ L^m`.
    pub integrability_exponent: f64,
    /// `ε` in the `|K′| ≤ C / (r (ln r)^(1+ε))` test.
    pub log_decay_epsilon: f64,
    /// `|P(u, r)|` counts as bounded away from zero above this multiple of its uncertainty.
    pub nonzero_margin: f64,
    /// Largest relative gap between `v` near a tail maximum and the cosh profile.
    pub cosh_profile_tol: f64,
}

impl Default for Calibration {
    fn default() -> Self {
        Calibration {
            tail_decades: 2.0,
            min_tail_samples: 32,
            class_band: 0.10,
            kappa_stability: 0.05,
            max_fit_rms: 0.25,
            finite_ratio: 0.5,
            poly_ratio: 2.0,
            limit_variation: 1e-3,
            limit_log_slope: 0.05,
            min_limit_samples: 16,
            identity_floor: 1e-6,
            identity_factor: 100.0,
            harnack_stability: 0.05,
            bounds_ratio: 1.05,
            c0_agreement: 1e-3,
            theorem_d_threshold: 1e-8,
            lower_bound_floor: 1e-3,
            omega_fd_tol: 1e-5,
            flat_threshold: 1e-10,
            integrability_exponent: 2.0,
            log_decay_epsilon: 0.1,
            nonzero_margin: 10.0,
            cosh_profile_tol: 1e-2,
        }
    }
}

impl Calibration {
    pub fn identity_tol(&self, rel_tol: f64) -> f64 {
        self.identity_floor.max(self.identity_factor * rel_tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override() {
        let c: Calibration = serde_json::from_str(r#"{"class_band":0.2}"#).unwrap();
        assert_eq!(c.class_band, 0.2);
        assert_eq!(c.min_tail_samples, 32);
        assert!(serde_json::from_str::<Calibration>(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn identity_tolerance() {
        let c = Calibration::default();
        assert_eq!(c.identity_tol(1e-10), 1e-6);
        assert!((c.identity_tol(1e-6) - 1e-4).abs() < 1e-18);
    }
}
