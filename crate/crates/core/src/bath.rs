//! Bath spectral response: a Lorentzian coupling spectrum centered at
//! `omega0` with width `1/tc` (the inverse memory time), extended to finite
//! temperature by detailed-balance (KMS) Bose weighting.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Bath parameters. `beta` may be `f64::INFINITY` for a zero-temperature
/// (vacuum) bath. Natural units, ħ = k_B = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    /// Coupling strength; enters the response as the prefactor η².
    pub eta: f64,
    /// Lorentzian center frequency.
    pub omega0: f64,
    /// Bath memory (correlation) time; the Lorentzian width is 1/tc.
    pub tc: f64,
    /// Inverse temperature.
    pub beta: f64,
}

/// Frequency-integration support controls. The Lorentzian tail is truncated
/// at `widths` half-widths from the center; at finite temperature an
/// infrared window of `ir_widths` half-widths around ω = 0 is excluded,
/// where the Bose factor diverges against the non-vanishing Lorentzian tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralTruncation {
    pub widths: f64,
    pub ir_widths: f64,
}

impl Default for SpectralTruncation {
    fn default() -> Self {
        SpectralTruncation {
            widths: 40.0,
            ir_widths: 0.5,
        }
    }
}

impl BathSpec {
    pub fn new(eta: f64, omega0: f64, tc: f64, beta: f64) -> Result<Self> {
        let spec = BathSpec {
            eta,
            omega0,
            tc,
            beta,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(Error::invalid("bath", format!("eta = {} must be ≥ 0", self.eta)));
        }
        if !(self.tc > 0.0 && self.tc.is_finite()) {
            return Err(Error::invalid("bath", format!("tc = {} must be > 0", self.tc)));
        }
        if !(self.omega0 > 0.0 && self.omega0.is_finite()) {
            return Err(Error::invalid(
                "bath",
                format!("omega0 = {} must be > 0", self.omega0),
            ));
        }
        if !(self.beta > 0.0) {
            return Err(Error::invalid(
                "bath",
                format!("beta = {} must be > 0 (or +inf)", self.beta),
            ));
        }
        Ok(())
    }

    /// Lorentzian half-width 1/tc.
    pub fn width(&self) -> f64 {
        1.0 / self.tc
    }

    pub fn temperature(&self) -> f64 {
        if self.beta.is_infinite() {
            0.0
        } else {
            1.0 / self.beta
        }
    }

    /// Zero-temperature response
    /// G_0(ω) = η² (1/tc) / ((ω − ω_0)² + (1/tc)²) for ω ≥ 0, else 0.
    pub fn response_zero_t(&self, omega: f64) -> f64 {
        if omega < 0.0 {
            return 0.0;
        }
        let g = self.width();
        self.eta * self.eta * g / ((omega - self.omega0).powi(2) + g * g)
    }

    /// Finite-temperature response satisfying the KMS symmetry
    /// G_T(−ω) = e^{−βω} G_T(ω):
    /// G_T(ω) = (1 + n(ω)) G_0(ω) + n(−ω) G_0(−ω), n(ω) = 1/(e^{βω} − 1).
    ///
    /// Reduces to `response_zero_t` at β = ∞. At ω = 0 with finite β the
    /// limit exists only when G_0(0⁺) = 0; otherwise the evaluation is
    /// rejected.
    pub fn response_finite_t(&self, omega: f64) -> Result<f64> {
        if self.beta.is_infinite() {
            return Ok(self.response_zero_t(omega));
        }
        if omega == 0.0 {
            let g0_at_zero = self.response_zero_t(0.0);
            if g0_at_zero > 0.0 {
                return Err(Error::Numerical(format!(
                    "G_T(0) diverges: G_0(0) = {g0_at_zero:e} > 0 meets the Bose 1/ω singularity"
                )));
            }
            // G_T(ω→0) = G_0(0)/(βω) + G_0'(0)/β + G_0(0)/2; with G_0(0) = 0
            // only the derivative term survives.
            let h = 1e-7 * self.omega0;
            let dg = (self.response_zero_t(h) - g0_at_zero) / h;
            return Ok(dg / self.beta);
        }
        let n_abs = 1.0 / (self.beta * omega.abs()).exp_m1();
        if omega > 0.0 {
            Ok((1.0 + n_abs) * self.response_zero_t(omega))
        } else {
            Ok(n_abs * self.response_zero_t(-omega))
        }
    }

    /// Instantaneous golden-rule rate at (possibly negative) frequency ω.
    /// Positive ω gives emission-type rates, negative absorption-type.
    pub fn golden_rule_rate(&self, omega: f64) -> f64 {
        self.response_finite_t(omega).unwrap_or(f64::INFINITY)
    }

    /// Frequency-integration support intervals for overlap integrals against
    /// this bath's response, per the given truncation. Ordered, disjoint.
    pub fn support(&self, trunc: &SpectralTruncation) -> Vec<(f64, f64)> {
        let w = self.width();
        let hi = self.omega0 + trunc.widths * w;
        let lo = (self.omega0 - trunc.widths * w).max(0.0);
        let mut out = Vec::with_capacity(2);
        if self.beta.is_finite() {
            let ir = trunc.ir_widths * w;
            // mirrored absorption lobe at negative frequencies
            out.push((-hi, -lo.max(ir)));
            out.push((lo.max(ir), hi));
            out.retain(|&(a, b)| b > a);
        } else {
            out.push((lo, hi));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1_bath(beta: f64) -> BathSpec {
        BathSpec::new(1.0, 10.0 / 7.0, 10.0, beta).unwrap()
    }

    #[test]
    fn lorentzian_peak_value() {
        let b = BathSpec::new(1.0, 1.0, 10.0, f64::INFINITY).unwrap();
        assert!((b.response_zero_t(1.0) - 10.0).abs() < 1e-14);
    }

    #[test]
    fn negative_frequency_vanishes_at_zero_t() {
        let b = fig1_bath(f64::INFINITY);
        assert_eq!(b.response_zero_t(-1.0), 0.0);
    }

    #[test]
    fn pinned_zero_t_value() {
        // direct evaluation of the Lorentzian, pinned from an independent
        // script: η=1, ω0=10/7, tc=10, ω=1
        let b = fig1_bath(f64::INFINITY);
        assert!((b.response_zero_t(1.0) - 0.5163329820864067).abs() < 1e-15);
    }

    #[test]
    fn pinned_finite_t_values() {
        // pinned from an independent evaluation of the KMS construction at
        // β = 3.74
        let b = fig1_bath(3.74);
        assert!((b.response_finite_t(1.0).unwrap() - 0.5288964427328634).abs() < 1e-14);
        assert!((b.response_finite_t(-1.0).unwrap() - 0.012563460646456784).abs() < 1e-16);
    }

    #[test]
    fn kms_symmetry_example() {
        let b = fig1_bath(3.74);
        let ratio = b.response_finite_t(-0.5).unwrap() / b.response_finite_t(0.5).unwrap();
        assert!((ratio - (-3.74f64 * 0.5).exp()).abs() < 1e-14);
    }

    #[test]
    fn zero_frequency_divergence_is_rejected() {
        let b = fig1_bath(3.74);
        assert!(b.response_finite_t(0.0).is_err());
        assert!(fig1_bath(f64::INFINITY).response_finite_t(0.0).is_ok());
    }

    #[test]
    fn support_shape() {
        let b = fig1_bath(3.74);
        let tr = SpectralTruncation::default();
        let s = b.support(&tr);
        assert_eq!(s.len(), 2);
        let hi = 10.0 / 7.0 + 4.0;
        assert!((s[1].1 - hi).abs() < 1e-12);
        assert!((s[1].0 - 0.05).abs() < 1e-12); // IR window: 0.5 widths
        assert!((s[0].0 + hi).abs() < 1e-12);
        let s0 = fig1_bath(f64::INFINITY).support(&tr);
        assert_eq!(s0.len(), 1);
        assert_eq!(s0[0].0, 0.0);
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(BathSpec::new(-0.1, 1.0, 10.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, 1.0, -10.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, 0.0, 10.0, 1.0).is_err());
        assert!(BathSpec::new(1.0, 1.0, 10.0, -2.0).is_err());
    }

    proptest! {
        #[test]
        fn kms_holds_everywhere(omega in 1e-3f64..6.0, beta in 0.05f64..20.0) {
            let b = BathSpec::new(0.7, 10.0/7.0, 10.0, beta).unwrap();
            let plus = b.response_finite_t(omega).unwrap();
            let minus = b.response_finite_t(-omega).unwrap();
            let want = (-beta * omega).exp() * plus;
            prop_assert!((minus - want).abs() <= 1e-12 * want.abs().max(1e-300));
        }

        #[test]
        fn response_is_nonnegative(omega in -8.0f64..8.0, beta in 0.05f64..20.0) {
            let b = BathSpec::new(0.7, 10.0/7.0, 10.0, beta).unwrap();
            if omega != 0.0 {
                prop_assert!(b.response_finite_t(omega).unwrap() >= 0.0);
            }
        }

        #[test]
        fn zero_t_limit(omega in 1e-3f64..6.0) {
            // monotone approach to G_0 for ω > 0 as β grows
            let b = BathSpec::new(0.7, 10.0/7.0, 10.0, f64::INFINITY).unwrap();
            let g0 = b.response_zero_t(omega);
            let mut prev = f64::INFINITY;
            for beta in [2.0, 8.0, 32.0, 128.0] {
                let bt = BathSpec::new(0.7, 10.0/7.0, 10.0, beta).unwrap();
                let g = bt.response_finite_t(omega).unwrap();
                prop_assert!(g <= prev + 1e-15);
                prev = g;
            }
            prop_assert!((prev - g0).abs() <= 1e-6 * g0.max(1e-12) + 1e-12);
        }
    }
}
