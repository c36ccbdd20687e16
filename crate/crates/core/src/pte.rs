//! The partially transmitting element (PTE).
//!
//! A frequency-flat local scatterer of real strength `V` coupling the right-
//! and left-moving channels. It has its own scattering coefficients
//! `t_B, r_B` and, next to an emitter, renormalises the emitter-waveguide
//! coupling to the complex rate `Γ̃ = Γ / (1 + iV/2)`.

use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PteParams {
    pub v: f64,
}

impl PteParams {
    pub fn new(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::invalid(format!(
                "PTE strength must be finite, got {v}"
            )));
        }
        Ok(Self { v })
    }

    /// No PTE: an unblocked waveguide.
    pub fn none() -> Self {
        Self { v: 0.0 }
    }

    /// `V = 2/(1+√2)`, for which `|t_B|² = |r_B|² = 1/2`.
    pub fn balanced() -> Self {
        Self {
            v: 2.0 / (1.0 + std::f64::consts::SQRT_2),
        }
    }

    /// `V = 2`: the waveguide is fully blocked away from resonance.
    pub fn blocking() -> Self {
        Self { v: 2.0 }
    }

    /// Inside `[0, 2]`, where `|t_B|²` decreases monotonically from 1 to 0.
    /// Values outside are still valid input; callers may surface this as a
    /// warning.
    pub fn in_canonical_range(&self) -> bool {
        (0.0..=2.0).contains(&self.v)
    }

    fn half(&self) -> f64 {
        0.5 * self.v
    }

    /// `1 + (V/2)²`, the factor by which the PTE stretches the emitter
    /// lifetime.
    pub fn lifetime_factor(&self) -> f64 {
        1.0 + self.half() * self.half()
    }

    /// `1 / (1 + iV/2)`.
    pub fn coupling_factor(&self) -> C64 {
        C64::new(1.0, self.half()).inv()
    }
}

/// Transmission and reflection amplitudes of the bare PTE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PteScatter {
    pub t_b: C64,
    pub r_b: C64,
}

impl PteScatter {
    pub fn transmittance(&self) -> f64 {
        self.t_b.norm_sqr()
    }

    pub fn reflectance(&self) -> f64 {
        self.r_b.norm_sqr()
    }
}

pub fn pte_matrix(p: &PteParams) -> PteScatter {
    let h = p.half();
    let d = 1.0 + h * h;
    PteScatter {
        t_b: C64::new((1.0 - h * h) / d, 0.0),
        r_b: C64::new(0.0, -p.v / d),
    }
}

fn check_rate(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "coupling rate must be positive, got {gamma}"
        )))
    }
}

/// `Γ̃ = Γ / (1 + iV/2)`.
pub fn effective_rate(gamma: f64, p: &PteParams) -> Result<C64> {
    check_rate(gamma)?;
    Ok(p.coupling_factor() * gamma)
}

/// Effective emitter resonance `ω̃_e = ω_e + Im{Γ̃}/2`.
pub fn effective_resonance(omega_e: f64, gamma: f64, p: &PteParams) -> Result<f64> {
    Ok(omega_e + 0.5 * effective_rate(gamma, p)?.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::SQRT_2;

    #[test]
    fn unblocked_is_identity() {
        let s = pte_matrix(&PteParams::none());
        assert_eq!(s.t_b, C64::new(1.0, 0.0));
        assert_eq!(s.r_b, C64::new(0.0, 0.0));
    }

    #[test]
    fn blocking_reflects_with_minus_i() {
        let s = pte_matrix(&PteParams::blocking());
        assert_abs_diff_eq!(s.t_b.norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((s.r_b - C64::new(0.0, -1.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn balanced_splits_evenly() {
        let s = pte_matrix(&PteParams::balanced());
        assert_abs_diff_eq!(s.transmittance(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(s.reflectance(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_non_finite_strength() {
        assert!(PteParams::new(f64::NAN).is_err());
        assert!(PteParams::new(f64::INFINITY).is_err());
        assert!(!PteParams::new(2.5).unwrap().in_canonical_range());
        assert!(!PteParams::new(-0.1).unwrap().in_canonical_range());
        assert!(PteParams::new(2.0).unwrap().in_canonical_range());
    }

    #[test]
    fn effective_rate_values() {
        let g0 = effective_rate(1.0, &PteParams::none()).unwrap();
        assert_eq!(g0, C64::new(1.0, 0.0));
        let g2 = effective_rate(1.0, &PteParams::blocking()).unwrap();
        assert_abs_diff_eq!((g2 - C64::new(0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
        let gb = effective_rate(1.0, &PteParams::balanced()).unwrap();
        assert_abs_diff_eq!(gb.re, 1.0 / (4.0 - 2.0 * SQRT_2), epsilon = 1e-14);
        assert_abs_diff_eq!(gb.re, 0.85355, epsilon = 1e-5);
        assert!(effective_rate(0.0, &PteParams::none()).is_err());
        assert!(effective_rate(-1.0, &PteParams::none()).is_err());
    }

    #[test]
    fn effective_resonance_values() {
        assert_eq!(
            effective_resonance(0.7, 1.0, &PteParams::none()).unwrap(),
            0.7
        );
        assert_abs_diff_eq!(
            effective_resonance(0.0, 1.0, &PteParams::blocking()).unwrap(),
            -0.25,
            epsilon = 1e-15
        );
        let expect = -(SQRT_2 - 1.0) / (2.0 * (4.0 - 2.0 * SQRT_2));
        let got = effective_resonance(0.0, 1.0, &PteParams::balanced()).unwrap();
        assert_abs_diff_eq!(got, expect, epsilon = 1e-14);
        assert_abs_diff_eq!(got, -0.17678, epsilon = 1e-5);
        assert!(effective_resonance(0.0, 0.0, &PteParams::none()).is_err());
    }

    #[test]
    fn transmittance_decreases_on_canonical_interval() {
        let mut prev = f64::INFINITY;
        for i in 0..=1000 {
            let v = 2.0 * i as f64 / 1000.0;
            let t = pte_matrix(&PteParams::new(v).unwrap()).transmittance();
            assert!(t < prev);
            prev = t;
        }
        assert_abs_diff_eq!(prev, 0.0, epsilon = 1e-15);
    }

    proptest! {
        #[test]
        fn flat_response_is_unitary(v in -50.0..50.0f64) {
            let s = pte_matrix(&PteParams::new(v).unwrap());
            prop_assert!((s.transmittance() + s.reflectance() - 1.0).abs() < 1e-12);
            // the symmetric 2x2 matrix is unitary only if t r* + r t* = 0
            prop_assert!((s.t_b * s.r_b.conj() + s.r_b * s.t_b.conj()).norm() < 1e-12);
        }

        #[test]
        fn redshift_and_lifetime(v in 0.0..20.0f64, gamma in 0.1..10.0f64) {
            let p = PteParams::new(v).unwrap();
            let g = effective_rate(gamma, &p).unwrap();
            prop_assert!(g.im <= 0.0);
            prop_assert!((gamma / g.re - p.lifetime_factor()).abs() < 1e-12 * p.lifetime_factor());
            let expect = -(gamma / 2.0) * (v / 2.0) / p.lifetime_factor();
            prop_assert!((effective_resonance(0.0, gamma, &p).unwrap() - expect).abs() < 1e-12);
        }
    }
}
