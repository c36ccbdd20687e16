//! Parameter records for the scattering systems.

use crate::{Error, Result};

/// Two-level emitter symmetrically side-coupled to the waveguide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TleParams {
    /// Transition frequency.
    pub omega_e: f64,
    /// Total coupling rate into the guided modes (split equally R/L).
    pub gamma_wg: f64,
    /// Decay rate into non-guided modes.
    pub gamma_loss: f64,
}

impl TleParams {
    pub fn new(omega_e: f64, gamma_wg: f64, gamma_loss: f64) -> Result<Self> {
        let p = Self {
            omega_e,
            gamma_wg,
            gamma_loss,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn lossless(omega_e: f64, gamma_wg: f64) -> Result<Self> {
        Self::new(omega_e, gamma_wg, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.omega_e.is_finite() {
            return Err(Error::invalid("omega_e must be finite"));
        }
        if !(self.gamma_wg > 0.0 && self.gamma_wg.is_finite()) {
            return Err(Error::invalid(format!(
                "waveguide coupling Gamma must be positive, got {}",
                self.gamma_wg
            )));
        }
        if !(self.gamma_loss >= 0.0 && self.gamma_loss.is_finite()) {
            return Err(Error::invalid(format!(
                "dissipation gamma must be non-negative, got {}",
                self.gamma_loss
            )));
        }
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_loss == 0.0
    }
}

/// Cavity (coupled to the waveguide) containing a two-level emitter.
///
/// The emitter talks to the waveguide only through the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JcParams {
    pub omega_c: f64,
    pub omega_e: f64,
    /// Emitter-cavity coupling, real.
    pub g: f64,
    /// Cavity-waveguide coupling rate (split equally R/L).
    pub gamma_wg: f64,
    pub gamma_c: f64,
    pub gamma_e: f64,
}

impl JcParams {
    pub fn new(
        omega_c: f64,
        omega_e: f64,
        g: f64,
        gamma_wg: f64,
        gamma_c: f64,
        gamma_e: f64,
    ) -> Result<Self> {
        let p = Self {
            omega_c,
            omega_e,
            g,
            gamma_wg,
            gamma_c,
            gamma_e,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn lossless(omega_c: f64, omega_e: f64, g: f64, gamma_wg: f64) -> Result<Self> {
        Self::new(omega_c, omega_e, g, gamma_wg, 0.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_c.is_finite() && self.omega_e.is_finite()) {
            return Err(Error::invalid("JC frequencies must be finite"));
        }
        if !(self.gamma_wg > 0.0 && self.gamma_wg.is_finite()) {
            return Err(Error::invalid(format!(
                "waveguide coupling Gamma must be positive, got {}",
                self.gamma_wg
            )));
        }
        for (name, v) in [
            ("g", self.g),
            ("gamma_c", self.gamma_c),
            ("gamma_e", self.gamma_e),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn is_lossless(&self) -> bool {
        self.gamma_c == 0.0 && self.gamma_e == 0.0
    }
}
