//! Gaussian single-photon spectral envelopes.

use std::f64::consts::PI;

use crate::{grid::norm_sqr, Error, KGrid, Result, C64};

/// `ξ(k) = (2πσ²)^(-1/4) exp(-((k - k_c)/(2σ))²) exp(-i t_i (k - k_c))`.
///
/// `sigma` is the standard deviation of `|ξ(k)|²`. The phase factor places
/// a right-moving wavepacket at position `x = t_i` at time zero, so a
/// negative `t_i` starts the photon to the left of the scatterer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub k_c: f64,
    pub sigma: f64,
    pub t_i: f64,
}

impl GaussianEnvelope {
    pub fn new(k_c: f64, sigma: f64, t_i: f64) -> Result<Self> {
        let env = Self { k_c, sigma, t_i };
        env.validate()?;
        Ok(env)
    }

    /// Envelope whose spatial centre starts at `x = -5/σ`, far enough from
    /// the origin that its overlap with the scatterer is negligible.
    pub fn far_left(k_c: f64, sigma: f64) -> Result<Self> {
        Self::new(k_c, sigma, -5.0 / sigma)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(Error::invalid(format!(
                "envelope width must be positive, got sigma = {}",
                self.sigma
            )));
        }
        if !(self.k_c.is_finite() && self.t_i.is_finite()) {
            return Err(Error::invalid(
                "envelope centre and initial time must be finite",
            ));
        }
        Ok(())
    }

    /// Evaluates the envelope without re-validating; `sigma > 0` is assumed.
    pub fn value(&self, k: f64) -> C64 {
        let d = k - self.k_c;
        let amp = (2.0 * PI * self.sigma * self.sigma).powf(-0.25)
            * (-(d / (2.0 * self.sigma)).powi(2)).exp();
        C64::from_polar(amp, -self.t_i * d)
    }

    pub fn sample(&self, grid: &KGrid) -> Vec<C64> {
        grid.points().into_iter().map(|k| self.value(k)).collect()
    }

    /// Discrete norm `∫|ξ|² dk` on `grid`.
    pub fn norm_on(&self, grid: &KGrid) -> f64 {
        norm_sqr(&self.sample(grid), grid)
    }
}

/// Checked envelope evaluation.
pub fn envelope_eval(env: &GaussianEnvelope, k: f64) -> Result<C64> {
    env.validate()?;
    Ok(env.value(k))
}
