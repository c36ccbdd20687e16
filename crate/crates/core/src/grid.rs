//! Uniform frequency grids and composite quadrature.
//!
//! Every continuum integral `∫ dk` in the crate is evaluated with the
//! composite trapezoid rule on a [`KGrid`]. All integrands met in practice
//! (Gaussians, Lorentzians, their products) are smooth and analytic near the
//! real axis, for which the trapezoid rule converges geometrically.

use crate::{Error, Result, C64};

/// `n` uniformly spaced frequencies covering `[k_min, k_max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KGrid {
    k_min: f64,
    k_max: f64,
    n: usize,
}

impl KGrid {
    pub fn new(k_min: f64, k_max: f64, n: usize) -> Result<Self> {
        if !(k_min.is_finite() && k_max.is_finite()) {
            return Err(Error::invalid(format!(
                "grid bounds must be finite, got [{k_min}, {k_max}]"
            )));
        }
        if k_min >= k_max {
            return Err(Error::invalid(format!(
                "grid needs k_min < k_max, got [{k_min}, {k_max}]"
            )));
        }
        if n < 2 {
            return Err(Error::invalid(format!(
                "grid needs at least 2 points, got {n}"
            )));
        }
        Ok(Self { k_min, k_max, n })
    }

    /// Grid of `n` points spanning `center ± half_span`.
    pub fn centered(center: f64, half_span: f64, n: usize) -> Result<Self> {
        Self::new(center - half_span, center + half_span, n)
    }

    /// Default grid: `center ± 20 gamma_scale` with 2049 points.
    pub fn default_around(center: f64, gamma_scale: f64) -> Result<Self> {
        Self::centered(center, 20.0 * gamma_scale, 2049)
    }

    /// Grid centred on `center` with at most `max_spacing` between nodes.
    /// The point count is rounded up to the next odd number so the centre
    /// is always a node.
    pub fn with_spacing(center: f64, half_span: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(Error::invalid(format!(
                "spacing must be positive, got {max_spacing}"
            )));
        }
        let intervals = (2.0 * half_span / max_spacing).ceil() as usize;
        let intervals = intervals.max(2) + intervals % 2;
        Self::centered(center, half_span, intervals + 1)
    }

    pub fn k_min(&self) -> f64 {
        self.k_min
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.k_min + self.k_max)
    }

    pub fn half_span(&self) -> f64 {
        0.5 * (self.k_max - self.k_min)
    }

    pub fn spacing(&self) -> f64 {
        (self.k_max - self.k_min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.n {
            self.k_max
        } else {
            self.k_min + i as f64 * self.spacing()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    /// Trapezoid weights: `Δk` in the interior and `Δk/2` at both ends.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.n];
        w[0] = 0.5 * h;
        w[self.n - 1] = 0.5 * h;
        w
    }

    /// Same grid with the spacing halved (`2n - 1` points).
    pub fn refined(&self) -> Self {
        Self {
            n: 2 * self.n - 1,
            ..*self
        }
    }

    /// Same spacing around the same centre, twice the span.
    pub fn widened(&self) -> Self {
        let c = self.center();
        let hs = 2.0 * self.half_span();
        Self {
            k_min: c - hs,
            k_max: c + hs,
            n: 2 * self.n - 1,
        }
    }
}

/// Trapezoidal approximation of `∫ f dk` over the grid.
///
/// Fails with [`Error::NumericDomain`] naming the first node where `f` is
/// not finite.
pub fn quad_1d<F>(f: F, grid: &KGrid) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    let h = grid.spacing();
    let last = grid.len() - 1;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..grid.len() {
        let k = grid.point(i);
        let v = f(k);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NumericDomain(format!(
                "integrand is {v} at node {i} (k = {k})"
            )));
        }
        let w = if i == 0 || i == last { 0.5 * h } else { h };
        acc += v * w;
    }
    Ok(acc)
}

/// Trapezoidal integral of pre-sampled values on `grid`.
pub fn quad_samples(samples: &[C64], grid: &KGrid) -> Result<C64> {
    if samples.len() != grid.len() {
        return Err(Error::invalid(format!(
            "{} samples for a grid of {} points",
            samples.len(),
            grid.len()
        )));
    }
    let h = grid.spacing();
    let last = samples.len() - 1;
    let mut acc = C64::new(0.0, 0.0);
    for (i, v) in samples.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NumericDomain(format!(
                "sample {i} (k = {}) is {v}",
                grid.point(i)
            )));
        }
        let w = if i == 0 || i == last { 0.5 * h } else { h };
        acc += v * w;
    }
    Ok(acc)
}

/// `∫ |ξ|² dk` for samples on `grid`.
pub fn norm_sqr(samples: &[C64], grid: &KGrid) -> f64 {
    let h = grid.spacing();
    let last = samples.len().saturating_sub(1);
    samples
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = if i == 0 || i == last { 0.5 * h } else { h };
            w * v.norm_sqr()
        })
        .sum()
}

/// Composite Simpson rule for uniformly spaced samples; an even number of
/// intervals is required.
pub fn simpson(samples: &[C64], h: f64) -> Result<C64> {
    let n = samples.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::invalid(format!(
            "Simpson rule needs an odd number (>= 3) of samples, got {n}"
        )));
    }
    let mut acc = samples[0] + samples[n - 1];
    for (i, v) in samples.iter().enumerate().take(n - 1).skip(1) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(acc * (h / 3.0))
}
