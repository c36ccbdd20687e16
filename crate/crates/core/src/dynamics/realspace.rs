//! Position-space rendering of spectral envelopes.

use std::f64::consts::PI;

use crate::{Error, KGrid, Result, C64};

/// Propagation direction of the rendered field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `ψ(x) = (2π)^(-1/2) ∫ ξ(k) e^{ikx} dk`.
    Right,
    /// `ψ(x) = (2π)^(-1/2) ∫ ξ(k) e^{-ikx} dk`.
    Left,
}

/// Samples whose magnitude falls below this fraction of the peak do not
/// count towards the envelope's spectral support.
const SUPPORT_THRESHOLD: f64 = 1e-6;

/// Fourier transform of `xi_k` to the positions in `x_grid`.
///
/// The transform is exact for the trapezoid-sampled spectrum, which repeats
/// in `x` with period `2π/Δk`; a position window longer than that period is
/// rejected, as is an `x` spacing too coarse to resolve the envelope's
/// spectral support.
pub fn realspace_envelope(
    xi_k: &[C64],
    grid: &KGrid,
    x_grid: &[f64],
    direction: Direction,
) -> Result<Vec<C64>> {
    if xi_k.len() != grid.len() {
        return Err(Error::invalid(format!(
            "{} envelope samples for a grid of {} points",
            xi_k.len(),
            grid.len()
        )));
    }
    if x_grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("positions must be finite"));
    }
    let ks = grid.points();
    let w = grid.weights();

    if x_grid.len() > 1 {
        let lo = x_grid.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let period = 2.0 * PI / grid.spacing();
        if hi - lo >= period {
            return Err(Error::config(format!(
                "position window {} exceeds the alias period {period} of the frequency grid",
                hi - lo
            )));
        }
        let peak = xi_k.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if peak > 0.0 {
            let inside: Vec<usize> = (0..xi_k.len())
                .filter(|&i| xi_k[i].norm() > SUPPORT_THRESHOLD * peak)
                .collect();
            let band = ks[*inside.last().unwrap()] - ks[inside[0]];
            let dx = x_grid
                .windows(2)
                .map(|p| (p[1] - p[0]).abs())
                .fold(0.0, f64::max);
            if band > 0.0 && dx > 2.0 * PI / band {
                return Err(Error::config(format!(
                    "position spacing {dx} cannot resolve a spectral band of {band} (need <= {})",
                    2.0 * PI / band
                )));
            }
        }
    }

    let sign = match direction {
        Direction::Right => 1.0,
        Direction::Left => -1.0,
    };
    let norm = 1.0 / (2.0 * PI).sqrt();
    let weighted: Vec<C64> = xi_k.iter().zip(&w).map(|(z, w)| z * w).collect();
    Ok(x_grid
        .iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for (z, k) in weighted.iter().zip(&ks) {
                let (s, c) = (sign * k * x).sin_cos();
                acc += z * C64::new(c, s);
            }
            acc * norm
        })
        .collect())
}
