//! Few-photon transport in a waveguide containing a partially transmitting
//! element (PTE) coupled to a two-level emitter, a bare cavity or a
//! Jaynes-Cummings system.
//!
//! Units are `hbar = v_g = 1` throughout, so frequencies, wavenumbers and
//! energies share one unit and times are measured in its inverse.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`], [`envelope`], [`params`]: frequency grids, trapezoidal
//!   quadrature, Gaussian spectral envelopes and system parameter records.
//! * [`pte`]: the flat-response scattering matrix of the PTE and the
//!   effective complex coupling rate it induces.
//! * [`dynamics`]: exact single-excitation time evolution for the emitter
//!   plus an independent discretised ODE integrator.
//! * [`smatrix`]: input-output matrices, single-photon transmission and
//!   reflection, and the two-photon bound-state kernels.
//! * [`twophoton`]: two-photon wavepacket scattering and the
//!   Hong-Ou-Mandel switch analysis.
//!
//! No formula in this crate involves a complex square root or logarithm, so
//! there are no branch-cut conventions to keep track of.

pub mod dynamics;
pub mod envelope;
pub mod error;
pub mod grid;
pub mod params;
pub mod pte;
pub mod smatrix;
pub mod twophoton;

pub use num_complex::Complex64 as C64;

pub use envelope::GaussianEnvelope;
pub use error::{Error, Result};
pub use grid::{quad_1d, quad_samples, KGrid};
pub use params::{JcParams, TleParams};
pub use pte::{effective_rate, effective_resonance, pte_matrix, PteParams, PteScatter};

/// Returns an error naming `what` if `z` has a NaN or infinite component.
pub(crate) fn check_finite(z: C64, what: &str) -> Result<C64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NumericDomain(format!("{what} is not finite: {z}")))
    }
}
