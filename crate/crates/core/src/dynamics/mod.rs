//! Single-excitation dynamics of a two-level emitter next to a PTE.
//!
//! The state is `χ(t) σ₊|0⟩ + Σ_μ ∫dk ξ_μ(t,k) b†_μ(k)|0⟩` with `μ ∈ {R, L}`.
//! Two independent routes evolve it:
//!
//! * [`analytic`]: closed-form emitter amplitude and formal time integrals
//!   for the photon envelopes (lossless only).
//! * [`oracle`]: fourth-order Runge-Kutta integration of the coupled
//!   equations on a discretised frequency grid (optionally lossy).
//!
//! [`realspace`] renders spectral envelopes as position-space fields.

pub mod analytic;
pub mod oracle;
pub mod realspace;

pub use analytic::{chi_analytic, envelope_analytic, AnalyticEvolution, DEFAULT_CACHE_SPACING};
pub use oracle::{ode_oracle, OdeOracle, OdeRun, OdeSample};
pub use realspace::{realspace_envelope, Direction};

use crate::{grid::norm_sqr, Error, GaussianEnvelope, KGrid, PteParams, Result, TleParams, C64};

/// Emitter amplitude plus right/left envelopes sampled on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleExcitationState {
    pub chi: C64,
    pub xi_r: Vec<C64>,
    pub xi_l: Vec<C64>,
    pub grid: KGrid,
    pub t: f64,
}

impl SingleExcitationState {
    pub fn new(chi: C64, xi_r: Vec<C64>, xi_l: Vec<C64>, grid: KGrid, t: f64) -> Result<Self> {
        if xi_r.len() != grid.len() || xi_l.len() != grid.len() {
            return Err(Error::invalid(format!(
                "envelopes have {} and {} samples for a grid of {}",
                xi_r.len(),
                xi_l.len(),
                grid.len()
            )));
        }
        crate::check_finite(chi, "emitter amplitude")?;
        if let Some(i) = xi_r
            .iter()
            .chain(&xi_l)
            .position(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::NumericDomain(format!(
                "envelope sample {i} is not finite"
            )));
        }
        if !t.is_finite() {
            return Err(Error::invalid("state time must be finite"));
        }
        Ok(Self {
            chi,
            xi_r,
            xi_l,
            grid,
            t,
        })
    }

    /// Excited emitter, empty waveguide.
    pub fn excited_emitter(grid: KGrid, t: f64) -> Self {
        let zeros = vec![C64::new(0.0, 0.0); grid.len()];
        Self {
            chi: C64::new(1.0, 0.0),
            xi_r: zeros.clone(),
            xi_l: zeros,
            grid,
            t,
        }
    }

    /// Ground-state emitter and a right-moving photon with the given
    /// envelope, at the envelope's initial time.
    pub fn right_moving(env: &GaussianEnvelope, grid: KGrid) -> Result<Self> {
        env.validate()?;
        Ok(Self {
            chi: C64::new(0.0, 0.0),
            xi_r: env.sample(&grid),
            xi_l: vec![C64::new(0.0, 0.0); grid.len()],
            grid,
            t: env.t_i,
        })
    }

    pub fn p_emitter(&self) -> f64 {
        self.chi.norm_sqr()
    }

    pub fn p_right(&self) -> f64 {
        norm_sqr(&self.xi_r, &self.grid)
    }

    pub fn p_left(&self) -> f64 {
        norm_sqr(&self.xi_l, &self.grid)
    }

    pub fn norm(&self) -> f64 {
        self.p_emitter() + self.p_right() + self.p_left()
    }
}

/// Emitter and channel probabilities versus time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbabilityTrace {
    pub times: Vec<f64>,
    pub p_emitter: Vec<f64>,
    pub p_right: Vec<f64>,
    pub p_left: Vec<f64>,
}

impl ProbabilityTrace {
    pub fn push(&mut self, state: &SingleExcitationState) {
        self.times.push(state.t);
        self.p_emitter.push(state.p_emitter());
        self.p_right.push(state.p_right());
        self.p_left.push(state.p_left());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn totals(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.p_emitter[i] + self.p_right[i] + self.p_left[i])
            .collect()
    }
}

/// Probabilities from the closed-form evolution at each of `times`.
pub fn probability_trace(
    init: &SingleExcitationState,
    params: &TleParams,
    pte: &PteParams,
    times: &[f64],
) -> Result<ProbabilityTrace> {
    let evo = AnalyticEvolution::new(init, params, pte)?;
    let states = evo.states_at(times, DEFAULT_CACHE_SPACING * params.gamma_wg.recip())?;
    let mut trace = ProbabilityTrace::default();
    for s in &states {
        trace.push(s);
    }
    Ok(trace)
}
