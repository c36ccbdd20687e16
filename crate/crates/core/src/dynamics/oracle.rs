//! Direct integration of the discretised single-excitation equations.
//!
//! On a grid of frequencies `k_j` with trapezoid weights `w_j` the coupled
//! equations read
//!
//! ```text
//! i χ̇    = (ω_e - iγ/2) χ + c (S_R + S_L)
//! i ξ̇_R,j = k_j ξ_R,j + c χ + (V/2π) S_L
//! i ξ̇_L,j = k_j ξ_L,j + c χ + (V/2π) S_R
//! ```
//!
//! with `S_μ = Σ_j w_j ξ_μ,j` and `c = √Γ / (2√π)`. Without loss the
//! discrete system is unitary in the `w`-weighted norm. The integration
//! runs in a frame rotating at the grid centre, so the stability limit is
//! set by the grid half-width rather than by the absolute frequencies.

use std::f64::consts::PI;

use crate::{dynamics::SingleExcitationState, Error, PteParams, Result, TleParams, C64};

/// Largest `dt · half_span` accepted.
const CFL_LIMIT: f64 = 0.5;
/// Largest `dt · (Γ + γ)` accepted.
const RATE_LIMIT: f64 = 0.1;
/// Largest tolerated drift of `norm + dissipated` away from its start value.
const NORM_DRIFT_LIMIT: f64 = 1e-3;

/// Probabilities recorded along an oracle run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSample {
    pub t: f64,
    pub chi: C64,
    pub p_right: f64,
    pub p_left: f64,
    /// Probability lost to the non-guided channel so far.
    pub p_lost: f64,
}

impl OdeSample {
    pub fn p_emitter(&self) -> f64 {
        self.chi.norm_sqr()
    }
}

/// Final state plus the recorded samples.
#[derive(Debug, Clone)]
pub struct OdeRun {
    pub state: SingleExcitationState,
    pub samples: Vec<OdeSample>,
    pub p_lost: f64,
}

/// Fixed-step RK4 integrator configuration.
#[derive(Debug, Clone, Copy)]
pub struct OdeOracle {
    pub params: TleParams,
    pub pte: PteParams,
    pub dt: f64,
    /// Record a sample every this many steps (0 records only the endpoints).
    pub sample_every: usize,
}

struct Buffers {
    r: Vec<C64>,
    l: Vec<C64>,
}

impl Buffers {
    fn zeros(n: usize) -> Self {
        Self {
            r: vec![C64::new(0.0, 0.0); n],
            l: vec![C64::new(0.0, 0.0); n],
        }
    }
}

fn trapezoid_sum(x: &[C64], h: f64) -> C64 {
    let s: C64 = x.iter().sum();
    (s - 0.5 * (x[0] + x[x.len() - 1])) * h
}

fn weighted_norm(x: &[C64], h: f64) -> f64 {
    let s: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    (s - 0.5 * (x[0].norm_sqr() + x[x.len() - 1].norm_sqr())) * h
}

impl OdeOracle {
    pub fn new(params: TleParams, pte: PteParams, dt: f64) -> Self {
        Self {
            params,
            pte,
            dt,
            sample_every: 0,
        }
    }

    pub fn sampling(mut self, every: usize) -> Self {
        self.sample_every = every;
        self
    }

    fn check(&self, init: &SingleExcitationState, t_final: f64) -> Result<usize> {
        self.params.validate()?;
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if !(t_final >= init.t) {
            return Err(Error::invalid(format!(
                "final time {t_final} precedes the initial time {}",
                init.t
            )));
        }
        let half = init.grid.half_span();
        if self.dt * half > CFL_LIMIT {
            return Err(Error::config(format!(
                "time step {} too large for a grid half-width of {half} (need dt <= {})",
                self.dt,
                CFL_LIMIT / half
            )));
        }
        let rate = self.params.gamma_wg + self.params.gamma_loss;
        if self.dt * rate > RATE_LIMIT {
            return Err(Error::config(format!(
                "time step {} does not resolve the decay rate {rate}",
                self.dt
            )));
        }
        let steps = ((t_final - init.t) / self.dt - 1e-9).ceil().max(0.0) as usize;
        Ok(steps)
    }

    /// Integrates from `init.t` to `t_final`. The step is shortened slightly
    /// so that a whole number of steps lands exactly on `t_final`.
    pub fn run(&self, init: &SingleExcitationState, t_final: f64) -> Result<OdeRun> {
        let steps = self.check(init, t_final)?;
        let grid = init.grid;
        let n = grid.len();
        let h = grid.spacing();
        let k0 = grid.center();
        let dt = if steps == 0 {
            0.0
        } else {
            (t_final - init.t) / steps as f64
        };

        let g = self.params.gamma_wg;
        let c = g.sqrt() / (2.0 * PI.sqrt());
        let vv = self.pte.v / (2.0 * PI);
        let det_e = C64::new(self.params.omega_e - k0, -0.5 * self.params.gamma_loss);
        let kappa: Vec<f64> = grid.points().iter().map(|k| k - k0).collect();
        let mi = C64::new(0.0, -1.0);

        // Rotating frame: x̃ = x e^{i k0 (t - t_i)}.
        let mut chi = init.chi;
        let mut y = Buffers {
            r: init.xi_r.clone(),
            l: init.xi_l.clone(),
        };
        let mut stage = Buffers::zeros(n);
        let mut next = Buffers::zeros(n);
        let mut acc = Buffers::zeros(n);
        let mut lost = 0.0;
        let norm0 = chi.norm_sqr() + weighted_norm(&y.r, h) + weighted_norm(&y.l, h);

        let mut samples = Vec::new();
        let record = |t: f64, chi: C64, y: &Buffers, lost: f64| {
            let ph = C64::from_polar(1.0, -k0 * (t - init.t));
            OdeSample {
                t,
                chi: chi * ph,
                p_right: weighted_norm(&y.r, h),
                p_left: weighted_norm(&y.l, h),
                p_lost: lost,
            }
        };
        samples.push(record(init.t, chi, &y, lost));

        const A: [f64; 4] = [0.0, 0.5, 0.5, 1.0];
        const B: [f64; 4] = [1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0];
        let gl = self.params.gamma_loss;

        for step in 0..steps {
            // Stage 1 evaluates at y itself.
            stage.r.copy_from_slice(&y.r);
            stage.l.copy_from_slice(&y.l);
            let mut stage_chi = chi;
            let mut chi_acc = chi;
            let mut lost_acc = lost;
            acc.r.copy_from_slice(&y.r);
            acc.l.copy_from_slice(&y.l);

            for s in 0..4 {
                let s_r = trapezoid_sum(&stage.r, h);
                let s_l = trapezoid_sum(&stage.l, h);
                let dchi = mi * (det_e * stage_chi + c * (s_r + s_l));
                let dlost = gl * stage_chi.norm_sqr();
                let u_r = c * stage_chi + vv * s_l;
                let u_l = c * stage_chi + vv * s_r;
                let bw = B[s] * dt;
                let aw = if s < 3 { A[s + 1] * dt } else { 0.0 };
                for j in 0..n {
                    let kr = mi * (kappa[j] * stage.r[j] + u_r);
                    let kl = mi * (kappa[j] * stage.l[j] + u_l);
                    acc.r[j] += bw * kr;
                    acc.l[j] += bw * kl;
                    next.r[j] = y.r[j] + aw * kr;
                    next.l[j] = y.l[j] + aw * kl;
                }
                chi_acc += bw * dchi;
                lost_acc += bw * dlost;
                stage_chi = chi + aw * dchi;
                std::mem::swap(&mut stage, &mut next);
            }
            chi = chi_acc;
            lost = lost_acc;
            std::mem::swap(&mut y, &mut acc);

            let t = init.t + (step + 1) as f64 * dt;
            if self.sample_every > 0 && (step + 1) % self.sample_every == 0 && step + 1 < steps {
                let smp = record(t, chi, &y, lost);
                self.check_drift(norm0, &smp)?;
                samples.push(smp);
            }
        }
        let end = record(t_final, chi, &y, lost);
        self.check_drift(norm0, &end)?;
        if steps > 0 {
            samples.push(end);
        }

        let frame = C64::from_polar(1.0, -k0 * (t_final - init.t));
        let back = |x: &[C64]| -> Vec<C64> { x.iter().map(|z| z * frame).collect() };
        let state = SingleExcitationState::new(chi * frame, back(&y.r), back(&y.l), grid, t_final)?;
        Ok(OdeRun {
            state,
            samples,
            p_lost: lost,
        })
    }

    fn check_drift(&self, norm0: f64, s: &OdeSample) -> Result<()> {
        let total = s.p_emitter() + s.p_right + s.p_left + s.p_lost;
        if !total.is_finite() || (total - norm0).abs() > NORM_DRIFT_LIMIT {
            return Err(Error::Accuracy(format!(
                "probability drifted from {norm0} to {total} by t = {}",
                s.t
            )));
        }
        Ok(())
    }
}

/// Advances `init` to `t_final` with fixed step `dt`.
pub fn ode_oracle(
    init: &SingleExcitationState,
    params: &TleParams,
    pte: &PteParams,
    t_final: f64,
    dt: f64,
) -> Result<SingleExcitationState> {
    Ok(OdeOracle::new(*params, *pte, dt).run(init, t_final)?.state)
}
