//! Closed-form single-excitation evolution (lossless emitter).
//!
//! With `τ = t - t_i`, `Γ̃` the PTE-dressed rate and
//! `a(k) = Γ̃/2 + i(ω_e - k)`, the emitter amplitude is
//!
//! ```text
//! χ(t) = χ(t_i) E(τ) - i κ̃ ∫dk ξ(t_i,k) [e^{-ikτ} - E(τ)] / a(k)
//! E(τ) = exp(-(Γ̃/2 + iω_e) τ),   κ̃ = Γ̃ / (2 √(πΓ))
//! ```
//!
//! where `ξ = ξ_R + ξ_L`. The photon envelopes follow from formal
//! integration of their equations of motion,
//!
//! ```text
//! ξ(t,k)   = ξ(t_i,k)   e^{-ikτ} + ∫ e^{ik(t'-t)} F(t')   dt'
//! ξ_R(t,k) = ξ_R(t_i,k) e^{-ikτ} + ∫ e^{ik(t'-t)} F_R(t') dt'
//! ```
//!
//! with driving terms built from `χ`, `χ̇` and the freely propagating left
//! field. The time integrals are accumulated panel by panel with a
//! Filon-Simpson rule: the slowly varying part of the drive is interpolated
//! quadratically and the oscillating factor is integrated exactly, so the
//! result stays accurate for detunings far beyond `1/Δt`.

use std::f64::consts::PI;

use crate::{
    dynamics::SingleExcitationState, effective_rate, Error, KGrid, PteParams, Result, TleParams,
    C64,
};

/// Default time step of the drive samples, in units of `1/Γ`.
pub const DEFAULT_CACHE_SPACING: f64 = 0.005;

/// Coarsest drive sampling accepted, in units of `1/Γ`.
const MAX_CACHE_SPACING: f64 = 0.01;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Precomputed closed-form evolution from a fixed initial state.
#[derive(Debug, Clone)]
pub struct AnalyticEvolution {
    gamma: f64,
    omega_e: f64,
    v: f64,
    kappa_t: C64,
    decay: C64,
    chi0: C64,
    t0: f64,
    grid: KGrid,
    ks: Vec<f64>,
    xi0: Vec<C64>,
    xi_r0: Vec<C64>,
    w_xi: Vec<C64>,
    w_xi_over_a: Vec<C64>,
    w_xi_l: Vec<C64>,
    q: C64,
    has_photon: bool,
}

/// Drive samples at one instant.
#[derive(Debug, Clone, Copy)]
struct Drive {
    total: C64,
    right: C64,
}

impl AnalyticEvolution {
    pub fn new(init: &SingleExcitationState, params: &TleParams, pte: &PteParams) -> Result<Self> {
        params.validate()?;
        if !params.is_lossless() {
            return Err(Error::unsupported(
                "the closed-form evolution is lossless only; use the ODE oracle when gamma > 0",
            ));
        }
        let gamma = params.gamma_wg;
        let omega_e = params.omega_e;
        let gamma_t = effective_rate(gamma, pte)?;
        let kappa_t = gamma_t / (2.0 * (PI * gamma).sqrt());
        let decay = gamma_t / 2.0 + I * omega_e;

        let grid = init.grid;
        let ks = grid.points();
        let w = grid.weights();
        let xi0: Vec<C64> = init
            .xi_r
            .iter()
            .zip(&init.xi_l)
            .map(|(r, l)| r + l)
            .collect();
        let w_xi: Vec<C64> = xi0.iter().zip(&w).map(|(x, w)| x * w).collect();
        let w_xi_over_a: Vec<C64> = w_xi
            .iter()
            .zip(&ks)
            .map(|(x, &k)| x / (gamma_t / 2.0 + I * (omega_e - k)))
            .collect();
        let w_xi_l: Vec<C64> = init.xi_l.iter().zip(&w).map(|(x, w)| x * w).collect();
        let q = w_xi_over_a.iter().sum();
        let has_photon = xi0.iter().chain(&init.xi_r).any(|z| z.norm_sqr() > 0.0);

        Ok(Self {
            gamma,
            omega_e,
            v: pte.v,
            kappa_t,
            decay,
            chi0: init.chi,
            t0: init.t,
            grid,
            ks,
            xi0,
            xi_r0: init.xi_r.clone(),
            w_xi,
            w_xi_over_a,
            w_xi_l,
            q,
            has_photon,
        })
    }

    pub fn initial_time(&self) -> f64 {
        self.t0
    }

    pub fn grid(&self) -> &KGrid {
        &self.grid
    }

    /// `(Σ w ξ e^{-ikτ}/a, Σ w ξ e^{-ikτ}, Σ w ξ_L e^{-ikτ})`.
    fn free_sums(&self, tau: f64) -> (C64, C64, C64) {
        let zero = C64::new(0.0, 0.0);
        if !self.has_photon {
            return (zero, zero, zero);
        }
        let (mut p, mut phi, mut phi_l) = (zero, zero, zero);
        for j in 0..self.ks.len() {
            let (s, c) = (self.ks[j] * tau).sin_cos();
            let ph = C64::new(c, -s);
            p += self.w_xi_over_a[j] * ph;
            phi += self.w_xi[j] * ph;
            phi_l += self.w_xi_l[j] * ph;
        }
        (p, phi, phi_l)
    }

    /// `(χ, χ̇, Φ⁰_L)` at time `t`, where `Φ⁰_L` is the freely propagated
    /// left-moving input field at the emitter.
    fn amplitudes(&self, t: f64) -> (C64, C64, C64) {
        let tau = t - self.t0;
        let e = (-self.decay * tau).exp();
        let (p, phi, phi_l) = self.free_sums(tau);
        let chi = self.chi0 * e - I * self.kappa_t * (p - e * self.q);
        let chi_dot = -self.decay * chi - I * self.kappa_t * phi;
        (chi, chi_dot, phi_l)
    }

    /// Emitter amplitude at `t ≥ t_i`.
    pub fn chi(&self, t: f64) -> Result<C64> {
        if !(t >= self.t0) {
            return Err(Error::invalid(format!(
                "requested time {t} precedes the initial time {}",
                self.t0
            )));
        }
        crate::check_finite(self.amplitudes(t).0, "emitter amplitude")
    }

    fn drive(&self, t: f64) -> Drive {
        let (chi, chi_dot, phi_l) = self.amplitudes(t);
        let g = self.gamma;
        let v = self.v;
        let sqpi = PI.sqrt();
        let total = -I * (g / PI).sqrt() * (1.0 - v * self.omega_e / g) * chi
            + v / (PI * g).sqrt() * chi_dot;
        // Total field at the emitter, `∫(ξ_R + ξ_L) dk`.
        let phi = 2.0 * sqpi / g.sqrt() * (I * chi_dot - self.omega_e * chi);
        let c = g.sqrt() / (2.0 * sqpi);
        let d = C64::new(1.0, -v / 2.0);
        let right = -I * c * C64::new(1.0, -v) / d * chi
            - I / (2.0 * PI) * (v / d) * phi_l
            - (v * v / 4.0) / (PI * d) * phi;
        Drive { total, right }
    }

    fn check_times(&self, times: &[f64], spacing: f64) -> Result<()> {
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::invalid(format!(
                "drive sampling step must be positive, got {spacing}"
            )));
        }
        if spacing * self.gamma > MAX_CACHE_SPACING * (1.0 + 1e-12) {
            return Err(Error::Accuracy(format!(
                "drive sampling step {spacing} exceeds {MAX_CACHE_SPACING}/Gamma"
            )));
        }
        let mut prev = self.t0;
        for &t in times {
            if !t.is_finite() || t < prev {
                return Err(Error::invalid(format!(
                    "times must be finite, non-decreasing and not before {}; got {t} after {prev}",
                    self.t0
                )));
            }
            prev = t;
        }
        Ok(())
    }

    /// `(ξ_R, ξ_L)` at each of `times` for arbitrary frequencies `ks`, given
    /// the initial envelope values there. `spacing` is the step of the drive
    /// samples.
    pub fn envelopes_at(
        &self,
        times: &[f64],
        ks: &[f64],
        xi0: &[C64],
        xi_r0: &[C64],
        spacing: f64,
    ) -> Result<Vec<(Vec<C64>, Vec<C64>)>> {
        self.check_times(times, spacing)?;
        if xi0.len() != ks.len() || xi_r0.len() != ks.len() {
            return Err(Error::invalid(
                "initial envelope values must match the frequency list",
            ));
        }
        // Demodulate around the grid centre so the interpolated drive is slow.
        let w_ref = self.grid.center();
        let n = ks.len();
        let h = spacing;
        let alphas: Vec<f64> = ks.iter().map(|k| k - w_ref).collect();
        let panel: Vec<FilonPanel> = alphas.iter().map(|&a| FilonPanel::new(a, h)).collect();

        let mut acc = vec![C64::new(0.0, 0.0); n];
        let mut acc_r = vec![C64::new(0.0, 0.0); n];
        let demod = |s: f64, d: Drive| {
            let (sn, cs) = (w_ref * (s - self.t0)).sin_cos();
            let ph = C64::new(cs, sn);
            (d.total * ph, d.right * ph)
        };
        let mut node_t = self.t0;
        let mut node = demod(node_t, self.drive(node_t));
        let mut out = Vec::with_capacity(times.len());

        for &t in times {
            while node_t + 2.0 * h <= t {
                let t1 = node_t + h;
                let t2 = node_t + 2.0 * h;
                let g1 = demod(t1, self.drive(t1));
                let g2 = demod(t2, self.drive(t2));
                for j in 0..n {
                    let p = &panel[j];
                    acc[j] = p.shift * acc[j] + p.w0 * node.0 + p.w1 * g1.0 + p.w2 * g2.0;
                    acc_r[j] = p.shift * acc_r[j] + p.w0 * node.1 + p.w1 * g1.1 + p.w2 * g2.1;
                }
                node_t = t2;
                node = g2;
            }
            let rem = t - node_t;
            let (part, part_r): (Vec<C64>, Vec<C64>) = if rem > 0.0 {
                let tm = node_t + 0.5 * rem;
                let gm = demod(tm, self.drive(tm));
                let ge = demod(t, self.drive(t));
                alphas
                    .iter()
                    .enumerate()
                    .map(|(j, &a)| {
                        let p = FilonPanel::new(a, 0.5 * rem);
                        (
                            p.shift * acc[j] + p.w0 * node.0 + p.w1 * gm.0 + p.w2 * ge.0,
                            p.shift * acc_r[j] + p.w0 * node.1 + p.w1 * gm.1 + p.w2 * ge.1,
                        )
                    })
                    .unzip()
            } else {
                (acc.clone(), acc_r.clone())
            };

            let tau = t - self.t0;
            let (sn, cs) = (w_ref * tau).sin_cos();
            let carrier = C64::new(cs, -sn);
            let mut xr = Vec::with_capacity(n);
            let mut xl = Vec::with_capacity(n);
            for j in 0..n {
                let (s, c) = (ks[j] * tau).sin_cos();
                let free = C64::new(c, -s);
                let total = xi0[j] * free + carrier * part[j];
                let right = xi_r0[j] * free + carrier * part_r[j];
                if !(total.re.is_finite()
                    && total.im.is_finite()
                    && right.re.is_finite()
                    && right.im.is_finite())
                {
                    return Err(Error::NumericDomain(format!(
                        "envelope at k = {} and t = {t} is not finite",
                        ks[j]
                    )));
                }
                xr.push(right);
                xl.push(total - right);
            }
            out.push((xr, xl));
        }
        Ok(out)
    }

    /// Full states on the initial grid at each of `times`.
    pub fn states_at(&self, times: &[f64], spacing: f64) -> Result<Vec<SingleExcitationState>> {
        let env = self.envelopes_at(times, &self.ks, &self.xi0, &self.xi_r0, spacing)?;
        times
            .iter()
            .zip(env)
            .map(|(&t, (xr, xl))| SingleExcitationState::new(self.chi(t)?, xr, xl, self.grid, t))
            .collect()
    }
}

/// Weights of `∫_0^{2h} e^{iα(s-2h)} g(s) ds` for `g` quadratic through
/// its samples at `0, h, 2h`, plus the phase `e^{-2iαh}` that carries an
/// accumulated integral across the panel.
#[derive(Debug, Clone, Copy)]
struct FilonPanel {
    shift: C64,
    w0: C64,
    w1: C64,
    w2: C64,
}

impl FilonPanel {
    fn new(alpha: f64, h: f64) -> Self {
        // With v = 2 - s/h the integral becomes h ∫_0^2 e^{-βv} q(v) dv,
        // β = iαh; m_j are the moments ∫_0^2 e^{-βv} v^j dv.
        let beta = I * (alpha * h);
        let e2 = (-2.0 * beta).exp();
        let m = if beta.norm() < 1.0 {
            let mut m = [C64::new(0.0, 0.0); 3];
            let mut term = C64::new(1.0, 0.0);
            let mut pow2 = 2.0;
            for n in 0..40 {
                for (j, mj) in m.iter_mut().enumerate() {
                    *mj += term * (pow2 * 2f64.powi(j as i32) / (n + j + 1) as f64);
                }
                term *= -beta / (n + 1) as f64;
                pow2 *= 2.0;
            }
            m
        } else {
            let m0 = (1.0 - e2) / beta;
            let m1 = (-2.0 * e2 + m0) / beta;
            let m2 = (-4.0 * e2 + 2.0 * m1) / beta;
            [m0, m1, m2]
        };
        Self {
            shift: e2,
            w0: h * (m[2] - m[1]) / 2.0,
            w1: h * (2.0 * m[1] - m[2]),
            w2: h * (2.0 * m[0] - 3.0 * m[1] + m[2]) / 2.0,
        }
    }
}

/// Emitter amplitude at time `t` from the closed form.
pub fn chi_analytic(
    init: &SingleExcitationState,
    params: &TleParams,
    pte: &PteParams,
    t: f64,
) -> Result<C64> {
    AnalyticEvolution::new(init, params, pte)?.chi(t)
}

/// `(ξ_R(t,k), ξ_L(t,k))` from the closed form.
///
/// When the initial state carries a photon, `k` must be one of the nodes of
/// its grid; otherwise any frequency is accepted.
pub fn envelope_analytic(
    init: &SingleExcitationState,
    params: &TleParams,
    pte: &PteParams,
    t: f64,
    k: f64,
) -> Result<(C64, C64)> {
    let evo = AnalyticEvolution::new(init, params, pte)?;
    let (x0, xr0) = if evo.has_photon {
        let g = init.grid;
        let pos = (k - g.k_min()) / g.spacing();
        let i = pos.round();
        if !(i >= 0.0 && (i as usize) < g.len() && (pos - i).abs() < 1e-9) {
            return Err(Error::config(format!(
                "k = {k} is not a node of the initial-state grid"
            )));
        }
        let i = i as usize;
        (init.xi_r[i] + init.xi_l[i], init.xi_r[i])
    } else {
        (C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    };
    let spacing = DEFAULT_CACHE_SPACING / params.gamma_wg;
    let mut env = evo.envelopes_at(&[t], &[k], &[x0], &[xr0], spacing)?;
    let (xr, xl) = env.pop().expect("one time requested");
    Ok((xr[0], xl[0]))
}
