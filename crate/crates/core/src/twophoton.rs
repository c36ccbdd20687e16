//! Two counter-propagating photons scattering off the waveguide system.
//!
//! The input `∬ ξ(k1) ξ(k2) b_L†(k1) b_R†(k2) |0⟩` leaves as
//!
//! ```text
//! f_LR(p1,p2) = ξ(p1)ξ(p2) [t(p1)t(p2) + r(p1)r(p2)] + B(p1,p2)
//! f_LL(p1,p2) = ξ(p1)ξ(p2) [t(p1)r(p2) + r(p1)t(p2)] + B(p1,p2)  (= f_RR)
//! B(p1,p2)    = λ ∫ dk 𝓜(p1, p2, k, E - k) ξ(k) ξ(E - k),   E = p1 + p2
//! ```
//!
//! with `LR` meaning `b_L†(p1) b_R†(p2)` and `λ` the kernel's
//! [amplitude factor](BoundStateKernel::amplitude_factor). Same-channel outputs carry a
//! factor `1/√2`, so every channel probability is a plain full-plane
//! quadrature of `|amp|²`.
//!
//! Because the kernels factorise, `B(p1,p2) = o(p1) o(p2) F(p1 + p2)` and
//! only the one-dimensional function `F` requires an integral. On a uniform
//! grid `p_i + p_j` is itself a grid point, so `F` is a discrete
//! convolution evaluated once per total energy.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::{
    effective_resonance,
    grid::norm_sqr,
    pte_matrix,
    smatrix::{BoundStateKernel, ScatterCoeffs, Scatterer},
    Error, GaussianEnvelope, JcParams, KGrid, PteParams, Result, TleParams, C64,
};

/// Minimum fraction of the input two-photon norm the grid must capture.
const MIN_INPUT_NORM: f64 = 0.999;

/// Amplitudes below this fraction of their peak are treated as zero when
/// restricting sums to the region where the integrand lives.
const SUPPORT_CUTOFF: f64 = 1e-13;

/// Waveguide direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    R,
    L,
}

/// Output channel pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelPair {
    LL,
    RR,
    LR,
}

impl ChannelPair {
    pub const ALL: [ChannelPair; 3] = [ChannelPair::LL, ChannelPair::RR, ChannelPair::LR];

    pub fn label(&self) -> &'static str {
        match self {
            ChannelPair::LL => "LL",
            ChannelPair::RR => "RR",
            ChannelPair::LR => "LR",
        }
    }
}

/// Two identical photons, one incident from each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonInput {
    pub env: GaussianEnvelope,
    pub channels: (Channel, Channel),
}

impl TwoPhotonInput {
    pub fn counter_propagating(env: GaussianEnvelope) -> Self {
        Self {
            env,
            channels: (Channel::L, Channel::R),
        }
    }

    fn validate(&self) -> Result<()> {
        self.env.validate()?;
        if self.channels.0 == self.channels.1 {
            return Err(Error::unsupported(
                "only counter-propagating photon pairs are supported",
            ));
        }
        Ok(())
    }
}

/// What the photons scatter off. `nonlinear = false` drops the bound-state
/// term, leaving a linear system with the same single-photon response (a
/// bare cavity in place of an emitter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonSystem {
    pub scatterer: Scatterer,
    pub nonlinear: bool,
}

impl TwoPhotonSystem {
    pub fn tle(params: TleParams) -> Self {
        Self {
            scatterer: Scatterer::Tle(params),
            nonlinear: true,
        }
    }

    /// Linear cavity with the emitter's single-photon response.
    pub fn cavity(params: TleParams) -> Self {
        Self {
            scatterer: Scatterer::Tle(params),
            nonlinear: false,
        }
    }

    pub fn jc(params: JcParams) -> Self {
        Self {
            scatterer: Scatterer::Jc(params),
            nonlinear: true,
        }
    }

    pub fn linear(&self) -> Self {
        Self {
            nonlinear: false,
            ..*self
        }
    }

    fn kernel(&self, pte: &PteParams) -> Result<Option<BoundStateKernel>> {
        let lossless = match &self.scatterer {
            Scatterer::Tle(p) => p.is_lossless(),
            Scatterer::Jc(p) => p.is_lossless(),
        };
        if !lossless {
            return Err(Error::unsupported(
                "two-photon scattering is only available for lossless systems",
            ));
        }
        if !self.nonlinear {
            return Ok(None);
        }
        Ok(Some(match &self.scatterer {
            Scatterer::Tle(p) => BoundStateKernel::tle(p, pte)?,
            Scatterer::Jc(p) => BoundStateKernel::jc(p, pte)?,
        }))
    }

    /// Frequencies and widths the grid must resolve around `k_c`.
    fn features(&self, pte: &PteParams) -> Result<(f64, Vec<f64>)> {
        Ok(match &self.scatterer {
            Scatterer::Tle(p) => (
                p.gamma_wg,
                vec![effective_resonance(p.omega_e, p.gamma_wg, pte)?],
            ),
            Scatterer::Jc(p) => (
                p.gamma_wg,
                vec![
                    p.omega_c - p.g,
                    p.omega_c + p.g,
                    p.omega_e - p.g,
                    p.omega_e + p.g,
                ],
            ),
        })
    }
}

/// Grid covering the envelope (±8σ) and the resonant structure (±10Γ),
/// with spacing fine enough for both.
pub fn auto_grid(
    env: &GaussianEnvelope,
    system: &TwoPhotonSystem,
    pte: &PteParams,
) -> Result<KGrid> {
    env.validate()?;
    let (gamma, marks) = system.features(pte)?;
    let reach = marks
        .iter()
        .map(|m| (m - env.k_c).abs())
        .fold(0.0, f64::max);
    let half = (8.0 * env.sigma).max(10.0 * gamma) + reach;
    let h = (env.sigma / 4.0).min(gamma / 10.0);
    KGrid::with_spacing(env.k_c, half, h)
}

/// Channel probabilities of the scattered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonProbabilities {
    pub p_ll: f64,
    pub p_rr: f64,
    pub p_lr: f64,
}

impl TwoPhotonProbabilities {
    pub fn total(&self) -> f64 {
        self.p_ll + self.p_rr + self.p_lr
    }

    pub fn p_counter(&self) -> f64 {
        self.p_lr
    }

    pub fn p_co(&self) -> f64 {
        self.p_ll + self.p_rr
    }
}

/// Output amplitudes on a `(p1, p2)` grid, stored row-major with `p1`
/// indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonOutput {
    pub grid: KGrid,
    pub amp_ll: Vec<C64>,
    pub amp_rr: Vec<C64>,
    pub amp_lr: Vec<C64>,
    pub p_ll: f64,
    pub p_rr: f64,
    pub p_lr: f64,
}

impl TwoPhotonOutput {
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn amplitude(&self, pair: ChannelPair) -> &[C64] {
        match pair {
            ChannelPair::LL => &self.amp_ll,
            ChannelPair::RR => &self.amp_rr,
            ChannelPair::LR => &self.amp_lr,
        }
    }

    pub fn probabilities(&self) -> TwoPhotonProbabilities {
        TwoPhotonProbabilities {
            p_ll: self.p_ll,
            p_rr: self.p_rr,
            p_lr: self.p_lr,
        }
    }

    pub fn total(&self) -> f64 {
        self.p_ll + self.p_rr + self.p_lr
    }
}

/// Everything that depends on one grid coordinate only.
struct Prepared {
    n: usize,
    w: Vec<f64>,
    xi: Vec<C64>,
    t: Vec<C64>,
    r: Vec<C64>,
    outer: Vec<C64>,
    /// Bound-state factor `F(E)` at `E = p_i + p_j`, indexed by `s = i + j`.
    bound: Vec<C64>,
    /// Index ranges outside of which `ξ` and the bound term vanish.
    xi_support: (usize, usize),
    bound_support: Option<(usize, usize)>,
}

fn support(values: impl Iterator<Item = f64> + Clone) -> Option<(usize, usize)> {
    let peak = values.clone().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return None;
    }
    let cut = SUPPORT_CUTOFF * peak;
    let idx: Vec<usize> = values
        .enumerate()
        .filter(|(_, v)| *v > cut)
        .map(|(i, _)| i)
        .collect();
    Some((idx[0], *idx.last().unwrap()))
}

impl Prepared {
    fn new(
        input: &TwoPhotonInput,
        system: &TwoPhotonSystem,
        pte: &PteParams,
        grid: &KGrid,
    ) -> Result<Self> {
        input.validate()?;
        let kernel = system.kernel(pte)?;
        let env = &input.env;
        let n = grid.len();
        let ps = grid.points();
        let w = grid.weights();
        let xi = env.sample(grid);
        let norm = norm_sqr(&xi, grid).powi(2);
        if norm < MIN_INPUT_NORM {
            return Err(Error::config(format!(
                "grid [{}, {}] holds only {norm:.6} of the input two-photon norm",
                grid.k_min(),
                grid.k_max()
            )));
        }
        let coeffs = ScatterCoeffs::new(system.scatterer, *pte);
        let (t, r): (Vec<C64>, Vec<C64>) = ps
            .iter()
            .map(|&p| coeffs.at(p))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        let xi_support = support(xi.iter().map(|z| z.norm()))
            .ok_or_else(|| Error::NumericDomain("input envelope vanishes on the grid".into()))?;

        let mut outer = vec![C64::new(0.0, 0.0); n];
        let mut bound = vec![C64::new(0.0, 0.0); 2 * n - 1];
        let mut bound_support = None;
        if let Some(kern) = kernel {
            for (o, &p) in outer.iter_mut().zip(&ps) {
                *o = kern.outer(p);
            }
            // F_m(s) = 2 Σ_k w_k u_m(p_k) ξ(p_k) ξ(p_{s-k}); ξ is evaluated
            // from its closed form where s - k falls off the grid.
            let (lo, hi) = xi_support;
            let h = grid.spacing();
            let k0 = grid.k_min();
            let phase = kern.amplitude_factor();
            let u: Vec<[C64; 2]> = (lo..=hi).map(|k| kern.inner(ps[k])).collect();
            let xi_at = |idx: isize| env.value(k0 + idx as f64 * h);
            let pad = (hi - lo) as isize;
            let s_lo = (2 * lo as isize - pad).max(0) as usize;
            let s_hi = ((2 * hi) as isize + pad).min(2 * n as isize - 2) as usize;
            let vals: Vec<C64> = (s_lo..=s_hi)
                .into_par_iter()
                .map(|s| {
                    let mut f = [C64::new(0.0, 0.0); 2];
                    for k in lo..=hi {
                        let x = xi[k] * xi_at(s as isize - k as isize) * w[k];
                        f[0] += u[k - lo][0] * x;
                        f[1] += u[k - lo][1] * x;
                    }
                    let e = 2.0 * k0 + s as f64 * h;
                    let c = kern.energy(e);
                    phase * 2.0 * (c[0] * f[0] + c[1] * f[1])
                })
                .collect();
            bound[s_lo..=s_hi].copy_from_slice(&vals);
            let peak_outer = outer.iter().map(|z| z.norm()).fold(0.0, f64::max);
            bound_support = support(bound.iter().map(|z| z.norm() * peak_outer * peak_outer));
        }
        Ok(Self {
            n,
            w,
            xi,
            t,
            r,
            outer,
            bound,
            xi_support,
            bound_support,
        })
    }

    /// `(amp_LR, amp_LL, amp_RR)` at grid indices `(i, j)`.
    #[inline]
    fn entry(&self, i: usize, j: usize) -> [C64; 3] {
        let x = self.xi[i] * self.xi[j];
        let b = self.outer[i] * self.outer[j] * self.bound[i + j];
        let (ti, ri, tj, rj) = (self.t[i], self.r[i], self.t[j], self.r[j]);
        [
            x * (ti * tj + ri * rj) + b,
            (x * (ti * rj + ri * tj) + b) * std::f64::consts::FRAC_1_SQRT_2,
            (x * (ri * tj + ti * rj) + b) * std::f64::consts::FRAC_1_SQRT_2,
        ]
    }

    /// Column indices of row `i` outside of which every amplitude vanishes.
    fn row_ranges(&self, i: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(2);
        let (lo, hi) = self.xi_support;
        if (lo..=hi).contains(&i) {
            out.push((lo, hi));
        }
        if let Some((s_lo, s_hi)) = self.bound_support {
            if s_hi >= i {
                let a = s_lo.saturating_sub(i);
                let b = (s_hi - i).min(self.n - 1);
                if a <= b {
                    out.push((a, b));
                }
            }
        }
        out.sort_unstable();
        // Merge overlapping ranges so no point is counted twice.
        let mut merged: Vec<(usize, usize)> = Vec::with_capacity(2);
        for (a, b) in out {
            match merged.last_mut() {
                Some(last) if a <= last.1 + 1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        merged
    }

    fn probabilities(&self) -> TwoPhotonProbabilities {
        let rows: Vec<[f64; 3]> = (0..self.n)
            .into_par_iter()
            .map(|i| {
                let mut acc = [0.0; 3];
                for (a, b) in self.row_ranges(i) {
                    for j in a..=b {
                        let e = self.entry(i, j);
                        let w = self.w[j];
                        for c in 0..3 {
                            acc[c] += w * e[c].norm_sqr();
                        }
                    }
                }
                acc.map(|v| v * self.w[i])
            })
            .collect();
        let mut p = [0.0; 3];
        for row in rows {
            for c in 0..3 {
                p[c] += row[c];
            }
        }
        TwoPhotonProbabilities {
            p_lr: p[0],
            p_ll: p[1],
            p_rr: p[2],
        }
    }
}

/// Output amplitudes and channel probabilities on `grid`.
pub fn scatter_two_photon(
    input: &TwoPhotonInput,
    system: &TwoPhotonSystem,
    pte: &PteParams,
    grid: &KGrid,
) -> Result<TwoPhotonOutput> {
    let prep = Prepared::new(input, system, pte, grid)?;
    let n = prep.n;
    let mut amp_lr = vec![C64::new(0.0, 0.0); n * n];
    let mut amp_ll = vec![C64::new(0.0, 0.0); n * n];
    let mut amp_rr = vec![C64::new(0.0, 0.0); n * n];
    amp_lr
        .par_chunks_mut(n)
        .zip(amp_ll.par_chunks_mut(n))
        .zip(amp_rr.par_chunks_mut(n))
        .enumerate()
        .for_each(|(i, ((lr, ll), rr))| {
            for j in 0..n {
                let e = prep.entry(i, j);
                lr[j] = e[0];
                ll[j] = e[1];
                rr[j] = e[2];
            }
        });
    if let Some(k) = amp_lr
        .iter()
        .chain(&amp_ll)
        .position(|z| !(z.re.is_finite() && z.im.is_finite()))
    {
        return Err(Error::NumericDomain(format!(
            "two-photon amplitude {k} is not finite"
        )));
    }
    let quad = |a: &[C64]| -> f64 {
        (0..n)
            .map(|i| {
                prep.w[i]
                    * (0..n)
                        .map(|j| prep.w[j] * a[i * n + j].norm_sqr())
                        .sum::<f64>()
            })
            .sum()
    };
    let (p_ll, p_rr, p_lr) = (quad(&amp_ll), quad(&amp_rr), quad(&amp_lr));
    Ok(TwoPhotonOutput {
        grid: *grid,
        amp_ll,
        amp_rr,
        amp_lr,
        p_ll,
        p_rr,
        p_lr,
    })
}

/// Channel probabilities only, without storing the amplitude arrays.
///
/// Sums are restricted to the band where the amplitudes are non-negligible,
/// so very fine grids stay cheap.
pub fn two_photon_probabilities(
    input: &TwoPhotonInput,
    system: &TwoPhotonSystem,
    pte: &PteParams,
    grid: &KGrid,
) -> Result<TwoPhotonProbabilities> {
    let p = Prepared::new(input, system, pte, grid)?.probabilities();
    if !p.total().is_finite() {
        return Err(Error::NumericDomain(
            "two-photon probabilities are not finite".into(),
        ));
    }
    Ok(p)
}

/// One point of a Hong-Ou-Mandel sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomPoint {
    pub sigma: f64,
    pub p_counter: f64,
    pub p_co: f64,
    pub total: f64,
}

fn hom_point(sigma: f64, system: &TwoPhotonSystem, pte: &PteParams, k_c: f64) -> Result<HomPoint> {
    let env = GaussianEnvelope::new(k_c, sigma, 0.0)?;
    let grid = auto_grid(&env, system, pte)?;
    let p = two_photon_probabilities(
        &TwoPhotonInput::counter_propagating(env),
        system,
        pte,
        &grid,
    )?;
    Ok(HomPoint {
        sigma,
        p_counter: p.p_counter(),
        p_co: p.p_co(),
        total: p.total(),
    })
}

/// Counter- and co-propagating probabilities versus spectral width, each
/// on its own automatically sized grid.
pub fn hom_sweep(
    sigmas: &[f64],
    system: &TwoPhotonSystem,
    pte: &PteParams,
    k_c: f64,
) -> Result<Vec<HomPoint>> {
    sigmas
        .par_iter()
        .map(|&s| hom_point(s, system, pte, k_c))
        .collect()
}

/// Which outcome the switch is meant to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomTarget {
    /// Photons should leave bunched in one channel; error is `p_counter`.
    On,
    /// Photons should stay counter-propagating; error is `p_co`.
    Off,
}

impl HomTarget {
    /// A PTE close to balanced makes the system a beam splitter on resonance
    /// that must be switched off; a weakly or strongly reflecting PTE leaves
    /// a mirror-like resonance that must be switched on.
    pub fn for_pte(pte: &PteParams) -> Self {
        if (pte_matrix(pte).transmittance() - 0.5).abs() < 0.25 {
            HomTarget::Off
        } else {
            HomTarget::On
        }
    }

    pub fn error(&self, p: &HomPoint) -> f64 {
        match self {
            HomTarget::On => p.p_counter,
            HomTarget::Off => p.p_co,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            HomTarget::On => "p_counter",
            HomTarget::Off => "p_co",
        }
    }
}

/// Width that minimises the switching error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomOptimum {
    pub sigma: f64,
    pub error: f64,
    pub point: HomPoint,
    pub target: HomTarget,
}

/// Coarse logarithmic scan over `[lo, hi]` followed by golden-section
/// refinement around the best scan point, to tolerance `tol` in σ.
pub fn hom_optimum(
    system: &TwoPhotonSystem,
    pte: &PteParams,
    k_c: f64,
    target: HomTarget,
    (lo, hi): (f64, f64),
    tol: f64,
) -> Result<HomOptimum> {
    if !(lo > 0.0 && hi > lo && tol > 0.0) {
        return Err(Error::invalid(format!(
            "bad search interval [{lo}, {hi}] or tolerance {tol}"
        )));
    }
    const SCAN: usize = 16;
    let sig: Vec<f64> = (0..SCAN)
        .map(|i| lo * (hi / lo).powf(i as f64 / (SCAN - 1) as f64))
        .collect();
    let scan = hom_sweep(&sig, system, pte, k_c)?;
    let best = (0..SCAN)
        .min_by(|&a, &b| target.error(&scan[a]).total_cmp(&target.error(&scan[b])))
        .expect("scan is not empty");
    let (mut a, mut b) = (sig[best.saturating_sub(1)], sig[(best + 1).min(SCAN - 1)]);

    let eval = |s: f64| -> Result<(f64, HomPoint)> {
        let p = hom_point(s, system, pte, k_c)?;
        Ok((target.error(&p), p))
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1.0 <= f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = eval(x2)?;
        }
    }
    let mut cands = [
        (x1, f1),
        (x2, f2),
        (sig[best], (target.error(&scan[best]), scan[best])),
    ];
    cands.sort_by(|p, q| p.1 .0.total_cmp(&q.1 .0));
    let (sigma, (error, point)) = cands[0];
    Ok(HomOptimum {
        sigma,
        error,
        point,
        target,
    })
}

/// Single-frequency switch state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwitchState {
    /// `|t|² = 1/2`: counter-propagating photons bunch.
    On,
    /// `|t|² ∈ {0, 1}`: photons pass each other unaffected.
    Off,
    Neither,
}

/// Classifies frequency `k` by its single-photon transmittance.
pub fn classify_quasi_mono(
    k: f64,
    scatterer: &Scatterer,
    pte: &PteParams,
    tol: f64,
) -> Result<SwitchState> {
    if !(tol > 0.0) {
        return Err(Error::invalid(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let t2 = ScatterCoeffs::new(*scatterer, *pte).t(k)?.norm_sqr();
    Ok(if t2 < tol || (1.0 - t2).abs() < tol {
        SwitchState::Off
    } else if (t2 - 0.5).abs() < tol {
        SwitchState::On
    } else {
        SwitchState::Neither
    })
}

/// `(p_counter, p_co)` for monochromatic photons at `k`, where only linear
/// scattering contributes.
pub fn quasi_mono_probabilities(
    k: f64,
    scatterer: &Scatterer,
    pte: &PteParams,
) -> Result<(f64, f64)> {
    let (t, r) = ScatterCoeffs::new(*scatterer, *pte).at(k)?;
    let counter = (t * t + r * r).norm_sqr();
    let co = 2.0 * (t * r).norm_sqr() * 2.0;
    Ok((counter, co))
}

/// `|amp|²` for one channel pair; its full-plane quadrature is the channel
/// probability.
pub fn two_photon_density(output: &TwoPhotonOutput, pair: ChannelPair) -> Vec<f64> {
    output
        .amplitude(pair)
        .iter()
        .map(|z| z.norm_sqr())
        .collect()
}

/// `|ξ(p1) ξ(p2)|²` on `grid`, row-major.
pub fn input_density(env: &GaussianEnvelope, grid: &KGrid) -> Vec<f64> {
    let d: Vec<f64> = env.sample(grid).iter().map(|z| z.norm_sqr()).collect();
    d.iter()
        .flat_map(|a| d.iter().map(move |b| a * b))
        .collect()
}

/// Second moments of a density in the rotated coordinates `u = p1 + p2`,
/// `v = p1 - p2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMoments {
    pub mass: f64,
    pub mean_sum: f64,
    pub var_sum: f64,
    pub var_diff: f64,
}

impl DensityMoments {
    /// Ratio of the spreads along and across the lines `p1 + p2 = const`;
    /// 1 for an isotropic product of identical Gaussians.
    pub fn elongation(&self) -> f64 {
        (self.var_diff / self.var_sum).sqrt()
    }
}

pub fn density_moments(density: &[f64], grid: &KGrid) -> DensityMoments {
    let n = grid.len();
    let ps = grid.points();
    let w = grid.weights();
    let (mut m, mut su, mut sv) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let d = w[i] * w[j] * density[i * n + j];
            m += d;
            su += d * (ps[i] + ps[j]);
            sv += d * (ps[i] - ps[j]);
        }
    }
    let (mu, mv) = (su / m, sv / m);
    let (mut vu, mut vv) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let d = w[i] * w[j] * density[i * n + j];
            vu += d * (ps[i] + ps[j] - mu).powi(2);
            vv += d * (ps[i] - ps[j] - mv).powi(2);
        }
    }
    DensityMoments {
        mass: m,
        mean_sum: mu,
        var_sum: vu / m,
        var_diff: vv / m,
    }
}

/// Output amplitudes in the even/odd basis `e = (R+L)/√2`, `o = (R-L)/√2`.
///
/// A linear, mirror-symmetric system scatters each parity on its own, so
/// the same-parity amplitudes of a linear system are exact products of
/// single-photon amplitudes and the mixed amplitude vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct ParityAmplitudes {
    pub ee: Vec<C64>,
    pub oo: Vec<C64>,
    pub eo: Vec<C64>,
}

pub fn parity_amplitudes(out: &TwoPhotonOutput) -> ParityAmplitudes {
    let n = out.n();
    let s2 = 2f64.sqrt();
    let mut ee = vec![C64::new(0.0, 0.0); n * n];
    let mut oo = ee.clone();
    let mut eo = ee.clone();
    for i in 0..n {
        for j in 0..n {
            let f_ll = out.amp_ll[i * n + j] * s2;
            let f_rr = out.amp_rr[i * n + j] * s2;
            let lr = out.amp_lr[i * n + j];
            let lr_t = out.amp_lr[j * n + i];
            let same = (f_ll + f_rr) / 4.0;
            let cross = (lr + lr_t) / 4.0;
            ee[i * n + j] = (same + cross) * s2;
            oo[i * n + j] = (same - cross) * s2;
            eo[i * n + j] = (f_rr - f_ll) / 4.0 + (lr - lr_t) / 2.0;
        }
    }
    ParityAmplitudes { ee, oo, eo }
}

/// Singular values of an `n × n` row-major amplitude, largest first.
pub fn singular_values(amp: &[C64], n: usize) -> Result<Vec<f64>> {
    if amp.len() != n * n {
        return Err(Error::invalid(format!(
            "{} entries for a {n} x {n} matrix",
            amp.len()
        )));
    }
    let m = DMatrix::from_row_slice(n, n, amp);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Relative Frobenius distance to the best rank-1 approximation.
pub fn rank1_residual(amp: &[C64], n: usize) -> Result<f64> {
    let s = singular_values(amp, n)?;
    if !(s[0] > 0.0) {
        return Ok(0.0);
    }
    Ok(s[1..].iter().map(|x| x * x).sum::<f64>().sqrt() / s[0])
}
