//! Frequency-domain scattering matrices.
//!
//! A system with internal Hamiltonian `H` couples to waveguide and loss
//! channels through the matrix `κ` (channels × system modes); the PTE mixes
//! the guided channels through the real symmetric matrix `V`. Eliminating
//! the continuum yields the linear input-output system
//!
//! ```text
//! G = 1 + (i/2) V
//! A = -iH - ½ κ† G⁻¹ κ,   B = -i κ† G⁻¹,   C = G* G⁻¹,   D = -i G⁻¹ κ
//! S(p) = C + i D (p - iA)⁻¹ B
//! ```
//!
//! where `S[out, in]` is the delta-stripped single-photon amplitude. The
//! two-photon bound-state kernels returned here also omit the
//! energy-conserving delta; callers integrate along `p1 + p2 = k1 + k2`.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::{effective_rate, pte_matrix, Error, JcParams, PteParams, Result, TleParams, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// The matrices of the input-output system.
#[derive(Debug, Clone, PartialEq)]
pub struct IoMatrices {
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
    pub c: DMatrix<C64>,
    pub d: DMatrix<C64>,
    pub g: DMatrix<C64>,
}

impl IoMatrices {
    pub fn channels(&self) -> usize {
        self.c.nrows()
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }
}

/// Builds the input-output matrices.
///
/// `kappa` is channels × modes, `v` is the symmetric channel-mixing matrix
/// of the PTE and `h_sys` the modes × modes system Hamiltonian.
pub fn io_matrices(
    kappa: &DMatrix<C64>,
    v: &DMatrix<f64>,
    h_sys: &DMatrix<C64>,
) -> Result<IoMatrices> {
    let (nch, nmodes) = kappa.shape();
    if v.shape() != (nch, nch) {
        return Err(Error::invalid(format!(
            "PTE matrix is {:?} but there are {nch} channels",
            v.shape()
        )));
    }
    if h_sys.shape() != (nmodes, nmodes) {
        return Err(Error::invalid(format!(
            "system Hamiltonian is {:?} but there are {nmodes} modes",
            h_sys.shape()
        )));
    }
    if (v - v.transpose()).iter().any(|x| x.abs() > 0.0) {
        return Err(Error::invalid("PTE matrix must be symmetric"));
    }
    if v.iter()
        .chain(kappa.iter().flat_map(|z| [&z.re, &z.im]))
        .any(|x| !x.is_finite())
    {
        return Err(Error::invalid("coupling matrices must be finite"));
    }
    let g = DMatrix::<C64>::identity(nch, nch) + v.map(|x| I * (0.5 * x));
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::config("PTE matrix G = 1 + iV/2 is singular"))?;
    let kd = kappa.adjoint();
    let a = h_sys.map(|z| -I * z) - (&kd * &g_inv * kappa) * c(0.5);
    let b = (&kd * &g_inv).map(|z| -I * z);
    let cm = g.conjugate() * &g_inv;
    let d = (&g_inv * kappa).map(|z| -I * z);
    Ok(IoMatrices { a, b, c: cm, d, g })
}

fn pte_block(nch: usize, v: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nch, nch);
    m[(0, 1)] = v;
    m[(1, 0)] = v;
    m
}

/// Channels `(R, L, D)` for an emitter with a loss channel `D`.
pub fn tle_io(params: &TleParams, pte: &PteParams) -> Result<IoMatrices> {
    params.validate()?;
    let half = (params.gamma_wg / 2.0).sqrt();
    let kappa = DMatrix::from_row_slice(3, 1, &[c(half), c(half), c(params.gamma_loss.sqrt())]);
    let h = DMatrix::from_element(1, 1, c(params.omega_e));
    io_matrices(&kappa, &pte_block(3, pte.v), &h)
}

/// Channels `(R, L, D_c, D_e)` and modes `(cavity, emitter)`.
pub fn jc_io(params: &JcParams, pte: &PteParams) -> Result<IoMatrices> {
    params.validate()?;
    let half = (params.gamma_wg / 2.0).sqrt();
    #[rustfmt::skip]
    let kappa = DMatrix::from_row_slice(4, 2, &[
        c(half), c(0.0),
        c(half), c(0.0),
        c(params.gamma_c.sqrt()), c(0.0),
        c(0.0), c(params.gamma_e.sqrt()),
    ]);
    #[rustfmt::skip]
    let h = DMatrix::from_row_slice(2, 2, &[
        c(params.omega_c), c(params.g),
        c(params.g), c(params.omega_e),
    ]);
    io_matrices(&kappa, &pte_block(4, pte.v), &h)
}

/// Full single-photon S-matrix `S[out, in]` at frequency `p`.
pub fn s1_general(io: &IoMatrices, p: f64) -> Result<DMatrix<C64>> {
    let m = DMatrix::<C64>::identity(io.modes(), io.modes()) * c(p) - io.a.map(|z| I * z);
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::NumericDomain(format!("resolvent is singular at p = {p}")))?;
    let s = &io.c + (&io.d * inv * &io.b).map(|z| I * z);
    if s.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NumericDomain(format!(
            "S-matrix is not finite at p = {p}"
        )));
    }
    Ok(s)
}

/// `(t, r)` for a right-incident photon on the emitter.
pub fn s1_tle(k: f64, params: &TleParams, pte: &PteParams) -> Result<(C64, C64)> {
    params.validate()?;
    let b = pte_matrix(pte);
    let gt = effective_rate(params.gamma_wg, pte)?;
    let w = gt * gt / (2.0 * params.gamma_wg);
    let den = c(k - params.omega_e) + I * (gt + params.gamma_loss) / 2.0;
    let x = I * w / den;
    Ok((b.t_b - x, b.r_b - x))
}

/// `(t, r)` for a right-incident photon on the Jaynes-Cummings system.
pub fn s1_jc(k: f64, params: &JcParams, pte: &PteParams) -> Result<(C64, C64)> {
    params.validate()?;
    let b = pte_matrix(pte);
    let gt = effective_rate(params.gamma_wg, pte)?;
    let w = gt * gt / (2.0 * params.gamma_wg);
    let de = c(k - params.omega_e) + I * (params.gamma_e / 2.0);
    let dc = c(k - params.omega_c) + I * (gt + params.gamma_c) / 2.0;
    let x = I * de * w / (dc * de - params.g * params.g);
    Ok((b.t_b - x, b.r_b - x))
}

/// Any system whose single-photon response is known in closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scatterer {
    Tle(TleParams),
    Jc(JcParams),
}

/// Transmission and reflection of a right-incident photon as functions of
/// frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterCoeffs {
    pub scatterer: Scatterer,
    pub pte: PteParams,
}

impl ScatterCoeffs {
    pub fn new(scatterer: Scatterer, pte: PteParams) -> Self {
        Self { scatterer, pte }
    }

    pub fn at(&self, k: f64) -> Result<(C64, C64)> {
        match &self.scatterer {
            Scatterer::Tle(p) => s1_tle(k, p, &self.pte),
            Scatterer::Jc(p) => s1_jc(k, p, &self.pte),
        }
    }

    pub fn t(&self, k: f64) -> Result<C64> {
        Ok(self.at(k)?.0)
    }

    pub fn r(&self, k: f64) -> Result<C64> {
        Ok(self.at(k)?.1)
    }

    pub fn io(&self) -> Result<IoMatrices> {
        match &self.scatterer {
            Scatterer::Tle(p) => tle_io(p, &self.pte),
            Scatterer::Jc(p) => jc_io(p, &self.pte),
        }
    }
}

/// Two-photon bound-state kernel `𝓜(p1, p2, k1, k2)`.
///
/// Both kernels factorise as
///
/// ```text
/// 𝓜 = o(p1) o(p2) Σ_m c_m(p1 + p2) [u_m(k1) + u_m(k2)]
/// ```
///
/// which [`twophoton`](crate::twophoton) exploits to reduce the bound-state
/// integral to a one-dimensional convolution per total energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundStateKernel {
    Tle { params: TleParams, gamma_t: C64 },
    Jc { params: JcParams, gamma_t: C64 },
}

impl BoundStateKernel {
    pub fn tle(params: &TleParams, pte: &PteParams) -> Result<Self> {
        params.validate()?;
        if !params.is_lossless() {
            return Err(Error::unsupported(
                "the bound-state kernel is only known for a lossless emitter",
            ));
        }
        Ok(Self::Tle {
            params: *params,
            gamma_t: effective_rate(params.gamma_wg, pte)?,
        })
    }

    pub fn jc(params: &JcParams, pte: &PteParams) -> Result<Self> {
        params.validate()?;
        if !params.is_lossless() {
            return Err(Error::unsupported(
                "the bound-state kernel is only known for a lossless cavity and emitter",
            ));
        }
        Ok(Self::Jc {
            params: *params,
            gamma_t: effective_rate(params.gamma_wg, pte)?,
        })
    }

    /// `o(p)`: the factor attached to each outgoing photon.
    pub fn outer(&self, p: f64) -> C64 {
        match *self {
            Self::Tle { params, gamma_t } => tle_g(p, &params, gamma_t),
            Self::Jc { params, gamma_t } => jc_ge_gc(p, &params, gamma_t).0,
        }
    }

    /// `[u_0(k), u_1(k)]`: the factors attached to each incoming photon.
    pub fn inner(&self, k: f64) -> [C64; 2] {
        match *self {
            Self::Tle { params, gamma_t } => [tle_g(k, &params, gamma_t), c(0.0)],
            Self::Jc { params, gamma_t } => {
                let (ge, gc) = jc_ge_gc(k, &params, gamma_t);
                [ge, gc]
            }
        }
    }

    /// `[c_0(E), c_1(E)]` for total energy `E`.
    pub fn energy(&self, e: f64) -> [C64; 2] {
        match *self {
            Self::Tle { params, gamma_t } => {
                [gamma_t / (PI * (2.0 * params.gamma_wg).sqrt()), c(0.0)]
            }
            Self::Jc { params, gamma_t } => {
                let JcParams {
                    omega_c,
                    omega_e,
                    g,
                    gamma_wg,
                    ..
                } = params;
                let amp = (gamma_t / 2.0) / (gamma_wg / 2.0).sqrt();
                let two = c(e - 2.0 * omega_c) + I * gamma_t;
                let den = (c(e - (omega_c + omega_e)) + I * gamma_t / 2.0) * two - 2.0 * g * g;
                let pre = (-2.0 * I * g / (2.0 * PI).sqrt()) * (-amp / (2.0 * PI).sqrt()) / den;
                [pre * two, pre * (2.0 * g)]
            }
        }
    }

    /// Factor that turns the kernel into the bound-state contribution to the
    /// outgoing two-photon amplitude. The emitter kernel is the bare
    /// T-matrix element and picks up the `i` of `S = 1 + iT`; the
    /// Jaynes-Cummings kernel already includes it. Either way the result is
    /// the unique phase for which lossless scattering conserves probability.
    pub fn amplitude_factor(&self) -> C64 {
        match self {
            Self::Tle { .. } => I,
            Self::Jc { .. } => c(1.0),
        }
    }

    pub fn eval(&self, p1: f64, p2: f64, k1: f64, k2: f64) -> C64 {
        let cs = self.energy(p1 + p2);
        let (u1, u2) = (self.inner(k1), self.inner(k2));
        let inner = cs[0] * (u1[0] + u2[0]) + cs[1] * (u1[1] + u2[1]);
        self.outer(p1) * self.outer(p2) * inner
    }
}

/// `𝒢(k) = (Γ̃/√(2Γ)) / (k - ω_e + iΓ̃/2)`.
fn tle_g(k: f64, p: &TleParams, gt: C64) -> C64 {
    (gt / (2.0 * p.gamma_wg).sqrt()) / (c(k - p.omega_e) + I * gt / 2.0)
}

/// `(𝒢_e(k), 𝒢_c(k))` of the Jaynes-Cummings kernel.
fn jc_ge_gc(k: f64, p: &JcParams, gt: C64) -> (C64, C64) {
    let amp = (gt / 2.0) / (p.gamma_wg / 2.0).sqrt();
    let den = (c(k - p.omega_c) + I * gt / 2.0) * (k - p.omega_e) - p.g * p.g;
    (amp * p.g / den, amp * (k - p.omega_e) / den)
}

/// Bound-state kernel of a lossless emitter.
pub fn bound_state_tle(
    p1: f64,
    p2: f64,
    k1: f64,
    k2: f64,
    params: &TleParams,
    pte: &PteParams,
) -> Result<C64> {
    let m = BoundStateKernel::tle(params, pte)?.eval(p1, p2, k1, k2);
    crate::check_finite(m, "bound-state kernel")
}

/// Bound-state kernel of a lossless Jaynes-Cummings system.
pub fn bound_state_jc(
    p1: f64,
    p2: f64,
    k1: f64,
    k2: f64,
    params: &JcParams,
    pte: &PteParams,
) -> Result<C64> {
    let m = BoundStateKernel::jc(params, pte)?.eval(p1, p2, k1, k2);
    crate::check_finite(m, "bound-state kernel")
}
