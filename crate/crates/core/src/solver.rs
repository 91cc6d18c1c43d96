//! ADER-DG kernels: space-time predictor with volume integral, Riemann
//! solver, face integral and timestep computation.
//!
//! Each kernel is generic over its compute precision. Values cross kernel
//! boundaries as `f64` numbers that are exactly representable in the
//! producing kernel's format; the consuming kernel rounds them into its own
//! format on entry.
//!
//! Space-time arrays use the layout `((v * n1 + m) * n1 + iy) * n1 + ix`
//! with `m` the time node.

use std::fmt;

use rayon::prelude::*;

use crate::basis::{BasisSet, ReferenceBasis};
use crate::error::{Error, Result};
use crate::mesh::{FaceTrace, Grid};
use crate::pde::{Direction, PdeError, PdeSystem, MAX_VARS};
use crate::precision::{round_to_format, FloatFormat, PrecisionConfig, Real, BF16, F16};

/// Runs `$body` with `$T` bound to the scalar type of `$fmt`.
macro_rules! with_real {
    ($fmt:expr, $T:ident, $body:expr) => {
        match $fmt {
            FloatFormat::Fp64 => {
                type $T = f64;
                $body
            }
            FloatFormat::Fp32 => {
                type $T = f32;
                $body
            }
            FloatFormat::Fp16 => {
                type $T = F16;
                $body
            }
            FloatFormat::Bf16 => {
                type $T = BF16;
                $body
            }
        }
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    Predictor,
    Picard,
    Riemann,
    FaceIntegral,
    Timestep,
}

impl Kernel {
    pub fn name(self) -> &'static str {
        match self {
            Kernel::Predictor => "predictor",
            Kernel::Picard => "picard",
            Kernel::Riemann => "riemann",
            Kernel::FaceIntegral => "face_integral",
            Kernel::Timestep => "timestep",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Failure inside one kernel invocation.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelFault {
    Pde(PdeError),
    NonFinite,
}

impl From<PdeError> for KernelFault {
    fn from(e: PdeError) -> Self {
        KernelFault::Pde(e)
    }
}

impl fmt::Display for KernelFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelFault::Pde(e) => write!(f, "{e}"),
            KernelFault::NonFinite => f.write_str("nonfinite value"),
        }
    }
}

/// A run that produced nonfinite or inadmissible values.
#[derive(Debug, Clone, PartialEq)]
pub struct BlowUp {
    pub time: f64,
    pub kernel: Kernel,
    pub fault: KernelFault,
}

impl fmt::Display for BlowUp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {} kernel at t = {}", self.fault, self.kernel, self.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RiemannFlux {
    Rusanov,
    WellBalancedSwe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictorKind {
    CauchyKowalevskaya,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stability factor; defaults to [`default_cfl`] of the grid order.
    pub cfl: Option<f64>,
    /// Defaults to `N + 2`.
    pub picard_max_iters: Option<usize>,
    /// Defaults to `1e-2 * epsilon(picard)`.
    pub picard_tol: Option<f64>,
    pub precision: PrecisionConfig,
    pub parallel: bool,
    /// Forces a predictor; by default linear systems use CK.
    pub predictor: Option<PredictorKind>,
    pub riemann: Option<RiemannFlux>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            cfl: None,
            picard_max_iters: None,
            picard_tol: None,
            precision: PrecisionConfig::default(),
            parallel: false,
            predictor: None,
            riemann: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.cfl {
            if !(c > 0.0 && c < 1.0) {
                return Err(Error::Config(format!("C_CFL must lie in (0, 1), got {c}")));
            }
        }
        if self.picard_max_iters == Some(0) {
            return Err(Error::Config("picard_max_iters must be at least 1".into()));
        }
        if let Some(t) = self.picard_tol {
            if !(t >= 0.0) {
                return Err(Error::Config("picard_tol must be nonnegative".into()));
            }
        }
        Ok(())
    }

    pub fn cfl(&self, order: usize) -> f64 {
        self.cfl.unwrap_or_else(|| default_cfl(order))
    }

    pub fn max_iters(&self, order: usize) -> usize {
        self.picard_max_iters.unwrap_or(order + 2)
    }

    pub fn tol(&self) -> f64 {
        self.picard_tol
            .unwrap_or(1e-2 * self.precision.picard.epsilon())
    }
}

/// Space-time predictor output for one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeSolution<T> {
    pub order: usize,
    pub nvars: usize,
    pub qhat: Vec<T>,
    pub fx: Vec<T>,
    pub fy: Vec<T>,
}

impl<T: Real> SpaceTimeSolution<T> {
    pub fn index(&self, v: usize, m: usize, iy: usize, ix: usize) -> usize {
        let n1 = self.order + 1;
        ((v * n1 + m) * n1 + iy) * n1 + ix
    }

    pub fn is_finite(&self) -> bool {
        self.qhat
            .iter()
            .chain(&self.fx)
            .chain(&self.fy)
            .all(|v| v.is_finite())
    }

    /// Relative max-norm distance, evaluated in `f64`.
    pub fn relative_difference<U: Real>(&self, other: &SpaceTimeSolution<U>) -> f64 {
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (a, b) in self.qhat.iter().zip(&other.qhat) {
            diff = diff.max((a.to_f64() - b.to_f64()).abs());
            scale = scale.max(a.to_f64().abs());
        }
        if scale == 0.0 {
            diff
        } else {
            diff / scale
        }
    }
}

#[inline]
fn deriv_x<T: Real>(b: &ReferenceBasis<T>, src: &[T], out: &mut [T]) {
    let n1 = b.n1();
    for iy in 0..n1 {
        let row = &src[iy * n1..(iy + 1) * n1];
        for ix in 0..n1 {
            let d = &b.deriv[ix * n1..(ix + 1) * n1];
            let mut acc = T::zero();
            for l in 0..n1 {
                acc += d[l] * row[l];
            }
            out[iy * n1 + ix] = acc;
        }
    }
}

#[inline]
fn deriv_y<T: Real>(b: &ReferenceBasis<T>, src: &[T], out: &mut [T]) {
    let n1 = b.n1();
    for iy in 0..n1 {
        let d = &b.deriv[iy * n1..(iy + 1) * n1];
        for ix in 0..n1 {
            let mut acc = T::zero();
            for l in 0..n1 {
                acc += d[l] * src[l * n1 + ix];
            }
            out[iy * n1 + ix] = acc;
        }
    }
}

/// Pointwise fluxes of `nslabs` consecutive time slabs.
fn slab_fluxes<T: Real>(
    sys: &PdeSystem,
    q: &[T],
    nn: usize,
    nslabs: usize,
    fx: &mut [T],
    fy: &mut [T],
) -> Result<(), PdeError> {
    let nv = sys.nvars();
    let stride = nslabs * nn;
    let mut state = [T::zero(); MAX_VARS];
    let mut out = [T::zero(); MAX_VARS];
    for m in 0..nslabs {
        for node in 0..nn {
            let base = m * nn + node;
            for v in 0..nv {
                state[v] = q[v * stride + base];
            }
            sys.flux(&state[..nv], Direction::X, &mut out)?;
            for v in 0..nv {
                fx[v * stride + base] = out[v];
            }
            sys.flux(&state[..nv], Direction::Y, &mut out)?;
            for v in 0..nv {
                fy[v * stride + base] = out[v];
            }
        }
    }
    Ok(())
}

/// Strong-form residual `div F(q) + B(q) grad q` on every node of `nslabs`
/// slabs, scaled by `1/h`.
fn residual<T: Real>(
    sys: &PdeSystem,
    b: &ReferenceBasis<T>,
    inv_h: T,
    q: &[T],
    nslabs: usize,
    out: &mut [T],
) -> Result<(), PdeError> {
    let nv = sys.nvars();
    let nn = b.n1() * b.n1();
    let stride = nslabs * nn;
    let mut fx = vec![T::zero(); nv * stride];
    let mut fy = vec![T::zero(); nv * stride];
    slab_fluxes(sys, q, nn, nslabs, &mut fx, &mut fy)?;
    let mut dx = vec![T::zero(); nn];
    let mut dy = vec![T::zero(); nn];
    for v in 0..nv {
        for m in 0..nslabs {
            let off = v * stride + m * nn;
            deriv_x(b, &fx[off..off + nn], &mut dx);
            deriv_y(b, &fy[off..off + nn], &mut dy);
            for node in 0..nn {
                out[off + node] = inv_h * (dx[node] + dy[node]);
            }
        }
    }
    if sys.has_ncp() {
        add_ncp(sys, b, inv_h, q, nslabs, out, T::one());
    }
    Ok(())
}

/// Adds `scale * B(q) grad q` at every node.
fn add_ncp<T: Real>(
    sys: &PdeSystem,
    b: &ReferenceBasis<T>,
    inv_h: T,
    q: &[T],
    nslabs: usize,
    out: &mut [T],
    scale: T,
) {
    let nv = sys.nvars();
    let nn = b.n1() * b.n1();
    let stride = nslabs * nn;
    let mut gx = vec![T::zero(); nv * nn];
    let mut gy = vec![T::zero(); nv * nn];
    let mut tmp = vec![T::zero(); nn];
    let mut state = [T::zero(); MAX_VARS];
    let mut sx = [T::zero(); MAX_VARS];
    let mut sy = [T::zero(); MAX_VARS];
    let mut res = [T::zero(); MAX_VARS];
    for m in 0..nslabs {
        for v in 0..nv {
            let off = v * stride + m * nn;
            deriv_x(b, &q[off..off + nn], &mut tmp);
            for node in 0..nn {
                gx[v * nn + node] = inv_h * tmp[node];
            }
            deriv_y(b, &q[off..off + nn], &mut tmp);
            for node in 0..nn {
                gy[v * nn + node] = inv_h * tmp[node];
            }
        }
        for node in 0..nn {
            for v in 0..nv {
                state[v] = q[v * stride + m * nn + node];
                sx[v] = gx[v * nn + node];
                sy[v] = gy[v * nn + node];
            }
            sys.ncp(&state[..nv], &sx[..nv], &sy[..nv], &mut res);
            for v in 0..nv {
                let i = v * stride + m * nn + node;
                out[i] += scale * res[v];
            }
        }
    }
}

fn cast_vec<T: Real>(values: &[f64]) -> Vec<T> {
    values.iter().map(|&x| T::from_f64(x)).collect()
}

fn fill_fluxes<T: Real>(sys: &PdeSystem, st: &mut SpaceTimeSolution<T>) -> Result<(), PdeError> {
    let nn = (st.order + 1).pow(2);
    slab_fluxes(sys, &st.qhat, nn, st.order + 1, &mut st.fx, &mut st.fy)
}

/// Cauchy-Kowalevskaya predictor: Taylor series of nodal time derivatives
/// obtained from the discrete operator `L = -(A D_x + B D_y) / h`.
pub fn predictor_ck<P: Real>(
    q: &[f64],
    dt: f64,
    h: f64,
    sys: &PdeSystem,
    b: &ReferenceBasis<P>,
) -> Result<SpaceTimeSolution<P>, KernelFault> {
    let order = b.order;
    let n1 = order + 1;
    let nn = n1 * n1;
    let nv = sys.nvars();
    let inv_h = P::from_f64(1.0 / h);
    let mut derivs: Vec<Vec<P>> = Vec::with_capacity(n1);
    derivs.push(cast_vec(q));
    let mut res = vec![P::zero(); nv * nn];
    for k in 1..=order {
        residual(sys, b, inv_h, &derivs[k - 1], 1, &mut res)?;
        derivs.push(res.iter().map(|&r| -r).collect());
    }
    let dt_p = P::from_f64(dt);
    let mut qhat = vec![P::zero(); nv * n1 * nn];
    for m in 0..n1 {
        let step = b.nodes[m] * dt_p;
        let mut coef = vec![P::one(); n1];
        for k in 1..=order {
            coef[k] = coef[k - 1] * step / P::from_f64(k as f64);
        }
        for v in 0..nv {
            for node in 0..nn {
                let mut acc = derivs[0][v * nn + node];
                for k in 1..=order {
                    acc += coef[k] * derivs[k][v * nn + node];
                }
                qhat[(v * n1 + m) * nn + node] = acc;
            }
        }
    }
    let len = qhat.len();
    let mut st = SpaceTimeSolution {
        order,
        nvars: nv,
        qhat,
        fx: vec![P::zero(); len],
        fy: vec![P::zero(); len],
    };
    fill_fluxes(sys, &mut st)?;
    if !st.is_finite() {
        return Err(KernelFault::NonFinite);
    }
    Ok(st)
}

/// Picard fixed-point iteration of the space-time system, with the loop in
/// precision `Pi` and the result cast to `P`.
///
/// Returns the solution and the number of sweeps performed.
pub fn predictor_picard<Pi: Real, P: Real>(
    q: &[f64],
    dt: f64,
    h: f64,
    sys: &PdeSystem,
    b: &ReferenceBasis<Pi>,
    max_iters: usize,
    tol: f64,
) -> Result<(SpaceTimeSolution<P>, usize), KernelFault> {
    let order = b.order;
    let n1 = order + 1;
    let nn = n1 * n1;
    let nv = sys.nvars();
    let inv_h = Pi::from_f64(1.0 / h);
    let dt_p = Pi::from_f64(dt);
    let q0: Vec<Pi> = cast_vec(q);
    let len = nv * n1 * nn;
    let mut qhat = vec![Pi::zero(); len];
    for v in 0..nv {
        for m in 0..n1 {
            let off = (v * n1 + m) * nn;
            qhat[off..off + nn].copy_from_slice(&q0[v * nn..(v + 1) * nn]);
        }
    }
    let mut res = vec![Pi::zero(); len];
    let mut next = vec![Pi::zero(); len];
    let mut iters = 0;
    while iters < max_iters {
        iters += 1;
        residual(sys, b, inv_h, &qhat, n1, &mut res)?;
        let mut diff: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for v in 0..nv {
            for m in 0..n1 {
                let lift = &b.time_lift[m * n1..(m + 1) * n1];
                for node in 0..nn {
                    let mut acc = Pi::zero();
                    for l in 0..n1 {
                        acc += lift[l] * res[(v * n1 + l) * nn + node];
                    }
                    let i = (v * n1 + m) * nn + node;
                    let val = q0[v * nn + node] - dt_p * acc;
                    let d = (val.to_f64() - qhat[i].to_f64()).abs();
                    diff = diff.max(d);
                    scale = scale.max(val.to_f64().abs());
                    next[i] = val;
                }
            }
        }
        std::mem::swap(&mut qhat, &mut next);
        if !diff.is_finite() || !scale.is_finite() {
            return Err(KernelFault::NonFinite);
        }
        if diff <= tol * scale {
            break;
        }
    }
    let mut st = SpaceTimeSolution {
        order,
        nvars: nv,
        qhat: qhat.iter().map(|v| v.cast::<P>()).collect(),
        fx: vec![P::zero(); len],
        fy: vec![P::zero(); len],
    };
    fill_fluxes(sys, &mut st).map_err(KernelFault::Pde)?;
    if !st.is_finite() {
        return Err(KernelFault::NonFinite);
    }
    Ok((st, iters))
}

/// One application of the Picard map to `st`, for fixed-point checks.
pub fn picard_map<T: Real>(
    st: &SpaceTimeSolution<T>,
    q: &[f64],
    dt: f64,
    h: f64,
    sys: &PdeSystem,
    b: &ReferenceBasis<T>,
) -> Result<Vec<T>, PdeError> {
    let n1 = b.n1();
    let nn = n1 * n1;
    let nv = sys.nvars();
    let mut res = vec![T::zero(); st.qhat.len()];
    residual(sys, b, T::from_f64(1.0 / h), &st.qhat, n1, &mut res)?;
    let dt_p = T::from_f64(dt);
    let mut out = vec![T::zero(); st.qhat.len()];
    for v in 0..nv {
        for m in 0..n1 {
            for node in 0..nn {
                let mut acc = T::zero();
                for l in 0..n1 {
                    acc += b.time_lift[m * n1 + l] * res[(v * n1 + l) * nn + node];
                }
                out[(v * n1 + m) * nn + node] = T::from_f64(q[v * nn + node]) - dt_p * acc;
            }
        }
    }
    Ok(out)
}

/// Weak-form volume contribution `dt/h * K^T Fbar - dt * ncp-bar` per node.
pub fn volume_integral<T: Real>(
    st: &SpaceTimeSolution<T>,
    sys: &PdeSystem,
    dt: f64,
    h: f64,
    b: &ReferenceBasis<T>,
) -> Vec<T> {
    let n1 = b.n1();
    let nn = n1 * n1;
    let nv = st.nvars;
    let dt_h = T::from_f64(dt / h);
    let mut fbx = vec![T::zero(); nv * nn];
    let mut fby = vec![T::zero(); nv * nn];
    for v in 0..nv {
        for m in 0..n1 {
            let w = b.weights[m];
            let off = (v * n1 + m) * nn;
            for node in 0..nn {
                fbx[v * nn + node] += w * st.fx[off + node];
                fby[v * nn + node] += w * st.fy[off + node];
            }
        }
    }
    let mut upd = vec![T::zero(); nv * nn];
    for v in 0..nv {
        let fx = &fbx[v * nn..(v + 1) * nn];
        let fy = &fby[v * nn..(v + 1) * nn];
        for ky in 0..n1 {
            for kx in 0..n1 {
                let mut sx = T::zero();
                for i in 0..n1 {
                    sx += b.stiffness[kx * n1 + i] * fx[ky * n1 + i];
                }
                let mut sy = T::zero();
                for j in 0..n1 {
                    sy += b.stiffness[ky * n1 + j] * fy[j * n1 + kx];
                }
                upd[v * nn + ky * n1 + kx] = dt_h * (sx + sy);
            }
        }
    }
    if sys.has_ncp() {
        let mut ncp = vec![T::zero(); st.qhat.len()];
        add_ncp(sys, b, T::from_f64(1.0 / h), &st.qhat, n1, &mut ncp, T::one());
        let dt_p = T::from_f64(dt);
        for v in 0..nv {
            for node in 0..nn {
                let mut acc = T::zero();
                for m in 0..n1 {
                    acc += b.weights[m] * ncp[(v * n1 + m) * nn + node];
                }
                let i = v * nn + node;
                upd[i] -= dt_p * acc;
            }
        }
    }
    upd
}

/// Face traces of state and normal flux in the order left, right, bottom,
/// top, rounded to `corrector`.
pub fn extrapolate_to_faces<T: Real>(
    st: &SpaceTimeSolution<T>,
    b: &ReferenceBasis<T>,
    corrector: FloatFormat,
) -> [FaceTrace; 4] {
    let n1 = b.n1();
    let nn = n1 * n1;
    let nv = st.nvars;
    let len = nv * nn;
    let mut traces: [FaceTrace; 4] = std::array::from_fn(|_| FaceTrace {
        q: vec![0.0; len],
        flux: vec![0.0; len],
    });
    let r = |x: T| round_to_format(x.to_f64(), corrector);
    for v in 0..nv {
        for m in 0..n1 {
            let off = (v * n1 + m) * nn;
            for s in 0..n1 {
                let dst = (v * n1 + s) * n1 + m;
                let (mut ql, mut qr, mut fl, mut fr) = (T::zero(), T::zero(), T::zero(), T::zero());
                let (mut qb, mut qt, mut fb, mut ft) = (T::zero(), T::zero(), T::zero(), T::zero());
                for l in 0..n1 {
                    let (pl, pr) = (b.proj_left[l], b.proj_right[l]);
                    let ix = off + s * n1 + l;
                    ql += pl * st.qhat[ix];
                    qr += pr * st.qhat[ix];
                    fl += pl * st.fx[ix];
                    fr += pr * st.fx[ix];
                    let iy = off + l * n1 + s;
                    qb += pl * st.qhat[iy];
                    qt += pr * st.qhat[iy];
                    fb += pl * st.fy[iy];
                    ft += pr * st.fy[iy];
                }
                traces[0].q[dst] = r(ql);
                traces[0].flux[dst] = r(fl);
                traces[1].q[dst] = r(qr);
                traces[1].flux[dst] = r(fr);
                traces[2].q[dst] = r(qb);
                traces[2].flux[dst] = r(fb);
                traces[3].q[dst] = r(qt);
                traces[3].flux[dst] = r(ft);
            }
        }
    }
    traces
}

/// `1/2 (F_L + F_R) + lambda/2 (q_L - q_R)`.
#[inline]
pub fn rusanov_flux<T: Real>(ql: &[T], qr: &[T], fl: &[T], fr: &[T], lambda: T, out: &mut [T]) {
    let half = T::half();
    let hl = half * lambda;
    for v in 0..out.len() {
        out[v] = half * (fl[v] + fr[v]) + hl * (ql[v] - qr[v]);
    }
}

/// Well-balanced Rusanov variant for shallow water.
///
/// The dissipation acts on the surface elevation instead of the depth and
/// the non-conservative jump `D = B(q_avg) (q_R - q_L)` is split between
/// the two cells: the minus cell receives `G + D/2`, the plus cell `G - D/2`.
#[allow(clippy::too_many_arguments)]
pub fn swe_wellbalanced_flux<T: Real>(
    sys: &PdeSystem,
    ql: &[T],
    qr: &[T],
    fl: &[T],
    fr: &[T],
    lambda: T,
    dir: Direction,
    out_minus: &mut [T],
    out_plus: &mut [T],
) {
    let half = T::half();
    let hl = half * lambda;
    let mut avg = [T::zero(); MAX_VARS];
    let mut jump = [T::zero(); MAX_VARS];
    for v in 0..4 {
        avg[v] = half * (ql[v] + qr[v]);
        jump[v] = qr[v] - ql[v];
    }
    let mut d = [T::zero(); MAX_VARS];
    sys.ncp_dir(&avg[..4], &jump[..4], dir, &mut d);
    let diss = [
        (ql[0] + ql[3]) - (qr[0] + qr[3]),
        ql[1] - qr[1],
        ql[2] - qr[2],
        T::zero(),
    ];
    for v in 0..4 {
        let g = half * (fl[v] + fr[v]) + hl * diss[v];
        let hd = half * d[v];
        out_minus[v] = g + hd;
        out_plus[v] = g - hd;
    }
}

/// Riemann solve at every space-time node of one face.
fn riemann_face<C: Real>(
    sys: &PdeSystem,
    kind: RiemannFlux,
    dir: Direction,
    minus: &FaceTrace,
    plus: &FaceTrace,
    n1: usize,
) -> Result<(Vec<f64>, Vec<f64>), KernelFault> {
    let nv = sys.nvars();
    let len = nv * n1 * n1;
    let mut gm = vec![0.0; len];
    let mut gp = vec![0.0; len];
    let (mut ql, mut qr, mut fl, mut fr) = (
        [C::zero(); MAX_VARS],
        [C::zero(); MAX_VARS],
        [C::zero(); MAX_VARS],
        [C::zero(); MAX_VARS],
    );
    let mut om = [C::zero(); MAX_VARS];
    let mut op = [C::zero(); MAX_VARS];
    let stride = n1 * n1;
    for node in 0..stride {
        for v in 0..nv {
            let i = v * stride + node;
            ql[v] = C::from_f64(minus.q[i]);
            qr[v] = C::from_f64(plus.q[i]);
            fl[v] = C::from_f64(minus.flux[i]);
            fr[v] = C::from_f64(plus.flux[i]);
        }
        let lam = sys
            .max_abs_eigenvalue(&ql[..nv], dir)?
            .max_of(sys.max_abs_eigenvalue(&qr[..nv], dir)?);
        match kind {
            RiemannFlux::Rusanov => {
                rusanov_flux(&ql[..nv], &qr[..nv], &fl[..nv], &fr[..nv], lam, &mut om[..nv]);
                op = om;
            }
            RiemannFlux::WellBalancedSwe => {
                swe_wellbalanced_flux(sys, &ql, &qr, &fl, &fr, lam, dir, &mut om, &mut op);
            }
        }
        for v in 0..nv {
            if !om[v].is_finite() || !op[v].is_finite() {
                return Err(KernelFault::NonFinite);
            }
            let i = v * stride + node;
            gm[i] = om[v].to_f64();
            gp[i] = op[v].to_f64();
        }
    }
    Ok((gm, gp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceSide {
    /// Left or bottom face, outward normal pointing to negative coordinates.
    Lower,
    /// Right or top face.
    Upper,
}

/// Surface contribution of one face to the nodal update of a cell.
///
/// `flux` has the trace layout `(v * n1 + s) * n1 + m` and holds the
/// numerical flux in the positive coordinate direction.
pub fn face_integral<T: Real>(
    b: &ReferenceBasis<T>,
    nvars: usize,
    flux: &[f64],
    dir: Direction,
    side: FaceSide,
    dt: f64,
    h: f64,
) -> Vec<T> {
    let n1 = b.n1();
    let nn = n1 * n1;
    let dt_h = T::from_f64(dt / h);
    let (coef, sign) = match side {
        FaceSide::Lower => (&b.face_left, T::one()),
        FaceSide::Upper => (&b.face_right, -T::one()),
    };
    let mut upd = vec![T::zero(); nvars * nn];
    for v in 0..nvars {
        for s in 0..n1 {
            let mut g = T::zero();
            for m in 0..n1 {
                g += b.weights[m] * T::from_f64(flux[(v * n1 + s) * n1 + m]);
            }
            let g = sign * (dt_h * g);
            for k in 0..n1 {
                let node = match dir {
                    Direction::X => s * n1 + k,
                    Direction::Y => k * n1 + s,
                };
                upd[v * nn + node] = coef[k] * g;
            }
        }
    }
    upd
}

/// Order-dependent stability factor, about 85% of the largest stable value
/// measured for the planar acoustic wave with the Rusanov flux.
pub fn default_cfl(order: usize) -> f64 {
    const TABLE: [f64; 10] = [0.9, 0.9, 0.75, 0.65, 0.55, 0.47, 0.42, 0.36, 0.33, 0.3];
    TABLE[order.min(TABLE.len() - 1)]
}

/// `C_CFL h / (d (2N + 1) lambda_max)` with `d = 2`.
pub fn cfl_timestep(cfl: f64, h: f64, order: usize, lambda_max: f64) -> f64 {
    cfl * h / (2.0 * (2 * order + 1) as f64 * lambda_max)
}

/// Global timestep from the stored solution, reduced in fixed cell order.
pub fn compute_timestep(grid: &Grid, sys: &PdeSystem, cfl: f64) -> Result<f64, KernelFault> {
    let nv = sys.nvars();
    let nn = grid.n1() * grid.n1();
    let mut dt = f64::INFINITY;
    let mut state = [0.0; MAX_VARS];
    for cell in &grid.cells {
        let mut lam: f64 = 0.0;
        for node in 0..nn {
            for v in 0..nv {
                state[v] = cell.coeffs[v * nn + node];
            }
            let s = sys.max_wave_speed(&state[..nv])?;
            lam = lam.max(s);
        }
        dt = dt.min(cfl_timestep(cfl, grid.h, grid.order, lam));
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(KernelFault::NonFinite);
    }
    Ok(dt)
}

struct CellOutput {
    update: Vec<f64>,
    traces: [FaceTrace; 4],
}

/// Statistics of a completed run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStats {
    pub steps: usize,
    pub time: f64,
}

/// Time-stepping driver owning grid, bases and configuration.
pub struct Solver {
    pub sys: PdeSystem,
    pub grid: Grid,
    pub basis: BasisSet,
    pub config: SolverConfig,
    pub time: f64,
    pub steps: usize,
    predictor: PredictorKind,
    riemann: RiemannFlux,
}

impl Solver {
    pub fn new(sys: PdeSystem, grid: Grid, config: SolverConfig) -> Result<Self> {
        config.validate()?;
        if grid.nvars != sys.nvars() {
            return Err(Error::Internal("grid and system disagree on nvars".into()));
        }
        if grid.storage != config.precision.storage {
            return Err(Error::Internal("grid storage format differs from config".into()));
        }
        let basis = BasisSet::new(grid.order, &config.precision)?;
        let predictor = config.predictor.unwrap_or(if sys.is_linear() {
            PredictorKind::CauchyKowalevskaya
        } else {
            PredictorKind::Picard
        });
        if predictor == PredictorKind::CauchyKowalevskaya && !sys.is_linear() {
            return Err(Error::Config(
                "Cauchy-Kowalevskaya predictor needs a linear system".into(),
            ));
        }
        let riemann = config.riemann.unwrap_or(if sys.has_ncp() {
            RiemannFlux::WellBalancedSwe
        } else {
            RiemannFlux::Rusanov
        });
        if riemann == RiemannFlux::WellBalancedSwe && !sys.has_ncp() {
            return Err(Error::Config("well-balanced flux needs shallow water".into()));
        }
        Ok(Self {
            sys,
            grid,
            basis,
            config,
            time: 0.0,
            steps: 0,
            predictor,
            riemann,
        })
    }

    pub fn predictor_kind(&self) -> PredictorKind {
        self.predictor
    }

    fn blow(&self, kernel: Kernel, fault: KernelFault) -> BlowUp {
        BlowUp {
            time: self.time,
            kernel,
            fault,
        }
    }

    pub fn compute_timestep(&self) -> Result<f64, BlowUp> {
        compute_timestep(&self.grid, &self.sys, self.config.cfl(self.grid.order))
            .map_err(|f| self.blow(Kernel::Timestep, f))
    }

    /// Predictor, volume integral and extrapolation for one cell.
    fn predict_cell<P: Real, Pi: Real>(
        &self,
        cell: usize,
        dt: f64,
    ) -> Result<CellOutput, (Kernel, KernelFault)> {
        let q = &self.grid.cells[cell].coeffs;
        let bp = self.basis.get::<P>();
        let h = self.grid.h;
        let st = match self.predictor {
            PredictorKind::CauchyKowalevskaya => {
                predictor_ck::<P>(q, dt, h, &self.sys, bp).map_err(|f| (Kernel::Predictor, f))?
            }
            PredictorKind::Picard => {
                let bpi = self.basis.get::<Pi>();
                predictor_picard::<Pi, P>(
                    q,
                    dt,
                    h,
                    &self.sys,
                    bpi,
                    self.config.max_iters(self.grid.order),
                    self.config.tol(),
                )
                .map_err(|f| (Kernel::Picard, f))?
                .0
            }
        };
        let upd = volume_integral(&st, &self.sys, dt, h, bp);
        if upd.iter().any(|v| !v.is_finite()) {
            return Err((Kernel::Predictor, KernelFault::NonFinite));
        }
        let traces = extrapolate_to_faces(&st, bp, self.config.precision.corrector);
        Ok(CellOutput {
            update: upd.iter().map(|v| v.to_f64()).collect(),
            traces,
        })
    }

    fn predict_all(&self, dt: f64) -> Result<Vec<CellOutput>, BlowUp> {
        let pc = self.config.precision;
        let picard = if self.predictor == PredictorKind::Picard {
            pc.picard
        } else {
            pc.predictor
        };
        let ncells = self.grid.num_cells();
        let results: Vec<Result<CellOutput, (Kernel, KernelFault)>> =
            with_real!(pc.predictor, P, {
                with_real!(picard, Pi, {
                    if self.config.parallel {
                        (0..ncells)
                            .into_par_iter()
                            .map(|c| self.predict_cell::<P, Pi>(c, dt))
                            .collect()
                    } else {
                        (0..ncells)
                            .map(|c| self.predict_cell::<P, Pi>(c, dt))
                            .collect()
                    }
                })
            });
        results
            .into_iter()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|(k, f)| self.blow(k, f))
    }

    fn solve_faces<C: Real>(&mut self) -> Result<(), BlowUp> {
        let n1 = self.grid.n1();
        let sys = self.sys;
        let kind = self.riemann;
        for dir in Direction::BOTH {
            let faces = match dir {
                Direction::X => &self.grid.x_faces,
                Direction::Y => &self.grid.y_faces,
            };
            let solve = |f: &crate::mesh::FaceBuffer| {
                riemann_face::<C>(&sys, kind, dir, &f.minus, &f.plus, n1)
            };
            let fluxes: Vec<_> = if self.config.parallel {
                faces.par_iter().map(solve).collect()
            } else {
                faces.iter().map(solve).collect()
            };
            let mut out = Vec::with_capacity(fluxes.len());
            for f in fluxes {
                out.push(f.map_err(|e| BlowUp {
                    time: self.time,
                    kernel: Kernel::Riemann,
                    fault: e,
                })?);
            }
            let faces = match dir {
                Direction::X => &mut self.grid.x_faces,
                Direction::Y => &mut self.grid.y_faces,
            };
            for (face, (gm, gp)) in faces.iter_mut().zip(out) {
                face.flux_minus = gm;
                face.flux_plus = gp;
            }
        }
        Ok(())
    }

    /// Face integrals of one cell in the order left, right, bottom, top.
    fn cell_face_updates<C: Real>(&self, cell: usize, dt: f64) -> [Vec<f64>; 4] {
        let b = self.basis.get::<C>();
        let nv = self.sys.nvars();
        let h = self.grid.h;
        let (xl, xu) = self.grid.cell_faces(cell, Direction::X);
        let (yl, yu) = self.grid.cell_faces(cell, Direction::Y);
        let conv = |v: Vec<C>| v.into_iter().map(|x| x.to_f64()).collect::<Vec<f64>>();
        [
            conv(face_integral(
                b,
                nv,
                &self.grid.x_faces[xl].flux_plus,
                Direction::X,
                FaceSide::Lower,
                dt,
                h,
            )),
            conv(face_integral(
                b,
                nv,
                &self.grid.x_faces[xu].flux_minus,
                Direction::X,
                FaceSide::Upper,
                dt,
                h,
            )),
            conv(face_integral(
                b,
                nv,
                &self.grid.y_faces[yl].flux_plus,
                Direction::Y,
                FaceSide::Lower,
                dt,
                h,
            )),
            conv(face_integral(
                b,
                nv,
                &self.grid.y_faces[yu].flux_minus,
                Direction::Y,
                FaceSide::Upper,
                dt,
                h,
            )),
        ]
    }

    /// Advances the solution by `dt`.
    pub fn step(&mut self, dt: f64) -> Result<(), BlowUp> {
        let pc = self.config.precision;
        let outputs = self.predict_all(dt)?;
        let mut volume = Vec::with_capacity(outputs.len());
        for (cell, out) in outputs.into_iter().enumerate() {
            let [left, right, bottom, top] = out.traces;
            let (xl, xu) = self.grid.cell_faces(cell, Direction::X);
            let (yl, yu) = self.grid.cell_faces(cell, Direction::Y);
            self.grid.x_faces[xl].plus = left;
            self.grid.x_faces[xu].minus = right;
            self.grid.y_faces[yl].plus = bottom;
            self.grid.y_faces[yu].minus = top;
            volume.push(out.update);
        }
        with_real!(pc.corrector, C, self.solve_faces::<C>())?;
        let ncells = self.grid.num_cells();
        let face_updates: Vec<[Vec<f64>; 4]> = with_real!(pc.corrector, C, {
            if self.config.parallel {
                (0..ncells)
                    .into_par_iter()
                    .map(|c| self.cell_face_updates::<C>(c, dt))
                    .collect()
            } else {
                (0..ncells)
                    .map(|c| self.cell_face_updates::<C>(c, dt))
                    .collect()
            }
        });
        let s = pc.storage;
        for (cell, (vol, faces)) in volume.iter().zip(&face_updates).enumerate() {
            let coeffs = &mut self.grid.cells[cell].coeffs;
            for (i, c) in coeffs.iter_mut().enumerate() {
                let mut q = round_to_format(*c + round_to_format(vol[i], s), s);
                for f in faces {
                    q = round_to_format(q + round_to_format(f[i], s), s);
                }
                *c = q;
            }
            if coeffs.iter().any(|v| !v.is_finite()) {
                return Err(self.blow(Kernel::FaceIntegral, KernelFault::NonFinite));
            }
        }
        self.time += dt;
        self.steps += 1;
        Ok(())
    }

    /// Steps until `t_end`, clamping the last step to land on it.
    pub fn run_until(&mut self, t_end: f64) -> Result<RunStats, BlowUp> {
        while self.time < t_end {
            let dt = self.compute_timestep()?;
            if self.time + dt >= t_end {
                self.step(t_end - self.time)?;
                self.time = t_end;
            } else {
                self.step(dt)?;
            }
        }
        Ok(RunStats {
            steps: self.steps,
            time: self.time,
        })
    }

    /// Takes exactly `steps` CFL-limited steps.
    pub fn run_steps(&mut self, steps: usize) -> Result<RunStats, BlowUp> {
        for _ in 0..steps {
            let dt = self.compute_timestep()?;
            self.step(dt)?;
        }
        Ok(RunStats {
            steps: self.steps,
            time: self.time,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::Domain;
    use approx::assert_abs_diff_eq;

    const ACOUSTIC: PdeSystem = PdeSystem::Acoustic { bulk: 4.0, rho: 1.0 };
    const EULER: PdeSystem = PdeSystem::Euler { gamma: 1.4 };
    const SWE: PdeSystem = PdeSystem::ShallowWater { g: 9.81 };

    fn constant_cell(order: usize, state: &[f64]) -> Vec<f64> {
        let nn = (order + 1).pow(2);
        state.iter().flat_map(|&s| std::iter::repeat_n(s, nn)).collect()
    }

    #[test]
    fn timestep_examples() {
        assert_abs_diff_eq!(cfl_timestep(0.9, 2.0 / 9.0, 5, 2.0), 4.5455e-3, epsilon = 1e-7);
        assert_abs_diff_eq!(cfl_timestep(0.9, 1.0, 0, 1.0), 0.45, epsilon = 1e-15);
        let mk = |n| {
            let mut g = Grid::new(n, Domain::square(-1.0, 1.0), 2, 4, FloatFormat::Fp64).unwrap();
            let c = constant_cell(2, &[1.0, 0.0, 0.0, 2.5]);
            for i in 0..g.num_cells() {
                g.write_cell(i, &c);
            }
            compute_timestep(&g, &EULER, 0.9).unwrap()
        };
        assert_abs_diff_eq!(mk(3), 3.0 * mk(9), epsilon = 1e-15);
    }

    #[test]
    fn timestep_flags_inadmissible() {
        let mut g = Grid::new(2, Domain::square(0.0, 1.0), 1, 4, FloatFormat::Fp64).unwrap();
        g.write_cell(0, &constant_cell(1, &[-1.0, 0.0, 0.0, 1.0]));
        assert!(compute_timestep(&g, &EULER, 0.9).is_err());
    }

    #[test]
    fn ck_constant_state_is_time_constant() {
        let b = ReferenceBasis::new(3).unwrap();
        let q = constant_cell(3, &[1.0, 0.5, -0.25]);
        let st = predictor_ck(&q, 0.01, 0.2, &ACOUSTIC, &b).unwrap();
        for v in 0..3 {
            for m in 0..4 {
                for node in 0..16 {
                    assert_abs_diff_eq!(st.qhat[(v * 4 + m) * 16 + node], q[v * 16], epsilon = 1e-14);
                }
            }
        }
        let upd = volume_integral(&st, &ACOUSTIC, 0.01, 0.2, &b);
        let f: f64 = (0..16).map(|i| st.fx[i].abs()).sum();
        assert!(f > 0.0);
        // nonzero constant flux gives a nonzero volume term that faces cancel
        let faces = extrapolate_to_faces(&st, &b, FloatFormat::Fp64);
        for t in &faces {
            for v in 0..3 {
                for s in 0..4 {
                    for m in 0..4 {
                        assert_abs_diff_eq!(t.q[(v * 4 + s) * 4 + m], q[v * 16], epsilon = 1e-14);
                    }
                }
            }
        }
        let _ = upd;
    }

    #[test]
    fn ck_order_zero_is_identity() {
        let b = ReferenceBasis::new(0).unwrap();
        let q = vec![0.3, -0.7, 1.1];
        let st = predictor_ck(&q, 0.1, 1.0, &ACOUSTIC, &b).unwrap();
        assert_eq!(st.qhat, q);
        let upd = volume_integral(&st, &ACOUSTIC, 0.1, 1.0, &b);
        assert_eq!(upd, vec![0.0; 3]);
    }

    #[test]
    fn picard_constant_state() {
        let b = ReferenceBasis::new(3).unwrap();
        let q = constant_cell(3, &[1.0, 0.2, -0.1, 2.5]);
        let (st, iters) = predictor_picard::<f64, f64>(&q, 0.01, 0.2, &EULER, &b, 5, 1e-14).unwrap();
        assert_eq!(iters, 1);
        for v in 0..4 {
            for i in 0..64 {
                assert_abs_diff_eq!(st.qhat[v * 64 + i], q[v * 16], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn picard_lake_at_rest_cell() {
        let b = ReferenceBasis::new(4).unwrap();
        let nn = 25;
        let mut q = vec![0.0; 4 * nn];
        for iy in 0..5 {
            for ix in 0..5 {
                let x = 0.3 + 0.2 * b.nodes[ix];
                let y = 0.1 + 0.2 * b.nodes[iy];
                let bath = (2.0 * std::f64::consts::PI * (x + y)).sin();
                q[iy * 5 + ix] = 2.0 - bath;
                q[3 * nn + iy * 5 + ix] = bath;
            }
        }
        let (st, _) = predictor_picard::<f64, f64>(&q, 1e-3, 0.2, &SWE, &b, 6, 1e-18).unwrap();
        for v in [0, 3] {
            for m in 0..5 {
                for node in 0..nn {
                    let a = st.qhat[(v * 5 + m) * nn + node];
                    assert!((a - q[v * nn + node]).abs() <= 10.0 * f64::EPSILON * 3.0);
                }
            }
        }
        for v in [1, 2] {
            for i in 0..5 * nn {
                assert!(st.qhat[v * 5 * nn + i].abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn picard_reaches_fixed_point() {
        let b = ReferenceBasis::new(3).unwrap();
        let nn = 16;
        let mut q = vec![0.0; 4 * nn];
        for i in 0..nn {
            let x = b.nodes[i % 4];
            q[i] = 1.0 + 0.2 * x;
            q[nn + i] = 0.3;
            q[2 * nn + i] = -0.1;
            q[3 * nn + i] = 2.5 + x * 0.1;
        }
        let tol = 1e-13;
        let (st, iters) = predictor_picard::<f64, f64>(&q, 5e-3, 0.2, &EULER, &b, 60, tol).unwrap();
        assert!(iters < 60);
        let again = picard_map(&st, &q, 5e-3, 0.2, &EULER, &b).unwrap();
        let scale = st.qhat.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (a, b) in again.iter().zip(&st.qhat) {
            assert!((a - b).abs() < 10.0 * tol * scale);
        }
    }

    #[test]
    fn picard_nonfinite_flags() {
        let b = ReferenceBasis::new(2).unwrap();
        let q = constant_cell(2, &[f64::NAN, 0.0, 0.0, 1.0]);
        assert!(predictor_picard::<f64, f64>(&q, 1e-3, 0.2, &EULER, &b, 4, 0.0).is_err());
    }

    #[test]
    fn extrapolation_of_linear_data() {
        let b = ReferenceBasis::new(1).unwrap();
        let nn = 4;
        let mut q = vec![0.0; 3 * nn];
        for iy in 0..2 {
            for ix in 0..2 {
                q[iy * 2 + ix] = 3.0 + 2.0 * b.nodes[ix] - b.nodes[iy];
            }
        }
        let st = predictor_ck(&q, 0.0, 1.0, &ACOUSTIC, &b).unwrap();
        let t = extrapolate_to_faces(&st, &b, FloatFormat::Fp64);
        for s in 0..2 {
            let y = b.nodes[s];
            assert_abs_diff_eq!(t[0].q[s * 2], 3.0 - y, epsilon = 1e-13);
            assert_abs_diff_eq!(t[1].q[s * 2], 5.0 - y, epsilon = 1e-13);
            let x = b.nodes[s];
            assert_abs_diff_eq!(t[2].q[s * 2], 3.0 + 2.0 * x, epsilon = 1e-13);
            assert_abs_diff_eq!(t[3].q[s * 2], 2.0 + 2.0 * x, epsilon = 1e-13);
        }
    }

    #[test]
    fn traces_cast_to_corrector() {
        let b = ReferenceBasis::new(2).unwrap();
        let nn = 9;
        let q: Vec<f64> = (0..3 * nn).map(|i| (i as f64 * 0.137).sin()).collect();
        let st = predictor_ck(&q, 1e-2, 0.2, &ACOUSTIC, &b).unwrap();
        let t = extrapolate_to_faces(&st, &b, FloatFormat::Fp16);
        for tr in &t {
            for &v in tr.q.iter().chain(&tr.flux) {
                assert_eq!(round_to_format(v, FloatFormat::Fp16), v);
            }
        }
    }

    #[test]
    fn rusanov_examples() {
        let mut out = [0.0; 1];
        rusanov_flux(&[1.0], &[0.0], &[0.0], &[0.0], 2.0, &mut out);
        assert_eq!(out[0], 1.0);
        let q = [0.7, -0.2, 0.3];
        let f = [1.3, 0.4, -0.6];
        let mut out = [0.0; 3];
        rusanov_flux(&q, &q, &f, &f, 2.0, &mut out);
        assert_eq!(out, f);
        let qh: Vec<F16> = q.iter().map(|&x| F16::from_f64(x)).collect();
        let fh: Vec<F16> = f.iter().map(|&x| F16::from_f64(x)).collect();
        let mut outh = [F16::zero(); 3];
        rusanov_flux(&qh, &qh, &fh, &fh, F16::from_f64(2.0), &mut outh);
        assert_eq!(outh.to_vec(), fh);
    }

    #[test]
    fn wellbalanced_flux_lake_interface() {
        let (bl, br) = (0.3, -0.4);
        let ql = [2.0 - bl, 0.0, 0.0, bl];
        let qr = [2.0 - br, 0.0, 0.0, br];
        let zero = [0.0; 4];
        let (mut gm, mut gp) = ([1.0; 4], [1.0; 4]);
        swe_wellbalanced_flux(&SWE, &ql, &qr, &zero, &zero, 5.0, Direction::X, &mut gm, &mut gp);
        assert_eq!(gm, [0.0; 4]);
        assert_eq!(gp, [0.0; 4]);
    }

    #[test]
    fn wellbalanced_flux_dam_break() {
        let ql = [2.0, 0.0, 0.0, 0.0];
        let qr = [1.0, 0.0, 0.0, 0.0];
        let zero = [0.0; 4];
        let lam = (9.81f64 * 2.0).sqrt();
        let (mut gm, mut gp) = ([0.0; 4], [0.0; 4]);
        swe_wellbalanced_flux(&SWE, &ql, &qr, &zero, &zero, lam, Direction::X, &mut gm, &mut gp);
        // scripted: G = lam/2 * (1, 0, 0, 0); D = g * 1.5 * (-1) in the x-momentum row
        let d = 9.81 * 1.5 * -1.0;
        assert_abs_diff_eq!(gm[0], 0.5 * lam, epsilon = 1e-15);
        assert_abs_diff_eq!(gp[0], 0.5 * lam, epsilon = 1e-15);
        assert_abs_diff_eq!(gm[1], 0.5 * d, epsilon = 1e-14);
        assert_abs_diff_eq!(gp[1], -0.5 * d, epsilon = 1e-14);
        assert_eq!(gm[2], 0.0);
        assert_eq!(gm[3], 0.0);
    }

    #[test]
    fn face_integral_examples() {
        let b = ReferenceBasis::new(0).unwrap();
        let upd = face_integral(&b, 1, &[1.0], Direction::X, FaceSide::Upper, 0.1, 1.0);
        assert_abs_diff_eq!(upd[0], -0.1, epsilon = 1e-16);
        let b = ReferenceBasis::new(2).unwrap();
        let upd = face_integral(&b, 2, &[0.0; 18], Direction::Y, FaceSide::Lower, 0.1, 0.5);
        assert_eq!(upd, vec![0.0; 18]);
    }

    #[test]
    fn solver_rejects_bad_config() {
        let g = Grid::new(2, Domain::square(0.0, 1.0), 1, 3, FloatFormat::Fp64).unwrap();
        let cfg = SolverConfig {
            cfl: Some(1.5),
            ..SolverConfig::default()
        };
        assert!(matches!(Solver::new(ACOUSTIC, g.clone(), cfg), Err(Error::Config(_))));
        let cfg = SolverConfig {
            predictor: Some(PredictorKind::CauchyKowalevskaya),
            ..SolverConfig::default()
        };
        let g4 = Grid::new(2, Domain::square(0.0, 1.0), 1, 4, FloatFormat::Fp64).unwrap();
        assert!(Solver::new(EULER, g4, cfg).is_err());
        let cfg = SolverConfig {
            picard_max_iters: Some(0),
            ..SolverConfig::default()
        };
        assert!(Solver::new(ACOUSTIC, g, cfg).is_err());
    }

    #[test]
    fn clamps_last_step() {
        let mut g = Grid::new(3, Domain::square(0.0, 1.0), 1, 3, FloatFormat::Fp64).unwrap();
        for c in 0..9 {
            g.write_cell(c, &constant_cell(1, &[1.0, 0.0, 0.0]));
        }
        let mut s = Solver::new(ACOUSTIC, g, SolverConfig::default()).unwrap();
        let dt = s.compute_timestep().unwrap();
        let stats = s.run_until(2.5 * dt).unwrap();
        assert_eq!(stats.steps, 3);
        assert_eq!(stats.time, 2.5 * dt);
    }
}
