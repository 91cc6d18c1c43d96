//! The four hyperbolic systems: state layout, fluxes, non-conservative
//! products and wave speeds.
//!
//! All functions are generic over the scalar type so the same code runs in
//! every kernel precision.

use thiserror::Error;

use crate::precision::Real;

/// Largest number of state variables of any system.
pub const MAX_VARS: usize = 5;

pub const DEFAULT_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::X, Direction::Y];
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdeError {
    #[error("nonpositive or nonfinite density")]
    Density,
    #[error("nonpositive or nonfinite pressure")]
    Pressure,
    #[error("nonpositive or nonfinite water depth")]
    Depth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PdeSystem {
    /// `Q = (p, v_x, v_y)`.
    Acoustic { bulk: f64, rho: f64 },
    /// `Q = (sigma_xx, sigma_yy, sigma_xy, v_x, v_y)`.
    Elastic { lambda: f64, mu: f64, rho: f64 },
    /// `Q = (rho, rho v_x, rho v_y, E)`.
    Euler { gamma: f64 },
    /// `Q = (h, h v_x, h v_y, b)`.
    ShallowWater { g: f64 },
}

impl PdeSystem {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Acoustic { .. } => "acoustic",
            Self::Elastic { .. } => "elastic",
            Self::Euler { .. } => "euler",
            Self::ShallowWater { .. } => "swe",
        }
    }

    pub fn nvars(&self) -> usize {
        match self {
            Self::Acoustic { .. } => 3,
            Self::Elastic { .. } => 5,
            Self::Euler { .. } | Self::ShallowWater { .. } => 4,
        }
    }

    /// Linear systems use the Cauchy-Kowalevskaya predictor.
    pub fn is_linear(&self) -> bool {
        matches!(self, Self::Acoustic { .. } | Self::Elastic { .. })
    }

    pub fn has_ncp(&self) -> bool {
        matches!(self, Self::ShallowWater { .. })
    }

    /// Writes `F_dir(q)` into `out[..nvars]`.
    #[inline]
    pub fn flux<T: Real>(&self, q: &[T], dir: Direction, out: &mut [T]) -> Result<(), PdeError> {
        match *self {
            Self::Acoustic { bulk, rho } => {
                let k = T::from_f64(bulk);
                let r = T::from_f64(rho);
                match dir {
                    Direction::X => {
                        out[0] = k * q[1];
                        out[1] = q[0] / r;
                        out[2] = T::zero();
                    }
                    Direction::Y => {
                        out[0] = k * q[2];
                        out[1] = T::zero();
                        out[2] = q[0] / r;
                    }
                }
            }
            Self::Elastic { lambda, mu, rho } => {
                let lam = T::from_f64(lambda);
                let m = T::from_f64(mu);
                let p = T::from_f64(lambda + 2.0 * mu);
                let r = T::from_f64(rho);
                match dir {
                    Direction::X => {
                        out[0] = -(p * q[3]);
                        out[1] = -(lam * q[3]);
                        out[2] = -(m * q[4]);
                        out[3] = -(q[0] / r);
                        out[4] = -(q[2] / r);
                    }
                    Direction::Y => {
                        out[0] = -(lam * q[4]);
                        out[1] = -(p * q[4]);
                        out[2] = -(m * q[3]);
                        out[3] = -(q[2] / r);
                        out[4] = -(q[1] / r);
                    }
                }
            }
            Self::Euler { gamma } => {
                let (vx, vy, p) = euler_primitives(gamma, q)?;
                let e = q[3];
                match dir {
                    Direction::X => {
                        out[0] = q[1];
                        out[1] = q[1] * vx + p;
                        out[2] = q[2] * vx;
                        out[3] = vx * (e + p);
                    }
                    Direction::Y => {
                        out[0] = q[2];
                        out[1] = q[1] * vy;
                        out[2] = q[2] * vy + p;
                        out[3] = vy * (e + p);
                    }
                }
            }
            Self::ShallowWater { .. } => {
                let h = q[0];
                if !(h > T::zero()) || !h.is_finite() {
                    return Err(PdeError::Depth);
                }
                match dir {
                    Direction::X => {
                        let vx = q[1] / h;
                        out[0] = q[1];
                        out[1] = q[1] * vx;
                        out[2] = q[2] * vx;
                    }
                    Direction::Y => {
                        let vy = q[2] / h;
                        out[0] = q[2];
                        out[1] = q[1] * vy;
                        out[2] = q[2] * vy;
                    }
                }
                out[3] = T::zero();
            }
        }
        Ok(())
    }

    /// Writes `C(q) grad` (x) or `D(q) grad` (y) into `out`; zero for
    /// conservative systems.
    #[inline]
    pub fn ncp_dir<T: Real>(&self, q: &[T], grad: &[T], dir: Direction, out: &mut [T]) {
        let nv = self.nvars();
        for o in out[..nv].iter_mut() {
            *o = T::zero();
        }
        if let Self::ShallowWater { g } = *self {
            let gh = T::from_f64(g) * q[0];
            let s = gh * (grad[0] + grad[3]);
            match dir {
                Direction::X => out[1] = s,
                Direction::Y => out[2] = s,
            }
        }
    }

    /// `C(q) dq/dx + D(q) dq/dy`.
    #[inline]
    pub fn ncp<T: Real>(&self, q: &[T], grad_x: &[T], grad_y: &[T], out: &mut [T]) {
        let nv = self.nvars();
        for o in out[..nv].iter_mut() {
            *o = T::zero();
        }
        if let Self::ShallowWater { g } = *self {
            let gh = T::from_f64(g) * q[0];
            out[1] = gh * (grad_x[0] + grad_x[3]);
            out[2] = gh * (grad_y[0] + grad_y[3]);
        }
    }

    /// Largest absolute characteristic speed in `dir`.
    #[inline]
    pub fn max_abs_eigenvalue<T: Real>(&self, q: &[T], dir: Direction) -> Result<T, PdeError> {
        let d = match dir {
            Direction::X => 1,
            Direction::Y => 2,
        };
        match *self {
            Self::Acoustic { bulk, rho } => Ok((T::from_f64(bulk) / T::from_f64(rho)).sqrt()),
            Self::Elastic { lambda, mu, rho } => {
                Ok((T::from_f64(lambda + 2.0 * mu) / T::from_f64(rho)).sqrt())
            }
            Self::Euler { gamma } => {
                let (vx, vy, p) = euler_primitives(gamma, q)?;
                let v = if d == 1 { vx } else { vy };
                Ok(v.abs() + (T::from_f64(gamma) * p / q[0]).sqrt())
            }
            Self::ShallowWater { g } => {
                let h = q[0];
                if !(h > T::zero()) || !h.is_finite() {
                    return Err(PdeError::Depth);
                }
                let v = q[d] / h;
                Ok(v.abs() + (T::from_f64(g) * h).sqrt())
            }
        }
    }

    /// Maximum over both directions.
    pub fn max_wave_speed<T: Real>(&self, q: &[T]) -> Result<T, PdeError> {
        let sx = self.max_abs_eigenvalue(q, Direction::X)?;
        let sy = self.max_abs_eigenvalue(q, Direction::Y)?;
        Ok(sx.max_of(sy))
    }

    /// Checks admissibility without computing anything else.
    pub fn check_state<T: Real>(&self, q: &[T]) -> Result<(), PdeError> {
        self.max_abs_eigenvalue(q, Direction::X).map(|_| ())
    }
}

/// `(v_x, v_y, p)` with admissibility checks.
#[inline]
fn euler_primitives<T: Real>(gamma: f64, q: &[T]) -> Result<(T, T, T), PdeError> {
    let rho = q[0];
    if !(rho > T::zero()) || !rho.is_finite() {
        return Err(PdeError::Density);
    }
    let vx = q[1] / rho;
    let vy = q[2] / rho;
    let kinetic = T::half() * (q[1] * vx + q[2] * vy);
    let p = T::from_f64(gamma - 1.0) * (q[3] - kinetic);
    if !(p > T::zero()) || !p.is_finite() {
        return Err(PdeError::Pressure);
    }
    Ok((vx, vy, p))
}

/// Pressure of an Euler state in `f64`.
pub fn euler_pressure(gamma: f64, q: &[f64]) -> f64 {
    (gamma - 1.0) * (q[3] - 0.5 * (q[1] * q[1] + q[2] * q[2]) / q[0])
}
