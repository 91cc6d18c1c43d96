//! Gauss-Legendre nodal basis on the reference interval `[0, 1]` and the
//! reference-element operators used by predictor and corrector.
//!
//! The 2D cell basis and the 3D space-time basis are tensor products of the
//! same 1D Lagrange basis, so every operator is stored as a dense
//! `(N+1) x (N+1)` row-major factor.

use std::any::Any;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::precision::{FloatFormat, PrecisionConfig, Real, BF16, F16};

pub const MAX_ORDER: usize = 9;

/// Gauss-Legendre nodes and weights on `[0, 1]` for polynomial degree `order`.
pub fn gauss_legendre(order: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if order > MAX_ORDER {
        return Err(Error::Config(format!(
            "polynomial order {order} outside supported range 0..={MAX_ORDER}"
        )));
    }
    let n = order + 1;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 1.0 / ((1.0 - x * x) * dp * dp);
        // descending roots on [-1, 1] map to ascending nodes via x -> (1 - x) / 2
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok((nodes, weights))
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Evaluates the `l`-th Lagrange cardinal polynomial on `nodes` at `x`.
pub fn lagrange_eval(nodes: &[f64], l: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != l)
        .map(|(_, &xk)| (x - xk) / (nodes[l] - xk))
        .product()
}

/// `D[k][l] = phi_l'(x_k)` via barycentric weights.
fn derivative_matrix(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    let bary: Vec<f64> = (0..n)
        .map(|j| {
            1.0 / (0..n)
                .filter(|&k| k != j)
                .map(|k| nodes[j] - nodes[k])
                .product::<f64>()
        })
        .collect();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                d[i * n + j] = v;
                diag -= v;
            }
        }
        d[i * n + i] = diag;
    }
    d
}

/// Reference-element data in one precision.
#[derive(Debug, Clone)]
pub struct ReferenceBasis<T> {
    pub order: usize,
    pub format: FloatFormat,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
    /// `D[k][l] = phi_l'(x_k)`.
    pub deriv: Vec<T>,
    /// Weak-form stiffness with the inverse mass folded in: `w_i D[i][k] / w_k`.
    pub stiffness: Vec<T>,
    /// `phi_l(0)`.
    pub proj_left: Vec<T>,
    /// `phi_l(1)`.
    pub proj_right: Vec<T>,
    /// `phi_k(0) / w_k`.
    pub face_left: Vec<T>,
    /// `phi_k(1) / w_k`.
    pub face_right: Vec<T>,
    /// Time operator `phi_k(1) phi_l(1) - w_l D[l][k]`.
    pub time_matrix: Vec<T>,
    /// `time_matrix^-1 diag(w)`, maps nodal time derivatives to nodal states.
    pub time_lift: Vec<T>,
    /// Initial projection `phi_k(0)`, the right-hand side of the time system.
    pub time_initial: Vec<T>,
}

impl<T: Real> ReferenceBasis<T> {
    pub fn n1(&self) -> usize {
        self.order + 1
    }

    #[inline]
    pub fn d(&self, k: usize, l: usize) -> T {
        self.deriv[k * (self.order + 1) + l]
    }

    /// Projection to a face: first and second entries are left and right.
    pub fn face_trace(&self, values: &[T]) -> (T, T) {
        let mut left = T::zero();
        let mut right = T::zero();
        for (l, &v) in values.iter().enumerate() {
            left += self.proj_left[l] * v;
            right += self.proj_right[l] * v;
        }
        (left, right)
    }
}

impl ReferenceBasis<f64> {
    /// Builds all operators in `f64`.
    pub fn new(order: usize) -> Result<Self> {
        let (nodes, weights) = gauss_legendre(order)?;
        let n = order + 1;
        let deriv = derivative_matrix(&nodes);
        let proj_left: Vec<f64> = (0..n).map(|l| lagrange_eval(&nodes, l, 0.0)).collect();
        let proj_right: Vec<f64> = (0..n).map(|l| lagrange_eval(&nodes, l, 1.0)).collect();
        let mut stiffness = vec![0.0; n * n];
        let mut time_matrix = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                stiffness[k * n + l] = weights[l] * deriv[l * n + k] / weights[k];
                time_matrix[k * n + l] =
                    proj_right[k] * proj_right[l] - weights[l] * deriv[l * n + k];
            }
        }
        let k1 = DMatrix::from_row_slice(n, n, &time_matrix);
        let lu = k1.lu();
        let rhs = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&weights));
        let lift = lu
            .solve(&rhs)
            .ok_or_else(|| Error::Internal("singular time operator".into()))?;
        let mut time_lift = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                time_lift[k * n + l] = lift[(k, l)];
            }
        }
        let face_left = (0..n).map(|k| proj_left[k] / weights[k]).collect();
        let face_right = (0..n).map(|k| proj_right[k] / weights[k]).collect();
        Ok(Self {
            order,
            format: FloatFormat::Fp64,
            time_initial: proj_left.clone(),
            nodes,
            weights,
            deriv,
            stiffness,
            proj_left,
            proj_right,
            face_left,
            face_right,
            time_matrix,
            time_lift,
        })
    }

    /// Rounds every entry into `U`.
    pub fn cast<U: Real>(&self) -> ReferenceBasis<U> {
        let c = |v: &Vec<f64>| v.iter().map(|&x| U::from_f64(x)).collect::<Vec<U>>();
        ReferenceBasis {
            order: self.order,
            format: U::FORMAT,
            nodes: c(&self.nodes),
            weights: c(&self.weights),
            deriv: c(&self.deriv),
            stiffness: c(&self.stiffness),
            proj_left: c(&self.proj_left),
            proj_right: c(&self.proj_right),
            face_left: c(&self.face_left),
            face_right: c(&self.face_right),
            time_matrix: c(&self.time_matrix),
            time_lift: c(&self.time_lift),
            time_initial: c(&self.time_initial),
        }
    }
}

pub fn build_reference_basis<T: Real>(order: usize) -> Result<ReferenceBasis<T>> {
    Ok(ReferenceBasis::new(order)?.cast())
}

/// One basis instance per format used by a run.
pub struct BasisSet {
    order: usize,
    fp64: ReferenceBasis<f64>,
    instances: [Option<Box<dyn Any + Send + Sync>>; 4],
}

impl BasisSet {
    pub fn new(order: usize, precision: &PrecisionConfig) -> Result<Self> {
        let fp64 = ReferenceBasis::new(order)?;
        let mut instances: [Option<Box<dyn Any + Send + Sync>>; 4] = Default::default();
        for fmt in precision.formats() {
            let inst: Box<dyn Any + Send + Sync> = match fmt {
                FloatFormat::Fp64 => Box::new(fp64.clone()),
                FloatFormat::Fp32 => Box::new(fp64.cast::<f32>()),
                FloatFormat::Fp16 => Box::new(fp64.cast::<F16>()),
                FloatFormat::Bf16 => Box::new(fp64.cast::<BF16>()),
            };
            instances[fmt as usize] = Some(inst);
        }
        Ok(Self {
            order,
            fp64,
            instances,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fp64(&self) -> &ReferenceBasis<f64> {
        &self.fp64
    }

    /// The instance for `T`.
    ///
    /// # Panics
    /// If no instance for `T::FORMAT` was built.
    pub fn get<T: Real>(&self) -> &ReferenceBasis<T> {
        self.instances[T::FORMAT as usize]
            .as_ref()
            .and_then(|b| b.downcast_ref::<ReferenceBasis<T>>())
            .unwrap_or_else(|| panic!("no {} basis instance", T::FORMAT))
    }
}
