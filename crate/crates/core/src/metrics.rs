//! Error norms against the nodal interpolant of the reference solution and
//! outcome classification. All arithmetic is `f64`.

use std::fmt;

use crate::basis::ReferenceBasis;
use crate::error::Result;
use crate::mesh::Grid;
use crate::precision::{round_to_format, FloatFormat};
use crate::scenarios::Scenario;
use crate::solver::Kernel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Ok,
    FailedNonfinite,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Ok => "OK",
            Outcome::FailedNonfinite => "FAILED_NONFINITE",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub outcome: Outcome,
    pub l2_per_var: Option<Vec<f64>>,
    pub max_per_var: Option<Vec<f64>>,
    /// Root of the summed squares over variables.
    pub l2: Option<f64>,
    pub max: Option<f64>,
    pub failure_time: Option<f64>,
    pub failure_kernel: Option<Kernel>,
}

impl ErrorReport {
    pub fn failed(time: Option<f64>, kernel: Option<Kernel>) -> Self {
        Self {
            outcome: Outcome::FailedNonfinite,
            l2_per_var: None,
            max_per_var: None,
            l2: None,
            max: None,
            failure_time: time,
            failure_kernel: kernel,
        }
    }
}

pub fn classify_outcome(grid: &Grid) -> Outcome {
    let bad = grid
        .cells
        .iter()
        .any(|c| c.coeffs.iter().any(|v| !v.is_finite()));
    if bad {
        Outcome::FailedNonfinite
    } else {
        Outcome::Ok
    }
}

/// Per-variable weighted sums of squares and maxima of `a - b` over all
/// cells, where both are given in cell layout.
fn accumulate(
    a: &[Vec<f64>],
    b: &[Vec<f64>],
    nvars: usize,
    h: f64,
    basis: &ReferenceBasis<f64>,
) -> (Vec<f64>, Vec<f64>) {
    let n1 = basis.n1();
    let nn = n1 * n1;
    let vc = h * h;
    let mut sq = vec![0.0; nvars];
    let mut mx = vec![0.0f64; nvars];
    for (ca, cb) in a.iter().zip(b) {
        for v in 0..nvars {
            for iy in 0..n1 {
                for ix in 0..n1 {
                    let i = v * nn + iy * n1 + ix;
                    let d = ca[i] - cb[i];
                    sq[v] += vc * basis.weights[iy] * basis.weights[ix] * d * d;
                    mx[v] = mx[v].max(d.abs());
                }
            }
        }
    }
    (sq, mx)
}

/// Discrete L2 distance between the grid solution and nodal reference values.
pub fn l2_error(grid: &Grid, reference: &[Vec<f64>], basis: &ReferenceBasis<f64>) -> ErrorReport {
    if classify_outcome(grid) == Outcome::FailedNonfinite {
        return ErrorReport::failed(None, None);
    }
    let cells: Vec<Vec<f64>> = grid.cells.iter().map(|c| c.coeffs.clone()).collect();
    let (sq, mx) = accumulate(&cells, reference, grid.nvars, grid.h, basis);
    let l2 = sq.iter().sum::<f64>().sqrt();
    let max = mx.iter().copied().fold(0.0, f64::max);
    ErrorReport {
        outcome: Outcome::Ok,
        l2_per_var: Some(sq.iter().map(|s| s.sqrt()).collect()),
        max_per_var: Some(mx),
        l2: Some(l2),
        max: Some(max),
        failure_time: None,
        failure_kernel: None,
    }
}

/// Discrete L2 norm of nodal values in cell layout.
pub fn l2_norm(values: &[Vec<f64>], nvars: usize, h: f64, basis: &ReferenceBasis<f64>) -> f64 {
    let zeros: Vec<Vec<f64>> = values.iter().map(|c| vec![0.0; c.len()]).collect();
    let (sq, _) = accumulate(values, &zeros, nvars, h, basis);
    sq.iter().sum::<f64>().sqrt()
}

/// Relative L2 error caused by casting the fp64 initial condition to `fmt`.
pub fn initial_projection_error(
    scenario: &Scenario,
    n: usize,
    order: usize,
    fmt: FloatFormat,
) -> Result<f64> {
    let basis = ReferenceBasis::new(order)?;
    let grid = Grid::new(n, scenario.domain, order, scenario.sys.nvars(), FloatFormat::Fp64)?;
    let exact = grid.sample(&basis, |x, y| scenario.init(x, y));
    let cast: Vec<Vec<f64>> = exact
        .iter()
        .map(|c| c.iter().map(|&v| round_to_format(v, fmt)).collect())
        .collect();
    let nv = scenario.sys.nvars();
    let norm = l2_norm(&exact, nv, grid.h, &basis);
    let (sq, _) = accumulate(&cast, &exact, nv, grid.h, &basis);
    Ok(sq.iter().sum::<f64>().sqrt() / norm)
}

/// Largest `|h v|` magnitude of a shallow-water grid.
pub fn max_momentum(grid: &Grid) -> f64 {
    let nn = grid.n1() * grid.n1();
    grid.cells
        .iter()
        .flat_map(|c| (0..nn).map(move |i| c.coeffs[nn + i].hypot(c.coeffs[2 * nn + i])))
        .fold(0.0, f64::max)
}

/// Largest velocity magnitude `|h v| / h` of a shallow-water grid.
pub fn max_velocity(grid: &Grid) -> f64 {
    let nn = grid.n1() * grid.n1();
    grid.cells
        .iter()
        .flat_map(|c| {
            (0..nn).map(move |i| c.coeffs[nn + i].hypot(c.coeffs[2 * nn + i]) / c.coeffs[i])
        })
        .fold(0.0, f64::max)
}
