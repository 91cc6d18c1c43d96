#![allow(dead_code)]

use ader_mp::basis::ReferenceBasis;
use ader_mp::mesh::{Domain, Grid};
use ader_mp::pde::PdeSystem;
use ader_mp::solver::{Solver, SolverConfig};
use ader_mp::{FloatFormat, PrecisionConfig};
use nalgebra::{DMatrix, SymmetricEigen};

/// Gauss-Legendre rule on [0, 1] from the eigen-decomposition of the
/// Legendre Jacobi matrix.
pub fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        j[(k - 1, k)] = beta;
        j[(k, k - 1)] = beta;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs.into_iter().unzip()
}

/// A constant admissible state for each system.
pub fn constant_state(sys: &PdeSystem) -> Vec<f64> {
    match sys {
        PdeSystem::Acoustic { .. } => vec![1.25, 0.5, -0.25],
        PdeSystem::Elastic { .. } => vec![0.3, -0.2, 0.1, 0.4, -0.6],
        PdeSystem::Euler { .. } => vec![1.1, 0.2, -0.15, 2.7],
        PdeSystem::ShallowWater { .. } => vec![1.5, 0.3, 0.1, 0.2],
    }
}

pub fn all_systems() -> [PdeSystem; 4] {
    [
        PdeSystem::Acoustic { bulk: 4.0, rho: 1.0 },
        PdeSystem::Elastic {
            lambda: 2.0,
            mu: 1.0,
            rho: 1.0,
        },
        PdeSystem::Euler { gamma: 1.4 },
        PdeSystem::ShallowWater { g: 9.81 },
    ]
}

/// Solver on `[-1, 1]^2` initialized with `f`.
pub fn solver_with(
    sys: PdeSystem,
    n: usize,
    order: usize,
    fmt: FloatFormat,
    f: impl Fn(f64, f64) -> Vec<f64>,
) -> Solver {
    let basis = ReferenceBasis::new(order).unwrap();
    let mut grid = Grid::new(n, Domain::square(-1.0, 1.0), order, sys.nvars(), fmt).unwrap();
    grid.initialize(&basis, f);
    let cfg = SolverConfig {
        precision: PrecisionConfig::uniform(fmt),
        ..SolverConfig::default()
    };
    Solver::new(sys, grid, cfg).unwrap()
}

/// Largest coefficient change relative to the initial state, divided by
/// `epsilon(fmt) * |Q|_inf`.
pub fn free_stream_drift(sys: PdeSystem, n: usize, order: usize, fmt: FloatFormat, steps: usize) -> f64 {
    let q = constant_state(&sys);
    let mut s = solver_with(sys, n, order, fmt, |_, _| q.clone());
    let before = s.grid.clone();
    s.run_steps(steps).unwrap();
    let qmax = before.max_abs();
    let mut worst: f64 = 0.0;
    for (a, b) in before.cells.iter().zip(&s.grid.cells) {
        for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
            worst = worst.max((x - y).abs());
        }
    }
    worst / (fmt.epsilon() * qmax)
}
