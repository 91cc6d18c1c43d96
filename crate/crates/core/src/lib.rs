//! Mixed-precision ADER discontinuous Galerkin solver for 2D hyperbolic
//! systems on periodic Cartesian grids.
//!
//! Each of the four kernels (predictor, Picard loop, corrector, storage) can
//! run in `fp64`, `fp32`, `fp16` or `bf16`. The half formats are emulated in
//! software, see [`precision`].
//!
//! ```
//! use ader_mp::harness::{run_single, RunConfig};
//! use ader_mp::scenarios::ScenarioName;
//!
//! let mut cfg = RunConfig::new(ScenarioName::AcousticPlanar, 3, 9);
//! cfg.t_end_override = Some(0.05);
//! let report = run_single(&cfg).unwrap();
//! assert!(report.error.l2.unwrap() < 1e-2);
//! ```

pub mod basis;
pub mod error;
pub mod harness;
pub mod mesh;
pub mod metrics;
pub mod pde;
pub mod precision;
pub mod scenarios;
pub mod solver;

pub use error::{Error, Result};
pub use precision::{FloatFormat, PrecisionConfig};
