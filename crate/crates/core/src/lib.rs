//! Phenotype-structured coevolution of tumour cells and cytotoxic T cells.
//!
//! Two engines share one lattice, one parameter set and one box kernel:
//!
//! * [`ibm`]: a stochastic individual-based model (branching random walk on
//!   the phenotype lattice);
//! * [`pde`]: its deterministic continuum limit, a nonlocal PDE for tumour
//!   cells coupled to an integro-differential equation for CTLs.
//!
//! [`analysis`] holds the homogeneous steady states, their linear stability,
//! the dispersion relation and the pattern-formation bound.
//!
//! The model code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the harness uses.

// `!(x > 0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod grid;
pub mod ibm;
pub mod kernel;
pub mod params;
pub mod pde;
pub mod scalar;
pub mod state;
pub mod trajectory;

pub use error::{ModelError, Population, Result};
pub use grid::PhenotypeGrid;
pub use params::{InitialCondition, ModelParams};
pub use scalar::Scalar;
pub use state::{CountState, DensityState};
pub use trajectory::{PdeDiagnostics, Snapshot, Terminal, Trajectory};

pub type Grid = PhenotypeGrid<f64>;
pub type Params = ModelParams<f64>;
pub type Initial = InitialCondition<f64>;
pub type Densities = DensityState<f64>;
pub type Run = Trajectory<f64>;
pub type Kernels = kernel::ModelKernels<f64>;
pub type Ibm = ibm::IbmEngine<f64>;
pub type Pde = pde::PdeSolver<f64>;
pub type Steady = analysis::SteadyStates<f64>;
pub type Eigen = analysis::EigenReport<f64>;
pub type Dispersion = analysis::DispersionCurve<f64>;
