//! Noise propagation in one-dimensional measurement-based quantum computing.
//!
//! The crate maps single-qubit noise acting on a cluster-state computation to
//! logical errors on its output, both in the building-block (circuit) picture and
//! in the matrix-product-operator picture, and carries a brute-force
//! density-matrix simulator that every closed form is checked against.

pub mod block;
pub mod channels;
pub mod densemath;
pub mod error;
pub mod mpo;
pub mod oracle;
pub mod parallel;
pub mod program;
pub mod random;
pub mod teleport;

pub use block::{BlockChannel, BlockNoiseConfig, MeasBasis, MeasSpec};
pub use channels::{ChannelKind, ChoiMatrix, KrausChannel, PauliCoeffs, PauliConvention};
pub use densemath::{CMatrix, DensityOperator, C64};
pub use error::{Error, Result};
pub use mpo::MpoState;
pub use oracle::{CircuitOp, SimResult};
pub use parallel::Execution;
