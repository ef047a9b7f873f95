//! Finite quantum state tomography built on operator frames and dual bases.
//!
//! A measurement quorum is modelled as a set of operators `{N_j}` whose
//! expectation values determine the state. Reconstruction inverts the Gram
//! superoperator of the quorum to obtain dual operators `{Q_j}` and then
//! resums `rho = sum_j tr(N_j rho) Q_j`. Concrete quorums are provided for
//! qubits and their tensor products, qudits, Pegg-Barnett phase states and
//! spin coherent states; [`sdp`] verifies the semidefinite-programming
//! optimality conditions of the truncated expansions.

pub mod error;
pub mod frames;
pub mod linalg;
pub mod operator;
pub mod phase;
pub mod qudit;
pub mod report;
pub mod sampling;
pub mod sdp;
pub mod spin;
pub mod state;

pub use error::{Result, TomoError};
pub use operator::{DualFrame, GramSuperoperator, HermitianOperator, OperatorBasis};
pub use report::TomographyReport;
pub use state::DensityMatrix;
