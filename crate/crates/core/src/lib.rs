//! Bounds on the tangle (squared concurrence) of a bipartite pure state sent
//! through a channel acting on one side, together with the machinery to check
//! them numerically.
//!
//! The numeric layers ([`linalg`], [`states`], [`channels`], [`measures`]) are
//! generic over the scalar type; bound evaluation, verification and
//! serialization run in double precision through the aliases below.

pub mod bounds;
pub mod channels;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod scalar;
pub mod states;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};

/// Double-precision complex matrix.
pub type CMatrix = linalg::ComplexMatrix<f64>;
/// Exact complex-rational matrix for structural identities.
pub type ExactMatrix = linalg::ComplexMatrix<num_rational::Rational64>;
pub type PureState = states::BipartitePureState<f64>;
pub type DensityMatrix = states::DensityMatrix<f64>;
pub type SchmidtForm = states::SchmidtForm<f64>;
pub type Channel = channels::QuantumChannel<f64>;
pub type ChoiState = channels::ChoiState<f64>;
pub type EtaFactors = measures::EtaFactors<f64>;

pub use bounds::{full_report, BoundEntry, BoundReport};
pub use linalg::Subsystem;
