//! Dynamical decoupling simulator: operators, bath models, pulse sequences,
//! Magnus-expansion analysis and exact propagation.

pub mod error;
pub mod hamiltonian;
pub mod magnus;
pub mod operator;
pub mod precision;
pub mod pulse;
pub mod scalar;
pub mod simulator;

pub use error::{Error, Result};
pub use hamiltonian::{BathDecomposition, CouplingStrengths};
pub use operator::{NormKind, OperatorMatrix, SystemPosition};
pub use precision::PrecisionPolicy;
pub use pulse::{Angle, Axis, PulseSequence, Segment};
pub use scalar::{Complex, Float};
