//! Precision-parametric dense operator algebra.

mod dump;
mod eigen;
mod functions;
mod matrix;

pub use dump::{dump_matrix, parse_matrix};
pub use eigen::{eigh, HermitianEigen};
pub use functions::{
    embed, matrix_exp_hermitian, matrix_exp_hermitian_at, matrix_log_unitary, op_norm, op_norm_f64,
    partial_trace_bath, partial_trace_system, system_traceless_part, NormKind, SystemPosition,
};
pub use matrix::{anticommutator, commutator, tensor, OperatorMatrix};
