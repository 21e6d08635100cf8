//! Magnus expansion, renormalization recursions, error-phase bounds and
//! convergence conditions.

mod bounds;
mod convergence;
mod renormalize;
mod terms;

pub use bounds::{
    bound_cdd, bound_cdd_generalized, bound_pdd, bound_pdd_commutator, bound_tsds, cdd_pdd_ratio_bound,
    error_phase_from_hamiltonian, error_phase_with, table1_phi, BathRegime, BoundParams, ErrorPhaseEstimate, Scheme,
};
pub use convergence::{
    appendix_b_x_margin, appendix_b_y_margin, convergence_check, ConvergenceMargins, ConvergenceReport,
};
pub use renormalize::{
    appendix_b_norm_recursion, ideal_level_bound, level_hamiltonian, renormalize_finite_width, renormalize_ideal,
    RenormalizationTrace, TAUNB_CUTOFF,
};
pub use terms::{
    conjugated_hamiltonians, conjugated_hamiltonians_at, cycle_pieces, cycle_pieces_physical, magnus_a1_a2,
    MagnusTerms,
};
