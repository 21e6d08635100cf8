//! Fixtures shared by the benchmarks.

use ddsim_core::hamiltonian::{
    build_spin_chain, decompose, random_decomposition, random_hermitian, thermal_bath_state, SpinChainParams,
    ThermalParams,
};
use ddsim_core::{BathDecomposition, NormKind, OperatorMatrix, SystemPosition};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded random Hermitian matrix.
pub fn hermitian(dim: usize, bits: u32) -> OperatorMatrix {
    random_hermitian(dim, bits, &mut ChaCha8Rng::seed_from_u64(7))
}

/// GaAs-like chain Hamiltonian and its thermal bath state.
pub fn gaas(bits: u32) -> (OperatorMatrix, OperatorMatrix) {
    let h = build_spin_chain(&SpinChainParams::gaas(), bits).expect("valid chain");
    let d = decompose(&h, SystemPosition::Last).expect("joint operator");
    let rho = thermal_bath_state(&d.b0, &ThermalParams::at(1.0)).expect("thermal state");
    (h, rho)
}

/// Two-qubit bath model with `J = β/2`.
pub fn bath_model(bits: u32) -> BathDecomposition {
    random_decomposition(4, bits, 5e3, 1e4, NormKind::Spectral, &mut ChaCha8Rng::seed_from_u64(3)).expect("model")
}
