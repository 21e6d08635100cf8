use ddsim_core::hamiltonian::{build_spin_chain, decompose, random_hermitian, thermal_bath_state, SpinChainParams, ThermalParams};
use ddsim_core::operator::op_norm_f64;
use ddsim_core::pulse::{adjust_for_width, gen_cdd, write_sequence};
use ddsim_core::simulator::{default_system_state, purity_loss, simulate, thompson_check, Evolver};
use ddsim_core::{Axis, NormKind, PrecisionPolicy, PulseSequence, Segment, SystemPosition};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sequence(spec: &[(u8, f64)]) -> PulseSequence {
    let mut segs = Vec::new();
    for &(a, t) in spec {
        segs.push(Segment::free(t));
        segs.push(Segment::pulse(Axis::ALL[a as usize]));
    }
    segs.push(Segment::free(0.1));
    PulseSequence::from_segments("random", segs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn propagator_stays_unitary(seed in any::<u64>(), spec in prop::collection::vec((0u8..3, 0.01f64..2.0), 1..10)) {
        let h = random_hermitian(4, 128, &mut ChaCha8Rng::seed_from_u64(seed));
        let seq = sequence(&spec);
        let u = Evolver::new(&h, 128).unwrap().evolve(&seq).unwrap();
        let tol = seq.segment_count() as f64 * 4.0 * 2f64.powi(-128 + 16);
        prop_assert!(u.unitary_defect() <= tol);
    }

    #[test]
    fn pulses_never_grow_the_error_norm(seed in any::<u64>(), spec in prop::collection::vec((0u8..3, 0.02f64..0.3), 1..8)) {
        let h = random_hermitian(8, 128, &mut ChaCha8Rng::seed_from_u64(seed));
        let h = h.scale_f64(1.0 / op_norm_f64(&h, NormKind::Spectral).unwrap());
        let r = thompson_check(&h, &sequence(&spec)).unwrap();
        prop_assert!(r.holds, "{} > {}", r.lhs, r.rhs);
    }
}

#[test]
fn reruns_serialize_identically() {
    let h = build_spin_chain(&SpinChainParams::gaas(), 128).unwrap();
    let d = decompose(&h, SystemPosition::Last).unwrap();
    let rho = thermal_bath_state(&d.b0, &ThermalParams::at(1.0)).unwrap();
    let seq = gen_cdd(1e-5 / 64.0, 3).unwrap();
    let a = simulate(&h, &seq, &rho, PrecisionPolicy::Fixed(192)).unwrap().to_json().to_string();
    let b = simulate(&h, &seq, &rho, PrecisionPolicy::Fixed(192)).unwrap().to_json().to_string();
    assert_eq!(a, b);
    assert_eq!(write_sequence(&seq), write_sequence(&gen_cdd(1e-5 / 64.0, 3).unwrap()));
}

#[test]
fn finite_width_cdd_saturates() {
    let bits = 192;
    let h = build_spin_chain(&SpinChainParams::gaas(), bits).unwrap();
    let d = decompose(&h, SystemPosition::Last).unwrap();
    let rho = thermal_bath_state(&d.b0, &ThermalParams::at(1.0)).unwrap();
    let mut ev = Evolver::new(&h, bits).unwrap();
    let losses: Vec<f64> = (4..=6)
        .map(|n| {
            let seq = adjust_for_width(&gen_cdd(1e-5 / 4f64.powi(n), n as u32).unwrap(), 1e-12).unwrap();
            let u = ev.evolve(&seq).unwrap();
            purity_loss(&u, &default_system_state(bits), &rho).unwrap().to_f64()
        })
        .collect();
    for l in &losses {
        assert!((l / 1e-12).log10().abs() < 1.0, "{losses:?}");
    }
}
