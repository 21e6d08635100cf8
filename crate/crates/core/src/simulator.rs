//! Exact propagators of a qubit coupled to a finite bath under a pulse
//! sequence, plus purity, effective error Hamiltonian and the Thompson check.
//!
//! The system qubit is the last tensor factor throughout.

use crate::error::{Error, Result};
use crate::magnus::error_phase_from_hamiltonian;
use crate::operator::{
    eigh, embed, matrix_log_unitary, op_norm_f64, partial_trace_system, tensor, HermitianEigen, NormKind,
    OperatorMatrix, SystemPosition,
};
use crate::precision::{run_with_escalation, PrecisionPolicy};
use crate::pulse::{Angle, Axis, Node, NodeKind, PulseSequence, Segment};
use crate::scalar::{pi, to_decimal, Complex, Float};
use std::collections::HashMap;
use std::sync::Arc;

const POS: SystemPosition = SystemPosition::Last;

/// `exp(−i (θ/2) σ_axis)` on the qubit.
pub fn pulse_unitary(axis: Axis, angle: Angle, bits: u32) -> OperatorMatrix {
    let m = angle.pi_multiple();
    let id = OperatorMatrix::identity(2, bits);
    let sigma = OperatorMatrix::pauli(axis, bits);
    if m.fract() == 0.0 && m.abs() < 1e15 {
        // Exact for integer multiples of π: cos and sin of kπ/2 are 0 or ±1.
        return match (m as i64).rem_euclid(4) {
            0 => id,
            1 => sigma.mul_i().neg(),
            2 => id.neg(),
            _ => sigma.mul_i(),
        };
    }
    let half = Float::with_val(bits, pi(bits) * m) / 2u32;
    let (s, c) = half.sin_cos(Float::new(bits));
    id.scale(&c).sub(&sigma.mul_i().scale(&s)).expect("same shape")
}

/// Bare pulse product of `seq` on the qubit, free periods dropped and
/// finite-width pulses replaced by their ideal rotation.
pub fn ideal_system_unitary(seq: &PulseSequence, bits: u32) -> OperatorMatrix {
    let mut memo = HashMap::new();
    system_node(seq.root(), bits, &mut memo)
}

fn system_node(node: &Arc<Node>, bits: u32, memo: &mut HashMap<usize, OperatorMatrix>) -> OperatorMatrix {
    let key = Arc::as_ptr(node) as usize;
    if let Some(u) = memo.get(&key) {
        return u.clone();
    }
    let u = match &node.kind {
        NodeKind::Leaf(Segment::Free { .. }) => OperatorMatrix::identity(2, bits),
        NodeKind::Leaf(Segment::IdealPulse { axis, angle } | Segment::RectPulse { axis, angle, .. }) => {
            pulse_unitary(*axis, *angle, bits)
        }
        NodeKind::Concat(children) => children.iter().fold(OperatorMatrix::identity(2, bits), |acc, c| {
            system_node(c, bits, memo).mul(&acc).expect("qubit")
        }),
        NodeKind::Repeat(body, n) => system_node(body, bits, memo).pow(*n as u64),
    };
    memo.insert(key, u.clone());
    u
}

/// Propagator builder for one error Hamiltonian at one precision. Caches the
/// eigendecomposition of `h_e` and every distinct segment exponential, so it
/// can be reused across sequences sharing the same model.
pub struct Evolver {
    h_e: OperatorMatrix,
    eig: HermitianEigen,
    bath_dim: usize,
    bits: u32,
    segments: HashMap<SegmentKey, OperatorMatrix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum SegmentKey {
    Free(u64),
    Ideal(Axis, u64),
    Rect(Axis, u64, u64),
}

impl Evolver {
    pub fn new(h_e: &OperatorMatrix, bits: u32) -> Result<Self> {
        if h_e.dim() % 2 != 0 {
            return Err(Error::DimMismatch(format!("joint dimension {} has no qubit factor", h_e.dim())));
        }
        let h_e = h_e.with_precision(bits);
        h_e.require_hermitian()?;
        let eig = eigh(&h_e)?;
        Ok(Evolver { bath_dim: h_e.dim() / 2, h_e, eig, bits, segments: HashMap::new() })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.h_e
    }

    fn segment(&mut self, seg: &Segment) -> Result<OperatorMatrix> {
        let key = match *seg {
            Segment::Free { duration } => SegmentKey::Free(duration.to_bits()),
            Segment::IdealPulse { axis, angle } => SegmentKey::Ideal(axis, angle.pi_multiple().to_bits()),
            Segment::RectPulse { axis, angle, width } => {
                SegmentKey::Rect(axis, angle.pi_multiple().to_bits(), width.to_bits())
            }
        };
        if let Some(u) = self.segments.get(&key) {
            return Ok(u.clone());
        }
        let bits = self.bits;
        let u = match *seg {
            Segment::Free { duration } => {
                if !(duration >= 0.0) {
                    return Err(Error::BadParams(format!("free period must be nonnegative, got {duration}")));
                }
                self.eig.exp_minus_i(&Float::with_val(bits, duration))
            }
            Segment::IdealPulse { axis, angle } => {
                embed(&OperatorMatrix::identity(self.bath_dim, bits), &pulse_unitary(axis, angle, bits), POS)?
            }
            Segment::RectPulse { axis, angle, width } => {
                if !(width > 0.0) {
                    return Err(Error::BadParams(format!("rectangular pulse needs a positive width, got {width}")));
                }
                // δη = θ/2, so δ(η σ + h_e) = (θ/2) σ + δ h_e.
                let half_theta = Float::with_val(bits, pi(bits) * angle.pi_multiple()) / 2u32;
                let sigma = embed(&OperatorMatrix::identity(self.bath_dim, bits), &OperatorMatrix::pauli(axis, bits), POS)?;
                let gen = sigma.scale(&half_theta).add(&self.h_e.scale(&Float::with_val(bits, width)))?;
                eigh(&gen.hermitian_part())?.exp_minus_i(&Float::with_val(bits, 1))
            }
        };
        self.segments.insert(key, u.clone());
        Ok(u)
    }

    fn node(&mut self, node: &Arc<Node>, memo: &mut HashMap<usize, OperatorMatrix>) -> Result<OperatorMatrix> {
        let key = Arc::as_ptr(node) as usize;
        if let Some(u) = memo.get(&key) {
            return Ok(u.clone());
        }
        let u = match &node.kind {
            NodeKind::Leaf(seg) => self.segment(seg)?,
            NodeKind::Concat(children) => {
                let mut acc: Option<OperatorMatrix> = None;
                for c in children {
                    let next = self.node(c, memo)?;
                    acc = Some(match acc {
                        None => next,
                        Some(a) => next.mul(&a)?,
                    });
                }
                acc.unwrap_or_else(|| OperatorMatrix::identity(self.h_e.dim(), self.bits))
            }
            NodeKind::Repeat(body, n) => self.node(body, memo)?.pow(*n as u64),
        };
        memo.insert(key, u.clone());
        Ok(u)
    }

    /// Total propagator, earliest segment rightmost in the product.
    pub fn evolve(&mut self, seq: &PulseSequence) -> Result<OperatorMatrix> {
        let mut memo = HashMap::new();
        self.node(seq.root(), &mut memo)
    }
}

/// Propagator of `seq` under `h_e` at the policy's initial precision.
pub fn evolve(h_e: &OperatorMatrix, seq: &PulseSequence, precision: PrecisionPolicy) -> Result<OperatorMatrix> {
    Evolver::new(h_e, precision.initial_bits())?.evolve(seq)
}

/// `(|0⟩ + |1⟩)/√2`
pub fn default_system_state(bits: u32) -> [Complex; 2] {
    let r = Float::with_val(bits, 2).sqrt().recip();
    [Complex::from_real(r.clone()), Complex::from_real(r)]
}

const STATE_TOLERANCE: f64 = 1e-12;

/// `1 − Tr[ρ_S²]` after `ρ = u (ρ_B ⊗ |ψ⟩⟨ψ|) u†`.
///
/// Input states are checked to `1e-12` and then renormalized at working
/// precision, so f64-rounded inputs do not leak into tiny purity losses.
pub fn purity_loss(u: &OperatorMatrix, system_state: &[Complex], bath_state: &OperatorMatrix) -> Result<Float> {
    let bits = u.precision_bits();
    if system_state.len() != 2 {
        return Err(Error::DimMismatch(format!("system state of length {}", system_state.len())));
    }
    if bath_state.dim() * 2 != u.dim() {
        return Err(Error::DimMismatch(format!(
            "bath state of dim {} for joint dim {}",
            bath_state.dim(),
            u.dim()
        )));
    }
    let psi: Vec<Complex> = system_state.iter().map(|c| c.with_prec(bits)).collect();
    let norm = psi.iter().fold(Float::new(bits), |acc, c| acc + c.norm_sqr());
    if (norm.to_f64() - 1.0).abs() > STATE_TOLERANCE {
        return Err(Error::BadState(format!("system state has squared norm {}", norm.to_f64())));
    }
    let inv = norm.sqrt().recip();
    let psi: Vec<Complex> = psi.iter().map(|c| c.scale(&inv)).collect();

    let rho_b = bath_state.with_precision(bits).hermitian_part();
    if bath_state.hermitian_defect() > STATE_TOLERANCE {
        return Err(Error::BadState("bath state is not Hermitian".into()));
    }
    let tr = rho_b.trace();
    if (tr.re.to_f64() - 1.0).abs() > STATE_TOLERANCE || tr.im.to_f64().abs() > STATE_TOLERANCE {
        return Err(Error::BadState(format!("bath state has trace {:?}", tr)));
    }
    let rho_b = rho_b.scale(&tr.re.clone().recip());

    let mut rho_s = OperatorMatrix::zeros(2, bits);
    for i in 0..2 {
        for j in 0..2 {
            *rho_s.entry_mut(i, j) = psi[i].mul(&psi[j].conj());
        }
    }
    let rho = embed(&rho_b, &rho_s, POS)?;
    let evolved = u.mul(&rho)?.mul(&u.adjoint())?;
    let reduced = partial_trace_system(&evolved, 2, POS)?;
    let mut purity = Float::new(bits);
    for i in 0..2 {
        for j in 0..2 {
            purity += reduced.entry(i, j).norm_sqr();
        }
    }
    let loss = Float::with_val(bits, 1 - purity);
    Ok(if loss.is_sign_negative() { Float::new(bits) } else { loss })
}

/// Generator of `u · (I_B ⊗ Q)†` divided by the sequence duration, where `Q`
/// is the bare pulse product, and its error phase.
pub fn effective_error_hamiltonian(u: &OperatorMatrix, seq: &PulseSequence) -> Result<(OperatorMatrix, f64)> {
    let t = seq.total_duration();
    if !(t > 0.0) {
        return Err(Error::BadParams("sequence has zero duration".into()));
    }
    let bits = u.precision_bits();
    let q = ideal_system_unitary(seq, bits);
    let bath_dim = u.dim() / 2;
    let lifted = tensor(&OperatorMatrix::identity(bath_dim, bits), &q)?;
    let w = u.mul(&lifted.adjoint())?;
    let h = matrix_log_unitary(&w)?.scale(&Float::with_val(bits, t).recip()).hermitian_part();
    let phi = error_phase_from_hamiltonian(&h, t)?;
    Ok((h, phi))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThompsonCheck {
    pub holds: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// Compare `‖H_e′‖` with `‖H_e‖` (spectral norms) for an ideal-pulse sequence.
pub fn thompson_check(h_e: &OperatorMatrix, seq: &PulseSequence) -> Result<ThompsonCheck> {
    if !seq.is_ideal() {
        return Err(Error::Unsupported("Thompson check needs ideal pulses".into()));
    }
    let u = Evolver::new(h_e, h_e.precision_bits())?.evolve(seq)?;
    let (h_err, _) = effective_error_hamiltonian(&u, seq)?;
    let lhs = op_norm_f64(&h_err, NormKind::Spectral)?;
    let rhs = op_norm_f64(h_e, NormKind::Spectral)?;
    Ok(ThompsonCheck { holds: lhs <= rhs * (1.0 + 1e-9), lhs, rhs })
}

/// `f = 1 − Φ²`
pub fn fidelity_estimate(phi: f64) -> f64 {
    1.0 - phi * phi
}

#[derive(Debug, Clone)]
pub struct EvolutionResult {
    pub label: String,
    pub n_pulses: u64,
    pub duration: f64,
    pub u_total: OperatorMatrix,
    pub ideal_system_unitary: OperatorMatrix,
    /// `None` when the propagator's logarithm is ambiguous.
    pub h_eff_error: Option<OperatorMatrix>,
    pub purity_loss: Float,
    pub error_phase_exact: Option<f64>,
    pub wall_segments: u64,
    pub precision_bits: u32,
}

impl EvolutionResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "label": self.label,
            "n_pulses": self.n_pulses,
            "duration_s": self.duration,
            "purity_loss": to_decimal(&self.purity_loss),
            "error_phase": self.error_phase_exact,
            "precision_bits": self.precision_bits,
        })
    }
}

/// Full run of `seq` from `ρ_B ⊗ |+⟩⟨+|`. Under an adaptive policy the run is
/// repeated at doubled precision while the purity loss is within 100x of the
/// rounding floor.
pub fn simulate(
    h_e: &OperatorMatrix,
    seq: &PulseSequence,
    bath_state: &OperatorMatrix,
    policy: PrecisionPolicy,
) -> Result<EvolutionResult> {
    let (u, bits) = run_purity(h_e, seq, bath_state, policy)?;
    let (u, loss) = u;
    let (h_eff_error, error_phase_exact) = match effective_error_hamiltonian(&u, seq) {
        Ok((h, phi)) => (Some(h), Some(phi)),
        Err(Error::BranchAmbiguity { .. } | Error::BadParams(_)) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(EvolutionResult {
        label: seq.label().to_string(),
        n_pulses: seq.pulse_count(),
        duration: seq.total_duration(),
        ideal_system_unitary: ideal_system_unitary(seq, bits),
        u_total: u,
        h_eff_error,
        purity_loss: loss,
        error_phase_exact,
        wall_segments: seq.segment_count(),
        precision_bits: bits,
    })
}

type PurityRun = ((OperatorMatrix, Float), u32);

fn run_purity(h_e: &OperatorMatrix, seq: &PulseSequence, bath_state: &OperatorMatrix, policy: PrecisionPolicy) -> Result<PurityRun> {
    run_with_escalation(policy, h_e.dim(), |bits| {
        let u = Evolver::new(h_e, bits)?.evolve(seq)?;
        let loss = purity_loss(&u, &default_system_state(bits), bath_state)?;
        let obs = loss.to_f64();
        Ok(((u, loss), obs))
    })
}

/// Purity loss only, with escalation. Returns the loss and the bits used.
pub fn purity_loss_adaptive(
    h_e: &OperatorMatrix,
    seq: &PulseSequence,
    bath_state: &OperatorMatrix,
    policy: PrecisionPolicy,
) -> Result<(Float, u32)> {
    run_purity(h_e, seq, bath_state, policy).map(|((_, loss), bits)| (loss, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{gen_cdd, gen_universal_cycle};

    fn pure_bath(bits: u32) -> OperatorMatrix {
        let b = OperatorMatrix::from_f64(2, bits, &[(1.0, 0.0), (0.3, 0.1), (0.3, -0.1), (-0.5, 0.0)]).unwrap();
        tensor(&b, &OperatorMatrix::identity(2, bits)).unwrap()
    }

    #[test]
    fn empty_and_pure_bath() {
        let h = pure_bath(128);
        let u = evolve(&h, &PulseSequence::empty("e"), PrecisionPolicy::Fixed(128)).unwrap();
        assert_eq!(u, OperatorMatrix::identity(4, 128));
        let seq = PulseSequence::from_segments("f", vec![Segment::free(0.7)]);
        let u = evolve(&h, &seq, PrecisionPolicy::Fixed(128)).unwrap();
        let rho_b = OperatorMatrix::identity(2, 128).scale_f64(0.5);
        assert!(purity_loss(&u, &default_system_state(128), &rho_b).unwrap().to_f64().abs() < 1e-35);
        let (h_err, phi) = effective_error_hamiltonian(&u, &seq).unwrap();
        assert!(phi < 1e-30);
        assert!(h_err.sub(&h).unwrap().max_abs().to_f64() < 1e-30);
    }

    #[test]
    fn swap_with_mixed_bath() {
        let bits = 128;
        let mut swap = OperatorMatrix::zeros(4, bits);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            *swap.entry_mut(i, j) = Complex::one(bits);
        }
        let rho_b = OperatorMatrix::identity(2, bits).scale_f64(0.5);
        let loss = purity_loss(&swap, &default_system_state(bits), &rho_b).unwrap();
        assert!((loss.to_f64() - 0.5).abs() < 1e-30);
        let bad = [Complex::one(bits), Complex::one(bits)];
        assert!(matches!(purity_loss(&swap, &bad, &rho_b), Err(Error::BadState(_))));
    }

    #[test]
    fn pulses_are_exact() {
        let x = pulse_unitary(Axis::X, Angle::PI, 128);
        assert_eq!(x, OperatorMatrix::pauli(Axis::X, 128).mul_i().neg());
        let cyc = gen_universal_cycle(1.0).unwrap();
        let q = ideal_system_unitary(&cyc, 128);
        // ZXZX = (ZX)² = (iY)² = −I
        assert_eq!(q, OperatorMatrix::identity(2, 128).neg());
        let half = pulse_unitary(Axis::Y, Angle::from_pi_multiple(0.5), 128);
        assert!(half.unitary_defect() < 1e-35);
    }

    #[test]
    fn tree_and_flat_agree() {
        let bits = 128;
        let h = OperatorMatrix::from_f64(
            4,
            bits,
            &[
                (0.2, 0.0), (0.1, 0.3), (0.0, 0.2), (0.4, 0.0),
                (0.1, -0.3), (-0.1, 0.0), (0.3, 0.0), (0.0, -0.1),
                (0.0, -0.2), (0.3, 0.0), (0.5, 0.0), (0.2, 0.2),
                (0.4, 0.0), (0.0, 0.1), (0.2, -0.2), (-0.6, 0.0),
            ],
        )
        .unwrap();
        let seq = gen_cdd(0.01, 2).unwrap();
        let flat = PulseSequence::from_segments("flat", seq.segments());
        let a = evolve(&h, &seq, PrecisionPolicy::Fixed(bits)).unwrap();
        let b = evolve(&h, &flat, PrecisionPolicy::Fixed(bits)).unwrap();
        assert!(a.sub(&b).unwrap().max_abs().to_f64() < 1e-30);
        assert!(thompson_check(&h, &seq).unwrap().holds);
    }
}
