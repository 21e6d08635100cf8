//! Matrix functions, norms and partial traces.

use super::{eigh, tensor, OperatorMatrix};
use crate::error::{Error, Result};
use crate::scalar::{pi, Complex, Float};

/// Which operator norm to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NormKind {
    /// Largest singular value.
    Spectral,
    /// λ_max − λ_min of a Hermitian operator.
    #[default]
    EigenSpread,
}

/// Tensor position of the system factor within a joint operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SystemPosition {
    First,
    #[default]
    Last,
}

/// `exp(−i t h)` for Hermitian `h`.
pub fn matrix_exp_hermitian(h: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    matrix_exp_hermitian_at(h, &Float::with_val(h.precision_bits(), t))
}

pub fn matrix_exp_hermitian_at(h: &OperatorMatrix, t: &Float) -> Result<OperatorMatrix> {
    h.require_hermitian()?;
    Ok(eigh(h)?.exp_minus_i(t))
}

/// Principal generator `H` with `u = exp(−iH)`, eigenphases in (−π, π).
///
/// Works through the Cayley transform `C = −i(I+U)^{-1}(I−U)`, which is
/// Hermitian with eigenvalues tan(θ/2) for each eigenphase θ of `H`.
pub fn matrix_log_unitary(u: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = u.dim();
    let bits = u.precision_bits();
    let defect = u.unitary_defect();
    if defect > n as f64 * 2f64.powi(-(bits as i32) / 2) {
        return Err(Error::NotUnitary { defect });
    }
    let id = OperatorMatrix::identity(n, bits);
    let Some(inv) = id.add(u)?.inverse() else {
        return Err(Error::BranchAmbiguity { phase: std::f64::consts::PI });
    };
    let c = inv.mul(&id.sub(u)?)?.mul_i().neg().hermitian_part();
    let eig = eigh(&c)?;
    let branch_tol = 2f64.powi(-(bits as i32) / 4);
    let half_pi = Float::with_val(bits, pi(bits) / 2u32);
    for l in &eig.values {
        let theta = Float::with_val(bits, l.atan_ref());
        let gap = (Float::with_val(bits, &half_pi) - theta.clone().abs()).to_f64() * 2.0;
        if gap <= branch_tol {
            return Err(Error::BranchAmbiguity { phase: 2.0 * theta.to_f64() });
        }
    }
    Ok(eig.map(|l| Complex::from_real(Float::with_val(bits, l.atan_ref()) * 2u32)))
}

pub fn op_norm(a: &OperatorMatrix, kind: NormKind) -> Result<Float> {
    match kind {
        NormKind::EigenSpread => {
            a.require_hermitian()?;
            let e = eigh(a)?;
            Ok(Float::with_val(a.precision_bits(), e.max() - e.min()))
        }
        NormKind::Spectral => {
            if a.is_hermitian() {
                let e = eigh(a)?;
                let lo = Float::with_val(a.precision_bits(), e.min().abs_ref());
                let hi = Float::with_val(a.precision_bits(), e.max().abs_ref());
                Ok(if lo > hi { lo } else { hi })
            } else {
                let g = a.adjoint().mul(a)?;
                let e = eigh(&g)?;
                let top = e.max().clone();
                Ok(if top.is_sign_negative() { Float::new(a.precision_bits()) } else { top.sqrt() })
            }
        }
    }
}

pub fn op_norm_f64(a: &OperatorMatrix, kind: NormKind) -> Result<f64> {
    op_norm(a, kind).map(|x| x.to_f64())
}

fn split_dims(total: usize, system_dim: usize) -> Result<usize> {
    if system_dim == 0 || total % system_dim != 0 {
        return Err(Error::DimMismatch(format!(
            "joint dimension {total} is not divisible by system dimension {system_dim}"
        )));
    }
    Ok(total / system_dim)
}

fn joint_index(b: usize, s: usize, bath_dim: usize, system_dim: usize, pos: SystemPosition) -> usize {
    match pos {
        SystemPosition::Last => b * system_dim + s,
        SystemPosition::First => s * bath_dim + b,
    }
}

/// Reduced system operator: the bath factor is traced out.
pub fn partial_trace_system(rho: &OperatorMatrix, system_dim: usize, pos: SystemPosition) -> Result<OperatorMatrix> {
    let bd = split_dims(rho.dim(), system_dim)?;
    let mut out = OperatorMatrix::zeros(system_dim, rho.precision_bits());
    for s in 0..system_dim {
        for t in 0..system_dim {
            let mut acc = Complex::zero(rho.precision_bits());
            for b in 0..bd {
                let i = joint_index(b, s, bd, system_dim, pos);
                let j = joint_index(b, t, bd, system_dim, pos);
                acc = acc.add(rho.entry(i, j));
            }
            *out.entry_mut(s, t) = acc;
        }
    }
    Ok(out)
}

/// Reduced bath operator: the system factor is traced out.
pub fn partial_trace_bath(rho: &OperatorMatrix, system_dim: usize, pos: SystemPosition) -> Result<OperatorMatrix> {
    let bd = split_dims(rho.dim(), system_dim)?;
    let mut out = OperatorMatrix::zeros(bd, rho.precision_bits());
    for b in 0..bd {
        for c in 0..bd {
            let mut acc = Complex::zero(rho.precision_bits());
            for s in 0..system_dim {
                let i = joint_index(b, s, bd, system_dim, pos);
                let j = joint_index(c, s, bd, system_dim, pos);
                acc = acc.add(rho.entry(i, j));
            }
            *out.entry_mut(b, c) = acc;
        }
    }
    Ok(out)
}

/// Joint operator `bath ⊗ system` laid out according to `pos`.
pub fn embed(bath: &OperatorMatrix, system: &OperatorMatrix, pos: SystemPosition) -> Result<OperatorMatrix> {
    match pos {
        SystemPosition::Last => tensor(bath, system),
        SystemPosition::First => tensor(system, bath),
    }
}

/// `H − B0 ⊗ I_S` with `B0 = Tr_S(H)/d_S`.
pub fn system_traceless_part(h: &OperatorMatrix, system_dim: usize, pos: SystemPosition) -> Result<OperatorMatrix> {
    let b0 = partial_trace_bath(h, system_dim, pos)?.scale(&Float::with_val(
        h.precision_bits(),
        1.0 / system_dim as f64,
    ));
    let id = OperatorMatrix::identity(system_dim, h.precision_bits());
    h.sub(&embed(&b0, &id, pos)?)
}
