//! Level-by-level renormalization of the bath operators under concatenation.

use super::terms::{conjugated_hamiltonians, cycle_pieces, magnus_a1_a2};
use crate::error::{Error, Result};
use crate::hamiltonian::{decompose, BathDecomposition};
use crate::operator::{anticommutator, commutator, op_norm_f64, NormKind, OperatorMatrix, SystemPosition};
use crate::scalar::Complex;

/// Operational cutoff for `τ_n β ≪ 1`.
pub const TAUNB_CUTOFF: f64 = 0.1;

/// Bath operators at every concatenation level, `levels[0]` being the input.
#[derive(Debug, Clone)]
pub struct RenormalizationTrace {
    pub levels: Vec<BathDecomposition>,
    pub tau0: f64,
    pub delta: f64,
    /// `h^(n) = max(‖B_X^(n)‖, ‖B_Y^(n)‖)`, spectral norm.
    pub h: Vec<f64>,
    /// `τ_n ‖B0‖ ≥ 0.1` at level n.
    pub taunb_flags: Vec<bool>,
    /// Relative disagreement between the closed form and the recursive
    /// Magnus evaluation per level. Empty for finite-width traces.
    pub cross_check: Vec<f64>,
}

impl RenormalizationTrace {
    pub fn n_levels(&self) -> usize {
        self.levels.len() - 1
    }

    /// `τ_n = 4^n τ0`.
    pub fn tau(&self, n: usize) -> f64 {
        tau_at(self.tau0, n)
    }

    pub fn any_convergence_flag(&self) -> bool {
        self.taunb_flags.iter().any(|&f| f)
    }

    pub fn max_cross_check(&self) -> f64 {
        self.cross_check.iter().copied().fold(0.0, f64::max)
    }
}

pub(crate) fn tau_at(tau0: f64, n: usize) -> f64 {
    tau0 * 4f64.powi(n as i32)
}

fn i_times(a: &OperatorMatrix, s: f64) -> OperatorMatrix {
    a.mul_i().scale_f64(s)
}

fn level_stats(levels: &[BathDecomposition], tau0: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    let beta = op_norm_f64(&levels[0].b0, NormKind::Spectral)?;
    let mut h = Vec::with_capacity(levels.len());
    let mut flags = Vec::with_capacity(levels.len());
    for (n, d) in levels.iter().enumerate() {
        let hx = op_norm_f64(&d.bx, NormKind::Spectral)?;
        let hy = op_norm_f64(&d.by, NormKind::Spectral)?;
        h.push(hx.max(hy));
        flags.push(tau_at(tau0, n) * beta >= TAUNB_CUTOFF);
    }
    Ok((h, flags))
}

fn check_inputs(tau0: f64, n_levels: usize) -> Result<()> {
    if !(tau0.is_finite() && tau0 > 0.0) {
        return Err(Error::BadParams(format!("tau0 must be positive, got {tau0}")));
    }
    if n_levels < 1 {
        return Err(Error::BadParams("at least one concatenation level is required".into()));
    }
    Ok(())
}

/// One ideal-pulse level in closed form.
fn closed_form_step(prev: &BathDecomposition, b0: &OperatorMatrix, tau: f64) -> Result<BathDecomposition> {
    let bx = i_times(&commutator(b0, &prev.bx)?, tau);
    let yc = commutator(b0, &prev.by)?;
    let xz = anticommutator(&prev.bx, &prev.bz)?;
    let by = i_times(&yc, 0.5 * tau).add(&xz.scale_f64(0.5 * tau))?;
    let bz = OperatorMatrix::zeros(b0.dim(), b0.precision_bits());
    BathDecomposition::new(b0.clone(), bx, by, bz)
}

/// One level from the second-order Magnus expansion of the conjugated frames.
fn magnus_step(prev: &BathDecomposition, tau: f64) -> Result<BathDecomposition> {
    let hs = conjugated_hamiltonians(prev)?;
    let heff = magnus_a1_a2(&cycle_pieces(&hs, tau))?.effective_hamiltonian()?;
    decompose(&heff, SystemPosition::Last)
}

/// Largest gap between two decompositions. `B_X` and `B_Y` are compared
/// relative to their own size, `B0` and `B_Z` relative to the largest entry.
fn relative_gap(a: &BathDecomposition, b: &BathDecomposition) -> Result<f64> {
    let scale = [&a.b0, &a.bx, &a.by, &a.bz].iter().map(|m| m.max_abs().to_f64()).fold(0.0, f64::max);
    let mut gap = 0.0f64;
    for (x, y, own) in [(&a.b0, &b.b0, false), (&a.bx, &b.bx, true), (&a.by, &b.by, true), (&a.bz, &b.bz, false)] {
        let diff = x.sub(y)?.max_abs().to_f64();
        let denom = if own { x.max_abs().to_f64() } else { scale };
        if denom > 0.0 {
            gap = gap.max(diff / denom);
        } else if diff > 0.0 {
            gap = f64::INFINITY;
        }
    }
    Ok(gap)
}

/// Ideal-pulse recursion. Each level is evaluated in closed form and again
/// through the second-order Magnus expansion, with the relative gap kept in
/// `cross_check`. `B0` is copied forward unchanged in the closed form.
pub fn renormalize_ideal(d: &BathDecomposition, tau0: f64, n_levels: usize) -> Result<RenormalizationTrace> {
    check_inputs(tau0, n_levels)?;
    let mut levels = vec![d.clone()];
    let mut recursive = d.clone();
    let mut cross_check = Vec::with_capacity(n_levels);
    for n in 1..=n_levels {
        let tau = tau_at(tau0, n - 1);
        let next = closed_form_step(&levels[n - 1], &d.b0, tau)?;
        recursive = magnus_step(&recursive, tau)?;
        cross_check.push(relative_gap(&next, &recursive)?);
        levels.push(next);
    }
    let (h, taunb_flags) = level_stats(&levels, tau0)?;
    Ok(RenormalizationTrace { levels, tau0, delta: 0.0, h, taunb_flags, cross_check })
}

/// Finite-width recursion. Commutator and anticommutator terms act on the
/// previous level; the `δ/τ` terms act on the bare operators.
///
/// The `B_Z` rule is not Hermitian in general, so levels past the first may
/// hold non-Hermitian operators. Norms are spectral.
pub fn renormalize_finite_width(
    d: &BathDecomposition,
    tau0: f64,
    delta: f64,
    n_levels: usize,
) -> Result<RenormalizationTrace> {
    check_inputs(tau0, n_levels)?;
    if !(delta >= 0.0) {
        return Err(Error::BadParams(format!("pulse width must be nonnegative, got {delta}")));
    }
    if delta >= tau0 {
        return Err(Error::WidthTooLarge { delta, available: tau0 });
    }
    let bits = d.precision_bits();
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let minus_i = Complex::from_f64(bits, 0.0, -1.0);
    let (x0, y0, z0) = (&d.bx, &d.by, &d.bz);
    let mut levels = vec![d.clone()];
    for n in 1..=n_levels {
        let tau = tau_at(tau0, n - 1);
        let r = delta / tau;
        let p = &levels[n - 1];

        let bx = i_times(&commutator(&d.b0, &p.bx)?, tau - delta)
            .add(&x0.scale_f64(0.5 * r).sub(&y0.scale_f64(r * inv_pi))?)?;

        let cy = commutator(&d.b0, &p.by)?;
        let axz = anticommutator(&p.bx, &p.bz)?;
        let zx = p.bz.mul(&p.bx)?;
        let first = i_times(&cy.add(&axz.scale_complex(&minus_i))?, 0.5 * tau);
        let second = cy.add(&axz.scale_f64(2.0).add(&zx.scale_f64(2.0))?.scale_complex(&minus_i))?;
        let by = first.add(&i_times(&second, 0.5 * delta))?.add(&z0.scale_f64(r * inv_pi))?;

        let inner = p.bx.mul(&z0.add(x0)?)?.scale_f64(2.0 * inv_pi).add(&p.by.mul(x0)?)?;
        let bz = i_times(&inner, delta).add(&z0.scale_f64(r))?;

        levels.push(BathDecomposition::new(d.b0.clone(), bx, by, bz)?);
    }
    let (h, taunb_flags) = level_stats(&levels, tau0)?;
    Ok(RenormalizationTrace { levels, tau0, delta, h, taunb_flags, cross_check: Vec::new() })
}

/// `2^{n²} (β τ0)^n J`, the ideal-pulse bound on `h^(n)`.
pub fn ideal_level_bound(j: f64, beta: f64, tau0: f64, n: u32) -> f64 {
    let e = f64::from(n);
    (e * e * std::f64::consts::LN_2 + e * (beta * tau0).ln()).exp() * j
}

/// Bounds on `(‖B_X^(n)‖, ‖B_Y^(n)‖, ‖B_Z^(n)‖)` for `n = 0..=n` from the
/// finite-width norm recursion. Entry 0 is the input triple.
pub fn appendix_b_norm_recursion(
    beta_x: f64,
    beta_y: f64,
    beta_z: f64,
    beta: f64,
    tau0: f64,
    delta: f64,
    n: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    if [beta_x, beta_y, beta_z, beta, tau0, delta].iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::BadParams("norm recursion inputs must be nonnegative".into()));
    }
    if delta >= tau0 {
        return Err(Error::WidthTooLarge { delta, available: tau0 });
    }
    let inv_pi = std::f64::consts::FRAC_1_PI;
    let mut out = vec![(beta_x, beta_y, beta_z)];
    for k in 1..=n {
        let tau = tau_at(tau0, k - 1);
        let r = delta / tau;
        let (px, py, pz) = out[k - 1];
        let x = 2.0 * (tau - delta) * beta * px + r * (0.5 * beta_x + inv_pi * beta_y);
        let y = (tau - delta) * beta * py + (tau - 2.0 * delta) * px * pz + inv_pi * r * beta_z;
        let z = delta * (2.0 * inv_pi * px * (beta_z + beta_x) + py * beta_x) + r * beta_z;
        out.push((x, y, z));
    }
    Ok(out)
}

/// Reassembled level-n effective Hamiltonian `Σ B_α^(n) ⊗ σ_α`.
pub fn level_hamiltonian(trace: &RenormalizationTrace, n: usize) -> Result<OperatorMatrix> {
    let d = trace
        .levels
        .get(n)
        .ok_or_else(|| Error::BadParams(format!("level {n} beyond trace depth {}", trace.n_levels())))?;
    d.reassemble(SystemPosition::Last)
}
