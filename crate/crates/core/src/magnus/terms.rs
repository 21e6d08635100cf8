//! First and second Magnus terms of piecewise-constant evolutions.

use crate::error::{Error, Result};
use crate::hamiltonian::BathDecomposition;
use crate::operator::{commutator, embed, OperatorMatrix, SystemPosition};
use crate::pulse::Axis;
use crate::scalar::{Complex, Float};

/// Toggling-frame Hamiltonians of the universal cycle, `[H1, H2, H3, H4]`:
/// `H_e` conjugated by `I`, `X`, `Y` and `Z` on the system qubit.
///
/// Coefficient signs of (B0, BX, BY, BZ): H1 `++++`, H2 `++--`, H3 `+-+-`,
/// H4 `+--+`.
pub fn conjugated_hamiltonians(d: &BathDecomposition) -> Result<[OperatorMatrix; 4]> {
    conjugated_hamiltonians_at(d, SystemPosition::Last)
}

pub fn conjugated_hamiltonians_at(d: &BathDecomposition, pos: SystemPosition) -> Result<[OperatorMatrix; 4]> {
    let bits = d.precision_bits();
    let id = embed(&d.b0, &OperatorMatrix::identity(2, bits), pos)?;
    let mut parts = Vec::with_capacity(3);
    for axis in Axis::ALL {
        parts.push(embed(d.coupling(axis), &OperatorMatrix::pauli(axis, bits), pos)?);
    }
    let (x, y, z) = (&parts[0], &parts[1], &parts[2]);
    let combo = |sx: bool, sy: bool, sz: bool| -> Result<OperatorMatrix> {
        let mut h = id.clone();
        for (term, plus) in [(x, sx), (y, sy), (z, sz)] {
            h = if plus { h.add(term)? } else { h.sub(term)? };
        }
        Ok(h)
    };
    Ok([combo(true, true, true)?, combo(true, false, false)?, combo(false, true, false)?, combo(false, false, true)?])
}

/// `A1`, `A2` and the span they were computed over.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnusTerms {
    pub a1: OperatorMatrix,
    pub a2: OperatorMatrix,
    pub duration: f64,
}

impl MagnusTerms {
    /// `A1 + A2`, the second-order approximation of the propagator's logarithm.
    pub fn exponent(&self) -> Result<OperatorMatrix> {
        self.a1.add(&self.a2)
    }

    /// `(i/T)(A1 + A2)`.
    pub fn effective_hamiltonian(&self) -> Result<OperatorMatrix> {
        let bits = self.a1.precision_bits();
        let inv_t = Float::with_val(bits, self.duration).recip();
        Ok(self.exponent()?.mul_i().scale(&inv_t).hermitian_part())
    }
}

/// Magnus terms for pieces listed in time order, earliest first:
/// `A1 = −i Σ t_k H_k`, `A2 = −½ Σ_{k<l} t_k t_l [H_l, H_k]`.
pub fn magnus_a1_a2(pieces: &[(OperatorMatrix, f64)]) -> Result<MagnusTerms> {
    let Some((first, _)) = pieces.first() else {
        return Err(Error::BadParams("Magnus expansion of an empty product".into()));
    };
    let n = first.dim();
    let bits = first.precision_bits();
    let mut running = OperatorMatrix::zeros(n, bits);
    let mut a2 = OperatorMatrix::zeros(n, bits);
    let mut duration = 0.0;
    for (h, t) in pieces {
        if !(t.is_finite() && *t > 0.0) {
            return Err(Error::BadParams(format!("piece duration must be positive, got {t}")));
        }
        let th = h.scale(&Float::with_val(bits, *t));
        a2 = a2.add(&commutator(&th, &running)?)?;
        running = running.add(&th)?;
        duration += t;
    }
    let minus_i = Complex::from_f64(bits, 0.0, -1.0);
    Ok(MagnusTerms {
        a1: running.scale_complex(&minus_i),
        a2: a2.scale_f64(-0.5),
        duration,
    })
}

/// Pieces of one universal cycle ordered so that `magnus_a1_a2` reproduces
/// `A2 = −½ τ² Σ_{i<j} [H_i, H_j]`: `[H4, H3, H2, H1]`, each for `tau`.
///
/// The generated sequence fXfZfXfZ runs the frames in the opposite order
/// (`H1` first). Reversing the order flips the sign of `A2`, which is the
/// same as `τ → −τ` and leaves every norm unchanged.
pub fn cycle_pieces(hs: &[OperatorMatrix; 4], tau: f64) -> Vec<(OperatorMatrix, f64)> {
    hs.iter().rev().map(|h| (h.clone(), tau)).collect()
}

/// Pieces in the time order realised by `gen_universal_cycle`.
pub fn cycle_pieces_physical(hs: &[OperatorMatrix; 4], tau: f64) -> Vec<(OperatorMatrix, f64)> {
    hs.iter().map(|h| (h.clone(), tau)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{matrix_exp_hermitian, tensor};

    fn qubit_model(bits: u32) -> BathDecomposition {
        let m = |e: &[(f64, f64)]| OperatorMatrix::from_f64(2, bits, e).unwrap();
        BathDecomposition::new(
            m(&[(0.3, 0.0), (0.1, -0.2), (0.1, 0.2), (-0.4, 0.0)]),
            m(&[(0.2, 0.0), (0.5, 0.1), (0.5, -0.1), (0.1, 0.0)]),
            m(&[(-0.1, 0.0), (0.0, 0.3), (0.0, -0.3), (0.2, 0.0)]),
            m(&[(0.4, 0.0), (0.2, 0.0), (0.2, 0.0), (-0.3, 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn single_piece() {
        let h = OperatorMatrix::pauli(Axis::X, 128);
        let t = magnus_a1_a2(&[(h.clone(), 0.5)]).unwrap();
        assert!(t.a2.is_zero());
        assert_eq!(t.effective_hamiltonian().unwrap(), h);
        assert!(matches!(magnus_a1_a2(&[]), Err(Error::BadParams(_))));
    }

    #[test]
    fn second_order_matches_exact_product() {
        let bits = 192;
        let hs = conjugated_hamiltonians(&qubit_model(bits)).unwrap();
        let mut errs = Vec::new();
        for tau in [1e-2, 1e-3] {
            let pieces = cycle_pieces(&hs, tau);
            let mut u = OperatorMatrix::identity(4, bits);
            for (h, t) in &pieces {
                u = matrix_exp_hermitian(h, *t).unwrap().mul(&u).unwrap();
            }
            let heff = magnus_a1_a2(&pieces).unwrap().effective_hamiltonian().unwrap();
            let approx = matrix_exp_hermitian(&heff, 4.0 * tau).unwrap();
            errs.push(u.sub(&approx).unwrap().max_abs().to_f64());
        }
        let slope = (errs[0] / errs[1]).log10();
        assert!((slope - 3.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn sum_of_frames_is_pure_bath() {
        let d = qubit_model(128);
        let hs = conjugated_hamiltonians(&d).unwrap();
        let sum = hs.iter().skip(1).fold(hs[0].clone(), |a, h| a.add(h).unwrap());
        let expect = tensor(&d.b0, &OperatorMatrix::identity(2, 128)).unwrap().scale_f64(4.0);
        assert!(sum.sub(&expect).unwrap().max_abs().to_f64() < 1e-30);
    }
}
