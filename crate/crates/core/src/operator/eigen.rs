//! Cyclic Jacobi diagonalization of complex Hermitian matrices.

use super::OperatorMatrix;
use crate::error::Result;
use crate::scalar::{Complex, Float};

const MAX_SWEEPS: usize = 100;

/// `h = V diag(values) V†`, eigenvalues ascending, eigenvectors as columns of V.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<Float>,
    pub vectors: OperatorMatrix,
}

impl HermitianEigen {
    pub fn bits(&self) -> u32 {
        self.vectors.precision_bits()
    }

    /// `V diag(f(λ)) V†` for a complex-valued spectral function.
    pub fn map(&self, f: impl Fn(&Float) -> Complex) -> OperatorMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let fl: Vec<Complex> = self.values.iter().map(f).collect();
        let mut out = OperatorMatrix::zeros(n, self.bits());
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex::zero(self.bits());
                for k in 0..n {
                    let a = v.entry(i, k);
                    let b = v.entry(j, k);
                    if a.is_zero() || b.is_zero() || fl[k].is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(&fl[k]).mul(&b.conj()));
                }
                *out.entry_mut(i, j) = acc;
            }
        }
        out
    }

    /// `exp(−i t h)`
    pub fn exp_minus_i(&self, t: &Float) -> OperatorMatrix {
        let bits = self.bits();
        self.map(|l| {
            let phase = -Float::with_val(bits, t * l);
            Complex::cis(&phase)
        })
    }

    pub fn max(&self) -> &Float {
        self.values.last().expect("nonempty")
    }

    pub fn min(&self) -> &Float {
        &self.values[0]
    }
}

fn off_diagonal_sq(a: &OperatorMatrix) -> Float {
    let n = a.dim();
    let mut s = Float::new(a.precision_bits());
    for p in 0..n {
        for q in (p + 1)..n {
            s += a.entry(p, q).norm_sqr();
        }
    }
    s
}

/// Eigendecomposition of a Hermitian matrix. The caller is responsible for
/// checking hermiticity; only the Hermitian part of `h` is used.
pub fn eigh(h: &OperatorMatrix) -> Result<HermitianEigen> {
    let n = h.dim();
    let bits = h.precision_bits();
    let mut a = h.hermitian_part();
    let mut v = OperatorMatrix::identity(n, bits);

    let total = a.frobenius_norm();
    let eps = Float::with_val(bits, Float::i_exp(1, -(bits as i32) - 8));
    let stop = Float::with_val(bits, &total * &eps).square();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(&a) <= stop || total.is_zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.entry(p, q).clone();
                if apq.is_zero() {
                    continue;
                }
                let r = apq.abs();
                let w = apq.conj().scale(&Float::with_val(bits, 1 / &r));
                let app = a.entry(p, p).re.clone();
                let aqq = a.entry(q, q).re.clone();

                let theta = Float::with_val(bits, &aqq - &app) / Float::with_val(bits, 2 * &r);
                let root = (Float::with_val(bits, theta.square_ref()) + 1u32).sqrt();
                let mut t = (Float::with_val(bits, theta.abs_ref()) + &root).recip();
                if theta.is_sign_negative() {
                    t = -t;
                }
                let c = (Float::with_val(bits, t.square_ref()) + 1u32).sqrt().recip();
                let s = Float::with_val(bits, &t * &c);
                let sw = w.scale(&s);
                let cw = w.scale(&c);
                let swc = sw.conj();
                let cwc = cw.conj();

                for k in 0..n {
                    let akp = a.entry(k, p).clone();
                    let akq = a.entry(k, q).clone();
                    *a.entry_mut(k, p) = akp.scale(&c).sub(&akq.mul(&sw));
                    *a.entry_mut(k, q) = akp.scale(&s).add(&akq.mul(&cw));
                }
                for k in 0..n {
                    let apk = a.entry(p, k).clone();
                    let aqk = a.entry(q, k).clone();
                    *a.entry_mut(p, k) = apk.scale(&c).sub(&aqk.mul(&swc));
                    *a.entry_mut(q, k) = apk.scale(&s).add(&aqk.mul(&cwc));
                }
                *a.entry_mut(p, q) = Complex::zero(bits);
                *a.entry_mut(q, p) = Complex::zero(bits);
                a.entry_mut(p, p).im = Float::new(bits);
                a.entry_mut(q, q).im = Float::new(bits);

                for k in 0..n {
                    let vkp = v.entry(k, p).clone();
                    let vkq = v.entry(k, q).clone();
                    *v.entry_mut(k, p) = vkp.scale(&c).sub(&vkq.mul(&sw));
                    *v.entry_mut(k, q) = vkp.scale(&s).add(&vkq.mul(&cw));
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.entry(i, i).re.partial_cmp(&a.entry(j, j).re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a.entry(i, i).re.clone()).collect();
    let mut vectors = OperatorMatrix::zeros(n, bits);
    for (col, &src) in order.iter().enumerate() {
        for k in 0..n {
            *vectors.entry_mut(k, col) = v.entry(k, src).clone();
        }
    }
    Ok(HermitianEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Axis;

    #[test]
    fn pauli_spectra() {
        for axis in Axis::ALL {
            let e = eigh(&OperatorMatrix::pauli(axis, 128)).unwrap();
            assert!((e.min().to_f64() + 1.0).abs() < 1e-35);
            assert!((e.max().to_f64() - 1.0).abs() < 1e-35);
        }
    }

    #[test]
    fn reconstructs_complex_hermitian() {
        let m = OperatorMatrix::from_f64(
            3,
            256,
            &[
                (2.0, 0.0), (1.0, -1.0), (0.0, 0.5),
                (1.0, 1.0), (-1.0, 0.0), (0.25, 0.0),
                (0.0, -0.5), (0.25, 0.0), (3.0, 0.0),
            ],
        )
        .unwrap();
        let e = eigh(&m).unwrap();
        let back = e.map(|l| Complex::from_real(l.clone()));
        assert!(back.sub(&m).unwrap().max_abs().to_f64() < 1e-70);
        assert!(e.vectors.unitary_defect() < 1e-70);
        let tr: f64 = e.values.iter().map(|x| x.to_f64()).sum();
        assert!((tr - 4.0).abs() < 1e-12);
    }

    #[test]
    fn widely_separated_scales() {
        let m = OperatorMatrix::from_f64(2, 256, &[(1e12, 0.0), (1e-3, 2e-3), (1e-3, -2e-3), (-1e12, 0.0)]).unwrap();
        let e = eigh(&m).unwrap();
        let back = e.map(|l| Complex::from_real(l.clone()));
        assert!(back.sub(&m).unwrap().max_abs().to_f64() < 1e-50);
    }
}
