use crate::error::{Error, Result};
use crate::pulse::Axis;
use crate::scalar::{Complex, Float};
use std::fmt;

/// Dense complex square matrix at a fixed binary precision.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    dim: usize,
    bits: u32,
    data: Vec<Complex>,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "OperatorMatrix(dim={}, bits={})", self.dim, self.bits)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let (re, im) = self.get(i, j);
                    format!("{re:+.3e}{im:+.3e}i")
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl OperatorMatrix {
    pub fn zeros(dim: usize, bits: u32) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        OperatorMatrix { dim, bits, data: vec![Complex::zero(bits); dim * dim] }
    }

    pub fn identity(dim: usize, bits: u32) -> Self {
        let mut m = Self::zeros(dim, bits);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one(bits);
        }
        m
    }

    /// Row-major `(re, im)` entries.
    pub fn from_f64(dim: usize, bits: u32, entries: &[(f64, f64)]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimMismatch(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        let data = entries.iter().map(|&(re, im)| Complex::from_f64(bits, re, im)).collect();
        Ok(OperatorMatrix { dim, bits, data })
    }

    pub fn from_entries(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if data.len() != dim * dim || dim == 0 {
            return Err(Error::DimMismatch(format!("{} entries for a {dim}x{dim} matrix", data.len())));
        }
        let bits = data[0].prec();
        if let Some(c) = data.iter().find(|c| c.prec() != bits || c.im.prec() != bits) {
            return Err(Error::PrecisionMismatch(bits, c.prec()));
        }
        Ok(OperatorMatrix { dim, bits, data })
    }

    pub fn diagonal(values: &[Float]) -> Self {
        let bits = values[0].prec();
        let mut m = Self::zeros(values.len(), bits);
        for (i, v) in values.iter().enumerate() {
            m.data[i * values.len() + i] = Complex::from_real(Float::with_val(bits, v));
        }
        m
    }

    /// Pauli matrix for `axis`.
    pub fn pauli(axis: Axis, bits: u32) -> Self {
        let e = match axis {
            Axis::X => [(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0)],
            Axis::Y => [(0.0, 0.0), (0.0, -1.0), (0.0, 1.0), (0.0, 0.0)],
            Axis::Z => [(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (-1.0, 0.0)],
        };
        Self::from_f64(2, bits, &e).expect("2x2")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn precision_bits(&self) -> u32 {
        self.bits
    }

    pub fn entry(&self, i: usize, j: usize) -> &Complex {
        &self.data[i * self.dim + j]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut Complex {
        &mut self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex) {
        self.data[i * self.dim + j] = v.with_prec(self.bits);
    }

    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        self.entry(i, j).to_f64()
    }

    pub fn entries(&self) -> &[Complex] {
        &self.data
    }

    /// Copy at another precision. Values exactly representable at both
    /// precisions are carried over unchanged.
    pub fn with_precision(&self, bits: u32) -> Self {
        OperatorMatrix { dim: self.dim, bits, data: self.data.iter().map(|c| c.with_prec(bits)).collect() }
    }

    fn check_pair(&self, o: &Self) -> Result<()> {
        if self.bits != o.bits {
            return Err(Error::PrecisionMismatch(self.bits, o.bits));
        }
        if self.dim != o.dim {
            return Err(Error::DimMismatch(format!("{} vs {}", self.dim, o.dim)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check_pair(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect();
        Ok(OperatorMatrix { dim: self.dim, bits: self.bits, data })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.check_pair(o)?;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect();
        Ok(OperatorMatrix { dim: self.dim, bits: self.bits, data })
    }

    pub fn scale(&self, s: &Float) -> Self {
        OperatorMatrix { dim: self.dim, bits: self.bits, data: self.data.iter().map(|c| c.scale(s)).collect() }
    }

    pub fn scale_f64(&self, s: f64) -> Self {
        self.scale(&Float::with_val(self.bits, s))
    }

    pub fn scale_complex(&self, s: &Complex) -> Self {
        OperatorMatrix { dim: self.dim, bits: self.bits, data: self.data.iter().map(|c| c.mul(s)).collect() }
    }

    /// Multiply by i.
    pub fn mul_i(&self) -> Self {
        OperatorMatrix { dim: self.dim, bits: self.bits, data: self.data.iter().map(Complex::mul_i).collect() }
    }

    pub fn neg(&self) -> Self {
        self.scale_f64(-1.0)
    }

    /// Matrix product `self · o`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        self.check_pair(o)?;
        let n = self.dim;
        let bits = self.bits;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut re = Float::new(bits);
                let mut im = Float::new(bits);
                for k in 0..n {
                    let a = &self.data[i * n + k];
                    let b = &o.data[k * n + j];
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    re += &a.re * &b.re;
                    re -= &a.im * &b.im;
                    im += &a.re * &b.im;
                    im += &a.im * &b.re;
                }
                out.push(Complex { re, im });
            }
        }
        Ok(OperatorMatrix { dim: n, bits, data: out })
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        if v.len() != self.dim {
            return Err(Error::DimMismatch(format!("vector of length {} for dim {}", v.len(), self.dim)));
        }
        let n = self.dim;
        Ok((0..n)
            .map(|i| {
                let mut acc = Complex::zero(self.bits);
                for (k, x) in v.iter().enumerate() {
                    acc = acc.add(&self.data[i * n + k].mul(x));
                }
                acc
            })
            .collect())
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.data[j * n + i].conj());
            }
        }
        OperatorMatrix { dim: n, bits: self.bits, data }
    }

    pub fn trace(&self) -> Complex {
        let mut acc = Complex::zero(self.bits);
        for i in 0..self.dim {
            acc = acc.add(&self.data[i * self.dim + i]);
        }
        acc
    }

    /// (A + A†)/2
    pub fn hermitian_part(&self) -> Self {
        let half = Float::with_val(self.bits, 0.5);
        self.add(&self.adjoint()).expect("same shape").scale(&half)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> Float {
        let mut m = Float::new(self.bits);
        for c in &self.data {
            let a = c.abs();
            if a > m {
                m = a;
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> Float {
        let mut acc = Float::new(self.bits);
        for c in &self.data {
            acc += c.norm_sqr();
        }
        acc.sqrt()
    }

    /// max|A − A†| relative to max|A|.
    pub fn hermitian_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale.is_zero() {
            return 0.0;
        }
        let d = self.sub(&self.adjoint()).expect("same shape").max_abs();
        (d / scale).to_f64()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= self.hermitian_tolerance()
    }

    pub fn hermitian_tolerance(&self) -> f64 {
        2f64.powi(8 - self.bits as i32)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > self.hermitian_tolerance() {
            Err(Error::NotHermitian { defect })
        } else {
            Ok(())
        }
    }

    /// max|U†U − I|
    pub fn unitary_defect(&self) -> f64 {
        let p = self.adjoint().mul(self).expect("same shape");
        p.sub(&Self::identity(self.dim, self.bits)).expect("same shape").max_abs().to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Complex::is_zero)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = Self::identity(self.dim, self.bits);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = base.mul(&acc).expect("same shape");
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base).expect("same shape");
            }
        }
        acc
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting. Returns
    /// `None` for numerically singular input.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(n, self.bits);
        let scale = self.max_abs().to_f64();
        let tiny = scale * 2f64.powi(-(self.bits as i32) + 4);
        for col in 0..n {
            let (piv, pmag) = (col..n)
                .map(|r| (r, a.entry(r, col).abs_f64()))
                .fold((col, -1.0), |best, x| if x.1 > best.1 { x } else { best });
            if !(pmag > tiny) {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a.entry(col, col).clone();
            let pinv = Complex::one(self.bits).div(&p);
            for j in 0..n {
                let v = a.entry(col, j).mul(&pinv);
                a.data[col * n + j] = v;
                let w = inv.entry(col, j).mul(&pinv);
                inv.data[col * n + j] = w;
            }
            for r in 0..n {
                if r == col || a.entry(r, col).is_zero() {
                    continue;
                }
                let f = a.entry(r, col).clone();
                for j in 0..n {
                    let v = a.entry(r, j).sub(&f.mul(a.entry(col, j)));
                    a.data[r * n + j] = v;
                    let w = inv.entry(r, j).sub(&f.mul(inv.entry(col, j)));
                    inv.data[r * n + j] = w;
                }
            }
        }
        Some(inv)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.bits != b.bits {
        return Err(Error::PrecisionMismatch(a.bits, b.bits));
    }
    let (na, nb) = (a.dim, b.dim);
    let n = na * nb;
    let mut out = OperatorMatrix::zeros(n, a.bits);
    for i in 0..na {
        for j in 0..na {
            let x = a.entry(i, j);
            if x.is_zero() {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    let y = b.entry(k, l);
                    if !y.is_zero() {
                        out.data[(i * nb + k) * n + j * nb + l] = x.mul(y);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `AB − BA`
pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.mul(b)?.sub(&b.mul(a)?)
}

/// `AB + BA`
pub fn anticommutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    a.mul(b)?.add(&b.mul(a)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &OperatorMatrix, b: &OperatorMatrix, tol: f64) -> bool {
        a.sub(b).unwrap().max_abs().to_f64() <= tol
    }

    #[test]
    fn tensor_examples() {
        let i2 = OperatorMatrix::identity(2, 128);
        assert_eq!(tensor(&i2, &i2).unwrap(), OperatorMatrix::identity(4, 128));
        let xi = tensor(&OperatorMatrix::pauli(Axis::X, 128), &i2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let one = [(0, 2), (1, 3), (2, 0), (3, 1)].contains(&(i, j));
                assert_eq!(xi.get(i, j), (if one { 1.0 } else { 0.0 }, 0.0));
            }
        }
        let lo = OperatorMatrix::identity(2, 64);
        assert!(matches!(tensor(&i2, &lo), Err(Error::PrecisionMismatch(128, 64))));
    }

    #[test]
    fn pauli_algebra() {
        let x = OperatorMatrix::pauli(Axis::X, 128);
        let y = OperatorMatrix::pauli(Axis::Y, 128);
        let z = OperatorMatrix::pauli(Axis::Z, 128);
        let c = commutator(&x, &y).unwrap();
        assert!(close(&c, &z.scale_f64(2.0).mul_i(), 0.0));
        assert!(anticommutator(&x, &y).unwrap().is_zero());
        assert!(commutator(&x, &x).unwrap().is_zero());
        assert!(matches!(
            commutator(&x, &OperatorMatrix::identity(4, 128)),
            Err(Error::DimMismatch(_))
        ));
    }

    #[test]
    fn inverse_and_pow() {
        let m = OperatorMatrix::from_f64(2, 128, &[(2.0, 1.0), (0.0, 1.0), (1.0, 0.0), (3.0, -1.0)]).unwrap();
        let inv = m.inverse().unwrap();
        assert!(close(&m.mul(&inv).unwrap(), &OperatorMatrix::identity(2, 128), 1e-35));
        let p5 = m.pow(5);
        let mut direct = OperatorMatrix::identity(2, 128);
        for _ in 0..5 {
            direct = direct.mul(&m).unwrap();
        }
        assert!(close(&p5, &direct, 1e-30));
        let singular = OperatorMatrix::from_f64(2, 128, &[(1.0, 0.0), (2.0, 0.0), (2.0, 0.0), (4.0, 0.0)]).unwrap();
        assert!(singular.inverse().is_none());
    }
}
