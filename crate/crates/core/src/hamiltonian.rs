//! Error Hamiltonians: Pauli decomposition on the system qubit, spin-chain
//! models, thermal bath states and coupling strengths.
//!
//! Units: ħ = 1, every coefficient is an angular frequency in rad/s.

use crate::error::{Error, Result};
use crate::operator::{
    embed, op_norm, partial_trace_bath, tensor, NormKind, OperatorMatrix, SystemPosition,
};
use crate::pulse::Axis;
use crate::scalar::{Complex, Float};
use rand::Rng;

/// ħ/k_B in kelvin-seconds.
pub const HBAR_OVER_KB: f64 = 7.6382e-12;

/// `H_e = B0 ⊗ I + BX ⊗ X + BY ⊗ Y + BZ ⊗ Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct BathDecomposition {
    pub b0: OperatorMatrix,
    pub bx: OperatorMatrix,
    pub by: OperatorMatrix,
    pub bz: OperatorMatrix,
}

impl BathDecomposition {
    pub fn new(b0: OperatorMatrix, bx: OperatorMatrix, by: OperatorMatrix, bz: OperatorMatrix) -> Result<Self> {
        let d = b0.dim();
        for op in [&bx, &by, &bz] {
            if op.dim() != d {
                return Err(Error::DimMismatch(format!("bath operators of dims {d} and {}", op.dim())));
            }
            if op.precision_bits() != b0.precision_bits() {
                return Err(Error::PrecisionMismatch(b0.precision_bits(), op.precision_bits()));
            }
        }
        Ok(BathDecomposition { b0, bx, by, bz })
    }

    pub fn bath_dim(&self) -> usize {
        self.b0.dim()
    }

    pub fn precision_bits(&self) -> u32 {
        self.b0.precision_bits()
    }

    /// Coupling operator for `axis`.
    pub fn coupling(&self, axis: Axis) -> &OperatorMatrix {
        match axis {
            Axis::X => &self.bx,
            Axis::Y => &self.by,
            Axis::Z => &self.bz,
        }
    }

    pub fn with_precision(&self, bits: u32) -> Self {
        BathDecomposition {
            b0: self.b0.with_precision(bits),
            bx: self.bx.with_precision(bits),
            by: self.by.with_precision(bits),
            bz: self.bz.with_precision(bits),
        }
    }

    /// Joint operator `Σ B_α ⊗ σ_α`.
    pub fn reassemble(&self, pos: SystemPosition) -> Result<OperatorMatrix> {
        let bits = self.precision_bits();
        let mut h = embed(&self.b0, &OperatorMatrix::identity(2, bits), pos)?;
        for axis in Axis::ALL {
            h = h.add(&embed(self.coupling(axis), &OperatorMatrix::pauli(axis, bits), pos)?)?;
        }
        Ok(h)
    }
}

/// `B_α = Tr_S[(I_B ⊗ σ_α) h_e] / 2`.
pub fn decompose(h_e: &OperatorMatrix, pos: SystemPosition) -> Result<BathDecomposition> {
    if h_e.dim() % 2 != 0 {
        return Err(Error::DimMismatch(format!("joint dimension {} has no qubit factor", h_e.dim())));
    }
    h_e.require_hermitian()?;
    let bits = h_e.precision_bits();
    let bd = h_e.dim() / 2;
    let half = Float::with_val(bits, 0.5);
    let part = |sigma: OperatorMatrix| -> Result<OperatorMatrix> {
        let lifted = embed(&OperatorMatrix::identity(bd, bits), &sigma, pos)?;
        Ok(partial_trace_bath(&lifted.mul(h_e)?, 2, pos)?.scale(&half).hermitian_part())
    };
    BathDecomposition::new(
        part(OperatorMatrix::identity(2, bits))?,
        part(OperatorMatrix::pauli(Axis::X, bits))?,
        part(OperatorMatrix::pauli(Axis::Y, bits))?,
        part(OperatorMatrix::pauli(Axis::Z, bits))?,
    )
}

/// The small parameters `J`, `β` and `G = max(J, β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingStrengths {
    pub j: f64,
    pub beta: f64,
    pub g: f64,
}

impl CouplingStrengths {
    pub fn new(j: f64, beta: f64) -> Self {
        CouplingStrengths { j, beta, g: j.max(beta) }
    }
}

/// `J = max ‖B_α‖` over the coupling operators, `β = ‖B0‖`.
pub fn coupling_strengths(d: &BathDecomposition, kind: NormKind) -> Result<CouplingStrengths> {
    let mut j = 0.0f64;
    for axis in Axis::ALL {
        j = j.max(op_norm(d.coupling(axis), kind)?.to_f64());
    }
    let beta = op_norm(&d.b0, kind)?.to_f64();
    Ok(CouplingStrengths::new(j, beta))
}

/// `J = I·ΣA_n`, `β = I²·ΣB_nm`.
pub fn estimate_dot_couplings(hyperfine_sum: f64, dipolar_sum: f64, nuclear_spin: f64) -> Result<CouplingStrengths> {
    if hyperfine_sum < 0.0 || dipolar_sum < 0.0 || nuclear_spin < 0.0 {
        return Err(Error::BadParams("coupling sums and nuclear spin must be nonnegative".into()));
    }
    Ok(CouplingStrengths::new(nuclear_spin * hyperfine_sum, nuclear_spin * nuclear_spin * dipolar_sum))
}

/// Open Heisenberg chain whose central spin is the system qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinChainParams {
    pub n_spins: usize,
    /// Base strength of pairs that involve the central spin.
    pub j_coupling: f64,
    /// Base strength of bath-bath pairs.
    pub beta_coupling: f64,
    /// Couplings fall off as `decay_base^(-d)` with lattice distance d.
    pub decay_base: f64,
}

impl SpinChainParams {
    pub fn gaas() -> Self {
        SpinChainParams { n_spins: 3, j_coupling: 1e6, beta_coupling: 1e4, decay_base: 2.0 }
    }

    pub fn center(&self) -> usize {
        self.n_spins / 2
    }
}

/// Tensor factor order used for chain operators: bath sites in lattice order,
/// then the central spin.
fn factor_order(n: usize, center: usize) -> Vec<usize> {
    (0..n).filter(|&s| s != center).chain(std::iter::once(center)).collect()
}

fn pauli_string(n: usize, center: usize, sites: &[(usize, Axis)], bits: u32) -> Result<OperatorMatrix> {
    let mut out: Option<OperatorMatrix> = None;
    for site in factor_order(n, center) {
        let f = match sites.iter().find(|(s, _)| *s == site) {
            Some(&(_, a)) => OperatorMatrix::pauli(a, bits),
            None => OperatorMatrix::identity(2, bits),
        };
        out = Some(match out {
            None => f,
            Some(acc) => tensor(&acc, &f)?,
        });
    }
    Ok(out.expect("at least one site"))
}

/// Joint `H_e` on `2^n_spins` dims with the system factor last.
pub fn build_spin_chain(p: &SpinChainParams, bits: u32) -> Result<OperatorMatrix> {
    if p.n_spins < 3 || p.n_spins % 2 == 0 {
        return Err(Error::BadParams(format!("spin chain needs an odd length of at least 3, got {}", p.n_spins)));
    }
    if p.j_coupling < 0.0 || p.beta_coupling < 0.0 || !(p.decay_base > 0.0) {
        return Err(Error::BadParams("couplings must be nonnegative and the decay base positive".into()));
    }
    let n = p.n_spins;
    let c = p.center();
    let mut h = OperatorMatrix::zeros(1 << n, bits);
    for i in 0..n {
        for k in (i + 1)..n {
            let base = if i == c || k == c { p.j_coupling } else { p.beta_coupling };
            if base == 0.0 {
                continue;
            }
            let decay = Float::with_val(bits, p.decay_base.powi(-((k - i) as i32)));
            let coef = Float::with_val(bits, base) * decay;
            for a in Axis::ALL {
                let term = pauli_string(n, c, &[(i, a), (k, a)], bits)?;
                h = h.add(&term.scale(&coef))?;
            }
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    /// Kelvin; `f64::INFINITY` gives the maximally mixed state.
    pub temperature: f64,
    pub hbar_over_kb: f64,
}

impl ThermalParams {
    pub fn at(temperature: f64) -> Self {
        ThermalParams { temperature, hbar_over_kb: HBAR_OVER_KB }
    }
}

/// `exp(−ħH_B/k_BT) / Z`, normalized at working precision.
pub fn thermal_bath_state(h_b: &OperatorMatrix, t: &ThermalParams) -> Result<OperatorMatrix> {
    if !(t.temperature > 0.0) {
        return Err(Error::BadParams(format!("temperature must be positive, got {}", t.temperature)));
    }
    h_b.require_hermitian()?;
    let bits = h_b.precision_bits();
    let n = h_b.dim();
    if t.temperature.is_infinite() {
        return Ok(OperatorMatrix::identity(n, bits).scale(&Float::with_val(bits, n).recip()));
    }
    let kappa = Float::with_val(bits, t.hbar_over_kb) / Float::with_val(bits, t.temperature);
    let eig = crate::operator::eigh(h_b)?;
    let lmin = eig.min().clone();
    let weight = |l: &Float| -> Float {
        let x = Float::with_val(bits, l - &lmin) * &kappa;
        (-x).exp()
    };
    let z: Float = eig.values.iter().fold(Float::new(bits), |acc, l| acc + weight(l));
    Ok(eig.map(|l| Complex::from_real(weight(l) / &z)).hermitian_part())
}

/// Random Hermitian matrix with entries drawn uniformly from the unit box.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, bits: u32, rng: &mut R) -> OperatorMatrix {
    let mut m = OperatorMatrix::zeros(dim, bits);
    for i in 0..dim {
        for j in 0..dim {
            let v = Complex::from_f64(bits, rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            *m.entry_mut(i, j) = v;
        }
    }
    m.hermitian_part()
}

fn rescale(op: OperatorMatrix, target: f64, kind: NormKind) -> Result<OperatorMatrix> {
    let n = op_norm(&op, kind)?;
    if n.is_zero() {
        return Ok(op);
    }
    let bits = op.precision_bits();
    Ok(op.scale(&(Float::with_val(bits, target) / n)))
}

/// Random decomposition on a `bath_dim` bath with `‖B0‖ = beta` and
/// `max ‖B_α‖ = j` in the given norm. The three coupling norms are spread over
/// `[j/2, j]`.
pub fn random_decomposition<R: Rng + ?Sized>(
    bath_dim: usize,
    bits: u32,
    j: f64,
    beta: f64,
    kind: NormKind,
    rng: &mut R,
) -> Result<BathDecomposition> {
    let b0 = rescale(random_hermitian(bath_dim, bits, rng), beta, kind)?;
    let lead = rng.random_range(0..3usize);
    let mut c = Vec::with_capacity(3);
    for k in 0..3 {
        let frac = if k == lead { 1.0 } else { rng.random_range(0.5..1.0) };
        c.push(rescale(random_hermitian(bath_dim, bits, rng), j * frac, kind)?);
    }
    let bz = c.pop().expect("three");
    let by = c.pop().expect("three");
    let bx = c.pop().expect("three");
    BathDecomposition::new(b0, bx, by, bz)
}
