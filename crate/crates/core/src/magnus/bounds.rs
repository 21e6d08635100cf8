//! Analytic error-phase bounds. Every suppressed O(1) constant is 1.

use crate::error::{Error, Result};
use crate::hamiltonian::CouplingStrengths;
use crate::operator::{op_norm, system_traceless_part, NormKind, OperatorMatrix, SystemPosition};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Pdd,
    Cdd,
    CddSlowBath,
    Tsds,
    Generalized,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Pdd => "PDD",
            Scheme::Cdd => "CDD",
            Scheme::CddSlowBath => "CDD_slow_bath",
            Scheme::Tsds => "TSDS",
            Scheme::Generalized => "generalized",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BathRegime {
    /// `J < β`
    FastBath,
    /// `β ≪ J`
    SlowBath,
}

impl BathRegime {
    /// Slow-bath regime when `β < J/10`.
    pub fn classify(c: &CouplingStrengths) -> Self {
        if c.beta < c.j / 10.0 {
            BathRegime::SlowBath
        } else {
            BathRegime::FastBath
        }
    }
}

/// Inputs that went into a bound. Unused entries stay at zero, the O(1)
/// constants `alpha`, `a`, `b` and `c` default to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    pub j: f64,
    pub beta: f64,
    pub g: f64,
    pub tau0: f64,
    pub delta: f64,
    pub t: f64,
    pub n: f64,
    pub n_f: u32,
    pub alpha: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl BoundParams {
    fn from_couplings(c: &CouplingStrengths) -> Self {
        BoundParams {
            j: c.j,
            beta: c.beta,
            g: c.g,
            tau0: 0.0,
            delta: 0.0,
            t: 0.0,
            n: 0.0,
            n_f: 0,
            alpha: 1.0,
            a: 1.0,
            b: 1.0,
            c: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPhaseEstimate {
    pub phi: f64,
    pub scheme: Scheme,
    pub params_used: BoundParams,
    /// Set when the bound's own validity condition fails.
    pub convergence_flag: bool,
}

impl ErrorPhaseEstimate {
    /// Error rate `Φ/T`.
    pub fn error_rate(&self) -> f64 {
        if self.params_used.t > 0.0 {
            self.phi / self.params_used.t
        } else {
            f64::NAN
        }
    }

    /// Flat `key=value` record, one pair per line, fixed key order.
    pub fn to_record(&self) -> String {
        let p = &self.params_used;
        let pairs: [(&str, String); 15] = [
            ("scheme", self.scheme.to_string()),
            ("phi", format!("{:e}", self.phi)),
            ("convergence_flag", self.convergence_flag.to_string()),
            ("j", format!("{:e}", p.j)),
            ("beta", format!("{:e}", p.beta)),
            ("g", format!("{:e}", p.g)),
            ("tau0", format!("{:e}", p.tau0)),
            ("delta", format!("{:e}", p.delta)),
            ("t", format!("{:e}", p.t)),
            ("n", format!("{:e}", p.n)),
            ("n_f", p.n_f.to_string()),
            ("alpha", format!("{:e}", p.alpha)),
            ("a", format!("{:e}", p.a)),
            ("b", format!("{:e}", p.b)),
            ("c", format!("{:e}", p.c)),
        ];
        pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{name} must be positive, got {v}")))
    }
}

/// `Φ = T · ‖H − B0⊗I‖`, spectral norm of the system-traceless part.
pub fn error_phase_from_hamiltonian(h_eff: &OperatorMatrix, t: f64) -> Result<f64> {
    error_phase_with(h_eff, t, NormKind::Spectral, SystemPosition::Last)
}

pub fn error_phase_with(h_eff: &OperatorMatrix, t: f64, kind: NormKind, pos: SystemPosition) -> Result<f64> {
    positive("t", t)?;
    let part = system_traceless_part(h_eff, 2, pos)?.hermitian_part();
    Ok(t * op_norm(&part, kind)?.to_f64())
}

/// Periodic decoupling: `Φ = T J (τ0 G + δ/τ0)`.
pub fn bound_pdd(c: &CouplingStrengths, tau0: f64, t: f64, delta: f64) -> Result<ErrorPhaseEstimate> {
    positive("tau0", tau0)?;
    positive("t", t)?;
    if !(delta >= 0.0) {
        return Err(Error::BadParams(format!("pulse width must be nonnegative, got {delta}")));
    }
    let mut p = BoundParams::from_couplings(c);
    p.tau0 = tau0;
    p.t = t;
    p.delta = delta;
    p.n = t / tau0;
    Ok(ErrorPhaseEstimate {
        phi: t * c.j * (tau0 * c.g + delta / tau0),
        scheme: Scheme::Pdd,
        params_used: p,
        convergence_flag: c.beta * t >= 1.0,
    })
}

/// Periodic decoupling in the `Φ = 2 (β τ0)(J T)` form.
pub fn bound_pdd_commutator(c: &CouplingStrengths, tau0: f64, t: f64) -> Result<ErrorPhaseEstimate> {
    let mut e = bound_pdd(c, tau0, t, 0.0)?;
    e.phi = 2.0 * c.beta * tau0 * c.j * t;
    Ok(e)
}

/// Concatenated decoupling at level `n_f`, `T = 4^{n_f} τ0`.
///
/// Fast bath: `Φ = (βT/√N)^{log4 N} · JT`.
/// Slow bath: `Φ = T · (max(β′, β) τ0)^{n_f} J⁴` with `β′ = τ0² J³`.
pub fn bound_cdd(c: &CouplingStrengths, tau0: f64, n_f: u32, regime: BathRegime) -> Result<ErrorPhaseEstimate> {
    positive("tau0", tau0)?;
    if n_f < 1 {
        return Err(Error::BadParams("CDD bound needs n_f >= 1".into()));
    }
    let n = 4f64.powi(n_f as i32);
    let t = n * tau0;
    let mut p = BoundParams::from_couplings(c);
    p.tau0 = tau0;
    p.t = t;
    p.n = n;
    p.n_f = n_f;
    let (phi, scheme) = match regime {
        BathRegime::FastBath => {
            let base = c.beta * t / n.sqrt();
            ((f64::from(n_f) * base.ln()).exp() * c.j * t, Scheme::Cdd)
        }
        BathRegime::SlowBath => {
            let beta_prime = tau0 * tau0 * c.j.powi(3);
            let h = (f64::from(n_f) * (beta_prime.max(c.beta) * tau0).ln()).exp() * c.j.powi(4);
            (t * h, Scheme::CddSlowBath)
        }
    };
    Ok(ErrorPhaseEstimate { phi, scheme, params_used: p, convergence_flag: c.beta * t >= 1.0 })
}

/// `Φ ≤ Φ0 (α N^{−a})^{log4 N} N^b` for a concatenated generic cycle.
pub fn bound_cdd_generalized(
    c: &CouplingStrengths,
    phi0: f64,
    n_pulses: f64,
    alpha: f64,
    a: f64,
    b: f64,
) -> Result<ErrorPhaseEstimate> {
    if !(phi0 >= 0.0) {
        return Err(Error::BadParams(format!("free error phase must be nonnegative, got {phi0}")));
    }
    positive("N", n_pulses)?;
    positive("alpha", alpha)?;
    let levels = n_pulses.ln() / 4f64.ln();
    let phi = phi0 * ((alpha.ln() - a * n_pulses.ln()) * levels + b * n_pulses.ln()).exp();
    let mut p = BoundParams::from_couplings(c);
    p.n = n_pulses;
    p.alpha = alpha;
    p.a = a;
    p.b = b;
    Ok(ErrorPhaseEstimate { phi, scheme: Scheme::Generalized, params_used: p, convergence_flag: alpha >= 1.0 })
}

/// Trotter-Suzuki decoupling: `Φ = (T G / N)^{√(log4 N)}`.
pub fn bound_tsds(c: &CouplingStrengths, t: f64, n_pulses: u64) -> Result<ErrorPhaseEstimate> {
    positive("t", t)?;
    if n_pulses < 4 {
        return Err(Error::BadParams(format!("TSDS bound needs at least 4 pulses, got {n_pulses}")));
    }
    let n = n_pulses as f64;
    let exponent = (n.ln() / 4f64.ln()).sqrt();
    let base = t * c.g / n;
    let mut p = BoundParams::from_couplings(c);
    p.t = t;
    p.n = n;
    p.tau0 = t / n;
    Ok(ErrorPhaseEstimate {
        phi: (exponent * base.ln()).exp(),
        scheme: Scheme::Tsds,
        params_used: p,
        convergence_flag: base >= 1.0,
    })
}

/// Upper bound on `Φ_CDD/Φ_PDD` at fixed `c = βT` once the level is pushed
/// to `n_f = −log4(βτ0/c)`: `(c βτ0)^{−½ log4(βτ0/c)} / (2βτ0)`.
pub fn cdd_pdd_ratio_bound(c_const: f64, beta_tau0: f64) -> Result<f64> {
    positive("c", c_const)?;
    positive("beta*tau0", beta_tau0)?;
    let exponent = -0.5 * (beta_tau0 / c_const).ln() / 4f64.ln();
    Ok((exponent * (c_const * beta_tau0).ln()).exp() / (2.0 * beta_tau0))
}

/// Asymptotic error phase `Φ(T, N)` per scheme in the regimes `J < β` and `β ≪ J`.
pub fn table1_phi(scheme: Scheme, regime: BathRegime, j: f64, beta: f64, t: f64, n: f64) -> Result<f64> {
    positive("T", t)?;
    positive("N", n)?;
    let log4n = n.ln() / 4f64.ln();
    let phi = match (scheme, regime) {
        (Scheme::Pdd, BathRegime::FastBath) => t * t * beta * j / n,
        (Scheme::Pdd, BathRegime::SlowBath) => t * t * j * j / n,
        (Scheme::Cdd, BathRegime::FastBath) => (log4n * (beta * t / n.sqrt()).ln()).exp() * j * t,
        (Scheme::Cdd | Scheme::CddSlowBath, BathRegime::SlowBath) => {
            let e = n.powf((2.5f64).ln() / 4f64.ln());
            n * (e * (j * t / n).ln()).exp()
        }
        (Scheme::Tsds, BathRegime::FastBath) => (log4n.sqrt() * (beta * t / n).ln()).exp(),
        (Scheme::Tsds, BathRegime::SlowBath) => (log4n.sqrt() * (j * t / n).ln()).exp(),
        _ => return Err(Error::Unsupported(format!("no table entry for {scheme} in {regime:?}"))),
    };
    Ok(phi)
}
