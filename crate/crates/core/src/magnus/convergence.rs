//! Validity conditions for the truncated Magnus expansion and for finite
//! pulse widths. Every O(1) constant is 1.

use super::renormalize::{ideal_level_bound, tau_at, TAUNB_CUTOFF};
use crate::error::{Error, Result};
use crate::hamiltonian::CouplingStrengths;

/// Each margin is the left-hand side of a condition of the form `margin < 1`
/// (or `< 2` for the Magnus radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceMargins {
    /// `max_n (β + 3 J^(n−1)) τ_n`, with `J^(n)` the ideal level bound capped at `J`.
    pub magnus_radius: f64,
    /// `τ_{n_f} β`
    pub taunb: f64,
    /// `τ0 β + δ/τ0`
    pub width: f64,
    /// `2(τ0−δ)β + (δ/τ0)(½ + 1/π)`
    pub appendix_b_x: f64,
    /// `(τ0−δ)β + (τ0−2δ)J + (δ/τ0)/π`
    pub appendix_b_y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub magnus_radius_ok: bool,
    pub taunb_ok: bool,
    /// `τ_{n_f} β` sits in the warning band `[0.1, 1)`.
    pub taunb_warning: bool,
    pub width_ok: bool,
    pub appendix_b_ok: bool,
    /// `√(δ/β)`, zero for ideal pulses.
    pub optimal_tau0: f64,
    pub margins: ConvergenceMargins,
}

impl ConvergenceReport {
    pub fn from_margins(m: ConvergenceMargins, optimal_tau0: f64) -> Self {
        ConvergenceReport {
            magnus_radius_ok: m.magnus_radius < 2.0,
            taunb_ok: m.taunb < 1.0,
            taunb_warning: m.taunb >= TAUNB_CUTOFF && m.taunb < 1.0,
            width_ok: m.width < 1.0,
            appendix_b_ok: m.appendix_b_x < 1.0 && m.appendix_b_y < 1.0,
            optimal_tau0,
            margins: m,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.magnus_radius_ok && self.taunb_ok && self.width_ok && self.appendix_b_ok
    }

    /// Flat `key=value` record, one pair per line, fixed key order.
    pub fn to_record(&self) -> String {
        let m = &self.margins;
        let pairs: [(&str, String); 11] = [
            ("magnus_radius_ok", self.magnus_radius_ok.to_string()),
            ("taunb_ok", self.taunb_ok.to_string()),
            ("taunb_warning", self.taunb_warning.to_string()),
            ("width_ok", self.width_ok.to_string()),
            ("appendix_b_ok", self.appendix_b_ok.to_string()),
            ("optimal_tau0", format!("{:e}", self.optimal_tau0)),
            ("margin_magnus_radius", format!("{:e}", m.magnus_radius)),
            ("margin_taunb", format!("{:e}", m.taunb)),
            ("margin_width", format!("{:e}", m.width)),
            ("margin_appendix_b_x", format!("{:e}", m.appendix_b_x)),
            ("margin_appendix_b_y", format!("{:e}", m.appendix_b_y)),
        ];
        pairs.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// `2(τ0−δ)β + (δ/τ0)(½ + a/π)`; `< 1` is needed for `‖B_X^(1)‖ < ‖B_X‖`.
pub fn appendix_b_x_margin(beta: f64, tau0: f64, delta: f64, a: f64) -> f64 {
    2.0 * (tau0 - delta) * beta + delta / tau0 * (0.5 + a * std::f64::consts::FRAC_1_PI)
}

/// `(τ0−δ)β + (τ0−2δ)(b/a)β_X + (δ/τ0)(b/a)/π`.
pub fn appendix_b_y_margin(beta: f64, beta_x: f64, tau0: f64, delta: f64, a: f64, b: f64) -> f64 {
    let r = b / a;
    (tau0 - delta) * beta + (tau0 - 2.0 * delta) * r * beta_x + delta / tau0 * r * std::f64::consts::FRAC_1_PI
}

/// Evaluate every condition for a level-`n_f` concatenation at base interval
/// `tau0` and pulse width `delta`. `t` is the experiment duration; the Magnus
/// radius is checked per level over `min(T, τ_{n_f})`.
pub fn convergence_check(c: &CouplingStrengths, tau0: f64, delta: f64, n_f: u32, t: f64) -> Result<ConvergenceReport> {
    for (name, v) in [("tau0", tau0), ("t", t)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::BadParams(format!("{name} must be positive, got {v}")));
        }
    }
    if !(delta >= 0.0) {
        return Err(Error::BadParams(format!("pulse width must be nonnegative, got {delta}")));
    }
    let top = tau_at(tau0, n_f as usize).min(t);
    let mut radius = 0.0f64;
    for n in 1..=n_f.max(1) {
        let tau_n = tau_at(tau0, n as usize).min(top);
        let j_prev = ideal_level_bound(c.j, c.beta, tau0, n - 1).min(c.j);
        radius = radius.max((c.beta + 3.0 * j_prev) * tau_n);
    }
    let margins = ConvergenceMargins {
        magnus_radius: radius,
        taunb: tau_at(tau0, n_f as usize) * c.beta,
        width: tau0 * c.beta + delta / tau0,
        appendix_b_x: appendix_b_x_margin(c.beta, tau0, delta, 1.0),
        appendix_b_y: appendix_b_y_margin(c.beta, c.j, tau0, delta, 1.0, 1.0),
    };
    let optimal = if c.beta > 0.0 { (delta / c.beta).sqrt() } else { f64::INFINITY };
    Ok(ConvergenceReport::from_margins(margins, optimal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaas_defaults_pass() {
        let c = CouplingStrengths::new(1e6, 1e4);
        let r = convergence_check(&c, 1e-5 / 65536.0, 0.0, 8, 1e-5).unwrap();
        assert!(r.taunb_ok && r.magnus_radius_ok && r.width_ok, "{r:?}");
        assert!(r.taunb_warning);
    }

    #[test]
    fn wide_pulses_fail_width() {
        let c = CouplingStrengths::new(1.0, 1.0);
        let r = convergence_check(&c, 1e-3, 2e-3, 1, 4e-3).unwrap();
        assert!(!r.width_ok);
        assert_eq!(r, ConvergenceReport::from_margins(r.margins, r.optimal_tau0));
    }
}
