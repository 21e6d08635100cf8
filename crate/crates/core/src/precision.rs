//! Working-precision selection and escalation.

use crate::error::{Error, Result};

/// Default precision for analysis work.
pub const DEFAULT_BITS: u32 = 128;
/// Hard ceiling for adaptive escalation.
pub const MAX_BITS: u32 = 2048;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrecisionPolicy {
    Fixed(u32),
    /// Pick bits so that rounding sits at least 10^6 below the smallest value
    /// the run is expected to resolve.
    Adaptive { target: f64 },
}

impl Default for PrecisionPolicy {
    fn default() -> Self {
        PrecisionPolicy::Fixed(DEFAULT_BITS)
    }
}

impl PrecisionPolicy {
    /// Initial working precision: a multiple of 64, at least 128 bits.
    pub fn initial_bits(&self) -> u32 {
        match *self {
            PrecisionPolicy::Fixed(b) => b,
            PrecisionPolicy::Adaptive { target } => bits_for_target(target),
        }
    }
}

pub fn bits_for_target(target: f64) -> u32 {
    if !(target > 0.0) || !target.is_finite() {
        return DEFAULT_BITS;
    }
    let needed = (-(target / 1e6).log2()).ceil().max(0.0) as u32;
    let rounded = needed.div_ceil(64) * 64;
    rounded.clamp(DEFAULT_BITS, MAX_BITS)
}

/// Magnitude below which a result computed at `bits` on a `dim`-dimensional
/// space is indistinguishable from accumulated rounding.
pub fn rounding_floor(dim: usize, bits: u32) -> f64 {
    dim as f64 * 2f64.powi(16 - bits as i32)
}

/// `observable < 100 · rounding_floor(dim, bits)`, evaluated in log space so
/// it stays meaningful past the f64 exponent range.
pub fn near_rounding_floor(observable: f64, dim: usize, bits: u32) -> bool {
    if !(observable > 0.0) {
        return true;
    }
    observable.log2() < (100.0 * dim as f64).log2() + 16.0 - f64::from(bits)
}

/// Run `job` at the policy's precision. Under an adaptive policy the job is
/// repeated at doubled precision while its observable lies within 100x of the
/// rounding floor.
pub fn run_with_escalation<T, F>(policy: PrecisionPolicy, dim: usize, mut job: F) -> Result<(T, u32)>
where
    F: FnMut(u32) -> Result<(T, f64)>,
{
    let mut bits = policy.initial_bits();
    loop {
        let (out, observable) = job(bits)?;
        let PrecisionPolicy::Adaptive { target } = policy else {
            return Ok((out, bits));
        };
        if !(target > 0.0) || !near_rounding_floor(observable, dim, bits) {
            return Ok((out, bits));
        }
        if bits >= MAX_BITS {
            return Err(Error::PrecisionEscalationFailed {
                bits,
                reason: format!("observable {observable:e} still within 100x of the rounding floor"),
            });
        }
        bits = (bits * 2).min(MAX_BITS);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_bits() {
        assert_eq!(bits_for_target(1e-12), 128);
        let b = bits_for_target(1e-100);
        assert_eq!(b % 64, 0);
        assert!(2f64.powi(-(b as i32)) <= 1e-106);
        assert!(b >= 384);
        assert_eq!(bits_for_target(0.0), DEFAULT_BITS);
    }

    #[test]
    fn escalation_doubles_until_resolved() {
        let mut seen = Vec::new();
        let (_, bits) = run_with_escalation(PrecisionPolicy::Adaptive { target: 1e-20 }, 4, |b| {
            seen.push(b);
            let v = if b < 512 { 1e-300 } else { 1e-60 };
            Ok(((), v))
        })
        .unwrap();
        assert_eq!(bits, 512);
        assert_eq!(seen, vec![128, 256, 512]);
    }

    #[test]
    fn escalation_gives_up() {
        let r = run_with_escalation(PrecisionPolicy::Adaptive { target: 1e-20 }, 4, |_| Ok(((), 0.0)));
        assert!(matches!(r, Err(Error::PrecisionEscalationFailed { .. })));
    }

    #[test]
    fn fixed_runs_once() {
        let mut n = 0;
        run_with_escalation(PrecisionPolicy::Fixed(192), 2, |b| {
            n += 1;
            assert_eq!(b, 192);
            Ok(((), 0.0))
        })
        .unwrap();
        assert_eq!(n, 1);
    }
}
