//! Deterministic decoupling sequence generators.

use super::transform::Pauli;
use super::{Axis, Node, PulseSequence, Segment};
use crate::error::{Error, Result};
use std::sync::Arc;

fn check_time(name: &str, t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::BadParams(format!("{name} must be positive and finite, got {t}")))
    }
}

fn cycle_node(tau0: f64) -> Arc<Node> {
    let f = Node::leaf(Segment::free(tau0));
    let x = Node::leaf(Segment::pulse(Axis::X));
    let z = Node::leaf(Segment::pulse(Axis::Z));
    Node::concat(vec![f.clone(), x.clone(), f.clone(), z.clone(), f.clone(), x, f, z])
}

/// fXfZfXfZ with free periods of `tau0`.
pub fn gen_universal_cycle(tau0: f64) -> Result<PulseSequence> {
    check_time("tau0", tau0)?;
    Ok(PulseSequence::from_node("cycle", cycle_node(tau0)))
}

/// Periodic decoupling: the universal cycle repeated `cycles` times.
pub fn gen_pdd(tau0: f64, cycles: usize) -> Result<PulseSequence> {
    check_time("tau0", tau0)?;
    if cycles < 1 {
        return Err(Error::BadParams("PDD needs at least one cycle".into()));
    }
    let root = if cycles == 1 { cycle_node(tau0) } else { Node::repeat(cycle_node(tau0), cycles) };
    Ok(PulseSequence::from_node(format!("PDD[{cycles}]"), root))
}

/// Concatenated decoupling, p_n = p_{n-1} X p_{n-1} Z p_{n-1} X p_{n-1} Z with
/// p_0 a single free period. Emitted unsimplified.
pub fn gen_cdd(tau0: f64, level: u32) -> Result<PulseSequence> {
    check_time("tau0", tau0)?;
    let x = Node::leaf(Segment::pulse(Axis::X));
    let z = Node::leaf(Segment::pulse(Axis::Z));
    let mut p = Node::leaf(Segment::free(tau0));
    for _ in 0..level {
        p = Node::concat(vec![p.clone(), x.clone(), p.clone(), z.clone(), p.clone(), x.clone(), p, z.clone()]);
    }
    Ok(PulseSequence::from_node(format!("CDD{level}"), p))
}

/// XfXf repeated `reps` times.
pub fn gen_cpmg(tau: f64, reps: usize) -> Result<PulseSequence> {
    check_time("tau", tau)?;
    if reps < 1 {
        return Err(Error::BadParams("CPMG needs at least one repetition".into()));
    }
    let f = Node::leaf(Segment::free(tau));
    let x = Node::leaf(Segment::pulse(Axis::X));
    let cell = Node::concat(vec![x.clone(), f.clone(), x, f]);
    let root = if reps == 1 { cell } else { Node::repeat(cell, reps) };
    Ok(PulseSequence::from_node(format!("CPMG[{reps}]"), root))
}

/// Concatenated CPMG sequences, only the three levels with known layouts.
pub fn gen_concat_cpmg(tau: f64, level: u32) -> Result<PulseSequence> {
    check_time("tau", tau)?;
    let pattern = match level {
        1 => "XfXf",
        2 => "fXffXf",
        3 => "XfXffXfXfXffXf",
        _ => {
            return Err(Error::Unsupported(format!(
                "concatenated CPMG is only defined for levels 1 to 3, got {level}"
            )))
        }
    };
    let segments = pattern
        .chars()
        .map(|c| if c == 'f' { Segment::free(tau) } else { Segment::pulse(Axis::X) })
        .collect();
    Ok(PulseSequence::from_segments(format!("CCPMG{level}"), segments))
}

/// Toggling-frame layout of a Trotter-Suzuki sequence: the frame Pauli of each
/// free period and its length in units of `tau_min`.
///
/// Order 2 is the plain product over the four frames, order 3 the symmetric
/// product. Higher orders use Suzuki's fractal recursion, whose coefficients
/// are returned as-is, including negative ones.
pub fn tsds_coefficients(order: u32) -> Result<Vec<(Pauli, f64)>> {
    use Pauli::*;
    match order {
        0 | 1 => Err(Error::BadParams(format!("TSDS order must be at least 2, got {order}"))),
        2 => Ok(vec![(I, 1.0), (X, 1.0), (Y, 1.0), (Z, 1.0)]),
        3 => Ok(vec![(I, 0.5), (X, 0.5), (Y, 0.5), (Z, 1.0), (Y, 0.5), (X, 0.5), (I, 0.5)]),
        _ => {
            // Symmetric S_2k; orders 2k and 2k+1 share the same formula.
            let k = order / 2;
            let mut layout = tsds_coefficients(3)?;
            for j in 2..=k {
                let p = 1.0 / (4.0 - 4f64.powf(1.0 / (2.0 * j as f64 - 1.0)));
                let scaled = |c: f64| layout.iter().map(|&(f, x)| (f, x * c)).collect::<Vec<_>>();
                let outer = scaled(p);
                let inner = scaled(1.0 - 4.0 * p);
                let mut next = Vec::new();
                for part in [&outer, &outer, &inner, &outer, &outer] {
                    next.extend_from_slice(part);
                }
                layout = merge_frames(next);
            }
            Ok(layout)
        }
    }
}

fn merge_frames(layout: Vec<(Pauli, f64)>) -> Vec<(Pauli, f64)> {
    let mut out: Vec<(Pauli, f64)> = Vec::with_capacity(layout.len());
    for (f, c) in layout {
        match out.last_mut() {
            Some(last) if last.0 == f => last.1 += c,
            _ => out.push((f, c)),
        }
    }
    out
}

/// Trotter-Suzuki decoupling sequence with free periods `c_i * tau_min`.
pub fn gen_tsds(order: u32, tau_min: f64) -> Result<PulseSequence> {
    check_time("tau_min", tau_min)?;
    let layout = tsds_coefficients(order)?;
    if let Some(&(_, c)) = layout.iter().find(|(_, c)| *c < 0.0) {
        return Err(Error::NegativeInterval { order, coefficient: c });
    }
    let mut segments = Vec::new();
    let mut frame = Pauli::I;
    for (next, c) in layout {
        if let Some(axis) = frame.mul(next).axis() {
            segments.push(Segment::pulse(axis));
        }
        segments.push(Segment::free(c * tau_min));
        frame = next;
    }
    if let Some(axis) = frame.axis() {
        segments.push(Segment::pulse(axis));
    }
    Ok(PulseSequence::from_segments(format!("TSDS{order}"), segments))
}
