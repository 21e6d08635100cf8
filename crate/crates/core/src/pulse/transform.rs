//! Sequence rewrites: Pauli simplification and finite-width adjustment.
//!
//! Both passes work on the shared block tree and memoize per block, so they
//! cost time proportional to the number of distinct blocks rather than the
//! flattened length.

use super::{Axis, Node, NodeKind, PulseSequence, Segment};
use crate::error::{Error, Result};
use std::collections::HashMap;
use std::sync::Arc;

/// Single-qubit Pauli operator modulo global phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Z => (false, true),
            Pauli::Y => (true, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (false, true) => Pauli::Z,
            (true, true) => Pauli::Y,
        }
    }

    /// Product up to phase; commutative in this quotient.
    pub fn mul(self, other: Pauli) -> Pauli {
        let (a, b) = self.bits();
        let (c, d) = other.bits();
        Pauli::from_bits(a ^ c, b ^ d)
    }

    pub fn axis(self) -> Option<Axis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Axis::X),
            Pauli::Y => Some(Axis::Y),
            Pauli::Z => Some(Axis::Z),
        }
    }

    pub fn from_axis(axis: Axis) -> Self {
        match axis {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }
}

fn pulse_pauli(seg: &Segment) -> Result<Pauli> {
    match *seg {
        Segment::IdealPulse { axis, angle } => {
            let m = angle.pi_multiple();
            if m.fract() != 0.0 {
                return Err(Error::Unsupported(format!(
                    "pulse angle {}π is not a Pauli rotation",
                    m
                )));
            }
            if m.rem_euclid(2.0) == 0.0 {
                Ok(Pauli::I)
            } else {
                Ok(Pauli::from_axis(axis))
            }
        }
        Segment::RectPulse { .. } => {
            Err(Error::Unsupported("Pauli simplification of finite-width pulses".into()))
        }
        Segment::Free { .. } => Ok(Pauli::I),
    }
}

/// Net bare-pulse operator of an ideal sequence, free periods ignored.
pub fn ideal_net_pauli(seq: &PulseSequence) -> Result<Pauli> {
    let mut acc = Pauli::I;
    let mut err = None;
    seq.for_each_segment(|s| {
        if s.is_pulse() && err.is_none() {
            match pulse_pauli(s) {
                Ok(p) => acc = acc.mul(p),
                Err(e) => err = Some(e),
            }
        }
    });
    err.map_or(Ok(acc), Err)
}

#[derive(Clone)]
enum Simp {
    /// Block without free periods: just its net Pauli.
    Bare(Pauli),
    /// Block written as lead · core · trail where core starts and ends free.
    Framed { lead: Pauli, core: Arc<Node>, trail: Pauli },
}

fn join(a: Simp, b: Simp) -> Simp {
    match (a, b) {
        (Simp::Bare(p), Simp::Bare(q)) => Simp::Bare(p.mul(q)),
        (Simp::Bare(p), Simp::Framed { lead, core, trail }) => {
            Simp::Framed { lead: p.mul(lead), core, trail }
        }
        (Simp::Framed { lead, core, trail }, Simp::Bare(q)) => {
            Simp::Framed { lead, core, trail: trail.mul(q) }
        }
        (Simp::Framed { lead, core: c1, trail: t1 }, Simp::Framed { lead: l2, core: c2, trail }) => {
            let mut parts = vec![c1];
            if let Some(axis) = t1.mul(l2).axis() {
                parts.push(Node::leaf(Segment::pulse(axis)));
            }
            parts.push(c2);
            Simp::Framed { lead, core: Node::concat(parts), trail }
        }
    }
}

fn simplify_node(node: &Arc<Node>, memo: &mut HashMap<*const Node, Simp>) -> Result<Simp> {
    let key = Arc::as_ptr(node);
    if let Some(s) = memo.get(&key) {
        return Ok(s.clone());
    }
    let out = match &node.kind {
        NodeKind::Leaf(seg @ Segment::Free { .. }) => {
            Simp::Framed { lead: Pauli::I, core: Node::leaf(*seg), trail: Pauli::I }
        }
        NodeKind::Leaf(seg) => Simp::Bare(pulse_pauli(seg)?),
        NodeKind::Concat(children) => {
            let mut acc = Simp::Bare(Pauli::I);
            for c in children {
                acc = join(acc, simplify_node(c, memo)?);
            }
            acc
        }
        NodeKind::Repeat(body, n) => match simplify_node(body, memo)? {
            Simp::Bare(p) => Simp::Bare(if n % 2 == 0 { Pauli::I } else { p }),
            Simp::Framed { lead, core, trail } => {
                if *n == 0 {
                    Simp::Bare(Pauli::I)
                } else if *n == 1 {
                    Simp::Framed { lead, core, trail }
                } else {
                    // lead (core [trail·lead])^(n-1) core trail
                    let mut cell = vec![core.clone()];
                    if let Some(axis) = trail.mul(lead).axis() {
                        cell.push(Node::leaf(Segment::pulse(axis)));
                    }
                    let body = Node::repeat(Node::concat(cell), n - 1);
                    Simp::Framed { lead, core: Node::concat(vec![body, core]), trail }
                }
            }
        },
    };
    memo.insert(key, out.clone());
    Ok(out)
}

/// Merge every run of adjacent ideal pulses into a single Pauli pulse and drop
/// runs that reduce to the identity. The net pulse operator is preserved up to
/// a global phase.
pub fn simplify_pauli(seq: &PulseSequence) -> Result<PulseSequence> {
    let mut memo = HashMap::new();
    let root = match simplify_node(seq.root(), &mut memo)? {
        Simp::Bare(p) => Node::concat(p.axis().map(|a| Node::leaf(Segment::pulse(a))).into_iter().collect()),
        Simp::Framed { lead, core, trail } => {
            let mut parts = Vec::new();
            if let Some(a) = lead.axis() {
                parts.push(Node::leaf(Segment::pulse(a)));
            }
            parts.push(core);
            if let Some(a) = trail.axis() {
                parts.push(Node::leaf(Segment::pulse(a)));
            }
            Node::concat(parts)
        }
    };
    Ok(PulseSequence::from_node(format!("{}/simplified", seq.label()), root))
}

struct WidthPass {
    delta: f64,
    memo: HashMap<(*const Node, u64, u64), Arc<Node>>,
}

impl WidthPass {
    /// `after`: pulses that follow this block before the next free period.
    /// `before`: extra pulses charged to the first free period of the block.
    fn run(&mut self, node: &Arc<Node>, after: u64, before: u64) -> Result<Arc<Node>> {
        let (after, before) = if node.stats.frees == 0 { (0, 0) } else { (after, before) };
        let key = (Arc::as_ptr(node), after, before);
        if let Some(n) = self.memo.get(&key) {
            return Ok(n.clone());
        }
        let out = match &node.kind {
            NodeKind::Leaf(Segment::Free { duration }) => {
                let charge = (after + before) as f64 * self.delta;
                if after + before > 0 && charge >= *duration {
                    return Err(Error::WidthTooLarge { delta: charge, available: *duration });
                }
                Node::leaf(Segment::free(duration - charge))
            }
            NodeKind::Leaf(Segment::IdealPulse { axis, angle }) => {
                Node::leaf(Segment::RectPulse { axis: *axis, angle: *angle, width: self.delta })
            }
            NodeKind::Leaf(Segment::RectPulse { .. }) => {
                return Err(Error::Unsupported("sequence already contains finite-width pulses".into()))
            }
            NodeKind::Concat(children) => {
                let first_free = children.iter().position(|c| c.stats.frees > 0);
                let mut out = Vec::with_capacity(children.len());
                for (i, c) in children.iter().enumerate() {
                    let mut follow = 0;
                    let mut reached_free = false;
                    for d in &children[i + 1..] {
                        if d.stats.frees > 0 {
                            follow += d.stats.leading_pulses;
                            reached_free = true;
                            break;
                        }
                        follow += d.stats.pulses;
                    }
                    if !reached_free {
                        follow += after;
                    }
                    let lead = if Some(i) == first_free { before } else { 0 };
                    out.push(self.run(c, follow, lead)?);
                }
                Node::concat(out)
            }
            NodeKind::Repeat(body, n) => {
                if body.stats.frees == 0 || *n == 0 {
                    let b = self.run(body, 0, 0)?;
                    Node::repeat(b, *n)
                } else if *n == 1 {
                    let b = self.run(body, after, before)?;
                    Node::repeat(b, 1)
                } else {
                    let wrap = body.stats.leading_pulses;
                    let first = self.run(body, wrap, before)?;
                    let mid = self.run(body, wrap, 0)?;
                    let last = self.run(body, after, 0)?;
                    let mut parts = vec![first];
                    if *n > 2 {
                        parts.push(Node::repeat(mid, n - 2));
                    }
                    parts.push(last);
                    Node::concat(parts)
                }
            }
        };
        self.memo.insert(key, out.clone());
        Ok(out)
    }
}

/// Give every ideal pulse a finite width `delta` and shorten free periods so
/// the total duration is unchanged.
///
/// Each pulse takes its width from the nearest preceding free period; pulses
/// in front of the first free period take it from that period instead.
pub fn adjust_for_width(seq: &PulseSequence, delta: f64) -> Result<PulseSequence> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::BadParams(format!("pulse width must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(seq.clone());
    }
    let root = seq.root();
    if root.stats.frees == 0 && root.stats.pulses > 0 {
        return Err(Error::WidthTooLarge { delta, available: 0.0 });
    }
    let mut pass = WidthPass { delta, memo: HashMap::new() };
    let new_root = pass.run(root, 0, root.stats.leading_pulses)?;
    Ok(PulseSequence::from_node(format!("{}/w={:e}", seq.label(), delta), new_root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{gen_cdd, gen_pdd, gen_universal_cycle, Angle};

    fn parse_layout(s: &str) -> PulseSequence {
        let segs = s
            .chars()
            .map(|c| match c {
                'f' => Segment::free(1.0),
                'X' => Segment::pulse(Axis::X),
                'Y' => Segment::pulse(Axis::Y),
                'Z' => Segment::pulse(Axis::Z),
                'I' => Segment::IdealPulse { axis: Axis::X, angle: Angle::from_pi_multiple(0.0) },
                _ => unreachable!(),
            })
            .collect();
        PulseSequence::from_segments("t", segs)
    }

    fn layout(seq: &PulseSequence) -> String {
        seq.segments().iter().map(|s| s.axis().map_or('f', |a| a.symbol())).collect()
    }

    #[test]
    fn simplify_examples() {
        assert_eq!(layout(&simplify_pauli(&parse_layout("XX")).unwrap()), "");
        assert_eq!(layout(&simplify_pauli(&parse_layout("XY")).unwrap()), "Z");
        let group = parse_layout("IfIXfXYfYZfZ");
        assert_eq!(layout(&simplify_pauli(&group).unwrap()), "fXfZfXfZ");
    }

    #[test]
    fn simplify_cdd_two_matches_flat() {
        let cdd = gen_cdd(1.0, 2).unwrap();
        let flat = PulseSequence::from_segments("flat", cdd.segments());
        let a = layout(&simplify_pauli(&cdd).unwrap());
        let b = layout(&simplify_pauli(&flat).unwrap());
        assert_eq!(a, b);
        assert!(a.len() < layout(&cdd).len());
        assert!(!a.contains("XX") && !a.contains("ZX"));
    }

    #[test]
    fn simplify_rejects_rect() {
        let s = adjust_for_width(&gen_universal_cycle(1.0).unwrap(), 0.1).unwrap();
        assert!(matches!(simplify_pauli(&s), Err(Error::Unsupported(_))));
    }

    #[test]
    fn width_zero_is_identity() {
        let s = gen_universal_cycle(1.0).unwrap();
        assert_eq!(adjust_for_width(&s, 0.0).unwrap().segments(), s.segments());
    }

    #[test]
    fn width_preserves_duration_and_count() {
        let s = gen_universal_cycle(1.0).unwrap();
        let w = adjust_for_width(&s, 0.1).unwrap();
        assert!((w.total_duration() - 4.0).abs() < 1e-12);
        assert_eq!(w.pulse_count(), 4);
        assert!(!w.is_ideal());
        let frees: Vec<f64> = w
            .segments()
            .iter()
            .filter(|s| !s.is_pulse())
            .map(|s| s.duration())
            .collect();
        assert!(frees.iter().all(|d| (d - 0.9).abs() < 1e-12));
        assert!(matches!(adjust_for_width(&s, 1.0), Err(Error::WidthTooLarge { .. })));
    }

    #[test]
    fn width_on_trees_matches_flat() {
        for seq in [gen_cdd(1.0, 3).unwrap(), gen_pdd(1.0, 5).unwrap(), parse_layout("XZfXfYYfZ")] {
            let flat = PulseSequence::from_segments("flat", seq.segments());
            let a = adjust_for_width(&seq, 0.01).unwrap().segments();
            let b = adjust_for_width(&flat, 0.01).unwrap().segments();
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn leading_pulses_charge_first_free() {
        let s = adjust_for_width(&parse_layout("XZfXf"), 0.1).unwrap();
        let d: Vec<f64> = s.segments().iter().filter(|s| !s.is_pulse()).map(|s| s.duration()).collect();
        assert!((d[0] - 0.7).abs() < 1e-12);
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn net_pauli() {
        assert_eq!(ideal_net_pauli(&gen_cdd(1.0, 3).unwrap()).unwrap(), Pauli::I);
        assert_eq!(ideal_net_pauli(&parse_layout("XfY")).unwrap(), Pauli::Z);
    }
}
