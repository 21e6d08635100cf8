//! Pulse-sequence intermediate representation.
//!
//! A [`PulseSequence`] is an ordered list of [`Segment`]s read left to right in
//! time. Internally the list is held as a tree of shared blocks so that
//! self-similar sequences (concatenated decoupling reaches 10^5 segments at
//! level 8) stay compact and can be evaluated block-by-block.

mod generators;
mod text;
mod transform;

use std::fmt;
use std::sync::Arc;

pub use generators::{
    gen_cdd, gen_concat_cpmg, gen_cpmg, gen_pdd, gen_tsds, gen_universal_cycle, tsds_coefficients,
};
pub use text::{parse_sequence, write_sequence};
pub use transform::{adjust_for_width, ideal_net_pauli, simplify_pauli, Pauli};

/// Single-qubit rotation axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn symbol(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Rotation angle stored as a multiple of π so that π pulses stay exact at
/// any working precision.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const PI: Angle = Angle(1.0);

    pub fn from_pi_multiple(m: f64) -> Self {
        Angle(m)
    }

    pub fn from_radians(rad: f64) -> Self {
        Angle(rad / std::f64::consts::PI)
    }

    pub fn pi_multiple(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 * std::f64::consts::PI
    }

    pub fn is_pi(self) -> bool {
        self.0 == 1.0
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::PI
    }
}

/// One element of a pulse sequence. Durations and widths are in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Free { duration: f64 },
    IdealPulse { axis: Axis, angle: Angle },
    RectPulse { axis: Axis, angle: Angle, width: f64 },
}

impl Segment {
    pub fn free(duration: f64) -> Self {
        Segment::Free { duration }
    }

    /// Ideal π pulse about `axis`.
    pub fn pulse(axis: Axis) -> Self {
        Segment::IdealPulse { axis, angle: Angle::PI }
    }

    pub fn is_pulse(&self) -> bool {
        !matches!(self, Segment::Free { .. })
    }

    /// Wall-clock time taken by the segment.
    pub fn duration(&self) -> f64 {
        match *self {
            Segment::Free { duration } => duration,
            Segment::IdealPulse { .. } => 0.0,
            Segment::RectPulse { width, .. } => width,
        }
    }

    pub fn axis(&self) -> Option<Axis> {
        match *self {
            Segment::Free { .. } => None,
            Segment::IdealPulse { axis, .. } | Segment::RectPulse { axis, .. } => Some(axis),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub duration: f64,
    pub segments: u64,
    pub pulses: u64,
    pub frees: u64,
    /// Pulses before the first free segment (all pulses when there is none).
    pub leading_pulses: u64,
    /// Pulses after the last free segment (all pulses when there is none).
    pub trailing_pulses: u64,
    pub has_rect: bool,
}

impl Stats {
    fn leaf(seg: &Segment) -> Self {
        let pulse = u64::from(seg.is_pulse());
        Stats {
            duration: seg.duration(),
            segments: 1,
            pulses: pulse,
            frees: 1 - pulse,
            leading_pulses: pulse,
            trailing_pulses: pulse,
            has_rect: matches!(seg, Segment::RectPulse { .. }),
        }
    }

    fn then(self, next: Stats) -> Stats {
        Stats {
            duration: self.duration + next.duration,
            segments: self.segments + next.segments,
            pulses: self.pulses + next.pulses,
            frees: self.frees + next.frees,
            leading_pulses: if self.frees == 0 {
                self.pulses + next.leading_pulses
            } else {
                self.leading_pulses
            },
            trailing_pulses: if next.frees == 0 {
                self.trailing_pulses + next.pulses
            } else {
                next.trailing_pulses
            },
            has_rect: self.has_rect || next.has_rect,
        }
    }

    fn repeated(self, n: usize) -> Stats {
        // Doubling keeps this O(log n) for long periodic sequences.
        let mut acc: Option<Stats> = None;
        let mut base = self;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(a) => a.then(base),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.then(base);
            }
        }
        acc.unwrap_or_default()
    }
}

#[derive(Debug)]
pub(crate) enum NodeKind {
    Leaf(Segment),
    Concat(Vec<Arc<Node>>),
    Repeat(Arc<Node>, usize),
}

#[derive(Debug)]
pub(crate) struct Node {
    pub kind: NodeKind,
    pub stats: Stats,
}

impl Node {
    pub fn leaf(seg: Segment) -> Arc<Node> {
        Arc::new(Node { stats: Stats::leaf(&seg), kind: NodeKind::Leaf(seg) })
    }

    pub fn concat(children: Vec<Arc<Node>>) -> Arc<Node> {
        let stats = children
            .iter()
            .fold(Stats::default(), |acc, c| if acc.segments == 0 { c.stats } else { acc.then(c.stats) });
        Arc::new(Node { kind: NodeKind::Concat(children), stats })
    }

    pub fn repeat(body: Arc<Node>, n: usize) -> Arc<Node> {
        let stats = body.stats.repeated(n);
        Arc::new(Node { kind: NodeKind::Repeat(body, n), stats })
    }

    fn for_each_segment<F: FnMut(&Segment)>(&self, f: &mut F) {
        match &self.kind {
            NodeKind::Leaf(s) => f(s),
            NodeKind::Concat(children) => children.iter().for_each(|c| c.for_each_segment(f)),
            NodeKind::Repeat(body, n) => (0..*n).for_each(|_| body.for_each_segment(f)),
        }
    }
}

/// An ordered list of segments with a descriptive label.
#[derive(Debug, Clone)]
pub struct PulseSequence {
    label: String,
    root: Arc<Node>,
}

impl PulseSequence {
    pub fn from_segments(label: impl Into<String>, segments: Vec<Segment>) -> Self {
        let root = Node::concat(segments.into_iter().map(Node::leaf).collect());
        PulseSequence { label: label.into(), root }
    }

    pub fn empty(label: impl Into<String>) -> Self {
        Self::from_segments(label, Vec::new())
    }

    pub(crate) fn from_node(label: impl Into<String>, root: Arc<Node>) -> Self {
        PulseSequence { label: label.into(), root }
    }

    pub(crate) fn root(&self) -> &Arc<Node> {
        &self.root
    }

    /// Sequential composition; `parts[0]` runs first.
    pub fn concat(label: impl Into<String>, parts: &[&PulseSequence]) -> Self {
        let children = parts.iter().map(|p| p.root.clone()).collect();
        PulseSequence { label: label.into(), root: Node::concat(children) }
    }

    /// The sequence repeated `n` times back to back.
    pub fn repeat(&self, n: usize) -> Self {
        PulseSequence {
            label: format!("{}^{}", self.label, n),
            root: Node::repeat(self.root.clone(), n),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Flattened segment list.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = Vec::with_capacity(self.root.stats.segments as usize);
        self.root.for_each_segment(&mut |s| out.push(*s));
        out
    }

    pub fn for_each_segment<F: FnMut(&Segment)>(&self, mut f: F) {
        self.root.for_each_segment(&mut f);
    }

    /// Σ free durations + Σ rectangular pulse widths.
    pub fn total_duration(&self) -> f64 {
        self.root.stats.duration
    }

    pub fn pulse_count(&self) -> u64 {
        self.root.stats.pulses
    }

    pub fn free_count(&self) -> u64 {
        self.root.stats.frees
    }

    pub fn segment_count(&self) -> u64 {
        self.root.stats.segments
    }

    pub fn is_empty(&self) -> bool {
        self.root.stats.segments == 0
    }

    /// True when no pulse has finite width.
    pub fn is_ideal(&self) -> bool {
        !self.root.stats.has_rect
    }
}
