//! Line-oriented text form of a pulse sequence.
//!
//! ```text
//! F <seconds>
//! P <axis> <angle_rad>
//! R <axis> <angle_rad> <width_seconds>
//! ```
//!
//! Blank lines and lines starting with `#` are ignored.

use super::{Angle, Axis, PulseSequence, Segment};
use crate::error::{Error, Result};
use std::fmt::Write;

pub fn write_sequence(seq: &PulseSequence) -> String {
    let mut out = String::new();
    seq.for_each_segment(|s| {
        let _ = match *s {
            Segment::Free { duration } => writeln!(out, "F {duration:e}"),
            Segment::IdealPulse { axis, angle } => writeln!(out, "P {axis} {}", angle.radians()),
            Segment::RectPulse { axis, angle, width } => {
                writeln!(out, "R {axis} {} {width:e}", angle.radians())
            }
        };
    });
    out
}

fn parse_axis(tok: &str, line: usize) -> Result<Axis> {
    match tok {
        "X" | "x" => Ok(Axis::X),
        "Y" | "y" => Ok(Axis::Y),
        "Z" | "z" => Ok(Axis::Z),
        _ => Err(Error::Parse { line, message: format!("unknown axis {tok:?}") }),
    }
}

fn parse_num(tok: &str, line: usize, what: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse { line, message: format!("bad {what} {tok:?}") })?;
    if !v.is_finite() {
        return Err(Error::Parse { line, message: format!("{what} must be finite") });
    }
    Ok(v)
}

fn nonneg(v: f64, line: usize, what: &str) -> Result<f64> {
    if v < 0.0 {
        Err(Error::Parse { line, message: format!("{what} must be nonnegative") })
    } else {
        Ok(v)
    }
}

pub fn parse_sequence(label: &str, text: &str) -> Result<PulseSequence> {
    let mut segments = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        let seg = match toks.as_slice() {
            ["F", d] => Segment::free(nonneg(parse_num(d, line, "duration")?, line, "duration")?),
            ["P", a, th] => Segment::IdealPulse {
                axis: parse_axis(a, line)?,
                angle: Angle::from_radians(parse_num(th, line, "angle")?),
            },
            ["R", a, th, w] => Segment::RectPulse {
                axis: parse_axis(a, line)?,
                angle: Angle::from_radians(parse_num(th, line, "angle")?),
                width: nonneg(parse_num(w, line, "width")?, line, "width")?,
            },
            _ => return Err(Error::Parse { line, message: format!("unrecognised segment {trimmed:?}") }),
        };
        segments.push(seg);
    }
    Ok(PulseSequence::from_segments(label, segments))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{adjust_for_width, gen_cdd};

    #[test]
    fn round_trip() {
        let s = adjust_for_width(&gen_cdd(1e-9, 2).unwrap(), 1e-11).unwrap();
        let text = write_sequence(&s);
        let back = parse_sequence("cdd2", &text).unwrap();
        assert_eq!(back.segments(), s.segments());
        assert!(back.segments().iter().filter_map(|s| match s {
            Segment::RectPulse { angle, .. } => Some(*angle),
            _ => None,
        }).all(|a| a.is_pi()));
    }

    #[test]
    fn comments_and_errors() {
        let s = parse_sequence("t", "# header\n\nF 1e-9\nP X 3.141592653589793\n").unwrap();
        assert_eq!(s.segment_count(), 2);
        let e = parse_sequence("t", "F 1\nQ X 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        assert!(parse_sequence("t", "F -1").is_err());
        assert!(parse_sequence("t", "P W 1").is_err());
    }
}
