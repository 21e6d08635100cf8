//! Plain-text matrix dump: a `dim=<n> bits=<b>` header followed by one
//! `<re> <im>` line per entry in row-major order.

use super::OperatorMatrix;
use crate::error::{Error, Result};
use crate::scalar::{parse_decimal, to_decimal, Complex};

pub fn dump_matrix(m: &OperatorMatrix) -> String {
    let mut out = format!("dim={} bits={}\n", m.dim(), m.precision_bits());
    for c in m.entries() {
        out.push_str(&to_decimal(&c.re));
        out.push(' ');
        out.push_str(&to_decimal(&c.im));
        out.push('\n');
    }
    out
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn parse_matrix(text: &str) -> Result<OperatorMatrix> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "empty dump"))?;
    let mut dim = None;
    let mut bits = None;
    for tok in header.split_whitespace() {
        match tok.split_once('=') {
            Some(("dim", v)) => dim = v.parse::<usize>().ok(),
            Some(("bits", v)) => bits = v.parse::<u32>().ok(),
            _ => return Err(bad(1, format!("unexpected header token {tok:?}"))),
        }
    }
    let (Some(dim), Some(bits)) = (dim, bits) else {
        return Err(bad(1, "header must be `dim=<n> bits=<b>`"));
    };
    if dim == 0 || !(rug::float::prec_min()..=rug::float::prec_max()).contains(&bits) {
        return Err(bad(1, "dimension or precision out of range"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for (idx, line) in lines {
        let mut toks = line.split_whitespace();
        let (Some(re), Some(im), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(bad(idx + 1, "expected `<re> <im>`"));
        };
        let re = parse_decimal(bits, re).ok_or_else(|| bad(idx + 1, format!("bad number {re:?}")))?;
        let im = parse_decimal(bits, im).ok_or_else(|| bad(idx + 1, format!("bad number {im:?}")))?;
        data.push(Complex { re, im });
    }
    if data.len() != dim * dim {
        return Err(Error::DimMismatch(format!("{} entries for a {dim}x{dim} dump", data.len())));
    }
    OperatorMatrix::from_entries(dim, data)
}
