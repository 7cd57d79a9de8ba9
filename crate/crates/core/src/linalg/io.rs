//! Plain-text matrix fixtures: a line with the dimension, then one line per
//! row of space-separated `re+imj` tokens.

use std::fmt::Write as _;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Formats one entry with 17 significant digits in each part.
pub fn format_entry<T: Real>(z: C<T>) -> String {
    format!("{:.16e}{}{:.16e}j", z.re, if z.im.is_sign_negative() { "" } else { "+" }, z.im)
}

pub fn parse_entry<T: Real>(token: &str) -> std::result::Result<C<T>, String> {
    let body = token
        .strip_suffix('j')
        .or_else(|| token.strip_suffix('J'))
        .ok_or_else(|| format!("token `{token}` does not end in `j`"))?;
    // The separating sign is the last `+`/`-` that is not the leading sign
    // and does not belong to an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
        .ok_or_else(|| format!("token `{token}` has no imaginary part"))?;
    let (re, im) = body.split_at(split);
    let parse = |s: &str| s.parse::<T>().map_err(|_| format!("cannot parse `{s}` in `{token}`"));
    Ok(C::new(parse(re)?, parse(im)?))
}

pub fn to_text<T: Real>(m: &ComplexMatrix<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", m.dim());
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&z| format_entry(z)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn from_text<T: Real>(text: &str) -> Result<ComplexMatrix<T>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or(Error::Parse { line: 1, reason: "empty input".into() })?;
    let dim: usize = first
        .trim()
        .parse()
        .map_err(|_| Error::Parse { line: 1, reason: format!("bad dimension `{}`", first.trim()) })?;
    let mut data = Vec::with_capacity(dim * dim);
    for _ in 0..dim {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse { line: data.len() / dim.max(1) + 2, reason: "missing row".into() })?;
        let row: Vec<C<T>> = line
            .split_whitespace()
            .map(parse_entry)
            .collect::<std::result::Result<_, _>>()
            .map_err(|reason| Error::Parse { line: idx + 1, reason })?;
        if row.len() != dim {
            return Err(Error::Parse {
                line: idx + 1,
                reason: format!("expected {dim} entries, found {}", row.len()),
            });
        }
        data.extend(row);
    }
    if let Some((idx, _)) = lines.next() {
        return Err(Error::Parse { line: idx + 1, reason: "trailing content".into() });
    }
    ComplexMatrix::from_row_major(dim, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_exponents_and_signs() {
        let z: C<f64> = parse_entry("-1.5e-3-2.25E+2j").unwrap();
        assert_eq!(z, C::new(-1.5e-3, -225.0));
        let z: C<f64> = parse_entry("3+0j").unwrap();
        assert_eq!(z, C::new(3.0, 0.0));
        assert!(parse_entry::<f64>("3+4").is_err());
        assert!(parse_entry::<f64>("3j").is_err());
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = from_text::<f64>("2\n1+0j 0+0j\n0+0j\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    proptest! {
        #[test]
        fn text_round_trip_is_lossless(
            entries in proptest::collection::vec((-1e300f64..1e300, -1e-300f64..1e-300), 9)
        ) {
            let data: Vec<C<f64>> = entries.iter().map(|&(a, b)| C::new(a, b)).collect();
            let m = ComplexMatrix::from_row_major(3, data).unwrap();
            let back: ComplexMatrix<f64> = from_text(&to_text(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
