//! Complex literals of the form `a`, `bi`, `a+bi`, `a-bi`, with caret
//! diagnostics pointing at the offending byte.

use num_complex::Complex64;
use std::fmt;

#[derive(Debug)]
pub struct ComplexParseError {
    pub input: String,
    pub pos: usize,
    pub message: String,
}

impl fmt::Display for ComplexParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid complex literal: {}", self.message)?;
        writeln!(f, "  {}", self.input)?;
        write!(f, "  {}^", " ".repeat(self.pos))
    }
}

fn scan_number(bytes: &[u8], mut pos: usize) -> usize {
    if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
        pos += 1;
    }
    let digits_start = pos;
    while pos < bytes.len() && (bytes[pos].is_ascii_digit() || bytes[pos] == b'.') {
        pos += 1;
    }
    if pos > digits_start && pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
        let mut look = pos + 1;
        if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
            look += 1;
        }
        if look < bytes.len() && bytes[look].is_ascii_digit() {
            pos = look;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
        }
    }
    pos
}

/// Parses `a+bi` (or plain `a`, or a rational `p/q`).
pub fn parse_complex(input: &str) -> Result<Complex64, ComplexParseError> {
    let s = input.trim();
    let err = |pos: usize, message: &str| ComplexParseError {
        input: s.to_owned(),
        pos,
        message: message.to_owned(),
    };
    let bytes = s.as_bytes();
    if bytes.is_empty() {
        return Err(err(0, "empty input"));
    }
    // Rational form p/q.
    if let Some(slash) = s.find('/') {
        let p: f64 = s[..slash]
            .parse()
            .map_err(|_| err(0, "expected an integer numerator"))?;
        let q: f64 = s[slash + 1..]
            .parse()
            .map_err(|_| err(slash + 1, "expected an integer denominator"))?;
        if q == 0.0 {
            return Err(err(slash + 1, "zero denominator"));
        }
        return Ok(Complex64::new(p / q, 0.0));
    }

    let first_end = scan_number(bytes, 0);
    if first_end == 0 || (first_end == 1 && (bytes[0] == b'+' || bytes[0] == b'-')) {
        return Err(err(0, "expected a number"));
    }
    // Pure imaginary `bi`.
    if first_end < bytes.len() && bytes[first_end] == b'i' && first_end + 1 == bytes.len() {
        let im: f64 = s[..first_end].parse().map_err(|_| err(0, "bad imaginary part"))?;
        return Ok(Complex64::new(0.0, im));
    }
    let re: f64 = s[..first_end].parse().map_err(|_| err(0, "bad real part"))?;
    if first_end == bytes.len() {
        return Ok(Complex64::new(re, 0.0));
    }
    if bytes[first_end] != b'+' && bytes[first_end] != b'-' {
        return Err(err(first_end, "expected `+`, `-`, or end of input"));
    }
    let second_end = scan_number(bytes, first_end);
    if second_end == first_end + 1 {
        return Err(err(first_end + 1, "expected the imaginary part"));
    }
    if second_end >= bytes.len() || bytes[second_end] != b'i' {
        return Err(err(second_end.min(bytes.len()), "expected `i` after the imaginary part"));
    }
    if second_end + 1 != bytes.len() {
        return Err(err(second_end + 1, "trailing input"));
    }
    let im: f64 = s[first_end..second_end].parse().map_err(|_| err(first_end, "bad imaginary part"))?;
    Ok(Complex64::new(re, im))
}
