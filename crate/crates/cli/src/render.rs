//! Number rendering and the plain-text matrix file format.
//!
//! A matrix file has one row per line, entries written as `re+imj` and
//! separated by whitespace. Blank lines and lines starting with `#` are
//! ignored. Reals print as exact integers when within 1e-12 of one, otherwise
//! with 12 significant digits.

use std::fmt::Write as _;

use condswap::{Amplitude, StateVector, Unitary};
use num_complex::Complex64;

use crate::CliError;

const INTEGER_SNAP: f64 = 1e-12;
const SIGNIFICANT: i32 = 12;

pub fn real(x: f64) -> String {
    let rounded = x.round();
    if (x - rounded).abs() < INTEGER_SNAP {
        // avoid "-0"
        return format!("{}", rounded as i64);
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-5..SIGNIFICANT).contains(&exponent) {
        let decimals = (SIGNIFICANT - 1 - exponent) as usize;
        let s = format!("{x:.decimals$}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{x:.*e}", (SIGNIFICANT - 1) as usize)
    }
}

/// `re+imj` form used in matrix files.
pub fn complex_pair(z: Amplitude) -> String {
    let im = real(z.im);
    let sep = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sep}{im}j", real(z.re))
}

/// Compact form: plain real when the imaginary part snaps to zero.
pub fn complex(z: Amplitude) -> String {
    if z.im.abs() < INTEGER_SNAP {
        real(z.re)
    } else {
        complex_pair(z)
    }
}

pub fn ket(index: usize, n_qubits: usize) -> String {
    let bits: String = StateVector::bits_of_index(index, n_qubits)
        .iter()
        .map(|&b| char::from(b'0' + b))
        .collect();
    format!("|{bits}>")
}

/// Nonzero terms of a state, e.g. `|10>` or `0.707106781187|00> + -0.707106781187|11>`.
pub fn state(s: &StateVector) -> String {
    let mut out = String::new();
    for (i, a) in s.amplitudes().iter().enumerate() {
        if a.norm() < INTEGER_SNAP {
            continue;
        }
        if !out.is_empty() {
            out.push_str(" + ");
        }
        let coefficient = complex(*a);
        match coefficient.as_str() {
            "1" => {}
            c if c.contains('j') => write!(out, "({c})").unwrap(),
            c => out.push_str(c),
        }
        out.push_str(&ket(i, s.n_qubits()));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn matrix_rows(u: &Unitary) -> Vec<Vec<String>> {
    u.rows().map(|row| row.iter().map(|&z| complex_pair(z)).collect()).collect()
}

pub fn matrix_file(u: &Unitary) -> String {
    let mut out = String::new();
    for row in matrix_rows(u) {
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn parse_real(s: &str, token: &str) -> Result<f64, CliError> {
    let v: f64 = s
        .parse()
        .map_err(|_| CliError::Parse(format!("bad number `{s}` in entry `{token}`")))?;
    if !v.is_finite() {
        return Err(CliError::Parse(format!("non-finite entry `{token}`")));
    }
    Ok(v)
}

/// Parses `re+imj`, `re-imj`, `imj` or a bare real.
pub fn parse_complex(token: &str) -> Result<Amplitude, CliError> {
    let Some(body) = token.strip_suffix(['j', 'J']) else {
        return Ok(Complex64::new(parse_real(token, token)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    match split {
        Some(i) => {
            let im = match &body[i..] {
                "+" => 1.0,
                "-" => -1.0,
                s => parse_real(s, token)?,
            };
            Ok(Complex64::new(parse_real(&body[..i], token)?, im))
        }
        None => Ok(Complex64::new(0.0, parse_real(body, token)?)),
    }
}

/// Parses a matrix file into a validated unitary.
pub fn parse_matrix(text: &str) -> Result<Unitary, CliError> {
    let rows = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(parse_complex).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Unitary::from_rows(&rows).map_err(CliError::Matrix)
}
