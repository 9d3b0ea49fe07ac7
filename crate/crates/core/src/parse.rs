//! Text forms for complex values.
//!
//! Accepted literals all mean `a + b i`:
//!
//! | form      | example        |
//! |-----------|----------------|
//! | `a+bi`    | `1.5+2i`       |
//! | `a-bi`    | `1e-3-0.25i`   |
//! | `bi`      | `-i`, `3.5i`   |
//! | `a`       | `-0.75`        |
//! | `(a,b)`   | `(15, 26)`     |
//!
//! Non-finite components are rejected.

use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} as a complex number: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: &'static str,
}

impl ParseError {
    pub(crate) fn new(input: &str, reason: &'static str) -> Self {
        // Keep error payloads bounded for hostile inputs.
        let input = input.chars().take(64).collect();
        Self { input, reason }
    }
}

fn parse_component(text: &str, whole: &str) -> Result<f64, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(ParseError::new(whole, "empty component"));
    }
    // f64::from_str accepts "inf"/"nan"; only plain decimal forms are allowed here.
    if !text
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'+' | b'-' | b'.' | b'e' | b'E'))
    {
        return Err(ParseError::new(whole, "unexpected character"));
    }
    let value: f64 = text
        .parse()
        .map_err(|_| ParseError::new(whole, "malformed number"))?;
    if !value.is_finite() {
        return Err(ParseError::new(whole, "component is not finite"));
    }
    Ok(value)
}

/// Parses a complex literal. See the module docs for accepted forms.
pub fn parse_complex(input: &str) -> Result<Complex64, ParseError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseError::new(input, "empty input"));
    }

    if let Some(inner) = s.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| ParseError::new(input, "unterminated pair"))?;
        let (re, im) = inner
            .split_once(',')
            .ok_or_else(|| ParseError::new(input, "pair needs two components"))?;
        return Ok(Complex64::new(
            parse_component(re, input)?,
            parse_component(im, input)?,
        ));
    }

    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_component(s, input)?, 0.0));
    };

    // Split at the last sign that is not a leading sign and not an exponent sign.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));

    let (re_text, im_text) = match split {
        Some(k) => (Some(&body[..k]), &body[k..]),
        None => (None, body),
    };
    let im = match im_text.trim() {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => parse_component(t, input)?,
    };
    let re = match re_text {
        Some(t) => parse_component(t, input)?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

/// `a+bi` text form using the shortest representation that round-trips.
pub fn format_complex(z: Complex64) -> String {
    ComplexText(z).to_string()
}

/// Display adaptor producing the `a+bi` form accepted by [`parse_complex`].
#[derive(Debug, Clone, Copy)]
pub struct ComplexText(pub Complex64);

impl fmt::Display for ComplexText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Complex64 { re, im } = self.0;
        if im.is_sign_negative() {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

/// Seventeen significant digits, `.`-decimal, independent of locale.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}
