//! Text format for polynomial forms:
//!
//! ```text
//! # dim=4 deg=2
//! [1,2] : 2*x1*x3 - x2^2 + 1/3
//! [3,4] : -(x1 + x4)*x2
//! ```
//!
//! Indices are one-based. Repeated tuples are summed, permuted tuples pick
//! up the sign of the permutation. Lines starting with `#` after the header
//! are comments.

use std::fmt;

use nslab_core::poly::{int, MAX_VARS};
use nslab_core::{PolyForm, PolyScalar, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn parse_header(line: &str, lineno: usize) -> Result<(usize, usize), ParseError> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| err(lineno, 1, "expected header `# dim=N deg=K`"))?;
    let (mut dim, mut deg) = (None, None);
    for word in body.split_whitespace() {
        let col = line.find(word).map_or(1, |c| c + 1);
        let (key, value) = word
            .split_once('=')
            .ok_or_else(|| err(lineno, col, format!("expected key=value, found `{word}`")))?;
        let v: usize = value
            .parse()
            .map_err(|_| err(lineno, col + key.len() + 1, format!("`{value}` is not a non-negative integer")))?;
        match key {
            "dim" => dim = Some(v),
            "deg" => deg = Some(v),
            _ => return Err(err(lineno, col, format!("unknown header key `{key}`"))),
        }
    }
    match (dim, deg) {
        (Some(d), Some(k)) => {
            if !(1..=MAX_VARS).contains(&d) {
                return Err(err(lineno, 1, format!("dim must be between 1 and {MAX_VARS}")));
            }
            if k > d {
                return Err(err(lineno, 1, format!("deg {k} exceeds dim {d}")));
            }
            Ok((d, k))
        }
        _ => Err(err(lineno, 1, "header needs both dim and deg")),
    }
}

/// Parses a whole fixture file.
pub fn parse_form(text: &str) -> Result<PolyForm, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (dim, deg) = loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((n, l)) => break parse_header(l, n)?,
            None => return Err(err(1, 1, "empty fixture")),
        }
    };
    let mut comps = Vec::new();
    for (n, line) in lines {
        let t = line.trim_start();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let indent = line.len() - t.len();
        let (idx_part, poly_part) = t
            .split_once(':')
            .ok_or_else(|| err(n, indent + 1, "expected `[i,j,...] : polynomial`"))?;
        let idx = parse_indices(idx_part, dim, deg, n, indent)?;
        let offset = indent + idx_part.len() + 1;
        let p = parse_poly(poly_part, dim).map_err(|(col, msg)| err(n, offset + col, msg))?;
        comps.push((idx, p));
    }
    PolyForm::from_components(dim, deg, comps).map_err(|e| err(1, 1, e.to_string()))
}

fn parse_indices(s: &str, dim: usize, deg: usize, line: usize, indent: usize) -> Result<Vec<usize>, ParseError> {
    let t = s.trim();
    let lead = indent + (s.len() - s.trim_start().len()) + 1;
    let inner = t
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| err(line, lead, "index tuple must be written `[i,j,...]`"))?;
    let mut out = Vec::new();
    let mut col = lead + 1;
    if !inner.trim().is_empty() {
        for part in inner.split(',') {
            let v: usize = part
                .trim()
                .parse()
                .map_err(|_| err(line, col, format!("`{}` is not an index", part.trim())))?;
            if v == 0 || v > dim {
                return Err(err(line, col, format!("index {v} outside 1..={dim}")));
            }
            out.push(v - 1);
            col += part.len() + 1;
        }
    }
    if out.len() != deg {
        return Err(err(line, lead, format!("expected {deg} indices, found {}", out.len())));
    }
    Ok(out)
}

/// Parses a polynomial in `x1, ..., x{num_vars}`. Errors carry a one-based
/// column within `s`.
pub fn parse_poly(s: &str, num_vars: usize) -> Result<PolyScalar, (usize, String)> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        num_vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.fail(format!("unexpected `{}`", p.src[p.pos] as char)));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    num_vars: usize,
}

impl Parser<'_> {
    fn fail(&self, msg: impl Into<String>) -> (usize, String) {
        (self.pos + 1, msg.into())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PolyScalar, (usize, String)> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<PolyScalar, (usize, String)> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<PolyScalar, (usize, String)> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<PolyScalar, (usize, String)> {
        let base = self.primary()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.digits().ok_or_else(|| self.fail("expected an exponent"))?;
            let e: u32 = e.parse().map_err(|_| self.fail("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn digits(&mut self) -> Option<String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn primary(&mut self) -> Result<PolyScalar, (usize, String)> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.fail("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let d = self.digits().ok_or_else(|| self.fail("expected a variable index after `x`"))?;
                let i: usize = d.parse().unwrap_or(0);
                if i == 0 || i > self.num_vars {
                    self.pos = start - 1;
                    return Err(self.fail(format!("variable x{d} outside x1..x{}", self.num_vars)));
                }
                Ok(PolyScalar::var(self.num_vars, i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let c = self.number()?;
                Ok(PolyScalar::constant(self.num_vars, c))
            }
            Some(c) => Err(self.fail(format!("unexpected `{}`", c as char))),
            None => Err(self.fail("unexpected end of expression")),
        }
    }

    /// `123`, `1.25` or `3/4`, read exactly.
    fn number(&mut self) -> Result<Rational, (usize, String)> {
        let whole = self.digits().expect("caller saw a digit");
        let exact = |d: &str| d.parse::<Rational>().expect("digits");
        let mut q = exact(&whole);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            let frac = self.digits().ok_or_else(|| self.fail("expected digits after `.`"))?;
            q = exact(&format!("{whole}{frac}")) / exact(&format!("1{}", "0".repeat(frac.len())));
        }
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            let d = self.digits().ok_or_else(|| self.fail("expected a denominator"))?;
            let d = exact(&d);
            if d == int(0) {
                self.pos = start;
                return Err(self.fail("division by zero"));
            }
            q /= d;
        }
        Ok(q)
    }
}

/// Canonical text of a form; [`parse_form`] reads it back unchanged.
pub fn write_form(w: &PolyForm) -> String {
    w.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nslab_core::nearsym::build_model_form;
    use nslab_core::poly::{int, rat};

    #[test]
    fn round_trip_model() {
        for eps in [int(0), int(1), rat(1, 3)] {
            let w = build_model_form(&eps).unwrap();
            assert_eq!(parse_form(&write_form(&w)).unwrap(), w);
        }
    }

    #[test]
    fn arithmetic() {
        let p = parse_poly("(x1 + 1/2)^2 - 0.25 - x1", 2).unwrap();
        let x = PolyScalar::var(2, 0);
        assert_eq!(p, &x * &x);
        assert_eq!(parse_poly("-2*x2*-x1", 2).unwrap(), (&x * &PolyScalar::var(2, 1)).scale(&int(2)));
    }

    #[test]
    fn permuted_indices_pick_up_sign() {
        let a = parse_form("# dim=3 deg=2\n[2,1] : x3\n").unwrap();
        let b = parse_form("# dim=3 deg=2\n[1,2] : -x3\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_have_locations() {
        let e = parse_form("# dim=4 deg=2\n\n[1,2] : x1 + x5\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 14));
        let e = parse_form("# dim=4 deg=2\n[1,9] : x1\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        let e = parse_form("# dim=4 deg=2\n[1,2] x1\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_form("# dim=4\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_form("# dim=3 deg=1\n[1] : 1/0\n").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9));
    }
}
