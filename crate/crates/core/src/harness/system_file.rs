//! Plain-text polynomial system files.
//!
//! ```text
//! polysys 1
//! n 1
//! degrees 2
//! poly 1
//! 2 0 1.0 0.0
//! 0 2 -1.0 0.0
//! end
//! ```
//!
//! Each monomial line lists the `n + 1` exponents followed by the real and
//! imaginary parts of the coefficient. Omitted monomials are zero. Blank
//! lines and lines starting with `#` are ignored.

use crate::error::{Error, Result};
use crate::hpoly::{monomial_rank, HomogeneousPoly, PolySystem};
use crate::scalar::{czero, C};

pub const HEADER: &str = "polysys 1";

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Line iterator that skips blanks and comments and remembers line numbers.
struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        for (i, raw) in self.inner.by_ref() {
            self.last = i + 1;
            let line = raw.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Some((i + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next_line().ok_or_else(|| err(self.last + 1, format!("unexpected end of file, expected {what}")))
    }
}

fn keyword<'a>(line_no: usize, line: &'a str, key: &str) -> Result<Vec<&'a str>> {
    let mut parts = line.split_whitespace();
    match parts.next() {
        Some(k) if k == key => Ok(parts.collect()),
        _ => Err(err(line_no, format!("expected `{key}`"))),
    }
}

fn parse_usize(line_no: usize, s: &str, what: &str) -> Result<usize> {
    s.parse().map_err(|_| err(line_no, format!("invalid {what} `{s}`")))
}

fn parse_f64(line_no: usize, s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| err(line_no, format!("invalid number `{s}`")))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(err(line_no, format!("non-finite coefficient `{s}`")))
    }
}

/// Parses a system file into a double-precision system.
pub fn parse_system(text: &str) -> Result<PolySystem<f64>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (l, header) = lines.expect("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != HEADER.split_whitespace().collect::<Vec<_>>() {
        return Err(err(l, format!("expected header `{HEADER}`")));
    }
    let (l, line) = lines.expect("`n`")?;
    let args = keyword(l, line, "n")?;
    let [n] = args[..] else { return Err(err(l, "expected `n <count>`")) };
    let n = parse_usize(l, n, "equation count")?;
    if n == 0 {
        return Err(err(l, "a system needs at least one equation"));
    }
    let (l, line) = lines.expect("`degrees`")?;
    let degrees =
        keyword(l, line, "degrees")?.into_iter().map(|s| parse_usize(l, s, "degree")).collect::<Result<Vec<_>>>()?;
    if degrees.len() != n {
        return Err(err(l, format!("expected {n} degrees, found {}", degrees.len())));
    }
    if let Some(d) = degrees.iter().find(|&&d| d == 0) {
        return Err(err(l, format!("degree {d} is not allowed")));
    }
    let nv = n + 1;
    let mut polys = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        let (l, line) = lines.expect("`poly`")?;
        let args = keyword(l, line, "poly")?;
        let [idx] = args[..] else { return Err(err(l, "expected `poly <index>`")) };
        if parse_usize(l, idx, "polynomial index")? != i + 1 {
            return Err(err(l, format!("expected `poly {}`", i + 1)));
        }
        let mut coeffs = vec![czero::<f64>(); crate::hpoly::monomial_count(nv, d)];
        let mut seen = vec![false; coeffs.len()];
        let end_line = loop {
            let (l, line) = lines.expect("a monomial or `end`")?;
            if line == "end" {
                break l;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != nv + 2 {
                return Err(err(
                    l,
                    format!("expected {nv} exponents and 2 coefficient parts, found {} fields", fields.len()),
                ));
            }
            let exps = fields[..nv]
                .iter()
                .map(|s| s.parse::<u32>().map_err(|_| err(l, format!("invalid exponent `{s}`"))))
                .collect::<Result<Vec<u32>>>()?;
            let total: u64 = exps.iter().map(|&e| e as u64).sum();
            if total != d as u64 {
                return Err(err(l, format!("exponents sum to {total}, expected degree {d}")));
            }
            let c = C::new(parse_f64(l, fields[nv])?, parse_f64(l, fields[nv + 1])?);
            let rank = monomial_rank(&exps);
            if seen[rank] {
                return Err(err(l, "repeated monomial"));
            }
            seen[rank] = true;
            coeffs[rank] = c;
        };
        let p = HomogeneousPoly::new(nv, d, coeffs)?;
        if p.is_zero() {
            return Err(err(end_line, format!("polynomial {} is zero", i + 1)));
        }
        polys.push(p);
    }
    if let Some((l, _)) = lines.next_line() {
        return Err(err(l, "trailing content after the last polynomial"));
    }
    PolySystem::new(polys)
}

/// Serializes nonzero monomials in the canonical monomial order, with the
/// shortest decimal form that round-trips each coefficient.
pub fn serialize_system(f: &PolySystem<f64>) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    out.push_str(&format!("n {}\n", f.n()));
    let degrees: Vec<String> = f.degrees().iter().map(|d| d.to_string()).collect();
    out.push_str(&format!("degrees {}\n", degrees.join(" ")));
    for (i, p) in f.polys().iter().enumerate() {
        out.push_str(&format!("poly {}\n", i + 1));
        let basis = p.basis();
        for (exps, c) in basis.iter().zip(p.coeffs()) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            for e in exps {
                out.push_str(&format!("{e} "));
            }
            out.push_str(&format!("{:?} {:?}\n", c.re, c.im));
        }
        out.push_str("end\n");
    }
    out
}
