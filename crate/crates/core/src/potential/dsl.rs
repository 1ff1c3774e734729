//! Text form of potentials.
//!
//! ```text
//! P := zero | const:<a> | ball:<r>,<amp>[,<c1>,...,<cd>] | cyl3:<n>
//!    | dilate:<s>(P) | trunc:<r>(P) | scale:<c>(P) | neg(P) | sum(P;P;...)
//! ```
//!
//! Whitespace is ignored. Error positions are byte offsets into the input.

use super::{cylinder_potential, Potential};
use crate::error::{Error, Result};
use crate::point::SpacePoint;

/// Parses a potential on `R^dim`.
pub fn parse(src: &str, dim: usize) -> Result<Potential> {
    if dim == 0 {
        return Err(Error::Usage("dimension must be positive".into()));
    }
    let mut p = Parser { src: src.as_bytes(), pos: 0, dim };
    let v = p.potential()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("end of input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::Parse { position: self.pos, expected: expected.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("'{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("potential keyword"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            i += 1;
        }
        let mut digits = 0;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
            digits += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
                digits += 1;
            }
        }
        if digits == 0 {
            return Err(self.error("number"));
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            let exp_start = j;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if j == exp_start {
                self.pos = j;
                return Err(self.error("exponent digits"));
            }
            i = j;
        }
        let text = std::str::from_utf8(&bytes[start..i]).expect("ascii");
        self.pos = i;
        text.parse::<f64>().map_err(|_| Error::Parse { position: start, expected: "number".into() })
    }

    /// Wraps a constructor error with the position of the offending node.
    fn at<T>(&self, start: usize, r: Result<T>) -> Result<T> {
        r.map_err(|e| match e {
            Error::Parse { .. } => e,
            other => Error::Parse { position: start, expected: format!("valid arguments ({other})") },
        })
    }

    fn parenthesized(&mut self) -> Result<Potential> {
        self.expect(b'(')?;
        let v = self.potential()?;
        self.expect(b')')?;
        Ok(v)
    }

    fn potential(&mut self) -> Result<Potential> {
        self.skip_ws();
        let start = self.pos;
        let kw = self.ident()?;
        match kw.as_str() {
            "zero" => Ok(Potential::zero(self.dim)),
            "const" => {
                self.expect(b':')?;
                let a = self.number()?;
                self.at(start, Potential::constant(self.dim, a))
            }
            "ball" => {
                self.expect(b':')?;
                let r = self.number()?;
                self.expect(b',')?;
                let amp = self.number()?;
                let mut center = Vec::new();
                while self.eat(b',') {
                    center.push(self.number()?);
                }
                if center.is_empty() {
                    center = vec![0.0; self.dim];
                } else if center.len() != self.dim {
                    return Err(self.error(&format!("{} center coordinates", self.dim)));
                }
                let c = self.at(start, SpacePoint::new(center))?;
                self.at(start, Potential::ball(c, r, amp))
            }
            "cyl3" => {
                self.expect(b':')?;
                let n_pos = self.pos;
                let n = self.number()?;
                if self.dim != 3 {
                    return Err(Error::Parse { position: start, expected: "dimension 3 for cyl3".into() });
                }
                if n < 1.0 || n.fract() != 0.0 || n > u32::MAX as f64 {
                    return Err(Error::Parse { position: n_pos, expected: "positive integer".into() });
                }
                self.at(start, cylinder_potential(n as u32))
            }
            "dilate" | "trunc" | "scale" => {
                self.expect(b':')?;
                let a = self.number()?;
                let inner = self.parenthesized()?;
                let r = match kw.as_str() {
                    "dilate" => Potential::dilate(a, inner),
                    "trunc" => Potential::truncate(a, inner),
                    _ => Potential::scale(a, inner),
                };
                self.at(start, r)
            }
            "neg" => Ok(Potential::negate(self.parenthesized()?)),
            "sum" => {
                self.expect(b'(')?;
                let mut terms = vec![self.potential()?];
                while self.eat(b';') {
                    terms.push(self.potential()?);
                }
                self.expect(b')')?;
                self.at(start, Potential::sum(terms))
            }
            _ => Err(Error::Parse { position: start, expected: "potential keyword".into() }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        let v = parse(" sum( ball:1, 2 ; dilate:4(ball:1,1e0) ; neg(const:-0.5) ) ", 2).unwrap();
        assert_eq!(v.eval_slice(&[0.0, 0.0]), 2.0 + 4.0 + 0.5);
        assert_eq!(v.eval_slice(&[0.9, 0.0]), 2.0 + 0.5);
        let c = parse("ball:0.5,1,3,0,0", 3).unwrap();
        assert_eq!(c.eval_slice(&[3.2, 0.0, 0.0]), 1.0);
        assert_eq!(parse("cyl3:4", 3).unwrap().to_string(), "cyl3:4");
        assert_eq!(parse("scale:2(trunc:1(const:1))", 1).unwrap().eval_slice(&[0.5]), 2.0);
    }

    #[test]
    fn round_trip() {
        for s in ["zero", "const:3", "ball:1,2", "ball:1,2,1,1", "neg(dilate:0.25(ball:1,1))", "sum(zero;const:1)"] {
            let v = parse(s, 2).unwrap();
            assert_eq!(parse(&v.to_string(), 2).unwrap(), v);
        }
    }

    #[test]
    fn reports_position() {
        match parse("sum(ball:1,1;foo)", 1) {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 13),
            other => panic!("{other:?}"),
        }
        match parse("ball:1,1,2", 2) {
            Err(Error::Parse { expected, .. }) => assert!(expected.contains("2 center")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("ball:-1,1", 1), Err(Error::Parse { position: 0, .. })));
        assert!(matches!(parse("cyl3:2", 2), Err(Error::Parse { .. })));
        assert!(matches!(parse("const:1 x", 1), Err(Error::Parse { position: 8, .. })));
        assert!(matches!(parse("const:1e", 1), Err(Error::Parse { .. })));
    }
}
