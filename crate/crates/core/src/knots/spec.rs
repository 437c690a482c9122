//! The knot expression grammar:
//! `torus(p,q) | pretzel(a1,...,ak) | montesinos(e; a1/b1, ...) | mirror(S) | sum(S, S, ...)`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::linalg::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum KnotSpec {
    Torus(i64, i64),
    Pretzel(Vec<i64>),
    /// Tangle fractions `(numerator, denominator)`.
    Montesinos(i64, Vec<(i64, i64)>),
    Mirror(Box<KnotSpec>),
    Sum(Vec<KnotSpec>),
}

impl KnotSpec {
    pub fn parse(text: &str) -> Result<KnotSpec> {
        let mut p = Parser { s: text.as_bytes(), pos: 0 };
        let spec = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(p.error("trailing input"));
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Structural checks that do not need a plumbing.
    pub fn validate(&self) -> Result<()> {
        match self {
            KnotSpec::Torus(p, q) => {
                if p.abs() < 2 || q.abs() < 2 {
                    return Err(Error::InvalidKnot(format!("torus({p},{q}) needs |p|,|q| >= 2")));
                }
                if p.gcd(q) != 1 {
                    return Err(Error::InvalidKnot(format!("torus({p},{q}) is a link")));
                }
            }
            KnotSpec::Pretzel(a) => {
                if a.len() < 2 || a.contains(&0) {
                    return Err(Error::InvalidKnot("pretzel needs at least two nonzero parameters".into()));
                }
            }
            KnotSpec::Montesinos(_, fr) => {
                if fr.is_empty() {
                    return Err(Error::InvalidKnot("montesinos needs at least one fraction".into()));
                }
                if fr.iter().any(|&(_, d)| d == 0) {
                    return Err(Error::InvalidKnot("zero denominator".into()));
                }
            }
            KnotSpec::Mirror(k) => k.validate()?,
            KnotSpec::Sum(ks) => {
                if ks.is_empty() {
                    return Err(Error::InvalidKnot("empty sum".into()));
                }
                for k in ks {
                    k.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Montesinos fractions as rationals.
    pub fn fractions(fr: &[(i64, i64)]) -> Vec<Rational> {
        fr.iter().map(|&(n, d)| Rational::new(n.into(), d.into())).collect()
    }
}

impl FromStr for KnotSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        KnotSpec::parse(s)
    }
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for KnotSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnotSpec::Torus(p, q) => write!(f, "torus({p},{q})"),
            KnotSpec::Pretzel(a) => write!(f, "pretzel({})", join(a)),
            KnotSpec::Montesinos(e, fr) => {
                let fr: Vec<String> = fr.iter().map(|(n, d)| format!("{n}/{d}")).collect();
                write!(f, "montesinos({e};{})", fr.join(","))
            }
            KnotSpec::Mirror(k) => write!(f, "mirror({k})"),
            KnotSpec::Sum(ks) => write!(f, "sum({})", join(ks)),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.s.get(self.pos) == Some(&c) {
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
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a constructor name"));
        }
        Ok(String::from_utf8_lossy(&self.s[start..self.pos]).to_ascii_lowercase())
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        self.skip_ws();
        let digits = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return Err(self.error("expected an integer"));
        }
        let text: String = String::from_utf8_lossy(&self.s[start..self.pos]).chars().filter(|c| !c.is_whitespace()).collect();
        text.parse().map_err(|_| self.error("integer out of range"))
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        let mut out = vec![item(self)?];
        while self.eat(b',') {
            out.push(item(self)?);
        }
        Ok(out)
    }

    fn fraction(&mut self) -> Result<(i64, i64)> {
        let n = self.int()?;
        let d = if self.eat(b'/') { self.int()? } else { 1 };
        Ok((n, d))
    }

    fn expr(&mut self) -> Result<KnotSpec> {
        let name = self.ident()?;
        self.expect(b'(')?;
        let spec = match name.as_str() {
            "torus" => {
                let p = self.int()?;
                self.expect(b',')?;
                KnotSpec::Torus(p, self.int()?)
            }
            "pretzel" => KnotSpec::Pretzel(self.list(Self::int)?),
            "montesinos" => {
                let e = self.int()?;
                self.expect(b';')?;
                KnotSpec::Montesinos(e, self.list(Self::fraction)?)
            }
            "mirror" => KnotSpec::Mirror(Box::new(self.expr()?)),
            "sum" => KnotSpec::Sum(self.list(Self::expr)?),
            other => return Err(Error::Parse(format!("unknown constructor '{other}'"))),
        };
        self.expect(b')')?;
        Ok(spec)
    }
}
