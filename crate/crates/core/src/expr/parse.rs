//! Text format: a sum of signed monomials such as `2*x^2*y - 3*z + 1`.
//!
//! `*` is mandatory between factors, `^` is only allowed after a variable and
//! whitespace is insignificant.

use num_bigint::BigInt;

use super::{Monomial, Polynomial, Workspace};
use crate::error::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { offset: self.pos, message: message.into() })
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.error("expected integer");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("validated digits"))
    }

    fn identifier(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier")
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() == Some(b'-') {
            return Err(Error::NegativeExponent { offset: self.pos });
        }
        let at = self.pos;
        let e = self.integer()?;
        u32::try_from(e).map_err(|_| Error::Syntax { offset: at, message: "exponent too large".into() })
    }

    fn term(&mut self, ws: &Workspace) -> Result<(BigInt, Monomial)> {
        let mut coeff = BigInt::from(1);
        let mut factors = Vec::new();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    coeff *= self.integer()?;
                    if self.peek() == Some(b'^') {
                        return self.error("exponents are only allowed on variables");
                    }
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                    let name = self.identifier();
                    let v = ws.intern(name)?;
                    let e = if self.peek() == Some(b'^') {
                        self.pos += 1;
                        self.exponent()?
                    } else {
                        1
                    };
                    factors.push((v, e));
                }
                Some(c) => return self.error(format!("unexpected character `{}`", c as char)),
                None => return self.error("unexpected end of input"),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((coeff, Monomial::from_factors(factors)))
    }
}

/// Parses the text format into a canonical polynomial, interning variables
/// in `ws` in order of first appearance.
pub fn parse_polynomial(text: &str, ws: &Workspace) -> Result<Polynomial> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let mut poly = Polynomial::zero();
    let mut negative = match p.peek() {
        Some(b'-') => {
            p.pos += 1;
            true
        }
        Some(b'+') => {
            p.pos += 1;
            false
        }
        _ => false,
    };
    loop {
        let (coeff, mono) = p.term(ws)?;
        poly.add_term(if negative { -coeff } else { coeff }, mono);
        match p.peek() {
            None => break,
            Some(b'+') => negative = false,
            Some(b'-') => negative = true,
            Some(c) => return p.error(format!("unexpected character `{}`", c as char)),
        }
        p.pos += 1;
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Variable;

    #[test]
    fn parses_introduction_polynomial() {
        let ws = Workspace::new();
        let p = parse_polynomial("y-3*x+5*x*z+2*x^2*y*z-3*x^2*y^2*z+5*x^2*y^2*z^2", &ws).unwrap();
        assert_eq!(p.len(), 6);
        assert_eq!(ws.names(), ["y", "x", "z"]);
    }

    #[test]
    fn cancellation_and_merging() {
        let ws = Workspace::new();
        assert!(parse_polynomial("x - x", &ws).unwrap().is_zero());
        let p = parse_polynomial("2*x + 3*x", &ws).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.coefficient(&Monomial::var(Variable(0))), BigInt::from(5));
    }

    #[test]
    fn whitespace_and_repeated_factors() {
        let ws = Workspace::new();
        let a = parse_polynomial(" 2 * x ^ 2 * x * 3 ", &ws).unwrap();
        let b = parse_polynomial("6*x^3", &ws).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_polynomial("x^0 + 2", &ws).unwrap(), parse_polynomial("3", &ws).unwrap());
        assert!(parse_polynomial("0", &ws).unwrap().is_zero());
    }

    #[test]
    fn syntax_errors_carry_offsets() {
        let ws = Workspace::new();
        assert_eq!(parse_polynomial("x^-2", &ws), Err(Error::NegativeExponent { offset: 2 }));
        assert!(matches!(parse_polynomial("2x", &ws), Err(Error::Syntax { offset: 1, .. })));
        assert!(matches!(parse_polynomial("x + ", &ws), Err(Error::Syntax { offset: 4, .. })));
        assert!(matches!(parse_polynomial("", &ws), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_polynomial("(x+y)", &ws), Err(Error::Syntax { offset: 0, .. })));
        assert!(matches!(parse_polynomial("2^3", &ws), Err(Error::Syntax { .. })));
        assert!(matches!(parse_polynomial("x - -y", &ws), Err(Error::Syntax { offset: 4, .. })));
    }
}
