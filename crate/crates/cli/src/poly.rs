//! Polynomials in y parsed from strings such as `3y^2 - 2*(y+1) + 7`.

use std::iter::Peekable;
use std::str::Chars;

use crate::error::CliError;

/// Coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    fn constant(c: f64) -> Self {
        Polynomial(vec![c])
    }

    fn y() -> Self {
        Polynomial(vec![0.0, 1.0])
    }

    fn add(&self, o: &Polynomial, sign: f64) -> Polynomial {
        let n = self.0.len().max(o.0.len());
        let get = |p: &Polynomial, i: usize| p.0.get(i).copied().unwrap_or(0.0);
        Polynomial((0..n).map(|i| get(self, i) + sign * get(o, i)).collect())
    }

    fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (k, b) in o.0.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Polynomial(out)
    }

    fn pow(&self, n: u32) -> Polynomial {
        (0..n).fold(Polynomial::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Drops trailing zero coefficients.
    fn trimmed(mut self) -> Polynomial {
        while self.0.len() > 1 && self.0.last() == Some(&0.0) {
            self.0.pop();
        }
        self
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.0
    }

    pub fn second_derivative(&self, y: f64) -> f64 {
        self.0.iter().enumerate().skip(2).map(|(k, c)| (k * (k - 1)) as f64 * c * y.powi(k as i32 - 2)).sum()
    }
}

struct Parser<'a> {
    chars: Peekable<Chars<'a>>,
    source: &'a str,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> CliError {
        CliError::Config(format!("cannot parse g = \"{}\": {msg}", self.source))
    }

    fn skip_ws(&mut self) {
        while self.chars.peek().is_some_and(|c| c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.peek().copied()
    }

    fn expr(&mut self) -> Result<Polynomial, CliError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.chars.next();
                    acc = acc.add(&self.term()?, 1.0);
                }
                Some('-' | '−') => {
                    self.chars.next();
                    acc = acc.add(&self.term()?, -1.0);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, CliError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some('*' | '·') => {
                    self.chars.next();
                    acc = acc.mul(&self.factor()?);
                }
                // Juxtaposition: 3y, 2(y+1), y y.
                Some(c) if c == 'y' || c == '(' || c.is_ascii_digit() || c == '.' => {
                    acc = acc.mul(&self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Polynomial, CliError> {
        match self.peek() {
            Some('-' | '−') => {
                self.chars.next();
                Ok(self.factor()?.mul(&Polynomial::constant(-1.0)))
            }
            Some('+') => {
                self.chars.next();
                self.factor()
            }
            _ => {
                let base = self.atom()?;
                if self.peek() == Some('^') {
                    self.chars.next();
                    self.skip_ws();
                    let mut digits = String::new();
                    while let Some(c) = self.chars.peek().copied().filter(char::is_ascii_digit) {
                        digits.push(c);
                        self.chars.next();
                    }
                    let n: u32 = digits.parse().map_err(|_| self.error("exponent must be a non-negative integer"))?;
                    if n > 32 {
                        return Err(self.error("exponent too large"));
                    }
                    Ok(base.pow(n))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn atom(&mut self) -> Result<Polynomial, CliError> {
        match self.peek() {
            Some('y') => {
                self.chars.next();
                Ok(Polynomial::y())
            }
            Some('(') => {
                self.chars.next();
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("missing ')'"));
                }
                self.chars.next();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let mut text = String::new();
                while let Some(c) = self.chars.peek().copied() {
                    let exp_sign = matches!(c, '+' | '-') && text.ends_with(['e', 'E']);
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                        text.push(c);
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let v: f64 = text.parse().map_err(|_| self.error(&format!("bad number '{text}'")))?;
                Ok(Polynomial::constant(v))
            }
            Some(c) => Err(self.error(&format!("unexpected '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn parse_polynomial(source: &str) -> Result<Polynomial, CliError> {
    let mut p = Parser { chars: source.chars().peekable(), source };
    let out = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(p.error(&format!("unexpected '{c}'")));
    }
    Ok(out.trimmed())
}
