//! Text grammar for polynomials:
//!
//! ```text
//! poly    := sign? term (('+'|'-') term)*
//! term    := coeff | coeff '*' factors | factors
//! factors := var ('^' uint)? ('*' var ('^' uint)?)*
//! var     := x1 | x2 | x3
//! ```
//!
//! Whitespace is ignored. A leading sign is accepted as a convenience; the
//! serializer never emits one.

use std::fmt;

use super::{MAX_EXP, MAX_VARS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// One parsed term before reduction into a coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawTerm {
    pub negative: bool,
    pub coeff: u128,
    pub exps: [u32; MAX_VARS],
}

struct Scanner {
    // (column index, char); columns count characters, not bytes.
    chars: Vec<(usize, char)>,
    pos: usize,
    line: usize,
    nvars: usize,
}

impl Scanner {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].1.is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn column(&self) -> usize {
        self.pos + 1
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.column(), message: message.into() }
    }

    fn uint(&mut self) -> Result<u128, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let mut v: u128 = 0;
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            let Some(d) = c.to_digit(10) else { break };
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as u128))
                .ok_or_else(|| self.err("integer literal too large"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an unsigned integer"));
        }
        Ok(v)
    }

    fn factor(&mut self, exps: &mut [u32; MAX_VARS]) -> Result<(), ParseError> {
        let col = self.column();
        if self.peek() != Some('x') {
            return Err(self.err("expected a variable x1, x2 or x3"));
        }
        self.pos += 1;
        let idx = match self.chars.get(self.pos).map(|c| c.1) {
            Some(c @ '1'..='3') => c as usize - '1' as usize,
            _ => return Err(self.err("expected variable index 1, 2 or 3 after 'x'")),
        };
        self.pos += 1;
        if idx >= self.nvars {
            return Err(ParseError {
                line: self.line,
                column: col,
                message: format!("variable x{} not available with {} variable(s)", idx + 1, self.nvars),
            });
        }
        let mut e: u128 = 1;
        if self.peek() == Some('^') {
            self.pos += 1;
            e = self.uint()?;
        }
        let total = exps[idx] as u128 + e;
        if total > MAX_EXP as u128 {
            return Err(self.err("exponent exceeds 2^16"));
        }
        exps[idx] = total as u32;
        Ok(())
    }

    fn term(&mut self, negative: bool) -> Result<RawTerm, ParseError> {
        let mut t = RawTerm { negative, coeff: 1, exps: [0; MAX_VARS] };
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                t.coeff = self.uint()?;
                if self.peek() != Some('*') {
                    return Ok(t);
                }
                self.pos += 1;
                self.factor(&mut t.exps)?;
            }
            Some('x') => self.factor(&mut t.exps)?,
            Some(_) => return Err(self.err("expected a coefficient or a variable")),
            None => return Err(self.err("unexpected end of input")),
        }
        while self.peek() == Some('*') {
            self.pos += 1;
            self.factor(&mut t.exps)?;
        }
        Ok(t)
    }
}

/// Parses `s` into raw terms. `line` is used only for error reporting.
pub fn parse_terms(s: &str, line: usize, nvars: usize) -> Result<Vec<RawTerm>, ParseError> {
    let mut sc = Scanner { chars: s.chars().enumerate().collect(), pos: 0, line, nvars };
    let mut negative = false;
    match sc.peek() {
        Some('-') => {
            negative = true;
            sc.pos += 1;
        }
        Some('+') => sc.pos += 1,
        None => return Err(sc.err("empty polynomial")),
        _ => {}
    }
    let mut out = vec![sc.term(negative)?];
    loop {
        match sc.peek() {
            None => break,
            Some('+') => {
                sc.pos += 1;
                out.push(sc.term(false)?);
            }
            Some('-') => {
                sc.pos += 1;
                out.push(sc.term(true)?);
            }
            Some(c) => return Err(sc.err(format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}
