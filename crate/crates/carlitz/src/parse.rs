//! Text syntax for series values.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor (['*' | '/'] factor)*        juxtaposition multiplies
//! factor := atom ['^' exponent]
//! atom   := integer | 'x' | 'w' | '[' integer ']' | 'D_' n | 'L_' n
//!         | '(' expr ')' | 'O(' expr ')'
//! ```
//!
//! `w` is the generator of F_{p^m} over F_p, `[k]` is x^{q^k} - x, `D_n` and
//! `L_n` are the Carlitz factorials and `O(x^r)` marks the precision. Only
//! `x` takes fractional exponents, written `x^(a/b)` with b dividing a
//! power of q. Everything printed by `Series`'s `Display` parses back.

use std::sync::Arc;

use carlitz_core::carlitz::bracket;
use carlitz_core::{Context, Fe, Series};

use crate::error::{CliError, Result};

pub fn parse_series(ctx: &Arc<Context>, src: &str) -> Result<Series> {
    let mut p = Parser { ctx, chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    ctx: &'a Arc<Context>,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> CliError {
        let rest: String = self.chars[self.pos.min(self.chars.len())..].iter().collect();
        CliError::input(format!("series syntax: {msg} at {:?}", rest))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Series> {
        let neg = self.eat('-');
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                let den = self.factor()?;
                acc = acc.div(&den)?;
            } else if self.peek().is_some_and(starts_atom) {
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Series> {
        if self.peek() == Some('x') {
            self.pos += 1;
            if !self.eat('^') {
                return Ok(Series::x_pow(self.ctx, 1));
            }
            let (num, den) = self.exponent()?;
            return self.x_power(num, den);
        }
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let (num, den) = self.exponent()?;
        if den != 1 {
            return Err(self.err("fractional powers are only allowed on x"));
        }
        let pos = base.pow(num.unsigned_abs());
        Ok(if num < 0 { pos.inv()? } else { pos })
    }

    fn atom(&mut self) -> Result<Series> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(Series::constant(self.ctx, self.ctx.from_int(n)))
            }
            Some('w') => {
                self.pos += 1;
                if self.ctx.m() < 2 {
                    return Err(self.err("'w' needs a constant field of degree m >= 2"));
                }
                Ok(Series::constant(self.ctx, self.ctx.from_digits(&[0, 1])?))
            }
            Some('[') => {
                self.pos += 1;
                let neg = self.eat('-');
                let k = self.uint()?;
                self.expect(']')?;
                Ok(bracket(self.ctx, if neg { -k } else { k })?)
            }
            Some(c @ ('D' | 'L')) => {
                self.pos += 1;
                self.expect('_')?;
                let n = self.uint()?;
                Ok(factorial(self.ctx, c == 'D', n)?)
            }
            Some('O') => {
                self.pos += 1;
                self.expect('(')?;
                let inner = self.expr()?;
                self.expect(')')?;
                match inner.terms() {
                    [(e, c)] if *c == Fe::ONE && inner.is_exact() => {
                        Ok(Series::from_parts(self.ctx, inner.ram(), [], Some(*e)))
                    }
                    _ => Err(self.err("O(...) takes a single power of x")),
                }
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            _ => Err(self.err("expected a value")),
        }
    }

    fn uint(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected an integer"))
    }

    fn exponent(&mut self) -> Result<(i64, i64)> {
        if self.eat('(') {
            let neg = self.eat('-');
            let a = self.uint()?;
            let b = if self.eat('/') { self.uint()? } else { 1 };
            self.expect(')')?;
            if b == 0 {
                return Err(self.err("zero denominator"));
            }
            return Ok((if neg { -a } else { a }, b));
        }
        let neg = self.eat('-');
        let a = self.uint()?;
        Ok((if neg { -a } else { a }, 1))
    }

    fn x_power(&self, num: i64, den: i64) -> Result<Series> {
        let q = self.ctx.q() as i64;
        let mut e = 0u32;
        let mut scale = 1i64;
        while scale % den != 0 {
            if e >= self.ctx.params().ram_cap {
                return Err(CliError::input(format!(
                    "exponent {num}/{den} needs a denominator beyond q^{}",
                    self.ctx.params().ram_cap
                )));
            }
            scale *= q;
            e += 1;
        }
        Ok(Series::x_ramified(self.ctx, num * (scale / den), e))
    }
}

fn starts_atom(c: char) -> bool {
    c.is_ascii_digit() || matches!(c, 'x' | 'w' | '[' | '(' | 'D' | 'L' | 'O')
}

/// D_n = prod_{i<n} [n-i]^{q^i} or L_n = prod_{1<=i<=n} [i].
fn factorial(ctx: &Arc<Context>, divided: bool, n: i64) -> carlitz_core::Result<Series> {
    let mut acc = Series::one(ctx);
    for i in 1..=n {
        let b = bracket(ctx, i)?;
        acc = if divided { b.mul(&acc.frob()) } else { b.mul(&acc) };
    }
    Ok(acc)
}
