//! Text syntax for ordinals.
//!
//! ```text
//! ordinal := term ('+' term)* | '0'
//! term    := 'w' ('^' '(' ordinal ')')? ('*' nat)? | nat
//! ```
//!
//! Sums need not be in normal form on input (`1+w` reads as ω). A product
//! syntax is layered on top for constants inside formulas and for
//! factorization output:
//!
//! ```text
//! product := factor ('*' factor)*
//! factor  := '(' ordinal ')' ('^' nat)? | ordinal
//! ```
//!
//! An ordinal inside a product is read greedily, so `w*2+1` is ω·2+1.

use num_bigint::BigUint;

use super::Ordinal;
pub use crate::syntax::ParseError;
use crate::syntax::Cursor;

pub fn parse_ordinal(src: &str) -> Result<Ordinal, ParseError> {
    let mut cur = Cursor::new(src);
    let o = ordinal(&mut cur)?;
    cur.finish()?;
    Ok(o)
}

pub fn parse_product(src: &str) -> Result<Ordinal, ParseError> {
    let mut cur = Cursor::new(src);
    let mut acc = parse_factor(&mut cur)?;
    while cur.eat('*') {
        acc = &acc * &parse_factor(&mut cur)?;
    }
    cur.finish()?;
    Ok(acc)
}

pub(crate) fn starts_ordinal(cur: &mut Cursor<'_>) -> bool {
    cur.peek().is_some_and(|c| c.is_ascii_digit() || c == '(') || cur.peek_ident() == Some("w")
}

/// One factor of a product expression, evaluated.
pub fn parse_factor(cur: &mut Cursor<'_>) -> Result<Ordinal, ParseError> {
    if cur.eat('(') {
        let inner = ordinal(cur)?;
        cur.expect(')')?;
        if cur.eat('^') {
            let n = cur
                .nat()
                .ok_or_else(|| cur.error("expected a natural exponent"))?;
            return Ok(inner.pow_finite(&n));
        }
        return Ok(inner);
    }
    ordinal(cur)
}

pub(crate) fn ordinal(cur: &mut Cursor<'_>) -> Result<Ordinal, ParseError> {
    let mut acc = term(cur)?;
    while cur.eat('+') {
        acc = &acc + &term(cur)?;
    }
    Ok(acc)
}

fn term(cur: &mut Cursor<'_>) -> Result<Ordinal, ParseError> {
    if let Some(n) = cur.nat() {
        return Ok(Ordinal::finite(n));
    }
    if cur.peek_ident() != Some("w") {
        return Err(cur.error("expected an ordinal term (`w` or a natural number)"));
    }
    cur.ident();
    let exponent = if cur.eat('^') {
        cur.expect('(')?;
        let e = ordinal(cur)?;
        cur.expect(')')?;
        e
    } else {
        Ordinal::one()
    };
    let coefficient = coefficient_suffix(cur).unwrap_or_else(|| BigUint::from(1u32));
    Ok(Ordinal::monomial(exponent, coefficient))
}

/// `'*' nat`, consumed only when a natural number actually follows.
fn coefficient_suffix(cur: &mut Cursor<'_>) -> Option<BigUint> {
    let save = cur.offset();
    if cur.eat('*') {
        if let Some(n) = cur.nat() {
            return Some(n);
        }
    }
    cur.reset(save);
    None
}
