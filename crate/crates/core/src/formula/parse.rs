//! Formula text syntax.
//!
//! ```text
//! formula  := 'EX' var+ '.' boolexpr
//! boolexpr := conj ('|' conj)*
//! conj     := primary ('&' primary)*
//! primary  := '(' boolexpr ')' | atom
//! atom     := term ('=' | '!=') term
//! term     := factor ('*' factor)*
//! factor   := var | constant | '1'
//! ```
//!
//! `&` binds tighter than `|`. Constants are read by a [`ConstantSyntax`].

use std::collections::BTreeSet;

use super::{Atom, Expr, Factor, Formula, FormulaError, Term, Var};
use crate::syntax::{is_ident_char, Cursor, ParseError};
use crate::trace::{Alphabet, NamedAlphabet, Symbol, Trace};

/// How constants of one monoid are written.
pub trait ConstantSyntax {
    type Const;

    /// Reads a constant at the cursor, or returns `Ok(None)` without
    /// consuming anything when none starts there.
    fn constant(&self, cur: &mut Cursor<'_>) -> Result<Option<Self::Const>, ParseError>;

    /// Names that may not be bound as variables.
    fn reserved(&self, _name: &str) -> bool {
        false
    }
}

/// Trace constants: declared letter names, or runs of one-character names.
#[derive(Debug, Clone, Copy)]
pub struct TraceSyntax<'a> {
    alphabet: &'a NamedAlphabet,
}

impl<'a> TraceSyntax<'a> {
    pub fn new(alphabet: &'a NamedAlphabet) -> Self {
        TraceSyntax { alphabet }
    }
}

impl ConstantSyntax for TraceSyntax<'_> {
    type Const = Trace<Symbol>;

    fn constant(&self, cur: &mut Cursor<'_>) -> Result<Option<Trace<Symbol>>, ParseError> {
        let Some(id) = cur.peek_ident() else {
            return Ok(None);
        };
        match self.alphabet.word(id) {
            Some(mut word) => {
                cur.ident();
                // adjacent letter groups separated by spaces form one constant
                loop {
                    let save = cur.offset();
                    match cur.ident().and_then(|next| self.alphabet.word(next)) {
                        Some(more) => word.extend(more),
                        None => {
                            cur.reset(save);
                            break;
                        }
                    }
                }
                Ok(Some(Trace::from_word_unchecked(word, self.alphabet.spec())))
            }
            None => Ok(None),
        }
    }

    fn reserved(&self, name: &str) -> bool {
        self.alphabet.letter(name).is_some()
    }
}

pub fn parse_formula<S: ConstantSyntax>(
    src: &str,
    syntax: &S,
) -> Result<Formula<S::Const>, ParseError> {
    let mut cur = Cursor::new(src);
    let f = parse_formula_at(&mut cur, syntax)?;
    cur.finish()?;
    Ok(f)
}

pub fn parse_formula_at<S: ConstantSyntax>(
    cur: &mut Cursor<'_>,
    syntax: &S,
) -> Result<Formula<S::Const>, ParseError> {
    if !cur.eat_keyword("EX") {
        return Err(cur.error("expected `EX`"));
    }
    let mut vars: Vec<Var> = Vec::new();
    loop {
        cur.skip_ws();
        let at = cur.offset();
        match cur.ident() {
            Some(v) => {
                if syntax.reserved(v) {
                    return Err(cur.error_at(at, format!("`{v}` is reserved and cannot be a variable")));
                }
                if vars.iter().any(|x| x == v) {
                    return Err(cur.error_at(at, format!("variable `{v}` is bound twice")));
                }
                vars.push(v.to_owned());
            }
            None => {
                if vars.is_empty() {
                    return Err(cur.error("expected a variable name"));
                }
                break;
            }
        }
    }
    cur.expect('.')?;
    let bound: BTreeSet<Var> = vars.iter().cloned().collect();
    let body = Parser { syntax, bound: &bound }.disjunction(cur)?;
    Formula::new(vars, body).map_err(|e: FormulaError| cur.error(e.to_string()))
}

struct Parser<'s, S> {
    syntax: &'s S,
    bound: &'s BTreeSet<Var>,
}

impl<S: ConstantSyntax> Parser<'_, S> {
    fn disjunction(&self, cur: &mut Cursor<'_>) -> Result<Expr<S::Const>, ParseError> {
        let mut parts = vec![self.conjunction(cur)?];
        while eat_op(cur, '|') {
            parts.push(self.conjunction(cur)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::Or(parts) })
    }

    fn conjunction(&self, cur: &mut Cursor<'_>) -> Result<Expr<S::Const>, ParseError> {
        let mut parts = vec![self.primary(cur)?];
        while eat_op(cur, '&') {
            parts.push(self.primary(cur)?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Expr::And(parts) })
    }

    fn primary(&self, cur: &mut Cursor<'_>) -> Result<Expr<S::Const>, ParseError> {
        cur.skip_ws();
        let save = cur.offset();
        let grouped = if cur.eat('(') {
            match self.disjunction(cur).and_then(|e| cur.expect(')').map(|_| e)) {
                Ok(e) => return Ok(e),
                Err(e) => {
                    cur.reset(save);
                    Some(e)
                }
            }
        } else {
            None
        };
        match self.atom(cur) {
            Ok(a) => Ok(Expr::Atom(a)),
            Err(e) => Err(match grouped {
                Some(g) if g.offset > e.offset => g,
                _ => e,
            }),
        }
    }

    fn atom(&self, cur: &mut Cursor<'_>) -> Result<Atom<S::Const>, ParseError> {
        let lhs = self.term(cur)?;
        cur.skip_ws();
        if cur.eat_str("!=") || cur.eat('≠') {
            Ok(Atom::Ne(lhs, self.term(cur)?))
        } else if cur.eat('=') {
            Ok(Atom::Eq(lhs, self.term(cur)?))
        } else {
            Err(cur.error("expected `=` or `!=`"))
        }
    }

    fn term(&self, cur: &mut Cursor<'_>) -> Result<Term<S::Const>, ParseError> {
        let mut factors = Vec::new();
        factors.extend(self.factor(cur)?);
        while cur.eat('*') {
            factors.extend(self.factor(cur)?);
        }
        Ok(Term(factors))
    }

    fn factor(&self, cur: &mut Cursor<'_>) -> Result<Option<Factor<S::Const>>, ParseError> {
        cur.skip_ws();
        let at = cur.offset();
        if let Some(id) = cur.peek_ident() {
            if self.bound.contains(id) {
                cur.ident();
                return Ok(Some(Factor::Var(id.to_owned())));
            }
        }
        if let Some(c) = self.syntax.constant(cur)? {
            return Ok(Some(Factor::Const(c)));
        }
        let rest = cur.rest();
        if rest.starts_with('1') && !rest[1..].starts_with(is_ident_char) {
            cur.bump();
            return Ok(None);
        }
        Err(match cur.peek_ident() {
            Some(id) => cur.error_at(at, format!("unbound variable or unknown constant `{id}`")),
            None => cur.error_at(at, "expected a variable, a constant or `1`"),
        })
    }
}

/// `&`/`|`, also accepting the doubled forms.
fn eat_op(cur: &mut Cursor<'_>, op: char) -> bool {
    if cur.eat(op) {
        cur.eat(op);
        true
    } else {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alphabet() -> NamedAlphabet {
        NamedAlphabet::with_classes(&[&["a", "b"], &["c"]], [(2, 2)]).unwrap()
    }

    fn parse(src: &str) -> Result<Formula<Trace<Symbol>>, ParseError> {
        let al = alphabet();
        parse_formula(src, &TraceSyntax::new(&al))
    }

    #[test]
    fn shapes() {
        let f = parse("EX x y . x*y = a b & (x != 1 | y != 1)").unwrap();
        assert_eq!(f.vars(), ["x", "y"]);
        match f.body() {
            Expr::And(parts) => {
                assert_eq!(parts.len(), 2);
                assert!(matches!(parts[1], Expr::Or(_)));
            }
            other => panic!("{other:?}"),
        }
        let f = parse("EX x . x = ab").unwrap();
        let [Factor::Const(u)] = f.body().atoms()[0].sides().1.factors() else {
            panic!()
        };
        assert_eq!(u.len(), 2);
        let f = parse("EX x . x*1 = 1").unwrap();
        let (l, r) = f.body().atoms()[0].sides();
        assert_eq!((l.factors().len(), r.factors().len()), (1, 0));
        assert_eq!(parse("EX x . x = y | x = a").unwrap_err().column, 12);
    }

    #[test]
    fn precedence() {
        let f = parse("EX x . x = a | x = b & x = 1").unwrap();
        match f.body() {
            Expr::Or(parts) => assert!(matches!(parts[1], Expr::And(_))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn errors() {
        let e = parse("EX x . x = ").unwrap_err();
        assert_eq!((e.line, e.column), (1, 11));
        let e = parse("EX x .\n x ? a").unwrap_err();
        assert_eq!((e.line, e.column), (2, 4));
        assert!(parse("EX a . a = 1").is_err());
        assert!(parse("EX x x . x = 1").is_err());
        assert!(parse("x = 1").is_err());
        assert!(parse("EX x . (x = a").is_err());
    }
}
