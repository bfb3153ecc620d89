//! Existential formulas over a monoid with constants, and their flattened
//! form.
//!
//! A [`Formula`] is `∃ x₁ … xₙ . φ` where `φ` is an and/or combination of
//! atoms `t = t'` and `t ≠ t'` between products of variables and constants.
//! [`to_dnf`] distributes it into disjuncts, and [`flatten`] turns each
//! disjunct into [`SimpleSystem`]s whose atoms are only `x = u`, `x·y = z`,
//! `x ≠ 1` and `x ≠ y`.

mod flatten;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::trace::{AlphabetSpec, Letter, Trace};

pub use flatten::flatten;
pub use parse::{parse_formula, parse_formula_at, ConstantSyntax, TraceSyntax};

pub type Var = String;

/// Prefix reserved for variables introduced by the library.
pub const FRESH_PREFIX: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("variable `{0}` is not bound by the quantifier prefix")]
    Unbound(Var),
    #[error("variable `{0}` is bound twice")]
    Duplicate(Var),
    #[error("variable name `{0}` is reserved")]
    Reserved(Var),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Factor<C> {
    Var(Var),
    Const(C),
}

/// A product of factors; the empty product is the unit `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term<C>(pub Vec<Factor<C>>);

impl<C> Term<C> {
    pub fn unit() -> Self {
        Term(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        Term(vec![Factor::Var(name.to_owned())])
    }

    pub fn constant(c: C) -> Self {
        Term(vec![Factor::Const(c)])
    }

    pub fn factors(&self) -> &[Factor<C>] {
        &self.0
    }

    pub fn vars(&self) -> impl Iterator<Item = &Var> {
        self.0.iter().filter_map(|f| match f {
            Factor::Var(v) => Some(v),
            Factor::Const(_) => None,
        })
    }

    /// Multiplies the factors out.
    pub fn evaluate<T>(
        &self,
        unit: T,
        mut lookup: impl FnMut(&Factor<C>) -> T,
        mut mul: impl FnMut(&T, &T) -> T,
    ) -> T {
        self.0.iter().fold(unit, |acc, f| mul(&acc, &lookup(f)))
    }
}

impl<C> std::ops::Mul for Term<C> {
    type Output = Term<C>;
    fn mul(mut self, rhs: Term<C>) -> Term<C> {
        self.0.extend(rhs.0);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom<C> {
    Eq(Term<C>, Term<C>),
    Ne(Term<C>, Term<C>),
}

impl<C> Atom<C> {
    pub fn sides(&self) -> (&Term<C>, &Term<C>) {
        match self {
            Atom::Eq(l, r) | Atom::Ne(l, r) => (l, r),
        }
    }

    pub fn is_equation(&self) -> bool {
        matches!(self, Atom::Eq(..))
    }
}

/// Negation-free boolean combination of atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr<C> {
    Atom(Atom<C>),
    And(Vec<Expr<C>>),
    Or(Vec<Expr<C>>),
}

impl<C> Expr<C> {
    pub fn atoms(&self) -> Vec<&Atom<C>> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom<C>>) {
        match self {
            Expr::Atom(a) => out.push(a),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_atoms(out)),
        }
    }

    /// Truth value, given a way to evaluate terms.
    pub fn holds<T: PartialEq>(&self, value: &mut impl FnMut(&Term<C>) -> T) -> bool {
        match self {
            Expr::Atom(Atom::Eq(l, r)) => value(l) == value(r),
            Expr::Atom(Atom::Ne(l, r)) => value(l) != value(r),
            Expr::And(es) => es.iter().all(|e| e.holds(value)),
            Expr::Or(es) => es.iter().any(|e| e.holds(value)),
        }
    }

    pub fn try_map<D, E>(&self, f: &mut impl FnMut(&C) -> Result<D, E>) -> Result<Expr<D>, E> {
        let map_term = |t: &Term<C>, f: &mut dyn FnMut(&C) -> Result<D, E>| {
            t.0.iter()
                .map(|x| match x {
                    Factor::Var(v) => Ok(Factor::Var(v.clone())),
                    Factor::Const(c) => f(c).map(Factor::Const),
                })
                .collect::<Result<Vec<_>, E>>()
                .map(Term)
        };
        Ok(match self {
            Expr::Atom(Atom::Eq(l, r)) => Expr::Atom(Atom::Eq(map_term(l, f)?, map_term(r, f)?)),
            Expr::Atom(Atom::Ne(l, r)) => Expr::Atom(Atom::Ne(map_term(l, f)?, map_term(r, f)?)),
            Expr::And(es) => Expr::And(es.iter().map(|e| e.try_map(f)).collect::<Result<_, _>>()?),
            Expr::Or(es) => Expr::Or(es.iter().map(|e| e.try_map(f)).collect::<Result<_, _>>()?),
        })
    }
}

/// Distributes conjunction over disjunction.
pub fn to_dnf<C: Clone>(e: &Expr<C>) -> Vec<Vec<Atom<C>>> {
    match e {
        Expr::Atom(a) => vec![vec![a.clone()]],
        Expr::Or(es) => es.iter().flat_map(to_dnf).collect(),
        Expr::And(es) => {
            let mut acc: Vec<Vec<Atom<C>>> = vec![Vec::new()];
            for part in es.iter().map(to_dnf) {
                acc = acc
                    .iter()
                    .flat_map(|left| {
                        part.iter().map(move |right| {
                            let mut both = left.clone();
                            both.extend(right.iter().cloned());
                            both
                        })
                    })
                    .collect();
            }
            acc
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula<C> {
    vars: Vec<Var>,
    body: Expr<C>,
}

impl<C> Formula<C> {
    pub fn new(vars: Vec<Var>, body: Expr<C>) -> Result<Self, FormulaError> {
        let mut seen = BTreeSet::new();
        for v in &vars {
            if v.starts_with(FRESH_PREFIX) || v.is_empty() {
                return Err(FormulaError::Reserved(v.clone()));
            }
            if !seen.insert(v) {
                return Err(FormulaError::Duplicate(v.clone()));
            }
        }
        for atom in body.atoms() {
            let (l, r) = atom.sides();
            if let Some(v) = l.vars().chain(r.vars()).find(|v| !seen.contains(v)) {
                return Err(FormulaError::Unbound(v.clone()));
            }
        }
        Ok(Formula { vars, body })
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn body(&self) -> &Expr<C> {
        &self.body
    }

    pub fn inequality_count(&self) -> usize {
        self.body.atoms().iter().filter(|a| !a.is_equation()).count()
    }

    pub fn constants(&self) -> Vec<&C> {
        let mut out = Vec::new();
        for atom in self.body.atoms() {
            let (l, r) = atom.sides();
            for f in l.0.iter().chain(&r.0) {
                if let Factor::Const(c) = f {
                    out.push(c);
                }
            }
        }
        out
    }

    pub fn try_map_constants<D, E>(
        &self,
        mut f: impl FnMut(&C) -> Result<D, E>,
    ) -> Result<Formula<D>, E> {
        Ok(Formula {
            vars: self.vars.clone(),
            body: self.body.try_map(&mut f)?,
        })
    }
}

impl<L: Letter> Formula<Trace<L>> {
    /// Truth under an assignment; unassigned variables read as the empty trace.
    pub fn holds(&self, assignment: &BTreeMap<Var, Trace<L>>, spec: &Arc<AlphabetSpec>) -> bool {
        self.body.holds(&mut |t: &Term<Trace<L>>| {
            t.evaluate(
                Trace::empty(spec),
                |f| match f {
                    Factor::Var(v) => assignment.get(v).cloned().unwrap_or_else(|| Trace::empty(spec)),
                    Factor::Const(c) => c.clone(),
                },
                |a, b| a.concat_unchecked(b),
            )
        })
    }

    /// Every letter occurring in a constant.
    pub fn constants_alphabet(&self) -> BTreeSet<L> {
        self.constants().into_iter().flat_map(|c| c.letters()).collect()
    }
}

impl<C: fmt::Display> fmt::Display for Term<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            match x {
                Factor::Var(v) => f.write_str(v)?,
                Factor::Const(c) => write!(f, "({c})")?,
            }
        }
        Ok(())
    }
}

impl<C: fmt::Display> fmt::Display for Expr<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, es: &[Expr<C>], op: &str| {
            f.write_str("(")?;
            for (i, e) in es.iter().enumerate() {
                if i > 0 {
                    write!(f, " {op} ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")
        };
        match self {
            Expr::Atom(Atom::Eq(l, r)) => write!(f, "{l} = {r}"),
            Expr::Atom(Atom::Ne(l, r)) => write!(f, "{l} != {r}"),
            Expr::And(es) => join(f, es, "&"),
            Expr::Or(es) => join(f, es, "|"),
        }
    }
}

impl<C: fmt::Display> fmt::Display for Formula<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EX {} . {}", self.vars.join(" "), self.body)
    }
}

/// A positive atom of a flattened system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Positive<L: Letter> {
    /// `x = u`.
    Const(Var, Trace<L>),
    /// `x·y = z`.
    Product(Var, Var, Var),
}

/// A negative atom of a flattened system.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Negative {
    /// `x ≠ 1`.
    NotOne(Var),
    /// `x ≠ y`.
    Distinct(Var, Var),
}

/// A conjunction of simple atoms plus alphabetic constraints.
///
/// `primary` holds the quantified variables of the source formula that
/// survive variable elimination; `aliases` maps each eliminated one to the
/// variable it was identified with. All other variables are auxiliary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleSystem<L: Letter> {
    spec: Arc<AlphabetSpec>,
    pub(crate) positive: Vec<Positive<L>>,
    pub(crate) negative: Vec<Negative>,
    pub(crate) constraints: BTreeMap<Var, BTreeSet<L>>,
    pub(crate) variables: BTreeSet<Var>,
    pub(crate) primary: BTreeSet<Var>,
    pub(crate) aliases: BTreeMap<Var, Var>,
    next_fresh: usize,
}

impl<L: Letter> SimpleSystem<L> {
    pub fn new(spec: &Arc<AlphabetSpec>, user_vars: &[Var]) -> Self {
        SimpleSystem {
            spec: spec.clone(),
            positive: Vec::new(),
            negative: Vec::new(),
            constraints: BTreeMap::new(),
            variables: user_vars.iter().cloned().collect(),
            primary: user_vars.iter().cloned().collect(),
            aliases: BTreeMap::new(),
            next_fresh: 0,
        }
    }

    pub fn spec(&self) -> &Arc<AlphabetSpec> {
        &self.spec
    }

    pub fn positive(&self) -> &[Positive<L>] {
        &self.positive
    }

    pub fn negative(&self) -> &[Negative] {
        &self.negative
    }

    pub fn constraints(&self) -> &BTreeMap<Var, BTreeSet<L>> {
        &self.constraints
    }

    pub fn variables(&self) -> &BTreeSet<Var> {
        &self.variables
    }

    pub fn primary(&self) -> &BTreeSet<Var> {
        &self.primary
    }

    pub fn aliases(&self) -> &BTreeMap<Var, Var> {
        &self.aliases
    }

    pub fn fresh_var(&mut self) -> Var {
        self.next_fresh += 1;
        let v = format!("{FRESH_PREFIX}{}", self.next_fresh);
        self.variables.insert(v.clone());
        v
    }

    pub fn push_positive(&mut self, atom: Positive<L>) {
        match &atom {
            Positive::Const(x, _) => {
                self.variables.insert(x.clone());
            }
            Positive::Product(x, y, z) => {
                self.variables.extend([x.clone(), y.clone(), z.clone()]);
            }
        }
        self.positive.push(atom);
    }

    pub fn push_negative(&mut self, atom: Negative) {
        match &atom {
            Negative::NotOne(x) => {
                self.variables.insert(x.clone());
            }
            Negative::Distinct(x, y) => {
                self.variables.extend([x.clone(), y.clone()]);
            }
        }
        self.negative.push(atom);
    }

    /// Restricts `var` to traces over `letters`.
    pub fn constrain(&mut self, var: &str, letters: BTreeSet<L>) {
        self.variables.insert(var.to_owned());
        match self.constraints.get_mut(var) {
            Some(existing) => existing.retain(|a| letters.contains(a)),
            None => {
                self.constraints.insert(var.to_owned(), letters);
            }
        }
    }

    pub(crate) fn clear_negative(&mut self) {
        self.negative.clear();
    }

    /// Emits `target = factors[0]·…·factors[k]` as left-associated products.
    pub fn push_product_chain(&mut self, target: &str, factors: &[Var]) {
        match factors {
            [] => {
                let unit = Trace::empty(&self.spec);
                self.push_positive(Positive::Const(target.to_owned(), unit));
            }
            [only] => {
                // `target = only` as `target = only·1`
                let unit = self.fresh_var();
                self.push_positive(Positive::Const(unit.clone(), Trace::empty(&self.spec)));
                self.push_positive(Positive::Product(only.clone(), unit, target.to_owned()));
            }
            [first, middle @ .., last] => {
                let mut acc = first.clone();
                for y in middle {
                    let next = self.fresh_var();
                    self.push_positive(Positive::Product(acc, y.clone(), next.clone()));
                    acc = next;
                }
                self.push_positive(Positive::Product(acc, last.clone(), target.to_owned()));
            }
        }
    }

    /// Every letter occurring in a constant.
    pub fn constants_alphabet(&self) -> BTreeSet<L> {
        self.positive
            .iter()
            .filter_map(|p| match p {
                Positive::Const(_, u) => Some(u.letters()),
                Positive::Product(..) => None,
            })
            .flatten()
            .collect()
    }

    /// Checks every atom and constraint; unassigned variables fail.
    pub fn holds(&self, assignment: &BTreeMap<Var, Trace<L>>) -> bool {
        let get = |v: &Var| assignment.get(v);
        let positive = self.positive.iter().all(|p| match p {
            Positive::Const(x, u) => get(x) == Some(u),
            Positive::Product(x, y, z) => match (get(x), get(y), get(z)) {
                (Some(x), Some(y), Some(z)) => x.concat_unchecked(y) == *z,
                _ => false,
            },
        });
        let negative = self.negative.iter().all(|n| match n {
            Negative::NotOne(x) => get(x).is_some_and(|t| !t.is_empty()),
            Negative::Distinct(x, y) => matches!((get(x), get(y)), (Some(a), Some(b)) if a != b),
        });
        let constraints = self
            .constraints
            .iter()
            .all(|(v, allowed)| get(v).is_some_and(|t| t.within(allowed)));
        positive && negative && constraints
    }
}

impl<L: Letter> fmt::Display for SimpleSystem<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for p in &self.positive {
            parts.push(match p {
                Positive::Const(x, u) => format!("{x} = [{u}]"),
                Positive::Product(x, y, z) => format!("{x}*{y} = {z}"),
            });
        }
        for n in &self.negative {
            parts.push(match n {
                Negative::NotOne(x) => format!("{x} != 1"),
                Negative::Distinct(x, y) => format!("{x} != {y}"),
            });
        }
        for (v, letters) in &self.constraints {
            let names: Vec<String> = letters.iter().map(|a| a.to_string()).collect();
            parts.push(format!("{v} in {{{}}}*", names.join(",")));
        }
        if parts.is_empty() {
            return f.write_str("true");
        }
        f.write_str(&parts.join(" & "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type E = Expr<u32>;

    fn atom(i: u32) -> E {
        Expr::Atom(Atom::Eq(Term::constant(i), Term::unit()))
    }

    fn ids(dnf: &[Vec<Atom<u32>>]) -> Vec<Vec<u32>> {
        dnf.iter()
            .map(|c| {
                c.iter()
                    .map(|a| match a.sides().0.factors() {
                        [Factor::Const(i)] => *i,
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn dnf_shapes() {
        assert_eq!(ids(&to_dnf(&atom(1))), vec![vec![1]]);
        let e = Expr::And(vec![Expr::Or(vec![atom(1), atom(2)]), atom(3)]);
        assert_eq!(ids(&to_dnf(&e)), vec![vec![1, 3], vec![2, 3]]);
        let e = Expr::And(vec![
            Expr::Or(vec![atom(1), atom(2)]),
            Expr::Or(vec![atom(3), atom(4)]),
        ]);
        assert_eq!(to_dnf(&e).len(), 4);
    }

    #[test]
    fn formula_validation() {
        let body = Expr::Atom(Atom::Eq(Term::<u32>::var("x"), Term::var("y")));
        assert_eq!(
            Formula::new(vec!["x".into()], body.clone()),
            Err(FormulaError::Unbound("y".into()))
        );
        assert_eq!(
            Formula::new(vec!["x".into(), "x".into()], body.clone()),
            Err(FormulaError::Duplicate("x".into()))
        );
        assert_eq!(
            Formula::new(vec!["#1".into()], body),
            Err(FormulaError::Reserved("#1".into()))
        );
    }
}
