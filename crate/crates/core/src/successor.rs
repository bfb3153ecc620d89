//! Multiplication of successor ordinals as a trace monoid.
//!
//! Every successor `α` factors uniquely as
//! `a₀·(ω^λ₁+1)·a₁·(ω^λ₂+1)·…·a_r` with natural `aᵢ ≥ 1`. Ordinary primes
//! commute among themselves and nothing else commutes, so the successors
//! below a multiplicatively closed `λ` form the trace monoid over the letters
//! `q_p` (class 2, commuting) and `P_μ` (class 1, free, one per
//! `ω^μ+1 < λ`). [`encode`] and [`decode`] are the two directions of that
//! isomorphism.
//!
//! ```
//! use trace_ord::ordinal::Ordinal;
//! use trace_ord::successor::{decode, encode, SuccessorAlphabet};
//!
//! let alphabet = SuccessorAlphabet::new(Ordinal::omega_pow(Ordinal::omega())).unwrap();
//! let a: Ordinal = "w*2+3".parse().unwrap();
//! let t = encode(&a, &alphabet).unwrap();
//! assert_eq!(t.to_string(), "q3 P[1] q2");
//! assert_eq!(decode(&t), a);
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use thiserror::Error;

use crate::formula::{parse_formula_at, ConstantSyntax, Factor, Formula, Term, Var};
use crate::ordinal::{parse_factor, parse_ordinal, starts_ordinal, Ordinal};
use crate::primes::{factor_successor, is_prime_integer, prime_factors, successor_prime, FactorError};
use crate::solver::{solve_with, Outcome, SolveOptions, Stats};
use crate::syntax::{Cursor, ParseError};
use crate::trace::{Alphabet, AlphabetSpec, Letter, Trace};

/// `q_p` for an ordinary prime `p`, or `P_μ` for the prime `ω^μ+1`.
///
/// All `q_p` precede all `P_μ`; each kind is ordered by its index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SuccessorLetter {
    Prime(BigUint),
    Power(Ordinal),
}

impl SuccessorLetter {
    /// The prime ordinal the letter stands for.
    pub fn value(&self) -> Ordinal {
        match self {
            SuccessorLetter::Prime(p) => Ordinal::finite(p.clone()),
            SuccessorLetter::Power(mu) => successor_prime(mu),
        }
    }
}

impl Letter for SuccessorLetter {
    fn class(&self) -> usize {
        match self {
            SuccessorLetter::Power(_) => 1,
            SuccessorLetter::Prime(_) => 2,
        }
    }
}

impl fmt::Display for SuccessorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SuccessorLetter::Prime(p) => write!(f, "q{p}"),
            SuccessorLetter::Power(mu) => write!(f, "P[{mu}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SentenceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("bound {0} is not multiplicatively closed (expected w^(w^(x)))")]
    NotMultClosed(Ordinal),
    #[error("constant {0} is not a nonzero successor ordinal")]
    NotSuccessor(Ordinal),
    #[error("constant {constant} is not below the bound {bound}")]
    TooLarge { constant: Ordinal, bound: Ordinal },
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// The letters for successors below a multiplicatively closed bound.
#[derive(Debug, Clone)]
pub struct SuccessorAlphabet {
    spec: Arc<AlphabetSpec>,
    bound: Ordinal,
}

impl SuccessorAlphabet {
    pub fn new(bound: Ordinal) -> Result<Self, SentenceError> {
        if !bound.is_mult_closed() {
            return Err(SentenceError::NotMultClosed(bound));
        }
        let spec = AlphabetSpec::new(2, [(2, 2)]).expect("two classes");
        Ok(SuccessorAlphabet {
            spec: Arc::new(spec),
            bound,
        })
    }

    pub fn bound(&self) -> &Ordinal {
        &self.bound
    }

    /// Whether the letter's prime lies below the bound.
    pub fn admits(&self, a: &SuccessorLetter) -> bool {
        a.value() < self.bound
    }
}

impl Alphabet for SuccessorAlphabet {
    type Letter = SuccessorLetter;

    fn spec(&self) -> &Arc<AlphabetSpec> {
        &self.spec
    }

    fn fresh_letters(
        &self,
        class: usize,
        avoid: &BTreeSet<SuccessorLetter>,
        count: usize,
    ) -> Vec<SuccessorLetter> {
        match class {
            1 => {
                // no successor primes below w
                if self.bound == Ordinal::omega() {
                    return Vec::new();
                }
                (1u64..)
                    .map(|mu| SuccessorLetter::Power(Ordinal::from(mu)))
                    .filter(|a| !avoid.contains(a))
                    .take(count)
                    .collect()
            }
            2 => (2u64..)
                .map(BigUint::from)
                .filter(is_prime_integer)
                .map(SuccessorLetter::Prime)
                .filter(|a| !avoid.contains(a))
                .take(count)
                .collect(),
            _ => Vec::new(),
        }
    }
}

pub fn encode(a: &Ordinal, alphabet: &SuccessorAlphabet) -> Result<Trace<SuccessorLetter>, SentenceError> {
    let f = factor_successor(a)?;
    let mut word = Vec::new();
    let primes = |n: &BigUint| prime_factors(n).into_iter().map(SuccessorLetter::Prime);
    word.extend(primes(&f.coefficients()[0]));
    for (mu, c) in f.exponents().iter().zip(&f.coefficients()[1..]) {
        word.push(SuccessorLetter::Power(mu.clone()));
        word.extend(primes(c));
    }
    Ok(Trace::from_word_unchecked(word, alphabet.spec()))
}

pub fn decode(t: &Trace<SuccessorLetter>) -> Ordinal {
    t.word().iter().fold(Ordinal::one(), |acc, a| &acc * &a.value())
}

/// Ordinal constants inside formulas. `w` is reserved.
#[derive(Debug, Clone, Copy, Default)]
pub struct OrdinalSyntax;

impl ConstantSyntax for OrdinalSyntax {
    type Const = Ordinal;

    fn constant(&self, cur: &mut Cursor<'_>) -> Result<Option<Ordinal>, ParseError> {
        if starts_ordinal(cur) {
            parse_factor(cur).map(Some)
        } else {
            Ok(None)
        }
    }

    fn reserved(&self, name: &str) -> bool {
        name == "w"
    }
}

/// `∃x₁…xₙ φ` over successors below `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalSentence {
    pub bound: Ordinal,
    pub formula: Formula<Ordinal>,
}

/// `ω^ω`, used when a sentence names no bound.
pub fn default_bound() -> Ordinal {
    Ordinal::omega_pow(Ordinal::omega())
}

/// Reads `['LAMBDA' ordinal ';'] formula`.
pub fn parse_sentence(src: &str) -> Result<OrdinalSentence, ParseError> {
    let mut cur = Cursor::new(src);
    let bound = if cur.eat_keyword("LAMBDA") {
        let start = cur.offset();
        let rest = cur.rest();
        let end = rest.find(';').ok_or_else(|| cur.error("expected `;` after the bound"))?;
        let bound = parse_ordinal(&rest[..end]).map_err(|e| cur.error_at(start + e.offset, e.message))?;
        cur.reset(start + end + 1);
        bound
    } else {
        default_bound()
    };
    let formula = parse_formula_at(&mut cur, &OrdinalSyntax)?;
    cur.finish()?;
    Ok(OrdinalSentence { bound, formula })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrdinalOutcome {
    Sat(BTreeMap<Var, Ordinal>),
    UnsatUpTo(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinalResult {
    pub outcome: OrdinalOutcome,
    pub stats: Stats,
}

impl OrdinalSentence {
    /// Checks the bound and the constants.
    pub fn validate(&self) -> Result<SuccessorAlphabet, SentenceError> {
        let alphabet = SuccessorAlphabet::new(self.bound.clone())?;
        for c in self.formula.constants() {
            if !c.is_successor() {
                return Err(SentenceError::NotSuccessor(c.clone()));
            }
            if *c >= self.bound {
                return Err(SentenceError::TooLarge {
                    constant: c.clone(),
                    bound: self.bound.clone(),
                });
            }
        }
        Ok(alphabet)
    }

    /// Truth under ordinal arithmetic.
    pub fn holds(&self, assignment: &BTreeMap<Var, Ordinal>) -> bool {
        self.formula.body().holds(&mut |t: &Term<Ordinal>| {
            t.evaluate(
                Ordinal::one(),
                |f| match f {
                    Factor::Var(v) => assignment.get(v).cloned().unwrap_or_else(Ordinal::one),
                    Factor::Const(c) => c.clone(),
                },
                |a, b| a * b,
            )
        })
    }
}

pub fn solve_sentence(s: &OrdinalSentence, bound: usize) -> Result<OrdinalResult, SentenceError> {
    solve_sentence_with(s, SolveOptions::new(bound))
}

pub fn solve_sentence_with(
    s: &OrdinalSentence,
    options: SolveOptions,
) -> Result<OrdinalResult, SentenceError> {
    let alphabet = s.validate()?;
    let encoded = s.formula.try_map_constants(|c| encode(c, &alphabet))?;
    let result = solve_with(&encoded, &alphabet, options);
    let outcome = match result.outcome {
        Outcome::Sat(w) => {
            let witness: BTreeMap<Var, Ordinal> =
                w.iter().map(|(v, t)| (v.clone(), decode(t))).collect();
            for a in witness.values() {
                assert!(a.is_successor() && *a < s.bound, "witness {a} is out of range");
            }
            assert!(s.holds(&witness), "witness violates the sentence");
            OrdinalOutcome::Sat(witness)
        }
        Outcome::UnsatUpTo(b) => OrdinalOutcome::UnsatUpTo(b),
    };
    Ok(OrdinalResult {
        outcome,
        stats: result.stats,
    })
}
