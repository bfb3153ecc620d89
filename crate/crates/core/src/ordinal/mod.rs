//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite, strictly decreasing sum of ω-powers
//! `ω^e₁·c₁ + … + ω^eₖ·cₖ` where every exponent is itself an [`Ordinal`] and
//! every coefficient is a positive arbitrary-precision integer. Every value is
//! kept in normal form, so structural equality is ordinal equality.

mod parse;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub(crate) use parse::starts_ordinal;
pub use parse::{parse_factor, parse_ordinal, parse_product, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("left operand {left} exceeds right operand {right}")]
    SubtractOrder { left: Ordinal, right: Ordinal },
    #[error("cnf terms must have strictly decreasing exponents")]
    NotDecreasing,
    #[error("cnf coefficients must be positive")]
    ZeroCoefficient,
}

/// One summand `ω^exponent · coefficient` of a Cantor normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfTerm {
    exponent: Ordinal,
    coefficient: BigUint,
}

impl CnfTerm {
    pub fn exponent(&self) -> &Ordinal {
        &self.exponent
    }

    pub fn coefficient(&self) -> &BigUint {
        &self.coefficient
    }
}

/// An ordinal below ε₀. The empty term list is 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<CnfTerm>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::finite(1u32)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    pub fn finite(n: impl Into<BigUint>) -> Self {
        Self::monomial(Ordinal::zero(), n.into())
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self::monomial(exponent, BigUint::one())
    }

    /// `ω^exponent · coefficient`; a zero coefficient gives 0.
    pub fn monomial(exponent: Ordinal, coefficient: BigUint) -> Self {
        if coefficient.is_zero() {
            return Ordinal::zero();
        }
        Ordinal {
            terms: vec![CnfTerm {
                exponent,
                coefficient,
            }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs already in normal form.
    pub fn from_cnf(
        terms: impl IntoIterator<Item = (Ordinal, BigUint)>,
    ) -> Result<Self, OrdinalError> {
        let terms: Vec<CnfTerm> = terms
            .into_iter()
            .map(|(exponent, coefficient)| CnfTerm {
                exponent,
                coefficient,
            })
            .collect();
        if terms.iter().any(|t| t.coefficient.is_zero()) {
            return Err(OrdinalError::ZeroCoefficient);
        }
        if terms.windows(2).any(|w| w[0].exponent <= w[1].exponent) {
            return Err(OrdinalError::NotDecreasing);
        }
        Ok(Ordinal { terms })
    }

    pub fn terms(&self) -> &[CnfTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_finite().is_some_and(|n| n.is_one())
    }

    pub fn is_finite(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_zero())
    }

    /// The value as a natural number, if finite.
    pub fn as_finite(&self) -> Option<BigUint> {
        match self.terms.as_slice() {
            [] => Some(BigUint::zero()),
            [t] if t.exponent.is_zero() => Some(t.coefficient.clone()),
            _ => None,
        }
    }

    /// Nonzero with a constant term.
    pub fn is_successor(&self) -> bool {
        self.terms.last().is_some_and(|t| t.exponent.is_zero())
    }

    /// Nonzero without a constant term.
    pub fn is_limit(&self) -> bool {
        self.terms.last().is_some_and(|t| !t.exponent.is_zero())
    }

    /// True iff the value is `ω^(ω^ξ)` for some ξ, i.e. closed under multiplication.
    pub fn is_mult_closed(&self) -> bool {
        match self.terms.as_slice() {
            [t] if t.coefficient.is_one() => match t.exponent.terms.as_slice() {
                [e] => e.coefficient.is_one(),
                _ => false,
            },
            _ => false,
        }
    }

    /// For `ω^(ω^ξ)` returns ξ.
    pub fn mult_closed_index(&self) -> Option<&Ordinal> {
        if self.is_mult_closed() {
            Some(&self.terms[0].exponent.terms[0].exponent)
        } else {
            None
        }
    }

    /// Exponent of the leading term; `None` for 0.
    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Exponent of the trailing term; `None` for 0.
    pub fn trailing_exponent(&self) -> Option<&Ordinal> {
        self.terms.last().map(|t| &t.exponent)
    }

    /// Nesting depth of the exponent tree: finite ordinals have depth 1, 0 has depth 0.
    pub fn depth(&self) -> usize {
        self.terms
            .iter()
            .map(|t| 1 + t.exponent.depth())
            .max()
            .unwrap_or(0)
    }

    /// The unique γ with `self + γ = other`.
    pub fn left_subtract(&self, other: &Ordinal) -> Result<Ordinal, OrdinalError> {
        let order_err = || OrdinalError::SubtractOrder {
            left: self.clone(),
            right: other.clone(),
        };
        for (i, b) in other.terms.iter().enumerate() {
            let Some(a) = self.terms.get(i) else {
                return Ok(Ordinal {
                    terms: other.terms[i..].to_vec(),
                });
            };
            match a.exponent.cmp(&b.exponent) {
                Ordering::Greater => return Err(order_err()),
                Ordering::Less => {
                    return Ok(Ordinal {
                        terms: other.terms[i..].to_vec(),
                    })
                }
                Ordering::Equal => match a.coefficient.cmp(&b.coefficient) {
                    Ordering::Greater => return Err(order_err()),
                    Ordering::Less => {
                        let mut terms = vec![CnfTerm {
                            exponent: b.exponent.clone(),
                            coefficient: &b.coefficient - &a.coefficient,
                        }];
                        terms.extend_from_slice(&other.terms[i + 1..]);
                        return Ok(Ordinal { terms });
                    }
                    Ordering::Equal => {}
                },
            }
        }
        if self.terms.len() > other.terms.len() {
            Err(order_err())
        } else {
            Ok(Ordinal::zero())
        }
    }

    fn plus(&self, other: &Ordinal) -> Ordinal {
        let Some(lead) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<CnfTerm> = self
            .terms
            .iter()
            .take_while(|t| t.exponent > lead.exponent)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        let mut first = rest.next().cloned().expect("nonempty");
        if let Some(same) = self.terms.get(terms.len()) {
            if same.exponent == lead.exponent {
                first.coefficient += &same.coefficient;
            }
        }
        terms.push(first);
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    fn times(&self, other: &Ordinal) -> Ordinal {
        let (Some(lead), Some(last)) = (self.terms.first(), other.terms.last()) else {
            return Ordinal::zero();
        };
        let shifted = |t: &CnfTerm| CnfTerm {
            exponent: lead.exponent.plus(&t.exponent),
            coefficient: t.coefficient.clone(),
        };
        if !last.exponent.is_zero() {
            return Ordinal {
                terms: other.terms.iter().map(shifted).collect(),
            };
        }
        let n = other.terms.len();
        let mut terms: Vec<CnfTerm> = other.terms[..n - 1].iter().map(shifted).collect();
        terms.push(CnfTerm {
            exponent: lead.exponent.clone(),
            coefficient: &lead.coefficient * &last.coefficient,
        });
        terms.extend_from_slice(&self.terms[1..]);
        Ordinal { terms }
    }

    /// `self^n` by repeated squaring of ordinal multiplication.
    pub fn pow_finite(&self, n: &BigUint) -> Ordinal {
        let mut result = Ordinal::one();
        let mut base = self.clone();
        let bits = n.bits();
        for i in 0..bits {
            if n.bit(i) {
                result = &result * &base;
            }
            if i + 1 < bits {
                base = &base * &base;
            }
        }
        result
    }
}

impl Ord for Ordinal {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let ord = a
                .exponent
                .cmp(&b.exponent)
                .then_with(|| a.coefficient.cmp(&b.coefficient));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: &Ordinal) -> Ordinal {
        self.plus(rhs)
    }
}

impl Add for Ordinal {
    type Output = Ordinal;
    fn add(self, rhs: Ordinal) -> Ordinal {
        self.plus(&rhs)
    }
}

impl Mul for &Ordinal {
    type Output = Ordinal;
    fn mul(self, rhs: &Ordinal) -> Ordinal {
        self.times(rhs)
    }
}

impl Mul for Ordinal {
    type Output = Ordinal;
    fn mul(self, rhs: Ordinal) -> Ordinal {
        self.times(&rhs)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::finite(n)
    }
}

impl From<BigUint> for Ordinal {
    fn from(n: BigUint) -> Self {
        Ordinal::finite(n)
    }
}

impl std::str::FromStr for Ordinal {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ordinal(s)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if t.exponent.is_zero() {
                write!(f, "{}", t.coefficient)?;
                continue;
            }
            if t.exponent.is_one() {
                f.write_str("w")?;
            } else {
                write!(f, "w^({})", t.exponent)?;
            }
            if !t.coefficient.is_one() {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}
