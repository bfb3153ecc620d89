//! Prime ordinals and unique prime factorization.
//!
//! Every nonzero ordinal factors uniquely as
//!
//! ```text
//! (ω^(ω^ξ₁))^n₁ ⋯ (ω^(ω^ξᵣ))^nᵣ · c₀ · (ω^e₁+1) · c₁ ⋯ (ω^eₖ+1) · cₖ
//! ```
//!
//! with ξ₁ > … > ξᵣ, every eⱼ ≥ 1 and every cⱼ a positive integer. For a
//! successor `ω^λᵣ·aᵣ + … + ω^λ₁·a₁ + a₀` the successor part reads straight off
//! the normal form: c₀ = a₀, e₁ = λ₁, eⱼ = λⱼ − λⱼ₋₁ and cⱼ = aⱼ.

use std::fmt;

use num_bigint::BigUint;
use num_prime::nt_funcs;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::ordinal::{Ordinal, OrdinalError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactorError {
    #[error("0 has no factorization")]
    Zero,
    #[error("{0} is a limit ordinal, expected a successor")]
    Limit(Ordinal),
    #[error("malformed factorization: {0}")]
    Malformed(&'static str),
    #[error(transparent)]
    Ordinal(#[from] OrdinalError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrimeKind {
    /// An ordinary prime number.
    Finite,
    /// `ω^λ + 1` with λ ≥ 1; carries λ.
    Successor(Ordinal),
    /// `ω^(ω^ξ)`; carries ξ.
    Limit(Ordinal),
    NotPrime,
}

pub fn classify(a: &Ordinal) -> PrimeKind {
    if let Some(n) = a.as_finite() {
        return if is_prime_integer(&n) {
            PrimeKind::Finite
        } else {
            PrimeKind::NotPrime
        };
    }
    if let Some(xi) = a.mult_closed_index() {
        return PrimeKind::Limit(xi.clone());
    }
    match a.terms() {
        [hi, lo]
            if hi.coefficient().is_one()
                && lo.coefficient().is_one()
                && lo.exponent().is_zero() =>
        {
            PrimeKind::Successor(hi.exponent().clone())
        }
        _ => PrimeKind::NotPrime,
    }
}

/// Unique factorization in written (left-to-right) order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    limit: Vec<(Ordinal, BigUint)>,
    coefficients: Vec<BigUint>,
    exponents: Vec<Ordinal>,
}

impl Factorization {
    /// The empty product.
    pub fn one() -> Self {
        Factorization {
            limit: Vec::new(),
            coefficients: vec![BigUint::one()],
            exponents: Vec::new(),
        }
    }

    /// `limit` holds `(ξ, n)` for the leading `(ω^(ω^ξ))^n` factors; the
    /// successor part alternates `coefficients[0] · (ω^exponents[0]+1) ·
    /// coefficients[1] ⋯`.
    pub fn new(
        limit: Vec<(Ordinal, BigUint)>,
        coefficients: Vec<BigUint>,
        exponents: Vec<Ordinal>,
    ) -> Result<Self, FactorError> {
        if limit.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(FactorError::Malformed("limit exponents must strictly decrease"));
        }
        if limit.iter().any(|(_, n)| n.is_zero()) {
            return Err(FactorError::Malformed("limit multiplicities must be positive"));
        }
        if coefficients.len() != exponents.len() + 1 {
            return Err(FactorError::Malformed(
                "need exactly one more coefficient than successor primes",
            ));
        }
        if coefficients.iter().any(Zero::is_zero) {
            return Err(FactorError::Malformed("coefficients must be positive"));
        }
        if exponents.iter().any(Ordinal::is_zero) {
            return Err(FactorError::Malformed("successor prime exponents must be at least 1"));
        }
        Ok(Factorization {
            limit,
            coefficients,
            exponents,
        })
    }

    pub fn limit_part(&self) -> &[(Ordinal, BigUint)] {
        &self.limit
    }

    pub fn coefficients(&self) -> &[BigUint] {
        &self.coefficients
    }

    pub fn exponents(&self) -> &[Ordinal] {
        &self.exponents
    }

    /// Number of prime factors counted with multiplicity, finite coefficients
    /// split into ordinary primes.
    pub fn prime_count(&self) -> BigUint {
        let limit: BigUint = self.limit.iter().map(|(_, n)| n.clone()).sum();
        let finite: usize = self.coefficients.iter().map(|c| prime_factors(c).len()).sum();
        limit + BigUint::from(self.exponents.len() + finite)
    }

    /// Multiplies the factors out in written order.
    pub fn evaluate(&self) -> Ordinal {
        let mut acc = Ordinal::one();
        for (xi, n) in &self.limit {
            let prime = Ordinal::omega_pow(Ordinal::omega_pow(xi.clone()));
            acc = &acc * &prime.pow_finite(n);
        }
        acc = &acc * &Ordinal::finite(self.coefficients[0].clone());
        for (e, c) in self.exponents.iter().zip(&self.coefficients[1..]) {
            acc = &acc * &successor_prime(e);
            acc = &acc * &Ordinal::finite(c.clone());
        }
        acc
    }
}

/// `ω^exponent + 1`.
pub fn successor_prime(exponent: &Ordinal) -> Ordinal {
    &Ordinal::omega_pow(exponent.clone()) + &Ordinal::one()
}

/// Prints as a product that [`crate::ordinal::parse_product`] reads back.
impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (xi, n) in &self.limit {
            let prime = Ordinal::omega_pow(Ordinal::omega_pow(xi.clone()));
            if n.is_one() {
                parts.push(format!("({prime})"));
            } else {
                parts.push(format!("({prime})^{n}"));
            }
        }
        let shown = |c: &BigUint| (!c.is_one()).then(|| c.to_string());
        parts.extend(shown(&self.coefficients[0]));
        for (e, c) in self.exponents.iter().zip(&self.coefficients[1..]) {
            parts.push(format!("(w^({e})+1)"));
            parts.extend(shown(c));
        }
        if parts.is_empty() {
            parts.push("1".to_owned());
        }
        f.write_str(&parts.join(" * "))
    }
}

pub fn factor_successor(a: &Ordinal) -> Result<Factorization, FactorError> {
    if a.is_zero() {
        return Err(FactorError::Zero);
    }
    if a.is_limit() {
        return Err(FactorError::Limit(a.clone()));
    }
    let terms = a.terms();
    let (constant, infinite) = terms.split_last().expect("nonzero");
    let mut coefficients = vec![constant.coefficient().clone()];
    let mut exponents = Vec::with_capacity(infinite.len());
    let mut previous = Ordinal::zero();
    for t in infinite.iter().rev() {
        exponents.push(previous.left_subtract(t.exponent())?);
        coefficients.push(t.coefficient().clone());
        previous = t.exponent().clone();
    }
    Ok(Factorization {
        limit: Vec::new(),
        coefficients,
        exponents,
    })
}

pub fn factor(a: &Ordinal) -> Result<Factorization, FactorError> {
    let smallest = a.trailing_exponent().ok_or(FactorError::Zero)?.clone();
    // a = ω^smallest × successor
    let shifted = a
        .terms()
        .iter()
        .map(|t| Ok((smallest.left_subtract(t.exponent())?, t.coefficient().clone())))
        .collect::<Result<Vec<_>, OrdinalError>>()?;
    let successor = Ordinal::from_cnf(shifted)?;
    let mut f = factor_successor(&successor)?;
    f.limit = smallest
        .terms()
        .iter()
        .map(|t| (t.exponent().clone(), t.coefficient().clone()))
        .collect();
    Ok(f)
}

pub fn is_prime_integer(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(small) => nt_funcs::is_prime64(small),
        None => nt_funcs::is_prime(n, None).probably(),
    }
}

/// Ordinary prime factors with multiplicity, ascending. Empty for 0 and 1.
pub fn prime_factors(n: &BigUint) -> Vec<BigUint> {
    if n <= &BigUint::one() {
        return Vec::new();
    }
    let expand = |p: BigUint, k: usize| std::iter::repeat_n(p, k);
    match n.to_u64() {
        Some(small) => nt_funcs::factorize64(small)
            .into_iter()
            .flat_map(|(p, k)| expand(BigUint::from(p), k))
            .collect(),
        None => nt_funcs::factorize(n.clone())
            .into_iter()
            .flat_map(|(p, k)| expand(p, k))
            .collect(),
    }
}
