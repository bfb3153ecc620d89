//! Existential theory of trace monoids over class-partitioned alphabets,
//! and its application to multiplication of successor ordinals.

pub mod cli;
pub mod formula;
pub mod ordinal;
pub mod primes;
pub mod reduce;
pub mod solver;
pub mod successor;
pub mod syntax;
pub mod trace;

pub use syntax::ParseError;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/traces.md")]
    mod traces {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/reduction.md")]
    mod reduction {}
    #[doc = include_str!("../../../book/src/ordinals.md")]
    mod ordinals {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
