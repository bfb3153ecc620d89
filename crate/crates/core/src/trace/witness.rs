//! Concrete witnesses for inequality of two traces.
//!
//! Two traces `u ≠ v` differ in exactly one of three ways, up to swapping
//! them:
//!
//! 1. `u` is a strict prefix of `v`;
//! 2. `u = w·a·w₁` and `v = w·w₂·a·w₃`, where `w₂` has no `a` but has a letter
//!    `b ≠ a` that does not commute with `a`;
//! 3. `u = w·a·w₁` and `v = w·w₂`, where `w₂` has no `a`.
//!
//! The witness starts from `w = meet(u, v)`.

use super::{Letter, Trace, TraceError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffWitness<L: Letter> {
    Equal,
    /// `u` is a strict prefix of `v`, or the other way round when `swapped`.
    StrictPrefix { swapped: bool },
    /// Case 2, stated for `(u, v)`, or for `(v, u)` when `swapped`.
    Separated {
        w: Trace<L>,
        a: L,
        b: L,
        w1: Trace<L>,
        w2: Trace<L>,
        w3: Trace<L>,
        swapped: bool,
    },
    /// Case 3, stated for `(u, v)`, or for `(v, u)` when `swapped`.
    Missing {
        w: Trace<L>,
        a: L,
        w1: Trace<L>,
        w2: Trace<L>,
        swapped: bool,
    },
}

pub fn diff_witness<L: Letter>(u: &Trace<L>, v: &Trace<L>) -> Result<DiffWitness<L>, TraceError> {
    if u.equal(v)? {
        return Ok(DiffWitness::Equal);
    }
    let w = u.meet(v)?;
    let u_rest = w.left_divide(u).expect("meet is a prefix");
    let v_rest = w.left_divide(v).expect("meet is a prefix");
    if u_rest.is_empty() {
        return Ok(DiffWitness::StrictPrefix { swapped: false });
    }
    if v_rest.is_empty() {
        return Ok(DiffWitness::StrictPrefix { swapped: true });
    }
    // Case 3 is preferred from either side before falling back to case 2.
    if let Some(found) = missing(&w, &u_rest, &v_rest, false) {
        return Ok(found);
    }
    if let Some(found) = missing(&w, &v_rest, &u_rest, true) {
        return Ok(found);
    }
    Ok(separated(w, &u_rest, &v_rest))
}

fn smallest_minimal<L: Letter>(t: &Trace<L>) -> L {
    t.minimal_letters()
        .into_iter()
        .next()
        .expect("nonempty trace has a minimal letter")
}

fn missing<L: Letter>(
    w: &Trace<L>,
    u_rest: &Trace<L>,
    v_rest: &Trace<L>,
    swapped: bool,
) -> Option<DiffWitness<L>> {
    let a = u_rest
        .minimal_letters()
        .into_iter()
        .find(|a| !v_rest.contains(a))?;
    Some(DiffWitness::Missing {
        w: w.clone(),
        w1: u_rest.left_quotient(&a).expect("minimal"),
        a,
        w2: v_rest.clone(),
        swapped,
    })
}

fn separated<L: Letter>(w: Trace<L>, u_rest: &Trace<L>, v_rest: &Trace<L>) -> DiffWitness<L> {
    let spec = u_rest.spec().clone();
    let a = smallest_minimal(u_rest);
    let w1 = u_rest.left_quotient(&a).expect("minimal");
    let first_a = v_rest
        .word()
        .iter()
        .position(|x| *x == a)
        .expect("case 3 was ruled out, so v_rest contains a");
    let w2 = Trace::from_word_unchecked(v_rest.word()[..first_a].to_vec(), &spec);
    let w3 = Trace::from_word_unchecked(v_rest.word()[first_a + 1..].to_vec(), &spec);
    // a is not minimal in v_rest (w is the longest common prefix), so some
    // letter before its first occurrence blocks it.
    let b = w2
        .word()
        .iter()
        .find(|x| !spec.commute(*x, &a))
        .expect("a letter of w2 depends on a")
        .clone();
    DiffWitness::Separated {
        w,
        a,
        b,
        w1,
        w2,
        w3,
        swapped: false,
    }
}
