//! Elimination of inequalities.
//!
//! Every inequality of a flattened system is witnessed by one or two
//! letters. A [`LetterPattern`] fixes, for each of those slots, either a
//! letter of Δ (the letters of the system's constants) or an abstract fresh
//! letter of some class, together with which abstract slots coincide.
//! Patterns are enumerated once per orbit of permutations that fix Δ and
//! preserve classes. Each pattern is then realized with concrete unused
//! letters, and each inequality replaced by positive atoms:
//!
//! * `x ≠ 1` becomes `x = a·z₁`;
//! * `x ≠ y` becomes one of `y = x·a·z₁`, or
//!   `x = z₁·a·z₂ ∧ y = z₁·z₃·b·z₄·a·z₅` with `z₃, z₄` avoiding `a`, or
//!   `x = z₁·a·z₂ ∧ y = z₁·z₃` with `z₃` avoiding `a`.
//!
//! The middle branch needs `b ≠ a` not commuting with `a`; patterns where
//! that fails omit it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::formula::{Negative, Positive, SimpleSystem, Var};
use crate::trace::{Alphabet, Letter, Trace};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("pattern has {found} slots but the system needs {expected}")]
    SlotMismatch { expected: usize, found: usize },
    #[error("class {0} has too few unused letters for the pattern")]
    Exhausted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotRole {
    A,
    B,
}

/// The `role` letter witnessing inequality number `inequality`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slot {
    pub inequality: usize,
    pub role: SlotRole,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SlotValue<L> {
    Known(L),
    /// An abstract letter, named by the first slot of its group.
    Fresh { class: usize, group: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LetterPattern<L> {
    slots: Vec<Slot>,
    values: Vec<SlotValue<L>>,
}

impl<L: Letter> LetterPattern<L> {
    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn values(&self) -> &[SlotValue<L>] {
        &self.values
    }

    /// `(group, class)` for each abstract letter, in group order.
    pub fn groups(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            if let SlotValue::Fresh { class, group } = v {
                if *group == i {
                    out.push((*group, *class));
                }
            }
        }
        out
    }
}

impl<L: Letter> fmt::Display for LetterPattern<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (slot, value)) in self.slots.iter().zip(&self.values).enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{:?}{}=", slot.role, slot.inequality)?;
            match value {
                SlotValue::Known(a) => write!(f, "{a}")?,
                SlotValue::Fresh { class, group } => write!(f, "?{group}:{class}")?,
            }
        }
        f.write_str("]")
    }
}

/// Slots in inequality order: one for `x ≠ 1`, two for `x ≠ y`.
pub fn slots_of<L: Letter>(s: &SimpleSystem<L>) -> Vec<Slot> {
    let mut slots = Vec::new();
    for (i, n) in s.negative().iter().enumerate() {
        slots.push(Slot { inequality: i, role: SlotRole::A });
        if matches!(n, Negative::Distinct(..)) {
            slots.push(Slot { inequality: i, role: SlotRole::B });
        }
    }
    slots
}

/// Bound on the number of fresh letters per class.
pub fn fresh_bound<L: Letter>(s: &SimpleSystem<L>) -> usize {
    4 * s.negative().len()
}

pub fn enumerate_patterns<A: Alphabet>(
    s: &SimpleSystem<A::Letter>,
    alphabet: &A,
    delta: &BTreeSet<A::Letter>,
) -> Vec<LetterPattern<A::Letter>> {
    let slots = slots_of(s);
    let k = fresh_bound(s);
    let classes = alphabet.spec().classes();
    let capacity: Vec<usize> = (1..=classes)
        .map(|c| alphabet.fresh_letters(c, delta, k).len())
        .collect();
    let mut out = Vec::new();
    let mut values = Vec::with_capacity(slots.len());
    let mut used = vec![0usize; classes];
    extend(&slots, delta, &capacity, &mut used, &mut values, &mut out);
    out
}

fn extend<L: Letter>(
    slots: &[Slot],
    delta: &BTreeSet<L>,
    capacity: &[usize],
    used: &mut [usize],
    values: &mut Vec<SlotValue<L>>,
    out: &mut Vec<LetterPattern<L>>,
) {
    let i = values.len();
    if i == slots.len() {
        out.push(LetterPattern {
            slots: slots.to_vec(),
            values: values.clone(),
        });
        return;
    }
    for a in delta {
        values.push(SlotValue::Known(a.clone()));
        extend(slots, delta, capacity, used, values, out);
        values.pop();
    }
    let groups: Vec<SlotValue<L>> = values
        .iter()
        .enumerate()
        .filter(|(j, v)| matches!(v, SlotValue::Fresh { group, .. } if group == j))
        .map(|(_, v)| v.clone())
        .collect();
    for g in groups {
        values.push(g);
        extend(slots, delta, capacity, used, values, out);
        values.pop();
    }
    for class in 1..=capacity.len() {
        if used[class - 1] < capacity[class - 1] {
            used[class - 1] += 1;
            values.push(SlotValue::Fresh { class, group: i });
            extend(slots, delta, capacity, used, values, out);
            values.pop();
            used[class - 1] -= 1;
        }
    }
}

/// Which replacement was chosen for one inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// `x = a·z₁` for `x ≠ 1`.
    NonEmpty,
    /// `y = x·a·z₁`.
    Prefix,
    /// `x = z₁·a·z₂ ∧ y = z₁·z₃·b·z₄·a·z₅`.
    Separated,
    /// `x = z₁·a·z₂ ∧ y = z₁·z₃`.
    Missing,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Provenance {
    pub pattern: usize,
    pub branches: Vec<Branch>,
}

/// A positive system over the finite alphabet `gamma`.
#[derive(Debug, Clone)]
pub struct Instance<L: Letter> {
    pub gamma: BTreeSet<L>,
    pub system: SimpleSystem<L>,
    pub provenance: Provenance,
}

impl<L: Letter> Instance<L> {
    /// A key equal for instances with the same alphabet and atoms.
    pub fn fingerprint(&self) -> String {
        let gamma: Vec<String> = self.gamma.iter().map(|a| a.to_string()).collect();
        format!("{{{}}} {}", gamma.join(","), self.system)
    }
}

/// Concrete letters for every slot of `p`.
fn realize<A: Alphabet>(
    p: &LetterPattern<A::Letter>,
    alphabet: &A,
    delta: &BTreeSet<A::Letter>,
) -> Result<Vec<A::Letter>, ReduceError> {
    let groups = p.groups();
    let mut per_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (group, class) in &groups {
        per_class.entry(*class).or_default().push(*group);
    }
    let mut letter_of: BTreeMap<usize, A::Letter> = BTreeMap::new();
    for (class, members) in per_class {
        let letters = alphabet.fresh_letters(class, delta, members.len());
        if letters.len() < members.len() {
            return Err(ReduceError::Exhausted(class));
        }
        letter_of.extend(members.into_iter().zip(letters));
    }
    Ok(p.values
        .iter()
        .map(|v| match v {
            SlotValue::Known(a) => a.clone(),
            SlotValue::Fresh { group, .. } => letter_of[group].clone(),
        })
        .collect())
}

struct Builder<L: Letter> {
    system: SimpleSystem<L>,
    gamma: BTreeSet<L>,
    pinned: BTreeMap<L, Var>,
}

impl<L: Letter> Builder<L> {
    fn letter(&mut self, a: &L) -> Var {
        if let Some(v) = self.pinned.get(a) {
            return v.clone();
        }
        let v = self.system.fresh_var();
        let t = Trace::from_word_unchecked(vec![a.clone()], self.system.spec());
        self.system.push_positive(Positive::Const(v.clone(), t));
        self.pinned.insert(a.clone(), v.clone());
        v
    }

    fn avoiding(&mut self, a: &L) -> Var {
        let v = self.system.fresh_var();
        let allowed = self.gamma.iter().filter(|x| *x != a).cloned().collect();
        self.system.constrain(&v, allowed);
        v
    }

    fn apply(&mut self, n: &Negative, branch: Branch, a: &L, b: Option<&L>) {
        match (n, branch) {
            (Negative::NotOne(x), _) => {
                let la = self.letter(a);
                let z1 = self.system.fresh_var();
                self.system.push_product_chain(x, &[la, z1]);
            }
            (Negative::Distinct(x, y), Branch::Prefix) => {
                let la = self.letter(a);
                let z1 = self.system.fresh_var();
                self.system.push_product_chain(y, &[x.clone(), la, z1]);
            }
            (Negative::Distinct(x, y), Branch::Separated) => {
                let la = self.letter(a);
                let lb = self.letter(b.expect("separated branch has b"));
                let z1 = self.system.fresh_var();
                let z2 = self.system.fresh_var();
                let z3 = self.avoiding(a);
                let z4 = self.avoiding(a);
                let z5 = self.system.fresh_var();
                self.system.push_product_chain(x, &[z1.clone(), la.clone(), z2]);
                self.system.push_product_chain(y, &[z1, z3, lb, z4, la, z5]);
            }
            (Negative::Distinct(x, y), _) => {
                let la = self.letter(a);
                let z1 = self.system.fresh_var();
                let z2 = self.system.fresh_var();
                let z3 = self.avoiding(a);
                self.system.push_product_chain(x, &[z1.clone(), la, z2]);
                self.system.push_product_chain(y, &[z1, z3]);
            }
        }
    }
}

/// The branches available to each inequality under realized slot letters.
fn branch_options<L: Letter>(
    s: &SimpleSystem<L>,
    letters: &[L],
) -> Vec<(usize, Vec<Branch>)> {
    let spec = s.spec();
    let mut out = Vec::new();
    let mut next = 0;
    for n in s.negative() {
        match n {
            Negative::NotOne(_) => {
                out.push((next, vec![Branch::NonEmpty]));
                next += 1;
            }
            Negative::Distinct(..) => {
                let (a, b) = (&letters[next], &letters[next + 1]);
                let mut options = vec![Branch::Prefix];
                if a != b && !spec.commute(a, b) {
                    options.push(Branch::Separated);
                }
                options.push(Branch::Missing);
                out.push((next, options));
                next += 2;
            }
        }
    }
    out
}

pub fn instantiate<A: Alphabet>(
    s: &SimpleSystem<A::Letter>,
    p: &LetterPattern<A::Letter>,
    alphabet: &A,
) -> Result<Vec<Instance<A::Letter>>, ReduceError> {
    instantiate_indexed(s, p, 0, alphabet, &s.constants_alphabet())
}

fn instantiate_indexed<A: Alphabet>(
    s: &SimpleSystem<A::Letter>,
    p: &LetterPattern<A::Letter>,
    index: usize,
    alphabet: &A,
    delta: &BTreeSet<A::Letter>,
) -> Result<Vec<Instance<A::Letter>>, ReduceError> {
    let expected = slots_of(s);
    if expected != p.slots {
        return Err(ReduceError::SlotMismatch {
            expected: expected.len(),
            found: p.slots.len(),
        });
    }
    let letters = realize(p, alphabet, delta)?;
    let mut gamma = delta.clone();
    gamma.extend(letters.iter().cloned());
    let options = branch_options(s, &letters);

    let mut out = Vec::new();
    let mut choice = vec![0usize; options.len()];
    loop {
        let mut base = s.clone();
        base.clear_negative();
        let mut builder = Builder {
            system: base,
            gamma: gamma.clone(),
            pinned: BTreeMap::new(),
        };
        let mut branches = Vec::with_capacity(options.len());
        for (n, ((slot, opts), &c)) in s.negative().iter().zip(options.iter().zip(&choice)) {
            let b = matches!(n, Negative::Distinct(..)).then(|| &letters[slot + 1]);
            builder.apply(n, opts[c], &letters[*slot], b);
            branches.push(opts[c]);
        }
        out.push(Instance {
            gamma: gamma.clone(),
            system: builder.system,
            provenance: Provenance {
                pattern: index,
                branches,
            },
        });
        // odometer over branch choices, last inequality fastest
        let mut i = options.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            choice[i] += 1;
            if choice[i] < options[i].1.len() {
                break;
            }
            choice[i] = 0;
        }
    }
}

pub fn reduce_all<A: Alphabet>(
    s: &SimpleSystem<A::Letter>,
    alphabet: &A,
) -> Vec<Instance<A::Letter>> {
    let delta = s.constants_alphabet();
    enumerate_patterns(s, alphabet, &delta)
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            instantiate_indexed(s, p, i, alphabet, &delta).expect("enumerated patterns fit")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{flatten, parse_formula, to_dnf, TraceSyntax};
    use crate::trace::{NamedAlphabet, Symbol};

    fn system(al: &NamedAlphabet, src: &str) -> SimpleSystem<Symbol> {
        let f = parse_formula(src, &TraceSyntax::new(al)).unwrap();
        let mut all: Vec<_> = to_dnf(f.body())
            .iter()
            .flat_map(|c| flatten(c, f.vars(), al.spec()))
            .collect();
        assert_eq!(all.len(), 1);
        all.pop().unwrap()
    }

    #[test]
    fn no_inequalities_one_pattern() {
        let al = NamedAlphabet::with_classes(&[&["a"]], []).unwrap();
        let s = system(&al, "EX x . x = a");
        let ps = enumerate_patterns(&s, &al, &s.constants_alphabet());
        assert_eq!(ps.len(), 1);
        assert!(ps[0].values().is_empty());
        let inst = reduce_all(&s, &al);
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].gamma, s.constants_alphabet());
    }

    #[test]
    fn one_known_letter_two_classes() {
        let al = NamedAlphabet::with_classes(&[&["a"], &[]], []).unwrap();
        let s = system(&al, "EX x y . x = a & y != 1");
        let ps = enumerate_patterns(&s, &al, &s.constants_alphabet());
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["[A0=a]", "[A0=?0:1]", "[A0=?0:2]"]);
    }

    #[test]
    fn two_nonempty_one_class() {
        let al = NamedAlphabet::with_classes(&[&["a"]], []).unwrap();
        let s = system(&al, "EX x y . x != 1 & y != 1");
        let ps = enumerate_patterns(&s, &al, &BTreeSet::new());
        let shown: Vec<String> = ps.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, ["[A0=?0:1, A1=?0:1]", "[A0=?0:1, A1=?1:1]"]);
        assert_eq!(reduce_all(&s, &al).len(), 1 + 1);
    }

    #[test]
    fn single_nonempty_over_empty_delta() {
        let al = NamedAlphabet::with_classes(&[&["a"]], []).unwrap();
        let s = system(&al, "EX x . x != 1");
        let inst = reduce_all(&s, &al);
        assert_eq!(inst.len(), 1);
        assert_eq!(inst[0].system.to_string(), "#1 = [$1.0] & #1*#2 = x");
        assert!(inst[0].system.negative().is_empty());
    }

    #[test]
    fn distinct_branches() {
        let al = NamedAlphabet::with_classes(&[&["a", "b"]], []).unwrap();
        let s = system(&al, "EX x y . x = a b & x != y");
        let ps = enumerate_patterns(&s, &al, &s.constants_alphabet());
        let per: Vec<usize> = ps
            .iter()
            .map(|p| instantiate(&s, p, &al).unwrap().len())
            .collect();
        for (p, n) in ps.iter().zip(&per) {
            let v = p.values();
            assert_eq!(*n, if v[0] != v[1] { 3 } else { 2 });
        }
        let total: usize = per.iter().sum();
        assert_eq!(reduce_all(&s, &al).len(), total);
        for inst in reduce_all(&s, &al) {
            assert!(inst.system.negative().is_empty());
            for allowed in inst.system.constraints().values() {
                assert!(allowed.is_subset(&inst.gamma));
            }
        }
    }

    #[test]
    fn two_distinct_cartesian() {
        let al = NamedAlphabet::with_classes(&[&["a", "b"]], []).unwrap();
        let s = system(&al, "EX x y u v . x != y & u != v & x = a & u = b");
        let delta = s.constants_alphabet();
        let p = enumerate_patterns(&s, &al, &delta)
            .into_iter()
            .find(|p| {
                p.values()
                    == [
                        SlotValue::Known(Symbol::named("a", 1)),
                        SlotValue::Known(Symbol::named("b", 1)),
                        SlotValue::Known(Symbol::named("b", 1)),
                        SlotValue::Known(Symbol::named("a", 1)),
                    ]
            })
            .unwrap();
        assert_eq!(instantiate(&s, &p, &al).unwrap().len(), 9);
    }

    #[test]
    fn mismatched_pattern() {
        let al = NamedAlphabet::with_classes(&[&["a"]], []).unwrap();
        let s = system(&al, "EX x . x != 1");
        let t = system(&al, "EX x y . x != y");
        let p = &enumerate_patterns(&t, &al, &BTreeSet::new())[0];
        assert!(instantiate(&s, p, &al).is_err());
    }
}
