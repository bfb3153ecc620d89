//! Traces over a class-partitioned alphabet.
//!
//! The alphabet is split into classes `Σ₁ … Σₙ` and a symmetric relation `I`
//! on class indices decides which letters commute: `a ∈ Σᵢ` and `b ∈ Σⱼ`
//! commute iff `(i, j) ∈ I`. Reflexive pairs are allowed, which makes a class
//! free commutative. Classes may be infinite; any concrete trace only
//! mentions finitely many letters.
//!
//! A [`Trace`] stores the lexicographically least word of its equivalence
//! class. It is produced by a greedy topological sort of the dependence
//! graph that always emits the smallest available letter.

mod witness;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub use witness::{diff_witness, DiffWitness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("letter {letter} has class {class}, alphabet has {classes} classes")]
    ClassOutOfRange {
        letter: String,
        class: usize,
        classes: usize,
    },
    #[error("independence pair ({0}, {1}) is out of range")]
    PairOutOfRange(usize, usize),
    #[error("an alphabet needs at least one class")]
    NoClasses,
    #[error("traces belong to different alphabets")]
    AlphabetMismatch,
}

/// Number of classes and the class-level independence relation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphabetSpec {
    classes: usize,
    independent: Vec<bool>,
}

impl AlphabetSpec {
    /// `pairs` are 1-based class indices; the relation is closed under symmetry.
    pub fn new(
        classes: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TraceError> {
        if classes == 0 {
            return Err(TraceError::NoClasses);
        }
        let mut independent = vec![false; classes * classes];
        for (i, j) in pairs {
            if i == 0 || j == 0 || i > classes || j > classes {
                return Err(TraceError::PairOutOfRange(i, j));
            }
            independent[(i - 1) * classes + (j - 1)] = true;
            independent[(j - 1) * classes + (i - 1)] = true;
        }
        Ok(AlphabetSpec {
            classes,
            independent,
        })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn independent(&self, i: usize, j: usize) -> bool {
        self.independent[(i - 1) * self.classes + (j - 1)]
    }

    /// The pairs `(i, j)` with `i ≤ j` in `I`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.classes {
            for j in i..=self.classes {
                if self.independent(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn commute<L: Letter>(&self, a: &L, b: &L) -> bool {
        self.independent(a.class(), b.class())
    }

    pub fn check_letter<L: Letter>(&self, a: &L) -> Result<(), TraceError> {
        let class = a.class();
        if class == 0 || class > self.classes {
            Err(TraceError::ClassOutOfRange {
                letter: a.to_string(),
                class,
                classes: self.classes,
            })
        } else {
            Ok(())
        }
    }
}

/// A generator. The `Ord` instance is the tie-breaking order used by
/// canonical forms and enumeration; equal letters must share a class.
pub trait Letter: Clone + Ord + Hash + fmt::Debug + fmt::Display + Send + Sync {
    /// 1-based class index.
    fn class(&self) -> usize;
}

/// An alphabet with a supply of unused letters in each class.
pub trait Alphabet: Send + Sync {
    type Letter: Letter;

    fn spec(&self) -> &Arc<AlphabetSpec>;

    /// Up to `count` letters of `class` not in `avoid`, smallest first.
    /// Fewer are returned when the class is exhausted.
    fn fresh_letters(
        &self,
        class: usize,
        avoid: &BTreeSet<Self::Letter>,
        count: usize,
    ) -> Vec<Self::Letter>;
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum SymbolId {
    Named(Arc<str>),
    Fresh(usize, usize),
}

/// A named letter or one drawn from the unbounded per-class supply.
///
/// Named letters order by name and precede all supply letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    id: SymbolId,
    class: usize,
}

impl Symbol {
    pub fn named(name: &str, class: usize) -> Self {
        Symbol {
            id: SymbolId::Named(name.into()),
            class,
        }
    }

    /// The `index`-th supply letter of `class`.
    pub fn fresh(class: usize, index: usize) -> Self {
        Symbol {
            id: SymbolId::Fresh(class, index),
            class,
        }
    }

    pub fn name(&self) -> Option<&str> {
        match &self.id {
            SymbolId::Named(n) => Some(n),
            SymbolId::Fresh(..) => None,
        }
    }
}

impl Letter for Symbol {
    fn class(&self) -> usize {
        self.class
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            SymbolId::Named(n) => f.write_str(n),
            SymbolId::Fresh(c, i) => write!(f, "${c}.{i}"),
        }
    }
}

/// Declared [`Symbol`]s over an [`AlphabetSpec`], every class infinite.
#[derive(Debug, Clone)]
pub struct NamedAlphabet {
    spec: Arc<AlphabetSpec>,
    letters: BTreeMap<String, Symbol>,
}

impl NamedAlphabet {
    pub fn new(spec: AlphabetSpec) -> Self {
        NamedAlphabet {
            spec: Arc::new(spec),
            letters: BTreeMap::new(),
        }
    }

    /// Declares letters by class: `classes[i]` lists the names in class `i + 1`.
    pub fn with_classes<S: AsRef<str>>(
        classes: &[&[S]],
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, TraceError> {
        let mut alphabet = NamedAlphabet::new(AlphabetSpec::new(classes.len(), pairs)?);
        for (i, names) in classes.iter().enumerate() {
            for name in names.iter() {
                alphabet.declare(name.as_ref(), i + 1)?;
            }
        }
        Ok(alphabet)
    }

    pub fn declare(&mut self, name: &str, class: usize) -> Result<Symbol, TraceError> {
        let sym = Symbol::named(name, class);
        self.spec.check_letter(&sym)?;
        self.letters.insert(name.to_owned(), sym.clone());
        Ok(sym)
    }

    pub fn letter(&self, name: &str) -> Option<&Symbol> {
        self.letters.get(name)
    }

    pub fn letters(&self) -> impl Iterator<Item = &Symbol> {
        self.letters.values()
    }

    /// Reads a word of declared letters: whitespace-separated names, a run of
    /// single-character names, or `1` for the empty word.
    pub fn word(&self, text: &str) -> Option<Vec<Symbol>> {
        let mut out = Vec::new();
        for token in text.split_whitespace() {
            if token == "1" {
                continue;
            }
            if let Some(sym) = self.letters.get(token) {
                out.push(sym.clone());
                continue;
            }
            for c in token.chars() {
                out.push(self.letters.get(c.encode_utf8(&mut [0; 4]) as &str)?.clone());
            }
        }
        Some(out)
    }

    pub fn trace(&self, text: &str) -> Option<Trace<Symbol>> {
        let word = self.word(text)?;
        Trace::from_word(word, &self.spec).ok()
    }
}

impl Alphabet for NamedAlphabet {
    type Letter = Symbol;

    fn spec(&self) -> &Arc<AlphabetSpec> {
        &self.spec
    }

    fn fresh_letters(&self, class: usize, avoid: &BTreeSet<Symbol>, count: usize) -> Vec<Symbol> {
        (0..)
            .map(|i| Symbol::fresh(class, i))
            .filter(|s| !avoid.contains(s))
            .take(count)
            .collect()
    }
}

/// An element of the trace monoid, stored as its canonical word.
#[derive(Clone)]
pub struct Trace<L> {
    word: Vec<L>,
    spec: Arc<AlphabetSpec>,
}

impl<L: Letter> PartialEq for Trace<L> {
    fn eq(&self, other: &Self) -> bool {
        self.word == other.word && same_spec(&self.spec, &other.spec)
    }
}

impl<L: Letter> Eq for Trace<L> {}

impl<L: Letter> Hash for Trace<L> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.word.hash(state);
    }
}

/// Shortlex on canonical words.
impl<L: Letter> Ord for Trace<L> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl<L: Letter> PartialOrd for Trace<L> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<L: Letter> fmt::Debug for Trace<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Trace({self})")
    }
}

/// Letters separated by spaces; the empty trace prints as `1`.
impl<L: Letter> fmt::Display for Trace<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return f.write_str("1");
        }
        for (i, a) in self.word.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn same_spec(a: &Arc<AlphabetSpec>, b: &Arc<AlphabetSpec>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Lexicographically least linearization of the dependence order of `word`.
fn canonicalize<L: Letter>(spec: &AlphabetSpec, mut rest: Vec<L>) -> Vec<L> {
    let mut out = Vec::with_capacity(rest.len());
    while !rest.is_empty() {
        let mut best: Option<usize> = None;
        for j in 0..rest.len() {
            if best.is_some_and(|b| rest[j] >= rest[b]) {
                continue;
            }
            if rest[..j].iter().all(|x| spec.commute(x, &rest[j])) {
                best = Some(j);
            }
        }
        out.push(rest.remove(best.expect("the first occurrence is always minimal")));
    }
    out
}

impl<L: Letter> Trace<L> {
    pub fn empty(spec: &Arc<AlphabetSpec>) -> Self {
        Trace {
            word: Vec::new(),
            spec: spec.clone(),
        }
    }

    /// Canonical form of `word`.
    pub fn from_word(word: Vec<L>, spec: &Arc<AlphabetSpec>) -> Result<Self, TraceError> {
        for a in &word {
            spec.check_letter(a)?;
        }
        Ok(Self::from_word_unchecked(word, spec))
    }

    pub(crate) fn from_word_unchecked(word: Vec<L>, spec: &Arc<AlphabetSpec>) -> Self {
        Trace {
            word: canonicalize(spec, word),
            spec: spec.clone(),
        }
    }

    pub fn letter(a: L, spec: &Arc<AlphabetSpec>) -> Result<Self, TraceError> {
        spec.check_letter(&a)?;
        Ok(Trace {
            word: vec![a],
            spec: spec.clone(),
        })
    }

    pub fn word(&self) -> &[L] {
        &self.word
    }

    pub fn spec(&self) -> &Arc<AlphabetSpec> {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn letters(&self) -> BTreeSet<L> {
        self.word.iter().cloned().collect()
    }

    pub fn contains(&self, a: &L) -> bool {
        self.word.contains(a)
    }

    fn check_same(&self, other: &Self) -> Result<(), TraceError> {
        if same_spec(&self.spec, &other.spec) {
            Ok(())
        } else {
            Err(TraceError::AlphabetMismatch)
        }
    }

    pub fn concat(&self, other: &Self) -> Result<Self, TraceError> {
        self.check_same(other)?;
        Ok(self.concat_unchecked(other))
    }

    pub(crate) fn concat_unchecked(&self, other: &Self) -> Self {
        if other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        Self::from_word_unchecked(word, &self.spec)
    }

    pub fn equal(&self, other: &Self) -> Result<bool, TraceError> {
        self.check_same(other)?;
        Ok(self.word == other.word)
    }

    /// Removes an occurrence of `a` that is minimal in the dependence order.
    pub fn left_quotient(&self, a: &L) -> Option<Self> {
        let j = self.word.iter().position(|x| x == a)?;
        if !self.word[..j].iter().all(|x| self.spec.commute(x, a)) {
            return None;
        }
        let mut word = self.word.clone();
        word.remove(j);
        Some(Self::from_word_unchecked(word, &self.spec))
    }

    /// Removes an occurrence of `a` that is maximal in the dependence order.
    pub fn right_quotient(&self, a: &L) -> Option<Self> {
        let j = self.word.iter().rposition(|x| x == a)?;
        if !self.word[j + 1..].iter().all(|x| self.spec.commute(x, a)) {
            return None;
        }
        let mut word = self.word.clone();
        word.remove(j);
        Some(Self::from_word_unchecked(word, &self.spec))
    }

    /// Letters with a minimal occurrence, ascending.
    pub fn minimal_letters(&self) -> BTreeSet<L> {
        (0..self.word.len())
            .filter(|&j| {
                self.word[..j]
                    .iter()
                    .all(|x| self.spec.commute(x, &self.word[j]))
            })
            .map(|j| self.word[j].clone())
            .collect()
    }

    /// The `w` with `self · w = other`, if `self` is a prefix of `other`.
    pub fn left_divide(&self, other: &Self) -> Option<Self> {
        let mut rest = other.clone();
        for a in &self.word {
            rest = rest.left_quotient(a)?;
        }
        Some(rest)
    }

    /// The `w` with `w · self = other`, if `self` is a suffix of `other`.
    pub fn right_divide(&self, other: &Self) -> Option<Self> {
        let mut rest = other.clone();
        for a in self.word.iter().rev() {
            rest = rest.right_quotient(a)?;
        }
        Some(rest)
    }

    pub fn is_prefix(&self, other: &Self) -> Result<bool, TraceError> {
        self.check_same(other)?;
        Ok(self.left_divide(other).is_some())
    }

    /// The longest common prefix.
    pub fn meet(&self, other: &Self) -> Result<Self, TraceError> {
        self.check_same(other)?;
        let mut common = Vec::new();
        let (mut u, mut v) = (self.clone(), other.clone());
        loop {
            let in_v = v.minimal_letters();
            let Some(a) = u.minimal_letters().into_iter().find(|a| in_v.contains(a)) else {
                break;
            };
            u = u.left_quotient(&a).expect("minimal");
            v = v.left_quotient(&a).expect("minimal");
            common.push(a);
        }
        Ok(Self::from_word_unchecked(common, &self.spec))
    }

    /// Every prefix, in shortlex order.
    pub fn prefixes(&self) -> Vec<Self> {
        let mut seen = BTreeSet::new();
        let mut frontier = vec![(Self::empty(&self.spec), self.clone())];
        seen.insert(Self::empty(&self.spec));
        while let Some((prefix, rest)) = frontier.pop() {
            for a in rest.minimal_letters() {
                let mut word = prefix.word.clone();
                word.push(a.clone());
                let next = Self::from_word_unchecked(word, &self.spec);
                if seen.insert(next.clone()) {
                    frontier.push((next, rest.left_quotient(&a).expect("minimal")));
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The reversed trace.
    pub fn reversed(&self) -> Self {
        let word = self.word.iter().rev().cloned().collect();
        Self::from_word_unchecked(word, &self.spec)
    }

    /// True if every letter is in `allowed`.
    pub fn within(&self, allowed: &BTreeSet<L>) -> bool {
        self.word.iter().all(|a| allowed.contains(a))
    }
}

/// Every trace over `letters` of length at most `max_len`, each once, in
/// shortlex order of canonical words.
pub fn enumerate<L: Letter>(
    letters: &BTreeSet<L>,
    max_len: usize,
    spec: &Arc<AlphabetSpec>,
) -> Enumerate<L> {
    Enumerate {
        letters: letters.iter().cloned().collect(),
        spec: spec.clone(),
        max_len,
        level: 0,
        current: vec![Trace::empty(spec)].into_iter(),
        previous: Vec::new(),
        produced: Vec::new(),
    }
}

/// Level-by-level stream returned by [`enumerate`].
pub struct Enumerate<L> {
    letters: Vec<L>,
    spec: Arc<AlphabetSpec>,
    max_len: usize,
    level: usize,
    current: std::vec::IntoIter<Trace<L>>,
    previous: Vec<Trace<L>>,
    produced: Vec<Trace<L>>,
}

impl<L: Letter> Iterator for Enumerate<L> {
    type Item = Trace<L>;

    fn next(&mut self) -> Option<Trace<L>> {
        loop {
            if let Some(t) = self.current.next() {
                self.produced.push(t.clone());
                return Some(t);
            }
            if self.level >= self.max_len || self.letters.is_empty() {
                return None;
            }
            self.level += 1;
            self.previous = std::mem::take(&mut self.produced);
            let mut next = BTreeSet::new();
            for t in &self.previous {
                for a in &self.letters {
                    let mut word = t.word.clone();
                    word.push(a.clone());
                    next.insert(Trace::from_word_unchecked(word, &self.spec));
                }
            }
            self.current = next.into_iter().collect::<Vec<_>>().into_iter();
        }
    }
}
