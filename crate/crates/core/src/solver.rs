//! Bounded satisfiability search.
//!
//! The bound limits the length of the formula's own variables. Auxiliary
//! variables are not bounded; they are fixed by constants, by products of
//! known values, or by splitting a known trace into a prefix and the rest.
//! Bounds are tried in increasing order, so a witness found at bound `b` is
//! also the one reported at every larger bound.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;

use crate::formula::{flatten, to_dnf, Formula, Positive, SimpleSystem, Var};
use crate::reduce::{reduce_all, Instance};
use crate::trace::{enumerate, Alphabet, AlphabetSpec, Letter, Trace};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome<L: Letter> {
    Sat(BTreeMap<Var, Trace<L>>),
    UnsatUpTo(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Candidate values tried while branching.
    pub assignments: u64,
    /// Distinct instances searched.
    pub instances: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverResult<L: Letter> {
    pub outcome: Outcome<L>,
    pub stats: Stats,
}

impl<L: Letter> SolverResult<L> {
    pub fn is_sat(&self) -> bool {
        matches!(self.outcome, Outcome::Sat(_))
    }

    pub fn witness(&self) -> Option<&BTreeMap<Var, Trace<L>>> {
        match &self.outcome {
            Outcome::Sat(w) => Some(w),
            Outcome::UnsatUpTo(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveOptions {
    pub bound: usize,
    /// Search the instances of each bound on the rayon pool. The witness is
    /// unchanged; the assignment count then covers every instance of the
    /// deciding bound.
    pub parallel: bool,
}

impl SolveOptions {
    pub fn new(bound: usize) -> Self {
        SolveOptions { bound, parallel: false }
    }
}

type State<L> = Vec<Option<Trace<L>>>;

struct Search<'a, L: Letter> {
    spec: &'a Arc<AlphabetSpec>,
    vars: Vec<Var>,
    consts: Vec<(usize, Trace<L>)>,
    products: Vec<[usize; 3]>,
    allowed: Vec<Option<&'a BTreeSet<L>>>,
    primary: Vec<bool>,
    relevant: Vec<bool>,
    gamma: &'a BTreeSet<L>,
    max_len: usize,
    assignments: u64,
    domains: HashMap<BTreeSet<L>, Arc<Vec<Trace<L>>>>,
}

impl<'a, L: Letter> Search<'a, L> {
    fn new(sys: &'a SimpleSystem<L>, gamma: &'a BTreeSet<L>, max_len: usize) -> Self {
        let vars: Vec<Var> = sys.variables().iter().cloned().collect();
        let index: BTreeMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut relevant = vec![false; vars.len()];
        let mut consts = Vec::new();
        let mut products = Vec::new();
        for p in sys.positive() {
            match p {
                Positive::Const(x, u) => {
                    relevant[index[x]] = true;
                    consts.push((index[x], u.clone()));
                }
                Positive::Product(x, y, z) => {
                    let t = [index[x], index[y], index[z]];
                    t.iter().for_each(|&i| relevant[i] = true);
                    products.push(t);
                }
            }
        }
        for v in sys.constraints().keys() {
            relevant[index[v]] = true;
        }
        Search {
            spec: sys.spec(),
            allowed: vars.iter().map(|v| sys.constraints().get(v)).collect(),
            primary: vars.iter().map(|v| sys.primary().contains(v)).collect(),
            vars,
            consts,
            products,
            relevant,
            gamma,
            max_len,
            assignments: 0,
            domains: HashMap::new(),
        }
    }

    fn set(&self, state: &mut State<L>, v: usize, t: Trace<L>) -> Result<bool, ()> {
        if let Some(cur) = &state[v] {
            return if *cur == t { Ok(false) } else { Err(()) };
        }
        if self.primary[v] && t.len() > self.max_len {
            return Err(());
        }
        if self.allowed[v].is_some_and(|a| !t.within(a)) {
            return Err(());
        }
        state[v] = Some(t);
        Ok(true)
    }

    fn propagate(&self, state: &mut State<L>) -> bool {
        loop {
            let mut changed = false;
            for &[x, y, z] in &self.products {
                let step = match (&state[x], &state[y], &state[z]) {
                    (Some(a), Some(b), Some(c)) => {
                        if a.len() + b.len() != c.len() || a.concat_unchecked(b) != *c {
                            return false;
                        }
                        continue;
                    }
                    (Some(a), Some(b), None) => (z, Some(a.concat_unchecked(b))),
                    (Some(a), None, Some(c)) => (y, a.left_divide(c)),
                    (None, Some(b), Some(c)) => (x, b.right_divide(c)),
                    _ => continue,
                };
                match step {
                    (v, Some(t)) => match self.set(state, v, t) {
                        Ok(c) => changed |= c,
                        Err(()) => return false,
                    },
                    (_, None) => return false,
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn domain(&mut self, v: usize) -> Arc<Vec<Trace<L>>> {
        let letters: BTreeSet<L> = match self.allowed[v] {
            Some(a) => a.intersection(self.gamma).cloned().collect(),
            None => self.gamma.iter().cloned().collect(),
        };
        let (spec, max_len) = (self.spec, self.max_len);
        self.domains
            .entry(letters)
            .or_insert_with_key(|letters| Arc::new(enumerate(letters, max_len, spec).collect()))
            .clone()
    }

    fn start(&mut self) -> Option<State<L>> {
        let mut state: State<L> = vec![None; self.vars.len()];
        for (v, u) in &self.consts {
            self.set(&mut state, *v, u.clone()).ok()?;
        }
        let mut found = self.search(state)?;
        for slot in found.iter_mut() {
            slot.get_or_insert_with(|| Trace::empty(self.spec));
        }
        Some(found)
    }

    fn search(&mut self, mut state: State<L>) -> Option<State<L>> {
        if !self.propagate(&mut state) {
            return None;
        }
        let split = self
            .products
            .iter()
            .find(|p| state[p[2]].is_some() && state[p[0]].is_none() && state[p[1]].is_none())
            .copied();
        if let Some([x, _, z]) = split {
            let whole = state[z].clone().expect("checked");
            for p in whole.prefixes() {
                self.assignments += 1;
                let mut next = state.clone();
                if self.set(&mut next, x, p).is_ok() {
                    if let Some(done) = self.search(next) {
                        return Some(done);
                    }
                }
            }
            return None;
        }
        let open = |v: &usize| self.relevant[*v] && state[*v].is_none();
        let pick = (0..self.vars.len())
            .filter(open)
            .find(|v| self.primary[*v])
            .or_else(|| (0..self.vars.len()).find(open));
        let Some(v) = pick else {
            return Some(state);
        };
        for t in self.domain(v).iter() {
            self.assignments += 1;
            let mut next = state.clone();
            if self.set(&mut next, v, t.clone()).is_ok() {
                if let Some(done) = self.search(next) {
                    return Some(done);
                }
            }
        }
        None
    }
}

/// Searches one instance with formula variables of length at most
/// `max_len`, returning the full assignment.
fn search_instance<L: Letter>(
    inst: &Instance<L>,
    max_len: usize,
) -> (Option<BTreeMap<Var, Trace<L>>>, u64) {
    let mut search = Search::new(&inst.system, &inst.gamma, max_len);
    let found = search.start().map(|state| {
        search
            .vars
            .iter()
            .cloned()
            .zip(state.into_iter().map(|t| t.expect("filled")))
            .collect::<BTreeMap<_, _>>()
    });
    (found, search.assignments)
}

pub fn solve_instance<L: Letter>(inst: &Instance<L>, bound: usize) -> SolverResult<L> {
    let mut stats = Stats {
        assignments: 0,
        instances: 1,
    };
    for k in 0..=bound {
        let (found, tried) = search_instance(inst, k);
        stats.assignments += tried;
        if let Some(assignment) = found {
            assert!(inst.system.holds(&assignment), "witness violates the instance");
            return SolverResult {
                outcome: Outcome::Sat(assignment),
                stats,
            };
        }
    }
    SolverResult {
        outcome: Outcome::UnsatUpTo(bound),
        stats,
    }
}

/// Flattened systems and their deduplicated instances, in search order.
pub struct Pipeline<L: Letter> {
    pub systems: Vec<SimpleSystem<L>>,
    /// Each instance with the index of the system it came from.
    pub instances: Vec<(usize, Instance<L>)>,
}

pub fn pipeline<A: Alphabet>(f: &Formula<Trace<A::Letter>>, alphabet: &A) -> Pipeline<A::Letter> {
    let spec = alphabet.spec();
    let mut systems = Vec::new();
    let mut instances = Vec::new();
    let mut seen = HashSet::new();
    for conjunct in to_dnf(f.body()) {
        for sys in flatten(&conjunct, f.vars(), spec) {
            let idx = systems.len();
            for inst in reduce_all(&sys, alphabet) {
                if seen.insert(inst.fingerprint()) {
                    instances.push((idx, inst));
                }
            }
            systems.push(sys);
        }
    }
    Pipeline { systems, instances }
}

pub fn solve<A: Alphabet>(
    f: &Formula<Trace<A::Letter>>,
    alphabet: &A,
    bound: usize,
) -> SolverResult<A::Letter> {
    solve_with(f, alphabet, SolveOptions::new(bound))
}

pub fn solve_with<A: Alphabet>(
    f: &Formula<Trace<A::Letter>>,
    alphabet: &A,
    options: SolveOptions,
) -> SolverResult<A::Letter> {
    let Pipeline { systems, instances } = pipeline(f, alphabet);
    let mut stats = Stats {
        assignments: 0,
        instances: instances.len(),
    };
    for k in 0..=options.bound {
        let hit = if options.parallel {
            let results: Vec<_> = instances
                .par_iter()
                .map(|(_, inst)| search_instance(inst, k))
                .collect();
            stats.assignments += results.iter().map(|r| r.1).sum::<u64>();
            results
                .into_iter()
                .enumerate()
                .find_map(|(i, (found, _))| found.map(|a| (i, a)))
        } else {
            let mut hit = None;
            for (i, (_, inst)) in instances.iter().enumerate() {
                let (found, tried) = search_instance(inst, k);
                stats.assignments += tried;
                if let Some(a) = found {
                    hit = Some((i, a));
                    break;
                }
            }
            hit
        };
        if let Some((i, assignment)) = hit {
            let (src, inst) = &instances[i];
            let source = &systems[*src];
            assert!(inst.system.holds(&assignment), "witness violates the instance");
            assert!(source.holds(&assignment), "witness violates the flattened system");
            let witness = restore(f.vars(), source, &assignment, alphabet.spec());
            assert!(f.holds(&witness, alphabet.spec()), "witness violates the formula");
            return SolverResult {
                outcome: Outcome::Sat(witness),
                stats,
            };
        }
    }
    SolverResult {
        outcome: Outcome::UnsatUpTo(options.bound),
        stats,
    }
}

/// Values of the formula's variables, following eliminated aliases.
fn restore<L: Letter>(
    vars: &[Var],
    sys: &SimpleSystem<L>,
    assignment: &BTreeMap<Var, Trace<L>>,
    spec: &Arc<AlphabetSpec>,
) -> BTreeMap<Var, Trace<L>> {
    vars.iter()
        .map(|v| {
            let rep = sys.aliases().get(v).unwrap_or(v);
            let value = assignment.get(rep).cloned().unwrap_or_else(|| Trace::empty(spec));
            (v.clone(), value)
        })
        .collect()
}

/// Brute force over the formula itself, with the letters of its constants
/// plus `4 × #inequalities` unused letters per class.
pub fn solve_direct<A: Alphabet>(
    f: &Formula<Trace<A::Letter>>,
    alphabet: &A,
    bound: usize,
) -> SolverResult<A::Letter> {
    let spec = alphabet.spec();
    let delta = f.constants_alphabet();
    let k = 4 * f.inequality_count();
    let fresh: Vec<Vec<A::Letter>> = (1..=spec.classes())
        .map(|c| alphabet.fresh_letters(c, &delta, k))
        .collect();
    let mut vars: Vec<Var> = f.vars().to_vec();
    vars.sort();
    let mut direct = Direct {
        f,
        spec,
        delta: delta.into_iter().collect(),
        fresh,
        vars,
        max_len: 0,
        assignments: 0,
        words: Vec::new(),
    };
    for max_len in 0..=bound {
        direct.max_len = max_len;
        let mut used = vec![0; spec.classes()];
        if let Some(witness) = direct.var(&mut used) {
            assert!(f.holds(&witness, spec), "witness violates the formula");
            return SolverResult {
                outcome: Outcome::Sat(witness),
                stats: Stats {
                    assignments: direct.assignments,
                    instances: 0,
                },
            };
        }
    }
    SolverResult {
        outcome: Outcome::UnsatUpTo(bound),
        stats: Stats {
            assignments: direct.assignments,
            instances: 0,
        },
    }
}

struct Direct<'a, L: Letter> {
    f: &'a Formula<Trace<L>>,
    spec: &'a Arc<AlphabetSpec>,
    delta: Vec<L>,
    fresh: Vec<Vec<L>>,
    vars: Vec<Var>,
    max_len: usize,
    assignments: u64,
    words: Vec<Vec<L>>,
}

impl<L: Letter> Direct<'_, L> {
    fn var(&mut self, used: &mut Vec<usize>) -> Option<BTreeMap<Var, Trace<L>>> {
        if self.words.len() == self.vars.len() {
            self.assignments += 1;
            let assignment: BTreeMap<Var, Trace<L>> = self
                .vars
                .iter()
                .zip(&self.words)
                .map(|(v, w)| (v.clone(), Trace::from_word_unchecked(w.clone(), self.spec)))
                .collect();
            return self.f.holds(&assignment, self.spec).then_some(assignment);
        }
        for len in 0..=self.max_len {
            self.words.push(Vec::with_capacity(len));
            let found = self.letter(len, used);
            self.words.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Extends the last word; fresh letters of a class appear in index order.
    fn letter(&mut self, len: usize, used: &mut Vec<usize>) -> Option<BTreeMap<Var, Trace<L>>> {
        if self.words.last().expect("open word").len() == len {
            return self.var(used);
        }
        let mut options: Vec<(L, Option<usize>)> =
            self.delta.iter().map(|a| (a.clone(), None)).collect();
        for (c, pool) in self.fresh.iter().enumerate() {
            options.extend(pool[..used[c]].iter().map(|a| (a.clone(), None)));
            if used[c] < pool.len() {
                options.push((pool[used[c]].clone(), Some(c)));
            }
        }
        for (a, opens) in options {
            if let Some(c) = opens {
                used[c] += 1;
            }
            self.words.last_mut().expect("open word").push(a);
            let found = self.letter(len, used);
            self.words.last_mut().expect("open word").pop();
            if let Some(c) = opens {
                used[c] -= 1;
            }
            if found.is_some() {
                return found;
            }
        }
        None
    }
}
