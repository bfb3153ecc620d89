#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::Rng;

use trace_ord::formula::{parse_formula, Atom, Factor, Formula, Positive, SimpleSystem, Term, TraceSyntax, Var};
use trace_ord::ordinal::Ordinal;
use trace_ord::trace::{AlphabetSpec, Letter, NamedAlphabet, Symbol, Trace};

/// Every word obtained from `word` by swapping adjacent independent letters.
pub fn closure<L: Letter>(word: &[L], spec: &AlphabetSpec) -> BTreeSet<Vec<L>> {
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(word.to_vec());
    queue.push_back(word.to_vec());
    while let Some(w) = queue.pop_front() {
        for i in 0..w.len().saturating_sub(1) {
            if w[i] != w[i + 1] && spec.independent(w[i].class(), w[i + 1].class()) {
                let mut next = w.clone();
                next.swap(i, i + 1);
                if seen.insert(next.clone()) {
                    queue.push_back(next);
                }
            }
        }
    }
    seen
}

pub fn all_words<L: Clone>(letters: &[L], max_len: usize) -> Vec<Vec<L>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &level {
            for a in letters {
                let mut v: Vec<L> = w.clone();
                v.push(a.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

/// One word per commutation class, by brute force.
pub fn class_representatives<L: Letter>(letters: &[L], max_len: usize, spec: &AlphabetSpec) -> Vec<Vec<L>> {
    let mut seen: BTreeSet<Vec<L>> = BTreeSet::new();
    let mut reps = Vec::new();
    for w in all_words(letters, max_len) {
        if seen.contains(&w) {
            continue;
        }
        let c = closure(&w, spec);
        reps.push(c.iter().next().unwrap().clone());
        seen.extend(c);
    }
    reps
}

/// Alphabets with two letters `a`, `b` and at most two classes.
pub fn small_alphabet(kind: usize) -> NamedAlphabet {
    match kind % 5 {
        0 => NamedAlphabet::with_classes(&[&["a", "b"]], []),
        1 => NamedAlphabet::with_classes(&[&["a", "b"]], [(1, 1)]),
        2 => NamedAlphabet::with_classes(&[&["a"], &["b"]], []),
        3 => NamedAlphabet::with_classes(&[&["a"], &["b"]], [(1, 2)]),
        _ => NamedAlphabet::with_classes(&[&["a"], &["b"]], [(2, 2)]),
    }
    .unwrap()
}

fn random_term(rng: &mut StdRng, vars: &[&str]) -> String {
    let n = rng.gen_range(0..=3);
    if n == 0 {
        return "1".into();
    }
    let factors: Vec<String> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.6) {
                vars[rng.gen_range(0..vars.len())].to_owned()
            } else {
                let len = rng.gen_range(1..=2);
                (0..len).map(|_| if rng.gen_bool(0.5) { 'a' } else { 'b' }).collect()
            }
        })
        .collect();
    factors.join("*")
}

/// A formula with at most two variables, at most two inequalities and
/// constants of length at most two.
pub fn random_formula_text(rng: &mut StdRng) -> String {
    let vars: &[&str] = if rng.gen_bool(0.5) { &["x", "y"] } else { &["x"] };
    let atoms = rng.gen_range(1..=3);
    let mut inequalities = 0;
    let mut parts = Vec::new();
    for _ in 0..atoms {
        let ne = inequalities < 2 && rng.gen_bool(0.5);
        inequalities += ne as usize;
        let op = if ne { "!=" } else { "=" };
        parts.push(format!("{} {op} {}", random_term(rng, vars), random_term(rng, vars)));
    }
    let body = if parts.len() >= 2 && rng.gen_bool(0.3) {
        let first = parts.remove(0);
        format!("{first} & ({})", parts.join(" | "))
    } else {
        parts.join(" & ")
    };
    format!("EX {} . {body}", vars.join(" "))
}

pub struct Case {
    pub alphabet: NamedAlphabet,
    pub text: String,
    pub formula: Formula<Trace<Symbol>>,
}

pub fn corpus(rng: &mut StdRng, n: usize) -> Vec<Case> {
    (0..n)
        .map(|_| {
            let alphabet = small_alphabet(rng.gen_range(0..5));
            let text = random_formula_text(rng);
            let formula = parse_formula(&text, &TraceSyntax::new(&alphabet)).expect(&text);
            Case { alphabet, text, formula }
        })
        .collect()
}

/// Every trace over `letters` up to `max_len`, from raw words.
pub fn traces_upto<L: Letter>(letters: &[L], max_len: usize, spec: &Arc<AlphabetSpec>) -> Vec<Trace<L>> {
    let set: BTreeSet<Trace<L>> = all_words(letters, max_len)
        .into_iter()
        .map(|w| Trace::from_word(w, spec).unwrap())
        .collect();
    set.into_iter().collect()
}

fn eval_term(t: &Term<Trace<Symbol>>, env: &BTreeMap<Var, Trace<Symbol>>, spec: &Arc<AlphabetSpec>) -> Trace<Symbol> {
    t.factors().iter().fold(Trace::empty(spec), |acc, f| {
        let v = match f {
            Factor::Var(v) => env[v].clone(),
            Factor::Const(c) => c.clone(),
        };
        acc.concat(&v).unwrap()
    })
}

pub fn conjunct_holds(atoms: &[Atom<Trace<Symbol>>], env: &BTreeMap<Var, Trace<Symbol>>, spec: &Arc<AlphabetSpec>) -> bool {
    atoms.iter().all(|a| match a {
        Atom::Eq(l, r) => eval_term(l, env, spec) == eval_term(r, env, spec),
        Atom::Ne(l, r) => eval_term(l, env, spec) != eval_term(r, env, spec),
    })
}

fn assignments(vars: &[Var], domain: &[Trace<Symbol>]) -> Vec<BTreeMap<Var, Trace<Symbol>>> {
    let mut out = vec![BTreeMap::new()];
    for v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                domain.iter().map(move |t| {
                    let mut e = env.clone();
                    e.insert(v.clone(), t.clone());
                    e
                })
            })
            .collect();
    }
    out
}

/// Some assignment of `vars` from `domain` satisfies the conjunction.
pub fn brute_conjunct(
    atoms: &[Atom<Trace<Symbol>>],
    vars: &[Var],
    domain: &[Trace<Symbol>],
    spec: &Arc<AlphabetSpec>,
) -> bool {
    assignments(vars, domain).iter().any(|env| conjunct_holds(atoms, env, spec))
}

/// Some assignment of the primary variables from `domain`, with the other
/// variables computed forward from constants and products, satisfies `sys`.
pub fn brute_system(sys: &SimpleSystem<Symbol>, domain: &[Trace<Symbol>]) -> bool {
    let primary: Vec<Var> = sys.primary().iter().cloned().collect();
    assignments(&primary, domain).into_iter().any(|mut env| {
        loop {
            let mut changed = false;
            for p in sys.positive() {
                match p {
                    Positive::Const(x, u) => {
                        if !env.contains_key(x) {
                            env.insert(x.clone(), u.clone());
                            changed = true;
                        }
                    }
                    Positive::Product(x, y, z) => {
                        if let (Some(a), Some(b), false) = (env.get(x), env.get(y), env.contains_key(z)) {
                            let c = a.concat(b).unwrap();
                            env.insert(z.clone(), c);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for v in sys.variables() {
            env.entry(v.clone()).or_insert_with(|| Trace::empty(sys.spec()));
        }
        sys.holds(&env)
    })
}

fn random_exponent(rng: &mut StdRng, depth: usize) -> Ordinal {
    if depth <= 1 {
        return Ordinal::from(rng.gen_range(0..3u64));
    }
    random_ordinal(rng, depth)
}

/// A random ordinal of nesting depth at most `depth`; depth 3 stays below
/// `w^(w^3)`.
pub fn random_ordinal(rng: &mut StdRng, depth: usize) -> Ordinal {
    if depth <= 1 || rng.gen_bool(0.1) {
        return Ordinal::from(rng.gen_range(0..6u64));
    }
    let n = rng.gen_range(1..=3);
    let mut exps: Vec<Ordinal> = (0..n).map(|_| random_exponent(rng, depth - 1)).collect();
    exps.sort();
    exps.dedup();
    exps.reverse();
    let cnf: Vec<(Ordinal, BigUint)> = exps
        .into_iter()
        .map(|e| (e, BigUint::from(rng.gen_range(1..6u32))))
        .collect();
    Ordinal::from_cnf(cnf).unwrap()
}

/// A random nonzero successor of depth at most `depth`.
pub fn random_successor(rng: &mut StdRng, depth: usize) -> Ordinal {
    let a = random_ordinal(rng, depth);
    &a + &Ordinal::from(rng.gen_range(1..40u64))
}
