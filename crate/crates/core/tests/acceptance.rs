//! Acceptance suite. Runs every criterion, prints one line each and exits
//! nonzero if any fails.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use trace_ord::formula::{flatten, to_dnf};
use trace_ord::ordinal::Ordinal;
use trace_ord::primes::factor;
use trace_ord::solver::{solve, solve_direct};
use trace_ord::successor::{encode, parse_sentence, solve_sentence, OrdinalOutcome, SuccessorAlphabet};
use trace_ord::trace::{diff_witness, Alphabet, AlphabetSpec, DiffWitness, Symbol, Trace};

use common::*;

const SEED: u64 = 0x7ace_0bd1;

const C1_MIN_PAIRS: usize = 10_000;
const C1_MAX_CLASSES: usize = 3;
const C1_MAX_LETTERS: usize = 4;
const C1_MAX_LEN: usize = 6;
const C1_LIMIT: Duration = Duration::from_secs(60);

const C2_LETTERS: usize = 3;
const C2_MAX_LEN: usize = 5;

const C3_FORMULAS: usize = 500;
const C3_BOUND: usize = 4;

const C4_BOUND: usize = 3;
const C4_LIMIT: Duration = Duration::from_secs(300);

const C5_TRIPLES: usize = 1_000;
const C5_DEPTH: usize = 3;

const C6_SAMPLES: usize = 1_000;
const C6_DEPTH: usize = 3;

const C7_BOUND: usize = 4;
const C7_LIMIT: Duration = Duration::from_secs(5);

struct Report {
    ok: bool,
    detail: String,
}

fn report(ok: bool, detail: String) -> Report {
    Report { ok, detail }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn random_word(rng: &mut StdRng, letters: &[Symbol], len: usize) -> Vec<Symbol> {
    (0..len).map(|_| letters[rng.gen_range(0..letters.len())].clone()).collect()
}

fn trace_equality() -> Report {
    let mut rng = StdRng::seed_from_u64(SEED);
    let start = Instant::now();
    let (mut pairs, mut disagreements, mut equal_pairs) = (0, 0, 0);
    let names = ["a", "b", "c", "d"];
    while pairs < C1_MIN_PAIRS {
        let classes = rng.gen_range(1..=C1_MAX_CLASSES);
        let n = rng.gen_range(1..=C1_MAX_LETTERS);
        let letters: Vec<Symbol> = names[..n]
            .iter()
            .map(|name| Symbol::named(name, rng.gen_range(1..=classes)))
            .collect();
        let mut independent = Vec::new();
        for i in 1..=classes {
            for j in i..=classes {
                if rng.gen_bool(0.5) {
                    independent.push((i, j));
                }
            }
        }
        let spec = Arc::new(AlphabetSpec::new(classes, independent).unwrap());
        for _ in 0..50 {
            let len = rng.gen_range(0..=C1_MAX_LEN);
            let u = random_word(&mut rng, &letters, len);
            let class = closure(&u, &spec);
            let v = match rng.gen_range(0..4) {
                0 => {
                    let all: Vec<_> = class.iter().collect();
                    all[rng.gen_range(0..all.len())].clone()
                }
                1 if len >= 2 => {
                    let mut v = u.clone();
                    let i = rng.gen_range(0..len - 1);
                    v.swap(i, i + 1);
                    v
                }
                2 => {
                    let mut v = u.clone();
                    v.shuffle(&mut rng);
                    v
                }
                _ => {
                    let len = rng.gen_range(0..=C1_MAX_LEN);
                    random_word(&mut rng, &letters, len)
                }
            };
            let expected = class.contains(&v);
            let tu = Trace::from_word(u, &spec).unwrap();
            let tv = Trace::from_word(v, &spec).unwrap();
            pairs += 1;
            equal_pairs += expected as usize;
            if tu.equal(&tv).unwrap() != expected {
                disagreements += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        disagreements == 0 && elapsed < C1_LIMIT,
        format!(
            "{pairs} pairs ({equal_pairs} equivalent), {disagreements} disagreements, {} (limit {})",
            secs(elapsed),
            secs(C1_LIMIT)
        ),
    )
}

/// Commutation classes of all words up to a length, with their members.
struct Classes {
    id: HashMap<Vec<Symbol>, usize>,
    members: Vec<Vec<Vec<Symbol>>>,
}

impl Classes {
    fn new(letters: &[Symbol], max_len: usize, spec: &AlphabetSpec) -> Self {
        let mut id = HashMap::new();
        let mut members = Vec::new();
        for w in all_words(letters, max_len) {
            if id.contains_key(&w) {
                continue;
            }
            let class: Vec<Vec<Symbol>> = closure(&w, spec).into_iter().collect();
            for m in &class {
                id.insert(m.clone(), members.len());
            }
            members.push(class);
        }
        Classes { id, members }
    }

    fn same(&self, word: &[Symbol], t: &Trace<Symbol>) -> bool {
        self.id.get(word).is_some_and(|&i| Some(&i) == self.id.get(t.word()))
    }

    fn strict_prefix(&self, p: &Trace<Symbol>, q: &Trace<Symbol>) -> bool {
        p.len() < q.len()
            && self.members[self.id[q.word()]]
                .iter()
                .any(|w| self.same(&w[..p.len()], p))
    }
}

fn cat(parts: &[&[Symbol]]) -> Vec<Symbol> {
    parts.concat()
}

fn witness_verifies(w: &DiffWitness<Symbol>, u: &Trace<Symbol>, v: &Trace<Symbol>, cl: &Classes, spec: &AlphabetSpec) -> bool {
    let equivalent = cl.same(u.word(), v);
    match w {
        DiffWitness::Equal => equivalent,
        DiffWitness::StrictPrefix { swapped } => {
            let (p, q) = if *swapped { (v, u) } else { (u, v) };
            !equivalent && cl.strict_prefix(p, q)
        }
        DiffWitness::Separated { w, a, b, w1, w2, w3, swapped } => {
            let (p, q) = if *swapped { (v, u) } else { (u, v) };
            let one = std::slice::from_ref(a);
            !equivalent
                && cl.same(&cat(&[w.word(), one, w1.word()]), p)
                && cl.same(&cat(&[w.word(), w2.word(), one, w3.word()]), q)
                && !w2.contains(a)
                && w2.contains(b)
                && a != b
                && !spec.commute(a, b)
        }
        DiffWitness::Missing { w, a, w1, w2, swapped } => {
            let (p, q) = if *swapped { (v, u) } else { (u, v) };
            !equivalent
                && cl.same(&cat(&[w.word(), std::slice::from_ref(a), w1.word()]), p)
                && cl.same(&cat(&[w.word(), w2.word()]), q)
                && !w2.contains(a)
        }
    }
}

fn witness_totality() -> Report {
    let start = Instant::now();
    let names = ["a", "b", "c"];
    // Class assignments up to swapping the two classes.
    let assignments: [[usize; C2_LETTERS]; 3] = [[1, 2, 2], [1, 1, 2], [1, 2, 1]];
    let pair_sets: Vec<Vec<(usize, usize)>> = (0..8u8)
        .map(|m| {
            [(1, 1), (1, 2), (2, 2)]
                .into_iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| p)
                .collect()
        })
        .collect();
    let alphabets: Vec<_> = assignments
        .iter()
        .flat_map(|a| pair_sets.iter().map(move |p| (a, p)))
        .collect();
    let results: Vec<(usize, usize, usize)> = alphabets
        .par_iter()
        .map(|(assignment, pairs)| {
            let spec = Arc::new(AlphabetSpec::new(2, pairs.iter().copied()).unwrap());
            let letters: Vec<Symbol> = names
                .iter()
                .zip(assignment.iter())
                .map(|(n, &c)| Symbol::named(n, c))
                .collect();
            let cl = Classes::new(&letters, C2_MAX_LEN, &spec);
            let traces = traces_upto(&letters, C2_MAX_LEN, &spec);
            let (mut checked, mut failures) = (0, 0);
            for u in &traces {
                for v in &traces {
                    checked += 1;
                    let ok = diff_witness(u, v).is_ok_and(|w| witness_verifies(&w, u, v, &cl, &spec));
                    failures += !ok as usize;
                }
            }
            (checked, failures, traces.len())
        })
        .collect();
    let checked: usize = results.iter().map(|r| r.0).sum();
    let failures: usize = results.iter().map(|r| r.1).sum();
    report(
        failures == 0,
        format!(
            "{} alphabets, {checked} trace pairs, {failures} failures, {}",
            alphabets.len(),
            secs(start.elapsed())
        ),
    )
}

fn flattening() -> Report {
    let start = Instant::now();
    let cases = corpus(&mut StdRng::seed_from_u64(SEED), C3_FORMULAS);
    let outcomes: Vec<(bool, usize)> = cases
        .par_iter()
        .map(|case| {
            let spec = case.alphabet.spec();
            let letters: Vec<Symbol> = case.alphabet.letters().cloned().collect();
            let domain = traces_upto(&letters, C3_BOUND, spec);
            let vars = case.formula.vars();
            let mut agree = true;
            let mut sat = 0;
            for conj in to_dnf(case.formula.body()) {
                let original = brute_conjunct(&conj, vars, &domain, spec);
                let flat = flatten(&conj, vars, spec).iter().any(|s| brute_system(s, &domain));
                agree &= original == flat;
                sat += original as usize;
            }
            (agree, sat.min(1))
        })
        .collect();
    let disagreements = outcomes.iter().filter(|o| !o.0).count();
    let sat: usize = outcomes.iter().map(|o| o.1).sum();
    report(
        disagreements == 0,
        format!(
            "{} formulas ({sat} satisfiable), {disagreements} disagreements, {}",
            cases.len(),
            secs(start.elapsed())
        ),
    )
}

fn reduction() -> Report {
    let start = Instant::now();
    let cases = corpus(&mut StdRng::seed_from_u64(SEED), C3_FORMULAS);
    let outcomes: Vec<(bool, bool)> = cases
        .par_iter()
        .map(|case| {
            let full = solve(&case.formula, &case.alphabet, C4_BOUND).is_sat();
            let direct = solve_direct(&case.formula, &case.alphabet, C4_BOUND).is_sat();
            (full == direct, full)
        })
        .collect();
    let elapsed = start.elapsed();
    let mismatched: Vec<&str> = outcomes
        .iter()
        .zip(&cases)
        .filter(|(o, _)| !o.0)
        .map(|(_, c)| c.text.as_str())
        .collect();
    let sat = outcomes.iter().filter(|o| o.1).count();
    let mut detail = format!(
        "{} formulas ({sat} satisfiable), {} disagreements, {} (limit {})",
        cases.len(),
        mismatched.len(),
        secs(elapsed),
        secs(C4_LIMIT)
    );
    if let Some(first) = mismatched.first() {
        detail.push_str(&format!("; first: {first}"));
    }
    report(mismatched.is_empty() && elapsed < C4_LIMIT, detail)
}

fn ordinal_algebra() -> Report {
    let mut rng = StdRng::seed_from_u64(SEED);
    let start = Instant::now();
    let bound = Ordinal::omega_pow(Ordinal::omega_pow(Ordinal::from(3)));
    let (mut failures, mut out_of_range, mut cancellations) = (0, 0, 0);
    for _ in 0..C5_TRIPLES {
        let [a, b, c] = [0; 3].map(|_| random_ordinal(&mut rng, C5_DEPTH));
        out_of_range += [&a, &b, &c].iter().filter(|x| **x >= &bound).count();
        let assoc = &(&a * &b) * &c == &a * &(&b * &c);
        let distrib = &a * &(&b + &c) == &(&a * &b) + &(&a * &c);
        // Cancellation is also exercised on a forced equal product.
        let cancel = [(&b, &c), (&b, &b)].iter().all(|(x, y)| {
            if a.is_zero() || &a * *x != &a * *y {
                return true;
            }
            cancellations += 1;
            x == y
        });
        failures += !(assoc && distrib && cancel) as usize;
    }
    report(
        failures == 0 && out_of_range == 0,
        format!(
            "{C5_TRIPLES} triples, {cancellations} cancellations checked, {failures} failures, {}",
            secs(start.elapsed())
        ),
    )
}

fn factorization() -> Report {
    let mut rng = StdRng::seed_from_u64(SEED);
    let start = Instant::now();
    let bound = Ordinal::omega_pow(Ordinal::omega_pow(Ordinal::from(3)));
    let alphabet = SuccessorAlphabet::new(bound.clone()).unwrap();
    let (mut limits, mut round_trip_failures) = (0, 0);
    let mut samples = 0;
    while samples < C6_SAMPLES {
        let a = if rng.gen_bool(0.5) {
            random_ordinal(&mut rng, C6_DEPTH)
        } else {
            random_successor(&mut rng, C6_DEPTH)
        };
        if a.is_zero() {
            continue;
        }
        samples += 1;
        limits += a.is_limit() as usize;
        if factor(&a).map(|f| f.evaluate()) != Ok(a.clone()) || a >= bound {
            round_trip_failures += 1;
        }
    }
    let mut encode_failures = 0;
    for _ in 0..C6_SAMPLES {
        let a = random_successor(&mut rng, C6_DEPTH);
        let b = random_successor(&mut rng, C6_DEPTH);
        let ok = match (encode(&(&a * &b), &alphabet), encode(&a, &alphabet), encode(&b, &alphabet)) {
            (Ok(ab), Ok(ea), Ok(eb)) => ea.concat(&eb).is_ok_and(|t| t == ab),
            _ => false,
        };
        encode_failures += !ok as usize;
    }
    report(
        round_trip_failures == 0 && encode_failures == 0,
        format!(
            "{samples} round trips ({limits} limits), {round_trip_failures} failures; \
             {C6_SAMPLES} products encoded, {encode_failures} failures; {}",
            secs(start.elapsed())
        ),
    )
}

fn sentences() -> Report {
    let cases: [(&str, Option<u64>); 3] = [
        ("EX x . x*x = 4", Some(2)),
        ("EX x . 2*x = x", None),
        ("EX x . (w+1)*x = w*2+1", Some(2)),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (src, expected) in cases {
        let start = Instant::now();
        let outcome = parse_sentence(src)
            .ok()
            .and_then(|s| solve_sentence(&s, C7_BOUND).ok())
            .map(|r| r.outcome);
        let elapsed = start.elapsed();
        let want = match expected {
            Some(n) => OrdinalOutcome::Sat(BTreeMap::from([("x".to_owned(), Ordinal::from(n))])),
            None => OrdinalOutcome::UnsatUpTo(C7_BOUND),
        };
        let pass = outcome.as_ref() == Some(&want) && elapsed < C7_LIMIT;
        ok &= pass;
        let shown = match &outcome {
            Some(OrdinalOutcome::Sat(w)) => format!("SAT x = {}", w["x"]),
            Some(OrdinalOutcome::UnsatUpTo(n)) => format!("UNSAT-UP-TO({n})"),
            None => "error".to_owned(),
        };
        parts.push(format!("`{src}` -> {shown} in {}", secs(elapsed)));
    }
    report(ok, format!("{} (limit {} each)", parts.join("; "), secs(C7_LIMIT)))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Report); 7] = [
        ("trace equality matches commutation closure", trace_equality),
        ("difference witnesses are total and exact", witness_totality),
        ("flattening preserves satisfiability", flattening),
        ("reduction agrees with direct search", reduction),
        ("ordinal algebra laws", ordinal_algebra),
        ("factorization and encoding", factorization),
        ("end-to-end sentences", sentences),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let r = run();
        failed += !r.ok as usize;
        println!(
            "criterion {}: {} {name}: {}",
            i + 1,
            if r.ok { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}
