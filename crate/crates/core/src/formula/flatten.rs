use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{to_dnf, Atom, Expr, Factor, Negative, Positive, SimpleSystem, Term, Var, FRESH_PREFIX};
use crate::trace::{AlphabetSpec, Letter, Trace};

/// Flattens one conjunction of atoms into simple systems, one per
/// disjunct produced by `t ≠ 1` for products `t`. Unsatisfiable disjuncts
/// detected on the way are dropped, so the result may be empty.
pub fn flatten<L: Letter>(
    conjunct: &[Atom<Trace<L>>],
    user_vars: &[Var],
    spec: &Arc<AlphabetSpec>,
) -> Vec<SimpleSystem<L>> {
    let atoms: Vec<Atom<Trace<L>>> = conjunct.iter().map(normalize_atom).collect();
    if let Some(i) = atoms.iter().position(is_product_ne_one) {
        let (l, r) = atoms[i].sides();
        let product = if l.0.is_empty() { r } else { l };
        let options = Expr::Or(
            product
                .0
                .iter()
                .map(|f| Expr::Atom(Atom::Ne(Term(vec![f.clone()]), Term::unit())))
                .collect(),
        );
        let parts: Vec<Expr<Trace<L>>> = atoms
            .iter()
            .enumerate()
            .map(|(j, a)| if j == i { options.clone() } else { Expr::Atom(a.clone()) })
            .collect();
        return to_dnf(&Expr::And(parts))
            .iter()
            .flat_map(|c| flatten(c, user_vars, spec))
            .collect();
    }
    build(&atoms, user_vars, spec).into_iter().collect()
}

fn is_product_ne_one<L: Letter>(a: &Atom<Trace<L>>) -> bool {
    match a {
        Atom::Ne(l, r) => {
            (l.0.is_empty() && r.0.len() >= 2) || (r.0.is_empty() && l.0.len() >= 2)
        }
        Atom::Eq(..) => false,
    }
}

/// Drops unit constants and merges adjacent constants.
fn normalize<L: Letter>(t: &Term<Trace<L>>) -> Term<Trace<L>> {
    let mut out: Vec<Factor<Trace<L>>> = Vec::new();
    for f in &t.0 {
        match f {
            Factor::Const(u) if u.is_empty() => {}
            Factor::Const(u) => match out.last_mut() {
                Some(Factor::Const(prev)) => *prev = prev.concat_unchecked(u),
                _ => out.push(f.clone()),
            },
            Factor::Var(_) => out.push(f.clone()),
        }
    }
    Term(out)
}

fn normalize_atom<L: Letter>(a: &Atom<Trace<L>>) -> Atom<Trace<L>> {
    match a {
        Atom::Eq(l, r) => Atom::Eq(normalize(l), normalize(r)),
        Atom::Ne(l, r) => Atom::Ne(normalize(l), normalize(r)),
    }
}

fn constant_value<L: Letter>(t: &Term<Trace<L>>, spec: &Arc<AlphabetSpec>) -> Trace<L> {
    t.0.iter().fold(Trace::empty(spec), |acc, f| match f {
        Factor::Const(u) => acc.concat_unchecked(u),
        Factor::Var(_) => unreachable!("constant-only term"),
    })
}

/// `x = u` or `x = 1` read directly off the atom.
fn var_const<L: Letter>(
    l: &Term<Trace<L>>,
    r: &Term<Trace<L>>,
    spec: &Arc<AlphabetSpec>,
) -> Option<(Var, Trace<L>)> {
    match (l.0.as_slice(), r.0.as_slice()) {
        ([Factor::Var(x)], []) => Some((x.clone(), Trace::empty(spec))),
        ([Factor::Var(x)], [Factor::Const(u)]) => Some((x.clone(), u.clone())),
        _ => None,
    }
}

/// Replaces constants by fresh variables pinned to them.
fn extract<L: Letter>(t: &Term<Trace<L>>, sys: &mut SimpleSystem<L>) -> Vec<Var> {
    t.0.iter()
        .map(|f| match f {
            Factor::Var(v) => v.clone(),
            Factor::Const(u) => {
                let x = sys.fresh_var();
                sys.push_positive(Positive::Const(x.clone(), u.clone()));
                x
            }
        })
        .collect()
}

fn side<L: Letter>(vars: &[Var], sys: &mut SimpleSystem<L>) -> Var {
    if let [only] = vars {
        return only.clone();
    }
    let z = sys.fresh_var();
    sys.push_product_chain(&z, vars);
    z
}

fn build<L: Letter>(
    atoms: &[Atom<Trace<L>>],
    user_vars: &[Var],
    spec: &Arc<AlphabetSpec>,
) -> Option<SimpleSystem<L>> {
    let mut sys = SimpleSystem::new(spec, user_vars);
    let mut equal: Vec<(Var, Var)> = Vec::new();
    for atom in atoms {
        let (l, r) = atom.sides();
        let positive = atom.is_equation();
        if l.vars().next().is_none() && r.vars().next().is_none() {
            if (constant_value(l, spec) == constant_value(r, spec)) != positive {
                return None;
            }
            continue;
        }
        if positive {
            if let Some((x, u)) = var_const(l, r, spec).or_else(|| var_const(r, l, spec)) {
                sys.push_positive(Positive::Const(x, u));
                continue;
            }
        }
        let lv = extract(l, &mut sys);
        let rv = extract(r, &mut sys);
        match (positive, lv.is_empty(), rv.is_empty()) {
            (true, true, _) | (true, _, true) => {
                for y in lv.iter().chain(&rv) {
                    sys.push_positive(Positive::Const(y.clone(), Trace::empty(spec)));
                }
            }
            (true, false, false) => {
                let a = side(&lv, &mut sys);
                let b = side(&rv, &mut sys);
                equal.push((a, b));
            }
            (false, true, _) | (false, _, true) => {
                let only = lv.iter().chain(&rv).next().expect("one side has a variable");
                sys.push_negative(Negative::NotOne(only.clone()));
            }
            (false, false, false) => {
                let a = side(&lv, &mut sys);
                let b = side(&rv, &mut sys);
                sys.push_negative(Negative::Distinct(a, b));
            }
        }
    }
    substitute(sys, &equal)
}

/// Representatives prefer user variables, then shorter and smaller names.
fn rep_key(v: &str) -> (bool, usize, &str) {
    (v.starts_with(FRESH_PREFIX), v.len(), v)
}

fn find(parent: &BTreeMap<Var, Var>, v: &Var) -> Var {
    let mut cur = v;
    while let Some(p) = parent.get(cur) {
        cur = p;
    }
    cur.clone()
}

fn substitute<L: Letter>(mut sys: SimpleSystem<L>, equal: &[(Var, Var)]) -> Option<SimpleSystem<L>> {
    let mut parent: BTreeMap<Var, Var> = BTreeMap::new();
    for (a, b) in equal {
        let (ra, rb) = (find(&parent, a), find(&parent, b));
        if ra == rb {
            continue;
        }
        let (keep, drop) = if rep_key(&ra) <= rep_key(&rb) { (ra, rb) } else { (rb, ra) };
        parent.insert(drop, keep);
    }
    let rename = |v: &Var| find(&parent, v);

    let mut consts: BTreeMap<Var, Trace<L>> = BTreeMap::new();
    let mut positive = Vec::new();
    let mut seen = BTreeSet::new();
    for p in &sys.positive {
        let p = match p {
            Positive::Const(x, u) => {
                let x = rename(x);
                if let Some(prev) = consts.get(&x) {
                    if prev != u {
                        return None;
                    }
                }
                consts.insert(x.clone(), u.clone());
                Positive::Const(x, u.clone())
            }
            Positive::Product(x, y, z) => Positive::Product(rename(x), rename(y), rename(z)),
        };
        if seen.insert(p.clone()) {
            positive.push(p);
        }
    }
    let mut negative = Vec::new();
    let mut seen = BTreeSet::new();
    for n in &sys.negative {
        let n = match n {
            Negative::NotOne(x) => {
                let x = rename(x);
                if consts.get(&x).is_some_and(|u| u.is_empty()) {
                    return None;
                }
                Negative::NotOne(x)
            }
            Negative::Distinct(x, y) => {
                let (x, y) = (rename(x), rename(y));
                if x == y {
                    return None;
                }
                Negative::Distinct(x, y)
            }
        };
        if seen.insert(n.clone()) {
            negative.push(n);
        }
    }

    let users: Vec<Var> = sys.primary.iter().cloned().collect();
    sys.primary.clear();
    for u in users {
        let r = rename(&u);
        debug_assert!(!r.starts_with(FRESH_PREFIX));
        if r != u {
            sys.aliases.insert(u, r.clone());
        }
        sys.primary.insert(r);
    }
    sys.positive = Vec::new();
    sys.negative = Vec::new();
    sys.variables = sys.primary.clone();
    for p in positive {
        sys.push_positive(p);
    }
    for n in negative {
        sys.push_negative(n);
    }
    Some(sys)
}
