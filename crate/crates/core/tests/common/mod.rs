//! Brute-force oracles shared by the integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::HashMap;

use factorium::algebra::{Algebra, Element, Term};
use factorium::congruence::Congruence;
use factorium::fol::Formula;

/// Every partition of `{0..n}` as a restricted growth string.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for b in 0..=max + 1 {
            prefix.push(b);
            go(prefix, max.max(b), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return vec![vec![]];
    }
    go(&mut vec![0], 0, n, &mut out);
    out
}

/// Whether the partition `labels` is preserved by every operation, checked tuple by tuple.
pub fn compatible(a: &Algebra, labels: &[usize]) -> bool {
    let n = a.size();
    for op in 0..a.signature().len() {
        let m = a.signature().arity(op);
        let count = n.pow(m as u32);
        for i in 0..count {
            for j in 0..count {
                let (mut x, mut y) = (vec![0; m], vec![0; m]);
                let (mut ii, mut jj) = (i, j);
                for k in (0..m).rev() {
                    x[k] = ii % n;
                    y[k] = jj % n;
                    ii /= n;
                    jj /= n;
                }
                if (0..m).all(|k| labels[x[k]] == labels[y[k]]) && labels[a.apply(op, &x)] != labels[a.apply(op, &y)] {
                    return false;
                }
            }
        }
    }
    true
}

/// All congruences, by filtering every partition.
pub fn naive_congruences(a: &Algebra) -> Vec<Vec<usize>> {
    all_partitions(a.size()).into_iter().filter(|p| compatible(a, p)).collect()
}

/// `Cg(x, y)` as the meet of every congruence relating `x` and `y`.
pub fn naive_principal(cons: &[Vec<usize>], n: usize, x: Element, y: Element) -> Congruence {
    let mut related = vec![vec![true; n]; n];
    for p in cons.iter().filter(|p| p[x] == p[y]) {
        for i in 0..n {
            for j in 0..n {
                related[i][j] &= p[i] == p[j];
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| (0..n).find(|&j| related[i][j]).unwrap()).collect();
    Congruence::from_labels(&labels)
}

pub fn naive_term(a: &Algebra, t: &Term, env: &HashMap<String, Element>) -> Element {
    match t {
        Term::Var(v) => env[v],
        Term::App(f, args) => {
            let vals: Vec<Element> = args.iter().map(|s| naive_term(a, s, env)).collect();
            a.apply(a.op_index(f).unwrap(), &vals)
        }
    }
}

/// Direct recursive semantics: every subformula is evaluated, nothing cached.
pub fn naive_eval(a: &Algebra, f: &Formula, env: &mut HashMap<String, Element>) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(s, t) => naive_term(a, s, env) == naive_term(a, t, env),
        Formula::Not(g) => !naive_eval(a, g, env),
        Formula::And(gs) => gs.iter().map(|g| naive_eval(a, g, env)).fold(true, |x, y| x & y),
        Formula::Or(gs) => gs.iter().map(|g| naive_eval(a, g, env)).fold(false, |x, y| x | y),
        Formula::Implies(p, q) => {
            let (p, q) = (naive_eval(a, p, env), naive_eval(a, q, env));
            !p | q
        }
        Formula::Forall(v, g) | Formula::Exists(v, g) => {
            let saved = env.get(v).copied();
            let vals: Vec<bool> = a
                .elements()
                .map(|e| {
                    env.insert(v.clone(), e);
                    naive_eval(a, g, env)
                })
                .collect();
            match saved {
                Some(s) => env.insert(v.clone(), s),
                None => env.remove(v),
            };
            if matches!(f, Formula::Forall(..)) {
                vals.iter().all(|&b| b)
            } else {
                vals.iter().any(|&b| b)
            }
        }
    }
}

#[test]
fn bell_numbers() {
    let bell: Vec<usize> = (0..=6).map(|n| all_partitions(n).len()).collect();
    assert_eq!(bell, [1, 1, 2, 5, 15, 52, 203]);
}
