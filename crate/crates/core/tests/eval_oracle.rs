mod common;

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use factorium::algebra::{Algebra, Signature, Term};
use factorium::fol::{eval_formula, parse_formula, EvalConfig, Evaluator, Formula};

const VARS: [&str; 3] = ["x", "y", "u"];

fn random_algebra(rng: &mut ChaCha8Rng) -> Algebra {
    let sig = Signature::from_pairs(&[("f", 2), ("g", 1), ("c", 0)]).unwrap();
    let n = rng.gen_range(1..=4);
    let tables = vec![
        (0..n * n).map(|_| rng.gen_range(0..n)).collect(),
        (0..n).map(|_| rng.gen_range(0..n)).collect(),
        vec![rng.gen_range(0..n)],
    ];
    Algebra::new(sig, n, tables).unwrap()
}

fn random_term(rng: &mut ChaCha8Rng, depth: usize) -> Term {
    match rng.gen_range(0..if depth == 0 { 2 } else { 4 }) {
        0 => Term::var(VARS[rng.gen_range(0..3)]),
        1 => Term::constant("c"),
        2 => Term::app("g", vec![random_term(rng, depth - 1)]),
        _ => Term::binary("f", random_term(rng, depth - 1), random_term(rng, depth - 1)),
    }
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let leaf = depth == 0;
    match rng.gen_range(0..if leaf { 2 } else { 8 }) {
        0 | 1 => Formula::eq(random_term(rng, 2), random_term(rng, 2)),
        2 => Formula::not(random_formula(rng, depth - 1)),
        3 => Formula::And((0..rng.gen_range(0..3)).map(|_| random_formula(rng, depth - 1)).collect()),
        4 => Formula::Or((0..rng.gen_range(0..3)).map(|_| random_formula(rng, depth - 1)).collect()),
        5 => Formula::implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        6 => Formula::forall(VARS[rng.gen_range(0..3)], random_formula(rng, depth - 1)),
        _ => Formula::exists(VARS[rng.gen_range(0..3)], random_formula(rng, depth - 1)),
    }
}

#[test]
fn evaluator_agrees_with_naive_semantics() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for case in 0..1000 {
        let a = random_algebra(&mut rng);
        let f = random_formula(&mut rng, 4);
        let env: HashMap<String, usize> = VARS.iter().map(|v| (v.to_string(), rng.gen_range(0..a.size()))).collect();
        let expected = common::naive_eval(&a, &f, &mut env.clone());
        assert_eq!(eval_formula(&a, &f, &env), Ok(expected), "case {case}: {f}");

        let order: Vec<&str> = VARS.to_vec();
        let values: Vec<usize> = VARS.iter().map(|v| env[*v]).collect();
        let mut plain = Evaluator::new(&a, &f, &order, EvalConfig { memoize: false, ..Default::default() }).unwrap();
        assert_eq!(plain.eval(&values), Ok(expected), "case {case} without memo: {f}");
    }
}

#[test]
fn memo_survives_repeated_calls() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a = random_algebra(&mut rng);
        let f = random_formula(&mut rng, 4);
        let mut ev = Evaluator::new(&a, &f, &VARS, EvalConfig::default()).unwrap();
        for _ in 0..5 {
            let values: Vec<usize> = (0..3).map(|_| rng.gen_range(0..a.size())).collect();
            let mut env: HashMap<String, usize> = VARS.iter().map(|v| v.to_string()).zip(values.iter().copied()).collect();
            assert_eq!(ev.eval(&values), Ok(common::naive_eval(&a, &f, &mut env)));
        }
    }
}

#[test]
fn printed_formulas_reparse() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sig = Signature::from_pairs(&[("f", 2), ("g", 1), ("c", 0)]).unwrap();
    for _ in 0..300 {
        let f = random_formula(&mut rng, 4);
        assert_eq!(parse_formula(&f.to_string(), &sig).unwrap(), f);
    }
}
