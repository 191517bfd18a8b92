mod common;

use std::collections::BTreeSet;

use factorium::congruence::{all_congruences, generated_congruence, principal_congruence, Congruence};
use factorium::gallery::catalog;

use common::{naive_congruences, naive_principal};

#[test]
fn principal_congruences_match_partition_filter() {
    for join in [false, true] {
        for spec in catalog(6, join) {
            let a = spec.build().unwrap().algebra;
            let cons = naive_congruences(&a);
            for x in a.elements() {
                for y in a.elements() {
                    assert_eq!(principal_congruence(&a, x, y), naive_principal(&cons, a.size(), x, y), "{spec} Cg({x},{y})");
                }
            }
        }
    }
}

#[test]
fn lattices_match_partition_filter() {
    for join in [false, true] {
        for spec in catalog(6, join) {
            let a = spec.build().unwrap().algebra;
            let ours: BTreeSet<Congruence> = all_congruences(&a).unwrap().into_iter().collect();
            let theirs: BTreeSet<Congruence> = naive_congruences(&a).iter().map(|p| Congruence::from_labels(p)).collect();
            assert_eq!(ours, theirs, "{spec}");
        }
    }
}

#[test]
fn frozen_lattice_sizes() {
    let sizes = |join| -> Vec<usize> {
        (2..=6).map(|n| all_congruences(&factorium::gallery::build_l(n, join).unwrap()).unwrap().len()).collect()
    };
    assert_eq!(sizes(false), [2, 2, 3, 6, 16]);
    assert_eq!(sizes(true), [2, 2, 3, 5, 9]);
}

#[test]
fn generated_by_several_pairs_is_join_of_principals() {
    let a = factorium::gallery::build_l(5, false).unwrap();
    let pairs = [(0, 1), (3, 4)];
    let joined = principal_congruence(&a, 0, 1).join(&principal_congruence(&a, 3, 4)).unwrap();
    assert_eq!(generated_congruence(&a, &pairs), joined);
}
