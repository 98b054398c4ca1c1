use proptest::prelude::*;
use weakval_core::contextuality::{
    parity_obstruction, search_assignments, Context, ContextTable, Sign,
};
use weakval_core::hilbert::{pauli_string, Axis};
use weakval_core::scenarios::{ghz_table, mermin_square_table};

/// Abstract table: the search only looks at names and signs, so every
/// observable can share one `±1` operator.
fn table(n_obs: usize, contexts: &[(Vec<usize>, bool)]) -> ContextTable {
    let z = pauli_string(&[(0, Axis::Z)], 1).unwrap();
    let observables = (0..n_obs).map(|i| z.clone().renamed(format!("o{i}"))).collect();
    let contexts = contexts
        .iter()
        .map(|(members, minus)| Context {
            members: members.clone(),
            required: if *minus { Sign::Minus } else { Sign::Plus },
        })
        .collect();
    ContextTable::new(observables, contexts).unwrap()
}

fn contexts(n_obs: usize) -> impl Strategy<Value = Vec<(Vec<usize>, bool)>> {
    let members = prop::sample::subsequence((0..n_obs).collect::<Vec<_>>(), 1..=n_obs.min(4));
    prop::collection::vec((members, any::<bool>()), 1..10)
}

fn random_table() -> impl Strategy<Value = (usize, Vec<(Vec<usize>, bool)>)> {
    (1usize..=10).prop_flat_map(|n| (Just(n), contexts(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn certificate_iff_unsatisfiable((n, ctxs) in random_table()) {
        let t = table(n, &ctxs);
        let found = search_assignments(&t).unwrap();
        for a in &found {
            prop_assert!(a.satisfies(&t));
        }
        match parity_obstruction(&t) {
            Some(cert) => {
                prop_assert!(found.is_empty());
                let mut cover = vec![0usize; n];
                let mut minus = false;
                for &c in &cert.contexts {
                    ctxs[c].0.iter().for_each(|&m| cover[m] += 1);
                    minus ^= ctxs[c].1;
                }
                prop_assert!(minus);
                prop_assert!(cover.iter().all(|c| c % 2 == 0));
            }
            None => prop_assert!(!found.is_empty()),
        }
    }

    #[test]
    fn planted_assignment_is_found(
        (n, ctxs, planted) in (1usize..=10).prop_flat_map(|n| {
            (Just(n), contexts(n), prop::collection::vec(any::<bool>(), n))
        })
    ) {
        // Signs consistent with a planted assignment make the table satisfiable.
        let ctxs: Vec<(Vec<usize>, bool)> = ctxs
            .into_iter()
            .map(|(m, _)| {
                let minus = m.iter().filter(|&&i| planted[i]).count() % 2 == 1;
                (m, minus)
            })
            .collect();
        let t = table(n, &ctxs);
        let found = search_assignments(&t).unwrap();
        prop_assert!(parity_obstruction(&t).is_none());
        let hit = found.iter().any(|a| {
            (0..n).all(|i| a.get(&format!("o{i}")) == Some(if planted[i] { -1 } else { 1 }))
        });
        prop_assert!(hit);
    }
}

#[test]
fn builtin_tables_have_certificates_and_no_assignments() {
    for t in [mermin_square_table(), ghz_table()] {
        let cert = parity_obstruction(&t).unwrap();
        assert_eq!(cert.contexts.len(), t.contexts().len());
        assert!(search_assignments(&t).unwrap().is_empty());
    }
}

#[test]
fn dropping_a_context_makes_the_square_satisfiable() {
    let square = mermin_square_table();
    for skip in 0..6 {
        let kept: Vec<Context> = square
            .contexts()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(_, c)| c.clone())
            .collect();
        let t = ContextTable::new(square.observables().to_vec(), kept).unwrap();
        assert!(parity_obstruction(&t).is_none());
        // Five independent parity constraints on nine bits leave 2^4 solutions.
        assert_eq!(search_assignments(&t).unwrap().len(), 16);
    }
}
