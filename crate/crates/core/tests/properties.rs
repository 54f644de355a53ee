//! Invariants of terms, event structures and their operators.

mod common;

use std::collections::BTreeSet;

use common::{random_bes, random_pbes, random_term, rng, TermShape};
use pbes::algebra::{compose, elaborate_plain, kleene_truncate, Op};
use pbes::bes::{extend_trace, sub_bes_leq};
use pbes::lposet::{
    language_leq, lposet_by_linearisations, lposet_of, lposet_prefix, subsumes, Pomset,
};
use pbes::{parse_term, render_term, Bes, ConfigSpace, EventId, EventSet, Tag, Term};
use proptest::prelude::*;

const BIG: TermShape = TermShape {
    max_size: 12,
    pchoice: true,
    star: true,
    constants: true,
};

/// Plain structures from terms, or arbitrary generated ones.
fn plain_bes(seed: u64) -> Bes {
    let mut r = rng(seed);
    if seed % 3 == 0 {
        return random_bes(&mut r, 6);
    }
    loop {
        let t = random_term(&mut r, TermShape::PLAIN);
        let b = elaborate_plain(&t, Some((seed % 3) as usize)).unwrap();
        if b.len() <= 10 {
            return b;
        }
    }
}

fn ids(b: &Bes, x: &EventSet) -> BTreeSet<EventId> {
    b.ids_of(x).into_iter().collect()
}

fn restrict(seq: &[usize], x: &EventSet) -> Vec<usize> {
    seq.iter().copied().filter(|&i| x.contains(i)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_parse_round_trip(seed in any::<u64>()) {
        let t = random_term(&mut rng(seed), BIG);
        let text = render_term(&t);
        prop_assert_eq!(parse_term(&text).unwrap(), t.clone(), "{}", text);
        prop_assert_eq!(Term::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn lposets_match_the_linearisation_oracle(seed in any::<u64>()) {
        let b = plain_bes(seed);
        let space = ConfigSpace::new(&b);
        for x in space.iter() {
            prop_assert_eq!(lposet_of(&b, &space, x).unwrap(), lposet_by_linearisations(&b, &space, x).unwrap());
        }
    }

    #[test]
    fn trace_lemmas(seed in any::<u64>()) {
        let b = plain_bes(seed);
        let space = ConfigSpace::new(&b);
        let configs: Vec<&EventSet> = space.iter().collect();
        for (k, y) in configs.iter().enumerate() {
            let trace = space.trace(k);
            prop_assert!(b.is_trace_indices(trace));
            prop_assert_eq!(&EventSet::from_indices(b.len(), trace.iter().copied()), *y);
            for n in 0..trace.len() {
                prop_assert!(b.is_trace_indices(&trace[..n]), "prefix closure");
            }
            for alpha in space.linearisations(&b, y) {
                for x in configs.iter().filter(|x| x.is_subset(y)) {
                    // Restriction.
                    prop_assert!(b.is_trace_indices(&restrict(&alpha, x)));
                }
            }
        }
        for x in &configs {
            for alpha in space.linearisations(&b, x) {
                for y in configs.iter().filter(|y| x.is_subset(y)) {
                    // Extension.
                    let ext = extend_trace(&b, &alpha, y).expect("an extending trace exists");
                    prop_assert!(b.is_trace_indices(&ext));
                    prop_assert_eq!(&EventSet::from_indices(b.len(), ext.iter().copied()), *y);
                    prop_assert_eq!(restrict(&ext, x), alpha.clone());
                }
            }
        }
    }

    #[test]
    fn configuration_prefix_gives_lposet_prefix(seed in any::<u64>()) {
        let b = plain_bes(seed);
        let space = ConfigSpace::new(&b);
        for x in space.iter() {
            for y in space.iter().filter(|y| x.is_subset(y)) {
                let (u, v) = (lposet_of(&b, &space, x).unwrap(), lposet_of(&b, &space, y).unwrap());
                prop_assert!(lposet_prefix(&u, &v));
            }
        }
    }

    #[test]
    fn subsumption_is_a_preorder_and_antisymmetric_up_to_iso(seed in any::<u64>()) {
        let b = plain_bes(seed);
        let space = ConfigSpace::new(&b);
        let us: Vec<_> = space.iter().map(|x| lposet_of(&b, &space, x).unwrap()).collect();
        for u in &us {
            prop_assert!(subsumes(u, u));
            for v in &us {
                for w in &us {
                    if subsumes(u, v) && subsumes(v, w) {
                        prop_assert!(subsumes(u, w));
                    }
                }
                let fully_labelled = (0..u.len()).all(|i| u.label(i).is_some()) && (0..v.len()).all(|i| v.label(i).is_some());
                if fully_labelled && subsumes(u, v) && subsumes(v, u) {
                    prop_assert_eq!(Pomset::of_lposet(u), Pomset::of_lposet(v));
                }
            }
        }
    }

    #[test]
    fn operators_keep_finals_in_conflict(seed in any::<u64>()) {
        let (t, p) = random_pbes(&mut rng(seed), TermShape::REGULAR, 2, 30);
        let b = p.bes();
        let f = b.finals();
        for i in f.iter() {
            for j in f.iter().filter(|&j| j != i) {
                prop_assert!(b.in_conflict(i, j), "{}", t);
            }
        }
    }

    #[test]
    fn truncations_form_a_chain(seed in any::<u64>()) {
        let mut r = rng(seed);
        let pick = |r: &mut _| loop {
            let t = random_term(r, TermShape { max_size: 3, star: false, pchoice: false, constants: true });
            let b = elaborate_plain(&t, None).unwrap();
            if b.len() <= 3 {
                return b;
            }
        };
        let (e, f) = (pick(&mut r), pick(&mut r));
        let chain: Vec<Bes> = (0..4).map(|k| kleene_truncate(&e, &f, k)).collect();
        for k in 0..3 {
            prop_assert!(sub_bes_leq(&chain[k], &chain[k + 1]));
            prop_assert!(language_leq(&chain[k], &chain[k + 1]));
            // Sub-BES: configurations and traces of the smaller are those of
            // the larger that stay inside its events.
            let (small, large) = (&chain[k], &chain[k + 1]);
            let (cs, cl) = (ConfigSpace::new(small), ConfigSpace::new(large));
            let inside: BTreeSet<EventId> = small.events().iter().cloned().collect();
            let lower: BTreeSet<_> = cs.iter().map(|x| ids(small, x)).collect();
            let upper: BTreeSet<_> = cl.iter().map(|x| ids(large, x)).filter(|x| x.is_subset(&inside)).collect();
            prop_assert_eq!(&lower, &upper);
            let traces = |b: &Bes, s: &ConfigSpace| -> BTreeSet<Vec<EventId>> {
                s.iter().flat_map(|x| s.linearisations(b, x)).map(|t| t.iter().map(|&i| b.event(i).clone()).collect()).collect()
            };
            let tl: BTreeSet<_> = traces(large, &cl).into_iter().filter(|t| t.iter().all(|e| inside.contains(e))).collect();
            prop_assert_eq!(traces(small, &cs), tl);
        }
        prop_assert!(sub_bes_leq(&chain[1], &chain[1]));
        prop_assert!(!sub_bes_leq(&chain[2], &chain[1]) || chain[2] == chain[1]);
    }

    #[test]
    fn exit_and_sequence_maximality(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = random_term(&mut r, TermShape::PLAIN);
        let b = elaborate_plain(&t, Some(1)).unwrap();
        prop_assume!(b.len() <= 14);
        let space = ConfigSpace::new(&b);
        for k in 0..space.len() {
            if space.get(k).intersects(b.finals()) {
                prop_assert!(space.is_maximal(k), "{}", t);
            }
        }
        let u = random_term(&mut r, TermShape::PLAIN);
        let e = elaborate_plain(&t, Some(1)).unwrap();
        let f = elaborate_plain(&u, Some(1)).unwrap();
        prop_assume!(e.len() + f.len() <= 12);
        let ef = compose(Op::Seq, &e, &f);
        let el = e.retag(Tag::Left);
        let (sef, sel) = (ConfigSpace::new(&ef), ConfigSpace::new(&el));
        for x in sef.iter() {
            let ids_x = ef.ids_of(x);
            if ids_x.iter().any(|i| i.tags()[0] == Tag::Right) {
                let left: Vec<EventId> = ids_x.into_iter().filter(|i| i.tags()[0] == Tag::Left).collect();
                let k = sel.index_of(&el.set_of(&left).unwrap()).expect("left part is a configuration");
                prop_assert!(sel.is_maximal(k));
            }
        }
    }
}

#[test]
fn precedence() {
    let a = |s: &str| Term::action(s);
    assert_eq!(
        parse_term("a*b ; c || d + e").unwrap(),
        Term::plus(
            Term::par(Term::seq(Term::star(a("a"), a("b")), a("c")), a("d")),
            a("e")
        )
    );
}
