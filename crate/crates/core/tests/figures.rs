//! The worked figures, reproduced exactly.

mod common;

use std::collections::BTreeSet;

use pbes::algebra::elaborate_plain;
use pbes::bes::sub_bes_leq;
use pbes::cluster::{
    confusion_free_exact, confusion_free_static, immediate_conflicts, Clusters, Confusion,
};
use pbes::dist::Dist;
use pbes::figures::{clustered, confused};
use pbes::lposet::language_leq;
use pbes::pbes::{configuration_tree, elaborate_pbes, Pbes};
use pbes::rational::rat;
use pbes::sim::{find_simulation, verify_witness, SearchOptions, SimWitness, Verdict};
use pbes::{parse_term, Bes, ConfigSpace, EventId, EventSet};

fn names(b: &Bes, x: &EventSet) -> BTreeSet<String> {
    b.ids_of(x).iter().map(ToString::to_string).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn pairs(b: &Bes, ps: impl IntoIterator<Item = (usize, usize)>) -> BTreeSet<BTreeSet<String>> {
    ps.into_iter()
        .map(|(i, j)| {
            [b.event(i).to_string(), b.event(j).to_string()]
                .into_iter()
                .collect()
        })
        .collect()
}

fn conflicts(b: &Bes) -> BTreeSet<BTreeSet<String>> {
    pairs(
        b,
        (0..b.len())
            .flat_map(|i| (i + 1..b.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| b.in_conflict(i, j)),
    )
}

fn bundles(b: &Bes) -> BTreeSet<(BTreeSet<String>, String)> {
    b.bundles()
        .iter()
        .map(|bd| (names(b, &bd.set), b.event(bd.target).to_string()))
        .collect()
}

fn sets(items: &[&[&str]]) -> BTreeSet<BTreeSet<String>> {
    items.iter().map(|s| set(s)).collect()
}

#[test]
fn confused_structure() {
    let b = confused();
    let space = ConfigSpace::new(&b);
    assert_eq!(
        pairs(&b, immediate_conflicts(&b, &space)),
        sets(&[&["e1", "e2"], &["e2", "e3"], &["e4", "e5"]])
    );
    let cl = Clusters::new(&b, &space);
    let e2 = b.require(&common::id("e2")).unwrap();
    assert_eq!(names(&b, cl.core(e2)), set(&["e2"]));
    match confusion_free_exact(&b, &space) {
        Err(Confusion::Immediate { e, e2 }) => {
            assert_eq!(
                (b.event(e).to_string(), b.event(e2).to_string()),
                ("e1".into(), "e2".into())
            )
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(!confusion_free_static(&b, &space));
}

/// Pairwise conflicting, equally pointed, and closed under conflict.
fn katoen_cluster(b: &Bes, k: &EventSet) -> bool {
    let sets_of = |e: usize| b.bundle_sets_of(e).collect::<BTreeSet<_>>();
    !k.is_empty()
        && k.iter()
            .all(|e| k.iter().all(|f| e == f || b.in_conflict(e, f)))
        && k.iter()
            .all(|e| sets_of(e) == sets_of(k.iter().next().unwrap()))
        && k.iter().all(|e| b.conflicts_of(e).is_subset(k))
}

#[test]
fn clustered_structure() {
    let b = clustered();
    let space = ConfigSpace::new(&b);
    let cl = Clusters::new(&b, &space);
    let got: BTreeSet<_> = cl.clusters().iter().map(|c| names(&b, c)).collect();
    assert_eq!(got, sets(&[&["e1", "e2"], &["e3"], &["e4", "e5"]]));
    assert!(cl.is_partition());
    assert!(confusion_free_static(&b, &space));
    assert!(confusion_free_exact(&b, &space).is_ok());

    let n = b.len();
    let katoen: BTreeSet<_> = (1u32..1 << n)
        .map(|m| EventSet::from_indices(n, (0..n).filter(|i| m >> i & 1 == 1)))
        .filter(|k| katoen_cluster(&b, k))
        .collect();
    assert_eq!(
        katoen.iter().map(|k| names(&b, k)).collect::<BTreeSet<_>>(),
        sets(&[&["e1", "e2"]])
    );
    assert!(katoen.iter().all(|k| cl.clusters().contains(k)));
}

#[test]
fn star_truncations() {
    let t = parse_term("a*b").unwrap();
    let chain: Vec<Bes> = (0..3)
        .map(|k| elaborate_plain(&t, Some(k)).unwrap())
        .collect();
    let events: Vec<BTreeSet<String>> = chain.iter().map(|b| names(b, &b.all_events())).collect();
    assert_eq!(events[0], set(&["x0"]));
    assert_eq!(events[1], set(&["x0", "b0", "x1"]));
    assert_eq!(events[2], set(&["x0", "b0", "x1", "b1", "x2"]));

    assert!(conflicts(&chain[0]).is_empty());
    assert_eq!(conflicts(&chain[1]), sets(&[&["x0", "b0"], &["x0", "x1"]]));
    assert_eq!(
        conflicts(&chain[2]),
        sets(&[
            &["x0", "b0"],
            &["x0", "x1"],
            &["x0", "x2"],
            &["x1", "b1"],
            &["x1", "x2"]
        ])
    );

    let bd = |s: &str, t: &str| (set(&[s]), t.to_string());
    assert!(bundles(&chain[0]).is_empty());
    assert_eq!(bundles(&chain[1]), [bd("b0", "x1")].into_iter().collect());
    assert_eq!(
        bundles(&chain[2]),
        [bd("b0", "x1"), bd("b0", "b1"), bd("b1", "x2")]
            .into_iter()
            .collect()
    );

    let mu = |b: &Bes| pairs(b, immediate_conflicts(b, &ConfigSpace::new(b)));
    assert!(mu(&chain[0]).is_empty());
    assert_eq!(mu(&chain[1]), sets(&[&["x0", "b0"]]));
    assert_eq!(mu(&chain[2]), sets(&[&["x0", "b0"], &["x1", "b1"]]));

    let labels: Vec<_> = (0..chain[2].len())
        .map(|i| (chain[2].event(i).to_string(), chain[2].label(i)))
        .collect();
    for (id, l) in labels {
        assert_eq!(l, Some(if id.starts_with('x') { "b" } else { "a" }));
    }
    for k in 0..2 {
        assert!(sub_bes_leq(&chain[k], &chain[k + 1]));
        assert!(!sub_bes_leq(&chain[k + 1], &chain[k]));
        assert!(language_leq(&chain[k], &chain[k + 1]));
    }
}

#[test]
fn configuration_tree_of_choice_in_parallel() {
    let p = elaborate_pbes(&parse_term("a || (b [1/5] c)").unwrap(), None).unwrap();
    let tree = configuration_tree(&p);
    let b = p.bes();
    let nodes: BTreeSet<_> = tree
        .nodes
        .iter()
        .map(|&k| names(b, tree.space.get(k)))
        .collect();
    // s, t are the delimiters; l is `a`, r.l is `b`, r.r is `c`.
    let expected = sets(&[
        &[],
        &["s"],
        &["s", "l"],
        &["s", "r.l"],
        &["s", "r.r"],
        &["s", "l", "r.l"],
        &["s", "l", "r.r"],
        &["s", "l", "r.l", "t"],
        &["s", "l", "r.r", "t"],
    ]);
    assert_eq!(nodes, expected);

    let s = tree
        .space
        .index_of(&b.set_of(&[common::id("s")]).unwrap())
        .unwrap();
    let mut from_s: Vec<Vec<_>> = tree.steps[&s]
        .iter()
        .map(|st| {
            st.branches
                .iter()
                .map(|br| (names(b, tree.space.get(br.target)), br.weight.clone()))
                .collect()
        })
        .collect();
    from_s.sort();
    assert_eq!(
        from_s,
        vec![
            vec![(set(&["s", "l"]), rat(1, 1))],
            vec![
                (set(&["s", "r.l"]), rat(4, 5)),
                (set(&["s", "r.r"]), rat(1, 5))
            ],
        ]
    );
    let weights: Vec<_> = tree
        .steps
        .values()
        .flatten()
        .filter(|st| st.branches.len() > 1)
        .map(|st| {
            st.branches
                .iter()
                .map(|br| br.weight.clone())
                .collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(weights, vec![vec![rat(4, 5), rat(1, 5)]; 2]);
}

fn pb(t: &str) -> Pbes {
    elaborate_pbes(&parse_term(t).unwrap(), Some(0)).unwrap()
}

fn cfg(p: &Pbes, ids: &[&str]) -> EventSet {
    let ids: Vec<EventId> = ids.iter().map(|s| s.parse().unwrap()).collect();
    p.bes().set_of(&ids).unwrap()
}

#[test]
fn interleaving_witness() {
    let (l, r) = (pb("a;b + b;a"), pb("a || b"));
    let all = ["s", "l", "r", "t"];
    let pair = |x: &[&str], y: &[&str]| (cfg(&l, x), Dist::point(cfg(&r, y)));
    let w = SimWitness {
        pairs: vec![
            pair(&[], &[]),
            pair(&["l.l"], &["s", "l"]),
            pair(&["r.l"], &["s", "r"]),
            pair(&["l.l", "l.r"], &all),
            pair(&["r.l", "r.r"], &all),
        ],
    };
    assert_eq!(verify_witness(&l, &r, &w).unwrap(), Ok(()));

    let found = find_simulation(&l, &r, &SearchOptions::default()).unwrap();
    let fw = found.witness().expect("simulation exists");
    assert_eq!(verify_witness(&l, &r, fw).unwrap(), Ok(()));

    match find_simulation(&r, &l, &SearchOptions::default()).unwrap() {
        Verdict::NotFoundWithinSearchSpace(d) => {
            assert!(d.unmatched.contains(&cfg(&r, &all)));
        }
        Verdict::Holds(_) => panic!("concurrency is not simulated by interleaving"),
    }
}

#[test]
fn interleaving_trees() {
    let (l, r) = (pb("a;b + b;a"), pb("a || b"));
    let shape = |p: &Pbes| -> Vec<BTreeSet<String>> {
        let t = configuration_tree(p);
        t.nodes
            .iter()
            .map(|&k| names(p.bes(), t.space.get(k)))
            .collect()
    };
    let left: BTreeSet<_> = shape(&l).into_iter().collect();
    assert_eq!(
        left,
        sets(&[&[], &["l.l"], &["r.l"], &["l.l", "l.r"], &["r.l", "r.r"]])
    );
    let right: BTreeSet<_> = shape(&r).into_iter().collect();
    assert_eq!(
        right,
        sets(&[
            &[],
            &["s"],
            &["s", "l"],
            &["s", "r"],
            &["s", "l", "r"],
            &["s", "l", "r", "t"]
        ])
    );
}
