//! Immediate conflict, clusters and confusion freeness.

use std::collections::BTreeSet;

use crate::bes::{Bes, ConfigSpace};
use crate::set::EventSet;

/// Pairs `(i, j)`, `i < j`, of events in immediate conflict: `i # j` and
/// some configuration extends by either of them.
pub fn immediate_conflicts(b: &Bes, space: &ConfigSpace) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for k in 0..space.len() {
        let next: Vec<usize> = space.successors(k).iter().map(|&(e, _)| e).collect();
        for (a, &i) in next.iter().enumerate() {
            for &j in &next[a + 1..] {
                if b.in_conflict(i, j) {
                    out.insert((i.min(j), i.max(j)));
                }
            }
        }
    }
    out
}

/// A configuration witnessing that `i` and `j` are in immediate conflict.
pub fn immediate_conflict_witness(
    b: &Bes,
    space: &ConfigSpace,
    i: usize,
    j: usize,
) -> Option<usize> {
    if !b.in_conflict(i, j) {
        return None;
    }
    (0..space.len()).find(|&k| {
        let s = space.successors(k);
        s.iter().any(|&(e, _)| e == i) && s.iter().any(|&(e, _)| e == j)
    })
}

/// Clusters, the sets `<e>`, and the immediate conflict relation of a BES.
#[derive(Clone, Debug)]
pub struct Clusters {
    mu: Vec<EventSet>,
    clusters: Vec<EventSet>,
    cores: Vec<EventSet>,
}

impl Clusters {
    pub fn new(b: &Bes, space: &ConfigSpace) -> Clusters {
        let n = b.len();
        let mut mu = vec![EventSet::empty(n); n];
        for (i, j) in immediate_conflicts(b, space) {
            mu[i].insert(j);
            mu[j].insert(i);
        }
        // Events are equally pointed iff they have the same bundle sets.
        let pointing: Vec<BTreeSet<&EventSet>> =
            (0..n).map(|i| b.bundle_sets_of(i).collect()).collect();
        let mut clusters = BTreeSet::new();
        let mut done = vec![false; n];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let class = EventSet::from_indices(n, (0..n).filter(|&j| pointing[j] == pointing[i]));
            for j in class.iter() {
                done[j] = true;
            }
            let adj: Vec<EventSet> = (0..n).map(|j| mu[j].intersection(&class)).collect();
            bron_kerbosch(
                &adj,
                EventSet::empty(n),
                class,
                EventSet::empty(n),
                &mut clusters,
            );
        }
        let clusters: Vec<EventSet> = clusters.into_iter().collect();
        let cores = (0..n)
            .map(|i| {
                clusters
                    .iter()
                    .filter(|c| c.contains(i))
                    .fold(EventSet::from_indices(n, 0..n), |acc, c| {
                        acc.intersection(c)
                    })
            })
            .collect();
        Clusters {
            mu,
            clusters,
            cores,
        }
    }

    /// Maximal partial clusters, in canonical order.
    pub fn clusters(&self) -> &[EventSet] {
        &self.clusters
    }

    /// `<e>`: the intersection of all clusters containing `e`.
    pub fn core(&self, e: usize) -> &EventSet {
        &self.cores[e]
    }

    pub fn immediate(&self, i: usize, j: usize) -> bool {
        self.mu[i].contains(j)
    }

    /// Distinct sets `<e>`, in canonical order.
    pub fn distinct_cores(&self) -> Vec<EventSet> {
        self.cores
            .iter()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// `{<e>}` partitions the events.
    pub fn is_partition(&self) -> bool {
        let n = self.cores.len();
        (0..n).all(|i| self.cores[i].iter().all(|j| self.cores[j] == self.cores[i]))
    }
}

fn bron_kerbosch(
    adj: &[EventSet],
    r: EventSet,
    mut p: EventSet,
    mut x: EventSet,
    out: &mut BTreeSet<EventSet>,
) {
    if p.is_empty() && x.is_empty() {
        out.insert(r);
        return;
    }
    let pivot = p
        .union(&x)
        .iter()
        .max_by_key(|&u| adj[u].intersection(&p).len());
    let skip = pivot
        .map(|u| adj[u].clone())
        .unwrap_or_else(|| EventSet::empty(adj.len()));
    for v in p.difference(&skip).iter().collect::<Vec<_>>() {
        bron_kerbosch(
            adj,
            r.with(v),
            p.intersection(&adj[v]),
            x.intersection(&adj[v]),
            out,
        );
        p.remove(v);
        x.insert(v);
    }
}

/// A violation of confusion freeness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Confusion {
    /// `e #μ e'` but `e` is not in `<e'>`.
    Immediate { e: usize, e2: usize },
    /// `x ∪ {e}` is a configuration, `<e>` is disjoint from `x`, and
    /// `x ∪ {e2}` is not a configuration although `e2` is in `<e>`.
    Enabling { x: usize, e: usize, e2: usize },
}

fn first_clause(cl: &Clusters, n: usize) -> Option<Confusion> {
    for i in 0..n {
        for j in cl.mu[i].iter().filter(|&j| j > i) {
            if !cl.core(j).contains(i) {
                return Some(Confusion::Immediate { e: i, e2: j });
            }
            if !cl.core(i).contains(j) {
                return Some(Confusion::Immediate { e: j, e2: i });
            }
        }
    }
    None
}

/// Checks both clauses of confusion freeness over all configurations.
pub fn confusion_free_exact(b: &Bes, space: &ConfigSpace) -> Result<(), Confusion> {
    let cl = Clusters::new(b, space);
    if let Some(c) = first_clause(&cl, b.len()) {
        return Err(c);
    }
    for k in 0..space.len() {
        let x = space.get(k);
        for &(e, _) in space.successors(k) {
            let core = cl.core(e);
            if core.intersects(x) {
                continue;
            }
            if let Some(e2) = core.iter().find(|&e2| !b.enabled(x, e2)) {
                return Err(Confusion::Enabling { x: k, e, e2 });
            }
        }
    }
    Ok(())
}

/// The static sufficient condition: the first clause of confusion freeness,
/// and `<e> ∩ cfl(e') ≠ ∅ ⇒ <e> ⊆ cfl(e')` for every `e'` outside `<e>`.
pub fn confusion_free_static(b: &Bes, space: &ConfigSpace) -> bool {
    let cl = Clusters::new(b, space);
    if first_clause(&cl, b.len()).is_some() {
        return false;
    }
    (0..b.len()).all(|e| {
        let core = cl.core(e);
        (0..b.len()).filter(|&e2| !core.contains(e2)).all(|e2| {
            let c = b.conflicts_of(e2);
            !core.intersects(c) || core.is_subset(c)
        })
    })
}
