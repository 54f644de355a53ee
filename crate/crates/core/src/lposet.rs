//! Labelled partial orders of configurations, subsumption and pomsets.

use std::collections::{BTreeSet, VecDeque};

use serde_json::{json, Value};

use crate::bes::{Bes, ConfigSpace};
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::set::EventSet;

/// A finite lposet `(x, ⪯, λ)` with a partial labelling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lposet {
    events: Vec<EventId>,
    labels: Vec<Option<String>>,
    /// `leq[i][j]` iff `events[i] ⪯ events[j]`; reflexive.
    leq: Vec<Vec<bool>>,
}

impl Lposet {
    /// Checks that `leq` is a partial order.
    pub fn new(
        events: Vec<EventId>,
        labels: Vec<Option<String>>,
        leq: Vec<Vec<bool>>,
    ) -> Result<Lposet> {
        let n = events.len();
        if labels.len() != n || leq.len() != n || leq.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidLposet("dimension mismatch".into()));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(Error::InvalidLposet(format!(
                    "{} is not below itself",
                    events[i]
                )));
            }
            for j in 0..n {
                if i != j && leq[i][j] && leq[j][i] {
                    return Err(Error::InvalidLposet(format!(
                        "{} and {} are mutually below",
                        events[i], events[j]
                    )));
                }
                for k in 0..n {
                    if leq[i][j] && leq[j][k] && !leq[i][k] {
                        return Err(Error::InvalidLposet("order is not transitive".into()));
                    }
                }
            }
        }
        Ok(Lposet {
            events,
            labels,
            leq,
        })
    }

    /// A chain in the given order.
    pub fn chain(events: Vec<(EventId, Option<String>)>) -> Lposet {
        let n = events.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        let (events, labels) = events.into_iter().unzip();
        Lposet {
            events,
            labels,
            leq,
        }
    }

    pub fn antichain(events: Vec<(EventId, Option<String>)>) -> Lposet {
        let n = events.len();
        let leq = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        let (events, labels) = events.into_iter().unzip();
        Lposet {
            events,
            labels,
            leq,
        }
    }

    pub fn empty() -> Lposet {
        Lposet {
            events: Vec::new(),
            labels: Vec::new(),
            leq: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[EventId] {
        &self.events
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels[i].as_deref()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    fn position(&self, id: &EventId) -> Option<usize> {
        self.events.iter().position(|e| e == id)
    }

    /// Pairs of the covering relation, for drawing.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && self.leq[i][j]
                    && !(0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j])
                {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let n = self.len();
        let order: Vec<Value> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| i != j).map(move |j| (i, j)))
            .filter(|&(i, j)| self.leq[i][j])
            .map(|(i, j)| json!([self.events[i], self.events[j]]))
            .collect();
        json!({
            "events": self.events.iter().zip(&self.labels).map(|(e, l)| json!({"id": e, "label": l})).collect::<Vec<_>>(),
            "order": order,
        })
    }

    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("digraph \"{name}\" {{\n");
        for (i, e) in self.events.iter().enumerate() {
            let label = match &self.labels[i] {
                Some(l) => format!("{e}: {l}"),
                None => e.to_string(),
            };
            out.push_str(&format!("  n{i} [label=\"{label}\"];\n"));
        }
        for (i, j) in self.covers() {
            out.push_str(&format!("  n{i} -> n{j};\n"));
        }
        out.push_str("}\n");
        out
    }
}

fn restrict(b: &Bes, x: &EventSet, below: impl Fn(usize, usize) -> bool) -> Lposet {
    let members: Vec<usize> = x.iter().collect();
    let leq = members
        .iter()
        .map(|&i| members.iter().map(|&j| i == j || below(i, j)).collect())
        .collect();
    Lposet {
        events: members.iter().map(|&i| b.event(i).clone()).collect(),
        labels: members
            .iter()
            .map(|&i| b.label(i).map(str::to_string))
            .collect(),
        leq,
    }
}

/// The lposet of configuration `x`: `e ⪯ e'` iff `e` precedes `e'` in every
/// linearisation of `x`. Computed here from the sub-configurations of `x`
/// (`e' ⪯ e` iff every sub-configuration containing `e` contains `e'`),
/// which agrees with [`lposet_by_linearisations`].
pub fn lposet_of(b: &Bes, space: &ConfigSpace, x: &EventSet) -> Result<Lposet> {
    if !space.contains(x) {
        return Err(Error::NotAConfiguration(b.show_set(x)));
    }
    let mut below: Vec<EventSet> = (0..b.len()).map(|_| x.clone()).collect();
    for z in space.below(x) {
        for e in z.iter() {
            below[e] = below[e].intersection(z);
        }
    }
    Ok(restrict(b, x, |i, j| below[j].contains(i)))
}

/// The lposet of `x` as the intersection of the total orders of all its
/// linearisations.
pub fn lposet_by_linearisations(b: &Bes, space: &ConfigSpace, x: &EventSet) -> Result<Lposet> {
    if !space.contains(x) {
        return Err(Error::NotAConfiguration(b.show_set(x)));
    }
    let lins = space.linearisations(b, x);
    let mut pos = vec![0usize; b.len()];
    let mut before = vec![vec![true; b.len()]; b.len()];
    for lin in &lins {
        for (k, &e) in lin.iter().enumerate() {
            pos[e] = k;
        }
        for i in x.iter() {
            for j in x.iter() {
                if pos[i] > pos[j] {
                    before[i][j] = false;
                }
            }
        }
    }
    Ok(restrict(b, x, |i, j| before[i][j]))
}

/// Lposets of every configuration, in configuration order.
pub fn all_lposets(b: &Bes, space: &ConfigSpace) -> Vec<Lposet> {
    space
        .iter()
        .map(|x| lposet_of(b, space, x).expect("listed configuration"))
        .collect()
}

/// `u ⊑_s v`: some label-preserving bijection `f` from the labelled events of
/// `v` to those of `u` satisfies `e ⪯_v e' ⇒ f(e) ⪯_u f(e')`. In words, `u`
/// is at least as sequential as `v`.
pub fn subsumes(u: &Lposet, v: &Lposet) -> bool {
    let hu: Vec<usize> = (0..u.len()).filter(|&i| u.labels[i].is_some()).collect();
    let hv: Vec<usize> = (0..v.len()).filter(|&i| v.labels[i].is_some()).collect();
    if hu.len() != hv.len() {
        return false;
    }
    let mut lu: Vec<&str> = hu.iter().map(|&i| u.label(i).unwrap()).collect();
    let mut lv: Vec<&str> = hv.iter().map(|&i| v.label(i).unwrap()).collect();
    lu.sort_unstable();
    lv.sort_unstable();
    if lu != lv {
        return false;
    }
    let mut image = vec![usize::MAX; hv.len()];
    let mut used = vec![false; hu.len()];
    extend_match(u, v, &hu, &hv, 0, &mut image, &mut used)
}

fn extend_match(
    u: &Lposet,
    v: &Lposet,
    hu: &[usize],
    hv: &[usize],
    k: usize,
    image: &mut [usize],
    used: &mut [bool],
) -> bool {
    if k == hv.len() {
        return true;
    }
    let vk = hv[k];
    for c in 0..hu.len() {
        if used[c] || u.labels[hu[c]] != v.labels[vk] {
            continue;
        }
        let uc = hu[c];
        let consistent = (0..k).all(|p| {
            let (vp, up) = (hv[p], hu[image[p]]);
            (!v.leq[vp][vk] || u.leq[up][uc]) && (!v.leq[vk][vp] || u.leq[uc][up])
        });
        if consistent {
            image[k] = c;
            used[c] = true;
            if extend_match(u, v, hu, hv, k + 1, image, used) {
                return true;
            }
            used[c] = false;
        }
    }
    false
}

/// `u` is a prefix of `v`: `x ⊆ y`, `λ_y|_x = λ_x`, and
/// `e ⪯_y e' ∧ e' ∈ x ⇒ e ∈ x ∧ e ⪯_x e'`.
pub fn lposet_prefix(u: &Lposet, v: &Lposet) -> bool {
    let mut pos_in_v = Vec::with_capacity(u.len());
    for (i, e) in u.events.iter().enumerate() {
        match v.position(e) {
            Some(j) if v.labels[j] == u.labels[i] => pos_in_v.push(j),
            _ => return false,
        }
    }
    (0..u.len()).all(|b_pos| {
        (0..v.len())
            .filter(|&ja| v.leq[ja][pos_in_v[b_pos]])
            .all(|ja| matches!(u.position(&v.events[ja]), Some(a_pos) if u.leq[a_pos][b_pos]))
    })
}

/// A pomset: the isomorphism class of a totally labelled lposet, stored as
/// its canonical representative.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pomset {
    labels: Vec<String>,
    /// Strict order, row-major.
    less: Vec<Vec<bool>>,
}

impl Pomset {
    /// Canonical form of a labelled strict order (transitively closed).
    pub fn canonical(labels: &[String], less: &[Vec<bool>]) -> Pomset {
        let n = labels.len();
        let preds = |i: usize| (0..n).filter(|&j| less[j][i]).count();
        let succs = |i: usize| (0..n).filter(|&j| less[i][j]).count();
        let mut verts: Vec<usize> = (0..n).collect();
        verts.sort_by_key(|&i| (labels[i].clone(), preds(i), succs(i)));
        let key = |i: usize| (labels[i].clone(), preds(i), succs(i));
        let mut groups: Vec<(usize, usize)> = Vec::new();
        let mut s = 0;
        for k in 1..=n {
            if k == n || key(verts[k]) != key(verts[s]) {
                groups.push((s, k));
                s = k;
            }
        }
        let mut best: Option<Vec<bool>> = None;
        let mut best_order = verts.clone();
        permute_groups(&mut verts, &groups, 0, &mut |order| {
            let cert: Vec<bool> = order
                .iter()
                .flat_map(|&i| order.iter().map(move |&j| less[i][j]))
                .collect();
            if best.as_ref().is_none_or(|b| cert < *b) {
                best = Some(cert);
                best_order = order.to_vec();
            }
        });
        Pomset {
            labels: best_order.iter().map(|&i| labels[i].clone()).collect(),
            less: best_order
                .iter()
                .map(|&i| best_order.iter().map(|&j| less[i][j]).collect())
                .collect(),
        }
    }

    /// `û`: the labelled part of `u`, canonicalised.
    pub fn of_lposet(u: &Lposet) -> Pomset {
        let keep: Vec<usize> = (0..u.len()).filter(|&i| u.labels[i].is_some()).collect();
        let labels: Vec<String> = keep.iter().map(|&i| u.labels[i].clone().unwrap()).collect();
        let less: Vec<Vec<bool>> = keep
            .iter()
            .map(|&i| keep.iter().map(|&j| i != j && u.leq[i][j]).collect())
            .collect();
        Pomset::canonical(&labels, &less)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn less(&self, i: usize, j: usize) -> bool {
        self.less[i][j]
    }

    /// Pomsets obtained by ordering one incomparable pair.
    fn augmentations(&self) -> Vec<Pomset> {
        let n = self.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j || self.less[i][j] || self.less[j][i] {
                    continue;
                }
                let mut less = self.less.clone();
                for a in 0..n {
                    for b in 0..n {
                        if (a == i || self.less[a][i]) && (b == j || self.less[j][b]) {
                            less[a][b] = true;
                        }
                    }
                }
                out.push(Pomset::canonical(&self.labels, &less));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let n = self.len();
        let order: Vec<Value> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.less[i][j])
            .map(|(i, j)| json!([i, j]))
            .collect();
        json!({"labels": self.labels, "order": order})
    }
}

fn permute_groups(
    order: &mut Vec<usize>,
    groups: &[(usize, usize)],
    g: usize,
    visit: &mut dyn FnMut(&[usize]),
) {
    if g == groups.len() {
        visit(order);
        return;
    }
    let (s, e) = groups[g];
    permute_range(order, e, s, &mut |o| {
        permute_groups(o, groups, g + 1, visit)
    });
}

fn permute_range(
    order: &mut Vec<usize>,
    e: usize,
    k: usize,
    visit: &mut dyn FnMut(&mut Vec<usize>),
) {
    if k + 1 >= e {
        visit(order);
        return;
    }
    for i in k..e {
        order.swap(k, i);
        permute_range(order, e, k + 1, visit);
        order.swap(k, i);
    }
}

/// Subsumption closure of the pomsets of all configurations.
pub fn pomset_language(b: &Bes) -> BTreeSet<Pomset> {
    let space = ConfigSpace::new(b);
    let mut lang = BTreeSet::new();
    let mut queue = VecDeque::new();
    for u in all_lposets(b, &space) {
        let p = Pomset::of_lposet(&u);
        if lang.insert(p.clone()) {
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        for q in p.augmentations() {
            if lang.insert(q.clone()) {
                queue.push_back(q);
            }
        }
    }
    lang
}

/// Pomset-language inclusion.
pub fn language_leq(e: &Bes, f: &Bes) -> bool {
    pomset_language(e).is_subset(&pomset_language(f))
}
