//! Bundle event structures, event traces and configurations.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::event::{EventId, Tag};
use crate::set::EventSet;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bundle {
    pub set: EventSet,
    pub target: usize,
}

/// A finite bundle event structure `(E, #, |->, lambda, Phi)`.
///
/// Events are stored sorted by [`EventId`]; every relation refers to events
/// by their index in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bes {
    events: Vec<EventId>,
    labels: Vec<Option<String>>,
    conflict: Vec<EventSet>,
    bundles: Vec<Bundle>,
    pointing: Vec<Vec<usize>>,
    finals: EventSet,
}

/// Identity-keyed description of a BES, used to build and combine them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BesParts {
    pub events: BTreeMap<EventId, Option<String>>,
    pub conflicts: BTreeSet<(EventId, EventId)>,
    pub bundles: BTreeSet<(BTreeSet<EventId>, EventId)>,
    pub finals: BTreeSet<EventId>,
}

impl BesParts {
    pub fn event(&mut self, id: EventId, label: Option<&str>) -> &mut Self {
        self.events.insert(id, label.map(str::to_string));
        self
    }

    pub fn conflict(&mut self, a: EventId, b: EventId) -> &mut Self {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.conflicts.insert((a, b));
        self
    }

    pub fn bundle(&mut self, set: impl IntoIterator<Item = EventId>, target: EventId) -> &mut Self {
        self.bundles.insert((set.into_iter().collect(), target));
        self
    }

    pub fn final_event(&mut self, id: EventId) -> &mut Self {
        self.finals.insert(id);
        self
    }

    pub fn build(&self) -> Result<Bes> {
        Bes::from_parts(self)
    }
}

impl Bes {
    pub fn empty() -> Bes {
        Bes::from_parts(&BesParts::default()).expect("empty structure is valid")
    }

    /// Validates and indexes a BES. Rejects self-conflicts, bundle sets that
    /// are not pairwise conflicting, final sets that are not pairwise
    /// conflicting, and final events inside bundle sets.
    pub fn from_parts(parts: &BesParts) -> Result<Bes> {
        let events: Vec<EventId> = parts.events.keys().cloned().collect();
        let labels: Vec<Option<String>> = parts.events.values().cloned().collect();
        let n = events.len();
        let index: HashMap<&EventId, usize> =
            events.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let idx = |e: &EventId| {
            index
                .get(e)
                .copied()
                .ok_or_else(|| Error::UnknownEvent(e.to_string()))
        };

        let mut conflict = vec![EventSet::empty(n); n];
        for (a, b) in &parts.conflicts {
            let (i, j) = (idx(a)?, idx(b)?);
            if i == j {
                return Err(Error::InvalidBes(format!(
                    "event {a} conflicts with itself"
                )));
            }
            conflict[i].insert(j);
            conflict[j].insert(i);
        }
        let pairwise = |s: &EventSet| {
            s.iter()
                .all(|i| s.iter().all(|j| i == j || conflict[i].contains(j)))
        };

        let mut bundles = Vec::new();
        for (set, target) in &parts.bundles {
            let set = EventSet::from_indices(n, set.iter().map(&idx).collect::<Result<Vec<_>>>()?);
            if !pairwise(&set) {
                return Err(Error::InvalidBes(format!(
                    "bundle set pointing at {target} is not pairwise conflicting"
                )));
            }
            bundles.push(Bundle {
                set,
                target: idx(target)?,
            });
        }
        bundles.sort();
        bundles.dedup();

        let finals = EventSet::from_indices(
            n,
            parts.finals.iter().map(&idx).collect::<Result<Vec<_>>>()?,
        );
        if !pairwise(&finals) {
            return Err(Error::InvalidBes(
                "final events are not pairwise conflicting".into(),
            ));
        }
        if bundles.iter().any(|b| b.set.intersects(&finals)) {
            return Err(Error::InvalidBes(
                "a final event enables another event".into(),
            ));
        }

        let mut pointing = vec![Vec::new(); n];
        for (k, b) in bundles.iter().enumerate() {
            pointing[b.target].push(k);
        }
        Ok(Bes {
            events,
            labels,
            conflict,
            bundles,
            pointing,
            finals,
        })
    }

    pub fn to_parts(&self) -> BesParts {
        let id = |i: usize| self.events[i].clone();
        BesParts {
            events: self
                .events
                .iter()
                .cloned()
                .zip(self.labels.iter().cloned())
                .collect(),
            conflicts: (0..self.len())
                .flat_map(|i| {
                    self.conflict[i]
                        .iter()
                        .filter(move |&j| i < j)
                        .map(move |j| (i, j))
                })
                .map(|(i, j)| (id(i), id(j)))
                .collect(),
            bundles: self
                .bundles
                .iter()
                .map(|b| (b.set.iter().map(id).collect(), id(b.target)))
                .collect(),
            finals: self.finals.iter().map(id).collect(),
        }
    }

    /// The same structure with `tag` prepended to every event identity.
    /// Prepending a common tag preserves the event order, so indices are kept.
    pub fn retag(&self, tag: Tag) -> Bes {
        Bes {
            events: self
                .events
                .iter()
                .map(|e| e.prefixed(tag.clone()))
                .collect(),
            ..self.clone()
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

    pub fn event(&self, i: usize) -> &EventId {
        &self.events[i]
    }

    pub fn index_of(&self, id: &EventId) -> Option<usize> {
        self.events.binary_search(id).ok()
    }

    pub fn require(&self, id: &EventId) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownEvent(id.to_string()))
    }

    pub fn label(&self, i: usize) -> Option<&str> {
        self.labels[i].as_deref()
    }

    pub fn in_conflict(&self, i: usize, j: usize) -> bool {
        self.conflict[i].contains(j)
    }

    /// `cfl({i})`.
    pub fn conflicts_of(&self, i: usize) -> &EventSet {
        &self.conflict[i]
    }

    /// `cfl(x)`: events in conflict with some event of `x`.
    pub fn cfl(&self, x: &EventSet) -> EventSet {
        x.iter()
            .fold(self.empty_set(), |acc, i| acc.union(&self.conflict[i]))
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    /// Bundle sets pointing at `i`, in canonical order.
    pub fn bundle_sets_of(&self, i: usize) -> impl Iterator<Item = &EventSet> + '_ {
        self.pointing[i].iter().map(|&k| &self.bundles[k].set)
    }

    pub fn finals(&self) -> &EventSet {
        &self.finals
    }

    pub fn empty_set(&self) -> EventSet {
        EventSet::empty(self.len())
    }

    pub fn all_events(&self) -> EventSet {
        EventSet::from_indices(self.len(), 0..self.len())
    }

    /// Events not pointed to by any bundle.
    pub fn init(&self) -> EventSet {
        EventSet::from_indices(
            self.len(),
            (0..self.len()).filter(|&i| self.pointing[i].is_empty()),
        )
    }

    /// `i` may extend a prefix whose events are `x`.
    pub fn enabled(&self, x: &EventSet, i: usize) -> bool {
        !x.contains(i)
            && !self.conflict[i].intersects(x)
            && self.pointing[i]
                .iter()
                .all(|&k| self.bundles[k].set.intersects(x))
    }

    pub fn set_of(&self, ids: &[EventId]) -> Result<EventSet> {
        Ok(EventSet::from_indices(
            self.len(),
            ids.iter()
                .map(|e| self.require(e))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    pub fn ids_of(&self, x: &EventSet) -> Vec<EventId> {
        x.iter().map(|i| self.events[i].clone()).collect()
    }

    pub fn show_set(&self, x: &EventSet) -> String {
        self.ids_of(x)
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Event-trace condition on a sequence of event indices.
    pub fn is_trace_indices(&self, seq: &[usize]) -> bool {
        let mut prefix = self.empty_set();
        for &i in seq {
            if !self.enabled(&prefix, i) {
                return false;
            }
            prefix.insert(i);
        }
        true
    }

    pub fn to_json(&self) -> serde_json::Value {
        let parts = self.to_parts();
        serde_json::json!({
            "format": 1,
            "events": parts.events.iter().map(|(id, label)| serde_json::json!({"id": id, "label": label})).collect::<Vec<_>>(),
            "conflicts": parts.conflicts.iter().map(|(a, b)| serde_json::json!([a, b])).collect::<Vec<_>>(),
            "bundles": parts.bundles.iter().map(|(set, t)| serde_json::json!({"set": set, "target": t})).collect::<Vec<_>>(),
            "finals": parts.finals,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Bes> {
        #[derive(Deserialize)]
        struct Event {
            id: EventId,
            label: Option<String>,
        }
        #[derive(Deserialize)]
        struct BundleJson {
            set: Vec<EventId>,
            target: EventId,
        }
        #[derive(Deserialize)]
        struct Doc {
            events: Vec<Event>,
            #[serde(default)]
            conflicts: Vec<(EventId, EventId)>,
            #[serde(default)]
            bundles: Vec<BundleJson>,
            #[serde(default)]
            finals: Vec<EventId>,
        }
        let doc: Doc = serde_json::from_value(v.clone())?;
        let mut parts = BesParts::default();
        for e in doc.events {
            if parts.events.contains_key(&e.id) {
                return Err(Error::DuplicateEvent(e.id));
            }
            parts.event(e.id, e.label.as_deref());
        }
        for (a, b) in doc.conflicts {
            parts.conflict(a, b);
        }
        for b in doc.bundles {
            parts.bundle(b.set, b.target);
        }
        for f in doc.finals {
            parts.final_event(f);
        }
        parts.build()
    }
}

/// Event-trace check on identities.
pub fn is_event_trace(b: &Bes, seq: &[EventId]) -> Result<bool> {
    let idx = seq
        .iter()
        .map(|e| b.require(e))
        .collect::<Result<Vec<_>>>()?;
    Ok(b.is_trace_indices(&idx))
}

/// All configurations of a BES, with one witnessing trace each and the
/// one-event extension graph.
///
/// Configurations are listed by size, then by their sorted event indices,
/// so index 0 is always the empty configuration.
#[derive(Clone, Debug)]
pub struct ConfigSpace {
    configs: Vec<EventSet>,
    index: HashMap<EventSet, usize>,
    traces: Vec<Vec<usize>>,
    succ: Vec<Vec<(usize, usize)>>,
    pred: Vec<Vec<(usize, usize)>>,
}

impl ConfigSpace {
    pub fn new(b: &Bes) -> ConfigSpace {
        let mut found: HashMap<EventSet, Vec<usize>> = HashMap::new();
        let empty = b.empty_set();
        found.insert(empty.clone(), Vec::new());
        let mut layer = vec![empty];
        let mut layers = Vec::new();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for x in &layer {
                for i in 0..b.len() {
                    if b.enabled(x, i) {
                        let y = x.with(i);
                        if !found.contains_key(&y) {
                            let mut tr = found[x].clone();
                            tr.push(i);
                            found.insert(y.clone(), tr);
                            next.push(y);
                        }
                    }
                }
            }
            layers.push(layer);
            layer = next;
        }
        let mut configs = Vec::new();
        for mut l in layers {
            l.sort_by_cached_key(|x| x.iter().collect::<Vec<_>>());
            configs.extend(l);
        }
        let index: HashMap<EventSet, usize> = configs
            .iter()
            .cloned()
            .enumerate()
            .map(|(k, x)| (x, k))
            .collect();
        let traces = configs.iter().map(|x| found[x].clone()).collect();
        let mut succ = vec![Vec::new(); configs.len()];
        let mut pred = vec![Vec::new(); configs.len()];
        for (k, x) in configs.iter().enumerate() {
            for i in 0..b.len() {
                if b.enabled(x, i) {
                    let t = index[&x.with(i)];
                    succ[k].push((i, t));
                    pred[t].push((i, k));
                }
            }
        }
        ConfigSpace {
            configs,
            index,
            traces,
            succ,
            pred,
        }
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn get(&self, k: usize) -> &EventSet {
        &self.configs[k]
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventSet> + '_ {
        self.configs.iter()
    }

    pub fn index_of(&self, x: &EventSet) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &EventSet) -> bool {
        self.index.contains_key(x)
    }

    /// One linearisation of configuration `k`.
    pub fn trace(&self, k: usize) -> &[usize] {
        &self.traces[k]
    }

    /// `(event, extended configuration)` pairs.
    pub fn successors(&self, k: usize) -> &[(usize, usize)] {
        &self.succ[k]
    }

    pub fn predecessors(&self, k: usize) -> &[(usize, usize)] {
        &self.pred[k]
    }

    pub fn is_maximal(&self, k: usize) -> bool {
        self.succ[k].is_empty()
    }

    /// Configurations contained in `x`.
    pub fn below(&self, x: &EventSet) -> impl Iterator<Item = &EventSet> + '_ {
        let x = x.clone();
        self.configs.iter().filter(move |z| z.is_subset(&x))
    }

    /// Every linearisation of configuration `x`, by depth-first search.
    pub fn linearisations(&self, b: &Bes, x: &EventSet) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(b.empty_set(), Vec::new())];
        while let Some((prefix, seq)) = stack.pop() {
            if prefix == *x {
                out.push(seq);
                continue;
            }
            for i in x
                .difference(&prefix)
                .iter()
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
            {
                if b.enabled(&prefix, i) {
                    let mut s = seq.clone();
                    s.push(i);
                    stack.push((prefix.with(i), s));
                }
            }
        }
        out
    }
}

/// Breadth-first search for a trace of `y` extending the trace `alpha`
/// (a trace of some configuration `x` contained in `y`).
pub fn extend_trace(b: &Bes, alpha: &[usize], y: &EventSet) -> Option<Vec<usize>> {
    let start = EventSet::from_indices(b.len(), alpha.iter().copied());
    if !start.is_subset(y) || !b.is_trace_indices(alpha) {
        return None;
    }
    let mut queue = VecDeque::from([(start, alpha.to_vec())]);
    let mut seen = BTreeSet::new();
    while let Some((x, seq)) = queue.pop_front() {
        if x == *y {
            return Some(seq);
        }
        for i in y.difference(&x).iter() {
            if b.enabled(&x, i) {
                let z = x.with(i);
                if seen.insert(z.clone()) {
                    let mut s = seq.clone();
                    s.push(i);
                    queue.push_back((z, s));
                }
            }
        }
    }
    None
}

/// The sub-BES relation `e ⪯ f`.
pub fn sub_bes_leq(e: &Bes, f: &Bes) -> bool {
    let pe = e.to_parts();
    let pf = f.to_parts();
    // E ⊆ F and λ_E = λ_F|_E
    if !pe.events.iter().all(|(id, l)| pf.events.get(id) == Some(l)) {
        return false;
    }
    let in_e = |id: &EventId| pe.events.contains_key(id);
    // #_E = #_F ∩ (E × E)
    let restricted: BTreeSet<_> = pf
        .conflicts
        .iter()
        .filter(|(a, b)| in_e(a) && in_e(b))
        .cloned()
        .collect();
    if restricted != pe.conflicts {
        return false;
    }
    // |->_E ⊆ |->_F, and every F-bundle pointing into E is an E-bundle
    if !pe.bundles.is_subset(&pf.bundles) {
        return false;
    }
    if pf.bundles.iter().any(|(set, t)| {
        in_e(t) && !(set.iter().all(in_e) && pe.bundles.contains(&(set.clone(), t.clone())))
    }) {
        return false;
    }
    // Φ_E = Φ_F ∩ E
    let finals: BTreeSet<_> = pf.finals.iter().filter(|f| in_e(f)).cloned().collect();
    finals == pe.finals
}
