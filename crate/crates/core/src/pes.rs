//! Prime event structures and their translation into bundle event structures.

use std::collections::BTreeSet;

use crate::bes::{Bes, BesParts};
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::set::EventSet;

/// A finite prime event structure `(E, ≤, #, λ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pes {
    events: Vec<EventId>,
    labels: Vec<Option<String>>,
    /// `below[j]` is `[e_j]`, including `e_j`.
    below: Vec<EventSet>,
    conflict: Vec<EventSet>,
}

impl Pes {
    /// Validates causality (a partial order given by `causes`, closed here
    /// under transitivity) and conflict (irreflexive, symmetric, hereditary).
    pub fn new(
        events: Vec<(EventId, Option<String>)>,
        causes: &[(usize, usize)],
        conflicts: &[(usize, usize)],
    ) -> Result<Pes> {
        let n = events.len();
        let ids: BTreeSet<&EventId> = events.iter().map(|(e, _)| e).collect();
        if ids.len() != n {
            return Err(Error::InvalidPes("duplicate event".into()));
        }
        let check = |&(i, j): &(usize, usize)| {
            if i >= n || j >= n {
                Err(Error::InvalidPes(format!(
                    "event index {} out of range",
                    i.max(j)
                )))
            } else {
                Ok(())
            }
        };
        causes.iter().try_for_each(check)?;
        conflicts.iter().try_for_each(check)?;
        let mut below: Vec<EventSet> = (0..n).map(|i| EventSet::from_indices(n, [i])).collect();
        for &(i, j) in causes {
            below[j].insert(i);
        }
        // Transitive closure.
        for k in 0..n {
            for j in 0..n {
                if below[j].contains(k) {
                    let bk = below[k].clone();
                    below[j] = below[j].union(&bk);
                }
            }
        }
        for i in 0..n {
            for j in below[i].iter() {
                if j != i && below[j].contains(i) {
                    return Err(Error::InvalidPes("causality is cyclic".into()));
                }
            }
        }
        let mut conflict = vec![EventSet::empty(n); n];
        for &(i, j) in conflicts {
            if i == j {
                return Err(Error::InvalidPes("an event conflicts with itself".into()));
            }
            conflict[i].insert(j);
            conflict[j].insert(i);
        }
        for i in 0..n {
            for j in 0..n {
                if conflict[i].contains(j) {
                    for k in 0..n {
                        if below[k].contains(j) && !conflict[i].contains(k) {
                            return Err(Error::InvalidPes("conflict is not hereditary".into()));
                        }
                    }
                }
            }
        }
        let (events, labels) = events.into_iter().unzip();
        Ok(Pes {
            events,
            labels,
            below,
            conflict,
        })
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

    /// `[e]`.
    pub fn history(&self, e: usize) -> &EventSet {
        &self.below[e]
    }

    /// `[e)`.
    pub fn strict_history(&self, e: usize) -> EventSet {
        let mut h = self.below[e].clone();
        h.remove(e);
        h
    }

    pub fn in_conflict(&self, i: usize, j: usize) -> bool {
        self.conflict[i].contains(j)
    }

    fn conflict_free(&self, x: &EventSet) -> bool {
        x.iter().all(|i| !self.conflict[i].intersects(x))
    }

    /// Immediate causes of `e`: maximal elements of `[e)`.
    pub fn immediate_causes(&self, e: usize) -> Vec<usize> {
        let h = self.strict_history(e);
        h.iter()
            .filter(|&c| !h.iter().any(|d| d != c && self.below[d].contains(c)))
            .collect()
    }

    /// Down-closed conflict-free sets, by exhaustive enumeration.
    pub fn configurations(&self) -> BTreeSet<EventSet> {
        let n = self.len();
        assert!(n <= 20, "exhaustive enumeration is limited to 20 events");
        (0u64..1 << n)
            .map(|m| EventSet::from_indices(n, (0..n).filter(|&i| m >> i & 1 == 1)))
            .filter(|x| self.conflict_free(x) && x.iter().all(|i| self.below[i].is_subset(x)))
            .collect()
    }

    /// `e #μ e'`: `e # e'` and both `[e] ∪ [e')` and `[e) ∪ [e']` are
    /// conflict free.
    pub fn immediate(&self, i: usize, j: usize) -> bool {
        self.in_conflict(i, j)
            && self.conflict_free(&self.below[i].union(&self.strict_history(j)))
            && self.conflict_free(&self.strict_history(i).union(&self.below[j]))
    }

    pub fn immediate_conflicts(&self) -> BTreeSet<(usize, usize)> {
        let n = self.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.immediate(i, j))
            .collect()
    }

    /// Cells: maximal sets of pairwise immediately conflicting events with
    /// a common strict history.
    pub fn cells(&self) -> BTreeSet<EventSet> {
        let n = self.len();
        let mut out = BTreeSet::new();
        for mask in 1u64..1 << n {
            let k = EventSet::from_indices(n, (0..n).filter(|&i| mask >> i & 1 == 1));
            if self.is_partial_cell(&k)
                && (0..n).all(|e| k.contains(e) || !self.is_partial_cell(&k.with(e)))
            {
                out.insert(k);
            }
        }
        out
    }

    fn is_partial_cell(&self, k: &EventSet) -> bool {
        k.iter().all(|i| {
            k.iter().all(|j| {
                i == j || (self.immediate(i, j) && self.strict_history(i) == self.strict_history(j))
            })
        })
    }

    /// `#μ` is transitive on distinct events and `e #μ e'` implies
    /// `[e) = [e')`.
    pub fn confusion_free(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                if !self.immediate(i, j) {
                    continue;
                }
                if self.strict_history(i) != self.strict_history(j) {
                    return false;
                }
                if (0..n).any(|k| k != i && self.immediate(j, k) && !self.immediate(i, k)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Same events, labels and conflicts; one bundle `{c} |-> e` per immediate
/// cause `c` of `e`. No final events.
pub fn pes_to_bes(p: &Pes) -> Bes {
    let mut parts = BesParts::default();
    for (e, l) in p.events.iter().zip(&p.labels) {
        parts.event(e.clone(), l.as_deref());
    }
    for i in 0..p.len() {
        for j in p.conflict[i].iter().filter(|&j| j > i) {
            parts.conflict(p.events[i].clone(), p.events[j].clone());
        }
        for c in p.immediate_causes(i) {
            parts.bundle([p.events[c].clone()], p.events[i].clone());
        }
    }
    parts
        .build()
        .expect("translation of a valid prime event structure")
}
