//! Basic structures and the operators `+`, `;`, `||` and truncated `*`.

use std::collections::BTreeSet;

use crate::bes::{Bes, BesParts};
use crate::error::{Error, Result};
use crate::event::{EventId, Tag};
use crate::term::Term;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Plus,
    Seq,
    Par,
}

/// Basic structure for a constant or an action.
pub fn atom(t: &Term) -> Bes {
    match t {
        Term::Zero => Bes::empty(),
        Term::One => single(None),
        Term::Action(a) => single(Some(a)),
        _ => panic!("atom called on a compound term"),
    }
}

fn single(label: Option<&str>) -> Bes {
    let mut p = BesParts::default();
    p.event(EventId::root(), label).final_event(EventId::root());
    p.build().expect("single event structure")
}

fn ids(b: &Bes, x: &crate::set::EventSet) -> BTreeSet<EventId> {
    b.ids_of(x).into_iter().collect()
}

fn union(e: &Bes, f: &Bes) -> BesParts {
    let mut p = e.to_parts();
    let q = f.to_parts();
    p.events.extend(q.events);
    p.conflicts.extend(q.conflicts);
    p.bundles.extend(q.bundles);
    p
}

/// `E + F` on structures whose events are already disjoint.
pub(crate) fn plus_disjoint(e: &Bes, f: &Bes) -> Bes {
    let mut p = union(e, f);
    for a in ids(e, &e.init()) {
        for b in ids(f, &f.init()) {
            p.conflict(a.clone(), b);
        }
    }
    for a in ids(e, e.finals()) {
        for b in ids(f, f.finals()) {
            p.conflict(a.clone(), b);
        }
    }
    p.finals = ids(e, e.finals())
        .into_iter()
        .chain(ids(f, f.finals()))
        .collect();
    p.build().expect("sum of valid structures")
}

/// `E ; F` on disjoint structures. When `E` has no final event the added
/// bundles are empty and the initial events of `F` can never occur.
pub(crate) fn seq_disjoint(e: &Bes, f: &Bes) -> Bes {
    let mut p = union(e, f);
    let exits = ids(e, e.finals());
    for t in ids(f, &f.init()) {
        p.bundle(exits.clone(), t);
    }
    p.finals = ids(f, f.finals());
    p.build().expect("sequence of valid structures")
}

pub(crate) fn par_disjoint(e: &Bes, f: &Bes, start: EventId, end: EventId) -> Bes {
    let mut p = union(e, f);
    p.event(start.clone(), None).event(end.clone(), None);
    for t in ids(e, &e.init()).into_iter().chain(ids(f, &f.init())) {
        p.bundle([start.clone()], t);
    }
    p.bundle(ids(e, e.finals()), end.clone());
    p.bundle(ids(f, f.finals()), end.clone());
    p.finals = BTreeSet::from([end]);
    p.build().expect("parallel composition of valid structures")
}

pub(crate) fn start_id() -> EventId {
    EventId::from_tags(vec![Tag::Start])
}

pub(crate) fn end_id() -> EventId {
    EventId::from_tags(vec![Tag::End])
}

/// Combines two structures, tagging the operands `l` and `r`.
pub fn compose(op: Op, e: &Bes, f: &Bes) -> Bes {
    let (e, f) = (e.retag(Tag::Left), f.retag(Tag::Right));
    match op {
        Op::Plus => plus_disjoint(&e, &f),
        Op::Seq => seq_disjoint(&e, &f),
        Op::Par => par_disjoint(&e, &f, start_id(), end_id()),
    }
}

/// `E*_{<=k} F = F + E ; (E*_{<=k-1} F)`, with the `i`-th copies of `E` and
/// `F` tagged `b{i}` and `x{i}`. Depth `k - 1` is a sub-structure of depth `k`.
pub fn kleene_truncate(e: &Bes, f: &Bes, k: usize) -> Bes {
    let mut acc = f.retag(Tag::Exit(k as u32));
    for i in (0..k).rev() {
        let body = e.retag(Tag::Body(i as u32));
        let exit = f.retag(Tag::Exit(i as u32));
        acc = plus_disjoint(&exit, &seq_disjoint(&body, &acc));
    }
    acc
}

/// Structure of a term without probabilistic choice.
pub fn elaborate_plain(t: &Term, depth: Option<usize>) -> Result<Bes> {
    Ok(match t {
        Term::Zero | Term::One | Term::Action(_) => atom(t),
        Term::Plus(l, r) => compose(
            Op::Plus,
            &elaborate_plain(l, depth)?,
            &elaborate_plain(r, depth)?,
        ),
        Term::Seq(l, r) => compose(
            Op::Seq,
            &elaborate_plain(l, depth)?,
            &elaborate_plain(r, depth)?,
        ),
        Term::Par(l, r) => compose(
            Op::Par,
            &elaborate_plain(l, depth)?,
            &elaborate_plain(r, depth)?,
        ),
        Term::Star(l, r) => {
            let k = depth.ok_or(Error::MissingDepth)?;
            kleene_truncate(&elaborate_plain(l, depth)?, &elaborate_plain(r, depth)?, k)
        }
        Term::PChoice(..) => return Err(Error::ProbabilisticTerm),
    })
}
