//! Hand-built structures used in the documentation and test suites.

use crate::bes::{Bes, BesParts};
use crate::event::EventId;

fn id(s: &str) -> EventId {
    EventId::named(s).expect("fixture names are valid")
}

/// A confused structure: bundles `{e1,e2} |-> e4` and `{e3} |-> e5`,
/// conflicts `e1#e2`, `e2#e3` and `e4#e5`. `e1` and `e3` are concurrent.
pub fn confused() -> Bes {
    let mut p = BesParts::default();
    for e in ["e1", "e2", "e3", "e4", "e5"] {
        p.event(id(e), Some(e));
    }
    p.conflict(id("e1"), id("e2"))
        .conflict(id("e2"), id("e3"))
        .conflict(id("e4"), id("e5"))
        .bundle([id("e1"), id("e2")], id("e4"))
        .bundle([id("e3")], id("e5"));
    p.build().expect("valid fixture")
}

/// A confusion-free structure whose clusters are `{e1,e2}`, `{e3}` and
/// `{e4,e5}`: bundles `{e1} |-> e3`, `{e2} |-> e4`, `{e2} |-> e5`,
/// conflicts `e1#e2`, `e4#e5`, `e3#e4` and `e3#e5`.
pub fn clustered() -> Bes {
    let mut p = BesParts::default();
    for e in ["e1", "e2", "e3", "e4", "e5"] {
        p.event(id(e), Some(e));
    }
    p.conflict(id("e1"), id("e2"))
        .conflict(id("e4"), id("e5"))
        .conflict(id("e3"), id("e4"))
        .conflict(id("e3"), id("e5"))
        .bundle([id("e1")], id("e3"))
        .bundle([id("e2")], id("e4"))
        .bundle([id("e2")], id("e5"));
    p.build().expect("valid fixture")
}
