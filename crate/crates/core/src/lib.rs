//! Probabilistic bundle event structures.
//!
//! The crate covers the whole pipeline: parsing algebraic terms, elaborating
//! them into bundle event structures (BES), the non-probabilistic semantics
//! (configurations, lposets, pomset languages), the probabilistic layer
//! (clusters, confusion freeness, distribution sets) and a checker for
//! probabilistic simulation between finite structures.

pub mod algebra;
pub mod axioms;
pub mod bes;
pub mod cluster;
pub mod dist;
pub mod error;
pub mod event;
pub mod figures;
pub mod lp;
pub mod lposet;
pub mod pbes;
pub mod pes;
pub mod rational;
pub mod set;
pub mod sim;
pub mod term;

pub use bes::{Bes, BesParts, Bundle, ConfigSpace};
pub use error::{Error, Result};
pub use event::{EventId, Tag};
pub use lposet::{Lposet, Pomset};
pub use rational::Rational;
pub use set::EventSet;
pub use term::{parse_term, render_term, Term};
