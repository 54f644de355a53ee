//! Structured event identities.
//!
//! Every event built by the operators carries the path of operator positions
//! from the root of the construction down to the basic structure it came
//! from, so operands of a binary operator are always disjoint and a Kleene
//! truncation of depth `k` reuses exactly the identities of depth `k - 1`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    /// Left operand of a binary operator.
    Left,
    /// Right operand of a binary operator.
    Right,
    /// Fresh start delimiter of a parallel composition.
    Start,
    /// Fresh final delimiter of a parallel composition.
    End,
    /// The `i`-th copy of the iterated body of a Kleene star.
    Body(u32),
    /// The `i`-th copy of the exit operand of a Kleene star.
    Exit(u32),
    /// A user-chosen name, for hand-built structures.
    Name(String),
}

impl Tag {
    fn parse(s: &str) -> Option<Tag> {
        match s {
            "l" => Some(Tag::Left),
            "r" => Some(Tag::Right),
            "s" => Some(Tag::Start),
            "t" => Some(Tag::End),
            _ => {
                if let Some(n) = s.strip_prefix('b').and_then(parse_index) {
                    return Some(Tag::Body(n));
                }
                if let Some(n) = s.strip_prefix('x').and_then(parse_index) {
                    return Some(Tag::Exit(n));
                }
                valid_name(s).then(|| Tag::Name(s.to_string()))
            }
        }
    }
}

fn parse_index(digits: &str) -> Option<u32> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Left => f.write_str("l"),
            Tag::Right => f.write_str("r"),
            Tag::Start => f.write_str("s"),
            Tag::End => f.write_str("t"),
            Tag::Body(i) => write!(f, "b{i}"),
            Tag::Exit(i) => write!(f, "x{i}"),
            Tag::Name(n) => f.write_str(n),
        }
    }
}

/// Identity of an event: a path of [`Tag`]s. The root event of a basic
/// structure has the empty path, rendered as `_`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId {
    path: Vec<Tag>,
}

impl EventId {
    pub fn root() -> Self {
        EventId { path: Vec::new() }
    }

    /// An event with a single user-chosen name (`e1`, `f_a`, ...).
    pub fn named(name: &str) -> Result<Self, Error> {
        match Tag::parse(name) {
            Some(tag @ Tag::Name(_)) => Ok(EventId { path: vec![tag] }),
            _ => Err(Error::BadEventId(name.to_string())),
        }
    }

    pub fn from_tags(path: Vec<Tag>) -> Self {
        EventId { path }
    }

    pub fn tags(&self) -> &[Tag] {
        &self.path
    }

    pub fn prefixed(&self, tag: Tag) -> Self {
        let mut path = Vec::with_capacity(self.path.len() + 1);
        path.push(tag);
        path.extend(self.path.iter().cloned());
        EventId { path }
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            return f.write_str("_");
        }
        for (i, tag) in self.path.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{tag}")?;
        }
        Ok(())
    }
}

impl FromStr for EventId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "_" {
            return Ok(EventId::root());
        }
        s.split('.')
            .map(|part| Tag::parse(part).ok_or_else(|| Error::BadEventId(s.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(EventId::from_tags)
    }
}

impl serde::Serialize for EventId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for EventId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_round_trip() {
        let id = EventId::root()
            .prefixed(Tag::Exit(2))
            .prefixed(Tag::Right)
            .prefixed(Tag::Start);
        assert_eq!(id.to_string(), "s.r.x2");
        assert_eq!(id.to_string().parse::<EventId>().unwrap(), id);
        assert_eq!("_".parse::<EventId>().unwrap(), EventId::root());
    }

    #[test]
    fn names_cannot_shadow_structure() {
        assert!(EventId::named("e1").is_ok());
        assert!(EventId::named("l").is_err());
        assert!(EventId::named("x3").is_err());
        assert!(EventId::named("_").is_err());
    }
}
