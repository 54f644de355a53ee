//! Finite probability distributions with exact weights.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finitely supported distribution. Every stored weight is positive.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dist<K: Ord> {
    weights: BTreeMap<K, Rational>,
}

impl<K: Ord + Clone> Dist<K> {
    pub fn point(k: K) -> Self {
        Dist {
            weights: BTreeMap::from([(k, Rational::one())]),
        }
    }

    /// Sums repeated keys, drops zero weights and requires the total to be 1.
    pub fn new(pairs: impl IntoIterator<Item = (K, Rational)>) -> Result<Self> {
        let mut weights: BTreeMap<K, Rational> = BTreeMap::new();
        for (k, w) in pairs {
            if w.is_negative() {
                return Err(Error::InvalidDistribution("negative weight".into()));
            }
            *weights.entry(k).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        let total: Rational = weights.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidDistribution(format!(
                "weights sum to {total}"
            )));
        }
        Ok(Dist { weights })
    }

    /// Like [`Dist::new`] for inputs known to be normalised.
    pub(crate) fn from_weights(pairs: impl IntoIterator<Item = (K, Rational)>) -> Self {
        let mut weights: BTreeMap<K, Rational> = BTreeMap::new();
        for (k, w) in pairs {
            *weights.entry(k).or_insert_with(Rational::zero) += w;
        }
        weights.retain(|_, w| !w.is_zero());
        Dist { weights }
    }

    pub fn get(&self, k: &K) -> Rational {
        self.weights.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &K> + '_ {
        self.weights.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Rational)> + '_ {
        self.weights.iter()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_point(&self) -> bool {
        self.weights.len() == 1
    }

    pub fn total(&self) -> Rational {
        self.weights.values().sum()
    }

    /// `Σ w_i d_i`.
    pub fn combine<'a>(parts: impl IntoIterator<Item = (&'a Rational, &'a Dist<K>)>) -> Self
    where
        K: 'a,
    {
        Dist::from_weights(
            parts
                .into_iter()
                .flat_map(|(w, d)| d.weights.iter().map(move |(k, v)| (k.clone(), w * v))),
        )
    }

    pub fn map_keys<L: Ord + Clone>(&self, f: impl Fn(&K) -> L) -> Dist<L> {
        Dist::from_weights(self.weights.iter().map(|(k, w)| (f(k), w.clone())))
    }
}
