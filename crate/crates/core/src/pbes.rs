//! Probabilistic bundle event structures: a confusion-free BES with a set of
//! distributions, each supported by one cluster.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::One;
use serde_json::{json, Value};

use crate::algebra::{self, Op};
use crate::bes::{sub_bes_leq, Bes, ConfigSpace};
use crate::cluster::{confusion_free_exact, Clusters, Confusion};
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::event::{EventId, Tag};
use crate::rational::{format_decimal, format_rational, is_probability, parse_rational, Rational};
use crate::set::EventSet;
use crate::term::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pbes {
    bes: Bes,
    pi: Vec<Dist<EventId>>,
    /// `pi` over event indices.
    indexed: Vec<Vec<(usize, Rational)>>,
}

impl Pbes {
    /// Builds without checking the pBES conditions; see [`validate_pbes`].
    /// Fails only if a distribution mentions an unknown event.
    pub fn new(bes: Bes, pi: impl IntoIterator<Item = Dist<EventId>>) -> Result<Pbes> {
        let pi: Vec<Dist<EventId>> = pi
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let indexed = pi
            .iter()
            .map(|d| {
                d.iter()
                    .map(|(e, w)| Ok((bes.require(e)?, w.clone())))
                    .collect()
            })
            .collect::<Result<_>>()?;
        Ok(Pbes { bes, pi, indexed })
    }

    /// Builds and requires [`validate_pbes`] to pass.
    pub fn checked(bes: Bes, pi: impl IntoIterator<Item = Dist<EventId>>) -> Result<Pbes> {
        let p = Pbes::new(bes, pi)?;
        let report = validate_pbes(&p);
        if report.is_valid() {
            Ok(p)
        } else {
            Err(Error::InvalidPbes(report.to_string()))
        }
    }

    pub fn empty() -> Pbes {
        Pbes::new(Bes::empty(), []).expect("empty")
    }

    pub fn bes(&self) -> &Bes {
        &self.bes
    }

    pub fn pi(&self) -> &[Dist<EventId>] {
        &self.pi
    }

    /// The `k`-th distribution as `(event index, weight)` pairs.
    pub fn dist(&self, k: usize) -> &[(usize, Rational)] {
        &self.indexed[k]
    }

    pub fn support_of(&self, k: usize) -> EventSet {
        EventSet::from_indices(self.bes.len(), self.indexed[k].iter().map(|(e, _)| *e))
    }

    fn retag(&self, tag: Tag) -> Pbes {
        let bes = self.bes.retag(tag.clone());
        let pi: Vec<Dist<EventId>> = self
            .pi
            .iter()
            .map(|d| d.map_keys(|e| e.prefixed(tag.clone())))
            .collect();
        Pbes {
            bes,
            pi,
            indexed: self.indexed.clone(),
        }
    }

    fn with_bes(bes: Bes, pi: impl IntoIterator<Item = Dist<EventId>>) -> Pbes {
        Pbes::new(bes, pi).expect("distributions over known events")
    }

    pub fn to_json(&self) -> Value {
        json!({
            "format": 1,
            "bes": self.bes.to_json(),
            "pi": self.pi.iter().map(dist_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Pbes> {
        let bes = Bes::from_json(
            v.get("bes")
                .ok_or_else(|| Error::Json("missing `bes`".into()))?,
        )?;
        let pi = v
            .get("pi")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("missing `pi`".into()))?
            .iter()
            .map(|d| {
                let obj = d
                    .as_object()
                    .ok_or_else(|| Error::Json("distribution must be an object".into()))?;
                let pairs = obj
                    .iter()
                    .map(|(k, w)| {
                        let w = w
                            .as_str()
                            .ok_or_else(|| Error::Json("weights are strings".into()))?;
                        Ok((k.parse::<EventId>()?, parse_rational(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Dist::new(pairs)
            })
            .collect::<Result<Vec<_>>>()?;
        Pbes::new(bes, pi)
    }
}

fn dist_json(d: &Dist<EventId>) -> Value {
    Value::Object(
        d.iter()
            .map(|(e, w)| (e.to_string(), Value::String(format_rational(w))))
            .collect(),
    )
}

/// One violated pBES condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Confused(Confusion),
    /// Distribution `k` has a weight outside `(0, 1]` or does not sum to 1.
    NotNormalised(usize),
    /// Distribution `k` is not supported by a single `<e>`.
    AcrossClusters(usize),
    /// No distribution gives the event positive weight.
    Uncovered(usize),
    /// A final event occurs in a bundle set.
    FinalEnables(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PbesReport {
    pub violations: Vec<Violation>,
}

impl PbesReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for PbesReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| match v {
                Violation::Confused(Confusion::Immediate { e, e2 }) => {
                    format!(
                        "event #{e} is in immediate conflict with #{e2} but outside its cluster"
                    )
                }
                Violation::Confused(Confusion::Enabling { x, e, e2 }) => {
                    format!("configuration #{x} enables #{e} but not #{e2}")
                }
                Violation::NotNormalised(k) => format!("distribution {k} is not normalised"),
                Violation::AcrossClusters(k) => format!("distribution {k} spans several clusters"),
                Violation::Uncovered(e) => format!("event #{e} has no distribution"),
                Violation::FinalEnables(e) => format!("final event #{e} occurs in a bundle"),
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Checks confusion freeness, normalisation and cluster support of every
/// distribution, coverage of every event and that no final event enables
/// another.
pub fn validate_pbes(p: &Pbes) -> PbesReport {
    let b = &p.bes;
    let space = ConfigSpace::new(b);
    let mut violations = Vec::new();
    if let Err(c) = confusion_free_exact(b, &space) {
        violations.push(Violation::Confused(c));
    }
    let cl = Clusters::new(b, &space);
    let mut covered = b.empty_set();
    for k in 0..p.pi.len() {
        let d = &p.indexed[k];
        let total: Rational = d.iter().map(|(_, w)| w).sum();
        if d.is_empty()
            || !total.is_one()
            || d.iter().any(|(_, w)| !(is_probability(w) || w.is_one()))
        {
            violations.push(Violation::NotNormalised(k));
        }
        let supp = p.support_of(k);
        if !(0..b.len()).any(|e| supp.is_subset(cl.core(e))) {
            violations.push(Violation::AcrossClusters(k));
        }
        covered = covered.union(&supp);
    }
    for e in b.all_events().difference(&covered).iter() {
        violations.push(Violation::Uncovered(e));
    }
    for bundle in b.bundles() {
        for e in bundle.set.intersection(b.finals()).iter() {
            violations.push(Violation::FinalEnables(e));
        }
    }
    PbesReport { violations }
}

/// `(0, ∅)`, `(1, {δ_e})` and `(a, {δ_e})`.
pub fn atom_pbes(t: &Term) -> Pbes {
    let bes = algebra::atom(t);
    let pi: Vec<Dist<EventId>> = bes.events().iter().cloned().map(Dist::point).collect();
    Pbes::with_bes(bes, pi)
}

fn union_pi(p: &Pbes, q: &Pbes) -> Vec<Dist<EventId>> {
    p.pi.iter().chain(&q.pi).cloned().collect()
}

/// `+` and `;` take `π ∪ ρ`; `||` also adds point distributions on the two
/// delimiters.
pub fn compose_pbes(op: Op, p: &Pbes, q: &Pbes) -> Pbes {
    let (l, r) = (p.retag(Tag::Left), q.retag(Tag::Right));
    match op {
        Op::Plus => Pbes::with_bes(algebra::plus_disjoint(&l.bes, &r.bes), union_pi(&l, &r)),
        Op::Seq => Pbes::with_bes(algebra::seq_disjoint(&l.bes, &r.bes), union_pi(&l, &r)),
        Op::Par => {
            let (s, t) = (algebra::start_id(), algebra::end_id());
            let bes = algebra::par_disjoint(&l.bes, &r.bes, s.clone(), t.clone());
            let mut pi = union_pi(&l, &r);
            pi.push(Dist::point(s));
            pi.push(Dist::point(t));
            Pbes::with_bes(bes, pi)
        }
    }
}

fn initial_split(p: &Pbes) -> (Vec<Dist<EventId>>, Vec<Dist<EventId>>) {
    let init = p.bes.init();
    (0..p.pi.len())
        .map(|k| (p.support_of(k).is_subset(&init), p.pi[k].clone()))
        .fold((Vec::new(), Vec::new()), |(mut i, mut o), (is_init, d)| {
            if is_init {
                i.push(d)
            } else {
                o.push(d)
            }
            (i, o)
        })
}

/// `E ⊕_α F`: the structure `E + F` whose initial distributions are the
/// mixtures `(1-α) p + α q` of initial distributions of the operands.
pub fn pchoice(p: &Pbes, alpha: &Rational, q: &Pbes) -> Result<Pbes> {
    if !is_probability(alpha) {
        return Err(Error::AlphaOutOfRange(format_rational(alpha)));
    }
    let (l, r) = (p.retag(Tag::Left), q.retag(Tag::Right));
    let (li, lo) = initial_split(&l);
    let (ri, ro) = initial_split(&r);
    if li.is_empty() || ri.is_empty() {
        return Err(Error::DegenerateChoice);
    }
    let keep = Rational::one() - alpha;
    let mut pi = lo;
    pi.extend(ro);
    for a in &li {
        for b in &ri {
            pi.push(Dist::combine([(&keep, a), (alpha, b)]));
        }
    }
    Ok(Pbes::with_bes(algebra::plus_disjoint(&l.bes, &r.bes), pi))
}

/// Truncated Kleene star on pBES, with the same copy tags as
/// [`algebra::kleene_truncate`].
pub fn kleene_truncate_pbes(p: &Pbes, q: &Pbes, k: usize) -> Pbes {
    let mut acc = q.retag(Tag::Exit(k as u32));
    for i in (0..k).rev() {
        let body = p.retag(Tag::Body(i as u32));
        let exit = q.retag(Tag::Exit(i as u32));
        let seq = Pbes::with_bes(
            algebra::seq_disjoint(&body.bes, &acc.bes),
            union_pi(&body, &acc),
        );
        acc = Pbes::with_bes(
            algebra::plus_disjoint(&exit.bes, &seq.bes),
            union_pi(&exit, &seq),
        );
    }
    acc
}

/// The pBES of a term; `depth` truncates every Kleene star.
pub fn elaborate_pbes(t: &Term, depth: Option<usize>) -> Result<Pbes> {
    let go = |x: &Term| elaborate_pbes(x, depth);
    Ok(match t {
        Term::Zero | Term::One | Term::Action(_) => atom_pbes(t),
        Term::Plus(l, r) => compose_pbes(Op::Plus, &go(l)?, &go(r)?),
        Term::Seq(l, r) => compose_pbes(Op::Seq, &go(l)?, &go(r)?),
        Term::Par(l, r) => compose_pbes(Op::Par, &go(l)?, &go(r)?),
        Term::PChoice(l, a, r) => pchoice(&go(l)?, a, &go(r)?)?,
        Term::Star(l, r) => {
            kleene_truncate_pbes(&go(l)?, &go(r)?, depth.ok_or(Error::MissingDepth)?)
        }
    })
}

/// `(E, π) ⪯ (F, ρ)`: `E` is a sub-BES of `F` and `π` is the part of `ρ`
/// supported inside `E`.
pub fn sub_pbes_leq(p: &Pbes, q: &Pbes) -> bool {
    if !sub_bes_leq(&p.bes, &q.bes) {
        return false;
    }
    let restricted: BTreeSet<&Dist<EventId>> =
        q.pi.iter()
            .filter(|d| d.support().all(|e| p.bes.index_of(e).is_some()))
            .collect();
    restricted == p.pi.iter().collect()
}

/// One branch of a probabilistic step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    pub weight: Rational,
    pub event: usize,
    pub target: usize,
}

/// `x ⪯ Δ` for `Δ = Σ p.e δ_{x ∪ {e}}`, with `p` the distribution `dist`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub dist: usize,
    pub branches: Vec<Branch>,
}

impl Step {
    pub fn target_dist(&self) -> Dist<usize> {
        Dist::from_weights(self.branches.iter().map(|b| (b.target, b.weight.clone())))
    }
}

/// The probabilistic prefixes of configuration `k`: every `p ∈ π` whose
/// support avoids `x` and extends `x` by each of its events.
pub fn prefix_successors(p: &Pbes, space: &ConfigSpace, k: usize) -> Vec<Step> {
    let x = space.get(k);
    let mut out = Vec::new();
    for (d, dist) in p.indexed.iter().enumerate() {
        if dist.iter().any(|(e, _)| x.contains(*e)) {
            continue;
        }
        let branches: Option<Vec<Branch>> = dist
            .iter()
            .map(|(e, w)| {
                space.index_of(&x.with(*e)).map(|t| Branch {
                    weight: w.clone(),
                    event: *e,
                    target: t,
                })
            })
            .collect();
        if let Some(branches) = branches {
            out.push(Step { dist: d, branches });
        }
    }
    out
}

/// Prefix steps of every configuration; a node is listed whenever it is
/// reachable from the empty configuration.
#[derive(Clone, Debug)]
pub struct ConfigTree {
    pub space: ConfigSpace,
    pub nodes: Vec<usize>,
    pub steps: BTreeMap<usize, Vec<Step>>,
}

pub fn configuration_tree(p: &Pbes) -> ConfigTree {
    let space = ConfigSpace::new(&p.bes);
    let mut steps = BTreeMap::new();
    let mut queue = VecDeque::from([0usize]);
    let mut seen = BTreeSet::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let s = prefix_successors(p, &space, k);
        for st in &s {
            for b in &st.branches {
                if seen.insert(b.target) {
                    queue.push_back(b.target);
                }
            }
        }
        steps.insert(k, s);
    }
    ConfigTree {
        nodes: seen.into_iter().collect(),
        space,
        steps,
    }
}

impl ConfigTree {
    pub fn to_json(&self, p: &Pbes) -> Value {
        let b = &p.bes;
        json!({
            "format": 1,
            "nodes": self.nodes.iter().map(|&k| json!({"id": k, "config": b.ids_of(self.space.get(k))})).collect::<Vec<_>>(),
            "steps": self.steps.iter().flat_map(|(&k, s)| s.iter().map(move |st| json!({
                "from": k,
                "dist": st.dist,
                "branches": st.branches.iter().map(|br| json!({
                    "to": br.target,
                    "event": b.event(br.event),
                    "p": format_rational(&br.weight),
                })).collect::<Vec<_>>(),
            }))).collect::<Vec<_>>(),
        })
    }

    /// Graphviz rendering: solid edges for single-event steps, dotted edges
    /// labelled with their weight for probabilistic branches.
    pub fn to_dot(&self, p: &Pbes) -> String {
        let b = &p.bes;
        let mut out = String::from("digraph tree {\n");
        for &k in &self.nodes {
            out.push_str(&format!(
                "  c{k} [label=\"{{{}}}\"];\n",
                b.show_set(self.space.get(k))
            ));
        }
        for (k, s) in &self.steps {
            for st in s {
                if st.branches.len() == 1 {
                    out.push_str(&format!("  c{k} -> c{};\n", st.branches[0].target));
                } else {
                    for br in &st.branches {
                        out.push_str(&format!(
                            "  c{k} -> c{} [style=dotted, label=\"{}\"];\n",
                            br.target,
                            format_decimal(&br.weight)
                        ));
                    }
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::term::parse_term;

    fn pb(s: &str, k: usize) -> Pbes {
        elaborate_pbes(&parse_term(s).unwrap(), Some(k)).unwrap()
    }

    fn d(pairs: &[(&str, Rational)]) -> Dist<EventId> {
        Dist::new(pairs.iter().map(|(e, w)| (e.parse().unwrap(), w.clone()))).unwrap()
    }

    fn pt(s: &str) -> Dist<EventId> {
        Dist::point(s.parse().unwrap())
    }

    #[test]
    fn par_with_choice() {
        let p = pb("a || (b [1/5] c)", 0);
        let expect: BTreeSet<_> = [
            d(&[("r.l", rat(4, 5)), ("r.r", rat(1, 5))]),
            pt("l"),
            pt("s"),
            pt("t"),
        ]
        .into();
        assert_eq!(p.pi().iter().cloned().collect::<BTreeSet<_>>(), expect);
        assert!(validate_pbes(&p).is_valid());
    }

    #[test]
    fn sum_with_choice_has_one_initial_cluster() {
        let p = pb("a + (b [1/5] c)", 0);
        let space = ConfigSpace::new(p.bes());
        let cl = Clusters::new(p.bes(), &space);
        assert_eq!(cl.core(0).len(), 3);
        let expect: BTreeSet<_> = [d(&[("r.l", rat(4, 5)), ("r.r", rat(1, 5))]), pt("l")].into();
        assert_eq!(p.pi().iter().cloned().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn choice_over_sum() {
        let p = pb("(a + b) [1/2] c", 0);
        let expect: BTreeSet<_> = [
            d(&[("l.l", rat(1, 2)), ("r", rat(1, 2))]),
            d(&[("l.r", rat(1, 2)), ("r", rat(1, 2))]),
        ]
        .into();
        assert_eq!(p.pi().iter().cloned().collect::<BTreeSet<_>>(), expect);
    }

    #[test]
    fn degenerate_choice() {
        let t = parse_term("0 [1/2] a").unwrap();
        assert_eq!(elaborate_pbes(&t, None), Err(Error::DegenerateChoice));
    }

    #[test]
    fn star_distributions() {
        assert_eq!(pb("a*b", 0).pi(), &[pt("x0")]);
        let expect: BTreeSet<_> = [pt("x0"), pt("b0"), pt("x1")].into();
        let got: BTreeSet<_> = pb("a*b", 1).pi().iter().cloned().collect();
        assert_eq!(got, expect);
        for k in 0..3 {
            assert!(sub_pbes_leq(&pb("a*b", k), &pb("a*b", k + 1)));
        }
    }

    #[test]
    fn validation_reports() {
        let a = pb("a + b", 0);
        let partial = Pbes::new(a.bes().clone(), [pt("l")]).unwrap();
        assert_eq!(
            validate_pbes(&partial).violations,
            vec![Violation::Uncovered(1)]
        );
        let p = pb("a || b", 0);
        let across = Pbes::new(
            p.bes().clone(),
            [d(&[("l", rat(1, 2)), ("r", rat(1, 2))]), pt("s"), pt("t")],
        )
        .unwrap();
        assert_eq!(
            validate_pbes(&across).violations,
            vec![Violation::AcrossClusters(0)]
        );
    }

    #[test]
    fn tree_edges() {
        let p = pb("a || (b [1/5] c)", 0);
        let tree = configuration_tree(&p);
        assert_eq!(tree.nodes.len(), 9);
        let e = tree
            .space
            .index_of(&p.bes().set_of(&["s".parse().unwrap()]).unwrap())
            .unwrap();
        let steps = &tree.steps[&e];
        assert_eq!(steps.len(), 2);
        let weights: BTreeSet<Rational> = steps
            .iter()
            .filter(|s| s.branches.len() == 2)
            .flat_map(|s| s.branches.iter().map(|b| b.weight.clone()))
            .collect();
        assert_eq!(weights, BTreeSet::from([rat(4, 5), rat(1, 5)]));
    }

    #[test]
    fn json_round_trip() {
        let p = pb("a || (b [1/5] c)", 0);
        assert_eq!(Pbes::from_json(&p.to_json()).unwrap(), p);
    }
}
