//! Probabilistic simulation between finite pBES.
//!
//! A simulation relates configurations `x` of the left structure to
//! distributions `Θ` over configurations of the right one. Distributions
//! reachable from `Θ` under the lifted, reflexive-transitive prefix relation
//! are exactly the mixtures `Σ_y Θ(y) Γ_y` with each `Γ_y` in the convex hull
//! of the pure reachable set `PR(y)`, so every simulation obligation is a
//! linear feasibility problem over finitely many vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::bes::ConfigSpace;
use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::event::EventId;
use crate::lp::Problem;
use crate::lposet::{lposet_of, subsumes, Lposet};
use crate::pbes::{prefix_successors, Pbes, Step};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::set::EventSet;

/// Default bound on the size of a single pure reachable set.
pub const DEFAULT_VERTEX_LIMIT: usize = 50_000;

/// A pBES with its configurations, prefix steps and lposets.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub pbes: Pbes,
    pub space: ConfigSpace,
    pub steps: Vec<Vec<Step>>,
    pub lposets: Vec<Lposet>,
    labels: Vec<Vec<String>>,
}

impl Analysis {
    pub fn new(p: &Pbes) -> Analysis {
        let space = ConfigSpace::new(p.bes());
        let steps = (0..space.len())
            .map(|k| prefix_successors(p, &space, k))
            .collect();
        let lposets: Vec<Lposet> = space
            .iter()
            .map(|x| lposet_of(p.bes(), &space, x).expect("listed configuration"))
            .collect();
        let labels = space
            .iter()
            .map(|x| {
                let mut l: Vec<String> = x
                    .iter()
                    .filter_map(|i| p.bes().label(i).map(str::to_string))
                    .collect();
                l.sort();
                l
            })
            .collect();
        Analysis {
            pbes: p.clone(),
            space,
            steps,
            lposets,
            labels,
        }
    }

    fn has_final(&self, k: usize) -> bool {
        self.space.get(k).intersects(self.pbes.bes().finals())
    }

    fn config(&self, x: &EventSet) -> Result<usize> {
        self.space
            .index_of(x)
            .ok_or_else(|| Error::NotAConfiguration(self.pbes.bes().show_set(x)))
    }

    fn show(&self, k: usize) -> String {
        format!("{{{}}}", self.pbes.bes().show_set(self.space.get(k)))
    }
}

/// `PR(y)` for every configuration `y`: `δ_y`, and for each prefix step
/// `y ⪯ Σ p.e δ_{y∪e}` every `Σ p.e Φ_e` with `Φ_e ∈ PR(y∪e)`.
pub fn pure_reachable_all(a: &Analysis, limit: usize) -> Result<Vec<Vec<Dist<usize>>>> {
    let n = a.space.len();
    let mut pr: Vec<Vec<Dist<usize>>> = vec![Vec::new(); n];
    // Successors are strictly larger, hence listed later.
    for k in (0..n).rev() {
        let mut set: BTreeSet<Dist<usize>> = BTreeSet::from([Dist::point(k)]);
        for step in &a.steps[k] {
            let mut partial: Vec<Dist<usize>> = vec![Dist::from_weights(std::iter::empty())];
            for br in &step.branches {
                let mut next = Vec::with_capacity(partial.len() * pr[br.target].len());
                for acc in &partial {
                    for v in &pr[br.target] {
                        next.push(Dist::from_weights(
                            acc.iter()
                                .map(|(c, w)| (*c, w.clone()))
                                .chain(v.iter().map(|(c, w)| (*c, w * &br.weight))),
                        ));
                    }
                }
                if next.len() > limit {
                    return Err(Error::SearchSpace(format!(
                        "more than {limit} reachable distributions"
                    )));
                }
                partial = next;
            }
            set.extend(partial);
            if set.len() > limit {
                return Err(Error::SearchSpace(format!(
                    "more than {limit} reachable distributions"
                )));
            }
        }
        pr[k] = set.into_iter().collect();
    }
    Ok(pr)
}

/// `PR(x)` as distributions over configurations.
pub fn pure_reachable(p: &Pbes, x: &EventSet) -> Result<Vec<Dist<EventSet>>> {
    let a = Analysis::new(p);
    let k = a.config(x)?;
    let pr = pure_reachable_all(&a, DEFAULT_VERTEX_LIMIT)?;
    Ok(pr[k]
        .iter()
        .map(|d| d.map_keys(|&c| a.space.get(c).clone()))
        .collect())
}

/// `(Δ, Θ)` is in the lifting of the relation given by `images`: `Θ` is
/// `Σ_x Δ(x) Ψ_x` with each `Ψ_x` a convex combination of `images[x]`.
pub fn lifting_feasible<K: Ord + Clone, L: Ord + Clone>(
    images: &BTreeMap<K, Vec<Dist<L>>>,
    delta: &Dist<K>,
    theta: &Dist<L>,
) -> bool {
    let mut cols: Vec<(&K, &Dist<L>)> = Vec::new();
    for x in delta.support() {
        match images.get(x) {
            Some(v) if !v.is_empty() => cols.extend(v.iter().map(|d| (x, d))),
            _ => return false,
        }
    }
    let mut p = Problem::new(cols.len());
    for (x, w) in delta.iter() {
        let terms = cols
            .iter()
            .enumerate()
            .filter(|(_, (k, _))| *k == x)
            .map(|(j, _)| (j, Rational::one()))
            .collect();
        p.add_row(terms, w.clone());
    }
    let mut targets: BTreeSet<&L> = theta.support().collect();
    for (_, d) in &cols {
        targets.extend(d.support());
    }
    for z in targets {
        let terms = cols
            .iter()
            .enumerate()
            .map(|(j, (_, d))| (j, d.get(z)))
            .collect();
        p.add_row(terms, theta.get(z));
    }
    p.solve().is_some()
}

/// Weights `l[b][k]` on the images of each branch `b` of a step, from a
/// feasible solution of the joint obligation.
type Assignment = Vec<Vec<Rational>>;

/// Clause 3 for one pair and one step: some `Θ' = Σ_y Θ(y) Γ_y` with
/// `Γ_y ∈ conv(PR(y))` equals `Σ_e p.e Ψ_e` with `Ψ_e ∈ conv(images[e])`.
fn obligation(
    theta: &Dist<usize>,
    pr: &[Vec<Dist<usize>>],
    step: &Step,
    images: &[Vec<&Dist<usize>>],
) -> Option<Assignment> {
    if images.iter().any(Vec::is_empty) {
        return None;
    }
    // Vertex columns first, then image columns.
    let mut vcols: Vec<(usize, &Dist<usize>)> = Vec::new();
    for (y, _) in theta.iter() {
        vcols.extend(pr[*y].iter().map(|v| (*y, v)));
    }
    let mut icols: Vec<(usize, &Dist<usize>)> = Vec::new();
    for (b, imgs) in images.iter().enumerate() {
        icols.extend(imgs.iter().map(|d| (b, *d)));
    }
    let nv = vcols.len();
    let mut p = Problem::new(nv + icols.len());
    for (y, w) in theta.iter() {
        let terms = (0..nv)
            .filter(|&j| vcols[j].0 == *y)
            .map(|j| (j, Rational::one()))
            .collect();
        p.add_row(terms, w.clone());
    }
    for (b, br) in step.branches.iter().enumerate() {
        let terms = (0..icols.len())
            .filter(|&j| icols[j].0 == b)
            .map(|j| (nv + j, Rational::one()))
            .collect();
        p.add_row(terms, br.weight.clone());
    }
    let mut rows: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for (j, (_, v)) in vcols.iter().enumerate() {
        for (z, w) in v.iter() {
            rows.entry(*z).or_default().push((j, w.clone()));
        }
    }
    for (j, (_, d)) in icols.iter().enumerate() {
        for (z, w) in d.iter() {
            rows.entry(*z).or_default().push((nv + j, -w.clone()));
        }
    }
    for (_, terms) in rows {
        p.add_row(terms, Rational::zero());
    }
    let x = p.solve()?;
    let mut out: Assignment = images
        .iter()
        .map(|v| vec![Rational::zero(); v.len()])
        .collect();
    let mut seen = vec![0usize; images.len()];
    for (j, (b, _)) in icols.iter().enumerate() {
        out[*b][seen[*b]] = x[nv + j].clone();
        seen[*b] += 1;
    }
    Some(out)
}

/// A candidate simulation, as pairs of left configurations and
/// distributions over right configurations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimWitness {
    pub pairs: Vec<(EventSet, Dist<EventSet>)>,
}

impl SimWitness {
    /// `{(x, δ_x)}` over all configurations.
    pub fn identity(p: &Pbes) -> SimWitness {
        let space = ConfigSpace::new(p.bes());
        SimWitness {
            pairs: space
                .iter()
                .map(|x| (x.clone(), Dist::point(x.clone())))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn to_json(&self, lhs: &Pbes, rhs: &Pbes, depth: Option<usize>) -> Value {
        let ids = |p: &Pbes, x: &EventSet| p.bes().ids_of(x);
        json!({
            "format": 1,
            "lhs": lhs.to_json(),
            "rhs": rhs.to_json(),
            "depth": depth,
            "pairs": self.pairs.iter().map(|(x, theta)| json!({
                "config": ids(lhs, x),
                "theta": theta.iter().map(|(y, w)| json!({"config": ids(rhs, y), "p": format_rational(w)})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }

    /// Reads the `pairs` field of a witness document against the given
    /// structures.
    pub fn from_json(v: &Value, lhs: &Pbes, rhs: &Pbes) -> Result<SimWitness> {
        let bad = |m: &str| Error::MalformedWitness(m.to_string());
        let set = |p: &Pbes, v: &Value| -> Result<EventSet> {
            let ids: Vec<EventId> = serde_json::from_value(v.clone())?;
            p.bes().set_of(&ids)
        };
        let pairs = v
            .get("pairs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `pairs`"))?
            .iter()
            .map(|pair| {
                let x = set(
                    lhs,
                    pair.get("config")
                        .ok_or_else(|| bad("pair without `config`"))?,
                )?;
                let theta = pair
                    .get("theta")
                    .and_then(Value::as_array)
                    .ok_or_else(|| bad("pair without `theta`"))?
                    .iter()
                    .map(|t| {
                        let y = set(
                            rhs,
                            t.get("config")
                                .ok_or_else(|| bad("weight without `config`"))?,
                        )?;
                        let w = t
                            .get("p")
                            .and_then(Value::as_str)
                            .ok_or_else(|| bad("weight without `p`"))?;
                        Ok((y, parse_rational(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let theta = Dist::new(theta).map_err(|e| Error::MalformedWitness(e.to_string()))?;
                Ok((x, theta))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SimWitness { pairs })
    }
}

/// The first clause a witness fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessFailure {
    MissingRoot,
    /// `x ⊑_s y` fails for some `y` in the support.
    Subsumption {
        x: String,
        y: String,
    },
    /// No matching move for the step `x ⪯ Δ`.
    Step {
        x: String,
        theta: String,
        step: String,
    },
    /// `x` holds a final event but `y` does not.
    Exit {
        x: String,
        y: String,
    },
}

impl std::fmt::Display for WitnessFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WitnessFailure::MissingRoot => f.write_str("the pair (∅, δ∅) is missing"),
            WitnessFailure::Subsumption { x, y } => write!(f, "{x} does not implement {y}"),
            WitnessFailure::Step { x, theta, step } => {
                write!(f, "no move of {theta} matches the step {x} ⪯ {step}")
            }
            WitnessFailure::Exit { x, y } => write!(f, "{x} is final but {y} is not"),
        }
    }
}

fn show_dist(a: &Analysis, d: &Dist<usize>) -> String {
    let parts: Vec<String> = d
        .iter()
        .map(|(k, w)| format!("{}·{}", format_rational(w), a.show(*k)))
        .collect();
    parts.join(" + ")
}

/// Indexes a witness against both analyses.
fn index_witness(l: &Analysis, r: &Analysis, w: &SimWitness) -> Result<Vec<(usize, Dist<usize>)>> {
    w.pairs
        .iter()
        .map(|(x, theta)| {
            let xi = l
                .config(x)
                .map_err(|e| Error::MalformedWitness(e.to_string()))?;
            if !theta.total().is_one() || theta.iter().any(|(_, p)| !p.is_positive()) {
                return Err(Error::MalformedWitness(
                    "a distribution is not normalised".into(),
                ));
            }
            let mut ys = Vec::new();
            for (y, p) in theta.iter() {
                ys.push((
                    r.config(y)
                        .map_err(|e| Error::MalformedWitness(e.to_string()))?,
                    p.clone(),
                ));
            }
            Ok((xi, Dist::from_weights(ys)))
        })
        .collect()
}

/// Checks the four simulation clauses against `lhs` and `rhs` alone.
pub fn verify_witness(
    lhs: &Pbes,
    rhs: &Pbes,
    w: &SimWitness,
) -> Result<std::result::Result<(), WitnessFailure>> {
    let l = Analysis::new(lhs);
    let r = Analysis::new(rhs);
    let pr = pure_reachable_all(&r, DEFAULT_VERTEX_LIMIT)?;
    verify_indexed(&l, &r, &pr, &index_witness(&l, &r, w)?)
}

fn verify_indexed(
    l: &Analysis,
    r: &Analysis,
    pr: &[Vec<Dist<usize>>],
    pairs: &[(usize, Dist<usize>)],
) -> Result<std::result::Result<(), WitnessFailure>> {
    if !pairs.iter().any(|(x, t)| *x == 0 && *t == Dist::point(0)) {
        return Ok(Err(WitnessFailure::MissingRoot));
    }
    let mut images: BTreeMap<usize, BTreeSet<&Dist<usize>>> = BTreeMap::new();
    for (x, t) in pairs {
        images.entry(*x).or_default().insert(t);
    }
    for (x, theta) in pairs {
        for y in theta.support() {
            if !subsumes(&l.lposets[*x], &r.lposets[*y]) {
                return Ok(Err(WitnessFailure::Subsumption {
                    x: l.show(*x),
                    y: r.show(*y),
                }));
            }
            if l.has_final(*x) && !r.has_final(*y) {
                return Ok(Err(WitnessFailure::Exit {
                    x: l.show(*x),
                    y: r.show(*y),
                }));
            }
        }
    }
    let empty = BTreeSet::new();
    for (x, theta) in pairs {
        for step in &l.steps[*x] {
            let imgs: Vec<Vec<&Dist<usize>>> = step
                .branches
                .iter()
                .map(|b| {
                    images
                        .get(&b.target)
                        .unwrap_or(&empty)
                        .iter()
                        .copied()
                        .collect()
                })
                .collect();
            if obligation(theta, pr, step, &imgs).is_none() {
                return Ok(Err(WitnessFailure::Step {
                    x: l.show(*x),
                    theta: show_dist(r, theta),
                    step: show_dist(l, &step.target_dist()),
                }));
            }
        }
    }
    Ok(Ok(()))
}

/// An unsatisfiable step obligation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailedStep {
    pub config: EventSet,
    pub theta: Dist<EventSet>,
    pub step: Dist<EventSet>,
}

/// Why no simulation was found.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Diagnostic {
    /// Left configurations that no candidate distribution implements.
    pub unmatched: Vec<EventSet>,
    /// Left configurations whose candidates were all refuted.
    pub emptied: Vec<EventSet>,
    /// The step that refuted the root pair, if it was a candidate.
    pub root_failure: Option<FailedStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds(SimWitness),
    NotFoundWithinSearchSpace(Diagnostic),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn witness(&self) -> Option<&SimWitness> {
        match self {
            Verdict::Holds(w) => Some(w),
            Verdict::NotFoundWithinSearchSpace(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Refine pairs in reverse canonical order.
    pub reverse: bool,
    pub vertex_limit: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            reverse: false,
            vertex_limit: DEFAULT_VERTEX_LIMIT,
        }
    }
}

/// Result of the greatest-fixpoint refinement, before witness extraction.
#[derive(Clone, Debug)]
pub struct Fixpoint {
    /// Candidate right distributions, sorted.
    pub universe: Vec<Dist<usize>>,
    /// Surviving universe indices for each left configuration.
    pub alive: Vec<BTreeSet<usize>>,
    pub candidates: Vec<BTreeSet<usize>>,
    failures: BTreeMap<(usize, usize), (usize, usize)>,
}

/// Label classes larger than this are conditioned on as a whole only.
const SUBSET_CLASS_LIMIT: usize = 6;

/// Candidate right distributions: the pure reachable vertices, and their
/// conditionals on sets of equally labelled configurations. A left
/// configuration reached with some probability is usually matched by such
/// a conditional rather than by a vertex itself.
fn search_universe(r: &Analysis, pr: &[Vec<Dist<usize>>]) -> Vec<Dist<usize>> {
    let mut out: BTreeSet<Dist<usize>> = pr.iter().flatten().cloned().collect();
    let vertices: Vec<Dist<usize>> = out.iter().cloned().collect();
    for v in &vertices {
        let mut classes: BTreeMap<&Vec<String>, Vec<usize>> = BTreeMap::new();
        for &y in v.support() {
            classes.entry(&r.labels[y]).or_default().push(y);
        }
        for class in classes.values() {
            if class.len() < 2 {
                continue;
            }
            let subsets: Vec<Vec<usize>> = if class.len() <= SUBSET_CLASS_LIMIT {
                (1u32..1 << class.len())
                    .filter(|m| m.count_ones() >= 2)
                    .map(|m| {
                        (0..class.len())
                            .filter(|i| m >> i & 1 == 1)
                            .map(|i| class[i])
                            .collect()
                    })
                    .collect()
            } else {
                vec![class.clone()]
            };
            for s in subsets {
                let total: Rational = s.iter().map(|y| v.get(y)).sum();
                out.insert(Dist::from_weights(
                    s.iter().map(|y| (*y, v.get(y) / &total)),
                ));
            }
        }
    }
    out.into_iter().collect()
}

/// Deletes candidate pairs whose step obligations fail until none does.
pub fn refine(l: &Analysis, r: &Analysis, pr: &[Vec<Dist<usize>>], reverse: bool) -> Fixpoint {
    let universe = search_universe(r, pr);
    let mut sub: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let mut ok = |x: usize, y: usize| {
        *sub.entry((x, y)).or_insert_with(|| {
            l.labels[x] == r.labels[y]
                && (!l.has_final(x) || r.has_final(y))
                && subsumes(&l.lposets[x], &r.lposets[y])
        })
    };
    let candidates: Vec<BTreeSet<usize>> = (0..l.space.len())
        .map(|x| {
            (0..universe.len())
                .filter(|&u| universe[u].support().all(|&y| ok(x, y)))
                .collect()
        })
        .collect();
    let mut alive = candidates.clone();
    // Large configurations first settles each layer in one sweep; the
    // reverse order exercises re-queuing.
    let key = |x: usize, u: usize| -> (i64, i64) {
        if reverse {
            (x as i64, -(u as i64))
        } else {
            (-(x as i64), u as i64)
        }
    };
    let mut queue: BTreeSet<(i64, i64)> = BTreeSet::new();
    for (x, us) in candidates.iter().enumerate() {
        for &u in us {
            queue.insert(key(x, u));
        }
    }
    let decode = |(a, b): (i64, i64)| -> (usize, usize) {
        if reverse {
            (a as usize, (-b) as usize)
        } else {
            ((-a) as usize, b as usize)
        }
    };
    let mut failures = BTreeMap::new();
    while let Some(k) = queue.pop_first() {
        let (x, u) = decode(k);
        if !alive[x].contains(&u) {
            continue;
        }
        let failed = l.steps[x].iter().position(|step| {
            let imgs: Vec<Vec<&Dist<usize>>> = step
                .branches
                .iter()
                .map(|b| alive[b.target].iter().map(|&v| &universe[v]).collect())
                .collect();
            obligation(&universe[u], pr, step, &imgs).is_none()
        });
        if let Some(s) = failed {
            alive[x].remove(&u);
            failures.insert((x, u), (x, s));
            for &(_, p) in l.space.predecessors(x) {
                for &v in &alive[p] {
                    queue.insert(key(p, v));
                }
            }
        }
    }
    Fixpoint {
        universe,
        alive,
        candidates,
        failures,
    }
}

/// Searches for a simulation from `lhs` to `rhs`.
pub fn find_simulation(lhs: &Pbes, rhs: &Pbes, opts: &SearchOptions) -> Result<Verdict> {
    let l = Analysis::new(lhs);
    let r = Analysis::new(rhs);
    let pr = pure_reachable_all(&r, opts.vertex_limit)?;
    let fp = refine(&l, &r, &pr, opts.reverse);
    let root_u = fp
        .universe
        .binary_search(&Dist::point(0))
        .expect("δ∅ is reachable");
    if !fp.alive[0].contains(&root_u) {
        let lift = |d: &Dist<usize>, a: &Analysis| d.map_keys(|&c| a.space.get(c).clone());
        let root_failure = fp.failures.get(&(0, root_u)).map(|&(x, s)| FailedStep {
            config: l.space.get(x).clone(),
            theta: lift(&fp.universe[root_u], &r),
            step: lift(&l.steps[x][s].target_dist(), &l),
        });
        let pick = |f: &dyn Fn(usize) -> bool| {
            (0..l.space.len())
                .filter(|&x| f(x))
                .map(|x| l.space.get(x).clone())
                .collect()
        };
        return Ok(Verdict::NotFoundWithinSearchSpace(Diagnostic {
            unmatched: pick(&|x| fp.candidates[x].is_empty()),
            emptied: pick(&|x| !fp.candidates[x].is_empty() && fp.alive[x].is_empty()),
            root_failure,
        }));
    }
    let core = extract_core(&l, &pr, &fp, root_u);
    let check = verify_indexed(&l, &r, &pr, &core)?;
    assert_eq!(check, Ok(()), "extracted witness must verify");
    Ok(Verdict::Holds(SimWitness {
        pairs: core
            .into_iter()
            .map(|(x, t)| {
                (
                    l.space.get(x).clone(),
                    t.map_keys(|&c| r.space.get(c).clone()),
                )
            })
            .collect(),
    }))
}

/// The pairs reachable from the root through positive weights of
/// obligation solutions against the surviving set.
fn extract_core(
    l: &Analysis,
    pr: &[Vec<Dist<usize>>],
    fp: &Fixpoint,
    root_u: usize,
) -> Vec<(usize, Dist<usize>)> {
    let mut seen: BTreeSet<(usize, usize)> = BTreeSet::from([(0, root_u)]);
    let mut stack = vec![(0usize, root_u)];
    while let Some((x, u)) = stack.pop() {
        for step in &l.steps[x] {
            let ids: Vec<Vec<usize>> = step
                .branches
                .iter()
                .map(|b| fp.alive[b.target].iter().copied().collect())
                .collect();
            let imgs: Vec<Vec<&Dist<usize>>> = ids
                .iter()
                .map(|v| v.iter().map(|&i| &fp.universe[i]).collect())
                .collect();
            let sol = obligation(&fp.universe[u], pr, step, &imgs)
                .expect("surviving pairs meet their obligations");
            for (b, weights) in sol.iter().enumerate() {
                for (k, w) in weights.iter().enumerate() {
                    if w.is_positive() {
                        let pair = (step.branches[b].target, ids[b][k]);
                        if seen.insert(pair) {
                            stack.push(pair);
                        }
                    }
                }
            }
        }
    }
    seen.into_iter()
        .map(|(x, u)| (x, fp.universe[u].clone()))
        .collect()
}

/// Result of an equivalence check: one verdict per direction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub forward: Verdict,
    pub backward: Verdict,
}

impl Equivalence {
    pub fn holds(&self) -> bool {
        self.forward.holds() && self.backward.holds()
    }
}

pub fn check_equivalence(lhs: &Pbes, rhs: &Pbes, opts: &SearchOptions) -> Result<Equivalence> {
    Ok(Equivalence {
        forward: find_simulation(lhs, rhs, opts)?,
        backward: find_simulation(rhs, lhs, opts)?,
    })
}

/// `R ∘ S̄`: pairs `(x, Σ_y Θ(y) Γ_y)` for `(x, Θ) ∈ R` and `(y, Γ_y) ∈ S`.
pub fn compose_witnesses(r: &SimWitness, s: &SimWitness, limit: usize) -> Result<SimWitness> {
    let mut images: BTreeMap<&EventSet, Vec<&Dist<EventSet>>> = BTreeMap::new();
    for (y, g) in &s.pairs {
        images.entry(y).or_default().push(g);
    }
    let mut out: BTreeSet<(EventSet, Dist<EventSet>)> = BTreeSet::new();
    for (x, theta) in &r.pairs {
        let mut partial: Vec<Vec<(Rational, &Dist<EventSet>)>> = vec![Vec::new()];
        for (y, w) in theta.iter() {
            let Some(gs) = images.get(y) else {
                partial.clear();
                break;
            };
            let mut next = Vec::new();
            for p in &partial {
                for g in gs {
                    let mut q = p.clone();
                    q.push((w.clone(), *g));
                    next.push(q);
                }
            }
            if next.len() > limit {
                return Err(Error::SearchSpace(format!(
                    "more than {limit} composite pairs"
                )));
            }
            partial = next;
        }
        for combo in partial {
            out.insert((x.clone(), Dist::combine(combo.iter().map(|(w, g)| (w, *g)))));
        }
    }
    Ok(SimWitness {
        pairs: out.into_iter().collect(),
    })
}
