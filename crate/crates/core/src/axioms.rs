//! The algebraic laws of the probabilistic concurrent Kleene algebra,
//! instantiated over a finite grid and checked by simulation.

use std::collections::BTreeSet;

use num_traits::One;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::pbes::elaborate_pbes;
use crate::rational::{format_rational, is_probability, parse_rational, Rational};
use crate::sim::{find_simulation, SearchOptions, DEFAULT_VERTEX_LIMIT};
use crate::term::{parse_term, render_term, Term};

/// Instance grid: variables range over the atoms plus any extra pool terms.
#[derive(Clone, Debug)]
pub struct Grid {
    pub atoms: Vec<String>,
    pub alphas: Vec<Rational>,
    pub depth: usize,
    /// Axiom names to run; all when `None`.
    pub axioms: Option<Vec<String>>,
    pub pool: Vec<Term>,
    /// Bound on each pure reachable set during simulation search.
    pub vertex_limit: usize,
}

impl Grid {
    pub fn new(atoms: &[&str], alphas: Vec<Rational>, depth: usize) -> Grid {
        Grid {
            atoms: atoms.iter().map(|s| s.to_string()).collect(),
            alphas,
            depth,
            axioms: None,
            pool: Vec::new(),
            vertex_limit: DEFAULT_VERTEX_LIMIT,
        }
    }

    /// Reads `{"format": 1, "atoms": [...], "alphas": ["1/2"], "depth": 2,
    /// "axioms": [...], "pool": ["a*b"]}`; `axioms` and `pool` are optional.
    pub fn from_json(v: &Value) -> Result<Grid> {
        #[derive(Deserialize)]
        struct Doc {
            #[serde(default)]
            format: Option<u32>,
            atoms: Vec<String>,
            alphas: Vec<String>,
            depth: usize,
            #[serde(default)]
            axioms: Option<Vec<String>>,
            #[serde(default)]
            pool: Vec<String>,
            #[serde(default)]
            vertex_limit: Option<usize>,
        }
        let doc: Doc = serde_json::from_value(v.clone()).map_err(|e| Error::Grid(e.to_string()))?;
        if doc.format.is_some_and(|f| f != 1) {
            return Err(Error::Grid("unsupported format".into()));
        }
        let alphas = doc
            .alphas
            .iter()
            .map(|a| parse_rational(a))
            .collect::<Result<Vec<_>>>()?;
        let pool = doc
            .pool
            .iter()
            .map(|t| parse_term(t))
            .collect::<Result<Vec<_>>>()?;
        let grid = Grid {
            atoms: doc.atoms,
            alphas,
            depth: doc.depth,
            axioms: doc.axioms,
            pool,
            vertex_limit: doc.vertex_limit.unwrap_or(DEFAULT_VERTEX_LIMIT),
        };
        grid.validate()?;
        Ok(grid)
    }

    fn validate(&self) -> Result<()> {
        if self.atoms.is_empty() && self.pool.is_empty() {
            return Err(Error::Grid("no atoms".into()));
        }
        for a in &self.atoms {
            if !matches!(parse_term(a), Ok(Term::Action(ref n)) if n == a) {
                return Err(Error::Grid(format!("`{a}` is not an action name")));
            }
        }
        for a in &self.alphas {
            if !is_probability(a) {
                return Err(Error::Grid(format!(
                    "alpha {} outside (0,1)",
                    format_rational(a)
                )));
            }
        }
        let known: BTreeSet<&str> = self.atoms.iter().map(String::as_str).collect();
        for t in &self.pool {
            let mut names = BTreeSet::new();
            actions(t, &mut names);
            if let Some(n) = names.iter().find(|n| !known.contains(n.as_str())) {
                return Err(Error::Grid(format!(
                    "pool term `{}` uses unknown atom `{n}`",
                    render_term(t)
                )));
            }
        }
        if let Some(sel) = &self.axioms {
            for name in sel {
                if !AXIOMS.iter().any(|a| a.name == name) {
                    return Err(Error::Grid(format!("unknown axiom `{name}`")));
                }
            }
        }
        Ok(())
    }

    fn values(&self) -> Vec<Term> {
        self.atoms
            .iter()
            .map(|a| Term::action(a))
            .chain(self.pool.iter().cloned())
            .collect()
    }
}

fn actions(t: &Term, out: &mut BTreeSet<String>) {
    match t {
        Term::Zero | Term::One => {}
        Term::Action(a) => {
            out.insert(a.clone());
        }
        Term::Plus(l, r)
        | Term::Seq(l, r)
        | Term::Par(l, r)
        | Term::Star(l, r)
        | Term::PChoice(l, _, r) => {
            actions(l, out);
            actions(r, out);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Equivalent,
    Refines,
}

type Builder = fn(&[Term], &[Rational]) -> (Term, Term);

#[derive(Clone, Copy)]
enum Shape {
    Law(Builder),
    Unfold,
    Induction,
}

#[derive(Clone, Copy)]
pub struct Axiom {
    pub name: &'static str,
    pub relation: Relation,
    vars: usize,
    alphas: usize,
    shape: Shape,
}

fn p(l: &Term, r: &Term) -> Term {
    Term::plus(l.clone(), r.clone())
}
fn s(l: &Term, r: &Term) -> Term {
    Term::seq(l.clone(), r.clone())
}
fn c(l: &Term, r: &Term) -> Term {
    Term::par(l.clone(), r.clone())
}
fn pc(l: &Term, a: &Rational, r: &Term) -> Term {
    Term::pchoice(l.clone(), a.clone(), r.clone())
}

const fn law(
    name: &'static str,
    relation: Relation,
    vars: usize,
    alphas: usize,
    b: Builder,
) -> Axiom {
    Axiom {
        name,
        relation,
        vars,
        alphas,
        shape: Shape::Law(b),
    }
}

use Relation::{Equivalent as Eqv, Refines as Ref};

pub static AXIOMS: &[Axiom] = &[
    law("plus-idem", Eqv, 1, 0, |v, _| {
        (p(&v[0], &v[0]), v[0].clone())
    }),
    law("plus-comm", Eqv, 2, 0, |v, _| {
        (p(&v[0], &v[1]), p(&v[1], &v[0]))
    }),
    law("plus-assoc", Eqv, 3, 0, |v, _| {
        (p(&v[0], &p(&v[1], &v[2])), p(&p(&v[0], &v[1]), &v[2]))
    }),
    law("plus-zero", Eqv, 1, 0, |v, _| {
        (p(&v[0], &Term::Zero), v[0].clone())
    }),
    law("pchoice-idem", Eqv, 1, 1, |v, a| {
        (v[0].clone(), pc(&v[0], &a[0], &v[0]))
    }),
    law("pchoice-comm", Eqv, 2, 1, |v, a| {
        (
            pc(&v[0], &a[0], &v[1]),
            pc(&v[1], &(Rational::one() - &a[0]), &v[0]),
        )
    }),
    law("pchoice-assoc", Eqv, 3, 2, |v, a| {
        let ab = &a[0] * &a[1];
        let gamma = &a[0] * (Rational::one() - &a[1]) / (Rational::one() - &ab);
        (
            pc(&v[0], &a[0], &pc(&v[1], &a[1], &v[2])),
            pc(&pc(&v[0], &gamma, &v[1]), &ab, &v[2]),
        )
    }),
    law("pchoice-seq-dist", Eqv, 3, 1, |v, a| {
        (
            s(&pc(&v[0], &a[0], &v[1]), &v[2]),
            pc(&s(&v[0], &v[2]), &a[0], &s(&v[1], &v[2])),
        )
    }),
    law("seq-assoc", Eqv, 3, 0, |v, _| {
        (s(&v[0], &s(&v[1], &v[2])), s(&s(&v[0], &v[1]), &v[2]))
    }),
    law("seq-right-unit", Eqv, 1, 0, |v, _| {
        (s(&v[0], &Term::One), v[0].clone())
    }),
    law("seq-left-unit", Eqv, 1, 0, |v, _| {
        (s(&Term::One, &v[0]), v[0].clone())
    }),
    law("seq-zero", Eqv, 1, 0, |v, _| {
        (s(&Term::Zero, &v[0]), Term::Zero)
    }),
    law("par-unit", Eqv, 1, 0, |v, _| {
        (c(&Term::One, &v[0]), v[0].clone())
    }),
    law("par-comm", Eqv, 2, 0, |v, _| {
        (c(&v[0], &v[1]), c(&v[1], &v[0]))
    }),
    law("par-assoc", Eqv, 3, 0, |v, _| {
        (c(&v[0], &c(&v[1], &v[2])), c(&c(&v[0], &v[1]), &v[2]))
    }),
    law("plus-seq-dist", Eqv, 3, 0, |v, _| {
        (
            s(&p(&v[0], &v[1]), &v[2]),
            p(&s(&v[0], &v[2]), &s(&v[1], &v[2])),
        )
    }),
    law("plus-seq-subdist", Ref, 3, 0, |v, _| {
        (
            p(&s(&v[0], &v[1]), &s(&v[0], &v[2])),
            s(&v[0], &p(&v[1], &v[2])),
        )
    }),
    law("pchoice-seq-supdist", Ref, 3, 1, |v, a| {
        (
            s(&v[0], &pc(&v[1], &a[0], &v[2])),
            pc(&s(&v[0], &v[1]), &a[0], &s(&v[0], &v[2])),
        )
    }),
    law("plus-par-subdist", Ref, 3, 0, |v, _| {
        (
            p(&c(&v[0], &v[1]), &c(&v[0], &v[2])),
            c(&v[0], &p(&v[1], &v[2])),
        )
    }),
    law("pchoice-par-supdist", Ref, 3, 1, |v, a| {
        (
            c(&v[0], &pc(&v[1], &a[0], &v[2])),
            pc(&c(&v[0], &v[1]), &a[0], &c(&v[0], &v[2])),
        )
    }),
    law("interchange", Ref, 4, 0, |v, _| {
        (
            s(&c(&v[0], &v[1]), &c(&v[2], &v[3])),
            c(&s(&v[0], &v[2]), &s(&v[1], &v[3])),
        )
    }),
    Axiom {
        name: "star-unfold",
        relation: Eqv,
        vars: 2,
        alphas: 0,
        shape: Shape::Unfold,
    },
    Axiom {
        name: "star-induction",
        relation: Ref,
        vars: 2,
        alphas: 0,
        shape: Shape::Induction,
    },
];

/// One side of an instance: a term elaborated at a truncation depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Side {
    pub term: Term,
    pub depth: usize,
}

impl Side {
    fn show(&self) -> String {
        format!("{} @{}", render_term(&self.term), self.depth)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub lhs: Side,
    pub rhs: Side,
    pub forward: bool,
    /// Reverse direction, checked for equivalences only.
    pub backward: Option<bool>,
    /// For implications: the premise, and whether it held.
    pub premise: Option<(Side, Side, bool)>,
    /// Some check exceeded the search bound; such an instance does not pass.
    pub exceeded: bool,
    pub pass: bool,
}

impl Instance {
    /// An implication whose premise failed.
    pub fn vacuous(&self) -> bool {
        matches!(self.premise, Some((_, _, false)))
    }
}

#[derive(Clone, Debug)]
pub struct AxiomResult {
    pub name: &'static str,
    pub relation: Relation,
    pub instances: Vec<Instance>,
}

impl AxiomResult {
    pub fn pass(&self) -> bool {
        self.instances.iter().all(|i| i.pass)
    }

    pub fn non_vacuous(&self) -> usize {
        self.instances.iter().filter(|i| !i.vacuous()).count()
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub results: Vec<AxiomResult>,
}

impl AxiomReport {
    pub fn pass(&self) -> bool {
        self.results.iter().all(AxiomResult::pass)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_json(&self) -> Value {
        let side = |s: &Side| json!({"term": render_term(&s.term), "depth": s.depth});
        json!({
            "format": 1,
            "pass": self.pass(),
            "axioms": self.results.iter().map(|r| json!({
                "name": r.name,
                "relation": match r.relation { Relation::Equivalent => "equivalent", Relation::Refines => "refines" },
                "pass": r.pass(),
                "instances": r.instances.iter().map(|i| {
                    let mut v = json!({
                        "lhs": side(&i.lhs),
                        "rhs": side(&i.rhs),
                        "forward": i.forward,
                        "pass": i.pass,
                    });
                    if i.exceeded {
                        v["exceeded"] = json!(true);
                    }
                    if let Some(b) = i.backward {
                        v["backward"] = json!(b);
                    }
                    if let Some((pl, pr, held)) = &i.premise {
                        v["premise"] = json!({"lhs": side(pl), "rhs": side(pr), "holds": held});
                    }
                    v
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn tuples<T: Clone>(values: &[T], n: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v.clone());
                    p
                })
            })
            .collect();
    }
    out
}

/// `Ok(None)` when the search bound was exceeded.
fn refines(lhs: &Side, rhs: &Side, opts: &SearchOptions) -> Result<Option<bool>> {
    let l = elaborate_pbes(&lhs.term, Some(lhs.depth))?;
    let r = elaborate_pbes(&rhs.term, Some(rhs.depth))?;
    match find_simulation(&l, &r, opts) {
        Ok(v) => Ok(Some(v.holds())),
        Err(Error::SearchSpace(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

fn check(relation: Relation, lhs: Side, rhs: Side, opts: &SearchOptions) -> Result<Instance> {
    let forward = refines(&lhs, &rhs, opts)?;
    let backward = match relation {
        Relation::Equivalent => Some(refines(&rhs, &lhs, opts)?),
        Relation::Refines => None,
    };
    let exceeded = forward.is_none() || backward == Some(None);
    let forward = forward.unwrap_or(false);
    let backward = backward.map(|b| b.unwrap_or(false));
    Ok(Instance {
        pass: !exceeded && forward && backward.unwrap_or(true),
        lhs,
        rhs,
        forward,
        backward,
        premise: None,
        exceeded,
    })
}

fn implication(
    premise: (Side, Side),
    lhs: Side,
    rhs: Side,
    opts: &SearchOptions,
) -> Result<Instance> {
    let held = refines(&premise.0, &premise.1, opts)?;
    let conclusion = match held {
        Some(true) => refines(&lhs, &rhs, opts)?,
        _ => Some(false),
    };
    let exceeded = held.is_none() || conclusion.is_none();
    let held = held.unwrap_or(false);
    let forward = conclusion.unwrap_or(false);
    Ok(Instance {
        pass: !exceeded && (!held || forward),
        lhs,
        rhs,
        forward,
        backward: None,
        premise: Some((premise.0, premise.1, held)),
        exceeded,
    })
}

fn side(term: Term, depth: usize) -> Side {
    Side { term, depth }
}

/// Instances of one axiom over the grid.
pub fn instances_of(ax: &Axiom, grid: &Grid) -> Result<Vec<Instance>> {
    let values = grid.values();
    // Star laws compare truncations at adjacent depths; a nested star would
    // be truncated at mismatched depths on the two sides.
    let star_free: Vec<Term> = values.iter().filter(|t| !t.has_star()).cloned().collect();
    let d = grid.depth;
    let opts = SearchOptions {
        vertex_limit: grid.vertex_limit,
        ..SearchOptions::default()
    };
    let opts = &opts;
    let mut out = Vec::new();
    match ax.shape {
        Shape::Law(build) => {
            for vars in tuples(&values, ax.vars) {
                for alphas in tuples(&grid.alphas, ax.alphas) {
                    let (l, r) = build(&vars, &alphas);
                    out.push(check(ax.relation, side(l, d), side(r, d), opts)?);
                }
            }
        }
        Shape::Unfold => {
            // F + E;(E*F) at depth k against E*F at depth k + 1.
            for v in tuples(&star_free, 2) {
                let (e, f) = (&v[0], &v[1]);
                let star = Term::star(e.clone(), f.clone());
                for k in 0..=d {
                    out.push(check(
                        ax.relation,
                        side(p(f, &s(e, &star)), k),
                        side(star.clone(), k + 1),
                        opts,
                    )?);
                }
            }
        }
        Shape::Induction => {
            for v in tuples(&star_free, 2) {
                let (e, g) = (&v[0], &v[1]);
                let star = Term::star(e.clone(), g.clone());
                // Truncation-matched targets: G + E;F at depth k ⊑ F at k + 1
                // implies E*G at depth k ⊑ F at k + 1.
                for target in [star.clone(), Term::star(p(e, g), g.clone())] {
                    for k in 0..=d {
                        out.push(implication(
                            (side(p(g, &s(e, &target)), k), side(target.clone(), k + 1)),
                            side(star.clone(), k),
                            side(target.clone(), k + 1),
                            opts,
                        )?);
                    }
                }
                // Plain instances over the pool, at the grid depth.
                for f in &values {
                    out.push(implication(
                        (side(p(g, &s(e, f)), d), side(f.clone(), d)),
                        side(star.clone(), d),
                        side(f.clone(), d),
                        opts,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

/// Runs the selected axioms over the grid.
pub fn run_axiom_suite(grid: &Grid) -> Result<AxiomReport> {
    grid.validate()?;
    let selected: Vec<&Axiom> = AXIOMS
        .iter()
        .filter(|a| {
            grid.axioms
                .as_ref()
                .is_none_or(|sel| sel.iter().any(|n| n == a.name))
        })
        .collect();
    let results = selected
        .into_iter()
        .map(|ax| {
            Ok(AxiomResult {
                name: ax.name,
                relation: ax.relation,
                instances: instances_of(ax, grid)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport { results })
}

/// One line per failing instance, for diagnostics.
pub fn describe_failures(report: &AxiomReport) -> Vec<String> {
    report
        .results
        .iter()
        .flat_map(|r| {
            r.instances.iter().filter(|i| !i.pass).map(move |i| {
                format!(
                    "{}: {} vs {} (forward {}, backward {:?}{})",
                    r.name,
                    i.lhs.show(),
                    i.rhs.show(),
                    i.forward,
                    i.backward,
                    if i.exceeded {
                        ", search bound exceeded"
                    } else {
                        ""
                    }
                )
            })
        })
        .collect()
}
