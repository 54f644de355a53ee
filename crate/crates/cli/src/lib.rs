//! The `pbes` command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pbes::axioms::{run_axiom_suite, Grid};
use pbes::cluster::{
    confusion_free_exact, confusion_free_static, immediate_conflicts, Clusters, Confusion,
};
use pbes::lposet::{all_lposets, language_leq, pomset_language};
use pbes::pbes::{configuration_tree, elaborate_pbes, validate_pbes, Pbes};
use pbes::rational::format_rational;
use pbes::sim::{
    check_equivalence, find_simulation, verify_witness, SearchOptions, SimWitness, Verdict,
};
use pbes::{algebra::elaborate_plain, parse_term, render_term, Bes, ConfigSpace, Error, EventSet};

#[derive(Parser, Debug)]
#[command(
    name = "pbes",
    version,
    about = "Probabilistic bundle event structures and simulation checking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// A term, or `@FILE` holding BES or pBES JSON.
#[derive(Args, Debug)]
struct Input {
    term: String,
    /// Truncation depth for Kleene stars.
    #[arg(long)]
    depth: Option<usize>,
}

#[derive(Args, Debug)]
struct Pair {
    lhs: String,
    rhs: String,
    #[arg(long)]
    depth: Option<usize>,
    /// Bound on each pure reachable set.
    #[arg(long, default_value_t = pbes::sim::DEFAULT_VERTEX_LIMIT)]
    vertex_limit: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the syntax tree of a term.
    Parse { term: String },
    /// Elaborate a term into a BES or pBES.
    Elaborate {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "prob")]
        plain: bool,
        #[arg(long)]
        prob: bool,
    },
    /// List configurations with a generating trace each.
    Configs {
        #[command(flatten)]
        input: Input,
    },
    /// The lposet of every configuration.
    Lposets {
        #[command(flatten)]
        input: Input,
    },
    /// The pomset language, up to isomorphism.
    Pomsets {
        #[command(flatten)]
        input: Input,
    },
    /// Immediate conflicts, clusters and cores.
    Clusters {
        #[command(flatten)]
        input: Input,
    },
    /// Decide confusion freeness.
    Confusion {
        #[command(flatten)]
        input: Input,
        /// Use the static sufficient condition.
        #[arg(long = "static")]
        static_check: bool,
    },
    /// The configuration tree of a pBES.
    Tree {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        dot: bool,
    },
    /// Refinement of LHS by RHS: simulation, or pomset language inclusion with --lang.
    Leq {
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        lang: bool,
    },
    /// Search for a simulation of LHS by RHS.
    Simulate {
        #[command(flatten)]
        pair: Pair,
    },
    /// Search for simulations in both directions.
    Equiv {
        #[command(flatten)]
        pair: Pair,
    },
    /// Check a witness document.
    VerifyWitness {
        #[arg(long)]
        witness: PathBuf,
    },
    /// Run the axiom laws over a grid file.
    Axioms {
        #[arg(long)]
        grid: PathBuf,
    },
}

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    fn json(code: i32, v: &Value) -> Output {
        Output {
            code,
            stdout: format!(
                "{}\n",
                serde_json::to_string_pretty(v).expect("serialisable")
            ),
            stderr: String::new(),
        }
    }
}

enum Fail {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        Fail::Lib(e)
    }
}

type Run = std::result::Result<Output, Fail>;

/// Runs the command line; `argv[0]` is the program name.
pub fn run_cli<I, S>(argv: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() { 2 } else { 0 };
            return if code == 0 {
                Output {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Output {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(Fail::Usage(m)) | Err(Fail::Lib(Error::Json(m))) => failure(m),
        Err(Fail::Lib(e)) => failure(e.to_string()),
    }
}

fn failure(message: String) -> Output {
    Output {
        code: 2,
        stdout: String::new(),
        stderr: format!("error: {message}\n"),
    }
}

fn verdict(holds: bool) -> i32 {
    if holds {
        0
    } else {
        1
    }
}

fn read_json(path: &std::path::Path) -> std::result::Result<Value, Fail> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

fn depth_for(term: &pbes::Term, depth: Option<usize>) -> std::result::Result<Option<usize>, Fail> {
    if term.has_star() && depth.is_none() {
        return Err(Fail::Usage(
            "the term contains a Kleene star; pass --depth".into(),
        ));
    }
    Ok(depth)
}

/// A pBES from a term or a JSON file. Plain BES files get no distributions.
fn load(arg: &str, depth: Option<usize>) -> std::result::Result<Pbes, Fail> {
    if let Some(path) = arg.strip_prefix('@') {
        let v = read_json(std::path::Path::new(path))?;
        return Ok(if v.get("bes").is_some() {
            Pbes::from_json(&v)?
        } else {
            Pbes::new(Bes::from_json(&v)?, [])?
        });
    }
    let t = parse_term(arg)?;
    let depth = depth_for(&t, depth)?;
    Ok(elaborate_pbes(&t, depth)?)
}

fn load_bes(input: &Input) -> std::result::Result<Bes, Fail> {
    Ok(load(&input.term, input.depth)?.bes().clone())
}

fn ids(b: &Bes, x: &EventSet) -> Value {
    json!(b.ids_of(x))
}

fn dispatch(cmd: Command) -> Run {
    match cmd {
        Command::Parse { term } => {
            let t = parse_term(&term)?;
            Ok(Output::json(
                0,
                &json!({"format": 1, "text": render_term(&t), "ast": t.to_json()}),
            ))
        }
        Command::Elaborate { input, plain, prob } => elaborate(&input, plain, prob),
        Command::Configs { input } => {
            let b = load_bes(&input)?;
            let space = ConfigSpace::new(&b);
            let configs: Vec<Value> = (0..space.len())
                .map(|k| {
                    let trace: Vec<_> =
                        space.trace(k).iter().map(|&i| b.event(i).clone()).collect();
                    json!({
                        "events": ids(&b, space.get(k)),
                        "trace": trace,
                        "maximal": space.is_maximal(k),
                    })
                })
                .collect();
            Ok(Output::json(
                0,
                &json!({"format": 1, "count": configs.len(), "configurations": configs}),
            ))
        }
        Command::Lposets { input } => {
            let b = load_bes(&input)?;
            let space = ConfigSpace::new(&b);
            let lposets = all_lposets(&b, &space);
            let items: Vec<Value> = space
                .iter()
                .zip(&lposets)
                .map(|(x, u)| json!({"config": ids(&b, x), "lposet": u.to_json()}))
                .collect();
            Ok(Output::json(0, &json!({"format": 1, "lposets": items})))
        }
        Command::Pomsets { input } => {
            let b = load_bes(&input)?;
            let lang: Vec<Value> = pomset_language(&b).iter().map(|p| p.to_json()).collect();
            Ok(Output::json(
                0,
                &json!({"format": 1, "count": lang.len(), "pomsets": lang}),
            ))
        }
        Command::Clusters { input } => {
            let b = load_bes(&input)?;
            let space = ConfigSpace::new(&b);
            let cl = Clusters::new(&b, &space);
            let mu: Vec<Value> = immediate_conflicts(&b, &space)
                .iter()
                .map(|&(i, j)| json!([b.event(i), b.event(j)]))
                .collect();
            let cores: serde_json::Map<String, Value> = (0..b.len())
                .map(|e| (b.event(e).to_string(), ids(&b, cl.core(e))))
                .collect();
            Ok(Output::json(
                0,
                &json!({
                    "format": 1,
                    "immediate_conflicts": mu,
                    "clusters": cl.clusters().iter().map(|c| ids(&b, c)).collect::<Vec<_>>(),
                    "cores": cores,
                    "partition": cl.is_partition(),
                }),
            ))
        }
        Command::Confusion {
            input,
            static_check,
        } => {
            let b = load_bes(&input)?;
            let space = ConfigSpace::new(&b);
            let v = if static_check {
                let ok = confusion_free_static(&b, &space);
                json!({"format": 1, "method": "static", "confusion_free": ok})
            } else {
                match confusion_free_exact(&b, &space) {
                    Ok(()) => json!({"format": 1, "method": "exact", "confusion_free": true}),
                    Err(c) => {
                        json!({"format": 1, "method": "exact", "confusion_free": false, "counterexample": confusion_json(&b, &space, &c)})
                    }
                }
            };
            let ok = v["confusion_free"].as_bool().unwrap_or(false);
            Ok(Output::json(verdict(ok), &v))
        }
        Command::Tree { input, dot } => {
            let p = load(&input.term, input.depth)?;
            let tree = configuration_tree(&p);
            if dot {
                Ok(Output {
                    code: 0,
                    stdout: tree.to_dot(&p),
                    stderr: String::new(),
                })
            } else {
                Ok(Output::json(0, &tree.to_json(&p)))
            }
        }
        Command::Leq { pair, lang } => {
            let (l, r) = load_pair(&pair)?;
            let (relation, holds) = if lang {
                ("language", language_leq(l.bes(), r.bes()))
            } else {
                (
                    "simulation",
                    find_simulation(&l, &r, &options(&pair))?.holds(),
                )
            };
            Ok(Output::json(
                verdict(holds),
                &json!({"format": 1, "relation": relation, "holds": holds}),
            ))
        }
        Command::Simulate { pair } => {
            let (l, r) = load_pair(&pair)?;
            let v = find_simulation(&l, &r, &options(&pair))?;
            let mut doc = verdict_json(&v, &l, &r, pair.depth);
            doc["format"] = json!(1);
            Ok(Output::json(verdict(v.holds()), &doc))
        }
        Command::Equiv { pair } => {
            let (l, r) = load_pair(&pair)?;
            let eq = check_equivalence(&l, &r, &options(&pair))?;
            let doc = json!({
                "format": 1,
                "holds": eq.holds(),
                "forward": verdict_json(&eq.forward, &l, &r, pair.depth),
                "backward": verdict_json(&eq.backward, &r, &l, pair.depth),
            });
            Ok(Output::json(verdict(eq.holds()), &doc))
        }
        Command::VerifyWitness { witness } => {
            let doc = read_json(&witness)?;
            let side = |k: &str| -> std::result::Result<Pbes, Fail> {
                let v = doc
                    .get(k)
                    .ok_or_else(|| Fail::Usage(format!("witness without `{k}`")))?;
                Ok(Pbes::from_json(v)?)
            };
            let (l, r) = (side("lhs")?, side("rhs")?);
            let w = SimWitness::from_json(&doc, &l, &r)?;
            let v = match verify_witness(&l, &r, &w)? {
                Ok(()) => json!({"format": 1, "valid": true}),
                Err(f) => json!({"format": 1, "valid": false, "failure": f.to_string()}),
            };
            let ok = v["valid"].as_bool().unwrap_or(false);
            Ok(Output::json(verdict(ok), &v))
        }
        Command::Axioms { grid } => {
            let g = Grid::from_json(&read_json(&grid)?)?;
            let report = run_axiom_suite(&g)?;
            Ok(Output::json(verdict(report.pass()), &report.to_json()))
        }
    }
}

fn options(pair: &Pair) -> SearchOptions {
    SearchOptions {
        vertex_limit: pair.vertex_limit,
        ..SearchOptions::default()
    }
}

fn load_pair(pair: &Pair) -> std::result::Result<(Pbes, Pbes), Fail> {
    Ok((load(&pair.lhs, pair.depth)?, load(&pair.rhs, pair.depth)?))
}

fn elaborate(input: &Input, plain: bool, prob: bool) -> Run {
    if let Some(path) = input.term.strip_prefix('@') {
        let p = load(&input.term, input.depth)?;
        let report = validate_pbes(&p);
        if !report.is_valid() {
            return Err(Fail::Usage(format!("{path}: {report}")));
        }
        return Ok(Output::json(
            0,
            &if plain {
                p.bes().to_json()
            } else {
                p.to_json()
            },
        ));
    }
    let t = parse_term(&input.term)?;
    let depth = depth_for(&t, input.depth)?;
    let v = if plain || (!prob && !t.has_pchoice()) {
        elaborate_plain(&t, depth)?.to_json()
    } else {
        elaborate_pbes(&t, depth)?.to_json()
    };
    Ok(Output::json(0, &v))
}

fn confusion_json(b: &Bes, space: &ConfigSpace, c: &Confusion) -> Value {
    match c {
        Confusion::Immediate { e, e2 } => json!({
            "kind": "immediate",
            "pair": [b.event(*e), b.event(*e2)],
        }),
        Confusion::Enabling { x, e, e2 } => json!({
            "kind": "enabling",
            "config": ids(b, space.get(*x)),
            "pair": [b.event(*e), b.event(*e2)],
        }),
    }
}

fn verdict_json(v: &Verdict, l: &Pbes, r: &Pbes, depth: Option<usize>) -> Value {
    match v {
        Verdict::Holds(w) => json!({"verdict": "holds", "witness": w.to_json(l, r, depth)}),
        Verdict::NotFoundWithinSearchSpace(d) => {
            let dist = |p: &Pbes, t: &pbes::dist::Dist<EventSet>| -> Value {
                t.iter()
                    .map(|(y, w)| json!({"config": ids(p.bes(), y), "p": format_rational(w)}))
                    .collect()
            };
            let configs = |xs: &[EventSet]| xs.iter().map(|x| ids(l.bes(), x)).collect::<Vec<_>>();
            json!({
                "verdict": "not_found_within_search_space",
                "diagnostic": {
                    "unmatched": configs(&d.unmatched),
                    "emptied": configs(&d.emptied),
                    "root_failure": d.root_failure.as_ref().map(|f| json!({
                        "config": ids(l.bes(), &f.config),
                        "theta": dist(r, &f.theta),
                        "step": dist(l, &f.step),
                    })),
                },
            })
        }
    }
}
