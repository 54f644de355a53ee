//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use pbes::pbes::{elaborate_pbes, Pbes};
use pbes::pes::Pes;
use pbes::rational::rat;
use pbes::{Bes, BesParts, Error, EventId, Term};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn id(s: &str) -> EventId {
    s.parse().unwrap()
}

#[derive(Clone, Copy)]
pub struct TermShape {
    pub max_size: usize,
    pub pchoice: bool,
    pub star: bool,
    pub constants: bool,
}

impl TermShape {
    pub const REGULAR: TermShape = TermShape {
        max_size: 6,
        pchoice: true,
        star: true,
        constants: true,
    };
    pub const LARGE: TermShape = TermShape {
        max_size: 9,
        pchoice: true,
        star: true,
        constants: true,
    };
    pub const PLAIN: TermShape = TermShape {
        max_size: 6,
        pchoice: false,
        star: true,
        constants: true,
    };
}

const ATOMS: [&str; 3] = ["a", "b", "c"];
const ALPHAS: [(i64, i64); 3] = [(1, 2), (1, 5), (2, 3)];

/// A term with at most `shape.max_size` nodes, biased towards the larger
/// sizes.
pub fn random_term(r: &mut ChaCha8Rng, shape: TermShape) -> Term {
    let size = r.gen_range(shape.max_size.div_ceil(2)..=shape.max_size);
    term_of_size(r, size, shape)
}

fn leaf(r: &mut ChaCha8Rng, shape: TermShape) -> Term {
    if shape.constants && r.gen_bool(0.1) {
        if r.gen_bool(0.5) {
            Term::Zero
        } else {
            Term::One
        }
    } else {
        Term::action(ATOMS.choose(r).unwrap())
    }
}

fn term_of_size(r: &mut ChaCha8Rng, size: usize, shape: TermShape) -> Term {
    if size < 3 {
        return leaf(r, shape);
    }
    let left = r.gen_range(1..size - 1);
    let (l, rt) = (
        term_of_size(r, left, shape),
        term_of_size(r, size - 1 - left, shape),
    );
    let mut ops = vec![0, 1, 2];
    if shape.star {
        ops.push(3);
    }
    if shape.pchoice {
        ops.push(4);
    }
    match *ops.choose(r).unwrap() {
        0 => Term::plus(l, rt),
        1 => Term::seq(l, rt),
        2 => Term::par(l, rt),
        3 => Term::star(l, rt),
        _ => {
            let (p, q) = *ALPHAS.choose(r).unwrap();
            Term::pchoice(l, rat(p, q), rt)
        }
    }
}

/// Elaborates a random term, redrawing on degenerate probabilistic choices
/// and oversized structures.
pub fn random_pbes(
    r: &mut ChaCha8Rng,
    shape: TermShape,
    depth: usize,
    max_events: usize,
) -> (Term, Pbes) {
    loop {
        let t = random_term(r, shape);
        match elaborate_pbes(&t, Some(depth)) {
            Ok(p) if p.bes().len() <= max_events => return (t, p),
            Ok(_) | Err(Error::DegenerateChoice) => continue,
            Err(e) => panic!("elaborating {t}: {e}"),
        }
    }
}

/// A prime event structure on `e0..e{n-1}`: causality follows index order,
/// conflicts are drawn among causally unrelated pairs and closed upwards.
pub fn random_pes(r: &mut ChaCha8Rng, max_events: usize) -> Pes {
    loop {
        let n = r.gen_range(1..=max_events);
        let mut below = vec![vec![false; n]; n];
        let mut causes = Vec::new();
        for j in 0..n {
            below[j][j] = true;
            for i in 0..j {
                if r.gen_bool(0.3) {
                    causes.push((i, j));
                }
            }
        }
        for &(i, j) in &causes {
            below[j][i] = true;
        }
        for k in 0..n {
            for j in 0..n {
                if below[j][k] {
                    for i in 0..n {
                        if below[k][i] {
                            below[j][i] = true;
                        }
                    }
                }
            }
        }
        let mut conflict = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if !below[j][i] && r.gen_bool(0.3) {
                    conflict[i][j] = true;
                    conflict[j][i] = true;
                }
            }
        }
        // Heredity: e # e' and e' <= e'' give e # e''.
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if !conflict[i][j] {
                        continue;
                    }
                    for k in 0..n {
                        if below[k][j] && !conflict[i][k] {
                            conflict[i][k] = true;
                            conflict[k][i] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if (0..n).any(|i| conflict[i][i]) {
            continue;
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| conflict[i][j])
            .collect();
        let events = (0..n)
            .map(|i| (id(&format!("e{i}")), Some(ATOMS[i % 3].to_string())))
            .collect();
        return Pes::new(events, &causes, &pairs).expect("generated structure is a PES");
    }
}

/// A BES on `e0..e{n-1}` whose bundle sets are conflict cliques; finals are
/// left empty so that any bundle set is admissible.
pub fn random_bes(r: &mut ChaCha8Rng, max_events: usize) -> Bes {
    let n = r.gen_range(1..=max_events);
    let mut conflict = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if r.gen_bool(0.35) {
                conflict[i][j] = true;
                conflict[j][i] = true;
            }
        }
    }
    let mut parts = BesParts::default();
    let ev = |i: usize| id(&format!("e{i}"));
    for i in 0..n {
        parts.event(ev(i), Some(ATOMS[i % 3]));
    }
    for i in 0..n {
        for j in i + 1..n {
            if conflict[i][j] {
                parts.conflict(ev(i), ev(j));
            }
        }
    }
    for target in 0..n {
        for _ in 0..r.gen_range(0..=2) {
            // Grow a clique greedily from a random start.
            let mut order: Vec<usize> = (0..n).filter(|&i| i != target).collect();
            order.shuffle(r);
            let mut clique: Vec<usize> = Vec::new();
            for i in order {
                if clique.iter().all(|&c| conflict[c][i]) && (clique.is_empty() || r.gen_bool(0.6))
                {
                    clique.push(i);
                }
            }
            if !clique.is_empty() {
                parts.bundle(clique.into_iter().map(ev), ev(target));
            }
        }
    }
    parts.build().expect("generated structure is a BES")
}
