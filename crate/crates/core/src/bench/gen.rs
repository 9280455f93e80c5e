//! Benchmark instance generators.
//!
//! CI asks whether `p` and `q` share an element (`?x in T: p(x) & q(x)`),
//! CS whether they cover the domain (`!x in T: p(x) | q(x)`), and TG whether
//! a sparse random digraph has a directed triangle. Elements are `e0..`,
//! nodes `n0..`.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use super::rng::SplitMix64;
use crate::logic::{name, Domain, Domains, Formula, Relation, Structure, Term, TypeKind, Variable, Vocabulary};
use crate::parser::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Ci,
    Cs,
    Tg,
}

impl Family {
    pub fn parse(s: &str) -> Option<Family> {
        match s.to_ascii_lowercase().as_str() {
            "ci" => Some(Family::Ci),
            "cs" => Some(Family::Cs),
            "tg" => Some(Family::Tg),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecError {
    #[error("size must be at least 1")]
    Size,
    #[error("ratio {0} is outside [0, 1]")]
    Ratio(f64),
    #[error("{0} needs a positive ratio")]
    ZeroRatio(&'static str),
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub family: Family,
    pub size: usize,
    /// CI-SAT: fraction of common elements. CI-UNSAT: fraction in neither
    /// set. CS-SAT: fraction in both. CS-UNSAT: fraction uncovered.
    pub ratio: f64,
    pub seed: u64,
    /// Which variant of CI/CS to generate; ignored for TG.
    pub sat: bool,
}

impl BenchSpec {
    /// `CI-SAT`, `CS-UNSAT`, `TG`, ...
    pub fn benchmark_id(&self) -> String {
        let v = if self.sat { "SAT" } else { "UNSAT" };
        match self.family {
            Family::Ci => format!("CI-{v}"),
            Family::Cs => format!("CS-{v}"),
            Family::Tg => "TG".to_string(),
        }
    }

    pub fn validate(&self) -> Result<(), SpecError> {
        if self.size == 0 {
            return Err(SpecError::Size);
        }
        if !(0.0..=1.0).contains(&self.ratio) {
            return Err(SpecError::Ratio(self.ratio));
        }
        if self.ratio == 0.0 {
            match (self.family, self.sat) {
                (Family::Ci, true) => return Err(SpecError::ZeroRatio("CI-SAT")),
                (Family::Cs, false) => return Err(SpecError::ZeroRatio("CS-UNSAT")),
                _ => {}
            }
        }
        Ok(())
    }

    /// `⌈ratio · size⌉`.
    pub fn special_count(&self) -> usize {
        ((self.ratio * self.size as f64).ceil() as usize).min(self.size)
    }
}

pub fn generate(spec: &BenchSpec) -> Result<Problem, SpecError> {
    spec.validate()?;
    Ok(match spec.family {
        Family::Ci | Family::Cs => gen_sets(spec),
        Family::Tg => gen_tg(spec),
    })
}

fn elements(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn gen_sets(spec: &BenchSpec) -> Problem {
    let n = spec.size;
    let mut voc = Vocabulary::new();
    voc.add_type(name("T"), TypeKind::Enumerated).expect("fresh");
    voc.add_predicate(name("p"), vec![name("T")]).expect("fresh");
    voc.add_predicate(name("q"), vec![name("T")]).expect("fresh");
    let mut domains = Domains::new();
    domains
        .insert(name("T"), Domain::enumerated(elements("e", n)).expect("distinct"))
        .expect("declared");

    let mut rng = SplitMix64::new(spec.seed);
    let mut order: Vec<u32> = (0..n as u32).collect();
    rng.shuffle(&mut order);
    let k = spec.special_count();
    // The first k shuffled elements go in both sets for the SAT variants and
    // in neither for the UNSAT ones.
    let both = spec.sat;
    let mut p = Relation::empty(vec![n]);
    let mut q = Relation::empty(vec![n]);
    for (i, &e) in order.iter().enumerate() {
        if i < k {
            if both {
                p.insert(&[e]);
                q.insert(&[e]);
            }
        } else if rng.coin() {
            p.insert(&[e]);
        } else {
            q.insert(&[e]);
        }
    }

    let vocabulary = Arc::new(voc);
    let mut s = Structure::new(vocabulary.clone(), Arc::new(domains)).expect("domains match");
    s.set_relation("p", p).expect("declared");
    s.set_relation("q", q).expect("declared");
    let x = Variable::new("x", "T");
    let px = Formula::atom("p", vec![Term::Var(x.clone())]);
    let qx = Formula::atom("q", vec![Term::Var(x.clone())]);
    let sentence = match spec.family {
        Family::Ci => Formula::exists(x, Formula::and(px, qx)),
        _ => Formula::forall(x, Formula::or(px, qx)),
    };
    Problem {
        vocabulary,
        theory: vec![sentence],
        structure: s,
    }
}

fn gen_tg(spec: &BenchSpec) -> Problem {
    let n = spec.size;
    let mut voc = Vocabulary::new();
    voc.add_type(name("Node"), TypeKind::Enumerated).expect("fresh");
    voc.add_predicate(name("edge"), vec![name("Node"), name("Node")])
        .expect("fresh");
    let mut domains = Domains::new();
    domains
        .insert(name("Node"), Domain::enumerated(elements("n", n)).expect("distinct"))
        .expect("declared");

    let m = if n >= 2 { n / 3 } else { 0 };
    let mut rng = SplitMix64::new(spec.seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Relation::empty(vec![n, n]);
    while seen.len() < m {
        let a = rng.below(n as u64) as u32;
        let b = rng.below(n as u64) as u32;
        if a != b && seen.insert((a, b)) {
            edges.insert(&[a, b]);
        }
    }

    let vocabulary = Arc::new(voc);
    let mut s = Structure::new(vocabulary.clone(), Arc::new(domains)).expect("domains match");
    s.set_relation("edge", edges).expect("declared");
    let [x, y, z] = ["x", "y", "z"].map(|v| Variable::new(v, "Node"));
    let e = |a: &Variable, b: &Variable| Formula::atom("edge", vec![Term::Var(a.clone()), Term::Var(b.clone())]);
    let body = Formula::and(Formula::and(e(&x, &y), e(&y, &z)), e(&z, &x));
    let sentence = Formula::exists(x, Formula::exists(y, Formula::exists(z, body)));
    Problem {
        vocabulary,
        theory: vec![sentence],
        structure: s,
    }
}

/// Whether the generated sentence is true, by direct scan of the relations.
pub fn expected_truth(p: &Problem) -> bool {
    let s = &p.structure;
    if let Some(edge) = s.relation("edge") {
        let n = edge.extents()[0];
        let succ: Vec<Vec<u32>> = {
            let mut v = vec![Vec::new(); n];
            for t in edge.tuples() {
                v[t[0] as usize].push(t[1]);
            }
            v
        };
        return (0..n as u32).any(|a| {
            succ[a as usize]
                .iter()
                .any(|&b| succ[b as usize].iter().any(|&c| edge.contains(&[c, a])))
        });
    }
    let (pr, qr) = (s.relation("p").expect("p"), s.relation("q").expect("q"));
    let n = pr.extents()[0] as u32;
    match p.theory[0].as_quantifier().map(|(q, ..)| q) {
        Some(crate::logic::Quantifier::Exists) => (0..n).any(|e| pr.contains(&[e]) && qr.contains(&[e])),
        _ => (0..n).all(|e| pr.contains(&[e]) || qr.contains(&[e])),
    }
}
