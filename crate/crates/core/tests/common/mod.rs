//! Random problem generators and a reference evaluator shared by the
//! integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::rngs::StdRng;
use rand::Rng;

use sli::logic::{
    name, ArithOp, CmpOp, Codomain, Domain, Domains, Formula, FunctionTable, Name, Quantifier, Relation, Structure,
    Term, TypeKind, Variable, Vocabulary,
};

// ---------------------------------------------------------------------------
// Reference semantics

/// Variable bindings as (name, element index), innermost last.
pub type Env = Vec<(Name, u32)>;

fn lookup(env: &Env, v: &Variable) -> u32 {
    env.iter().rev().find(|(n, _)| *n == v.name).expect("bound variable").1
}

/// Canonical value of a term: element index for enumerated types, the
/// integer otherwise.
pub fn value(s: &Structure, t: &Term, env: &Env) -> i64 {
    match t {
        Term::Var(v) => s.domain(&v.ty).unwrap().value_of(lookup(env, v)),
        Term::Elem { name, ty } => s.domain(ty).unwrap().index_of(name).unwrap() as i64,
        Term::Int(k) => *k,
        Term::App { func, args } => {
            let decl = s.vocabulary().function(func).unwrap();
            let idx = indices(s, &decl.args, args, env);
            s.function(func).unwrap().get(&idx).unwrap()
        }
        Term::Arith { op, lhs, rhs } => {
            let (a, b) = (value(s, lhs, env), value(s, rhs, env));
            match op {
                ArithOp::Add => a + b,
                ArithOp::Sub => a - b,
                ArithOp::Mul => a * b,
            }
        }
    }
}

fn indices(s: &Structure, params: &[Name], args: &[Term], env: &Env) -> Vec<u32> {
    params
        .iter()
        .zip(args)
        .map(|(ty, a)| s.domain(ty).unwrap().index_of_value(value(s, a, env)).unwrap())
        .collect()
}

pub fn truth(s: &Structure, f: &Formula, env: &mut Env) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom { pred, args } => {
            let params = s.vocabulary().predicate(pred).unwrap();
            let idx = indices(s, params, args, env);
            s.relation(pred).unwrap().tuples().any(|t| t == idx)
        }
        Formula::Compare { op, lhs, rhs } => {
            let (a, b) = (value(s, lhs, env), value(s, rhs, env));
            match op {
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
            }
        }
        Formula::Not(g) => !truth(s, g, env),
        Formula::And(a, b) => truth(s, a, env) & truth(s, b, env),
        Formula::Or(a, b) => truth(s, a, env) | truth(s, b, env),
        Formula::Implies(a, b) => !truth(s, a, env) | truth(s, b, env),
        Formula::Equiv(a, b) => truth(s, a, env) == truth(s, b, env),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let mut results = Vec::new();
            for d in 0..s.extent(&v.ty) as u32 {
                env.push((v.name.clone(), d));
                results.push(truth(s, body, env));
                env.pop();
            }
            if matches!(f, Formula::ForAll(..)) {
                results.iter().all(|&b| b)
            } else {
                results.iter().any(|&b| b)
            }
        }
    }
}

/// All tuples over `extents` in lexicographic order.
pub fn tuples(extents: &[usize]) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for &e in extents {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..e as u32).map(move |d| {
                    let mut t = t.clone();
                    t.push(d);
                    t
                })
            })
            .collect();
    }
    out
}

/// The satisfying set of `f` over `vars` by enumerating every tuple.
pub fn enumerate_satset(s: &Structure, f: &Formula, vars: &[Variable]) -> Vec<Vec<u32>> {
    let extents: Vec<usize> = vars.iter().map(|v| s.extent(&v.ty)).collect();
    tuples(&extents)
        .into_iter()
        .filter(|t| {
            let mut env: Env = vars.iter().zip(t).map(|(v, &d)| (v.name.clone(), d)).collect();
            truth(s, f, &mut env)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Fully interpreted random worlds

/// Vocabulary: `A` enumerated, `B` an integer interval, `p(A)`, `r(A, A)`,
/// `s(A, B)`, `z`, `f(A) -> B`, `g(B) -> Int[-3..3]`, `c -> A`.
pub fn random_world(rng: &mut StdRng, max_size: usize) -> Structure {
    let na = rng.gen_range(1..=max_size);
    let nb = rng.gen_range(1..=max_size);
    let lo: i64 = rng.gen_range(-2..=2);
    let hi = lo + nb as i64 - 1;
    let mut voc = Vocabulary::new();
    voc.add_type(name("A"), TypeKind::Enumerated).unwrap();
    voc.add_type(name("B"), TypeKind::Interval { lo, hi }).unwrap();
    voc.add_predicate(name("p"), vec![name("A")]).unwrap();
    voc.add_predicate(name("r"), vec![name("A"), name("A")]).unwrap();
    voc.add_predicate(name("s"), vec![name("A"), name("B")]).unwrap();
    voc.add_predicate(name("z"), vec![]).unwrap();
    voc.add_function(name("f"), vec![name("A")], Codomain::Type(name("B")))
        .unwrap();
    voc.add_function(name("g"), vec![name("B")], Codomain::Interval { lo: -3, hi: 3 })
        .unwrap();
    voc.add_function(name("c"), vec![], Codomain::Type(name("A"))).unwrap();
    let mut domains = Domains::new();
    domains
        .insert(name("A"), Domain::enumerated((0..na).map(|i| format!("a{i}"))).unwrap())
        .unwrap();
    domains.insert(name("B"), Domain::interval(lo, hi)).unwrap();
    let mut s = Structure::new(Arc::new(voc), Arc::new(domains)).unwrap();
    let density: f64 = rng.gen_range(0.0..1.0);
    s.set_relation("p", random_relation(rng, vec![na], density)).unwrap();
    s.set_relation("r", random_relation(rng, vec![na, na], density))
        .unwrap();
    s.set_relation("s", random_relation(rng, vec![na, nb], density))
        .unwrap();
    s.set_relation("z", random_relation(rng, vec![], density)).unwrap();
    let f: Vec<i64> = (0..na).map(|_| rng.gen_range(lo..=hi)).collect();
    s.set_function("f", FunctionTable::new(vec![na], f).unwrap()).unwrap();
    let g: Vec<i64> = (0..nb).map(|_| rng.gen_range(-3..=3)).collect();
    s.set_function("g", FunctionTable::new(vec![nb], g).unwrap()).unwrap();
    let c = rng.gen_range(0..na as i64);
    s.set_function("c", FunctionTable::new(vec![], vec![c]).unwrap())
        .unwrap();
    s
}

pub fn random_relation(rng: &mut StdRng, extents: Vec<usize>, density: f64) -> Relation {
    let all = tuples(&extents);
    Relation::from_tuples(extents, all.into_iter().filter(|_| rng.gen_bool(density))).unwrap()
}

pub fn world_vars() -> Vec<Variable> {
    vec![
        Variable::new("x", "A"),
        Variable::new("y", "A"),
        Variable::new("i", "B"),
    ]
}

fn a_term(rng: &mut StdRng, s: &Structure, depth: usize) -> Term {
    let na = s.extent("A");
    match rng.gen_range(0..if depth > 0 { 5 } else { 4 }) {
        0 => Term::var("x", "A"),
        1 => Term::var("y", "A"),
        2 => Term::elem(&format!("a{}", rng.gen_range(0..na)), "A"),
        3 => Term::app("c", vec![]),
        _ => Term::var(if rng.gen() { "x" } else { "y" }, "A"),
    }
}

fn b_term(rng: &mut StdRng, s: &Structure, depth: usize) -> Term {
    if depth > 0 && rng.gen_bool(0.4) {
        Term::app("f", vec![a_term(rng, s, depth - 1)])
    } else {
        Term::var("i", "B")
    }
}

fn int_term(rng: &mut StdRng, s: &Structure, depth: usize) -> Term {
    match rng.gen_range(0..if depth > 0 { 5 } else { 3 }) {
        0 => Term::var("i", "B"),
        1 => Term::Int(rng.gen_range(-3..=3)),
        2 => b_term(rng, s, depth),
        3 => Term::app("g", vec![b_term(rng, s, depth - 1)]),
        _ => {
            let op = [ArithOp::Add, ArithOp::Sub, ArithOp::Mul][rng.gen_range(0..3)];
            Term::arith(op, int_term(rng, s, depth - 1), int_term(rng, s, depth - 1))
        }
    }
}

fn world_leaf(rng: &mut StdRng, s: &Structure) -> Formula {
    match rng.gen_range(0..7) {
        0 => Formula::atom("p", vec![a_term(rng, s, 1)]),
        1 => Formula::atom("r", vec![a_term(rng, s, 1), a_term(rng, s, 1)]),
        2 => Formula::atom("s", vec![a_term(rng, s, 1), b_term(rng, s, 1)]),
        3 => Formula::atom("z", vec![]),
        4 => {
            let op = if rng.gen() { CmpOp::Eq } else { CmpOp::Ne };
            Formula::compare(op, a_term(rng, s, 1), a_term(rng, s, 1))
        }
        _ => {
            let ops = [CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge];
            Formula::compare(ops[rng.gen_range(0..6)], int_term(rng, s, 2), int_term(rng, s, 2))
        }
    }
}

/// A random formula of depth at most `depth` over `x, y : A` and `i : B`.
pub fn random_world_formula(rng: &mut StdRng, s: &Structure, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return world_leaf(rng, s);
    }
    let vars = world_vars();
    let sub = |rng: &mut StdRng| random_world_formula(rng, s, depth - 1);
    match rng.gen_range(0..7) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::equiv(sub(rng), sub(rng)),
        5 => Formula::forall(vars[rng.gen_range(0..3)].clone(), sub(rng)),
        _ => Formula::exists(vars[rng.gen_range(0..3)].clone(), sub(rng)),
    }
}

// ---------------------------------------------------------------------------
// Model expansion problems

/// A problem with interpreted `p(A)`, `r(A, A)`, `f(A) -> A` and open
/// `u(A)` plus one of `v(A, A)`, `v(A)` or `h(A) -> A`.
pub struct MxProblem {
    pub s0: Structure,
    pub theory: Vec<Formula>,
    /// Open symbols and their argument extents.
    pub open_preds: Vec<(Name, Vec<usize>)>,
    pub open_funcs: Vec<(Name, Vec<usize>)>,
}

pub fn random_mx(rng: &mut StdRng) -> MxProblem {
    let n = rng.gen_range(1..=4);
    let mut voc = Vocabulary::new();
    voc.add_type(name("A"), TypeKind::Enumerated).unwrap();
    voc.add_predicate(name("p"), vec![name("A")]).unwrap();
    voc.add_predicate(name("r"), vec![name("A"), name("A")]).unwrap();
    voc.add_function(name("f"), vec![name("A")], Codomain::Type(name("A")))
        .unwrap();
    voc.add_predicate(name("u"), vec![name("A")]).unwrap();
    let mut open_preds = vec![(name("u"), vec![n])];
    let mut open_funcs = vec![];
    let second = match (n, rng.gen_range(0..3)) {
        (1..=2, 0) => {
            voc.add_predicate(name("v"), vec![name("A"), name("A")]).unwrap();
            open_preds.push((name("v"), vec![n, n]));
            "v2"
        }
        (1..=3, 1) => {
            voc.add_function(name("h"), vec![name("A")], Codomain::Type(name("A")))
                .unwrap();
            open_funcs.push((name("h"), vec![n]));
            "h"
        }
        _ => {
            voc.add_predicate(name("v"), vec![name("A")]).unwrap();
            open_preds.push((name("v"), vec![n]));
            "v1"
        }
    };
    let mut domains = Domains::new();
    domains
        .insert(name("A"), Domain::enumerated((0..n).map(|i| format!("a{i}"))).unwrap())
        .unwrap();
    let mut s0 = Structure::new(Arc::new(voc), Arc::new(domains)).unwrap();
    let density = rng.gen_range(0.0..1.0);
    s0.set_relation("p", random_relation(rng, vec![n], density)).unwrap();
    s0.set_relation("r", random_relation(rng, vec![n, n], density)).unwrap();
    let f: Vec<i64> = (0..n).map(|_| rng.gen_range(0..n as i64)).collect();
    s0.set_function("f", FunctionTable::new(vec![n], f).unwrap()).unwrap();

    let k = rng.gen_range(1..=2);
    let theory = (0..k).map(|_| random_mx_sentence(rng, n, second)).collect();
    MxProblem {
        s0,
        theory,
        open_preds,
        open_funcs,
    }
}

fn mx_term(rng: &mut StdRng, n: usize, second: &str, depth: usize) -> Term {
    let vars = ["x", "y", "z"];
    match rng.gen_range(0..if depth > 0 { 4 } else { 2 }) {
        0 => Term::var(vars[rng.gen_range(0..3)], "A"),
        1 if rng.gen_bool(0.3) => Term::elem(&format!("a{}", rng.gen_range(0..n)), "A"),
        1 => Term::var(vars[rng.gen_range(0..3)], "A"),
        2 => Term::app("f", vec![mx_term(rng, n, second, depth - 1)]),
        _ if second == "h" => Term::app("h", vec![mx_term(rng, n, second, depth - 1)]),
        _ => Term::var(vars[rng.gen_range(0..3)], "A"),
    }
}

fn mx_leaf(rng: &mut StdRng, n: usize, second: &str) -> Formula {
    let t = |rng: &mut StdRng| mx_term(rng, n, second, 1);
    match rng.gen_range(0..6) {
        0 => Formula::atom("p", vec![t(rng)]),
        1 => Formula::atom("r", vec![t(rng), t(rng)]),
        2 => Formula::atom("u", vec![t(rng)]),
        3 if second == "v2" => Formula::atom("v", vec![t(rng), t(rng)]),
        3 if second == "v1" => Formula::atom("v", vec![t(rng)]),
        3 => Formula::atom("u", vec![t(rng)]),
        4 => Formula::compare(CmpOp::Eq, t(rng), t(rng)),
        _ => Formula::compare(CmpOp::Ne, t(rng), t(rng)),
    }
}

fn mx_formula(rng: &mut StdRng, n: usize, second: &str, depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return mx_leaf(rng, n, second);
    }
    let sub = |rng: &mut StdRng| mx_formula(rng, n, second, depth - 1);
    let v = Variable::new(["x", "y", "z"][rng.gen_range(0..3)], "A");
    match rng.gen_range(0..7) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::equiv(sub(rng), sub(rng)),
        5 => Formula::forall(v, sub(rng)),
        _ => Formula::exists(v, sub(rng)),
    }
}

/// A random sentence: free variables are closed off with random quantifiers.
pub fn random_mx_sentence(rng: &mut StdRng, n: usize, second: &str) -> Formula {
    let mut f = mx_formula(rng, n, second, 4);
    for v in f.free_variables().into_iter().rev() {
        let q = if rng.gen() {
            Quantifier::ForAll
        } else {
            Quantifier::Exists
        };
        f = Formula::quantified(q, v, f);
    }
    f
}

/// Every interpretation of the open symbols, each as a structure holding
/// only those symbols.
pub fn expansions(p: &MxProblem) -> Vec<Structure> {
    let voc = p.s0.vocabulary().clone();
    let domains = p.s0.domains().clone();
    let mut out = vec![Structure::new(voc, domains).unwrap()];
    for (sym, extents) in &p.open_preds {
        let all = tuples(extents);
        let mut next = Vec::new();
        for s in &out {
            for mask in 0u64..1 << all.len() {
                let chosen = all
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, t)| t.clone());
                let mut s = s.clone();
                s.set_relation(sym, Relation::from_tuples(extents.clone(), chosen).unwrap())
                    .unwrap();
                next.push(s);
            }
        }
        out = next;
    }
    for (sym, extents) in &p.open_funcs {
        let n = p.s0.extent("A");
        let cells: usize = extents.iter().product();
        let tables = tuples(&vec![n; cells]);
        let mut next = Vec::new();
        for s in &out {
            for t in &tables {
                let mut s = s.clone();
                let values = t.iter().map(|&v| v as i64).collect();
                s.set_function(sym, FunctionTable::new(extents.clone(), values).unwrap())
                    .unwrap();
                next.push(s);
            }
        }
        out = next;
    }
    out
}

/// `s0` extended with the open-symbol interpretations of `s1`.
pub fn join(s0: &Structure, s1: &Structure) -> Structure {
    let mut s = s0.clone();
    for (sym, rel) in s1.relations() {
        s.set_relation(sym, rel.clone()).unwrap();
    }
    for (sym, table) in s1.functions() {
        s.set_function(sym, table.clone()).unwrap();
    }
    s
}
