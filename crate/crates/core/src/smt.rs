//! SMT-LIB 2 output for ground theories.
//!
//! Enumerated types become datatypes with one nullary constructor per
//! element. Each ground atom becomes a Boolean constant and each ground
//! function term a constant of its codomain, named `symbol!arg1!arg2`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write;

use crate::ground::{GroundApp, GroundFormula, GroundTerm, GroundTheory, Verdict};
use crate::logic::{CmpOp, Codomain, Name, TypeKind};

const RESERVED: &[&str] = &[
    "true",
    "false",
    "not",
    "and",
    "or",
    "xor",
    "=>",
    "ite",
    "distinct",
    "let",
    "forall",
    "exists",
    "match",
    "par",
    "as",
    "assert",
    "check-sat",
    "declare-const",
    "declare-fun",
    "declare-datatypes",
    "define-fun",
    "set-logic",
    "set-option",
    "Bool",
    "Int",
    "Real",
    "BINARY",
    "DECIMAL",
    "HEXADECIMAL",
    "NUMERAL",
    "STRING",
    "_",
    "!",
];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Type(Name),
    Elem(Name, u32),
    Atom(GroundApp),
    Term(GroundApp),
}

/// Assigns each entity a distinct legal symbol, in request order.
#[derive(Debug, Default)]
struct Namer {
    used: HashSet<String>,
    names: HashMap<Key, String>,
}

fn sanitize(s: &str) -> String {
    let mut out: String = s
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c) {
                c
            } else {
                '_'
            }
        })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

impl Namer {
    fn new() -> Self {
        Self {
            used: RESERVED.iter().map(|s| s.to_string()).collect(),
            names: HashMap::new(),
        }
    }

    fn name(&mut self, key: Key, wanted: &str) -> String {
        if let Some(n) = self.names.get(&key) {
            return n.clone();
        }
        let base = sanitize(wanted);
        let mut candidate = base.clone();
        let mut k = 1;
        while self.used.contains(&candidate) {
            candidate = format!("{base}_{k}");
            k += 1;
        }
        self.used.insert(candidate.clone());
        self.names.insert(key, candidate.clone());
        candidate
    }

    fn get(&self, key: &Key) -> &str {
        self.names.get(key).map(String::as_str).expect("named before use")
    }
}

fn int(v: i64) -> String {
    if v < 0 {
        format!("(- {})", v.unsigned_abs())
    } else {
        v.to_string()
    }
}

struct Emitter<'t> {
    theory: &'t GroundTheory,
    namer: Namer,
}

impl Emitter<'_> {
    fn app_name(&self, app: &GroundApp) -> String {
        let voc = &self.theory.vocabulary;
        let params: &[Name] = voc
            .predicate(&app.symbol)
            .or_else(|| voc.function(&app.symbol).map(|d| &d.args[..]))
            .unwrap_or(&[]);
        let mut s = app.symbol.to_string();
        for (i, &v) in app.args.iter().enumerate() {
            s.push('!');
            match params.get(i).and_then(|ty| self.theory.domains.get(ty)) {
                Some(d) if d.interval_bounds().is_none() && v >= 0 && (v as usize) < d.len() => {
                    s.push_str(d.element_name(v as u32))
                }
                _ => s.push_str(&v.to_string()),
            }
        }
        s
    }

    fn term(&self, t: &GroundTerm, out: &mut String) {
        match t {
            GroundTerm::Elem { ty, index } => out.push_str(self.namer.get(&Key::Elem(ty.clone(), *index))),
            GroundTerm::Int(v) => out.push_str(&int(*v)),
            GroundTerm::Func(app) => out.push_str(self.namer.get(&Key::Term(app.clone()))),
            GroundTerm::Arith { op, lhs, rhs } => {
                let _ = write!(out, "({} ", op.symbol());
                self.term(lhs, out);
                out.push(' ');
                self.term(rhs, out);
                out.push(')');
            }
            GroundTerm::Ite { cond, then, other } => {
                out.push_str("(ite ");
                self.formula(cond, out);
                out.push(' ');
                self.term(then, out);
                out.push(' ');
                self.term(other, out);
                out.push(')');
            }
        }
    }

    fn formula(&self, f: &GroundFormula, out: &mut String) {
        match f {
            GroundFormula::True => out.push_str("true"),
            GroundFormula::False => out.push_str("false"),
            GroundFormula::Atom(app) => out.push_str(self.namer.get(&Key::Atom(app.clone()))),
            GroundFormula::Compare { op, lhs, rhs } => {
                let sym = match op {
                    CmpOp::Eq => "=",
                    CmpOp::Ne => "distinct",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                let _ = write!(out, "({sym} ");
                self.term(lhs, out);
                out.push(' ');
                self.term(rhs, out);
                out.push(')');
            }
            GroundFormula::Not(g) => {
                out.push_str("(not ");
                self.formula(g, out);
                out.push(')');
            }
            GroundFormula::And(v) | GroundFormula::Or(v) => {
                out.push_str(if matches!(f, GroundFormula::And(_)) {
                    "(and"
                } else {
                    "(or"
                });
                for g in v {
                    out.push(' ');
                    self.formula(g, out);
                }
                out.push(')');
            }
        }
    }
}

fn collect_types(f: &GroundFormula, out: &mut HashSet<Name>) {
    fn term(t: &GroundTerm, out: &mut HashSet<Name>) {
        match t {
            GroundTerm::Elem { ty, .. } => {
                out.insert(ty.clone());
            }
            GroundTerm::Int(_) | GroundTerm::Func(_) => {}
            GroundTerm::Arith { lhs, rhs, .. } => {
                term(lhs, out);
                term(rhs, out);
            }
            GroundTerm::Ite { cond, then, other } => {
                collect_types(cond, out);
                term(then, out);
                term(other, out);
            }
        }
    }
    match f {
        GroundFormula::Compare { lhs, rhs, .. } => {
            term(lhs, out);
            term(rhs, out);
        }
        GroundFormula::Not(g) => collect_types(g, out),
        GroundFormula::And(v) | GroundFormula::Or(v) => v.iter().for_each(|g| collect_types(g, out)),
        _ => {}
    }
}

/// Renders `theory` as an SMT-LIB 2 script ending in `(check-sat)`.
pub fn emit_smt(theory: &GroundTheory) -> String {
    let voc = &theory.vocabulary;
    let mut out = String::new();
    let logic = if theory.uses_integers() {
        "QF_UFDTLIA"
    } else {
        "QF_UFDT"
    };
    let _ = writeln!(out, "(set-logic {logic})");
    let decls = theory.declarations();

    let mut used_types: HashSet<Name> = HashSet::new();
    for a in &theory.assertions {
        collect_types(a, &mut used_types);
    }
    for app in &decls.terms {
        if let Some(Codomain::Type(ty)) = voc.function(&app.symbol).map(|d| &d.codomain) {
            used_types.insert(ty.clone());
        }
    }

    let mut em = Emitter {
        theory,
        namer: Namer::new(),
    };
    for (ty, kind) in voc.types() {
        if matches!(kind, TypeKind::Interval { .. }) || !used_types.contains(ty) {
            continue;
        }
        let Some(dom) = theory.domains.get(ty) else { continue };
        if dom.interval_bounds().is_some() || dom.is_empty() {
            continue;
        }
        let tname = em.namer.name(Key::Type(ty.clone()), ty);
        let ctors: Vec<String> = (0..dom.len() as u32)
            .map(|i| {
                let n = em.namer.name(Key::Elem(ty.clone(), i), dom.element_name(i));
                format!("({n})")
            })
            .collect();
        let _ = writeln!(out, "(declare-datatypes (({tname} 0)) (({})))", ctors.join(" "));
    }

    for app in &decls.atoms {
        let n = em.app_name(app);
        let n = em.namer.name(Key::Atom(app.clone()), &n);
        let _ = writeln!(out, "(declare-const {n} Bool)");
    }
    let mut bounds = Vec::new();
    for app in &decls.terms {
        let wanted = em.app_name(app);
        let n = em.namer.name(Key::Term(app.clone()), &wanted);
        let (sort, range) = match voc.function(&app.symbol).map(|d| &d.codomain) {
            Some(Codomain::Interval { lo, hi }) => ("Int".to_string(), Some((*lo, *hi))),
            Some(Codomain::Type(ty)) => match theory.domains.get(ty).and_then(|d| d.interval_bounds()) {
                Some(b) => ("Int".to_string(), Some(b)),
                None => (em.namer.get(&Key::Type(ty.clone())).to_string(), None),
            },
            None => ("Int".to_string(), None),
        };
        let _ = writeln!(out, "(declare-const {n} {sort})");
        if let Some((lo, hi)) = range {
            bounds.push(format!("(assert (<= {} {n}))", int(lo)));
            bounds.push(format!("(assert (<= {n} {}))", int(hi)));
        }
    }
    for b in bounds {
        let _ = writeln!(out, "{b}");
    }

    match theory.verdict {
        Verdict::Sat => out.push_str("(assert true)\n"),
        Verdict::Unsat => out.push_str("(assert false)\n"),
        Verdict::Open => {
            for a in &theory.assertions {
                out.push_str("(assert ");
                em.formula(a, &mut out);
                out.push_str(")\n");
            }
        }
    }
    out.push_str("(check-sat)\n");
    out
}
