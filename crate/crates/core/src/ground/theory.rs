//! Quantifier-free ground formulas over ground atoms and function terms.

use std::collections::HashSet;
use std::sync::Arc;

use crate::logic::{ArithOp, CmpOp, Codomain, Domains, Name, Structure, Vocabulary};

/// A symbol applied to canonical argument values.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundApp {
    pub symbol: Name,
    pub args: Box<[i64]>,
}

impl GroundApp {
    pub fn new(symbol: Name, args: Vec<i64>) -> Self {
        Self {
            symbol,
            args: args.into_boxed_slice(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundTerm {
    /// Element `index` of an enumerated type.
    Elem {
        ty: Name,
        index: u32,
    },
    Int(i64),
    /// Value of a function symbol at a ground argument tuple.
    Func(GroundApp),
    Arith {
        op: ArithOp,
        lhs: Box<GroundTerm>,
        rhs: Box<GroundTerm>,
    },
    Ite {
        cond: Box<GroundFormula>,
        then: Box<GroundTerm>,
        other: Box<GroundTerm>,
    },
}

impl GroundTerm {
    /// Canonical value of a constant term.
    pub fn as_const(&self) -> Option<i64> {
        match self {
            GroundTerm::Elem { index, .. } => Some(*index as i64),
            GroundTerm::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn arith(op: ArithOp, lhs: GroundTerm, rhs: GroundTerm) -> Option<GroundTerm> {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => op.apply(a, b).map(GroundTerm::Int),
            _ => Some(GroundTerm::Arith {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            }),
        }
    }

    pub fn ite(cond: GroundFormula, then: GroundTerm, other: GroundTerm) -> GroundTerm {
        match cond {
            GroundFormula::True => then,
            GroundFormula::False => other,
            _ if then == other => then,
            cond => GroundTerm::Ite {
                cond: Box::new(cond),
                then: Box::new(then),
                other: Box::new(other),
            },
        }
    }

    fn is_integer(&self, voc: &Vocabulary) -> bool {
        match self {
            GroundTerm::Elem { .. } => false,
            GroundTerm::Int(_) | GroundTerm::Arith { .. } => true,
            GroundTerm::Func(app) => match voc.function(&app.symbol).map(|d| &d.codomain) {
                Some(Codomain::Type(ty)) => voc.is_interval_type(ty),
                _ => true,
            },
            GroundTerm::Ite { then, .. } => then.is_integer(voc),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroundFormula {
    True,
    False,
    Atom(GroundApp),
    Compare {
        op: CmpOp,
        lhs: GroundTerm,
        rhs: GroundTerm,
    },
    Not(Box<GroundFormula>),
    And(Vec<GroundFormula>),
    Or(Vec<GroundFormula>),
}

impl GroundFormula {
    pub fn from_bool(b: bool) -> Self {
        if b {
            GroundFormula::True
        } else {
            GroundFormula::False
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            GroundFormula::True => Some(true),
            GroundFormula::False => Some(false),
            _ => None,
        }
    }

    pub fn compare(op: CmpOp, lhs: GroundTerm, rhs: GroundTerm) -> Self {
        match (lhs.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => GroundFormula::from_bool(op.apply(a, b)),
            _ => GroundFormula::Compare { op, lhs, rhs },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: GroundFormula) -> Self {
        match f {
            GroundFormula::True => GroundFormula::False,
            GroundFormula::False => GroundFormula::True,
            GroundFormula::Not(g) => *g,
            f => GroundFormula::Not(Box::new(f)),
        }
    }

    /// Conjunction with constant absorption and flattening.
    pub fn and(parts: Vec<GroundFormula>) -> Self {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                GroundFormula::True => {}
                GroundFormula::False => return GroundFormula::False,
                GroundFormula::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => GroundFormula::True,
            1 => out.pop().expect("one element"),
            _ => GroundFormula::And(out),
        }
    }

    /// Disjunction with constant absorption and flattening.
    pub fn or(parts: Vec<GroundFormula>) -> Self {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                GroundFormula::False => {}
                GroundFormula::True => return GroundFormula::True,
                GroundFormula::Or(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => GroundFormula::False,
            1 => out.pop().expect("one element"),
            _ => GroundFormula::Or(out),
        }
    }

    pub fn for_each_app(&self, f: &mut impl FnMut(&GroundApp, bool)) {
        match self {
            GroundFormula::True | GroundFormula::False => {}
            GroundFormula::Atom(a) => f(a, true),
            GroundFormula::Compare { lhs, rhs, .. } => {
                term_apps(lhs, f);
                term_apps(rhs, f);
            }
            GroundFormula::Not(g) => g.for_each_app(f),
            GroundFormula::And(v) | GroundFormula::Or(v) => v.iter().for_each(|g| g.for_each_app(f)),
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            GroundFormula::Not(g) => 1 + g.size(),
            GroundFormula::And(v) | GroundFormula::Or(v) => 1 + v.iter().map(Self::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// Calls `f(app, is_atom)` on every ground function term inside `t`.
fn term_apps(t: &GroundTerm, f: &mut impl FnMut(&GroundApp, bool)) {
    match t {
        GroundTerm::Elem { .. } | GroundTerm::Int(_) => {}
        GroundTerm::Func(a) => f(a, false),
        GroundTerm::Arith { lhs, rhs, .. } => {
            term_apps(lhs, f);
            term_apps(rhs, f);
        }
        GroundTerm::Ite { cond, then, other } => {
            cond.for_each_app(f);
            term_apps(then, f);
            term_apps(other, f);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every expansion is a model.
    Sat,
    /// No expansion is a model.
    Unsat,
    Open,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Sat => "sat-trivial",
            Verdict::Unsat => "unsat-trivial",
            Verdict::Open => "open",
        }
    }
}

/// The ground constants a theory needs: atoms (Boolean) and function terms.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Declarations {
    pub atoms: Vec<GroundApp>,
    pub terms: Vec<GroundApp>,
}

/// Result of grounding a theory: a conjunction of assertions, or a verdict
/// when grounding already decided it.
#[derive(Debug, Clone)]
pub struct GroundTheory {
    pub vocabulary: Arc<Vocabulary>,
    pub domains: Arc<Domains>,
    pub assertions: Vec<GroundFormula>,
    pub verdict: Verdict,
}

impl GroundTheory {
    /// Builds a theory from a conjunction, splitting top-level conjuncts into
    /// separate assertions.
    pub fn from_formula(vocabulary: Arc<Vocabulary>, domains: Arc<Domains>, f: GroundFormula) -> Self {
        let (assertions, verdict) = match f {
            GroundFormula::True => (Vec::new(), Verdict::Sat),
            GroundFormula::False => (Vec::new(), Verdict::Unsat),
            GroundFormula::And(v) => (v, Verdict::Open),
            f => (vec![f], Verdict::Open),
        };
        Self {
            vocabulary,
            domains,
            assertions,
            verdict,
        }
    }

    /// Ground atoms and function terms in order of first occurrence.
    pub fn declarations(&self) -> Declarations {
        let mut seen: HashSet<(bool, GroundApp)> = HashSet::new();
        let mut out = Declarations::default();
        for a in &self.assertions {
            a.for_each_app(&mut |app, is_atom| {
                if seen.insert((is_atom, app.clone())) {
                    if is_atom {
                        out.atoms.push(app.clone());
                    } else {
                        out.terms.push(app.clone());
                    }
                }
            });
        }
        out
    }

    /// Symbols occurring in the assertions.
    pub fn symbols(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        for a in &self.assertions {
            a.for_each_app(&mut |app, _| {
                if !out.contains(&app.symbol) {
                    out.push(app.symbol.clone());
                }
            });
        }
        out
    }

    pub fn uses_integers(&self) -> bool {
        fn formula(f: &GroundFormula, voc: &Vocabulary) -> bool {
            match f {
                GroundFormula::True | GroundFormula::False | GroundFormula::Atom(_) => false,
                GroundFormula::Compare { lhs, rhs, .. } => term(lhs, voc) || term(rhs, voc),
                GroundFormula::Not(g) => formula(g, voc),
                GroundFormula::And(v) | GroundFormula::Or(v) => v.iter().any(|g| formula(g, voc)),
            }
        }
        fn term(t: &GroundTerm, voc: &Vocabulary) -> bool {
            match t {
                GroundTerm::Ite { cond, then, other } => formula(cond, voc) || term(then, voc) || term(other, voc),
                t => t.is_integer(voc),
            }
        }
        self.assertions.iter().any(|a| formula(a, &self.vocabulary))
            || self
                .declarations()
                .terms
                .iter()
                .any(|app| GroundTerm::Func(app.clone()).is_integer(&self.vocabulary))
    }

    /// Decides whether `s` (interpreting every symbol used) satisfies the
    /// theory.
    pub fn satisfied_by(&self, s: &Structure) -> Option<bool> {
        match self.verdict {
            Verdict::Sat => Some(true),
            Verdict::Unsat => Some(false),
            Verdict::Open => {
                for a in &self.assertions {
                    if !eval_formula(a, s)? {
                        return Some(false);
                    }
                }
                Some(true)
            }
        }
    }
}

fn indices(s: &Structure, params: &[Name], args: &[i64]) -> Option<Vec<u32>> {
    params
        .iter()
        .zip(args)
        .map(|(ty, &v)| s.domain(ty)?.index_of_value(v))
        .collect()
}

/// Truth value of a ground formula in `s`; `None` if a symbol is missing.
pub fn eval_formula(f: &GroundFormula, s: &Structure) -> Option<bool> {
    Some(match f {
        GroundFormula::True => true,
        GroundFormula::False => false,
        GroundFormula::Atom(app) => {
            let params = s.vocabulary().predicate(&app.symbol)?;
            s.relation(&app.symbol)?.contains(&indices(s, params, &app.args)?)
        }
        GroundFormula::Compare { op, lhs, rhs } => op.apply(eval_term(lhs, s)?, eval_term(rhs, s)?),
        GroundFormula::Not(g) => !eval_formula(g, s)?,
        GroundFormula::And(v) => {
            for g in v {
                if !eval_formula(g, s)? {
                    return Some(false);
                }
            }
            true
        }
        GroundFormula::Or(v) => {
            for g in v {
                if eval_formula(g, s)? {
                    return Some(true);
                }
            }
            false
        }
    })
}

pub fn eval_term(t: &GroundTerm, s: &Structure) -> Option<i64> {
    match t {
        GroundTerm::Elem { index, .. } => Some(*index as i64),
        GroundTerm::Int(v) => Some(*v),
        GroundTerm::Func(app) => {
            let decl = s.vocabulary().function(&app.symbol)?;
            s.function(&app.symbol)?.get(&indices(s, &decl.args, &app.args)?)
        }
        GroundTerm::Arith { op, lhs, rhs } => op.apply(eval_term(lhs, s)?, eval_term(rhs, s)?),
        GroundTerm::Ite { cond, then, other } => {
            if eval_formula(cond, s)? {
                eval_term(then, s)
            } else {
                eval_term(other, s)
            }
        }
    }
}
