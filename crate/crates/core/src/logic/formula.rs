use std::collections::HashSet;
use std::fmt;

use super::{name, Name};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    pub name: Name,
    pub ty: Name,
}

impl Variable {
    pub fn new(name: &str, ty: &str) -> Self {
        Self {
            name: super::name(name),
            ty: super::name(ty),
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

impl ArithOp {
    pub fn apply(self, a: i64, b: i64) -> Option<i64> {
        match self {
            ArithOp::Add => a.checked_add(b),
            ArithOp::Sub => a.checked_sub(b),
            ArithOp::Mul => a.checked_mul(b),
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ArithOp::Add => "+",
            ArithOp::Sub => "-",
            ArithOp::Mul => "*",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn apply(self, a: i64, b: i64) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, CmpOp::Eq | CmpOp::Ne)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "~=",
            CmpOp::Lt => "<",
            CmpOp::Le => "=<",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    ForAll,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Variable),
    /// An element of an enumerated type.
    Elem {
        name: Name,
        ty: Name,
    },
    Int(i64),
    App {
        func: Name,
        args: Vec<Term>,
    },
    Arith {
        op: ArithOp,
        lhs: Box<Term>,
        rhs: Box<Term>,
    },
}

impl Term {
    pub fn var(name: &str, ty: &str) -> Self {
        Term::Var(Variable::new(name, ty))
    }

    pub fn elem(name: &str, ty: &str) -> Self {
        Term::Elem {
            name: super::name(name),
            ty: super::name(ty),
        }
    }

    pub fn app(func: &str, args: Vec<Term>) -> Self {
        Term::App { func: name(func), args }
    }

    pub fn arith(op: ArithOp, lhs: Term, rhs: Term) -> Self {
        Term::Arith {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Elem { .. } | Term::Int(_) => {}
            Term::App { args, .. } => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Arith { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    /// Variables in order of first appearance.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn for_each_symbol(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Term::App { func, args } => {
                f(func);
                args.iter().for_each(|a| a.for_each_symbol(f));
            }
            Term::Arith { lhs, rhs, .. } => {
                lhs.for_each_symbol(f);
                rhs.for_each_symbol(f);
            }
            Term::Var(_) | Term::Elem { .. } | Term::Int(_) => {}
        }
    }

    fn rename(&self, from: &Variable, to: &Variable) -> Term {
        match self {
            Term::Var(v) if v == from => Term::Var(to.clone()),
            Term::App { func, args } => Term::App {
                func: func.clone(),
                args: args.iter().map(|a| a.rename(from, to)).collect(),
            },
            Term::Arith { op, lhs, rhs } => Term::Arith {
                op: *op,
                lhs: Box::new(lhs.rename(from, to)),
                rhs: Box::new(rhs.rename(from, to)),
            },
            other => other.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { pred: Name, args: Vec<Term> },
    Compare { op: CmpOp, lhs: Term, rhs: Term },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Equiv(Box<Formula>, Box<Formula>),
    ForAll(Variable, Box<Formula>),
    Exists(Variable, Box<Formula>),
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Self {
        Formula::Atom { pred: name(pred), args }
    }

    pub fn compare(op: CmpOp, lhs: Term, rhs: Term) -> Self {
        Formula::Compare { op, lhs, rhs }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn equiv(a: Formula, b: Formula) -> Self {
        Formula::Equiv(Box::new(a), Box::new(b))
    }

    pub fn forall(v: Variable, body: Formula) -> Self {
        Formula::ForAll(v, Box::new(body))
    }

    pub fn exists(v: Variable, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn quantified(q: Quantifier, v: Variable, body: Formula) -> Self {
        match q {
            Quantifier::ForAll => Formula::forall(v, body),
            Quantifier::Exists => Formula::exists(v, body),
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Formula::True
        } else {
            Formula::False
        }
    }

    pub fn as_quantifier(&self) -> Option<(Quantifier, &Variable, &Formula)> {
        match self {
            Formula::ForAll(v, b) => Some((Quantifier::ForAll, v, b)),
            Formula::Exists(v, b) => Some((Quantifier::Exists, v, b)),
            _ => None,
        }
    }

    fn collect_free(&self, bound: &mut Vec<Variable>, out: &mut Vec<Variable>) {
        let push_term = |t: &Term, bound: &Vec<Variable>, out: &mut Vec<Variable>| {
            for v in t.variables() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| push_term(t, bound, out)),
            Formula::Compare { lhs, rhs, .. } => {
                push_term(lhs, bound, out);
                push_term(rhs, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Free variables in order of first appearance.
    pub fn free_variables(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn free_variable_set(&self) -> HashSet<Variable> {
        self.free_variables().into_iter().collect()
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Calls `f` on every predicate and function symbol occurrence.
    pub fn for_each_symbol(&self, f: &mut impl FnMut(&Name)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { pred, args } => {
                f(pred);
                args.iter().for_each(|t| t.for_each_symbol(f));
            }
            Formula::Compare { lhs, rhs, .. } => {
                lhs.for_each_symbol(f);
                rhs.for_each_symbol(f);
            }
            Formula::Not(g) => g.for_each_symbol(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                a.for_each_symbol(f);
                b.for_each_symbol(f);
            }
            Formula::ForAll(_, body) | Formula::Exists(_, body) => body.for_each_symbol(f),
        }
    }

    /// True if every symbol satisfies `interpreted`. Equality, order and
    /// arithmetic are always interpreted.
    pub fn all_symbols(&self, interpreted: &impl Fn(&str) -> bool) -> bool {
        let mut ok = true;
        self.for_each_symbol(&mut |s| ok &= interpreted(s));
        ok
    }

    pub fn symbols(&self) -> Vec<Name> {
        let mut out: Vec<Name> = Vec::new();
        self.for_each_symbol(&mut |s| {
            if !out.contains(s) {
                out.push(s.clone())
            }
        });
        out
    }

    /// Rewrites `=>` and `<=>` into `~`, `&`, `|`.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::And(a, b) => Formula::and(a.desugar(), b.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Formula::Equiv(a, b) => {
                let (a, b) = (a.desugar(), b.desugar());
                Formula::and(
                    Formula::or(Formula::not(a.clone()), b.clone()),
                    Formula::or(a, Formula::not(b)),
                )
            }
            Formula::ForAll(v, body) => Formula::forall(v.clone(), body.desugar()),
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.desugar()),
        }
    }

    pub fn is_desugared(&self) -> bool {
        match self {
            Formula::Implies(..) | Formula::Equiv(..) => false,
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => true,
            Formula::Not(f) => f.is_desugared(),
            Formula::And(a, b) | Formula::Or(a, b) => a.is_desugared() && b.is_desugared(),
            Formula::ForAll(_, b) | Formula::Exists(_, b) => b.is_desugared(),
        }
    }

    fn rename_free(&self, from: &Variable, to: &Variable) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom { pred, args } => Formula::Atom {
                pred: pred.clone(),
                args: args.iter().map(|t| t.rename(from, to)).collect(),
            },
            Formula::Compare { op, lhs, rhs } => Formula::Compare {
                op: *op,
                lhs: lhs.rename(from, to),
                rhs: rhs.rename(from, to),
            },
            Formula::Not(f) => Formula::not(f.rename_free(from, to)),
            Formula::And(a, b) => Formula::and(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Or(a, b) => Formula::or(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Implies(a, b) => Formula::implies(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::Equiv(a, b) => Formula::equiv(a.rename_free(from, to), b.rename_free(from, to)),
            Formula::ForAll(v, _) | Formula::Exists(v, _) if v == from => self.clone(),
            Formula::ForAll(v, body) => Formula::forall(v.clone(), body.rename_free(from, to)),
            Formula::Exists(v, body) => Formula::exists(v.clone(), body.rename_free(from, to)),
        }
    }

    /// Renames bound variables so that no quantifier binds a name that is
    /// free in the formula or bound by another quantifier.
    pub fn rename_apart(&self) -> Formula {
        let mut used: HashSet<Name> = self.free_variables().into_iter().map(|v| v.name).collect();
        self.rename_apart_inner(&mut used)
    }

    fn rename_apart_inner(&self, used: &mut HashSet<Name>) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => self.clone(),
            Formula::Not(f) => Formula::not(f.rename_apart_inner(used)),
            Formula::And(a, b) => Formula::and(a.rename_apart_inner(used), b.rename_apart_inner(used)),
            Formula::Or(a, b) => Formula::or(a.rename_apart_inner(used), b.rename_apart_inner(used)),
            Formula::Implies(a, b) => Formula::implies(a.rename_apart_inner(used), b.rename_apart_inner(used)),
            Formula::Equiv(a, b) => Formula::equiv(a.rename_apart_inner(used), b.rename_apart_inner(used)),
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let q = if matches!(self, Formula::ForAll(..)) {
                    Quantifier::ForAll
                } else {
                    Quantifier::Exists
                };
                let fresh = if used.contains(&v.name) {
                    let mut k = 1;
                    loop {
                        let candidate = name(&format!("{}_{}", v.name, k));
                        if !used.contains(&candidate) {
                            break Variable {
                                name: candidate,
                                ty: v.ty.clone(),
                            };
                        }
                        k += 1;
                    }
                } else {
                    v.clone()
                };
                used.insert(fresh.name.clone());
                let body = if &fresh != v {
                    body.rename_free(v, &fresh)
                } else {
                    (**body).clone()
                };
                Formula::quantified(q, fresh, body.rename_apart_inner(used))
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => 0,
            Formula::Not(f) | Formula::ForAll(_, f) | Formula::Exists(_, f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(args: &[&str]) -> Formula {
        Formula::atom("P", args.iter().map(|a| Term::var(a, "T")).collect())
    }

    fn names(vs: Vec<Variable>) -> Vec<String> {
        vs.into_iter().map(|v| v.name.to_string()).collect()
    }

    #[test]
    fn free_variables_of_atom() {
        assert_eq!(names(p(&["x", "y"]).free_variables()), ["x", "y"]);
    }

    #[test]
    fn bound_variable_removed() {
        let f = Formula::forall(Variable::new("x", "T"), p(&["x", "y"]));
        assert_eq!(names(f.free_variables()), ["y"]);
    }

    #[test]
    fn union_of_subformulas() {
        let q = Formula::atom("Q", vec![Term::var("x", "T")]);
        let f = Formula::and(p(&["x"]), Formula::not(q));
        assert_eq!(names(f.free_variables()), ["x"]);
    }

    #[test]
    fn desugar_implication_and_equivalence() {
        let (a, b) = (p(&["x"]), p(&["y"]));
        assert_eq!(
            Formula::implies(a.clone(), b.clone()).desugar(),
            Formula::or(Formula::not(a.clone()), b.clone())
        );
        let e = Formula::equiv(a.clone(), b.clone()).desugar();
        assert!(e.is_desugared());
        assert_eq!(names(e.free_variables()), ["x", "y"]);
    }

    #[test]
    fn rename_apart_separates_shadowed_binders() {
        let x = Variable::new("x", "T");
        let inner = Formula::exists(x.clone(), p(&["x"]));
        let f = Formula::forall(x.clone(), Formula::and(p(&["x"]), inner));
        let r = f.rename_apart();
        let Formula::ForAll(v, body) = &r else { panic!() };
        assert_eq!(&*v.name, "x");
        let Formula::And(_, inner) = &**body else { panic!() };
        let Formula::Exists(w, inner_body) = &**inner else {
            panic!()
        };
        assert_eq!(&*w.name, "x_1");
        assert_eq!(names(inner_body.free_variables()), ["x_1"]);
    }
}
