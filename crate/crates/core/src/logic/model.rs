//! Direct recursive evaluation of formulas in a structure. Exponential in the
//! quantifier depth; used as the reference semantics.

use thiserror::Error;

use super::{Formula, Name, Structure, Term, Variable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("symbol `{0}` is not interpreted")]
    UninterpretedSymbol(Name),
    #[error("unknown element `{0}`")]
    UnknownElement(Name),
    #[error("variable `{0}` is unassigned")]
    UnboundVariable(Name),
    #[error("value {value} is outside the domain of `{ty}`")]
    ValueOutOfRange { value: i64, ty: Name },
    #[error("arithmetic overflow")]
    ArithmeticOverflow,
}

/// Maps variable names to element indices; later bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    slots: Vec<(Name, u32)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, var: &Variable, index: u32) {
        self.slots.push((var.name.clone(), index));
    }

    pub fn pop(&mut self) {
        self.slots.pop();
    }

    pub fn truncate(&mut self, len: usize) {
        self.slots.truncate(len);
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn get(&self, var: &Variable) -> Option<u32> {
        self.slots.iter().rev().find(|(n, _)| *n == var.name).map(|(_, i)| *i)
    }

    /// Rebinds the slot at `pos` (in push order).
    pub fn set_at(&mut self, pos: usize, index: u32) {
        self.slots[pos].1 = index;
    }

    pub fn set_last(&mut self, index: u32) {
        if let Some(slot) = self.slots.last_mut() {
            slot.1 = index;
        }
    }
}

fn arg_indices(s: &Structure, params: &[Name], args: &[Term], env: &Assignment) -> Result<Vec<u32>, ModelError> {
    params
        .iter()
        .zip(args)
        .map(|(ty, a)| {
            let v = eval_term(s, a, env)?;
            s.domain(ty)
                .and_then(|d| d.index_of_value(v))
                .ok_or_else(|| ModelError::ValueOutOfRange {
                    value: v,
                    ty: ty.clone(),
                })
        })
        .collect()
}

/// Canonical value of `t` under `env`.
pub fn eval_term(s: &Structure, t: &Term, env: &Assignment) -> Result<i64, ModelError> {
    match t {
        Term::Var(v) => {
            let idx = env.get(v).ok_or_else(|| ModelError::UnboundVariable(v.name.clone()))?;
            let dom = s
                .domain(&v.ty)
                .ok_or_else(|| ModelError::UnknownElement(v.ty.clone()))?;
            Ok(dom.value_of(idx))
        }
        Term::Elem { name, ty } => s
            .domain(ty)
            .and_then(|d| d.index_of(name))
            .map(i64::from)
            .ok_or_else(|| ModelError::UnknownElement(name.clone())),
        Term::Int(v) => Ok(*v),
        Term::App { func, args } => {
            let table = s
                .function(func)
                .ok_or_else(|| ModelError::UninterpretedSymbol(func.clone()))?;
            let decl = s
                .vocabulary()
                .function(func)
                .ok_or_else(|| ModelError::UninterpretedSymbol(func.clone()))?;
            let idx = arg_indices(s, &decl.args, args, env)?;
            table
                .get(&idx)
                .ok_or_else(|| ModelError::UninterpretedSymbol(func.clone()))
        }
        Term::Arith { op, lhs, rhs } => {
            let (a, b) = (eval_term(s, lhs, env)?, eval_term(s, rhs, env)?);
            op.apply(a, b).ok_or(ModelError::ArithmeticOverflow)
        }
    }
}

/// Evaluates `f` in `s` under `env`, which must assign every free variable.
pub fn holds(s: &Structure, f: &Formula, env: &mut Assignment) -> Result<bool, ModelError> {
    match f {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        Formula::Atom { pred, args } => {
            let rel = s
                .relation(pred)
                .ok_or_else(|| ModelError::UninterpretedSymbol(pred.clone()))?;
            let params = s
                .vocabulary()
                .predicate(pred)
                .ok_or_else(|| ModelError::UninterpretedSymbol(pred.clone()))?;
            let idx = arg_indices(s, params, args, env)?;
            Ok(rel.contains(&idx))
        }
        Formula::Compare { op, lhs, rhs } => Ok(op.apply(eval_term(s, lhs, env)?, eval_term(s, rhs, env)?)),
        Formula::Not(g) => Ok(!holds(s, g, env)?),
        Formula::And(a, b) => Ok(holds(s, a, env)? && holds(s, b, env)?),
        Formula::Or(a, b) => Ok(holds(s, a, env)? || holds(s, b, env)?),
        Formula::Implies(a, b) => Ok(!holds(s, a, env)? || holds(s, b, env)?),
        Formula::Equiv(a, b) => Ok(holds(s, a, env)? == holds(s, b, env)?),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let universal = matches!(f, Formula::ForAll(..));
            let n = s.extent(&v.ty) as u32;
            env.push(v, 0);
            let mut result = universal;
            for d in 0..n {
                env.set_last(d);
                match holds(s, body, env) {
                    Ok(b) if b != universal => {
                        result = b;
                        break;
                    }
                    Ok(_) => {}
                    Err(e) => {
                        env.pop();
                        return Err(e);
                    }
                }
            }
            env.pop();
            Ok(result)
        }
    }
}

/// Decides `S |= f` for a sentence `f`.
pub fn check_models(s: &Structure, f: &Formula) -> Result<bool, ModelError> {
    holds(s, f, &mut Assignment::new())
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{name, Domain, Domains, Relation, TypeKind, Vocabulary};

    /// T = {a, b}, P = {(a,a),(b,a)}, Q = {(a,b),(a,a)}.
    fn example() -> Structure {
        let mut voc = Vocabulary::new();
        voc.add_type(name("T"), TypeKind::Enumerated).unwrap();
        voc.add_predicate(name("P"), vec![name("T"), name("T")]).unwrap();
        voc.add_predicate(name("Q"), vec![name("T"), name("T")]).unwrap();
        let mut doms = Domains::new();
        doms.insert(name("T"), Domain::enumerated(["a", "b"]).unwrap()).unwrap();
        let mut s = Structure::new(Arc::new(voc), Arc::new(doms)).unwrap();
        s.set_relation("P", Relation::from_tuples(vec![2, 2], [[0u32, 0], [1, 0]]).unwrap())
            .unwrap();
        s.set_relation("Q", Relation::from_tuples(vec![2, 2], [[0u32, 1], [0, 0]]).unwrap())
            .unwrap();
        s
    }

    fn xy(p: &str) -> Formula {
        Formula::atom(p, vec![Term::var("x", "T"), Term::var("y", "T")])
    }

    #[test]
    fn witness_for_conjunction_with_negation() {
        let s = example();
        let body = Formula::and(xy("P"), Formula::not(xy("Q")));
        let f = Formula::exists(
            Variable::new("x", "T"),
            Formula::exists(Variable::new("y", "T"), body.clone()),
        );
        assert_eq!(check_models(&s, &f), Ok(true));
        let mut env = Assignment::new();
        env.push(&Variable::new("x", "T"), 1);
        env.push(&Variable::new("y", "T"), 0);
        assert_eq!(holds(&s, &body, &mut env), Ok(true));
        env.set_last(1);
        assert_eq!(holds(&s, &body, &mut env), Ok(false));
    }

    #[test]
    fn true_holds_everywhere() {
        assert_eq!(check_models(&example(), &Formula::True), Ok(true));
    }

    #[test]
    fn negation_and_implication() {
        let s = example();
        let x = Variable::new("x", "T");
        let y = Variable::new("y", "T");
        let f = Formula::forall(
            x.clone(),
            Formula::forall(y.clone(), Formula::implies(xy("P"), xy("Q"))),
        );
        let g = Formula::forall(x, Formula::forall(y, Formula::or(Formula::not(xy("P")), xy("Q"))));
        let a = check_models(&s, &f).unwrap();
        assert_eq!(a, check_models(&s, &g).unwrap());
        assert_eq!(!a, check_models(&s, &Formula::not(f)).unwrap());
    }

    #[test]
    fn uninterpreted_symbol_is_an_error() {
        let f = Formula::atom("R", vec![]);
        assert_eq!(
            check_models(&example(), &f),
            Err(ModelError::UninterpretedSymbol(name("R")))
        );
    }
}
