//! Satisfying sets of fully interpreted formulas, computed bottom-up with
//! bit-tensor kernels.
//!
//! Every subformula is evaluated over exactly its own free variables, in
//! order of first appearance. Binary connectives align their operands to the
//! union of both variable lists before combining them word by word.

use std::collections::HashMap;

use thiserror::Error;

use crate::logic::{CmpOp, Domain, Formula, Name, Relation, Structure, Term, Variable};
use crate::tensor::{BitTensor, Reduction, Shape, TensorError, ValueTensor, DEFAULT_REDUCE_THRESHOLD};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SatSetError {
    #[error("symbol `{0}` is not interpreted")]
    UninterpretedSymbol(Name),
    #[error("unknown element `{0}`")]
    UnknownElement(Name),
    #[error("variable `{0}` is free in the formula but missing from the variable tuple")]
    MissingVariable(Name),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// The satisfying set of a formula over an ordered variable tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SatSet {
    tensor: BitTensor,
}

impl SatSet {
    pub fn new(tensor: BitTensor) -> Self {
        Self { tensor }
    }

    pub fn vars(&self) -> Vec<Variable> {
        self.tensor.shape().vars()
    }

    pub fn tensor(&self) -> &BitTensor {
        &self.tensor
    }

    pub fn into_tensor(self) -> BitTensor {
        self.tensor
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        self.tensor.get(tuple)
    }

    pub fn popcount(&self) -> u64 {
        self.tensor.popcount()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.tensor.iter_ones()
    }

    /// Truth value of a satisfying set over no variables.
    pub fn as_bool(&self) -> Option<bool> {
        self.tensor.as_scalar()
    }
}

/// Extends `t` with the axes of `target` it lacks, then orders its axes
/// like `target`. The axes of `t` must all occur in `target`.
pub fn extend_to(t: &BitTensor, target: &Shape) -> Result<BitTensor, TensorError> {
    let mut out = t.clone();
    for axis in target.axes() {
        if out.shape().position(&axis.var).is_none() {
            out = out.insert_axis(out.shape().rank(), axis.var.clone(), axis.extent)?;
        }
    }
    if out.shape().rank() != target.rank() {
        let extra = out
            .shape()
            .axes()
            .iter()
            .find(|a| target.position(&a.var).is_none())
            .expect("rank mismatch implies an extra axis");
        return Err(TensorError::UnknownVariable(extra.var.name.clone()));
    }
    if out.shape().vars() != target.vars() {
        out = out.permute_to(&target.vars())?;
    }
    Ok(out)
}

/// Brings two satisfying sets over the union of their variables, ordered by
/// first appearance in `a` and then `b`.
pub fn align(a: &SatSet, b: &SatSet) -> Result<(SatSet, SatSet), TensorError> {
    if a.tensor.shape() == b.tensor.shape() {
        return Ok((a.clone(), b.clone()));
    }
    let union = crate::tensor::union_shape(&[a.tensor.shape(), b.tensor.shape()])?;
    Ok((
        SatSet::new(extend_to(&a.tensor, &union)?),
        SatSet::new(extend_to(&b.tensor, &union)?),
    ))
}

/// Relation membership of evaluated argument tuples. `params` are the
/// argument domains of the relation.
pub fn atom_membership(rel: &Relation, params: &[&Domain], args: &[ValueTensor]) -> Result<BitTensor, TensorError> {
    ValueTensor::membership(rel, params, args)
}

/// Evaluates formulas and terms in one structure, caching requested
/// satisfying sets.
pub struct Evaluator<'a> {
    structure: &'a Structure,
    memo: HashMap<Formula, Vec<(Vec<Variable>, SatSet)>>,
    reduce_threshold: usize,
    peak_bits: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(structure: &'a Structure) -> Self {
        Self {
            structure,
            memo: HashMap::new(),
            reduce_threshold: DEFAULT_REDUCE_THRESHOLD,
            peak_bits: 0,
        }
    }

    pub fn with_reduce_threshold(mut self, threshold: usize) -> Self {
        self.reduce_threshold = threshold;
        self
    }

    pub fn structure(&self) -> &'a Structure {
        self.structure
    }

    /// Largest tensor built so far, in bits.
    pub fn peak_bits(&self) -> u64 {
        self.peak_bits
    }

    fn note(&mut self, len: usize) {
        self.peak_bits = self.peak_bits.max(len as u64);
    }

    fn shape_of(&self, vars: &[Variable]) -> Result<Shape, TensorError> {
        Shape::from_pairs(vars.iter().map(|v| (v.clone(), self.structure.extent(&v.ty))))
    }

    /// `[f :: vars]`. Results are cached per (formula, variable tuple).
    pub fn satset(&mut self, f: &Formula, vars: &[Variable]) -> Result<SatSet, SatSetError> {
        self.satset_ref(f, vars).cloned()
    }

    /// Like [`Evaluator::satset`], borrowing the cached result.
    pub fn satset_ref(&mut self, f: &Formula, vars: &[Variable]) -> Result<&SatSet, SatSetError> {
        let pos = self
            .memo
            .get(f)
            .and_then(|entries| entries.iter().position(|(v, _)| v == vars));
        if let Some(i) = pos {
            return Ok(&self.memo[f][i].1);
        }
        for v in f.free_variables() {
            if !vars.contains(&v) {
                return Err(SatSetError::MissingVariable(v.name));
            }
        }
        let t = self.eval(f)?;
        let target = self.shape_of(vars)?;
        let t = extend_to(&t, &target)?;
        self.note(t.len());
        let entries = self.memo.entry(f.clone()).or_default();
        entries.push((vars.to_vec(), SatSet::new(t)));
        Ok(&entries.last().expect("just pushed").1)
    }

    /// Value tensor of `t` over `vars`.
    pub fn term(&mut self, t: &Term, vars: &[Variable]) -> Result<ValueTensor, SatSetError> {
        for v in t.variables() {
            if !vars.contains(&v) {
                return Err(SatSetError::MissingVariable(v.name));
            }
        }
        let v = self.eval_term(t)?;
        let shape = self.shape_of(vars)?;
        Ok(v.broadcast_to(&shape)?)
    }

    fn domain(&self, ty: &Name) -> Result<&'a Domain, SatSetError> {
        self.structure
            .domain(ty)
            .ok_or_else(|| SatSetError::UnknownElement(ty.clone()))
    }

    fn eval_term(&mut self, t: &Term) -> Result<ValueTensor, SatSetError> {
        let out = match t {
            Term::Var(v) => ValueTensor::axis_values(v.clone(), self.domain(&v.ty)?)?,
            Term::Elem { name, ty } => {
                let idx = self
                    .domain(ty)?
                    .index_of(name)
                    .ok_or_else(|| SatSetError::UnknownElement(name.clone()))?;
                ValueTensor::constant(idx as i64)
            }
            Term::Int(v) => ValueTensor::constant(*v),
            Term::App { func, args } => {
                let s = self.structure;
                let table = s
                    .function(func)
                    .ok_or_else(|| SatSetError::UninterpretedSymbol(func.clone()))?;
                let decl = s
                    .vocabulary()
                    .function(func)
                    .ok_or_else(|| SatSetError::UninterpretedSymbol(func.clone()))?;
                let params = decl
                    .args
                    .iter()
                    .map(|ty| self.domain(ty))
                    .collect::<Result<Vec<_>, _>>()?;
                let vals = args.iter().map(|a| self.eval_term(a)).collect::<Result<Vec<_>, _>>()?;
                ValueTensor::gather(table, &params, &vals)?
            }
            Term::Arith { op, lhs, rhs } => {
                let (a, b) = (self.eval_term(lhs)?, self.eval_term(rhs)?);
                a.map2(&b, *op)?
            }
        };
        self.note(out.values().len());
        Ok(out)
    }

    fn atom(&mut self, pred: &Name, args: &[Term]) -> Result<BitTensor, SatSetError> {
        let s = self.structure;
        let rel = s
            .relation(pred)
            .ok_or_else(|| SatSetError::UninterpretedSymbol(pred.clone()))?;
        let vars: Vec<&Variable> = args
            .iter()
            .filter_map(|a| match a {
                Term::Var(v) => Some(v),
                _ => None,
            })
            .collect();
        let distinct = vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v));
        if vars.len() == args.len() && distinct {
            // the relation's bit layout is already the satisfying set
            let shape = Shape::from_pairs(vars.iter().zip(rel.extents()).map(|(v, &e)| ((*v).clone(), e)))?;
            return Ok(BitTensor::from_bits(shape, rel.bits().clone())?);
        }
        let params = s
            .vocabulary()
            .predicate(pred)
            .ok_or_else(|| SatSetError::UninterpretedSymbol(pred.clone()))?
            .iter()
            .map(|ty| self.domain(ty))
            .collect::<Result<Vec<_>, _>>()?;
        let vals = args.iter().map(|a| self.eval_term(a)).collect::<Result<Vec<_>, _>>()?;
        Ok(atom_membership(rel, &params, &vals)?)
    }

    fn compare(&mut self, op: CmpOp, lhs: &Term, rhs: &Term) -> Result<BitTensor, SatSetError> {
        let (a, b) = (self.eval_term(lhs)?, self.eval_term(rhs)?);
        Ok(a.compare(&b, op)?)
    }

    fn combine(&mut self, a: &Formula, b: &Formula, and: bool) -> Result<BitTensor, SatSetError> {
        let (x, y) = (SatSet::new(self.eval(a)?), SatSet::new(self.eval(b)?));
        let (x, y) = align(&x, &y)?;
        let (mut x, y) = (x.into_tensor(), y.into_tensor());
        if and {
            x.and_assign(&y)?;
        } else {
            x.or_assign(&y)?;
        }
        Ok(x)
    }

    /// Satisfying set of `f` over its free variables in first-appearance order.
    fn eval(&mut self, f: &Formula) -> Result<BitTensor, SatSetError> {
        let out = match f {
            Formula::True => BitTensor::scalar(true),
            Formula::False => BitTensor::scalar(false),
            Formula::Atom { pred, args } => self.atom(pred, args)?,
            Formula::Compare { op, lhs, rhs } => self.compare(*op, lhs, rhs)?,
            Formula::Not(g) => self.eval(g)?.not(),
            Formula::And(a, b) => self.combine(a, b, true)?,
            Formula::Or(a, b) => self.combine(a, b, false)?,
            Formula::Implies(..) | Formula::Equiv(..) => self.eval(&f.desugar())?,
            Formula::ForAll(v, body) | Formula::Exists(v, body) => {
                let op = if matches!(f, Formula::ForAll(..)) {
                    Reduction::All
                } else {
                    Reduction::Any
                };
                let t = self.eval(body)?;
                if t.shape().position(v).is_some() {
                    t.reduce(v, op, self.reduce_threshold)?
                } else if self.structure.extent(&v.ty) == 0 {
                    match op {
                        Reduction::All => BitTensor::full(t.shape().clone())?,
                        Reduction::Any => BitTensor::empty(t.shape().clone())?,
                    }
                } else {
                    t
                }
            }
        };
        self.note(out.len());
        Ok(out)
    }
}

/// `[f :: vars]_s` without caching.
pub fn eval_satset(f: &Formula, vars: &[Variable], s: &Structure) -> Result<SatSet, SatSetError> {
    Evaluator::new(s).satset(f, vars)
}

/// Value tensor of `t` over `vars` in `s`.
pub fn eval_term(t: &Term, vars: &[Variable], s: &Structure) -> Result<ValueTensor, SatSetError> {
    Evaluator::new(s).term(t, vars)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::logic::{name, ArithOp, Codomain, Domains, FunctionTable, TypeKind, Vocabulary};

    fn v(n: &str) -> Variable {
        Variable::new(n, "T")
    }

    fn tv(n: &str) -> Term {
        Term::Var(v(n))
    }

    /// T = {a, b, c}; p = {b}; q = {b, c}; f = [2,3,5]; g = [3,2,1]; h = [1,2,0].
    fn structure() -> Structure {
        let mut voc = Vocabulary::new();
        voc.add_type(name("T"), TypeKind::Enumerated).unwrap();
        for p in ["p", "q"] {
            voc.add_predicate(name(p), vec![name("T")]).unwrap();
        }
        voc.add_predicate(name("e"), vec![name("T"), name("T")]).unwrap();
        for f in ["f", "g"] {
            voc.add_function(name(f), vec![name("T")], Codomain::Interval { lo: 0, hi: 10 })
                .unwrap();
        }
        voc.add_function(name("h"), vec![name("T")], Codomain::Type(name("T")))
            .unwrap();
        let mut d = Domains::new();
        d.insert(name("T"), Domain::enumerated(["a", "b", "c"]).unwrap())
            .unwrap();
        let mut s = Structure::new(Arc::new(voc), Arc::new(d)).unwrap();
        s.set_relation("p", Relation::from_tuples(vec![3], [[1u32]]).unwrap())
            .unwrap();
        s.set_relation("q", Relation::from_tuples(vec![3], [[1u32], [2]]).unwrap())
            .unwrap();
        s.set_relation(
            "e",
            Relation::from_tuples(vec![3, 3], [[0u32, 1], [1, 2], [2, 2]]).unwrap(),
        )
        .unwrap();
        s.set_function("f", FunctionTable::new(vec![3], vec![2, 3, 5]).unwrap())
            .unwrap();
        s.set_function("g", FunctionTable::new(vec![3], vec![3, 2, 1]).unwrap())
            .unwrap();
        s.set_function("h", FunctionTable::new(vec![3], vec![1, 2, 0]).unwrap())
            .unwrap();
        s
    }

    fn ones(s: &SatSet) -> Vec<Vec<u32>> {
        s.iter_ones().collect()
    }

    #[test]
    fn unary_disjunction() {
        let s = structure();
        let f = Formula::or(Formula::atom("p", vec![tv("x")]), Formula::atom("q", vec![tv("x")]));
        assert_eq!(ones(&eval_satset(&f, &[v("x")], &s).unwrap()), vec![vec![1], vec![2]]);
    }

    #[test]
    fn conjunction_over_different_variables() {
        let s = structure();
        let f = Formula::and(Formula::atom("p", vec![tv("y")]), Formula::atom("q", vec![tv("x")]));
        let r = eval_satset(&f, &[v("y"), v("x")], &s).unwrap();
        assert_eq!(ones(&r), vec![vec![1, 1], vec![1, 2]]);
    }

    #[test]
    fn sum_of_functions() {
        let s = structure();
        let sum = Term::arith(
            ArithOp::Add,
            Term::app("f", vec![tv("x")]),
            Term::app("g", vec![tv("x")]),
        );
        assert_eq!(eval_term(&sum, &[v("x")], &s).unwrap().values(), &[5, 5, 6]);
        let f = Formula::compare(CmpOp::Eq, sum, Term::Int(5));
        assert_eq!(ones(&eval_satset(&f, &[v("x")], &s).unwrap()), vec![vec![0], vec![1]]);
    }

    #[test]
    fn nested_application_matches_pointwise() {
        let s = structure();
        let t = Term::app("f", vec![Term::app("h", vec![tv("x")])]);
        assert_eq!(eval_term(&t, &[v("x")], &s).unwrap().values(), &[3, 5, 2]);
    }

    #[test]
    fn reversed_arguments_are_a_transpose() {
        let s = structure();
        let fwd = eval_satset(&Formula::atom("e", vec![tv("x"), tv("y")]), &[v("x"), v("y")], &s).unwrap();
        let rev = eval_satset(&Formula::atom("e", vec![tv("y"), tv("x")]), &[v("x"), v("y")], &s).unwrap();
        assert_eq!(rev.tensor().bits(), fwd.tensor().permute(&[1, 0]).unwrap().bits());
        let diag = eval_satset(&Formula::atom("e", vec![tv("x"), tv("x")]), &[v("x")], &s).unwrap();
        assert_eq!(ones(&diag), vec![vec![2]]);
    }

    #[test]
    fn vacuous_and_missing() {
        let s = structure();
        let f = Formula::forall(v("z"), Formula::atom("p", vec![tv("x")]));
        assert_eq!(ones(&eval_satset(&f, &[v("x")], &s).unwrap()), vec![vec![1]]);
        assert!(matches!(eval_satset(&f, &[], &s), Err(SatSetError::MissingVariable(_))));
        let u = Formula::atom("r", vec![]);
        assert!(eval_satset(&u, &[], &s).is_err());
    }
}
