use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use crate::logic::{
    decode_index, holds, Assignment, CmpOp, Codomain, Formula, ModelError, Name, Quantifier, Structure, Term, Variable,
};
use crate::satset::Evaluator;
use crate::tensor::BitTensor;

use super::guards::{guard_formula, is_vacuous, liftable_guards, signs_of, simplify, substitute, Block};
use super::{GroundApp, GroundError, GroundFormula, GroundOptions, GroundTerm, SentenceStats, Strategy};

type Result<T> = std::result::Result<T, GroundError>;

/// Guard tensors of one block, over the guard-relevant outer variables
/// followed by the block variables.
struct VecPlan {
    quantifier: Quantifier,
    vars: Vec<Variable>,
    extents: Vec<usize>,
    outer_used: Vec<Variable>,
    outer_extents: Vec<usize>,
    residuals: Vec<Formula>,
    tensors: Vec<BitTensor>,
    union: BitTensor,
}

struct NaivePlan {
    quantifier: Quantifier,
    vars: Vec<Variable>,
    extents: Vec<usize>,
    guards: Vec<Formula>,
    residuals: RefCell<HashMap<Vec<bool>, Rc<Formula>>>,
}

pub(crate) struct Grounder<'a> {
    s0: &'a Structure,
    strategy: Strategy,
    deadline: Option<Instant>,
    guard_cap: usize,
    eval: Evaluator<'a>,
    vec_plans: HashMap<Formula, Rc<VecPlan>>,
    naive_plans: HashMap<Formula, Rc<NaivePlan>>,
    ticks: u32,
    guards: usize,
    splits_kept: usize,
    instantiations: u64,
}

fn neutral(q: Quantifier) -> GroundFormula {
    GroundFormula::from_bool(q == Quantifier::ForAll)
}

fn combine(q: Quantifier, parts: Vec<GroundFormula>) -> GroundFormula {
    match q {
        Quantifier::ForAll => GroundFormula::and(parts),
        Quantifier::Exists => GroundFormula::or(parts),
    }
}

/// Advances `tuple` lexicographically; false after the last tuple.
fn next_tuple(tuple: &mut [u32], extents: &[usize]) -> bool {
    for i in (0..tuple.len()).rev() {
        tuple[i] += 1;
        if (tuple[i] as usize) < extents[i] {
            return true;
        }
        tuple[i] = 0;
    }
    false
}

fn const_term(s0: &Structure, ty: &Name, value: i64) -> GroundTerm {
    match s0.domain(ty).and_then(|d| d.interval_bounds()) {
        Some(_) => GroundTerm::Int(value),
        None => GroundTerm::Elem {
            ty: ty.clone(),
            index: value as u32,
        },
    }
}

fn arg_indices(s0: &Structure, params: &[Name], vals: &[i64]) -> Result<Vec<u32>> {
    params
        .iter()
        .zip(vals)
        .map(|(ty, &v)| {
            s0.domain(ty).and_then(|d| d.index_of_value(v)).ok_or_else(|| {
                ModelError::ValueOutOfRange {
                    value: v,
                    ty: ty.clone(),
                }
                .into()
            })
        })
        .collect()
}

impl<'a> Grounder<'a> {
    pub fn new(s0: &'a Structure, strategy: Strategy, opts: &GroundOptions) -> Self {
        Self {
            s0,
            strategy,
            deadline: opts.deadline,
            guard_cap: opts.guard_cap,
            eval: Evaluator::new(s0).with_reduce_threshold(opts.reduce_threshold),
            vec_plans: HashMap::new(),
            naive_plans: HashMap::new(),
            ticks: 0,
            guards: 0,
            splits_kept: 0,
            instantiations: 0,
        }
    }

    pub fn run(&mut self, f: &Formula) -> Result<GroundFormula> {
        self.ground(f, &mut Assignment::new())
    }

    pub fn stats(&self, strategy: String, micros: u128) -> SentenceStats {
        let union_bits = self.vec_plans.values().map(|p| p.union.len() as u64).max().unwrap_or(0);
        SentenceStats {
            sentence_id: 0,
            strategy,
            guards: self.guards,
            splits_kept: self.splits_kept,
            tensor_bits: self.eval.peak_bits().max(union_bits),
            instantiations: self.instantiations,
            micros,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 1023 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    return Err(GroundError::Timeout);
                }
            }
        }
        Ok(())
    }

    fn reduces(&self) -> bool {
        self.strategy != Strategy::NoReduce
    }

    fn interpreted_value(&mut self, f: &Formula, env: &mut Assignment) -> Result<bool> {
        if self.strategy == Strategy::Vec {
            let vars = f.free_variables();
            let tuple = vars
                .iter()
                .map(|v| env.get(v).ok_or_else(|| ModelError::UnboundVariable(v.name.clone())))
                .collect::<std::result::Result<Vec<u32>, _>>()?;
            Ok(self.eval.satset_ref(f, &vars)?.contains(&tuple))
        } else {
            Ok(holds(self.s0, f, env)?)
        }
    }

    fn ground(&mut self, f: &Formula, env: &mut Assignment) -> Result<GroundFormula> {
        match f {
            Formula::True => return Ok(GroundFormula::True),
            Formula::False => return Ok(GroundFormula::False),
            _ => {}
        }
        let s0 = self.s0;
        if self.reduces() && f.all_symbols(&|s: &str| s0.is_interpreted(s)) {
            return Ok(GroundFormula::from_bool(self.interpreted_value(f, env)?));
        }
        match f {
            Formula::True | Formula::False => unreachable!("handled above"),
            Formula::Atom { pred, args } => {
                let gargs = args
                    .iter()
                    .map(|a| self.ground_term(a, env))
                    .collect::<Result<Vec<_>>>()?;
                let params = s0
                    .vocabulary()
                    .predicate(pred)
                    .ok_or_else(|| ModelError::UninterpretedSymbol(pred.clone()))?;
                self.atom(pred, params, gargs)
            }
            Formula::Compare { op, lhs, rhs } => {
                let l = self.ground_term(lhs, env)?;
                let r = self.ground_term(rhs, env)?;
                Ok(GroundFormula::compare(*op, l, r))
            }
            Formula::Not(g) => Ok(GroundFormula::not(self.ground(g, env)?)),
            Formula::And(a, b) => {
                let x = self.ground(a, env)?;
                if x == GroundFormula::False {
                    return Ok(x);
                }
                Ok(GroundFormula::and(vec![x, self.ground(b, env)?]))
            }
            Formula::Or(a, b) => {
                let x = self.ground(a, env)?;
                if x == GroundFormula::True {
                    return Ok(x);
                }
                Ok(GroundFormula::or(vec![x, self.ground(b, env)?]))
            }
            Formula::Implies(..) | Formula::Equiv(..) => self.ground(&f.desugar(), env),
            Formula::ForAll(..) | Formula::Exists(..) => match self.strategy {
                Strategy::Vec => self.block_vec(f, env),
                Strategy::Naive => self.block_naive(f, env),
                Strategy::NoReduce => self.block_plain(f, env),
            },
        }
    }

    fn ground_term(&mut self, t: &Term, env: &mut Assignment) -> Result<GroundTerm> {
        let s0 = self.s0;
        match t {
            Term::Var(v) => {
                let idx = env.get(v).ok_or_else(|| ModelError::UnboundVariable(v.name.clone()))?;
                let value = s0
                    .domain(&v.ty)
                    .ok_or_else(|| ModelError::UninterpretedSymbol(v.ty.clone()))?
                    .value_of(idx);
                Ok(const_term(s0, &v.ty, value))
            }
            Term::Elem { name, ty } => {
                let index = s0
                    .domain(ty)
                    .and_then(|d| d.index_of(name))
                    .ok_or_else(|| GroundError::UnknownElement(name.to_string()))?;
                Ok(GroundTerm::Elem { ty: ty.clone(), index })
            }
            Term::Int(v) => Ok(GroundTerm::Int(*v)),
            Term::App { func, args } => {
                let gargs = args
                    .iter()
                    .map(|a| self.ground_term(a, env))
                    .collect::<Result<Vec<_>>>()?;
                let decl = s0
                    .vocabulary()
                    .function(func)
                    .ok_or_else(|| ModelError::UninterpretedSymbol(func.clone()))?;
                self.func(func, &decl.args, &decl.codomain, gargs)
            }
            Term::Arith { op, lhs, rhs } => {
                let l = self.ground_term(lhs, env)?;
                let r = self.ground_term(rhs, env)?;
                GroundTerm::arith(*op, l, r).ok_or(GroundError::ArithmeticOverflow)
            }
        }
    }

    /// `func(args)`, case-splitting on the first non-constant argument.
    fn func(&mut self, func: &Name, params: &[Name], codomain: &Codomain, args: Vec<GroundTerm>) -> Result<GroundTerm> {
        let s0 = self.s0;
        if let Some(i) = args.iter().position(|a| a.as_const().is_none()) {
            let ty = &params[i];
            let n = s0.extent(ty) as u32;
            if n == 0 {
                return Err(ModelError::ValueOutOfRange {
                    value: 0,
                    ty: ty.clone(),
                }
                .into());
            }
            let value = |d: u32| const_term(s0, ty, s0.domain(ty).expect("extent > 0").value_of(d));
            let branch = |g: &mut Self, d: u32| {
                let mut a = args.clone();
                a[i] = value(d);
                g.func(func, params, codomain, a)
            };
            let mut acc = branch(self, n - 1)?;
            for d in (0..n - 1).rev() {
                let cond = GroundFormula::compare(CmpOp::Eq, args[i].clone(), value(d));
                acc = GroundTerm::ite(cond, branch(self, d)?, acc);
            }
            return Ok(acc);
        }
        let vals: Vec<i64> = args.iter().map(|a| a.as_const().expect("constant")).collect();
        match s0.function(func) {
            Some(table) if self.reduces() => {
                let idx = arg_indices(s0, params, &vals)?;
                let v = table
                    .get(&idx)
                    .ok_or_else(|| ModelError::UninterpretedSymbol(func.clone()))?;
                Ok(match codomain {
                    Codomain::Type(ty) => const_term(s0, ty, v),
                    Codomain::Interval { .. } => GroundTerm::Int(v),
                })
            }
            _ => Ok(GroundTerm::Func(GroundApp::new(func.clone(), vals))),
        }
    }

    /// `pred(args)`, case-splitting on the first non-constant argument.
    fn atom(&mut self, pred: &Name, params: &[Name], args: Vec<GroundTerm>) -> Result<GroundFormula> {
        let s0 = self.s0;
        if let Some(i) = args.iter().position(|a| a.as_const().is_none()) {
            let ty = &params[i];
            let mut parts = Vec::new();
            for d in 0..s0.extent(ty) as u32 {
                let c = const_term(s0, ty, s0.domain(ty).expect("declared type").value_of(d));
                let cond = GroundFormula::compare(CmpOp::Eq, args[i].clone(), c.clone());
                let mut a = args.clone();
                a[i] = c;
                parts.push(GroundFormula::and(vec![cond, self.atom(pred, params, a)?]));
            }
            return Ok(GroundFormula::or(parts));
        }
        let vals: Vec<i64> = args.iter().map(|a| a.as_const().expect("constant")).collect();
        match s0.relation(pred) {
            Some(rel) if self.reduces() => {
                let idx = arg_indices(s0, params, &vals)?;
                Ok(GroundFormula::from_bool(rel.contains(&idx)))
            }
            _ => Ok(GroundFormula::Atom(GroundApp::new(pred.clone(), vals))),
        }
    }

    fn block_vars(&self, block: &Block<'_>) -> (Vec<Variable>, Vec<usize>) {
        let extents = block.vars.iter().map(|v| self.s0.extent(&v.ty)).collect();
        (block.vars.clone(), extents)
    }

    fn vec_plan(&mut self, f: &Formula) -> Result<Rc<VecPlan>> {
        if let Some(p) = self.vec_plans.get(f) {
            return Ok(p.clone());
        }
        let s0 = self.s0;
        let block = Block::of(f).ok_or(GroundError::NotQuantified)?;
        let outer = f.free_variables();
        let guards = liftable_guards(&block, &outer, &|s: &str| s0.is_interpreted(s));
        let m = guards.len();
        if m > self.guard_cap {
            return Err(GroundError::GuardCapExceeded {
                guards: m,
                cap: self.guard_cap,
            });
        }
        let nonempty = |v: &Variable| s0.extent(&v.ty) > 0;
        let mut kept = Vec::new();
        for mask in 0..1usize << m {
            let signs = signs_of(mask, m);
            let residual = simplify(&substitute(block.body, &guards, &signs), &nonempty);
            if !is_vacuous(block.quantifier, &residual) {
                kept.push((guard_formula(&guards, &signs), residual));
            }
        }
        let outer_used: Vec<Variable> = outer
            .iter()
            .filter(|v| guards.iter().any(|g| g.free_variables().contains(v)))
            .cloned()
            .collect();
        let (vars, extents) = self.block_vars(&block);
        let tensor_vars: Vec<Variable> = outer_used.iter().chain(&vars).cloned().collect();
        let mut tensors = Vec::with_capacity(kept.len());
        let mut residuals = Vec::with_capacity(kept.len());
        for (guard, residual) in kept {
            tensors.push(self.eval.satset(&guard, &tensor_vars)?.into_tensor());
            residuals.push(residual);
        }
        let shape = crate::tensor::Shape::from_pairs(tensor_vars.iter().map(|v| (v.clone(), s0.extent(&v.ty))))?;
        let mut union = BitTensor::empty(shape)?;
        for t in &tensors {
            union.or_assign(t)?;
        }
        self.guards += m;
        self.splits_kept += residuals.len();
        let plan = Rc::new(VecPlan {
            quantifier: block.quantifier,
            outer_extents: outer_used.iter().map(|v| s0.extent(&v.ty)).collect(),
            outer_used,
            vars,
            extents,
            residuals,
            tensors,
            union,
        });
        self.vec_plans.insert(f.clone(), plan.clone());
        Ok(plan)
    }

    fn block_vec(&mut self, f: &Formula, env: &mut Assignment) -> Result<GroundFormula> {
        let plan = self.vec_plan(f)?;
        let q = plan.quantifier;
        let deciding = GroundFormula::from_bool(q == Quantifier::Exists);
        let inner: usize = plan.extents.iter().product();
        let mut outer_index = 0usize;
        for (v, &e) in plan.outer_used.iter().zip(&plan.outer_extents) {
            let i = env.get(v).ok_or_else(|| ModelError::UnboundVariable(v.name.clone()))?;
            outer_index = outer_index * e + i as usize;
        }
        let (start, end) = (outer_index * inner, (outer_index + 1) * inner);
        for (r, t) in plan.residuals.iter().zip(&plan.tensors) {
            if Formula::from_bool(q == Quantifier::Exists) == *r && t.bits().any_in(start, end) {
                return Ok(deciding);
            }
        }
        let base = env.len();
        for v in &plan.vars {
            env.push(v, 0);
        }
        let result = self.iterate_vec(&plan, env, base, start, end);
        env.truncate(base);
        result
    }

    fn iterate_vec(
        &mut self,
        plan: &VecPlan,
        env: &mut Assignment,
        base: usize,
        start: usize,
        end: usize,
    ) -> Result<GroundFormula> {
        let q = plan.quantifier;
        let deciding = GroundFormula::from_bool(q == Quantifier::Exists);
        let mut parts = Vec::new();
        for idx in plan.union.bits().iter_ones_in(start, end) {
            self.tick()?;
            for (j, v) in decode_index(idx - start, &plan.extents).into_iter().enumerate() {
                env.set_at(base + j, v);
            }
            let k = plan
                .tensors
                .iter()
                .position(|t| t.bits().get(idx))
                .expect("bit set in union");
            self.instantiations += 1;
            let g = self.ground(&plan.residuals[k], env)?;
            if g == deciding {
                return Ok(deciding);
            }
            if g != neutral(q) {
                parts.push(g);
            }
        }
        Ok(combine(q, parts))
    }

    fn naive_plan(&mut self, f: &Formula) -> Result<Rc<NaivePlan>> {
        if let Some(p) = self.naive_plans.get(f) {
            return Ok(p.clone());
        }
        let s0 = self.s0;
        let block = Block::of(f).ok_or(GroundError::NotQuantified)?;
        let guards = liftable_guards(&block, &f.free_variables(), &|s: &str| s0.is_interpreted(s));
        self.guards += guards.len();
        let (vars, extents) = self.block_vars(&block);
        let plan = Rc::new(NaivePlan {
            quantifier: block.quantifier,
            vars,
            extents,
            guards,
            residuals: RefCell::new(HashMap::new()),
        });
        self.naive_plans.insert(f.clone(), plan.clone());
        Ok(plan)
    }

    fn naive_residual(&mut self, plan: &NaivePlan, body: &Formula, signs: Vec<bool>) -> Option<Rc<Formula>> {
        if let Some(r) = plan.residuals.borrow().get(&signs) {
            return Some(r.clone()).filter(|r| !is_vacuous(plan.quantifier, r));
        }
        let s0 = self.s0;
        let residual = simplify(&substitute(body, &plan.guards, &signs), &|v: &Variable| {
            s0.extent(&v.ty) > 0
        });
        let vacuous = is_vacuous(plan.quantifier, &residual);
        if !vacuous {
            self.splits_kept += 1;
        }
        let r = Rc::new(residual);
        plan.residuals.borrow_mut().insert(signs, r.clone());
        (!vacuous).then_some(r)
    }

    fn block_naive(&mut self, f: &Formula, env: &mut Assignment) -> Result<GroundFormula> {
        let plan = self.naive_plan(f)?;
        let body = Block::of(f).ok_or(GroundError::NotQuantified)?.body;
        let q = plan.quantifier;
        let deciding = GroundFormula::from_bool(q == Quantifier::Exists);
        if plan.extents.contains(&0) {
            return Ok(neutral(q));
        }
        let base = env.len();
        for v in &plan.vars {
            env.push(v, 0);
        }
        let mut tuple = vec![0u32; plan.vars.len()];
        let mut parts = Vec::new();
        let result = loop {
            if let Err(e) = self.tick() {
                break Err(e);
            }
            for (j, &v) in tuple.iter().enumerate() {
                env.set_at(base + j, v);
            }
            let signs: std::result::Result<Vec<bool>, _> = plan.guards.iter().map(|g| holds(self.s0, g, env)).collect();
            let signs = match signs {
                Ok(s) => s,
                Err(e) => break Err(e.into()),
            };
            if let Some(residual) = self.naive_residual(&plan, body, signs) {
                if *residual == Formula::from_bool(q == Quantifier::Exists) {
                    break Ok(deciding);
                }
                self.instantiations += 1;
                match self.ground(&residual, env) {
                    Ok(g) if g == deciding => break Ok(deciding),
                    Ok(g) => {
                        if g != neutral(q) {
                            parts.push(g);
                        }
                    }
                    Err(e) => break Err(e),
                }
            }
            if !next_tuple(&mut tuple, &plan.extents) {
                break Ok(combine(q, std::mem::take(&mut parts)));
            }
        };
        env.truncate(base);
        result
    }

    fn block_plain(&mut self, f: &Formula, env: &mut Assignment) -> Result<GroundFormula> {
        let block = Block::of(f).ok_or(GroundError::NotQuantified)?;
        let q = block.quantifier;
        let deciding = GroundFormula::from_bool(q == Quantifier::Exists);
        let (vars, extents) = self.block_vars(&block);
        if extents.contains(&0) {
            return Ok(neutral(q));
        }
        let base = env.len();
        for v in &vars {
            env.push(v, 0);
        }
        let mut tuple = vec![0u32; vars.len()];
        let mut parts = Vec::new();
        let result = loop {
            if let Err(e) = self.tick() {
                break Err(e);
            }
            for (j, &v) in tuple.iter().enumerate() {
                env.set_at(base + j, v);
            }
            self.instantiations += 1;
            match self.ground(block.body, env) {
                Ok(g) if g == deciding => break Ok(deciding),
                Ok(g) => {
                    if g != neutral(q) {
                        parts.push(g);
                    }
                }
                Err(e) => break Err(e),
            }
            if !next_tuple(&mut tuple, &extents) {
                break Ok(combine(q, std::mem::take(&mut parts)));
            }
        };
        env.truncate(base);
        result
    }
}

/// The interpretation of the listed symbols as ground facts: one literal per
/// predicate tuple and one equation per function argument tuple.
pub(crate) fn interpretation_facts(s0: &Structure, symbols: &[Name]) -> Vec<GroundFormula> {
    let voc = s0.vocabulary();
    let mut out = Vec::new();
    for sym in symbols {
        let (params, codomain) = if let Some(params) = voc.predicate(sym) {
            (params, None)
        } else if let Some(decl) = voc.function(sym) {
            (&decl.args[..], Some(&decl.codomain))
        } else {
            continue;
        };
        let extents = s0.extents(params);
        let total: usize = extents.iter().product();
        for linear in 0..total {
            let idx = decode_index(linear, &extents);
            let vals: Vec<i64> = params
                .iter()
                .zip(&idx)
                .map(|(ty, &i)| s0.domain(ty).expect("declared type").value_of(i))
                .collect();
            let app = GroundApp::new(sym.clone(), vals);
            match codomain {
                None => {
                    let Some(rel) = s0.relation(sym) else { break };
                    let atom = GroundFormula::Atom(app);
                    out.push(if rel.contains(&idx) {
                        atom
                    } else {
                        GroundFormula::not(atom)
                    });
                }
                Some(cod) => {
                    let Some(table) = s0.function(sym) else { break };
                    let v = table.get(&idx).expect("total table");
                    let rhs = match cod {
                        Codomain::Type(ty) => const_term(s0, ty, v),
                        Codomain::Interval { .. } => GroundTerm::Int(v),
                    };
                    out.push(GroundFormula::compare(CmpOp::Eq, GroundTerm::Func(app), rhs));
                }
            }
        }
    }
    out
}
