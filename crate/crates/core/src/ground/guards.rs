//! Maximal interpreted subformulas and the case split over their truth values.

use crate::logic::{Formula, Quantifier, Structure, Variable};

/// A run of same-kind quantifiers and the body below it.
#[derive(Debug, Clone)]
pub struct Block<'f> {
    pub quantifier: Quantifier,
    pub vars: Vec<Variable>,
    pub body: &'f Formula,
}

impl<'f> Block<'f> {
    pub fn of(f: &'f Formula) -> Option<Block<'f>> {
        let (q, v, mut body) = f.as_quantifier()?;
        let mut vars = vec![v.clone()];
        while let Some((q2, v2, inner)) = body.as_quantifier() {
            if q2 != q {
                break;
            }
            vars.push(v2.clone());
            body = inner;
        }
        Some(Block {
            quantifier: q,
            vars,
            body,
        })
    }
}

/// One branch of a guard split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardSplit {
    pub guards: Vec<Formula>,
    /// `signs[i]` is the assumed truth value of `guards[i]`.
    pub signs: Vec<bool>,
    /// Conjunction of the guards, each negated where its sign is false.
    pub guard_formula: Formula,
    /// The block body with each guard replaced by its sign, simplified.
    pub residual: Formula,
    /// True if the residual is the neutral element of the block's quantifier.
    pub vacuous: bool,
}

pub fn strip_negations(f: &Formula) -> (&Formula, bool) {
    let mut f = f;
    let mut negated = false;
    while let Formula::Not(g) = f {
        f = g;
        negated = !negated;
    }
    (f, negated)
}

fn collect(f: &Formula, interpreted: &impl Fn(&str) -> bool, out: &mut Vec<Formula>) {
    if matches!(f, Formula::True | Formula::False) {
        return;
    }
    if f.all_symbols(interpreted) {
        let (g, _) = strip_negations(f);
        if !matches!(g, Formula::True | Formula::False) && !out.contains(g) {
            out.push(g.clone());
        }
        return;
    }
    match f {
        Formula::Not(g) => collect(g, interpreted, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
            collect(a, interpreted, out);
            collect(b, interpreted, out);
        }
        Formula::ForAll(_, body) | Formula::Exists(_, body) => collect(body, interpreted, out),
        _ => {}
    }
}

/// Subformulas whose symbols are all interpreted and whose parent is not,
/// in order of position, leading negations removed and duplicates merged.
pub fn maximal_interpreted_subformulas(f: &Formula, interpreted: &impl Fn(&str) -> bool) -> Vec<Formula> {
    let mut out = Vec::new();
    collect(f, interpreted, &mut out);
    out
}

/// Guards of a block that only mention the block's variables and variables
/// free in the whole quantified formula.
pub fn liftable_guards(block: &Block<'_>, outer: &[Variable], interpreted: &impl Fn(&str) -> bool) -> Vec<Formula> {
    maximal_interpreted_subformulas(block.body, interpreted)
        .into_iter()
        .filter(|g| {
            g.free_variables()
                .iter()
                .all(|v| block.vars.contains(v) || outer.contains(v))
        })
        .collect()
}

/// Replaces each guard occurrence (possibly under negations) by its sign.
pub fn substitute(f: &Formula, guards: &[Formula], signs: &[bool]) -> Formula {
    let (core, negated) = strip_negations(f);
    if let Some(i) = guards.iter().position(|g| g == core) {
        return Formula::from_bool(signs[i] != negated);
    }
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => f.clone(),
        Formula::Not(g) => Formula::not(substitute(g, guards, signs)),
        Formula::And(a, b) => Formula::and(substitute(a, guards, signs), substitute(b, guards, signs)),
        Formula::Or(a, b) => Formula::or(substitute(a, guards, signs), substitute(b, guards, signs)),
        Formula::Implies(a, b) => Formula::implies(substitute(a, guards, signs), substitute(b, guards, signs)),
        Formula::Equiv(a, b) => Formula::equiv(substitute(a, guards, signs), substitute(b, guards, signs)),
        Formula::ForAll(v, body) => Formula::forall(v.clone(), substitute(body, guards, signs)),
        Formula::Exists(v, body) => Formula::exists(v.clone(), substitute(body, guards, signs)),
    }
}

/// Propagates `true`/`false` through connectives. Quantifiers over a
/// constant body fold only when `nonempty` says the variable's type has
/// elements.
pub fn simplify(f: &Formula, nonempty: &impl Fn(&Variable) -> bool) -> Formula {
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } | Formula::Compare { .. } => f.clone(),
        Formula::Not(g) => match simplify(g, nonempty) {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(h) => *h,
            g => Formula::not(g),
        },
        Formula::And(a, b) => match (simplify(a, nonempty), simplify(b, nonempty)) {
            (Formula::False, _) | (_, Formula::False) => Formula::False,
            (Formula::True, x) | (x, Formula::True) => x,
            (x, y) => Formula::and(x, y),
        },
        Formula::Or(a, b) => match (simplify(a, nonempty), simplify(b, nonempty)) {
            (Formula::True, _) | (_, Formula::True) => Formula::True,
            (Formula::False, x) | (x, Formula::False) => x,
            (x, y) => Formula::or(x, y),
        },
        Formula::Implies(..) | Formula::Equiv(..) => simplify(&f.desugar(), nonempty),
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            let b = simplify(body, nonempty);
            if matches!(b, Formula::True | Formula::False) && nonempty(v) {
                return b;
            }
            if matches!(f, Formula::ForAll(..)) {
                Formula::forall(v.clone(), b)
            } else {
                Formula::exists(v.clone(), b)
            }
        }
    }
}

/// `⋀ (¬)γi`, or `true` when there are no guards.
pub fn guard_formula(guards: &[Formula], signs: &[bool]) -> Formula {
    guards
        .iter()
        .zip(signs)
        .map(|(g, &s)| if s { g.clone() } else { Formula::not(g.clone()) })
        .reduce(Formula::and)
        .unwrap_or(Formula::True)
}

pub fn is_vacuous(q: Quantifier, residual: &Formula) -> bool {
    matches!(
        (q, residual),
        (Quantifier::ForAll, Formula::True) | (Quantifier::Exists, Formula::False)
    )
}

/// Signs for split number `mask`: guard `i` is positive iff bit `i` is clear,
/// so split 0 assumes every guard true.
pub fn signs_of(mask: usize, m: usize) -> Vec<bool> {
    (0..m).map(|i| mask >> i & 1 == 0).collect()
}

/// All `2^m` splits of a quantified formula `f` over the guards interpreted
/// by `s0`. Fails when `m` exceeds `cap`.
pub fn guard_split(f: &Formula, s0: &Structure, cap: usize) -> Result<Vec<GuardSplit>, super::GroundError> {
    let block = Block::of(f).ok_or(super::GroundError::NotQuantified)?;
    let interpreted = |s: &str| s0.is_interpreted(s);
    let outer = f.free_variables();
    let guards = liftable_guards(&block, &outer, &interpreted);
    let m = guards.len();
    if m > cap {
        return Err(super::GroundError::GuardCapExceeded { guards: m, cap });
    }
    let nonempty = |v: &Variable| s0.extent(&v.ty) > 0;
    Ok((0..1usize << m)
        .map(|mask| {
            let signs = signs_of(mask, m);
            let residual = simplify(&substitute(block.body, &guards, &signs), &nonempty);
            GuardSplit {
                guard_formula: guard_formula(&guards, &signs),
                vacuous: is_vacuous(block.quantifier, &residual),
                guards: guards.clone(),
                signs,
                residual,
            }
        })
        .collect())
}
