use std::collections::HashMap;

use thiserror::Error;

use super::{CmpOp, Codomain, Formula, Name, Term, TypeKind, Vocabulary};

/// The sort of a term: a declared type or a plain integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Type(Name),
    Int,
}

impl Sort {
    /// Interval types and integers support arithmetic and ordering.
    pub fn is_integer(&self, voc: &Vocabulary) -> bool {
        match self {
            Sort::Int => true,
            Sort::Type(t) => voc.is_interval_type(t),
        }
    }
}

impl std::fmt::Display for Sort {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sort::Type(t) => f.write_str(t),
            Sort::Int => f.write_str("Int"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("unknown symbol `{name}` in `{subterm}`")]
    UnknownSymbol { name: Name, subterm: String },
    #[error("`{symbol}` expects {expected} argument(s), found {found} in `{subterm}`")]
    ArityMismatch {
        symbol: Name,
        expected: usize,
        found: usize,
        subterm: String,
    },
    #[error("type mismatch in `{subterm}`: expected {expected}, found {found}")]
    TypeMismatch {
        expected: String,
        found: String,
        subterm: String,
    },
}

fn mismatch(expected: impl ToString, found: impl ToString, subterm: impl ToString) -> TypeError {
    TypeError::TypeMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
        subterm: subterm.to_string(),
    }
}

fn check_type_declared(voc: &Vocabulary, ty: &Name, subterm: &dyn ToString) -> Result<(), TypeError> {
    if voc.type_kind(ty).is_none() {
        return Err(TypeError::UnknownSymbol {
            name: ty.clone(),
            subterm: subterm.to_string(),
        });
    }
    Ok(())
}

/// Checks that `arg` may be passed where a value of type `param` is expected.
/// Integer literals are accepted for interval types when in range.
fn check_argument(voc: &Vocabulary, param: &Name, arg: &Term) -> Result<(), TypeError> {
    let sort = sort_of(arg, voc)?;
    if sort == Sort::Type(param.clone()) {
        return Ok(());
    }
    if let (Term::Int(v), Some(TypeKind::Interval { lo, hi })) = (arg, voc.type_kind(param)) {
        if (lo..=hi).contains(v) {
            return Ok(());
        }
    }
    Err(mismatch(param, sort, arg))
}

/// Computes the sort of a term, checking it along the way.
pub fn sort_of(t: &Term, voc: &Vocabulary) -> Result<Sort, TypeError> {
    match t {
        Term::Var(v) => {
            check_type_declared(voc, &v.ty, t)?;
            Ok(Sort::Type(v.ty.clone()))
        }
        Term::Elem { ty, .. } => {
            check_type_declared(voc, ty, t)?;
            if voc.type_kind(ty) != Some(TypeKind::Enumerated) {
                return Err(mismatch("an enumerated type", ty, t));
            }
            Ok(Sort::Type(ty.clone()))
        }
        Term::Int(_) => Ok(Sort::Int),
        Term::App { func, args } => {
            let decl = voc.function(func).ok_or_else(|| TypeError::UnknownSymbol {
                name: func.clone(),
                subterm: t.to_string(),
            })?;
            if decl.args.len() != args.len() {
                return Err(TypeError::ArityMismatch {
                    symbol: func.clone(),
                    expected: decl.args.len(),
                    found: args.len(),
                    subterm: t.to_string(),
                });
            }
            for (param, arg) in decl.args.iter().zip(args) {
                check_argument(voc, param, arg)?;
            }
            Ok(match &decl.codomain {
                Codomain::Type(ty) => Sort::Type(ty.clone()),
                Codomain::Interval { .. } => Sort::Int,
            })
        }
        Term::Arith { lhs, rhs, .. } => {
            for side in [lhs, rhs] {
                let s = sort_of(side, voc)?;
                if !s.is_integer(voc) {
                    return Err(mismatch("an integer", s, side));
                }
            }
            Ok(Sort::Int)
        }
    }
}

pub fn check_atom(voc: &Vocabulary, pred: &Name, args: &[Term]) -> Result<(), TypeError> {
    let subterm = || Formula::Atom {
        pred: pred.clone(),
        args: args.to_vec(),
    };
    let params = voc.predicate(pred).ok_or_else(|| TypeError::UnknownSymbol {
        name: pred.clone(),
        subterm: subterm().to_string(),
    })?;
    if params.len() != args.len() {
        return Err(TypeError::ArityMismatch {
            symbol: pred.clone(),
            expected: params.len(),
            found: args.len(),
            subterm: subterm().to_string(),
        });
    }
    for (param, arg) in params.iter().zip(args) {
        check_argument(voc, param, arg)?;
    }
    Ok(())
}

/// Both sides must share a declared type (`=`/`~=` only on enumerations) or
/// both be integer valued.
pub fn check_compare(voc: &Vocabulary, op: CmpOp, lhs: &Term, rhs: &Term) -> Result<(), TypeError> {
    let (ls, rs) = (sort_of(lhs, voc)?, sort_of(rhs, voc)?);
    let subterm = || Formula::compare(op, lhs.clone(), rhs.clone());
    if ls.is_integer(voc) && rs.is_integer(voc) {
        return Ok(());
    }
    if ls != rs {
        return Err(mismatch(ls, rs, subterm()));
    }
    if !op.is_equality() {
        return Err(mismatch("an integer", ls, subterm()));
    }
    Ok(())
}

fn check_scoped(f: &Formula, voc: &Vocabulary, scope: &mut HashMap<Name, Vec<Name>>) -> Result<(), TypeError> {
    let check_vars = |t: &Term, scope: &HashMap<Name, Vec<Name>>| -> Result<(), TypeError> {
        for v in t.variables() {
            if let Some(ty) = scope.get(&v.name).and_then(|s| s.last()) {
                if ty != &v.ty {
                    return Err(mismatch(ty, &v.ty, &v));
                }
            }
        }
        Ok(())
    };
    match f {
        Formula::True | Formula::False => Ok(()),
        Formula::Atom { pred, args } => {
            for a in args {
                check_vars(a, scope)?;
            }
            check_atom(voc, pred, args)
        }
        Formula::Compare { op, lhs, rhs } => {
            check_vars(lhs, scope)?;
            check_vars(rhs, scope)?;
            check_compare(voc, *op, lhs, rhs)
        }
        Formula::Not(g) => check_scoped(g, voc, scope),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Equiv(a, b) => {
            check_scoped(a, voc, scope)?;
            check_scoped(b, voc, scope)
        }
        Formula::ForAll(v, body) | Formula::Exists(v, body) => {
            check_type_declared(voc, &v.ty, v)?;
            scope.entry(v.name.clone()).or_default().push(v.ty.clone());
            let r = check_scoped(body, voc, scope);
            scope.get_mut(&v.name).map(Vec::pop);
            r
        }
    }
}

/// Checks a formula against a vocabulary.
pub fn type_check(f: &Formula, voc: &Vocabulary) -> Result<(), TypeError> {
    check_scoped(f, voc, &mut HashMap::new())?;
    // every free occurrence of a name must carry one type
    let mut seen: HashMap<Name, Name> = HashMap::new();
    for v in f.free_variables() {
        if let Some(prev) = seen.insert(v.name.clone(), v.ty.clone()) {
            return Err(mismatch(prev, &v.ty, &v));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{name, ArithOp};

    fn voc() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.add_type(name("Node"), TypeKind::Enumerated).unwrap();
        v.add_predicate(name("border"), vec![name("Node"), name("Node")])
            .unwrap();
        for f in ["f", "g"] {
            v.add_function(name(f), vec![name("Node")], Codomain::Interval { lo: 0, hi: 10 })
                .unwrap();
        }
        v
    }

    #[test]
    fn binary_atom_ok() {
        let f = Formula::atom("border", vec![Term::var("x", "Node"), Term::var("y", "Node")]);
        assert_eq!(type_check(&f, &voc()), Ok(()));
    }

    #[test]
    fn arity_mismatch() {
        let f = Formula::atom("border", vec![Term::var("x", "Node")]);
        assert!(matches!(
            type_check(&f, &voc()),
            Err(TypeError::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            })
        ));
    }

    #[test]
    fn function_sum_comparison() {
        let x = || Term::var("x", "Node");
        let sum = Term::arith(ArithOp::Add, Term::app("f", vec![x()]), Term::app("g", vec![x()]));
        let f = Formula::compare(CmpOp::Eq, sum, Term::Int(5));
        assert_eq!(type_check(&f, &voc()), Ok(()));
    }

    #[test]
    fn unknown_symbol() {
        let f = Formula::atom("p", vec![Term::var("x", "Node")]);
        assert!(matches!(type_check(&f, &voc()), Err(TypeError::UnknownSymbol { .. })));
    }

    #[test]
    fn ordering_on_enumeration_rejected() {
        let f = Formula::compare(CmpOp::Lt, Term::var("x", "Node"), Term::var("y", "Node"));
        assert!(matches!(type_check(&f, &voc()), Err(TypeError::TypeMismatch { .. })));
    }

    #[test]
    fn arithmetic_on_enumeration_rejected() {
        let t = Term::arith(ArithOp::Add, Term::var("x", "Node"), Term::Int(1));
        let f = Formula::compare(CmpOp::Eq, t, Term::Int(1));
        assert!(matches!(type_check(&f, &voc()), Err(TypeError::TypeMismatch { .. })));
    }
}
