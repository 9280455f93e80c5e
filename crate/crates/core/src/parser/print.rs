use std::fmt::Write as _;

use super::Problem;
use crate::logic::{ArithOp, Codomain, Formula, Quantifier, Term, TypeKind};

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Arith {
            op: ArithOp::Add | ArithOp::Sub,
            ..
        } => 1,
        Term::Arith { op: ArithOp::Mul, .. } => 2,
        _ => 3,
    }
}

fn write_term(out: &mut String, t: &Term, min: u8) {
    let prec = term_prec(t);
    if prec < min {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::Elem { name, .. } => out.push_str(name),
        Term::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Term::App { func, args } => {
            out.push_str(func);
            if !args.is_empty() {
                write_args(out, args);
            }
        }
        Term::Arith { op, lhs, rhs } => {
            write_term(out, lhs, prec);
            let _ = write!(out, " {} ", op.symbol());
            write_term(out, rhs, prec + 1);
        }
    }
    if prec < min {
        out.push(')');
    }
}

fn write_args(out: &mut String, args: &[Term]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, a, 0);
    }
    out.push(')');
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    write_term(&mut out, t, 0);
    out
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::ForAll(..) | Formula::Exists(..) => 0,
        Formula::Equiv(..) => 1,
        Formula::Implies(..) => 2,
        Formula::Or(..) => 3,
        Formula::And(..) => 4,
        _ => 5,
    }
}

fn write_formula(out: &mut String, f: &Formula, min: u8) {
    let prec = formula_prec(f);
    if prec < min {
        out.push('(');
    }
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom { pred, args } => {
            out.push_str(pred);
            if !args.is_empty() {
                write_args(out, args);
            }
        }
        Formula::Compare { op, lhs, rhs } => {
            write_term(out, lhs, 0);
            let _ = write!(out, " {} ", op.symbol());
            write_term(out, rhs, 0);
        }
        Formula::Not(g) => {
            out.push('~');
            write_formula(out, g, 5);
        }
        Formula::And(a, b) => binary(out, a, " & ", b, 4, 5),
        Formula::Or(a, b) => binary(out, a, " | ", b, 3, 4),
        Formula::Implies(a, b) => binary(out, a, " => ", b, 3, 2),
        Formula::Equiv(a, b) => binary(out, a, " <=> ", b, 1, 2),
        Formula::ForAll(..) | Formula::Exists(..) => {
            let (q, _, _) = f.as_quantifier().expect("quantifier");
            out.push(if q == Quantifier::ForAll { '!' } else { '?' });
            let mut cur = f;
            let mut first = true;
            while let Some((q2, v, body)) = cur.as_quantifier() {
                if q2 != q {
                    break;
                }
                if !first {
                    out.push_str(", ");
                }
                out.push_str(&v.name);
                let next_same_type = matches!(body.as_quantifier(), Some((q3, w, _)) if q3 == q && w.ty == v.ty);
                if !next_same_type {
                    let _ = write!(out, " in {}", v.ty);
                }
                first = false;
                cur = body;
            }
            out.push_str(": ");
            write_formula(out, cur, 0);
        }
    }
    if prec < min {
        out.push(')');
    }
}

fn binary(out: &mut String, a: &Formula, op: &str, b: &Formula, left: u8, right: u8) {
    write_formula(out, a, left);
    out.push_str(op);
    write_formula(out, b, right);
}

/// Concrete syntax for `f`, accepted back by the parser.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, 0);
    out
}

/// Prints a whole problem in the input format.
pub fn print_problem(p: &Problem) -> String {
    let voc = &p.vocabulary;
    let s = &p.structure;
    let mut out = String::from("vocabulary {\n");
    for (ty, kind) in voc.types() {
        match kind {
            TypeKind::Enumerated => {
                let dom = s.domain(ty).expect("domain");
                let _ = writeln!(out, "  type {ty} := {{{}}}.", dom.elements().join(", "));
            }
            TypeKind::Interval { lo, hi } => {
                let _ = writeln!(out, "  type {ty} := {lo}..{hi}.");
            }
        }
    }
    for (pred, args) in voc.predicates() {
        let _ = write!(out, "  pred {pred}");
        if !args.is_empty() {
            let _ = write!(out, "({})", args.join(", "));
        }
        out.push_str(".\n");
    }
    for (func, decl) in voc.functions() {
        let _ = write!(out, "  func {func}");
        if !decl.args.is_empty() {
            let _ = write!(out, "({})", decl.args.join(", "));
        }
        match &decl.codomain {
            Codomain::Type(ty) => {
                let _ = writeln!(out, " -> {ty}.");
            }
            Codomain::Interval { lo, hi } => {
                let _ = writeln!(out, " -> Int[{lo}..{hi}].");
            }
        }
    }
    out.push_str("}\n\ntheory {\n");
    for f in &p.theory {
        let _ = writeln!(out, "  {}.", print_formula(f));
    }
    out.push_str("}\n\nstructure {\n");
    let element = |ty: &str, idx: u32| s.domain(ty).expect("domain").element_name(idx).clone();
    let tuple = |types: &[crate::logic::Name], t: &[u32]| -> String {
        let parts: Vec<_> = types.iter().zip(t).map(|(ty, &d)| element(ty, d)).collect();
        if parts.len() == 1 {
            parts[0].to_string()
        } else {
            format!("({})", parts.join(", "))
        }
    };
    for (pred, rel) in s.relations() {
        let params = voc.predicate(pred).expect("declared");
        if params.is_empty() {
            let _ = writeln!(out, "  {pred} := {}.", if rel.is_empty() { "false" } else { "true" });
            continue;
        }
        let tuples: Vec<String> = rel.tuples().map(|t| tuple(params, &t)).collect();
        let _ = writeln!(out, "  {pred} := {{{}}}.", tuples.join(", "));
    }
    for (func, table) in s.functions() {
        let decl = voc.function(func).expect("declared");
        let value = |v: i64| -> String {
            match &decl.codomain {
                Codomain::Type(ty) if !voc.is_interval_type(ty) => element(ty, v as u32).to_string(),
                _ => v.to_string(),
            }
        };
        if decl.args.is_empty() {
            let _ = writeln!(out, "  {func} := {}.", value(table.values()[0]));
            continue;
        }
        let extents = table.extents().to_vec();
        let entries: Vec<String> = table
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let key = crate::logic::decode_index(i, &extents);
                format!("{} -> {}", tuple(&decl.args, &key), value(v))
            })
            .collect();
        let _ = writeln!(out, "  {func} := {{{}}}.", entries.join(", "));
    }
    out.push_str("}\n");
    out
}
