use std::collections::HashMap;
use std::sync::Arc;

use super::lexer::{tokenize, Tok, Token};
use super::{ParseError, ParseErrorKind, Problem, SourceSpan};
use crate::logic::{
    check_atom, check_compare, name, sort_of, ArithOp, CmpOp, Codomain, Domain, Domains, Formula, FunctionTable, Name,
    Quantifier, Relation, Structure, Term, TypeError, TypeKind, Variable, Vocabulary, VocabularyError,
};

const RESERVED: &[&str] = &[
    "vocabulary",
    "theory",
    "structure",
    "type",
    "pred",
    "func",
    "in",
    "true",
    "false",
    "Int",
];

type PResult<T> = Result<T, ParseError>;

fn type_error_kind(e: &TypeError) -> ParseErrorKind {
    match e {
        TypeError::UnknownSymbol { .. } => ParseErrorKind::UnknownSymbol,
        TypeError::ArityMismatch { .. } => ParseErrorKind::ArityMismatch,
        TypeError::TypeMismatch { .. } => ParseErrorKind::TypeMismatch,
    }
}

struct Cursor {
    toks: Vec<Token>,
    pos: usize,
    file: Name,
}

impl Cursor {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn span_at(&self, pos: usize) -> SourceSpan {
        self.toks[pos.min(self.toks.len() - 1)].span(&self.file)
    }

    /// Span from the token at `start` to the last consumed token.
    fn span_from(&self, start: usize) -> SourceSpan {
        let first = self.span_at(start);
        let last = self.span_at(self.pos.saturating_sub(1).max(start));
        if first.line == last.line && last.col_end > first.col_start {
            SourceSpan {
                col_end: last.col_end,
                ..first
            }
        } else {
            first
        }
    }

    fn error(&self, kind: ParseErrorKind, span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError {
            kind,
            span,
            message: message.into(),
        }
    }

    fn syntax(&self, expected: &str) -> ParseError {
        let found = match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of block".to_string(),
        };
        self.error(
            ParseErrorKind::Syntax,
            self.span_at(self.pos),
            format!("expected {expected}, found {found}"),
        )
    }

    fn at_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.at_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.syntax(&format!("`{s}`")))
        }
    }

    fn at_keyword(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == k)
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, k: &str) -> PResult<()> {
        if self.eat_keyword(k) {
            Ok(())
        } else {
            Err(self.syntax(&format!("`{k}`")))
        }
    }

    /// A non-reserved identifier.
    fn ident(&mut self, what: &str) -> PResult<(Name, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => {
                let span = self.span_at(self.pos);
                self.bump();
                Ok((name(&s), span))
            }
            _ => Err(self.syntax(what)),
        }
    }

    fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    /// A signed integer literal.
    fn int(&mut self) -> PResult<i64> {
        let start = self.pos;
        let neg = self.eat_sym("-");
        match *self.peek() {
            Tok::Int(v) => {
                self.bump();
                let v = if neg { -(v as i128) } else { v as i128 };
                i64::try_from(v).map_err(|_| {
                    self.error(
                        ParseErrorKind::Syntax,
                        self.span_from(start),
                        "integer literal out of range",
                    )
                })
            }
            _ => Err(self.syntax("an integer")),
        }
    }
}

struct Block {
    toks: Vec<Token>,
}

/// Splits the token stream into its top-level `name { ... }` blocks.
fn split_blocks(toks: Vec<Token>, file: &Name) -> PResult<HashMap<&'static str, Block>> {
    let mut blocks: HashMap<&'static str, Block> = HashMap::new();
    let mut i = 0;
    while !matches!(toks[i].tok, Tok::Eof) {
        let head = &toks[i];
        let kind = match &head.tok {
            Tok::Ident(s) if s == "vocabulary" => "vocabulary",
            Tok::Ident(s) if s == "theory" => "theory",
            Tok::Ident(s) if s == "structure" => "structure",
            _ => {
                return Err(ParseError {
                    kind: ParseErrorKind::Syntax,
                    span: head.span(file),
                    message: "expected `vocabulary`, `theory` or `structure`".into(),
                })
            }
        };
        if blocks.contains_key(kind) {
            return Err(ParseError {
                kind: ParseErrorKind::DuplicateDefinition,
                span: head.span(file),
                message: format!("second `{kind}` block"),
            });
        }
        let open = &toks[i + 1];
        if open.tok != Tok::Sym("{") {
            return Err(ParseError {
                kind: ParseErrorKind::Syntax,
                span: open.span(file),
                message: format!("expected `{{` after `{kind}`"),
            });
        }
        let mut depth = 0usize;
        let mut j = i + 1;
        loop {
            match &toks[j].tok {
                Tok::Sym("{") => depth += 1,
                Tok::Sym("}") => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                }
                Tok::Eof => {
                    return Err(ParseError {
                        kind: ParseErrorKind::Syntax,
                        span: toks[j].span(file),
                        message: format!("unterminated `{kind}` block"),
                    })
                }
                _ => {}
            }
            j += 1;
        }
        let mut body: Vec<Token> = toks[i + 2..j].to_vec();
        body.push(Token {
            tok: Tok::Eof,
            ..toks[j].clone()
        });
        blocks.insert(kind, Block { toks: body });
        i = j + 1;
    }
    Ok(blocks)
}

/// Declarations collected from the vocabulary block.
struct VocabularyParse {
    vocabulary: Vocabulary,
    domains: Domains,
    type_spans: HashMap<Name, SourceSpan>,
}

fn vocabulary_error(cur: &Cursor, e: VocabularyError, span: SourceSpan) -> ParseError {
    let kind = match e {
        VocabularyError::DuplicateName(_) => ParseErrorKind::DuplicateDefinition,
        VocabularyError::UnknownType(_) => ParseErrorKind::UnknownSymbol,
        VocabularyError::EmptyInterval { .. } => ParseErrorKind::TypeMismatch,
    };
    cur.error(kind, span, e.to_string())
}

fn check_not_element(cur: &Cursor, domains: &Domains, n: &Name, span: &SourceSpan) -> PResult<()> {
    if domains.element(n).is_some() {
        return Err(cur.error(
            ParseErrorKind::DuplicateDefinition,
            span.clone(),
            format!("`{n}` is already declared as a domain element"),
        ));
    }
    Ok(())
}

fn parse_type_list(cur: &mut Cursor) -> PResult<Vec<(Name, SourceSpan)>> {
    let mut out = Vec::new();
    if cur.eat_sym("(") && !cur.eat_sym(")") {
        loop {
            out.push(cur.ident("a type name")?);
            if cur.eat_sym(")") {
                break;
            }
            cur.expect_sym(",")?;
        }
    }
    Ok(out)
}

fn parse_vocabulary(cur: &mut Cursor) -> PResult<VocabularyParse> {
    let mut vp = VocabularyParse {
        vocabulary: Vocabulary::new(),
        domains: Domains::new(),
        type_spans: HashMap::new(),
    };
    while !cur.at_eof() {
        let start = cur.pos;
        if cur.eat_keyword("type") {
            let (ty, span) = cur.ident("a type name")?;
            check_not_element(cur, &vp.domains, &ty, &span)?;
            if cur.eat_sym(":=") {
                if cur.eat_sym("{") {
                    let mut elems: Vec<(Name, SourceSpan)> = Vec::new();
                    if !cur.eat_sym("}") {
                        loop {
                            let (e, espan) = cur.ident("an element name")?;
                            if elems.iter().any(|(x, _)| *x == e)
                                || vp.domains.element(&e).is_some()
                                || vp.vocabulary.contains(&e)
                                || e == ty
                            {
                                return Err(cur.error(
                                    ParseErrorKind::DuplicateDefinition,
                                    espan,
                                    format!("element `{e}` is already declared"),
                                ));
                            }
                            elems.push((e, espan));
                            if cur.eat_sym("}") {
                                break;
                            }
                            cur.expect_sym(",")?;
                        }
                    }
                    vp.vocabulary
                        .add_type(ty.clone(), TypeKind::Enumerated)
                        .map_err(|e| vocabulary_error(cur, e, span.clone()))?;
                    let dom = Domain::enumerated(elems.iter().map(|(e, _)| e.as_ref()))
                        .expect("element names checked for duplicates");
                    vp.domains
                        .insert(ty.clone(), dom)
                        .expect("element names checked against other types");
                } else {
                    let lo = cur.int()?;
                    cur.expect_sym("..")?;
                    let hi = cur.int()?;
                    vp.vocabulary
                        .add_type(ty.clone(), TypeKind::Interval { lo, hi })
                        .map_err(|e| vocabulary_error(cur, e, cur.span_from(start)))?;
                    vp.domains
                        .insert(ty.clone(), Domain::interval(lo, hi))
                        .expect("interval domains never clash");
                }
            } else {
                vp.vocabulary
                    .add_type(ty.clone(), TypeKind::Enumerated)
                    .map_err(|e| vocabulary_error(cur, e, span.clone()))?;
            }
            vp.type_spans.insert(ty, span);
        } else if cur.eat_keyword("pred") {
            let (p, span) = cur.ident("a predicate name")?;
            check_not_element(cur, &vp.domains, &p, &span)?;
            let args = parse_type_list(cur)?;
            let names = resolve_types(cur, &vp.vocabulary, &args)?;
            vp.vocabulary
                .add_predicate(p, names)
                .map_err(|e| vocabulary_error(cur, e, span))?;
        } else if cur.eat_keyword("func") {
            let (f, span) = cur.ident("a function name")?;
            check_not_element(cur, &vp.domains, &f, &span)?;
            let args = parse_type_list(cur)?;
            let names = resolve_types(cur, &vp.vocabulary, &args)?;
            cur.expect_sym("->")?;
            let codomain = if cur.eat_keyword("Int") {
                cur.expect_sym("[")?;
                let lo = cur.int()?;
                cur.expect_sym("..")?;
                let hi = cur.int()?;
                cur.expect_sym("]")?;
                Codomain::Interval { lo, hi }
            } else {
                let (ty, tspan) = cur.ident("a codomain type")?;
                resolve_types(cur, &vp.vocabulary, &[(ty.clone(), tspan)])?;
                Codomain::Type(ty)
            };
            vp.vocabulary
                .add_function(f, names, codomain)
                .map_err(|e| vocabulary_error(cur, e, span))?;
        } else {
            return Err(cur.syntax("`type`, `pred` or `func`"));
        }
        cur.expect_sym(".")?;
    }
    Ok(vp)
}

fn resolve_types(cur: &Cursor, voc: &Vocabulary, types: &[(Name, SourceSpan)]) -> PResult<Vec<Name>> {
    types
        .iter()
        .map(|(t, span)| {
            if voc.type_kind(t).is_none() {
                Err(cur.error(
                    ParseErrorKind::UnknownSymbol,
                    span.clone(),
                    format!("unknown type `{t}`"),
                ))
            } else {
                Ok(t.clone())
            }
        })
        .collect()
}

/// An element of type `ty`: a name for enumerations, an integer for intervals.
fn parse_element(cur: &mut Cursor, domains: &Domains, ty: &Name) -> PResult<u32> {
    let start = cur.pos;
    let dom = domains.get(ty).ok_or_else(|| {
        cur.error(
            ParseErrorKind::InvalidInterpretation,
            cur.span_at(start),
            format!("type `{ty}` has no domain yet"),
        )
    })?;
    let found = match dom.interval_bounds() {
        Some(_) => {
            let v = cur.int()?;
            dom.index_of_value(v).ok_or_else(|| v.to_string())
        }
        None => {
            let (e, _) = cur.ident("an element name")?;
            dom.index_of(&e).ok_or_else(|| e.to_string())
        }
    };
    found.map_err(|e| {
        cur.error(
            ParseErrorKind::UnknownElement,
            cur.span_from(start),
            format!("`{e}` is not an element of `{ty}`"),
        )
    })
}

/// A tuple `(e1, ..., ek)`; unary tuples may omit the parentheses.
fn parse_tuple(cur: &mut Cursor, domains: &Domains, types: &[Name]) -> PResult<Vec<u32>> {
    let start = cur.pos;
    if types.len() == 1 && !cur.at_sym("(") {
        return Ok(vec![parse_element(cur, domains, &types[0])?]);
    }
    cur.expect_sym("(")?;
    let mut out = Vec::with_capacity(types.len());
    for (i, ty) in types.iter().enumerate() {
        if i > 0 {
            cur.expect_sym(",")?;
        }
        out.push(parse_element(cur, domains, ty)?);
    }
    if !cur.eat_sym(")") {
        let _ = cur.bump();
        return Err(cur.error(
            ParseErrorKind::ArityMismatch,
            cur.span_from(start),
            format!("expected a tuple of {} element(s)", types.len()),
        ));
    }
    Ok(out)
}

enum Interpretation {
    Relation(Name, Relation),
    Function(Name, FunctionTable),
}

fn parse_structure(cur: &mut Cursor, vp: &mut VocabularyParse) -> PResult<Vec<Interpretation>> {
    let mut out = Vec::new();
    let mut seen: HashMap<Name, SourceSpan> = HashMap::new();
    while !cur.at_eof() {
        let start = cur.pos;
        let (sym, span) = cur.ident("a symbol name")?;
        cur.expect_sym(":=")?;
        if seen.contains_key(&sym) {
            return Err(cur.error(
                ParseErrorKind::DuplicateDefinition,
                span,
                format!("`{sym}` is interpreted twice"),
            ));
        }
        seen.insert(sym.clone(), span.clone());
        if let Some(kind) = vp.vocabulary.type_kind(&sym) {
            if kind != TypeKind::Enumerated || vp.domains.get(&sym).is_some() {
                return Err(cur.error(
                    ParseErrorKind::DuplicateDefinition,
                    span,
                    format!("type `{sym}` already has a domain"),
                ));
            }
            cur.expect_sym("{")?;
            let mut elems: Vec<Name> = Vec::new();
            if !cur.eat_sym("}") {
                loop {
                    let (e, espan) = cur.ident("an element name")?;
                    if elems.contains(&e) || vp.domains.element(&e).is_some() || vp.vocabulary.contains(&e) {
                        return Err(cur.error(
                            ParseErrorKind::DuplicateDefinition,
                            espan,
                            format!("element `{e}` is already declared"),
                        ));
                    }
                    elems.push(e);
                    if cur.eat_sym("}") {
                        break;
                    }
                    cur.expect_sym(",")?;
                }
            }
            let dom = Domain::enumerated(elems.iter().map(|e| e.as_ref())).expect("checked");
            vp.domains.insert(sym, dom).expect("checked");
        } else if let Some(params) = vp.vocabulary.predicate(&sym).map(<[Name]>::to_vec) {
            let extents = extents_of(cur, vp, &params, start)?;
            let mut rel = Relation::empty(extents);
            if params.is_empty() && (cur.at_keyword("true") || cur.at_keyword("false")) {
                if cur.eat_keyword("true") {
                    rel.insert(&[]);
                } else {
                    cur.bump();
                }
            } else {
                cur.expect_sym("{")?;
                if !cur.eat_sym("}") {
                    loop {
                        let t = parse_tuple(cur, &vp.domains, &params)?;
                        rel.insert(&t);
                        if cur.eat_sym("}") {
                            break;
                        }
                        cur.expect_sym(",")?;
                    }
                }
            }
            out.push(Interpretation::Relation(sym, rel));
        } else if let Some(decl) = vp.vocabulary.function(&sym).cloned() {
            let extents = extents_of(cur, vp, &decl.args, start)?;
            let size: usize = extents.iter().product();
            let mut values: Vec<Option<i64>> = vec![None; size];
            let parse_value = |cur: &mut Cursor, vp: &VocabularyParse| -> PResult<i64> {
                let vstart = cur.pos;
                let v = match &decl.codomain {
                    Codomain::Interval { lo, hi } => {
                        let v = cur.int()?;
                        if !(*lo..=*hi).contains(&v) {
                            return Err(cur.error(
                                ParseErrorKind::InvalidInterpretation,
                                cur.span_from(vstart),
                                format!("value {v} is outside {lo}..{hi}"),
                            ));
                        }
                        v
                    }
                    Codomain::Type(ty) => {
                        let idx = parse_element(cur, &vp.domains, ty)?;
                        vp.domains.get(ty).expect("resolved").value_of(idx)
                    }
                };
                Ok(v)
            };
            let mut assign = |cur: &Cursor, key: &[u32], v: i64, kstart: usize| -> PResult<()> {
                let idx = key.iter().zip(&extents).fold(0usize, |a, (&d, &e)| a * e + d as usize);
                if values[idx].replace(v).is_some() {
                    return Err(cur.error(
                        ParseErrorKind::InvalidInterpretation,
                        cur.span_from(kstart),
                        "argument tuple is mapped twice",
                    ));
                }
                Ok(())
            };
            if decl.args.is_empty() && !cur.at_sym("{") {
                let v = parse_value(cur, vp)?;
                assign(cur, &[], v, start)?;
            } else {
                cur.expect_sym("{")?;
                if !cur.eat_sym("}") {
                    loop {
                        let kstart = cur.pos;
                        let key = parse_tuple(cur, &vp.domains, &decl.args)?;
                        cur.expect_sym("->")?;
                        let v = parse_value(cur, vp)?;
                        assign(cur, &key, v, kstart)?;
                        if cur.eat_sym("}") {
                            break;
                        }
                        cur.expect_sym(",")?;
                    }
                }
            }
            let missing = values.iter().filter(|v| v.is_none()).count();
            if missing > 0 {
                return Err(cur.error(
                    ParseErrorKind::InvalidInterpretation,
                    span,
                    format!("`{sym}` is not total: {missing} argument tuple(s) unmapped"),
                ));
            }
            let table = FunctionTable::new(extents, values.into_iter().map(Option::unwrap).collect())
                .expect("table size matches extents");
            out.push(Interpretation::Function(sym, table));
        } else {
            return Err(cur.error(ParseErrorKind::UnknownSymbol, span, format!("unknown symbol `{sym}`")));
        }
        cur.expect_sym(".")?;
    }
    Ok(out)
}

fn extents_of(cur: &Cursor, vp: &VocabularyParse, types: &[Name], start: usize) -> PResult<Vec<usize>> {
    types
        .iter()
        .map(|t| {
            vp.domains.extent(t).ok_or_else(|| {
                cur.error(
                    ParseErrorKind::InvalidInterpretation,
                    cur.span_at(start),
                    format!("type `{t}` has no domain yet"),
                )
            })
        })
        .collect()
}

/// Formula parser over a fixed vocabulary and domains.
struct FormulaParser<'a> {
    cur: Cursor,
    voc: &'a Vocabulary,
    domains: &'a Domains,
    scope: Vec<Variable>,
}

impl FormulaParser<'_> {
    fn lookup_var(&self, n: &str) -> Option<&Variable> {
        self.scope.iter().rev().find(|v| &*v.name == n)
    }

    fn type_err(&self, e: TypeError, start: usize) -> ParseError {
        self.cur
            .error(type_error_kind(&e), self.cur.span_from(start), e.to_string())
    }

    fn formula(&mut self) -> PResult<Formula> {
        let mut l = self.implication()?;
        while self.cur.eat_sym("<=>") {
            let r = self.implication()?;
            l = Formula::equiv(l, r);
        }
        Ok(l)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let l = self.disjunction()?;
        if self.cur.eat_sym("=>") {
            let r = self.implication()?;
            return Ok(Formula::implies(l, r));
        }
        Ok(l)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut l = self.conjunction()?;
        while self.cur.eat_sym("|") {
            let r = self.conjunction()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut l = self.unary()?;
        while self.cur.eat_sym("&") {
            let r = self.unary()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.cur.eat_sym("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.cur.at_sym("!") || self.cur.at_sym("?") {
            return self.quantified();
        }
        if self.cur.eat_keyword("true") {
            return Ok(Formula::True);
        }
        if self.cur.eat_keyword("false") {
            return Ok(Formula::False);
        }
        if self.cur.at_sym("(") {
            let save = self.cur.pos;
            if let Ok(f) = self.comparison() {
                return Ok(f);
            }
            self.cur.pos = save;
            self.cur.bump();
            let f = self.formula()?;
            self.cur.expect_sym(")")?;
            return Ok(f);
        }
        if let Tok::Ident(s) = self.cur.peek().clone() {
            if self.lookup_var(&s).is_none() && self.voc.predicate(&s).is_some() {
                return self.atom();
            }
        }
        self.comparison()
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let q = if self.cur.eat_sym("!") {
            Quantifier::ForAll
        } else {
            self.cur.expect_sym("?")?;
            Quantifier::Exists
        };
        let mut binders: Vec<Variable> = Vec::new();
        loop {
            let mut group = vec![self.cur.ident("a variable name")?.0];
            while self.cur.eat_sym(",") {
                group.push(self.cur.ident("a variable name")?.0);
            }
            self.cur.expect_keyword("in")?;
            let (ty, tspan) = self.cur.ident("a type name")?;
            if self.voc.type_kind(&ty).is_none() {
                return Err(self
                    .cur
                    .error(ParseErrorKind::UnknownSymbol, tspan, format!("unknown type `{ty}`")));
            }
            binders.extend(group.into_iter().map(|n| Variable {
                name: n,
                ty: ty.clone(),
            }));
            if !self.cur.eat_sym(",") {
                break;
            }
        }
        self.cur.expect_sym(":")?;
        let depth = self.scope.len();
        self.scope.extend(binders.iter().cloned());
        let body = self.formula();
        self.scope.truncate(depth);
        let body = body?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |acc, v| Formula::quantified(q, v, acc)))
    }

    fn atom(&mut self) -> PResult<Formula> {
        let start = self.cur.pos;
        let (pred, _) = self.cur.ident("a predicate")?;
        let args = if self.cur.at_sym("(") {
            self.arguments()?
        } else {
            Vec::new()
        };
        check_atom(self.voc, &pred, &args).map_err(|e| self.type_err(e, start))?;
        Ok(Formula::Atom { pred, args })
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.cur.expect_sym("(")?;
        let mut args = Vec::new();
        if self.cur.eat_sym(")") {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.cur.eat_sym(")") {
                return Ok(args);
            }
            self.cur.expect_sym(",")?;
        }
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let start = self.cur.pos;
        let lhs = self.term()?;
        let op = match self.cur.peek() {
            Tok::Sym("=") => CmpOp::Eq,
            Tok::Sym("~=") => CmpOp::Ne,
            Tok::Sym("<") => CmpOp::Lt,
            Tok::Sym("=<") => CmpOp::Le,
            Tok::Sym(">") => CmpOp::Gt,
            Tok::Sym(">=") => CmpOp::Ge,
            _ => return Err(self.cur.syntax("a comparison operator")),
        };
        self.cur.bump();
        let rhs = self.term()?;
        check_compare(self.voc, op, &lhs, &rhs).map_err(|e| self.type_err(e, start))?;
        Ok(Formula::compare(op, lhs, rhs))
    }

    fn term(&mut self) -> PResult<Term> {
        let start = self.cur.pos;
        let mut l = self.product()?;
        loop {
            let op = if self.cur.eat_sym("+") {
                ArithOp::Add
            } else if self.cur.eat_sym("-") {
                ArithOp::Sub
            } else {
                return Ok(l);
            };
            let r = self.product()?;
            l = Term::arith(op, l, r);
            sort_of(&l, self.voc).map_err(|e| self.type_err(e, start))?;
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let start = self.cur.pos;
        let mut l = self.primary()?;
        while self.cur.eat_sym("*") {
            let r = self.primary()?;
            l = Term::arith(ArithOp::Mul, l, r);
            sort_of(&l, self.voc).map_err(|e| self.type_err(e, start))?;
        }
        Ok(l)
    }

    fn primary(&mut self) -> PResult<Term> {
        let start = self.cur.pos;
        match self.cur.peek().clone() {
            Tok::Int(_) => Ok(Term::Int(self.cur.int()?)),
            Tok::Sym("-") if matches!(self.cur.peek_at(1), Tok::Int(_)) => Ok(Term::Int(self.cur.int()?)),
            Tok::Sym("(") => {
                self.cur.bump();
                let t = self.term()?;
                self.cur.expect_sym(")")?;
                Ok(t)
            }
            Tok::Ident(_) => {
                let (n, span) = self.cur.ident("a term")?;
                if let Some(v) = self.lookup_var(&n) {
                    return Ok(Term::Var(v.clone()));
                }
                if self.voc.function(&n).is_some() {
                    let args = if self.cur.at_sym("(") {
                        self.arguments()?
                    } else {
                        Vec::new()
                    };
                    let t = Term::App { func: n, args };
                    sort_of(&t, self.voc).map_err(|e| self.type_err(e, start))?;
                    return Ok(t);
                }
                if let Some((ty, _)) = self.domains.element(&n) {
                    return Ok(Term::Elem {
                        name: n,
                        ty: ty.clone(),
                    });
                }
                if self.voc.predicate(&n).is_some() {
                    return Err(self.cur.error(
                        ParseErrorKind::TypeMismatch,
                        span,
                        format!("predicate `{n}` used as a term"),
                    ));
                }
                Err(self
                    .cur
                    .error(ParseErrorKind::UnknownSymbol, span, format!("unknown symbol `{n}`")))
            }
            _ => Err(self.cur.syntax("a term")),
        }
    }
}

pub(crate) fn parse_problem_named(text: &str, file: &str) -> PResult<Problem> {
    let file = name(file);
    let toks = tokenize(text, &file)?;
    let mut blocks = split_blocks(toks, &file)?;
    let vblock = blocks.remove("vocabulary");
    let mut vp = match vblock {
        Some(b) => parse_vocabulary(&mut Cursor {
            toks: b.toks,
            pos: 0,
            file: file.clone(),
        })?,
        None => VocabularyParse {
            vocabulary: Vocabulary::new(),
            domains: Domains::new(),
            type_spans: HashMap::new(),
        },
    };
    let interpretations = match blocks.remove("structure") {
        Some(b) => parse_structure(
            &mut Cursor {
                toks: b.toks,
                pos: 0,
                file: file.clone(),
            },
            &mut vp,
        )?,
        None => Vec::new(),
    };
    for (ty, _) in vp.vocabulary.types() {
        if vp.domains.get(ty).is_none() {
            return Err(ParseError {
                kind: ParseErrorKind::InvalidInterpretation,
                span: vp.type_spans[ty].clone(),
                message: format!("type `{ty}` has no domain"),
            });
        }
    }
    let theory = match blocks.remove("theory") {
        Some(b) => {
            let mut p = FormulaParser {
                cur: Cursor {
                    toks: b.toks,
                    pos: 0,
                    file: file.clone(),
                },
                voc: &vp.vocabulary,
                domains: &vp.domains,
                scope: Vec::new(),
            };
            let mut sentences = Vec::new();
            while !p.cur.at_eof() {
                let f = p.formula()?;
                p.cur.expect_sym(".")?;
                sentences.push(f.desugar());
            }
            sentences
        }
        None => Vec::new(),
    };
    let vocabulary = Arc::new(vp.vocabulary);
    let mut structure =
        Structure::new(vocabulary.clone(), Arc::new(vp.domains)).expect("every type has a matching domain");
    for i in interpretations {
        match i {
            Interpretation::Relation(p, r) => structure.set_relation(&p, r),
            Interpretation::Function(f, t) => structure.set_function(&f, t),
        }
        .expect("interpretations validated while parsing");
    }
    Ok(Problem {
        vocabulary,
        theory,
        structure,
    })
}

/// Parses a single formula in which `free` may occur free. The result is
/// desugared.
pub fn parse_formula(text: &str, vocabulary: &Vocabulary, domains: &Domains, free: &[Variable]) -> PResult<Formula> {
    let file = name("<formula>");
    let toks = tokenize(text, &file)?;
    let mut p = FormulaParser {
        cur: Cursor { toks, pos: 0, file },
        voc: vocabulary,
        domains,
        scope: free.to_vec(),
    };
    let f = p.formula()?;
    p.cur.eat_sym(".");
    if !p.cur.at_eof() {
        return Err(p.cur.syntax("end of input"));
    }
    Ok(f.desugar())
}
