//! Text format for problems: a `vocabulary` block, a `theory` block of
//! sentences and a `structure` block interpreting part of the vocabulary.
//!
//! ```text
//! vocabulary {
//!   type T := {a, b, c}.
//!   pred p(T). pred q(T).
//!   func f(T) -> Int[0..10].
//! }
//! theory {
//!   !x in T: p(x) | q(x).
//! }
//! structure {
//!   p := {a, b}.
//!   f := {a -> 3, b -> 0, c -> 7}.
//! }
//! ```

mod lexer;
mod parse;
mod print;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{Formula, Name, Structure, Vocabulary};

pub use parse::parse_formula;
pub use print::{print_formula, print_problem, print_term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: Name,
    pub line: u32,
    pub col_start: u32,
    /// Exclusive.
    pub col_end: u32,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col_start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownSymbol,
    ArityMismatch,
    TypeMismatch,
    DuplicateDefinition,
    UnknownElement,
    InvalidInterpretation,
}

impl ParseErrorKind {
    pub fn is_type_error(self) -> bool {
        matches!(
            self,
            ParseErrorKind::UnknownSymbol | ParseErrorKind::ArityMismatch | ParseErrorKind::TypeMismatch
        )
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
    pub message: String,
}

/// A model expansion problem: find interpretations for the symbols the
/// structure leaves open so that every sentence of the theory holds.
#[derive(Debug, Clone)]
pub struct Problem {
    pub vocabulary: Arc<Vocabulary>,
    /// Desugared sentences.
    pub theory: Vec<Formula>,
    pub structure: Structure,
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse::parse_problem_named(text, "<input>")
}

/// Like [`parse_problem`], reporting errors against `file`.
pub fn parse_problem_named(text: &str, file: &str) -> Result<Problem, ParseError> {
    parse::parse_problem_named(text, file)
}
