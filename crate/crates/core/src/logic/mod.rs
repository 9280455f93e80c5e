//! Typed first-order logic: vocabularies, formulas, (partial) structures and
//! a reference model checker.
//!
//! Domain elements are dense indices `0..n` in declaration order. Terms are
//! evaluated to *canonical values*: the element index for enumerated types and
//! the integer itself for interval types and integer expressions.

mod formula;
mod model;
mod structure;
mod typecheck;
mod vocabulary;

use std::sync::Arc;

pub use formula::{ArithOp, CmpOp, Formula, Quantifier, Term, Variable};
pub use model::{check_models, eval_term, holds, Assignment, ModelError};
pub use structure::{decode as decode_index, Domain, Domains, FunctionTable, Relation, Structure, StructureError};
pub use typecheck::{check_atom, check_compare, sort_of, type_check, Sort, TypeError};
pub use vocabulary::{Codomain, FunctionDecl, TypeKind, Vocabulary, VocabularyError};

/// Shared, cheaply clonable identifier.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}
