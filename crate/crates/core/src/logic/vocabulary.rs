use indexmap::IndexMap;
use thiserror::Error;

use super::Name;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TypeKind {
    /// Elements are enumerated by name in the structure.
    Enumerated,
    /// The inclusive integer range `lo..=hi`.
    Interval { lo: i64, hi: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionDecl {
    pub args: Vec<Name>,
    pub codomain: Codomain,
}

/// Function codomain: a declared type or an anonymous integer interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Codomain {
    Type(Name),
    Interval { lo: i64, hi: i64 },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VocabularyError {
    #[error("`{0}` is already declared")]
    DuplicateName(Name),
    #[error("unknown type `{0}`")]
    UnknownType(Name),
    #[error("empty interval {lo}..{hi}")]
    EmptyInterval { lo: i64, hi: i64 },
}

/// Types, predicate and function symbols. Names are unique across all three.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    types: IndexMap<Name, TypeKind>,
    predicates: IndexMap<Name, Vec<Name>>,
    functions: IndexMap<Name, FunctionDecl>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    fn check_fresh(&self, name: &Name) -> Result<(), VocabularyError> {
        if self.types.contains_key(name) || self.predicates.contains_key(name) || self.functions.contains_key(name) {
            return Err(VocabularyError::DuplicateName(name.clone()));
        }
        Ok(())
    }

    fn check_types(&self, args: &[Name]) -> Result<(), VocabularyError> {
        for ty in args {
            if !self.types.contains_key(ty) {
                return Err(VocabularyError::UnknownType(ty.clone()));
            }
        }
        Ok(())
    }

    pub fn add_type(&mut self, name: Name, kind: TypeKind) -> Result<(), VocabularyError> {
        self.check_fresh(&name)?;
        if let TypeKind::Interval { lo, hi } = kind {
            if lo > hi {
                return Err(VocabularyError::EmptyInterval { lo, hi });
            }
        }
        self.types.insert(name, kind);
        Ok(())
    }

    pub fn add_predicate(&mut self, name: Name, args: Vec<Name>) -> Result<(), VocabularyError> {
        self.check_fresh(&name)?;
        self.check_types(&args)?;
        self.predicates.insert(name, args);
        Ok(())
    }

    pub fn add_function(&mut self, name: Name, args: Vec<Name>, codomain: Codomain) -> Result<(), VocabularyError> {
        self.check_fresh(&name)?;
        self.check_types(&args)?;
        match &codomain {
            Codomain::Type(ty) => self.check_types(std::slice::from_ref(ty))?,
            Codomain::Interval { lo, hi } if lo > hi => {
                return Err(VocabularyError::EmptyInterval { lo: *lo, hi: *hi })
            }
            Codomain::Interval { .. } => {}
        }
        self.functions.insert(name, FunctionDecl { args, codomain });
        Ok(())
    }

    pub fn type_kind(&self, name: &str) -> Option<TypeKind> {
        self.types.get(name).copied()
    }

    pub fn is_interval_type(&self, name: &str) -> bool {
        matches!(self.type_kind(name), Some(TypeKind::Interval { .. }))
    }

    pub fn predicate(&self, name: &str) -> Option<&[Name]> {
        self.predicates.get(name).map(Vec::as_slice)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.get(name)
    }

    pub fn types(&self) -> impl Iterator<Item = (&Name, TypeKind)> {
        self.types.iter().map(|(n, k)| (n, *k))
    }

    pub fn predicates(&self) -> impl Iterator<Item = (&Name, &[Name])> {
        self.predicates.iter().map(|(n, a)| (n, a.as_slice()))
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, &FunctionDecl)> {
        self.functions.iter()
    }

    /// True if `name` is a predicate or function symbol.
    pub fn is_symbol(&self, name: &str) -> bool {
        self.predicates.contains_key(name) || self.functions.contains_key(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.types.contains_key(name) || self.is_symbol(name)
    }
}
