use std::collections::HashMap;
use std::sync::Arc;

use indexmap::IndexMap;
use thiserror::Error;

use super::{name, Codomain, Name, TypeKind, Vocabulary};
use crate::tensor::Bits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("element `{0}` is declared in more than one type")]
    DuplicateElement(Name),
    #[error("type `{0}` has no domain")]
    MissingDomain(Name),
    #[error("unknown type `{0}`")]
    UnknownType(Name),
    #[error("`{0}` is not a symbol of the vocabulary")]
    UnknownSymbol(Name),
    #[error("`{0}` is already interpreted")]
    DuplicateInterpretation(Name),
    #[error("`{symbol}`: tuple {tuple:?} is outside the argument domains")]
    TupleOutOfRange { symbol: Name, tuple: Vec<u32> },
    #[error("`{symbol}`: value {value} is outside the codomain")]
    ValueOutOfRange { symbol: Name, value: i64 },
    #[error("`{symbol}`: expected {expected} table entries, found {found}")]
    TableSize {
        symbol: Name,
        expected: usize,
        found: usize,
    },
    #[error("interpretation of `{0}` does not match its declaration")]
    ShapeMismatch(Name),
    #[error("structures have different domains")]
    DomainMismatch,
}

/// The ordered elements of one type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    elements: Vec<Name>,
    index: HashMap<Name, u32>,
    interval: Option<(i64, i64)>,
}

impl Domain {
    pub fn enumerated<I, S>(elements: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let elements: Vec<Name> = elements.into_iter().map(|s| name(s.as_ref())).collect();
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i as u32).is_some() {
                return Err(StructureError::DuplicateElement(e.clone()));
            }
        }
        Ok(Self {
            elements,
            index,
            interval: None,
        })
    }

    pub fn interval(lo: i64, hi: i64) -> Self {
        let elements: Vec<Name> = (lo..=hi).map(|v| name(&v.to_string())).collect();
        Self {
            elements,
            index: HashMap::new(),
            interval: Some((lo, hi)),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_name(&self, index: u32) -> &Name {
        &self.elements[index as usize]
    }

    pub fn elements(&self) -> &[Name] {
        &self.elements
    }

    pub fn interval_bounds(&self) -> Option<(i64, i64)> {
        self.interval
    }

    pub fn index_of(&self, element: &str) -> Option<u32> {
        match self.interval {
            Some((lo, hi)) => {
                let v: i64 = element.parse().ok()?;
                (lo..=hi).contains(&v).then(|| (v - lo) as u32)
            }
            None => self.index.get(element).copied(),
        }
    }

    /// Canonical value of the element at `index`.
    pub fn value_of(&self, index: u32) -> i64 {
        match self.interval {
            Some((lo, _)) => lo + index as i64,
            None => index as i64,
        }
    }

    /// Inverse of [`Domain::value_of`].
    pub fn index_of_value(&self, value: i64) -> Option<u32> {
        let idx = match self.interval {
            Some((lo, _)) => value.checked_sub(lo)?,
            None => value,
        };
        (0..self.len() as i64).contains(&idx).then_some(idx as u32)
    }
}

/// The domain of every type. Enumerations are pairwise disjoint.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Domains {
    types: IndexMap<Name, Domain>,
    owner: HashMap<Name, (Name, u32)>,
}

impl Domains {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, ty: Name, domain: Domain) -> Result<(), StructureError> {
        if domain.interval.is_none() {
            for (i, e) in domain.elements.iter().enumerate() {
                if self.owner.contains_key(e) {
                    return Err(StructureError::DuplicateElement(e.clone()));
                }
                self.owner.insert(e.clone(), (ty.clone(), i as u32));
            }
        }
        self.types.insert(ty, domain);
        Ok(())
    }

    pub fn get(&self, ty: &str) -> Option<&Domain> {
        self.types.get(ty)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Domain)> {
        self.types.iter()
    }

    /// Looks up an enumerated element by name.
    pub fn element(&self, element: &str) -> Option<(&Name, u32)> {
        self.owner.get(element).map(|(t, i)| (t, *i))
    }

    pub fn extent(&self, ty: &str) -> Option<usize> {
        self.get(ty).map(Domain::len)
    }
}

/// A relation stored densely as a row-major bit array over its argument
/// domains (last argument fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    extents: Vec<usize>,
    bits: Bits,
}

impl Relation {
    pub fn empty(extents: Vec<usize>) -> Self {
        let len = extents.iter().product();
        Self {
            extents,
            bits: Bits::zeros(len),
        }
    }

    pub fn from_tuples<I>(extents: Vec<usize>, tuples: I) -> Option<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[u32]>,
    {
        let mut rel = Self::empty(extents);
        for t in tuples {
            if !rel.insert(t.as_ref()) {
                return None;
            }
        }
        Some(rel)
    }

    pub fn from_bits(extents: Vec<usize>, bits: Bits) -> Option<Self> {
        (bits.len() == extents.iter().product::<usize>()).then_some(Self { extents, bits })
    }

    pub fn linear_index(&self, tuple: &[u32]) -> Option<usize> {
        if tuple.len() != self.extents.len() {
            return None;
        }
        let mut idx = 0usize;
        for (&d, &e) in tuple.iter().zip(&self.extents) {
            if d as usize >= e {
                return None;
            }
            idx = idx * e + d as usize;
        }
        Some(idx)
    }

    /// Returns false if the tuple is out of range.
    pub fn insert(&mut self, tuple: &[u32]) -> bool {
        match self.linear_index(tuple) {
            Some(i) => {
                self.bits.set(i, true);
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, tuple: &[u32]) -> bool {
        self.linear_index(tuple).is_some_and(|i| self.bits.get(i))
    }

    pub fn contains_linear(&self, index: usize) -> bool {
        self.bits.get(index)
    }

    pub fn arity(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tuples in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.bits.iter_ones().map(move |i| decode(i, &self.extents))
    }
}

pub fn decode(mut index: usize, extents: &[usize]) -> Vec<u32> {
    let mut out = vec![0u32; extents.len()];
    for (slot, &e) in out.iter_mut().zip(extents).rev() {
        *slot = (index % e) as u32;
        index /= e;
    }
    out
}

/// Dense function table over the argument domains; entries are canonical
/// values of the codomain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    extents: Vec<usize>,
    values: Vec<i64>,
}

impl FunctionTable {
    pub fn new(extents: Vec<usize>, values: Vec<i64>) -> Option<Self> {
        (values.len() == extents.iter().product::<usize>()).then_some(Self { extents, values })
    }

    pub fn get(&self, args: &[u32]) -> Option<i64> {
        let mut idx = 0usize;
        if args.len() != self.extents.len() {
            return None;
        }
        for (&d, &e) in args.iter().zip(&self.extents) {
            if d as usize >= e {
                return None;
            }
            idx = idx * e + d as usize;
        }
        Some(self.values[idx])
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }
}

/// A (possibly partial) structure: domains for every type plus
/// interpretations for a subset of the symbols.
#[derive(Debug, Clone)]
pub struct Structure {
    vocabulary: Arc<Vocabulary>,
    domains: Arc<Domains>,
    relations: IndexMap<Name, Relation>,
    functions: IndexMap<Name, FunctionTable>,
}

impl Structure {
    pub fn new(vocabulary: Arc<Vocabulary>, domains: Arc<Domains>) -> Result<Self, StructureError> {
        for (ty, kind) in vocabulary.types() {
            let dom = domains
                .get(ty)
                .ok_or_else(|| StructureError::MissingDomain(ty.clone()))?;
            let matches = match kind {
                TypeKind::Enumerated => dom.interval.is_none(),
                TypeKind::Interval { lo, hi } => dom.interval == Some((lo, hi)),
            };
            if !matches {
                return Err(StructureError::ShapeMismatch(ty.clone()));
            }
        }
        Ok(Self {
            vocabulary,
            domains,
            relations: IndexMap::new(),
            functions: IndexMap::new(),
        })
    }

    pub fn vocabulary(&self) -> &Arc<Vocabulary> {
        &self.vocabulary
    }

    pub fn domains(&self) -> &Arc<Domains> {
        &self.domains
    }

    pub fn domain(&self, ty: &str) -> Option<&Domain> {
        self.domains.get(ty)
    }

    pub fn extent(&self, ty: &str) -> usize {
        self.domains.extent(ty).unwrap_or(0)
    }

    pub fn extents(&self, types: &[Name]) -> Vec<usize> {
        types.iter().map(|t| self.extent(t)).collect()
    }

    pub fn set_relation(&mut self, pred: &str, rel: Relation) -> Result<(), StructureError> {
        let args = self
            .vocabulary
            .predicate(pred)
            .ok_or_else(|| StructureError::UnknownSymbol(name(pred)))?;
        if rel.extents != self.extents(args) {
            return Err(StructureError::ShapeMismatch(name(pred)));
        }
        if self.relations.contains_key(pred) {
            return Err(StructureError::DuplicateInterpretation(name(pred)));
        }
        self.relations.insert(name(pred), rel);
        Ok(())
    }

    pub fn set_function(&mut self, func: &str, table: FunctionTable) -> Result<(), StructureError> {
        let decl = self
            .vocabulary
            .function(func)
            .ok_or_else(|| StructureError::UnknownSymbol(name(func)))?;
        let extents = self.extents(&decl.args);
        if table.extents != extents {
            return Err(StructureError::TableSize {
                symbol: name(func),
                expected: extents.iter().product(),
                found: table.values.len(),
            });
        }
        let (lo, hi) = match &decl.codomain {
            Codomain::Interval { lo, hi } => (*lo, *hi),
            Codomain::Type(ty) => {
                let dom = self.domain(ty).ok_or_else(|| StructureError::UnknownType(ty.clone()))?;
                match dom.interval {
                    Some(b) => b,
                    None => (0, dom.len() as i64 - 1),
                }
            }
        };
        if let Some(&bad) = table.values.iter().find(|v| !(lo..=hi).contains(*v)) {
            return Err(StructureError::ValueOutOfRange {
                symbol: name(func),
                value: bad,
            });
        }
        if self.functions.contains_key(func) {
            return Err(StructureError::DuplicateInterpretation(name(func)));
        }
        self.functions.insert(name(func), table);
        Ok(())
    }

    pub fn relation(&self, pred: &str) -> Option<&Relation> {
        self.relations.get(pred)
    }

    pub fn function(&self, func: &str) -> Option<&FunctionTable> {
        self.functions.get(func)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Name, &Relation)> {
        self.relations.iter()
    }

    pub fn functions(&self) -> impl Iterator<Item = (&Name, &FunctionTable)> {
        self.functions.iter()
    }

    pub fn is_interpreted(&self, symbol: &str) -> bool {
        self.relations.contains_key(symbol) || self.functions.contains_key(symbol)
    }

    /// The set of interpreted symbols, in interpretation order.
    pub fn interpreted_symbols(&self) -> Vec<Name> {
        self.relations.keys().chain(self.functions.keys()).cloned().collect()
    }

    /// Combines two structures over the same domains and disjoint symbols.
    pub fn union(&self, other: &Structure) -> Result<Structure, StructureError> {
        if !Arc::ptr_eq(&self.domains, &other.domains) && self.domains != other.domains {
            return Err(StructureError::DomainMismatch);
        }
        let mut out = self.clone();
        for (p, r) in &other.relations {
            out.set_relation(p, r.clone())?;
        }
        for (f, t) in &other.functions {
            out.set_function(f, t.clone())?;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decode_is_row_major() {
        assert_eq!(decode(5, &[2, 3]), vec![1, 2]);
        assert_eq!(decode(0, &[]), Vec::<u32>::new());
    }

    #[test]
    fn relation_membership() {
        let r = Relation::from_tuples(vec![2, 2], [[0u32, 0], [1, 0]]).unwrap();
        assert!(r.contains(&[1, 0]));
        assert!(!r.contains(&[0, 1]));
        assert_eq!(r.tuples().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 0]]);
        assert!(Relation::from_tuples(vec![2], [[3u32]]).is_none());
    }

    #[test]
    fn disjoint_enumerations() {
        let mut d = Domains::new();
        d.insert(name("T"), Domain::enumerated(["a", "b"]).unwrap()).unwrap();
        assert_eq!(
            d.insert(name("U"), Domain::enumerated(["b"]).unwrap()),
            Err(StructureError::DuplicateElement(name("b")))
        );
    }

    #[test]
    fn interval_domain_values() {
        let d = Domain::interval(-1, 2);
        assert_eq!(d.len(), 4);
        assert_eq!(d.value_of(0), -1);
        assert_eq!(d.index_of_value(2), Some(3));
        assert_eq!(d.index_of_value(3), None);
        assert_eq!(d.index_of("-1"), Some(0));
    }
}
