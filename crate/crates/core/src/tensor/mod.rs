//! Packed n-dimensional bit tensors and integer value tensors.
//!
//! A tensor's axes are labelled by variables. Cells are laid out row-major
//! with the last axis varying fastest, so the bit for the tuple `d` sits at
//! the lexicographic rank of `d`.

mod bits;
mod value;

use std::fmt::Write as _;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

pub use bits::{Bits, Ones, WORD_BITS};
pub use value::{union_shape, ValueTensor};

use crate::logic::{Name, Variable};

/// Default upper bound on the number of cells in a single tensor (2^33).
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 33;

/// Axis reductions with a trailing block at least this many bits long run
/// as strided word operations; shorter trailing blocks permute the axis last.
pub const DEFAULT_REDUCE_THRESHOLD: usize = 64;

static BIT_BUDGET: AtomicU64 = AtomicU64::new(DEFAULT_BIT_BUDGET);

pub fn bit_budget() -> u64 {
    BIT_BUDGET.load(Ordering::Relaxed)
}

pub fn set_bit_budget(bits: u64) {
    BIT_BUDGET.store(bits, Ordering::Relaxed);
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("tensor of {cells} cells exceeds the budget of {budget} bits")]
    Overflow { cells: u128, budget: u64 },
    #[error("shape mismatch: [{left}] vs [{right}]")]
    ShapeMismatch { left: String, right: String },
    #[error("variable `{0}` already labels an axis")]
    DuplicateVariable(Name),
    #[error("variable `{0}` does not label an axis")]
    UnknownVariable(Name),
    #[error("{0:?} is not a permutation of the axes")]
    InvalidPermutation(Vec<usize>),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: i64, len: usize },
    #[error("arithmetic overflow")]
    ArithmeticOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Axis {
    pub var: Variable,
    pub extent: usize,
}

/// Ordered, variable-labelled axes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Shape {
    axes: Vec<Axis>,
}

impl Shape {
    pub fn new(axes: Vec<Axis>) -> Result<Self, TensorError> {
        for (i, a) in axes.iter().enumerate() {
            if axes[..i].iter().any(|b| b.var == a.var) {
                return Err(TensorError::DuplicateVariable(a.var.name.clone()));
            }
        }
        let shape = Self { axes };
        shape.checked_len()?;
        Ok(shape)
    }

    pub fn from_pairs<I: IntoIterator<Item = (Variable, usize)>>(pairs: I) -> Result<Self, TensorError> {
        Self::new(pairs.into_iter().map(|(var, extent)| Axis { var, extent }).collect())
    }

    pub fn scalar() -> Self {
        Self::default()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn vars(&self) -> Vec<Variable> {
        self.axes.iter().map(|a| a.var.clone()).collect()
    }

    pub fn extents(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.extent).collect()
    }

    pub fn position(&self, var: &Variable) -> Option<usize> {
        self.axes.iter().position(|a| &a.var == var)
    }

    /// Number of cells, checked against the bit budget.
    pub fn checked_len(&self) -> Result<usize, TensorError> {
        let cells = self
            .axes
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.extent as u128));
        let budget = bit_budget();
        if cells > budget as u128 || cells > usize::MAX as u128 {
            return Err(TensorError::Overflow { cells, budget });
        }
        Ok(cells as usize)
    }

    /// Number of cells. Only valid for shapes that passed the budget check.
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.extent).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major strides, last axis 1.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.axes.len()];
        for i in (0..self.axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.axes[i + 1].extent;
        }
        strides
    }

    pub fn decode(&self, mut index: usize) -> Vec<u32> {
        let mut out = vec![0u32; self.axes.len()];
        for (slot, a) in out.iter_mut().zip(&self.axes).rev() {
            *slot = (index % a.extent) as u32;
            index /= a.extent;
        }
        out
    }

    pub fn encode(&self, tuple: &[u32]) -> usize {
        tuple
            .iter()
            .zip(&self.axes)
            .fold(0, |acc, (&d, a)| acc * a.extent + d as usize)
    }

    fn describe(&self) -> String {
        self.axes
            .iter()
            .map(|a| format!("{}:{}", a.var.name, a.extent))
            .collect::<Vec<_>>()
            .join(",")
    }

    fn same_as(&self, other: &Shape) -> Result<(), TensorError> {
        if self != other {
            return Err(TensorError::ShapeMismatch {
                left: self.describe(),
                right: other.describe(),
            });
        }
        Ok(())
    }

    fn inserted(&self, position: usize, var: Variable, extent: usize) -> Result<Shape, TensorError> {
        if self.position(&var).is_some() {
            return Err(TensorError::DuplicateVariable(var.name));
        }
        let mut axes = self.axes.clone();
        axes.insert(position.min(axes.len()), Axis { var, extent });
        Shape::new(axes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    All,
    Any,
}

/// A set of tuples over the shape's axes, one bit per cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitTensor {
    shape: Shape,
    bits: Bits,
}

impl BitTensor {
    pub fn empty(shape: Shape) -> Result<Self, TensorError> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            bits: Bits::zeros(len),
        })
    }

    pub fn full(shape: Shape) -> Result<Self, TensorError> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            bits: Bits::ones(len),
        })
    }

    pub fn scalar(value: bool) -> Self {
        Self {
            shape: Shape::scalar(),
            bits: Bits::from_fn(1, |_| value),
        }
    }

    pub fn from_bits(shape: Shape, bits: Bits) -> Result<Self, TensorError> {
        let len = shape.checked_len()?;
        if bits.len() != len {
            return Err(TensorError::ShapeMismatch {
                left: shape.describe(),
                right: format!("{} bits", bits.len()),
            });
        }
        Ok(Self { shape, bits })
    }

    pub fn from_fn(shape: Shape, f: impl FnMut(usize) -> bool) -> Result<Self, TensorError> {
        let len = shape.checked_len()?;
        Ok(Self {
            shape,
            bits: Bits::from_fn(len, f),
        })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn into_bits(self) -> Bits {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn get(&self, tuple: &[u32]) -> bool {
        self.bits.get(self.shape.encode(tuple))
    }

    /// Truth value of a rank-0 tensor.
    pub fn as_scalar(&self) -> Option<bool> {
        (self.shape.rank() == 0).then(|| self.bits.get(0))
    }

    pub fn popcount(&self) -> u64 {
        self.bits.count_ones()
    }

    pub fn is_all_zero(&self) -> bool {
        self.bits.words().iter().all(|&w| w == 0)
    }

    /// Linear indices of set cells in lexicographic order.
    pub fn linear_ones(&self) -> Ones<'_> {
        self.bits.iter_ones()
    }

    /// Tuples of set cells in lexicographic order.
    pub fn iter_ones(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        self.bits.iter_ones().map(|i| self.shape.decode(i))
    }

    pub fn and(&self, other: &BitTensor) -> Result<BitTensor, TensorError> {
        self.shape.same_as(&other.shape)?;
        let mut out = self.clone();
        out.bits.and_assign(&other.bits);
        Ok(out)
    }

    pub fn or(&self, other: &BitTensor) -> Result<BitTensor, TensorError> {
        self.shape.same_as(&other.shape)?;
        let mut out = self.clone();
        out.bits.or_assign(&other.bits);
        Ok(out)
    }

    pub fn not(&self) -> BitTensor {
        let mut out = self.clone();
        out.bits.not_assign();
        out
    }

    pub fn and_assign(&mut self, other: &BitTensor) -> Result<(), TensorError> {
        self.shape.same_as(&other.shape)?;
        self.bits.and_assign(&other.bits);
        Ok(())
    }

    pub fn or_assign(&mut self, other: &BitTensor) -> Result<(), TensorError> {
        self.shape.same_as(&other.shape)?;
        self.bits.or_assign(&other.bits);
        Ok(())
    }

    /// Adds an axis for `var` at `position`; every cell is copied along it.
    pub fn insert_axis(&self, position: usize, var: Variable, extent: usize) -> Result<BitTensor, TensorError> {
        let position = position.min(self.shape.rank());
        let shape = self.shape.inserted(position, var, extent)?;
        let inner: usize = self.shape.axes[position..].iter().map(|a| a.extent).product();
        let outer: usize = self.shape.axes[..position].iter().map(|a| a.extent).product();
        let mut bits = Bits::zeros(shape.len());
        if inner == 1 {
            for i in self.bits.iter_ones() {
                bits.fill_ones(i * extent, extent);
            }
        } else if inner > 0 {
            for o in 0..outer {
                let src = o * inner;
                if !self.bits.any_in(src, src + inner) {
                    continue;
                }
                for e in 0..extent {
                    bits.or_range_from((o * extent + e) * inner, &self.bits, src, inner);
                }
            }
        }
        Ok(BitTensor { shape, bits })
    }

    /// Reorders axes: axis `i` of the result is axis `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<BitTensor, TensorError> {
        let rank = self.shape.rank();
        let mut seen = vec![false; rank];
        if perm.len() != rank || perm.iter().any(|&p| p >= rank || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::InvalidPermutation(perm.to_vec()));
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let shape = Shape {
            axes: perm.iter().map(|&p| self.shape.axes[p].clone()).collect(),
        };
        let mut bits = Bits::zeros(self.bits.len());
        let out_strides = shape.strides();
        // where each source axis lands in the output
        let mut dest_stride = vec![0usize; rank];
        for (i, &p) in perm.iter().enumerate() {
            dest_stride[p] = out_strides[i];
        }
        let last = rank - 1;
        let run = self.shape.axes[last].extent;
        if perm[last] == last && run >= WORD_BITS {
            // the last axis stays in place: move contiguous runs
            let outer_shape = Shape {
                axes: self.shape.axes[..last].to_vec(),
            };
            for o in 0..outer_shape.len() {
                let src = o * run;
                if !self.bits.any_in(src, src + run) {
                    continue;
                }
                let t = outer_shape.decode(o);
                let dst: usize = t.iter().zip(&dest_stride).map(|(&d, &s)| d as usize * s).sum();
                bits.or_range_from(dst, &self.bits, src, run);
            }
        } else {
            let extents = self.shape.extents();
            for i in self.bits.iter_ones() {
                let mut rem = i;
                let mut dst = 0;
                for k in (0..rank).rev() {
                    dst += (rem % extents[k]) * dest_stride[k];
                    rem /= extents[k];
                }
                bits.set(dst, true);
            }
        }
        Ok(BitTensor { shape, bits })
    }

    /// Moves the axes so they follow the order of `vars`, which must be a
    /// permutation of this tensor's variables.
    pub fn permute_to(&self, vars: &[Variable]) -> Result<BitTensor, TensorError> {
        let perm = vars
            .iter()
            .map(|v| {
                self.shape
                    .position(v)
                    .ok_or_else(|| TensorError::UnknownVariable(v.name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.permute(&perm)
    }

    pub fn reduce_all(&self, var: &Variable) -> Result<BitTensor, TensorError> {
        self.reduce(var, Reduction::All, DEFAULT_REDUCE_THRESHOLD)
    }

    pub fn reduce_any(&self, var: &Variable) -> Result<BitTensor, TensorError> {
        self.reduce(var, Reduction::Any, DEFAULT_REDUCE_THRESHOLD)
    }

    /// Removes the axis of `var`, combining the cells along it with AND
    /// ([`Reduction::All`]) or OR ([`Reduction::Any`]).
    pub fn reduce(&self, var: &Variable, op: Reduction, threshold: usize) -> Result<BitTensor, TensorError> {
        let k = self
            .shape
            .position(var)
            .ok_or_else(|| TensorError::UnknownVariable(var.name.clone()))?;
        let extent = self.shape.axes[k].extent;
        let inner: usize = self.shape.axes[k + 1..].iter().map(|a| a.extent).product();
        let outer: usize = self.shape.axes[..k].iter().map(|a| a.extent).product();
        let mut axes = self.shape.axes.clone();
        axes.remove(k);
        let shape = Shape { axes };

        if extent == 0 {
            return match op {
                Reduction::All => BitTensor::full(shape),
                Reduction::Any => BitTensor::empty(shape),
            };
        }
        if inner == 1 {
            let bits = Bits::from_fn(outer, |o| {
                let (s, e) = (o * extent, (o + 1) * extent);
                match op {
                    Reduction::All => self.bits.all_in(s, e),
                    Reduction::Any => self.bits.any_in(s, e),
                }
            });
            return Ok(BitTensor { shape, bits });
        }
        if inner == 0 {
            return BitTensor::empty(shape);
        }
        if inner < threshold {
            let mut perm: Vec<usize> = (0..self.shape.rank()).filter(|&i| i != k).collect();
            perm.push(k);
            return self.permute(&perm)?.reduce(var, op, threshold);
        }
        // strided: combine `extent` blocks of `inner` bits word by word
        let mut bits = Bits::zeros(shape.len());
        let nwords = inner.div_ceil(WORD_BITS);
        let mut acc = vec![0u64; nwords];
        for o in 0..outer {
            acc.fill(match op {
                Reduction::All => u64::MAX,
                Reduction::Any => 0,
            });
            for e in 0..extent {
                let base = (o * extent + e) * inner;
                for (w, slot) in acc.iter_mut().enumerate() {
                    let word = self.bits.word_at(base + w * WORD_BITS);
                    match op {
                        Reduction::All => *slot &= word,
                        Reduction::Any => *slot |= word,
                    }
                }
            }
            let block = Bits::from_words(inner, acc.clone());
            bits.or_range_from(o * inner, &block, 0, inner);
        }
        Ok(BitTensor { shape, bits })
    }

    /// Text dump: a header line with the shape, then one row of `0`/`1` per
    /// run of the last axis.
    pub fn dump(&self) -> String {
        let mut out = format!("[{}]\n", self.shape.describe());
        let run = self.shape.axes.last().map_or(1, |a| a.extent);
        if run == 0 {
            return out;
        }
        for chunk_start in (0..self.bits.len()).step_by(run) {
            for b in chunk_start..chunk_start + run {
                out.push(if self.bits.get(b) { '1' } else { '0' });
            }
            let _ = writeln!(out);
        }
        out
    }
}
