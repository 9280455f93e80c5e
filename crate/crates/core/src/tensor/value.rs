//! Dense integer tensors holding the canonical value of a term at every
//! assignment of its variables.

use super::{Axis, BitTensor, Bits, Shape, TensorError};
use crate::logic::{ArithOp, CmpOp, Domain, FunctionTable, Relation, Variable};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueTensor {
    shape: Shape,
    values: Vec<i64>,
}

/// Shape over the variables of `shapes` in order of first appearance.
pub fn union_shape(shapes: &[&Shape]) -> Result<Shape, TensorError> {
    let mut axes: Vec<Axis> = Vec::new();
    for s in shapes {
        for a in s.axes() {
            if !axes.iter().any(|b| b.var == a.var) {
                axes.push(a.clone());
            }
        }
    }
    Shape::new(axes)
}

/// Calls `f(dst_index, src_index)` for every cell of `dst`, where `src`'s
/// axes are a subset of `dst`'s.
pub(crate) fn for_each_broadcast(src: &Shape, dst: &Shape, mut f: impl FnMut(usize, usize)) -> Result<(), TensorError> {
    let src_strides = src.strides();
    let mut step = vec![0usize; dst.rank()];
    for (a, s) in src.axes().iter().zip(&src_strides) {
        let k = dst
            .position(&a.var)
            .ok_or_else(|| TensorError::UnknownVariable(a.var.name.clone()))?;
        step[k] = *s;
    }
    let extents = dst.extents();
    let len = dst.len();
    if len == 0 {
        return Ok(());
    }
    let mut counter = vec![0usize; dst.rank()];
    let mut offset = 0usize;
    for i in 0..len {
        f(i, offset);
        for k in (0..counter.len()).rev() {
            counter[k] += 1;
            offset += step[k];
            if counter[k] < extents[k] {
                break;
            }
            offset -= step[k] * extents[k];
            counter[k] = 0;
        }
    }
    Ok(())
}

impl ValueTensor {
    pub fn constant(value: i64) -> Self {
        Self {
            shape: Shape::scalar(),
            values: vec![value],
        }
    }

    /// The canonical value of `var` along its own axis.
    pub fn axis_values(var: Variable, domain: &Domain) -> Result<Self, TensorError> {
        let shape = Shape::new(vec![Axis {
            var,
            extent: domain.len(),
        }])?;
        let values = (0..domain.len() as u32).map(|i| domain.value_of(i)).collect();
        Ok(Self { shape, values })
    }

    pub fn from_values(shape: Shape, values: Vec<i64>) -> Result<Self, TensorError> {
        let len = shape.checked_len()?;
        if values.len() != len {
            return Err(TensorError::ShapeMismatch {
                left: format!("{len} cells"),
                right: format!("{} values", values.len()),
            });
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn broadcast_to(&self, shape: &Shape) -> Result<ValueTensor, TensorError> {
        if &self.shape == shape {
            return Ok(self.clone());
        }
        let mut values = vec![0i64; shape.checked_len()?];
        for_each_broadcast(&self.shape, shape, |d, s| values[d] = self.values[s])?;
        Ok(ValueTensor {
            shape: shape.clone(),
            values,
        })
    }

    /// Elementwise arithmetic over the union of both shapes.
    pub fn map2(&self, other: &ValueTensor, op: ArithOp) -> Result<ValueTensor, TensorError> {
        let shape = union_shape(&[&self.shape, &other.shape])?;
        let (a, b) = (self.broadcast_to(&shape)?, other.broadcast_to(&shape)?);
        let values = a
            .values
            .iter()
            .zip(&b.values)
            .map(|(&x, &y)| op.apply(x, y).ok_or(TensorError::ArithmeticOverflow))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ValueTensor { shape, values })
    }

    /// Cells where `self op other` holds, over the union of both shapes.
    pub fn compare(&self, other: &ValueTensor, op: CmpOp) -> Result<BitTensor, TensorError> {
        let shape = union_shape(&[&self.shape, &other.shape])?;
        let (a, b) = (self.broadcast_to(&shape)?, other.broadcast_to(&shape)?);
        BitTensor::from_fn(shape, |i| op.apply(a.values[i], b.values[i]))
    }

    /// Applies a function table to argument tensors. `params` are the domains
    /// of the argument positions.
    pub fn gather(table: &FunctionTable, params: &[&Domain], args: &[ValueTensor]) -> Result<ValueTensor, TensorError> {
        let shape = union_shape(&args.iter().map(|a| &a.shape).collect::<Vec<_>>())?;
        let offsets = linear_offsets(&shape, table.extents(), params, args)?;
        let values = offsets.into_iter().map(|o| table.values()[o]).collect();
        Ok(ValueTensor { shape, values })
    }

    /// Cells where the argument tuple belongs to `rel`.
    pub fn membership(rel: &Relation, params: &[&Domain], args: &[ValueTensor]) -> Result<BitTensor, TensorError> {
        let shape = union_shape(&args.iter().map(|a| &a.shape).collect::<Vec<_>>())?;
        let offsets = linear_offsets(&shape, rel.extents(), params, args)?;
        let bits = Bits::from_fn(offsets.len(), |i| rel.contains_linear(offsets[i]));
        BitTensor::from_bits(shape, bits)
    }
}

/// Row-major offsets into a table over `extents` for every cell of `shape`.
fn linear_offsets(
    shape: &Shape,
    extents: &[usize],
    params: &[&Domain],
    args: &[ValueTensor],
) -> Result<Vec<usize>, TensorError> {
    let len = shape.checked_len()?;
    let mut offsets = vec![0usize; len];
    for ((arg, dom), &extent) in args.iter().zip(params).zip(extents) {
        let mut err = None;
        for_each_broadcast(&arg.shape, shape, |d, s| {
            let v = arg.values[s];
            match dom.index_of_value(v) {
                Some(idx) => offsets[d] = offsets[d] * extent + idx as usize,
                None => {
                    err.get_or_insert(TensorError::IndexOutOfRange { index: v, len: extent });
                }
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(offsets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(n: &str) -> Variable {
        Variable::new(n, "T")
    }

    #[test]
    fn sum_of_axes_compared() {
        let d = Domain::interval(1, 3);
        let x = ValueTensor::axis_values(var("x"), &d).unwrap();
        let y = ValueTensor::axis_values(var("y"), &d).unwrap();
        let s = x.map2(&y, ArithOp::Add).unwrap();
        assert_eq!(s.values(), &[2, 3, 4, 3, 4, 5, 4, 5, 6]);
        let eq = s.compare(&ValueTensor::constant(4), CmpOp::Eq).unwrap();
        assert_eq!(
            eq.iter_ones().collect::<Vec<_>>(),
            vec![vec![0, 2], vec![1, 1], vec![2, 0]]
        );
    }

    #[test]
    fn broadcast_follows_variable_labels() {
        let d = Domain::enumerated(["a", "b", "c"]).unwrap();
        let x = ValueTensor::axis_values(var("x"), &d).unwrap();
        let shape = Shape::from_pairs([(var("y"), 2), (var("x"), 3)]).unwrap();
        assert_eq!(x.broadcast_to(&shape).unwrap().values(), &[0, 1, 2, 0, 1, 2]);
    }

    #[test]
    fn gather_and_membership() {
        let d = Domain::enumerated(["a", "b"]).unwrap();
        let table = FunctionTable::new(vec![2], vec![7, 9]).unwrap();
        let x = ValueTensor::axis_values(var("x"), &d).unwrap();
        let g = ValueTensor::gather(&table, &[&d], std::slice::from_ref(&x)).unwrap();
        assert_eq!(g.values(), &[7, 9]);
        let rel = Relation::from_tuples(vec![2, 2], [[1u32, 0]]).unwrap();
        let y = ValueTensor::axis_values(var("y"), &d).unwrap();
        // p(y, x)
        let m = ValueTensor::membership(&rel, &[&d, &d], &[y, x]).unwrap();
        assert_eq!(m.shape().vars(), vec![var("y"), var("x")]);
        assert_eq!(m.iter_ones().collect::<Vec<_>>(), vec![vec![1, 0]]);
    }
}
