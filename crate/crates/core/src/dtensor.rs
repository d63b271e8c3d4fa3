//! d-tensors: dense grids of [`Expr`] components over an ordered list of
//! mixed-kind index slots.
//!
//! A fiber slot carries the pair `(i, α)` as one combined index
//! (`Dims::fiber(i, α)`), because the parenthesized index blocks of a
//! d-tensor transform and contract as a unit.

use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Dims, EvalError, Evaluator, Expr};
use crate::geometry::Metric;

/// Kind of one index slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlotKind {
    /// Temporal upper index `α`, range `p`.
    TimeUp,
    /// Temporal lower index `α`, range `p`.
    TimeDown,
    /// Spatial upper index `i`, range `n`.
    SpaceUp,
    /// Spatial lower index `i`, range `n`.
    SpaceDown,
    /// Pair `(i)` upper, `(α)` lower, the block of `∂/∂x^i_α`; range `n·p`.
    FiberUp,
    /// Pair `(α)` upper, `(i)` lower, the block of `δx^i_α`; range `n·p`.
    FiberDown,
}

impl SlotKind {
    pub fn range(self, dims: Dims) -> usize {
        match self {
            SlotKind::TimeUp | SlotKind::TimeDown => dims.p,
            SlotKind::SpaceUp | SlotKind::SpaceDown => dims.n,
            SlotKind::FiberUp | SlotKind::FiberDown => dims.n * dims.p,
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, SlotKind::TimeUp | SlotKind::SpaceUp | SlotKind::FiberUp)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SlotKind::TimeUp => "TU",
            SlotKind::TimeDown => "TL",
            SlotKind::SpaceUp => "SU",
            SlotKind::SpaceDown => "SL",
            SlotKind::FiberUp => "FU",
            SlotKind::FiberDown => "FC",
        }
    }
}

/// Ordered slot kinds together with the dimensions they range over.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    dims: Dims,
    slots: Vec<SlotKind>,
}

impl Signature {
    pub fn new(dims: Dims, slots: &[SlotKind]) -> Self {
        Signature {
            dims,
            slots: slots.to_vec(),
        }
    }

    pub fn scalar(dims: Dims) -> Self {
        Signature::new(dims, &[])
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn slots(&self) -> &[SlotKind] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn ranges(&self) -> Vec<usize> {
        self.slots.iter().map(|s| s.range(self.dims)).collect()
    }

    /// Number of components: the product of the slot ranges.
    pub fn size(&self) -> usize {
        self.ranges().iter().product()
    }

    /// Signature with one extra slot appended.
    pub fn with(&self, slot: SlotKind) -> Signature {
        let mut slots = self.slots.clone();
        slots.push(slot);
        Signature {
            dims: self.dims,
            slots,
        }
    }

    /// Row-major offset of a 0-based multi-index.
    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.slots.len(), "index rank");
        let mut off = 0;
        for (s, &k) in self.slots.iter().zip(idx) {
            let r = s.range(self.dims);
            debug_assert!(k < r, "index {k} out of range {r}");
            off = off * r + k;
        }
        off
    }

    /// All multi-indices in row-major order.
    pub fn indices(&self) -> IndexIter {
        IndexIter::new(self.ranges())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.slots.iter().map(|s| s.short_name()).collect();
        write!(f, "[{}]", names.join(", "))
    }
}

/// Row-major odometer over a box of index ranges.
pub struct IndexIter {
    ranges: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl IndexIter {
    pub fn new(ranges: Vec<usize>) -> Self {
        let next = if ranges.iter().all(|&r| r > 0) {
            Some(vec![0; ranges.len()])
        } else {
            None
        };
        IndexIter { ranges, next }
    }
}

impl Iterator for IndexIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut k = succ.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            succ[k] += 1;
            if succ[k] < self.ranges[k] {
                self.next = Some(succ);
                break;
            }
            succ[k] = 0;
        }
        Some(current)
    }
}

/// A d-tensor field with symbolic components.
#[derive(Debug, Clone, PartialEq)]
pub struct DTensor {
    sig: Signature,
    comps: Vec<Expr>,
}

impl DTensor {
    pub fn zero(sig: Signature) -> Self {
        let comps = vec![Expr::zero(); sig.size()];
        DTensor { sig, comps }
    }

    pub fn from_fn(sig: Signature, mut f: impl FnMut(&[usize]) -> Expr) -> Self {
        let comps = sig.indices().map(|idx| f(&idx)).collect();
        DTensor { sig, comps }
    }

    /// Builds from a flat component list in row-major order.
    pub fn from_components(sig: Signature, comps: Vec<Expr>) -> Result<Self> {
        if comps.len() != sig.size() {
            return Err(Error::Dimension(format!(
                "{} components supplied for signature {sig} of size {}",
                comps.len(),
                sig.size()
            )));
        }
        Ok(DTensor { sig, comps })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn dims(&self) -> Dims {
        self.sig.dims
    }

    pub fn get(&self, idx: &[usize]) -> &Expr {
        &self.comps[self.sig.offset(idx)]
    }

    pub fn components(&self) -> &[Expr] {
        &self.comps
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Expr)> {
        self.sig.indices().zip(self.comps.iter())
    }

    /// Componentwise map keeping the signature.
    pub fn map(&self, mut f: impl FnMut(&Expr) -> Expr) -> DTensor {
        DTensor {
            sig: self.sig.clone(),
            comps: self.comps.iter().map(&mut f).collect(),
        }
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    pub fn eval(&self, ev: &mut Evaluator<'_>) -> std::result::Result<NumTensor, EvalError> {
        let vals = self
            .comps
            .iter()
            .map(|e| ev.eval(e))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(NumTensor {
            sig: self.sig.clone(),
            vals,
        })
    }
}

/// A d-tensor evaluated at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct NumTensor {
    sig: Signature,
    vals: Vec<f64>,
}

impl NumTensor {
    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.vals[self.sig.offset(idx)]
    }

    pub fn values(&self) -> &[f64] {
        &self.vals
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Zero d-tensor of the given signature.
pub fn zero_tensor(sig: Signature) -> DTensor {
    DTensor::zero(sig)
}

/// The canonical Liouville field `C = x^i_α ∂/∂x^i_α`, signature `[FU]`.
pub fn liouville(dims: Dims) -> DTensor {
    let sig = Signature::new(dims, &[SlotKind::FiberUp]);
    DTensor::from_fn(sig, |idx| {
        let (i, a) = dims.fiber_parts(idx[0]);
        Expr::v(i, a)
    })
}

/// The normalization d-tensor `J^{(i)}_{(α)βj} = h_{αβ} δ^i_j`, signature
/// `[FU, TL, SL]`, for a temporal metric `h`.
pub fn normalization_tensor(h: &Metric) -> DTensor {
    let dims = h.jet_dims();
    let sig = Signature::new(dims, &[SlotKind::FiberUp, SlotKind::TimeDown, SlotKind::SpaceDown]);
    DTensor::from_fn(sig, |idx| {
        let (i, a) = dims.fiber_parts(idx[0]);
        if i == idx[2] {
            h.g(a, idx[1]).clone()
        } else {
            Expr::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, Point};

    #[test]
    fn zero_tensors() {
        let d = Dims::new(1, 2);
        let v = zero_tensor(Signature::new(d, &[SlotKind::SpaceUp]));
        assert_eq!(v.components().len(), 2);
        assert!(v.is_structurally_zero());
        let f = zero_tensor(Signature::new(Dims::new(1, 1), &[SlotKind::FiberUp, SlotKind::TimeDown]));
        assert_eq!(f.components().len(), 1);
        let s = zero_tensor(Signature::scalar(d));
        assert_eq!(s.components().len(), 1);
        assert!(s.get(&[]).is_zero());
    }

    #[test]
    fn component_count_is_product_of_ranges() {
        let d = Dims::new(2, 3);
        let sig = Signature::new(
            d,
            &[SlotKind::FiberUp, SlotKind::TimeDown, SlotKind::SpaceDown, SlotKind::FiberDown],
        );
        assert_eq!(sig.size(), 6 * 2 * 3 * 6);
        assert_eq!(sig.indices().count(), sig.size());
        for (k, idx) in sig.indices().enumerate() {
            assert_eq!(sig.offset(&idx), k);
        }
    }

    #[test]
    fn liouville_components() {
        let l = liouville(Dims::new(1, 1));
        assert_eq!(*l.get(&[0]), Expr::v(0, 0));
        let d = Dims::new(2, 3);
        let l = liouville(d);
        assert_eq!(l.components().len(), 6);
        for i in 0..3 {
            for a in 0..2 {
                assert_eq!(*l.get(&[d.fiber(i, a)]), Expr::v(i, a));
            }
        }
        let q = Point::zeros(d);
        for c in l.components() {
            assert_eq!(evaluate(c, &q).unwrap(), 0.0);
        }
    }

    #[test]
    fn liouville_evaluates_to_fiber_values() {
        let d = Dims::new(2, 2);
        let q = Point::new(vec![0.1, 0.2], vec![0.3, 0.4], vec![vec![1.5, -2.0], vec![0.25, 7.0]]);
        let num = liouville(d).eval(&mut Evaluator::new(&q)).unwrap();
        for i in 0..2 {
            for a in 0..2 {
                assert_eq!(num.get(&[d.fiber(i, a)]), q.v[i][a]);
            }
        }
    }
}
