//! Scalar fields on `J¹(T,M)`.
//!
//! An [`Expr`] is an immutable node in a globally interned DAG: two
//! structurally identical expressions built anywhere in the process share the
//! same node and the same [`Expr::id`]. Interning keeps the trees produced by
//! repeated differentiation small and lets [`Evaluator`] cache values per node.

mod diff;
mod display;
mod eval;
mod node;
mod parse;

use std::fmt;

pub use eval::{EvalError, EvalErrorKind, Evaluator};
pub use node::{Expr, Func, Node};
pub use parse::{parse, ParseError, ParseErrorKind};

/// Largest temporal or spatial dimension accepted anywhere in the crate.
pub const MAX_DIM: usize = 4;

/// Dimensions `(p, n)` of the temporal and spatial manifolds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub p: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(p: usize, n: usize) -> Self {
        Dims { p, n }
    }

    /// Both dimensions lie in `1..=MAX_DIM`.
    pub fn is_valid(&self) -> bool {
        (1..=MAX_DIM).contains(&self.p) && (1..=MAX_DIM).contains(&self.n)
    }

    /// Number of jet coordinates `p + n + n·p`.
    pub fn coord_count(&self) -> usize {
        self.p + self.n + self.n * self.p
    }

    /// Combined index of the fiber pair `(i, a)`, as used by fiber slots.
    pub fn fiber(&self, i: usize, a: usize) -> usize {
        i * self.p + a
    }

    /// Inverse of [`Dims::fiber`]: `(i, a)`.
    pub fn fiber_parts(&self, f: usize) -> (usize, usize) {
        (f / self.p, f % self.p)
    }

    /// All jet coordinates in the order `t, x, v` (fiber coordinates in
    /// `(i, a)` row-major order).
    pub fn coords(&self) -> Vec<Coord> {
        let mut out = Vec::with_capacity(self.coord_count());
        out.extend((0..self.p).map(Coord::Time));
        out.extend((0..self.n).map(Coord::Space));
        for i in 0..self.n {
            for a in 0..self.p {
                out.push(Coord::Fiber { i, a });
            }
        }
        out
    }
}

/// A jet coordinate. Indices are 0-based; the textual names (`t1`, `x2`,
/// `v2_1`) are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    /// `t^a`
    Time(usize),
    /// `x^i`
    Space(usize),
    /// `x^i_a`: spatial upper index `i`, temporal lower index `a`.
    Fiber { i: usize, a: usize },
}

impl Coord {
    pub fn fits(&self, dims: Dims) -> bool {
        match *self {
            Coord::Time(a) => a < dims.p,
            Coord::Space(i) => i < dims.n,
            Coord::Fiber { i, a } => i < dims.n && a < dims.p,
        }
    }

    /// Dense position of this coordinate inside [`Dims::coords`].
    pub fn position(&self, dims: Dims) -> usize {
        match *self {
            Coord::Time(a) => a,
            Coord::Space(i) => dims.p + i,
            Coord::Fiber { i, a } => dims.p + dims.n + i * dims.p + a,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coord::Time(a) => write!(f, "t{}", a + 1),
            Coord::Space(i) => write!(f, "x{}", i + 1),
            Coord::Fiber { i, a } => write!(f, "v{}_{}", i + 1, a + 1),
        }
    }
}

/// A point `(t, x, v)` of `J¹(T,M)`, with `v[i][a]` the value of `x^i_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

impl Point {
    pub fn new(t: Vec<f64>, x: Vec<f64>, v: Vec<Vec<f64>>) -> Self {
        Point { t, x, v }
    }

    pub fn zeros(dims: Dims) -> Self {
        Point {
            t: vec![0.0; dims.p],
            x: vec![0.0; dims.n],
            v: vec![vec![0.0; dims.p]; dims.n],
        }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.t.len(), self.x.len())
    }

    /// Shapes agree with `dims` and every entry is finite.
    pub fn is_valid_for(&self, dims: Dims) -> bool {
        self.t.len() == dims.p
            && self.x.len() == dims.n
            && self.v.len() == dims.n
            && self.v.iter().all(|row| row.len() == dims.p)
            && self
                .t
                .iter()
                .chain(&self.x)
                .chain(self.v.iter().flatten())
                .all(|x| x.is_finite())
    }

    pub fn get(&self, c: Coord) -> f64 {
        match c {
            Coord::Time(a) => self.t[a],
            Coord::Space(i) => self.x[i],
            Coord::Fiber { i, a } => self.v[i][a],
        }
    }

    pub fn get_mut(&mut self, c: Coord) -> &mut f64 {
        match c {
            Coord::Time(a) => &mut self.t[a],
            Coord::Space(i) => &mut self.x[i],
            Coord::Fiber { i, a } => &mut self.v[i][a],
        }
    }

    /// Copy of the point with coordinate `c` shifted by `h`.
    pub fn shifted(&self, c: Coord, h: f64) -> Point {
        let mut q = self.clone();
        *q.get_mut(c) += h;
        q
    }
}

/// Convenience evaluation of a single expression at a point.
pub fn evaluate(e: &Expr, q: &Point) -> Result<f64, EvalError> {
    Evaluator::new(q).eval(e)
}

/// Exact partial derivative of `e` with respect to `c`.
pub fn differentiate(e: &Expr, c: Coord) -> Expr {
    e.diff(c)
}
