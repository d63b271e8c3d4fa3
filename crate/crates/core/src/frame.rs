//! A Γ-linear connection seen as an ordinary linear connection on the jet
//! bundle, expressed in the adapted frame
//! `X_A = (δ/δt^α, δ/δx^i, ∂/∂x^i_α)`.
//!
//! Torsion and curvature are computed from first principles,
//! `T(X_A, X_B) = ∇_{X_A}X_B − ∇_{X_B}X_A − [X_A, X_B]` and
//! `R(X_A, X_B)X_C = ∇_{X_A}∇_{X_B}X_C − ∇_{X_B}∇_{X_A}X_C − ∇_{[X_A,X_B]}X_C`,
//! with the Lie brackets of the frame taken in coordinates. None of the
//! closed forms of the [`tensors`](crate::tensors) module are used, so the
//! two routes check each other.
//!
//! Frame indices: `0..p` temporal, `p..p+n` spatial, then the fiber pairs in
//! [`Dims::fiber`] order. Components follow `T(X_A, X_B) = T^D_{BA} X_D` and
//! `R(X_A, X_B)X_C = R^D_{CBA} X_D`.

use crate::covderiv::{family, Direction};
use crate::dtensor::{DTensor, Signature, SlotKind};
use crate::expr::{Dims, EvalError, Evaluator, Expr, Point};
use crate::geometry::GammaConnection;

#[derive(Debug, Clone)]
pub struct FrameConnection {
    dims: Dims,
    size: usize,
    /// frame vectors in the coordinate basis
    vectors: Vec<Vec<Expr>>,
    coords: Vec<crate::expr::Coord>,
    /// `Γ[C][A][B]` with `∇_{X_B} X_A = Γ^C_{AB} X_C`.
    gamma: Vec<Expr>,
    /// `T[D][B][A]`
    torsion: Vec<Expr>,
    /// `R[D][C][B][A]`
    curvature: Vec<Expr>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Block {
    Time,
    Space,
    Fiber,
}

fn split(dims: Dims, a: usize) -> (Block, usize) {
    if a < dims.p {
        (Block::Time, a)
    } else if a < dims.p + dims.n {
        (Block::Space, a - dims.p)
    } else {
        (Block::Fiber, a - dims.p - dims.n)
    }
}

fn slot_offset(dims: Dims, kind: SlotKind) -> usize {
    match kind {
        SlotKind::TimeUp | SlotKind::TimeDown => 0,
        SlotKind::SpaceUp | SlotKind::SpaceDown => dims.p,
        SlotKind::FiberUp | SlotKind::FiberDown => dims.p + dims.n,
    }
}

impl FrameConnection {
    pub fn new(conn: &GammaConnection) -> Self {
        let dims = conn.dims();
        let size = dims.coord_count();
        let nc = conn.nonlinear();
        let coords = dims.coords();
        let fib0 = dims.p + dims.n;

        let mut gamma = vec![Expr::zero(); size * size * size];
        for c in 0..size {
            for a in 0..size {
                let (kc, lc) = split(dims, c);
                let (ka, la) = split(dims, a);
                if kc != ka {
                    continue;
                }
                let kind = match kc {
                    Block::Time => SlotKind::TimeUp,
                    Block::Space => SlotKind::SpaceUp,
                    Block::Fiber => SlotKind::FiberUp,
                };
                for b in 0..size {
                    let (kb, lb) = split(dims, b);
                    let dir = match kb {
                        Block::Time => Direction::Temporal,
                        Block::Space => Direction::Spatial,
                        Block::Fiber => Direction::Vertical,
                    };
                    gamma[(c * size + a) * size + b] = family(conn, kind, dir).get(&[lc, la, lb]).clone();
                }
            }
        }

        // frame vectors in the coordinate basis
        let mut frame = vec![vec![Expr::zero(); size]; size];
        for (a, row) in frame.iter_mut().enumerate() {
            row[a] = Expr::one();
            let (k, l) = split(dims, a);
            let coef = match k {
                Block::Time => nc.m(),
                Block::Space => nc.n(),
                Block::Fiber => continue,
            };
            for f in 0..dims.n * dims.p {
                row[fib0 + f] = coef.get(&[f, l]).neg();
            }
        }
        let apply = |a: usize, e: &Expr| -> Expr {
            Expr::sum(
                frame[a]
                    .iter()
                    .zip(&coords)
                    .filter(|(w, _)| !w.is_zero())
                    .map(|(w, &c)| w.mul(&e.diff(c))),
            )
        };
        // frame components of [X_A, X_B]
        let mut bracket = vec![Expr::zero(); size * size * size];
        for a in 0..size {
            for b in 0..size {
                let w: Vec<Expr> = (0..size)
                    .map(|c| apply(a, &frame[b][c]).sub(&apply(b, &frame[a][c])))
                    .collect();
                for d in 0..size {
                    let mut e = w[d].clone();
                    if d >= fib0 {
                        let f = d - fib0;
                        for s in 0..dims.p {
                            e = e.add(&w[s].mul(nc.m().get(&[f, s])));
                        }
                        for i in 0..dims.n {
                            e = e.add(&w[dims.p + i].mul(nc.n().get(&[f, i])));
                        }
                    }
                    bracket[(a * size + b) * size + d] = e;
                }
            }
        }
        let g = |c: usize, a: usize, b: usize| &gamma[(c * size + a) * size + b];
        let br = |a: usize, b: usize, d: usize| &bracket[(a * size + b) * size + d];

        let mut torsion = vec![Expr::zero(); size * size * size];
        for d in 0..size {
            for b in 0..size {
                for a in 0..size {
                    torsion[(d * size + b) * size + a] = g(d, b, a).sub(g(d, a, b)).sub(br(a, b, d));
                }
            }
        }

        let mut curvature = vec![Expr::zero(); size * size * size * size];
        for d in 0..size {
            for c in 0..size {
                for b in 0..size {
                    for a in 0..size {
                        let mut terms = vec![apply(a, g(d, c, b)), apply(b, g(d, c, a)).neg()];
                        for e in 0..size {
                            terms.push(g(e, c, b).mul(g(d, e, a)));
                            terms.push(g(e, c, a).mul(g(d, e, b)).neg());
                            terms.push(br(a, b, e).mul(g(d, c, e)).neg());
                        }
                        curvature[((d * size + c) * size + b) * size + a] = Expr::sum(terms);
                    }
                }
            }
        }

        FrameConnection {
            dims,
            size,
            vectors: frame,
            coords,
            gamma,
            torsion,
            curvature,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    /// Number of frame vectors `p + n + n·p`.
    pub fn size(&self) -> usize {
        self.size
    }

    /// `X_A(e)`
    pub fn apply(&self, a: usize, e: &Expr) -> Expr {
        Expr::sum(
            self.vectors[a]
                .iter()
                .zip(&self.coords)
                .filter(|(w, _)| !w.is_zero())
                .map(|(w, &c)| w.mul(&e.diff(c))),
        )
    }

    /// `Γ^C_{AB}`
    pub fn gamma(&self, c: usize, a: usize, b: usize) -> &Expr {
        &self.gamma[(c * self.size + a) * self.size + b]
    }

    /// `T^D_{BA}`
    pub fn torsion(&self, d: usize, b: usize, a: usize) -> &Expr {
        &self.torsion[(d * self.size + b) * self.size + a]
    }

    /// `R^D_{CBA}`
    pub fn curvature(&self, d: usize, c: usize, b: usize, a: usize) -> &Expr {
        &self.curvature[((d * self.size + c) * self.size + b) * self.size + a]
    }

    fn frame_index(&self, sig: &Signature, idx: &[usize]) -> Vec<usize> {
        sig.slots()
            .iter()
            .zip(idx)
            .map(|(&k, &i)| slot_offset(self.dims, k) + i)
            .collect()
    }

    /// The torsion components on the block picked out by a rank-3 signature
    /// `[D, B, A]`.
    pub fn torsion_block(&self, sig: &Signature) -> DTensor {
        assert_eq!(sig.rank(), 3, "torsion blocks have rank 3");
        DTensor::from_fn(sig.clone(), |idx| {
            let f = self.frame_index(sig, idx);
            self.torsion(f[0], f[1], f[2]).clone()
        })
    }

    /// The curvature components on the block picked out by a rank-4
    /// signature `[D, C, B, A]`.
    pub fn curvature_block(&self, sig: &Signature) -> DTensor {
        assert_eq!(sig.rank(), 4, "curvature blocks have rank 4");
        DTensor::from_fn(sig.clone(), |idx| {
            let f = self.frame_index(sig, idx);
            self.curvature(f[0], f[1], f[2], f[3]).clone()
        })
    }

    /// Largest residuals at `q` of the two general Bianchi identities
    /// `Σ_cyc {R(X,Y)Z − T(T(X,Y),Z) − (∇_X T)(Y,Z)} = 0` and
    /// `Σ_cyc {(∇_X R)(Y,Z) + R(T(X,Y),Z)} = 0`, each divided by
    /// `1 + max |term|`. These hold for every linear connection, so they
    /// test the frame computation itself.
    pub fn general_bianchi(&self, q: &Point) -> Result<(f64, f64), EvalError> {
        let s = self.size;
        let mut ev = Evaluator::new(q);
        let mut num = |v: &[Expr]| v.iter().map(|e| ev.eval(e)).collect::<Result<Vec<f64>, _>>();
        let g = num(&self.gamma)?;
        let t = num(&self.torsion)?;
        let r = num(&self.curvature)?;
        let dt: Vec<Expr> = (0..s * s * s * s)
            .map(|k| self.apply(k % s, &self.torsion[k / s]))
            .collect();
        let dt = num(&dt)?;
        let dr: Vec<Expr> = (0..s * s * s * s * s)
            .map(|k| self.apply(k % s, &self.curvature[k / s]))
            .collect();
        let dr = num(&dr)?;
        let gm = |c: usize, a: usize, b: usize| g[(c * s + a) * s + b];
        let tt = |d: usize, b: usize, a: usize| t[(d * s + b) * s + a];
        let rr = |d: usize, c: usize, b: usize, a: usize| r[((d * s + c) * s + b) * s + a];
        // T^D_{BA:C}
        let tcd = |d: usize, b: usize, a: usize, c: usize| {
            let mut v = dt[((d * s + b) * s + a) * s + c];
            for e in 0..s {
                v += gm(d, e, c) * tt(e, b, a) - gm(e, b, c) * tt(d, e, a) - gm(e, a, c) * tt(d, b, e);
            }
            v
        };
        // R^D_{EBA:C}
        let rcd = |d: usize, e: usize, b: usize, a: usize, c: usize| {
            let mut v = dr[(((d * s + e) * s + b) * s + a) * s + c];
            for f in 0..s {
                v += gm(d, f, c) * rr(f, e, b, a) - gm(f, e, c) * rr(d, f, b, a) - gm(f, b, c) * rr(d, e, f, a)
                    - gm(f, a, c) * rr(d, e, b, f);
            }
            v
        };
        let cyc = |a: usize, b: usize, c: usize| [(a, b, c), (b, c, a), (c, a, b)];
        let (mut first, mut second) = (0.0f64, 0.0f64);
        for a in 0..s {
            for b in 0..s {
                for c in 0..s {
                    for d in 0..s {
                        let (mut sum, mut big) = (0.0, 0.0f64);
                        for (x, y, z) in cyc(a, b, c) {
                            let mut terms = vec![rr(d, z, y, x), -tcd(d, z, y, x)];
                            for e in 0..s {
                                terms.push(-tt(e, y, x) * tt(d, z, e));
                            }
                            for v in terms {
                                sum += v;
                                big = big.max(v.abs());
                            }
                        }
                        first = first.max(sum.abs() / (1.0 + big));
                        for e in 0..s {
                            let (mut sum, mut big) = (0.0, 0.0f64);
                            for (x, y, z) in cyc(a, b, c) {
                                let mut terms = vec![rcd(d, e, z, y, x)];
                                for f in 0..s {
                                    terms.push(tt(f, y, x) * rr(d, e, z, f));
                                }
                                for v in terms {
                                    sum += v;
                                    big = big.max(v.abs());
                                }
                            }
                            second = second.max(sum.abs() / (1.0 + big));
                        }
                    }
                }
            }
        }
        Ok((first, second))
    }
}
