//! Local covariant derivatives of d-tensors along a Γ-linear connection.
//!
//! Each slot contributes one connection term. An upper slot `I` adds
//! `Σ_J T[..J..] · Coef[I, J, d]`, a lower slot subtracts
//! `Σ_J T[..J..] · Coef[J, I, d]`, where `Coef` is the family matching the
//! slot's kind and the derivative direction:
//!
//! | slot      | `/β` (temporal) | `|j` (spatial) | `|(γ)(j)` (vertical) |
//! |-----------|-----------------|----------------|----------------------|
//! | TU, TL    | `Ḡ`             | `L̄`            | `C̄`                  |
//! | SU, SL    | `G`             | `L`            | `C`                  |
//! | FU, FC    | G-block         | L-block        | C-block              |
//!
//! The result has one extra trailing slot: TL, SL or FC respectively.

use crate::dtensor::{DTensor, Signature, SlotKind};
use crate::expr::{Coord, Expr};
use crate::geometry::GammaConnection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `_{/β}`
    Temporal,
    /// `_{|j}`
    Spatial,
    /// `|^{(γ)}_{(j)}`
    Vertical,
}

impl Direction {
    pub fn slot(self) -> SlotKind {
        match self {
            Direction::Temporal => SlotKind::TimeDown,
            Direction::Spatial => SlotKind::SpaceDown,
            Direction::Vertical => SlotKind::FiberDown,
        }
    }
}

/// The coefficient family used for slots of kind `kind` along `dir`.
pub fn family(conn: &GammaConnection, kind: SlotKind, dir: Direction) -> &DTensor {
    use Direction::*;
    use SlotKind::*;
    match (kind, dir) {
        (TimeUp | TimeDown, Temporal) => &conn.g_bar,
        (TimeUp | TimeDown, Spatial) => &conn.l_bar,
        (TimeUp | TimeDown, Vertical) => &conn.c_bar,
        (SpaceUp | SpaceDown, Temporal) => &conn.g,
        (SpaceUp | SpaceDown, Spatial) => &conn.l,
        (SpaceUp | SpaceDown, Vertical) => &conn.c,
        (FiberUp | FiberDown, Temporal) => &conn.g_fib,
        (FiberUp | FiberDown, Spatial) => &conn.l_fib,
        (FiberUp | FiberDown, Vertical) => &conn.c_fib,
    }
}

/// The partial/adapted derivative of a scalar along direction `dir`, index `d`.
pub fn directional(conn: &GammaConnection, e: &Expr, dir: Direction, d: usize) -> Expr {
    let nc = conn.nonlinear();
    match dir {
        Direction::Temporal => nc.delta_t(e, d),
        Direction::Spatial => nc.delta_x(e, d),
        Direction::Vertical => {
            let (j, g) = conn.dims().fiber_parts(d);
            e.diff(Coord::Fiber { i: j, a: g })
        }
    }
}

/// Covariant derivative of `t` along `dir`.
pub fn covariant(conn: &GammaConnection, t: &DTensor, dir: Direction) -> DTensor {
    let dims = conn.dims();
    assert_eq!(t.dims(), dims, "tensor and connection dimensions differ");
    let sig = t.signature();
    let rank = sig.rank();
    let out_sig: Signature = sig.with(dir.slot());
    let families: Vec<&DTensor> = sig.slots().iter().map(|&k| family(conn, k, dir)).collect();
    let ranges = sig.ranges();
    DTensor::from_fn(out_sig, |full| {
        let (idx, d) = (&full[..rank], full[rank]);
        let mut terms = vec![directional(conn, t.get(idx), dir, d)];
        let mut moved = idx.to_vec();
        for s in 0..rank {
            let coef = families[s];
            let upper = sig.slots()[s].is_upper();
            for j in 0..ranges[s] {
                let c = if upper {
                    coef.get(&[idx[s], j, d])
                } else {
                    coef.get(&[j, idx[s], d])
                };
                if c.is_zero() {
                    continue;
                }
                moved[s] = j;
                let comp = t.get(&moved);
                if comp.is_zero() {
                    continue;
                }
                let term = comp.mul(c);
                terms.push(if upper { term } else { term.neg() });
            }
            moved[s] = idx[s];
        }
        Expr::sum(terms)
    })
}

/// `T_{/β}`
pub fn cd_temporal(t: &DTensor, conn: &GammaConnection) -> DTensor {
    covariant(conn, t, Direction::Temporal)
}

/// `T_{|j}`
pub fn cd_spatial(t: &DTensor, conn: &GammaConnection) -> DTensor {
    covariant(conn, t, Direction::Spatial)
}

/// `T|^{(γ)}_{(j)}`
pub fn cd_vertical(t: &DTensor, conn: &GammaConnection) -> DTensor {
    covariant(conn, t, Direction::Vertical)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtensor::{liouville, normalization_tensor};
    use crate::expr::{parse, Dims, Evaluator, Point};
    use crate::geometry::{berwald, MetricKind, Metric};
    use SlotKind::*;

    fn sphere() -> (GammaConnection, Metric) {
        let d = Dims::new(1, 2);
        let h = Metric::flat(MetricKind::Temporal, d).unwrap();
        let phi = Metric::new(
            MetricKind::Spatial,
            d,
            vec![
                vec![Expr::one(), Expr::zero()],
                vec![Expr::zero(), parse("sin(x1)^2", d).unwrap()],
            ],
        )
        .unwrap();
        let (conn, _) = berwald(&h, &phi).unwrap();
        (conn, h)
    }

    #[test]
    fn scalar_derivatives_are_adapted_derivatives() {
        let (conn, _) = sphere();
        let d = conn.dims();
        let f = parse("x1*v2_1 + t1^2", d).unwrap();
        let s = DTensor::from_components(Signature::scalar(d), vec![f.clone()]).unwrap();
        let ds = cd_spatial(&s, &conn);
        for i in 0..2 {
            assert_eq!(*ds.get(&[i]), conn.nonlinear().delta_x(&f, i));
        }
        let dv = cd_vertical(&s, &conn);
        assert_eq!(*dv.get(&[d.fiber(1, 0)]), Expr::x(0));
    }

    #[test]
    fn spatial_vector_matches_hand_formula() {
        let (conn, _) = sphere();
        let d = conn.dims();
        let x = DTensor::from_fn(Signature::new(d, &[SpaceUp]), |i| {
            parse(if i[0] == 0 { "x2*v1_1" } else { "t1*x1" }, d).unwrap()
        });
        let dx = cd_spatial(&x, &conn);
        let q = Point::new(vec![0.4], vec![1.1, -0.3], vec![vec![0.7], vec![-1.2]]);
        let mut ev = Evaluator::new(&q);
        for i in 0..2 {
            for j in 0..2 {
                let mut want = ev.eval(&conn.nonlinear().delta_x(x.get(&[i]), j)).unwrap();
                for m in 0..2 {
                    want += ev.eval(x.get(&[m])).unwrap() * ev.eval(conn.l.get(&[i, m, j])).unwrap();
                }
                let got = ev.eval(dx.get(&[i, j])).unwrap();
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn liouville_and_normalization_are_parallel() {
        let (conn, h) = sphere();
        let q = Point::new(vec![0.4], vec![1.1, -0.3], vec![vec![0.7], vec![-1.2]]);
        let j = normalization_tensor(&h);
        for dir in [Direction::Temporal, Direction::Spatial, Direction::Vertical] {
            let dj = covariant(&conn, &j, dir).eval(&mut Evaluator::new(&q)).unwrap();
            assert!(dj.max_abs() < 1e-12, "{dir:?}");
        }
        // only the vertical derivative of the Liouville field is δ
        let dl = cd_vertical(&liouville(conn.dims()), &conn)
            .eval(&mut Evaluator::new(&q))
            .unwrap();
        for f in 0..2 {
            for g in 0..2 {
                let want = if f == g { 1.0 } else { 0.0 };
                assert!((dl.get(&[f, g]) - want).abs() < 1e-12);
            }
        }
    }
}
