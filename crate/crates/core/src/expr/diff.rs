use std::collections::HashMap;

use super::node::{Expr, Func, Node};
use super::Coord;

impl Expr {
    /// Exact partial derivative with respect to `c`, treating all jet
    /// coordinates as independent.
    pub fn diff(&self, c: Coord) -> Expr {
        let mut memo: HashMap<u64, Expr> = HashMap::new();
        let mut stack: Vec<(Expr, bool)> = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if memo.contains_key(&e.id()) {
                continue;
            }
            if !expanded {
                if let Some(d) = shortcut(&e, c) {
                    memo.insert(e.id(), d);
                    continue;
                }
                stack.push((e.clone(), true));
                for child in e.children() {
                    if !memo.contains_key(&child.id()) {
                        stack.push((child.clone(), false));
                    }
                }
                continue;
            }
            let d = rule(&e, c, &memo);
            memo.insert(e.id(), d);
        }
        memo.remove(&self.id()).expect("root derivative computed")
    }
}

fn shortcut(e: &Expr, c: Coord) -> Option<Expr> {
    match e.node() {
        Node::Const(_) => Some(Expr::zero()),
        Node::Var(v) => Some(if *v == c { Expr::one() } else { Expr::zero() }),
        _ => None,
    }
}

fn rule(e: &Expr, c: Coord, memo: &HashMap<u64, Expr>) -> Expr {
    let d = |x: &Expr| -> Expr {
        memo.get(&x.id())
            .cloned()
            .unwrap_or_else(|| shortcut(x, c).expect("child derivative computed"))
    };
    match e.node() {
        Node::Const(_) | Node::Var(_) => shortcut(e, c).unwrap(),
        Node::Neg(a) => d(a).neg(),
        Node::Add(a, b) => d(a).add(&d(b)),
        Node::Sub(a, b) => d(a).sub(&d(b)),
        Node::Mul(a, b) => {
            let (da, db) = (d(a), d(b));
            da.mul(b).add(&a.mul(&db))
        }
        Node::Div(a, b) => {
            let (da, db) = (d(a), d(b));
            if db.is_zero() {
                da.div(b)
            } else {
                da.mul(b).sub(&a.mul(&db)).div(&b.powi(2))
            }
        }
        Node::Pow(a, k) => {
            let da = d(a);
            if da.is_zero() {
                return Expr::zero();
            }
            Expr::constant(*k as f64).mul(&a.powi(k - 1)).mul(&da)
        }
        Node::Func(f, a) => {
            let da = d(a);
            if da.is_zero() {
                return Expr::zero();
            }
            let outer = match f {
                Func::Sin => a.cos(),
                Func::Cos => a.sin().neg(),
                Func::Tan => Expr::one().add(&a.tan().powi(2)),
                Func::Exp => e.clone(),
                Func::Log => Expr::one().div(a),
                Func::Sqrt => Expr::one().div(&Expr::constant(2.0).mul(e)),
                Func::Sinh => a.cosh(),
                Func::Cosh => a.sinh(),
            };
            outer.mul(&da)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, Point};

    #[test]
    fn product_rule() {
        let e = Expr::t(0) * Expr::v(0, 0);
        assert_eq!(e.diff(Coord::Fiber { i: 0, a: 0 }), Expr::t(0));
    }

    #[test]
    fn table_rule_sin() {
        assert_eq!(Expr::x(0).sin().diff(Coord::Space(0)), Expr::x(0).cos());
    }

    #[test]
    fn independent_coordinates() {
        let e = Expr::v(0, 0) * Expr::x(0).exp();
        assert!(e.diff(Coord::Time(0)).is_zero());
        assert!(e.diff(Coord::Fiber { i: 0, a: 1 }).is_zero());
    }

    #[test]
    fn quotient_and_power() {
        let x = Expr::x(0);
        let e = (x.powi(3) + 1.0) / x.sin();
        let q = Point::new(vec![], vec![0.7], vec![vec![]]);
        let got = evaluate(&e.diff(Coord::Space(0)), &q).unwrap();
        let xv: f64 = 0.7;
        let want = (3.0 * xv * xv * xv.sin() - (xv.powi(3) + 1.0) * xv.cos()) / xv.sin().powi(2);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn elementary_functions() {
        let x = Expr::x(0);
        let q = Point::new(vec![], vec![0.4], vec![vec![]]);
        let xv: f64 = 0.4;
        let cases: Vec<(Expr, f64)> = vec![
            (x.tan(), 1.0 / xv.cos().powi(2)),
            (x.ln(), 1.0 / xv),
            (x.sqrt(), 0.5 / xv.sqrt()),
            (x.sinh(), xv.cosh()),
            (x.cosh(), xv.sinh()),
            (x.exp(), xv.exp()),
            (x.cos(), -xv.sin()),
            (x.powi(-2), -2.0 / xv.powi(3)),
        ];
        for (e, want) in cases {
            let got = evaluate(&e.diff(Coord::Space(0)), &q).unwrap();
            assert!((got - want).abs() < 1e-13, "{e}: {got} vs {want}");
        }
    }
}
