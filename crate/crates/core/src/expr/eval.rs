use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use super::node::{Expr, Func, Node};
use super::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    LogOfNonPositive,
    DivisionByZero,
    SqrtOfNegative,
    NonFinite,
    DimensionMismatch,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalErrorKind::LogOfNonPositive => "log of non-positive value",
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::SqrtOfNegative => "sqrt of negative value",
            EvalErrorKind::NonFinite => "non-finite value",
            EvalErrorKind::DimensionMismatch => "point dimensions do not match",
        };
        f.write_str(s)
    }
}

/// Domain failure during numeric evaluation, with the offending subtree.
#[derive(Debug, Clone, Error)]
#[error("{kind} in `{subtree}`")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subtree: String,
}

impl EvalError {
    fn at(kind: EvalErrorKind, e: &Expr) -> Self {
        let mut subtree = e.to_string();
        if subtree.len() > 200 {
            subtree.truncate(200);
            subtree.push_str("...");
        }
        EvalError { kind, subtree }
    }
}

pub(crate) fn apply_func(f: Func, x: f64) -> Result<f64, EvalErrorKind> {
    let y = match f {
        Func::Sin => x.sin(),
        Func::Cos => x.cos(),
        Func::Tan => x.tan(),
        Func::Exp => x.exp(),
        Func::Log => {
            if x <= 0.0 {
                return Err(EvalErrorKind::LogOfNonPositive);
            }
            x.ln()
        }
        Func::Sqrt => {
            if x < 0.0 {
                return Err(EvalErrorKind::SqrtOfNegative);
            }
            x.sqrt()
        }
        Func::Sinh => x.sinh(),
        Func::Cosh => x.cosh(),
    };
    if y.is_finite() {
        Ok(y)
    } else {
        Err(EvalErrorKind::NonFinite)
    }
}

/// Evaluates expressions at a fixed point, caching the value of every node
/// it has seen. Reuse one evaluator for all expressions at the same point.
pub struct Evaluator<'a> {
    point: &'a Point,
    cache: HashMap<u64, f64>,
}

impl<'a> Evaluator<'a> {
    pub fn new(point: &'a Point) -> Self {
        Evaluator {
            point,
            cache: HashMap::new(),
        }
    }

    pub fn point(&self) -> &Point {
        self.point
    }

    pub fn eval(&mut self, e: &Expr) -> Result<f64, EvalError> {
        if let Some(v) = self.cache.get(&e.id()) {
            return Ok(*v);
        }
        let mut stack: Vec<(Expr, bool)> = vec![(e.clone(), false)];
        while let Some((node, expanded)) = stack.pop() {
            if self.cache.contains_key(&node.id()) {
                continue;
            }
            if !expanded {
                let children = node.children();
                if children.iter().all(|c| self.cache.contains_key(&c.id())) {
                    let v = self.eval_node(&node)?;
                    self.cache.insert(node.id(), v);
                    continue;
                }
                stack.push((node.clone(), true));
                for child in children {
                    if !self.cache.contains_key(&child.id()) {
                        stack.push((child.clone(), false));
                    }
                }
                continue;
            }
            let v = self.eval_node(&node)?;
            self.cache.insert(node.id(), v);
        }
        Ok(self.cache[&e.id()])
    }

    fn eval_node(&self, e: &Expr) -> Result<f64, EvalError> {
        let val = |c: &Expr| self.cache[&c.id()];
        let v = match e.node() {
            Node::Const(c) => *c,
            Node::Var(c) => {
                if !c.fits(self.point.dims()) {
                    return Err(EvalError::at(EvalErrorKind::DimensionMismatch, e));
                }
                self.point.get(*c)
            }
            Node::Neg(a) => -val(a),
            Node::Add(a, b) => val(a) + val(b),
            Node::Sub(a, b) => val(a) - val(b),
            Node::Mul(a, b) => val(a) * val(b),
            Node::Div(a, b) => {
                let d = val(b);
                if d == 0.0 {
                    return Err(EvalError::at(EvalErrorKind::DivisionByZero, e));
                }
                val(a) / d
            }
            Node::Pow(a, k) => {
                let base = val(a);
                if base == 0.0 && *k < 0 {
                    return Err(EvalError::at(EvalErrorKind::DivisionByZero, e));
                }
                base.powi(*k)
            }
            Node::Func(f, a) => apply_func(*f, val(a)).map_err(|k| EvalError::at(k, e))?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::at(EvalErrorKind::NonFinite, e))
        }
    }
}
