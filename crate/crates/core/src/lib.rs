//! Symbolic-numeric tensor calculus on the 1-jet bundle `J¹(T,M)`.
//!
//! The crate is organised bottom-up:
//!
//! - [`expr`]: scalar fields on the jet bundle as interned expression DAGs,
//!   with parsing, exact differentiation and cached numeric evaluation.
//! - [`dtensor`]: d-tensors with ordered mixed-kind index slots.
//! - [`geometry`]: metrics, Christoffel symbols, the canonical nonlinear
//!   connection and h-normal Γ-linear connections (including Berwald).
//! - [`covderiv`]: the T-horizontal, M-horizontal and vertical covariant
//!   derivatives of arbitrary d-tensors.
//! - [`tensors`]: torsion, curvature and deflection d-tensors.
//! - [`frame`]: the same connection as a plain linear connection in the
//!   adapted frame, with torsion and curvature from first principles.
//! - [`identities`]: pointwise numeric verification of the Ricci,
//!   deflection and Bianchi identity suites.
//! - [`random`]: seeded generators for connections, vector fields and
//!   sample points.

pub mod covderiv;
pub mod dtensor;
pub mod error;
pub mod expr;
pub mod frame;
pub mod geometry;
pub mod identities;
pub mod random;
pub mod tensors;

pub use dtensor::{DTensor, NumTensor, Signature, SlotKind};
pub use error::{Error, Result};
pub use expr::{Coord, Dims, EvalError, Evaluator, Expr, ParseError, Point};
pub use geometry::{GammaConnection, HNormalSpec, Metric, MetricKind, NonlinearConnection};
