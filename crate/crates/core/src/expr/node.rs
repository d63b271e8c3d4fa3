use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock, Weak};

use super::Coord;

/// Elementary functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// One node of the expression DAG.
#[derive(Debug)]
pub enum Node {
    Const(f64),
    Var(Coord),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    /// Integer power.
    Pow(Expr, i32),
    Func(Func, Expr),
}

#[derive(Debug)]
struct Inner {
    id: u64,
    node: Node,
}

/// Immutable, cheaply clonable handle to an interned expression node.
///
/// Equality and hashing are by node identity, which coincides with
/// structural equality because every node is interned.
#[derive(Clone)]
pub struct Expr(Arc<Inner>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.0.id == other.0.id
    }
}

impl Eq for Expr {}

impl Hash for Expr {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state)
    }
}

impl std::fmt::Debug for Expr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Expr#{}({})", self.0.id, self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Const(u64),
    Var(Coord),
    Neg(u64),
    Bin(u8, u64, u64),
    Pow(u64, i32),
    Func(Func, u64),
}

struct Interner {
    table: HashMap<Key, Weak<Inner>>,
    next_id: u64,
    purge_at: usize,
}

fn interner() -> &'static Mutex<Interner> {
    static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        Mutex::new(Interner {
            table: HashMap::new(),
            next_id: 0,
            purge_at: 1 << 16,
        })
    })
}

fn key_of(node: &Node) -> Key {
    match node {
        // -0.0 and 0.0 are folded to the same constant.
        Node::Const(c) => Key::Const(if *c == 0.0 { 0 } else { c.to_bits() }),
        Node::Var(c) => Key::Var(*c),
        Node::Neg(a) => Key::Neg(a.id()),
        Node::Add(a, b) => Key::Bin(0, a.id(), b.id()),
        Node::Sub(a, b) => Key::Bin(1, a.id(), b.id()),
        Node::Mul(a, b) => Key::Bin(2, a.id(), b.id()),
        Node::Div(a, b) => Key::Bin(3, a.id(), b.id()),
        Node::Pow(a, k) => Key::Pow(a.id(), *k),
        Node::Func(f, a) => Key::Func(*f, a.id()),
    }
}

fn intern(node: Node) -> Expr {
    let key = key_of(&node);
    let node = match node {
        Node::Const(c) if c == 0.0 => Node::Const(0.0),
        other => other,
    };
    let mut guard = interner().lock().unwrap_or_else(|e| e.into_inner());
    if let Some(inner) = guard.table.get(&key).and_then(Weak::upgrade) {
        return Expr(inner);
    }
    let id = guard.next_id;
    guard.next_id += 1;
    let inner = Arc::new(Inner { id, node });
    guard.table.insert(key, Arc::downgrade(&inner));
    if guard.table.len() > guard.purge_at {
        guard.table.retain(|_, w| w.strong_count() > 0);
        guard.purge_at = (2 * guard.table.len()).max(1 << 16);
    }
    Expr(inner)
}

impl Expr {
    /// Unique node identifier, stable for the lifetime of the node.
    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: f64) -> Expr {
        intern(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(c: Coord) -> Expr {
        intern(Node::Var(c))
    }

    pub fn t(a: usize) -> Expr {
        Expr::var(Coord::Time(a))
    }

    pub fn x(i: usize) -> Expr {
        Expr::var(Coord::Space(i))
    }

    pub fn v(i: usize, a: usize) -> Expr {
        Expr::var(Coord::Fiber { i, a })
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.node() {
            Node::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_const() == Some(1.0)
    }

    pub fn neg(&self) -> Expr {
        match self.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(a) => a.clone(),
            _ => intern(Node::Neg(self.clone())),
        }
    }

    pub fn add(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a + b),
            (Some(a), _) if a == 0.0 => rhs.clone(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => match rhs.node() {
                Node::Neg(b) => self.sub(b),
                _ => intern(Node::Add(self.clone(), rhs.clone())),
            },
        }
    }

    pub fn sub(&self, rhs: &Expr) -> Expr {
        if self == rhs {
            return Expr::zero();
        }
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a - b),
            (Some(a), _) if a == 0.0 => rhs.neg(),
            (_, Some(b)) if b == 0.0 => self.clone(),
            _ => match rhs.node() {
                Node::Neg(b) => self.add(b),
                _ => intern(Node::Sub(self.clone(), rhs.clone())),
            },
        }
    }

    pub fn mul(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) => Expr::constant(a * b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 0.0 => Expr::zero(),
            (Some(a), _) if a == 1.0 => rhs.clone(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            (Some(a), _) if a == -1.0 => rhs.neg(),
            (_, Some(b)) if b == -1.0 => self.neg(),
            _ => intern(Node::Mul(self.clone(), rhs.clone())),
        }
    }

    pub fn div(&self, rhs: &Expr) -> Expr {
        match (self.as_const(), rhs.as_const()) {
            (Some(a), Some(b)) if b != 0.0 => Expr::constant(a / b),
            (Some(a), _) if a == 0.0 => Expr::zero(),
            (_, Some(b)) if b == 1.0 => self.clone(),
            _ => intern(Node::Div(self.clone(), rhs.clone())),
        }
    }

    pub fn powi(&self, k: i32) -> Expr {
        match (self.as_const(), k) {
            (_, 0) => Expr::one(),
            (_, 1) => self.clone(),
            (Some(c), _) if c != 0.0 || k > 0 => Expr::constant(c.powi(k)),
            _ => intern(Node::Pow(self.clone(), k)),
        }
    }

    pub fn apply(&self, f: Func) -> Expr {
        if let Some(c) = self.as_const() {
            if let Ok(v) = super::eval::apply_func(f, c) {
                return Expr::constant(v);
            }
        }
        intern(Node::Func(f, self.clone()))
    }

    pub fn sin(&self) -> Expr {
        self.apply(Func::Sin)
    }
    pub fn cos(&self) -> Expr {
        self.apply(Func::Cos)
    }
    pub fn tan(&self) -> Expr {
        self.apply(Func::Tan)
    }
    pub fn exp(&self) -> Expr {
        self.apply(Func::Exp)
    }
    pub fn ln(&self) -> Expr {
        self.apply(Func::Log)
    }
    pub fn sqrt(&self) -> Expr {
        self.apply(Func::Sqrt)
    }
    pub fn sinh(&self) -> Expr {
        self.apply(Func::Sinh)
    }
    pub fn cosh(&self) -> Expr {
        self.apply(Func::Cosh)
    }

    /// Sum of an iterator of expressions; the empty sum is zero.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms.into_iter().fold(Expr::zero(), |acc, t| acc.add(&t))
    }

    /// Visit every distinct node of the DAG once, children before parents.
    pub fn visit_postorder(&self, f: &mut impl FnMut(&Expr)) {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![(self.clone(), false)];
        while let Some((e, expanded)) = stack.pop() {
            if expanded {
                f(&e);
                continue;
            }
            if !seen.insert(e.id()) {
                continue;
            }
            stack.push((e.clone(), true));
            for child in e.children() {
                if !seen.contains(&child.id()) {
                    stack.push((child.clone(), false));
                }
            }
        }
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(_) => vec![],
            Node::Neg(a) | Node::Pow(a, _) | Node::Func(_, a) => vec![a],
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => vec![a, b],
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn dag_size(&self) -> usize {
        let mut count = 0;
        self.visit_postorder(&mut |_| count += 1);
        count
    }

    /// Distinct coordinates the expression depends on syntactically.
    pub fn variables(&self) -> Vec<Coord> {
        let mut vars = Vec::new();
        self.visit_postorder(&mut |e| {
            if let Node::Var(c) = e.node() {
                vars.push(*c);
            }
        });
        vars.sort();
        vars.dedup();
        vars
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Self {
        Expr::constant(c)
    }
}

macro_rules! impl_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(&self, rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(self, &rhs)
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$method(&self, &Expr::constant(rhs))
            }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::$method(self, &Expr::constant(rhs))
            }
        }
        impl $tr<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::$method(&Expr::constant(self), &rhs)
            }
        }
        impl $tr<&Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::$method(&Expr::constant(self), rhs)
            }
        }
    };
}

impl_binop!(Add, add);
impl_binop!(Sub, sub);
impl_binop!(Mul, mul);
impl_binop!(Div, div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}
