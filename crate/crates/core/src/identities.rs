//! Pointwise numeric verification of the Ricci, deflection and Bianchi
//! identities of an h-normal Γ-linear connection of Cartan type, plus
//! consistency checks of the torsion and curvature closed forms against the
//! adapted-frame computation in [`frame`](crate::frame).
//!
//! Every identity is evaluated as a signed list of terms (left side positive,
//! right side negated). At each sample point the raw residual `|Σ terms|` of
//! every index tuple is divided by `1 + max |term|`, the maximum taken over
//! all terms and index tuples of that identity at that point; an identity
//! passes when the largest such normalized residual is below the tolerance.

use std::collections::BTreeMap;

use crate::covderiv::{cd_spatial, cd_temporal, cd_vertical};
use crate::dtensor::{DTensor, IndexIter, NumTensor, Signature, SlotKind};
use crate::error::{Error, Result};
use crate::expr::{Dims, Evaluator, Point};
use crate::frame::FrameConnection;
use crate::geometry::{symmetry_violation, GammaConnection, NonlinearConnection};
use crate::tensors::deflection_closed;

/// Default tolerance on normalized residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// A d-vector field `X^α δ/δt^α + X^i δ/δx^i + X^{(i)}_{(α)} ∂/∂x^i_α`.
#[derive(Debug, Clone, PartialEq)]
pub struct DVectorField {
    /// `X^α`, signature `[TU]`.
    pub time: DTensor,
    /// `X^i`, signature `[SU]`.
    pub space: DTensor,
    /// `X^{(i)}_{(α)}`, signature `[FU]`.
    pub fiber: DTensor,
}

impl DVectorField {
    pub fn zero(dims: Dims) -> Self {
        DVectorField {
            time: DTensor::zero(Signature::new(dims, &[SlotKind::TimeUp])),
            space: DTensor::zero(Signature::new(dims, &[SlotKind::SpaceUp])),
            fiber: DTensor::zero(Signature::new(dims, &[SlotKind::FiberUp])),
        }
    }

    pub fn dims(&self) -> Dims {
        self.time.dims()
    }

    /// Multiplies every component by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let k = crate::expr::Expr::constant(c);
        DVectorField {
            time: self.time.map(|e| e.mul(&k)),
            space: self.space.map(|e| e.mul(&k)),
            fiber: self.fiber.map(|e| e.mul(&k)),
        }
    }
}

/// Result of checking one identity over all sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityEntry {
    pub identity_id: String,
    /// Largest normalized residual.
    pub max_residual: f64,
    /// Largest raw residual `|LHS − RHS|`.
    pub raw_residual: f64,
    /// Largest absolute value of any single term.
    pub max_term: f64,
    pub worst_point: Point,
    /// 1-based free indices of the worst tuple; a fiber pair counts as one
    /// index numbered `i·p + α + 1`.
    pub worst_indices: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub entries: Vec<IdentityEntry>,
    pub tolerance: f64,
    pub points_used: usize,
}

impl IdentityReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, id: &str) -> Option<&IdentityEntry> {
        self.entries.iter().find(|e| e.identity_id == id)
    }

    pub fn failures(&self) -> impl Iterator<Item = &IdentityEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }
}

/// Signed terms of one identity at one index tuple.
#[derive(Debug, Default)]
pub struct Acc {
    sum: f64,
    max: f64,
}

impl Acc {
    pub fn add(&mut self, v: f64) {
        self.sum += v;
        self.max = self.max.max(v.abs());
    }

    pub fn sub(&mut self, v: f64) {
        self.add(-v);
    }
}

/// Numeric values of the tensors an identity needs, at one point.
pub struct Ctx<'a> {
    pub dims: Dims,
    pub point: &'a Point,
    vals: BTreeMap<String, NumTensor>,
}

impl Ctx<'_> {
    /// The component `idx` of the tensor stored under `key`.
    pub fn v(&self, key: &str, idx: &[usize]) -> f64 {
        self.vals
            .get(key)
            .unwrap_or_else(|| panic!("tensor {key} was not prepared"))
            .get(idx)
    }

    /// Fiber coordinate `x^i_α`.
    pub fn x(&self, i: usize, a: usize) -> f64 {
        self.point.v[i][a]
    }

    /// Number of fiber pairs `n·p`.
    pub fn nf(&self) -> usize {
        self.dims.n * self.dims.p
    }
}

type Body<'a> = Box<dyn Fn(&Ctx, &[usize], &mut Acc) + 'a>;

/// One identity: free index ranges and a term generator.
pub struct Identity<'a> {
    pub id: String,
    pub ranges: Vec<usize>,
    pub body: Body<'a>,
}

impl<'a> Identity<'a> {
    pub fn new(id: impl Into<String>, ranges: Vec<usize>, body: impl Fn(&Ctx, &[usize], &mut Acc) + 'a) -> Self {
        Identity {
            id: id.into(),
            ranges,
            body: Box::new(body),
        }
    }
}

/// Symbolic tensors by key. A key is a base name followed by any number of
/// derivative suffixes `/t`, `/x`, `/v` (temporal, spatial, vertical
/// covariant derivative), applied left to right.
pub struct Store<'c> {
    conn: &'c GammaConnection,
    map: BTreeMap<String, DTensor>,
}

impl<'c> Store<'c> {
    pub fn new(conn: &'c GammaConnection) -> Self {
        Store {
            conn,
            map: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, key: &str, t: DTensor) {
        self.map.insert(key.to_string(), t);
    }

    pub fn get(&mut self, key: &str) -> &DTensor {
        self.need(key);
        &self.map[key]
    }

    pub fn need(&mut self, key: &str) {
        if self.map.contains_key(key) {
            return;
        }
        let t = if let Some((base, dir)) = key.rsplit_once('/') {
            self.need(base);
            let b = &self.map[base];
            match dir {
                "t" => cd_temporal(b, self.conn),
                "x" => cd_spatial(b, self.conn),
                "v" => cd_vertical(b, self.conn),
                _ => panic!("unknown derivative suffix in {key}"),
            }
        } else {
            self.base(key)
        };
        self.map.insert(key.to_string(), t);
    }

    fn base(&self, key: &str) -> DTensor {
        let conn = self.conn;
        let tor = conn.torsion();
        let cur = conn.curvature();
        match key {
            "C" => conn.c.clone(),
            "Ttx" => tor.t_tx.clone(),
            "Txx" => tor.t_xx.clone(),
            "Rtt" => tor.r_tt.clone(),
            "Rtx" => tor.r_tx.clone(),
            "Rxx" => tor.r_xx.clone(),
            "Pt" => tor.p_t.clone(),
            "Px" => tor.p_x.clone(),
            "S" => tor.s.clone(),
            "H" => cur.h.clone(),
            "Ctt" => cur.r_tt.clone(),
            "Ctx" => cur.r_tx.clone(),
            "Cxx" => cur.r_xx.clone(),
            "CPt" => cur.p_t.clone(),
            "CPx" => cur.p_x.clone(),
            "CS" => cur.s.clone(),
            "VRtt" => cur.v_r_tt.clone(),
            "VRtx" => cur.v_r_tx.clone(),
            "VRxx" => cur.v_r_xx.clone(),
            "VPt" => cur.v_p_t.clone(),
            "VPx" => cur.v_p_x.clone(),
            "VS" => cur.v_s.clone(),
            _ => panic!("unknown tensor {key}"),
        }
    }

    /// Evaluates every stored tensor at `q` with one shared cache.
    pub fn eval_at<'q>(&self, q: &'q Point) -> Result<Ctx<'q>> {
        let mut ev = Evaluator::new(q);
        let mut vals = BTreeMap::new();
        for (k, t) in &self.map {
            vals.insert(k.clone(), t.eval(&mut ev)?);
        }
        Ok(Ctx {
            dims: self.conn.dims(),
            point: q,
            vals,
        })
    }
}

/// Evaluates `ids` at every point and builds the report.
pub fn run_identities(store: &Store, ids: &[Identity], points: &[Point], tolerance: f64) -> Result<IdentityReport> {
    if points.is_empty() {
        return Err(Error::Dimension("at least one sample point is required".into()));
    }
    let mut entries: Vec<IdentityEntry> = ids
        .iter()
        .map(|id| IdentityEntry {
            identity_id: id.id.clone(),
            max_residual: 0.0,
            raw_residual: 0.0,
            max_term: 0.0,
            worst_point: points[0].clone(),
            worst_indices: vec![1; id.ranges.len()],
            pass: true,
        })
        .collect();
    for q in points {
        let ctx = store.eval_at(q)?;
        for (id, entry) in ids.iter().zip(entries.iter_mut()) {
            let mut rows = Vec::new();
            let mut scale: f64 = 0.0;
            for idx in IndexIter::new(id.ranges.clone()) {
                let mut acc = Acc::default();
                (id.body)(&ctx, &idx, &mut acc);
                scale = scale.max(acc.max);
                rows.push((idx, acc.sum.abs()));
            }
            entry.max_term = entry.max_term.max(scale);
            for (idx, raw) in rows {
                entry.raw_residual = entry.raw_residual.max(raw);
                let norm = raw / (1.0 + scale);
                // NaN residuals must count as failures
                if norm > entry.max_residual || norm.is_nan() {
                    entry.max_residual = if norm.is_nan() { f64::INFINITY } else { norm };
                    entry.worst_point = q.clone();
                    entry.worst_indices = idx.iter().map(|k| k + 1).collect();
                }
            }
        }
    }
    for e in &mut entries {
        e.pass = e.max_residual < tolerance;
    }
    Ok(IdentityReport {
        entries,
        tolerance,
        points_used: points.len(),
    })
}

/// Fails with [`Error::NotCartan`] unless `L` and `C` of `conn` have the
/// Cartan symmetries at every point.
pub fn require_cartan(conn: &GammaConnection, points: &[Point]) -> Result<()> {
    match symmetry_violation(&conn.l, &conn.c, points)? {
        None => Ok(()),
        Some(v) => Err(Error::NotCartan(v.to_string())),
    }
}

fn check_dims(conn: &GammaConnection, nc: &NonlinearConnection, points: &[Point]) -> Result<()> {
    let dims = conn.dims();
    if nc.dims() != dims {
        return Err(Error::Dimension(format!(
            "connection over {dims:?}, nonlinear connection over {:?}",
            nc.dims()
        )));
    }
    if let Some(q) = points.iter().find(|q| !q.is_valid_for(dims)) {
        return Err(Error::Dimension(format!("sample point {q:?} does not fit {dims:?}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Ricci identities

/// The 18 Ricci identities, six per block of the d-vector field.
pub fn ricci_suite(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    x: &DVectorField,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    if x.dims() != conn.dims() {
        return Err(Error::Dimension("d-vector field dimensions differ from the connection".into()));
    }
    require_cartan(conn, points)?;
    let mut store = Store::new(conn);
    store.insert("Xa", x.time.clone());
    store.insert("Xi", x.space.clone());
    store.insert("Xf", x.fiber.clone());
    let ids = ricci_identities(conn.dims());
    for k in ricci_keys() {
        store.need(&k);
    }
    run_identities(&store, &ids, points, tolerance)
}

fn ricci_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for y in ["Xa", "Xi", "Xf"] {
        for s in ["", "/t", "/x", "/v", "/t/t", "/t/x", "/x/t", "/x/x", "/t/v", "/v/t", "/x/v", "/v/x", "/v/v"] {
            keys.push(format!("{y}{s}"));
        }
    }
    for k in ["Rtt", "Rtx", "Rxx", "Pt", "Px", "S", "C", "Ttx", "H", "Ctt", "Ctx", "Cxx", "CPt", "CPx", "CS"] {
        keys.push(k.to_string());
    }
    keys
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Blk {
    Time,
    Space,
    Fiber,
}

/// The curvature action `X^m R^i_{m..}` on one block; `fam` names a curvature
/// family `[SU, SL, d1, d2]` and `h` the matching temporal family (only the
/// first identity of each block has one).
fn curvature_action(c: &Ctx, blk: Blk, y: &str, a: usize, fam: &str, h: bool, dirs: [usize; 2], acc: &mut Acc) {
    let dims = c.dims;
    match blk {
        Blk::Time => {
            if h {
                for mu in 0..dims.p {
                    acc.sub(c.v(y, &[mu]) * c.v("H", &[a, mu, dirs[0], dirs[1]]));
                }
            }
        }
        Blk::Space => {
            for m in 0..dims.n {
                acc.sub(c.v(y, &[m]) * c.v(fam, &[a, m, dirs[0], dirs[1]]));
            }
        }
        Blk::Fiber => {
            let (i, al) = dims.fiber_parts(a);
            for m in 0..dims.n {
                acc.sub(c.v(y, &[dims.fiber(m, al)]) * c.v(fam, &[i, m, dirs[0], dirs[1]]));
            }
            if h {
                for mu in 0..dims.p {
                    acc.add(c.v(y, &[dims.fiber(i, mu)]) * c.v("H", &[mu, al, dirs[0], dirs[1]]));
                }
            }
        }
    }
}

fn ricci_identities<'a>(dims: Dims) -> Vec<Identity<'a>> {
    let (p, n, nf) = (dims.p, dims.n, dims.n * dims.p);
    let mut out = Vec::new();
    for (name, blk, y, ry) in [
        ("hT", Blk::Time, "Xa", p),
        ("hM", Blk::Space, "Xi", n),
        ("v", Blk::Fiber, "Xf", nf),
    ] {
        let k = |s: &str| format!("{y}{s}");
        let (yx, yv) = (k("/x"), k("/v"));
        // torsion terms −Y|^{(μ)}_{(m)} R^{(m)}_{(μ)..}
        let vert = move |c: &Ctx, yv: &str, a: usize, fam: &str, d: [usize; 2], acc: &mut Acc| {
            for f in 0..c.nf() {
                acc.add(c.v(yv, &[a, f]) * c.v(fam, &[f, d[0], d[1]]));
            }
        };
        {
            let (ytt, yv) = (k("/t/t"), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.1"), vec![ry, p, p], move |c, ix, acc| {
                let (a, b, g) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&ytt, &[a, b, g]) - c.v(&ytt, &[a, g, b]));
                curvature_action(c, blk, y, a, "Ctt", true, [b, g], acc);
                vert(c, &yv, a, "Rtt", [b, g], acc);
            }));
        }
        {
            let (ytx, yxt, yx, yv) = (k("/t/x"), k("/x/t"), yx.clone(), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.2"), vec![ry, p, n], move |c, ix, acc| {
                let (a, b, kk) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&ytx, &[a, b, kk]) - c.v(&yxt, &[a, kk, b]));
                curvature_action(c, blk, y, a, "Ctx", false, [b, kk], acc);
                for m in 0..n {
                    acc.add(c.v(&yx, &[a, m]) * c.v("Ttx", &[m, b, kk]));
                }
                vert(c, &yv, a, "Rtx", [b, kk], acc);
            }));
        }
        {
            let (yxx, yv) = (k("/x/x"), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.3"), vec![ry, n, n], move |c, ix, acc| {
                let (a, j, kk) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&yxx, &[a, j, kk]) - c.v(&yxx, &[a, kk, j]));
                curvature_action(c, blk, y, a, "Cxx", false, [j, kk], acc);
                vert(c, &yv, a, "Rxx", [j, kk], acc);
            }));
        }
        {
            let (ytv, yvt, yv) = (k("/t/v"), k("/v/t"), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.4"), vec![ry, p, nf], move |c, ix, acc| {
                let (a, b, g) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&ytv, &[a, b, g]) - c.v(&yvt, &[a, g, b]));
                curvature_action(c, blk, y, a, "CPt", false, [b, g], acc);
                vert(c, &yv, a, "Pt", [b, g], acc);
            }));
        }
        {
            let (yxv, yvx, yx, yv) = (k("/x/v"), k("/v/x"), yx.clone(), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.5"), vec![ry, n, nf], move |c, ix, acc| {
                let (a, j, g) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&yxv, &[a, j, g]) - c.v(&yvx, &[a, g, j]));
                curvature_action(c, blk, y, a, "CPx", false, [j, g], acc);
                for m in 0..n {
                    acc.add(c.v(&yx, &[a, m]) * c.v("C", &[m, j, g]));
                }
                vert(c, &yv, a, "Px", [j, g], acc);
            }));
        }
        {
            let (yvv, yv) = (k("/v/v"), yv.clone());
            out.push(Identity::new(format!("ricci.{name}.6"), vec![ry, nf, nf], move |c, ix, acc| {
                let (a, f1, f2) = (ix[0], ix[1], ix[2]);
                acc.add(c.v(&yvv, &[a, f1, f2]) - c.v(&yvv, &[a, f2, f1]));
                curvature_action(c, blk, y, a, "CS", false, [f1, f2], acc);
                vert(c, &yv, a, "S", [f1, f2], acc);
            }));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Deflection identities

/// The six identities satisfied by the deflection d-tensors. The deflection
/// tensors come from their closed forms; their covariant derivatives from
/// [`covderiv`](crate::covderiv).
pub fn deflection_suite(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    require_cartan(conn, points)?;
    let dims = conn.dims();
    let (p, n, nf) = (dims.p, dims.n, dims.n * dims.p);
    let defl = deflection_closed(conn, nc);
    let mut store = Store::new(conn);
    store.insert("Db", defl.d_bar);
    store.insert("Dx", defl.d_x);
    store.insert("Dv", defl.d_v);
    for k in [
        "Db/t", "Db/x", "Db/v", "Dx/t", "Dx/x", "Dx/v", "Dv/t", "Dv/x", "Dv/v", "Rtt", "Rtx", "Rxx", "Pt", "Px", "S", "C",
        "Ttx", "H", "Ctt", "Ctx", "Cxx", "CPt", "CPx", "CS",
    ] {
        store.need(k);
    }
    // x^m_α R^i_{m..} for the fiber pair (i,α)
    let xr = |c: &Ctx, f: usize, fam: &str, d: [usize; 2], acc: &mut Acc| {
        let (i, a) = c.dims.fiber_parts(f);
        for m in 0..c.dims.n {
            acc.sub(c.x(m, a) * c.v(fam, &[i, m, d[0], d[1]]));
        }
    };
    // d^{(i)(μ)}_{(α)(m)} R^{(m)}_{(μ)..}
    let dr = |c: &Ctx, f: usize, fam: &str, d: [usize; 2], acc: &mut Acc| {
        for g in 0..c.nf() {
            acc.add(c.v("Dv", &[f, g]) * c.v(fam, &[g, d[0], d[1]]));
        }
    };
    let ids = vec![
        Identity::new("deflection.1", vec![nf, p, p], move |c, ix, acc| {
            let (f, b, g) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Db/t", &[f, b, g]) - c.v("Db/t", &[f, g, b]));
            xr(c, f, "Ctt", [b, g], acc);
            let (i, a) = c.dims.fiber_parts(f);
            for mu in 0..c.dims.p {
                acc.add(c.x(i, mu) * c.v("H", &[mu, a, b, g]));
            }
            dr(c, f, "Rtt", [b, g], acc);
        }),
        Identity::new("deflection.2", vec![nf, p, n], move |c, ix, acc| {
            let (f, b, k) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Db/x", &[f, b, k]) - c.v("Dx/t", &[f, k, b]));
            xr(c, f, "Ctx", [b, k], acc);
            for m in 0..c.dims.n {
                acc.add(c.v("Dx", &[f, m]) * c.v("Ttx", &[m, b, k]));
            }
            dr(c, f, "Rtx", [b, k], acc);
        }),
        Identity::new("deflection.3", vec![nf, n, n], move |c, ix, acc| {
            let (f, j, k) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Dx/x", &[f, j, k]) - c.v("Dx/x", &[f, k, j]));
            xr(c, f, "Cxx", [j, k], acc);
            dr(c, f, "Rxx", [j, k], acc);
        }),
        Identity::new("deflection.4", vec![nf, p, nf], move |c, ix, acc| {
            let (f, b, g) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Db/v", &[f, b, g]) - c.v("Dv/t", &[f, g, b]));
            xr(c, f, "CPt", [b, g], acc);
            dr(c, f, "Pt", [b, g], acc);
        }),
        Identity::new("deflection.5", vec![nf, n, nf], move |c, ix, acc| {
            let (f, j, g) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Dx/v", &[f, j, g]) - c.v("Dv/x", &[f, g, j]));
            xr(c, f, "CPx", [j, g], acc);
            for m in 0..c.dims.n {
                acc.add(c.v("Dx", &[f, m]) * c.v("C", &[m, j, g]));
            }
            dr(c, f, "Px", [j, g], acc);
        }),
        Identity::new("deflection.6", vec![nf, nf, nf], move |c, ix, acc| {
            let (f, f1, f2) = (ix[0], ix[1], ix[2]);
            acc.add(c.v("Dv/v", &[f, f1, f2]) - c.v("Dv/v", &[f, f2, f1]));
            xr(c, f, "CS", [f1, f2], acc);
            dr(c, f, "S", [f1, f2], acc);
        }),
    ];
    run_identities(&store, &ids, points, tolerance)
}

// ---------------------------------------------------------------------------
// Bianchi identities

/// `Σ_F a(F) · b(F)` over fiber pairs.
fn fsum(c: &Ctx, mut term: impl FnMut(usize) -> f64) -> f64 {
    (0..c.nf()).map(&mut term).sum()
}

/// Adds the terms of `f(ix)` minus those of `f(swapped ix)`.
fn alternate(acc: &mut Acc, ix: &[usize], swap: (usize, usize), f: impl Fn(&[usize], &mut Vec<f64>)) {
    let mut terms = Vec::new();
    f(ix, &mut terms);
    for t in terms.drain(..) {
        acc.add(t);
    }
    let mut sw = ix.to_vec();
    sw.swap(swap.0, swap.1);
    f(&sw, &mut terms);
    for t in terms {
        acc.sub(t);
    }
}

/// Adds the terms of `f` over the three cyclic permutations of the slots
/// `slots`.
fn cyclic(acc: &mut Acc, ix: &[usize], slots: [usize; 3], f: impl Fn(&[usize], &mut Vec<f64>)) {
    let mut terms = Vec::new();
    let mut cur = ix.to_vec();
    for _ in 0..3 {
        f(&cur, &mut terms);
        let first = cur[slots[0]];
        cur[slots[0]] = cur[slots[1]];
        cur[slots[1]] = cur[slots[2]];
        cur[slots[2]] = first;
    }
    for t in terms {
        acc.add(t);
    }
}

/// Tensor keys used by the Bianchi identities.
pub const BIANCHI_KEYS: &[&str] = &[
    "C", "C/t", "C/x", "C/v", "Ttx", "Ttx/t", "Ttx/x", "Ttx/v", "Rtt", "Rtt/t", "Rtt/x", "Rtt/v", "Rtx", "Rtx/t", "Rtx/x",
    "Rtx/v", "Rxx", "Rxx/x", "Rxx/v", "Pt", "Pt/t", "Pt/x", "Pt/v", "Px", "Px/t", "Px/x", "Px/v", "S", "S/t", "S/x",
    "S/v", "H", "H/t", "H/x", "Ctt", "Ctt/t", "Ctt/v", "Ctx", "Ctx/t", "Ctx/x", "Ctx/v", "Cxx", "Cxx/t", "Cxx/x",
    "Cxx/v", "CPt", "CPt/t", "CPt/x", "CPt/v", "CPx", "CPx/t", "CPx/x", "CPx/v", "CS", "CS/t", "CS/x", "CS/v", "VRtt",
    "VRtx", "VRxx", "VPt", "VPx", "VS",
];

/// The thirty Bianchi identities, each implemented as displayed.
pub fn bianchi_suite(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    require_cartan(conn, points)?;
    let mut store = Store::new(conn);
    for k in BIANCHI_KEYS {
        store.need(k);
    }
    run_identities(&store, &bianchi_identities(conn.dims()), points, tolerance)
}

/// Definitions of the thirty Bianchi identities. Index conventions: `L` and
/// `F` are fiber-up pairs `(l,δ)`, `E`, `B`, `G` fiber-down pairs `(ε,p)`
/// etc., all encoded as `i·p + α`.
pub fn bianchi_identities<'a>(dims: Dims) -> Vec<Identity<'a>> {
    let (p, n, nf) = (dims.p, dims.n, dims.n * dims.p);
    let mut out: Vec<Identity<'a>> = Vec::new();

    // (1)
    out.push(Identity::new("bianchi.1.1", vec![p, p, p, p], |c, ix, acc| {
        cyclic(acc, ix, [1, 2, 3], |ix, t| t.push(c.v("H", ix)));
    }));
    out.push(Identity::new("bianchi.1.2", vec![n, n, p, p], |c, ix, acc| {
        let (l, k, a, b) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            for m in 0..c.dims.n {
                t.push(c.v("Ttx", &[l, a, m]) * c.v("Ttx", &[m, b, k]));
            }
            t.push(-c.v("Ttx/t", &[l, a, k, b]));
        });
        acc.sub(c.v("Ctt", &[l, k, a, b]));
        acc.add(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Rtt", &[f, a, b])));
    }));
    out.push(Identity::new("bianchi.1.3", vec![n, p, n, n], |c, ix, acc| {
        let (l, a) = (ix[0], ix[1]);
        alternate(acc, &ix[2..], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Rtx", &[f, a, j])));
            t.push(c.v("Ctx", &[l, j, a, k]));
            t.push(c.v("Ttx/x", &[l, a, j, k]));
        });
    }));
    out.push(Identity::new("bianchi.1.4", vec![n, n, n, n], |c, ix, acc| {
        cyclic(acc, ix, [1, 2, 3], |ix, t| {
            let (l, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            t.push(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Rxx", &[f, i, j])));
            t.push(-c.v("Cxx", &[l, i, j, k]));
        });
    }));

    // (2)
    out.push(Identity::new("bianchi.2.1", vec![nf, p, p, p], |c, ix, acc| {
        cyclic(acc, ix, [1, 2, 3], |ix, t| {
            let (lf, a, b, g) = (ix[0], ix[1], ix[2], ix[3]);
            t.push(c.v("Rtt/t", &[lf, a, b, g]));
            t.push(fsum(c, |f| c.v("Pt", &[lf, g, f]) * c.v("Rtt", &[f, a, b])));
        });
    }));
    out.push(Identity::new("bianchi.2.2", vec![nf, p, p, n], |c, ix, acc| {
        let (lf, a, b, k) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("Rtx/t", &[lf, a, k, b]));
            t.push(fsum(c, |f| c.v("Pt", &[lf, b, f]) * c.v("Rtx", &[f, a, k])));
            for m in 0..c.dims.n {
                t.push(c.v("Rtx", &[lf, b, m]) * c.v("Ttx", &[m, a, k]));
            }
        });
        acc.sub(c.v("Rtt/x", &[lf, a, b, k]));
        acc.sub(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Rtt", &[f, a, b])));
    }));
    out.push(Identity::new("bianchi.2.3", vec![nf, p, n, n], |c, ix, acc| {
        let (lf, a, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("Rtx/x", &[lf, a, j, k]));
            t.push(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Rtx", &[f, a, j])));
            for m in 0..c.dims.n {
                t.push(c.v("Rxx", &[lf, k, m]) * c.v("Ttx", &[m, a, j]));
            }
        });
        // right side as displayed: −R_{αj|k} − P_α R_{jk}
        acc.add(c.v("Rtx/x", &[lf, a, j, k]));
        acc.add(fsum(c, |f| c.v("Pt", &[lf, a, f]) * c.v("Rxx", &[f, j, k])));
    }));
    out.push(Identity::new("bianchi.2.4", vec![nf, n, n, n], |c, ix, acc| {
        cyclic(acc, ix, [1, 2, 3], |ix, t| {
            let (lf, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
            t.push(c.v("Rxx/x", &[lf, i, j, k]));
            t.push(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Rxx", &[f, i, j])));
        });
    }));

    // (3)
    out.push(Identity::new("bianchi.3.1", vec![n, p, n, nf], |c, ix, acc| {
        let (l, a, k, e) = (ix[0], ix[1], ix[2], ix[3]);
        acc.add(c.v("Ttx/v", &[l, a, k, e]));
        for m in 0..c.dims.n {
            acc.sub(c.v("C", &[l, m, e]) * c.v("Ttx", &[m, a, k]));
        }
        acc.add(c.v("CPt", &[l, k, a, e]));
        acc.sub(c.v("C/t", &[l, k, e, a]));
        acc.sub(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Pt", &[f, a, e])));
    }));
    out.push(Identity::new("bianchi.3.2", vec![n, n, n, nf], |c, ix, acc| {
        let (l, e) = (ix[0], ix[3]);
        alternate(acc, &ix[1..3], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("C/x", &[l, j, e, k]));
            t.push(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Px", &[f, j, e])));
            t.push(c.v("CPx", &[l, j, k, e]));
        });
    }));

    // (4)
    out.push(Identity::new("bianchi.4.1", vec![nf, nf, p, p], |c, ix, acc| {
        let (lf, e, a, b) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("Pt/t", &[lf, a, e, b]));
            t.push(fsum(c, |f| c.v("Pt", &[lf, b, f]) * c.v("Pt", &[f, a, e])));
        });
        acc.sub(c.v("Rtt/v", &[lf, a, b, e]));
        acc.add(c.v("VRtt", &[lf, e, a, b]));
        acc.sub(fsum(c, |f| c.v("S", &[lf, e, f]) * c.v("Rtt", &[f, a, b])));
    }));
    out.push(Identity::new("bianchi.4.2", vec![nf, nf, p, n], |c, ix, acc| {
        let (lf, e, a, k) = (ix[0], ix[1], ix[2], ix[3]);
        // alternation of a temporal and a spatial index
        let mut t = Vec::new();
        t.push(c.v("Pt/x", &[lf, a, e, k]));
        t.push(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Pt", &[f, a, e])));
        t.push(-c.v("Px/t", &[lf, k, e, a]));
        t.push(-fsum(c, |f| c.v("Pt", &[lf, a, f]) * c.v("Px", &[f, k, e])));
        for v in t {
            acc.add(v);
        }
        acc.sub(c.v("Rtx/v", &[lf, a, k, e]));
        acc.add(c.v("VRtx", &[lf, e, a, k]));
        acc.sub(fsum(c, |f| c.v("S", &[lf, e, f]) * c.v("Rtx", &[f, a, k])));
        for m in 0..c.dims.n {
            acc.sub(c.v("Rtx", &[lf, a, m]) * c.v("C", &[m, k, e]));
            acc.add(c.v("Ttx", &[m, a, k]) * c.v("Px", &[lf, m, e]));
        }
    }));
    out.push(Identity::new("bianchi.4.3", vec![nf, nf, n, n], |c, ix, acc| {
        let (lf, e, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("Px/x", &[lf, j, e, k]));
            t.push(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Px", &[f, j, e])));
            for m in 0..c.dims.n {
                t.push(c.v("Rxx", &[lf, k, m]) * c.v("C", &[m, j, e]));
            }
        });
        acc.sub(c.v("Rxx/v", &[lf, j, k, e]));
        acc.add(c.v("VRxx", &[lf, e, j, k]));
        acc.sub(fsum(c, |f| c.v("S", &[lf, e, f]) * c.v("Rxx", &[f, j, k])));
    }));

    // (5)
    out.push(Identity::new("bianchi.5.1", vec![n, n, nf, nf], |c, ix, acc| {
        let (l, i) = (ix[0], ix[1]);
        alternate(acc, &ix[2..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("C/v", &[l, i, b, g]));
            for m in 0..c.dims.n {
                t.push(c.v("C", &[m, i, g]) * c.v("C", &[l, m, b]));
            }
        });
        acc.sub(c.v("CS", &[l, i, ix[2], ix[3]]));
        acc.add(fsum(c, |f| c.v("C", &[l, i, f]) * c.v("S", &[f, ix[2], ix[3]])));
    }));

    // (6)
    for (id, dir_n, pk, vk, sk) in [
        ("bianchi.6.1", p, "Pt", "VPt", "S/t"),
        ("bianchi.6.2", n, "Px", "VPx", "S/x"),
    ] {
        let pv = format!("{pk}/v");
        out.push(Identity::new(id, vec![nf, dir_n, nf, nf], move |c, ix, acc| {
            let (lf, a) = (ix[0], ix[1]);
            alternate(acc, &ix[2..], (0, 1), |s, t| {
                let (b, g) = (s[0], s[1]);
                t.push(c.v(&pv, &[lf, a, b, g]));
                t.push(fsum(c, |f| c.v(pk, &[f, a, b]) * c.v("S", &[lf, g, f])));
                t.push(c.v(vk, &[lf, b, a, g]));
            });
            let (b, g) = (ix[2], ix[3]);
            acc.add(c.v(sk, &[lf, b, g, a]));
            acc.add(fsum(c, |f| c.v("S", &[f, b, g]) * c.v(pk, &[lf, a, f])));
        }));
    }

    // (7)
    out.push(Identity::new("bianchi.7.1", vec![nf, nf, nf, nf], |c, ix, acc| {
        cyclic(acc, ix, [1, 2, 3], |ix, t| {
            let (lf, a, b, g) = (ix[0], ix[1], ix[2], ix[3]);
            t.push(c.v("S/v", &[lf, a, b, g]));
            t.push(fsum(c, |f| c.v("S", &[f, a, b]) * c.v("S", &[lf, g, f])));
            t.push(-c.v("VS", &[lf, a, b, g]));
        });
    }));

    // (8)
    out.push(Identity::new("bianchi.8.1", vec![p, p, p, p, p], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| t.push(c.v("H/t", ix)));
    }));
    out.push(Identity::new("bianchi.8.2", vec![p, p, p, p, n], |c, ix, acc| {
        acc.add(c.v("H/x", ix));
    }));
    // The curvature family P^{δ(μ)}_{εk(m)} of the temporal block is zero
    // for every h-normal connection, so every term of 8.3 vanishes; the
    // identity is kept so the suite has its full cardinality.
    out.push(Identity::new("bianchi.8.3", vec![p, p, n, n, n], |_c, _ix, acc| {
        acc.add(0.0);
    }));
    out.push(Identity::new("bianchi.8.4", vec![n, n, p, p, p], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| {
            let (l, pp, a, b, g) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            t.push(c.v("Ctt/t", &[l, pp, a, b, g]));
            t.push(-fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CPt", &[l, pp, g, f])));
        });
    }));
    out.push(Identity::new("bianchi.8.5", vec![n, n, p, p, n], |c, ix, acc| {
        let (l, pp, a, b, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("Ctx/t", &[l, pp, a, k, b]));
            t.push(fsum(c, |f| c.v("Rtx", &[f, a, k]) * c.v("CPt", &[l, pp, b, f])));
            for m in 0..c.dims.n {
                t.push(-c.v("Ttx", &[m, a, k]) * c.v("Ctx", &[l, pp, b, m]));
            }
        });
        // right side as displayed: R^l_{pαβ} carries no derivative
        acc.sub(c.v("Ctt", &[l, pp, a, b]));
        acc.sub(fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CPx", &[l, pp, k, f])));
    }));
    out.push(Identity::new("bianchi.8.6", vec![n, n, p, n, n], |c, ix, acc| {
        let (l, pp, a, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("Ctx/x", &[l, pp, a, j, k]));
            t.push(fsum(c, |f| c.v("Rtx", &[f, a, j]) * c.v("CPx", &[l, pp, k, f])));
            for m in 0..c.dims.n {
                t.push(-c.v("Ttx", &[m, a, j]) * c.v("Cxx", &[l, pp, k, m]));
            }
        });
        acc.add(c.v("Cxx/t", &[l, pp, j, k, a]));
        acc.sub(fsum(c, |f| c.v("Rtx", &[f, a, k]) * c.v("CPx", &[l, pp, j, f])));
    }));
    out.push(Identity::new("bianchi.8.7", vec![n, n, n, n, n], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| {
            let (l, pp, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            t.push(c.v("Cxx/x", &[l, pp, i, j, k]));
            t.push(-fsum(c, |f| c.v("Rxx", &[f, i, j]) * c.v("CPx", &[l, pp, k, f])));
        });
    }));

    // (9)
    out.push(Identity::new("bianchi.9.1", vec![n, n, nf, p, p], |c, ix, acc| {
        let (l, i, e, a, b) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("CPt/t", &[l, i, a, e, b]));
            t.push(-fsum(c, |f| c.v("Pt", &[f, a, e]) * c.v("CPt", &[l, i, b, f])));
        });
        acc.sub(c.v("Ctt/v", &[l, i, a, b, e]));
        acc.sub(fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CS", &[l, i, e, f])));
    }));
    out.push(Identity::new("bianchi.9.2", vec![n, n, nf, p, n], |c, ix, acc| {
        let (l, i, e, a, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        acc.add(c.v("CPt/x", &[l, i, a, e, k]));
        acc.sub(fsum(c, |f| c.v("Pt", &[f, a, e]) * c.v("CPx", &[l, i, k, f])));
        acc.sub(c.v("CPx/t", &[l, i, k, e, a]));
        acc.add(fsum(c, |f| c.v("Px", &[f, k, e]) * c.v("CPt", &[l, i, a, f])));
        acc.sub(c.v("Ctx/v", &[l, i, a, k, e]));
        acc.add(fsum(c, |f| c.v("Rtx", &[f, a, k]) * c.v("CS", &[l, i, e, f])));
        for m in 0..c.dims.n {
            acc.add(c.v("C", &[m, k, e]) * c.v("Ctx", &[l, i, a, m]));
            acc.sub(c.v("Ttx", &[m, a, k]) * c.v("CPx", &[l, i, m, e]));
        }
    }));
    out.push(Identity::new("bianchi.9.3", vec![n, n, nf, n, n], |c, ix, acc| {
        let (l, i, e, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("CPx/x", &[l, i, j, e, k]));
            t.push(-fsum(c, |f| c.v("Px", &[f, j, e]) * c.v("CPx", &[l, i, k, f])));
            for m in 0..c.dims.n {
                t.push(-c.v("C", &[m, j, e]) * c.v("Cxx", &[l, i, k, m]));
            }
        });
        acc.sub(c.v("Cxx/v", &[l, i, j, k, e]));
        acc.sub(fsum(c, |f| c.v("Rxx", &[f, j, k]) * c.v("CS", &[l, i, e, f])));
    }));

    // (10)
    out.push(Identity::new("bianchi.10.1", vec![n, n, p, nf, nf], |c, ix, acc| {
        let (l, pp, a) = (ix[0], ix[1], ix[2]);
        alternate(acc, &ix[3..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("CPt/v", &[l, pp, a, b, g]));
            t.push(-fsum(c, |f| c.v("Pt", &[f, a, b]) * c.v("CS", &[l, pp, g, f])));
        });
        let (b, g) = (ix[3], ix[4]);
        acc.sub(c.v("CS/t", &[l, pp, b, g, a]));
        acc.sub(fsum(c, |f| c.v("S", &[f, b, g]) * c.v("CPt", &[l, pp, a, f])));
    }));
    out.push(Identity::new("bianchi.10.2", vec![n, n, n, nf, nf], |c, ix, acc| {
        let (l, pp, i) = (ix[0], ix[1], ix[2]);
        alternate(acc, &ix[3..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("CPx/v", &[l, pp, i, b, g]));
            t.push(-fsum(c, |f| c.v("Px", &[f, i, b]) * c.v("CS", &[l, pp, g, f])));
            for m in 0..c.dims.n {
                t.push(c.v("C", &[m, i, b]) * c.v("CPx", &[l, pp, m, g]));
            }
        });
        let (b, g) = (ix[3], ix[4]);
        acc.sub(c.v("CS/x", &[l, pp, b, g, i]));
        acc.sub(fsum(c, |f| c.v("S", &[f, b, g]) * c.v("CPx", &[l, pp, i, f])));
    }));

    // (11)
    out.push(Identity::new("bianchi.11.1", vec![n, n, nf, nf, nf], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| {
            let (l, pp, a, b, g) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            t.push(c.v("CS/v", &[l, pp, a, b, g]));
            t.push(fsum(c, |f| c.v("S", &[f, a, b]) * c.v("CS", &[l, pp, g, f])));
        });
    }));

    out
}

// ---------------------------------------------------------------------------
// Closed forms against the adapted frame

fn compare_families<'a>(
    prefix: &str,
    pairs: Vec<(&'static str, DTensor, DTensor)>,
    store: &mut Store<'a>,
) -> Vec<Identity<'a>> {
    pairs
        .into_iter()
        .map(|(name, closed, frame)| {
            let (ka, kb) = (format!("{prefix}.{name}"), format!("{prefix}.{name}#frame"));
            let ranges = closed.signature().ranges();
            store.insert(&ka, closed);
            store.insert(&kb, frame);
            let id = ka.clone();
            Identity::new(id, ranges, move |c, ix, acc| {
                acc.add(c.v(&ka, ix));
                acc.sub(c.v(&kb, ix));
            })
        })
        .collect()
}

/// Compares each of the nine torsion closed forms with the torsion computed
/// from the adapted frame. Entries `torsion.<cell>`; `max_term` holds the
/// size of the family.
pub fn torsion_check(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    let frame = FrameConnection::new(conn);
    let mut store = Store::new(conn);
    let pairs = conn
        .torsion()
        .families()
        .into_iter()
        .map(|(name, t)| (name, t.clone(), frame.torsion_block(t.signature())))
        .collect();
    let ids = compare_families("torsion", pairs, &mut store);
    run_identities(&store, &ids, points, tolerance)
}

/// Compares each of the seven curvature closed forms with the curvature
/// computed from the adapted frame. Entries `curvature.<cell>`.
pub fn curvature_check(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    let frame = FrameConnection::new(conn);
    let mut store = Store::new(conn);
    let pairs = conn
        .curvature()
        .families()
        .into_iter()
        .map(|(name, t)| (name, t.clone(), frame.curvature_block(t.signature())))
        .collect();
    let ids = compare_families("curvature", pairs, &mut store);
    run_identities(&store, &ids, points, tolerance)
}

/// Like [`curvature_check`] for the six fiber blocks of the curvature table.
pub fn curvature_block_check(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    let frame = FrameConnection::new(conn);
    let mut store = Store::new(conn);
    let pairs = conn
        .curvature()
        .fiber_blocks()
        .into_iter()
        .map(|(name, t)| (name, t.clone(), frame.curvature_block(t.signature())))
        .collect();
    let ids = compare_families("curvature-block", pairs, &mut store);
    run_identities(&store, &ids, points, tolerance)
}

// ---------------------------------------------------------------------------
// Amended forms

/// Identities of the Bianchi suite whose displayed form does not hold for
/// Cartan-type connections, rederived from the frame identities
/// `Σ_cyc {R(X,Y)Z − T(T(X,Y),Z) − (∇_X T)(Y,Z)} = 0` and
/// `Σ_cyc {(∇_X R)(Y,Z) + R(T(X,Y),Z)} = 0` with the same component
/// conventions. Ids are `amended.<group>.<k>`. `amended.4.1` reads the
/// v-block `VRtt#frame` from the adapted-frame curvature. Cyclic sums over an
/// index range of two are trivially zero, so the cyclic members only differ
/// from their displayed forms once `p` or `n` reaches three.
pub fn amended_bianchi_identities<'a>(dims: Dims) -> Vec<Identity<'a>> {
    let (p, n, nf) = (dims.p, dims.n, dims.n * dims.p);
    let mut out: Vec<Identity<'a>> = Vec::new();

    out.push(Identity::new("amended.2.3", vec![nf, p, n, n], |c, ix, acc| {
        let (lf, a, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("Rtx/x", &[lf, a, j, k]));
            t.push(fsum(c, |f| c.v("Px", &[lf, k, f]) * c.v("Rtx", &[f, a, j])));
            for m in 0..c.dims.n {
                t.push(c.v("Rxx", &[lf, k, m]) * c.v("Ttx", &[m, a, j]));
            }
        });
        acc.add(c.v("Rxx/t", &[lf, j, k, a]));
        acc.add(fsum(c, |f| c.v("Pt", &[lf, a, f]) * c.v("Rxx", &[f, j, k])));
    }));
    out.push(Identity::new("amended.3.1", vec![n, p, n, nf], |c, ix, acc| {
        let (l, a, k, e) = (ix[0], ix[1], ix[2], ix[3]);
        acc.add(c.v("Ttx/v", &[l, a, k, e]));
        for m in 0..c.dims.n {
            acc.sub(c.v("C", &[l, m, e]) * c.v("Ttx", &[m, a, k]));
            acc.add(c.v("C", &[m, k, e]) * c.v("Ttx", &[l, a, m]));
        }
        acc.add(c.v("CPt", &[l, k, a, e]));
        acc.add(c.v("C/t", &[l, k, e, a]));
        acc.sub(fsum(c, |f| c.v("C", &[l, k, f]) * c.v("Pt", &[f, a, e])));
    }));
    out.push(Identity::new("amended.4.1", vec![nf, nf, p, p], |c, ix, acc| {
        let (lf, e, a, b) = (ix[0], ix[1], ix[2], ix[3]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("Pt/t", &[lf, a, e, b]));
            t.push(fsum(c, |f| c.v("Pt", &[lf, b, f]) * c.v("Pt", &[f, a, e])));
        });
        acc.sub(c.v("Rtt/v", &[lf, a, b, e]));
        acc.add(c.v("VRtt#frame", &[lf, e, a, b]));
        acc.sub(fsum(c, |f| c.v("S", &[lf, e, f]) * c.v("Rtt", &[f, a, b])));
    }));
    out.push(Identity::new("amended.6.2", vec![nf, n, nf, nf], |c, ix, acc| {
        let (lf, i) = (ix[0], ix[1]);
        alternate(acc, &ix[2..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("Px/v", &[lf, i, b, g]));
            t.push(fsum(c, |f| c.v("Px", &[f, i, b]) * c.v("S", &[lf, g, f])));
            t.push(c.v("VPx", &[lf, b, i, g]));
            for m in 0..c.dims.n {
                t.push(-c.v("C", &[m, i, b]) * c.v("Px", &[lf, m, g]));
            }
        });
        let (b, g) = (ix[2], ix[3]);
        acc.add(c.v("S/x", &[lf, b, g, i]));
        acc.add(fsum(c, |f| c.v("S", &[f, b, g]) * c.v("Px", &[lf, i, f])));
    }));
    // 8.4 and 8.7: the torsion of two horizontal fields is minus the
    // corresponding R-family, so the product term enters with a plus sign.
    out.push(Identity::new("amended.8.4", vec![n, n, p, p, p], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| {
            let (l, pp, a, b, g) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            t.push(c.v("Ctt/t", &[l, pp, a, b, g]));
            t.push(fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CPt", &[l, pp, g, f])));
        });
    }));
    out.push(Identity::new("amended.8.5", vec![n, n, p, p, n], |c, ix, acc| {
        let (l, pp, a, b, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("Ctx/t", &[l, pp, a, k, b]));
            t.push(fsum(c, |f| c.v("Rtx", &[f, a, k]) * c.v("CPt", &[l, pp, b, f])));
            for m in 0..c.dims.n {
                t.push(c.v("Ttx", &[m, a, k]) * c.v("Ctx", &[l, pp, b, m]));
            }
        });
        acc.sub(c.v("Ctt/x", &[l, pp, a, b, k]));
        acc.sub(fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CPx", &[l, pp, k, f])));
    }));
    out.push(Identity::new("amended.8.6", vec![n, n, p, n, n], |c, ix, acc| {
        let (l, pp, a, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("Ctx/x", &[l, pp, a, j, k]));
            t.push(fsum(c, |f| c.v("Rtx", &[f, a, j]) * c.v("CPx", &[l, pp, k, f])));
            for m in 0..c.dims.n {
                t.push(c.v("Ttx", &[m, a, j]) * c.v("Cxx", &[l, pp, k, m]));
            }
        });
        acc.add(c.v("Cxx/t", &[l, pp, j, k, a]));
        acc.add(fsum(c, |f| c.v("Rxx", &[f, j, k]) * c.v("CPt", &[l, pp, a, f])));
    }));
    out.push(Identity::new("amended.8.7", vec![n, n, n, n, n], |c, ix, acc| {
        cyclic(acc, ix, [2, 3, 4], |ix, t| {
            let (l, pp, i, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
            t.push(c.v("Cxx/x", &[l, pp, i, j, k]));
            t.push(fsum(c, |f| c.v("Rxx", &[f, i, j]) * c.v("CPx", &[l, pp, k, f])));
        });
    }));
    out.push(Identity::new("amended.9.1", vec![n, n, nf, p, p], |c, ix, acc| {
        let (l, i, e, a, b) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[a, b], (0, 1), |s, t| {
            let (a, b) = (s[0], s[1]);
            t.push(c.v("CPt/t", &[l, i, a, e, b]));
            t.push(fsum(c, |f| c.v("Pt", &[f, a, e]) * c.v("CPt", &[l, i, b, f])));
        });
        acc.sub(c.v("Ctt/v", &[l, i, a, b, e]));
        acc.sub(fsum(c, |f| c.v("Rtt", &[f, a, b]) * c.v("CS", &[l, i, e, f])));
    }));
    out.push(Identity::new("amended.9.2", vec![n, n, nf, p, n], |c, ix, acc| {
        let (l, i, e, a, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        acc.add(c.v("CPt/x", &[l, i, a, e, k]));
        acc.add(fsum(c, |f| c.v("Pt", &[f, a, e]) * c.v("CPx", &[l, i, k, f])));
        acc.sub(c.v("CPx/t", &[l, i, k, e, a]));
        acc.sub(fsum(c, |f| c.v("Px", &[f, k, e]) * c.v("CPt", &[l, i, a, f])));
        acc.sub(c.v("Ctx/v", &[l, i, a, k, e]));
        acc.sub(fsum(c, |f| c.v("Rtx", &[f, a, k]) * c.v("CS", &[l, i, e, f])));
        for m in 0..c.dims.n {
            acc.sub(c.v("C", &[m, k, e]) * c.v("Ctx", &[l, i, a, m]));
            acc.add(c.v("Ttx", &[m, a, k]) * c.v("CPx", &[l, i, m, e]));
        }
    }));
    out.push(Identity::new("amended.9.3", vec![n, n, nf, n, n], |c, ix, acc| {
        let (l, i, e, j, k) = (ix[0], ix[1], ix[2], ix[3], ix[4]);
        alternate(acc, &[j, k], (0, 1), |s, t| {
            let (j, k) = (s[0], s[1]);
            t.push(c.v("CPx/x", &[l, i, j, e, k]));
            t.push(fsum(c, |f| c.v("Px", &[f, j, e]) * c.v("CPx", &[l, i, k, f])));
            for m in 0..c.dims.n {
                t.push(c.v("C", &[m, j, e]) * c.v("Cxx", &[l, i, k, m]));
            }
        });
        acc.sub(c.v("Cxx/v", &[l, i, j, k, e]));
        acc.sub(fsum(c, |f| c.v("Rxx", &[f, j, k]) * c.v("CS", &[l, i, e, f])));
    }));
    out.push(Identity::new("amended.10.1", vec![n, n, p, nf, nf], |c, ix, acc| {
        let (l, pp, a) = (ix[0], ix[1], ix[2]);
        alternate(acc, &ix[3..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("CPt/v", &[l, pp, a, b, g]));
            t.push(fsum(c, |f| c.v("Pt", &[f, a, b]) * c.v("CS", &[l, pp, g, f])));
        });
        let (b, g) = (ix[3], ix[4]);
        acc.add(c.v("CS/t", &[l, pp, b, g, a]));
        acc.add(fsum(c, |f| c.v("S", &[f, b, g]) * c.v("CPt", &[l, pp, a, f])));
    }));
    out.push(Identity::new("amended.10.2", vec![n, n, n, nf, nf], |c, ix, acc| {
        let (l, pp, i) = (ix[0], ix[1], ix[2]);
        alternate(acc, &ix[3..], (0, 1), |s, t| {
            let (b, g) = (s[0], s[1]);
            t.push(c.v("CPx/v", &[l, pp, i, b, g]));
            t.push(fsum(c, |f| c.v("Px", &[f, i, b]) * c.v("CS", &[l, pp, g, f])));
            for m in 0..c.dims.n {
                t.push(-c.v("C", &[m, i, b]) * c.v("CPx", &[l, pp, m, g]));
            }
        });
        let (b, g) = (ix[3], ix[4]);
        acc.add(c.v("CS/x", &[l, pp, b, g, i]));
        acc.add(fsum(c, |f| c.v("S", &[f, b, g]) * c.v("CPx", &[l, pp, i, f])));
    }));
    out
}

/// Evaluates [`amended_bianchi_identities`].
pub fn amended_bianchi_suite(
    conn: &GammaConnection,
    nc: &NonlinearConnection,
    points: &[Point],
    tolerance: f64,
) -> Result<IdentityReport> {
    check_dims(conn, nc, points)?;
    require_cartan(conn, points)?;
    let mut store = Store::new(conn);
    for k in BIANCHI_KEYS {
        store.need(k);
    }
    store.need("Rxx/t");
    store.need("Ctt/x");
    let frame = FrameConnection::new(conn);
    let v = frame.curvature_block(conn.curvature().v_r_tt.signature());
    store.insert("VRtt#frame", v);
    run_identities(&store, &amended_bianchi_identities(conn.dims()), points, tolerance)
}
