//! Metrics, Christoffel symbols, the canonical nonlinear connection and
//! h-normal Γ-linear connections.
//!
//! Coefficient families are stored as [`DTensor`]s whose first slot is the
//! "result" index, second slot the contracted index and last slot the
//! derivative direction. For instance the fiber block
//! `G^{(k)(β)}_{(α)(i)γ}` has signature `[FU (k,α), FC (β,i), TL γ]`.

use std::sync::OnceLock;

use crate::dtensor::{DTensor, Signature, SlotKind};
use crate::error::{Error, Result};
use crate::expr::{parse, Coord, Dims, Evaluator, Expr, Point, MAX_DIM};
use crate::tensors::{CurvatureSet, TorsionSet};

use SlotKind::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricKind {
    /// `h_{αβ}(t)` on the temporal manifold.
    Temporal,
    /// `φ_{ij}(x)` on the spatial manifold.
    Spatial,
}

/// A semi-Riemannian metric on the temporal or the spatial manifold, with its
/// inverse computed symbolically by cofactors.
#[derive(Debug, Clone)]
pub struct Metric {
    kind: MetricKind,
    dims: Dims,
    g: Vec<Expr>,
    g_inv: Vec<Expr>,
    det: Expr,
}

fn determinant(m: &[Expr], size: usize) -> Expr {
    match size {
        0 => Expr::one(),
        1 => m[0].clone(),
        2 => m[0].mul(&m[3]).sub(&m[1].mul(&m[2])),
        _ => {
            let mut terms = Vec::with_capacity(size);
            for col in 0..size {
                if m[col].is_zero() {
                    continue;
                }
                let minor = minor(m, size, 0, col);
                let t = m[col].mul(&determinant(&minor, size - 1));
                terms.push(if col % 2 == 0 { t } else { t.neg() });
            }
            Expr::sum(terms)
        }
    }
}

fn minor(m: &[Expr], size: usize, row: usize, col: usize) -> Vec<Expr> {
    let mut out = Vec::with_capacity((size - 1) * (size - 1));
    for r in (0..size).filter(|&r| r != row) {
        for c in (0..size).filter(|&c| c != col) {
            out.push(m[r * size + c].clone());
        }
    }
    out
}

impl Metric {
    /// Builds a metric from its component grid (row-major `dim × dim`).
    pub fn new(kind: MetricKind, dims: Dims, g: Vec<Vec<Expr>>) -> Result<Self> {
        if !dims.is_valid() {
            return Err(Error::InvalidDims { p: dims.p, n: dims.n });
        }
        let size = match kind {
            MetricKind::Temporal => dims.p,
            MetricKind::Spatial => dims.n,
        };
        if size > MAX_DIM {
            return Err(Error::Dimension(format!("metric dimension {size} exceeds {MAX_DIM}")));
        }
        if g.len() != size || g.iter().any(|row| row.len() != size) {
            return Err(Error::Dimension(format!(
                "{kind:?} metric must be {size}x{size}"
            )));
        }
        let flat: Vec<Expr> = g.into_iter().flatten().collect();
        for (k, e) in flat.iter().enumerate() {
            let bad = e.variables().into_iter().find(|c| match kind {
                MetricKind::Temporal => !matches!(c, Coord::Time(_)),
                MetricKind::Spatial => !matches!(c, Coord::Space(_)),
            });
            if let Some(c) = bad {
                return Err(Error::MetricDependence(format!(
                    "{kind:?} component ({},{}) depends on {c}",
                    k / size + 1,
                    k % size + 1
                )));
            }
        }
        let det = determinant(&flat, size);
        let mut g_inv = Vec::with_capacity(size * size);
        for r in 0..size {
            for c in 0..size {
                // inverse_{rc} = cofactor_{cr} / det
                let cof = determinant(&minor(&flat, size, c, r), size - 1);
                let cof = if (r + c) % 2 == 0 { cof } else { cof.neg() };
                g_inv.push(cof.div(&det));
            }
        }
        Ok(Metric {
            kind,
            dims,
            g: flat,
            g_inv,
            det,
        })
    }

    /// Parses a grid of expression strings.
    pub fn parse(kind: MetricKind, dims: Dims, rows: &[Vec<String>]) -> Result<Self> {
        let g = rows
            .iter()
            .map(|row| row.iter().map(|s| parse(s, dims)).collect::<std::result::Result<Vec<_>, _>>())
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Metric::new(kind, dims, g)
    }

    /// The identity metric.
    pub fn flat(kind: MetricKind, dims: Dims) -> Result<Self> {
        let size = match kind {
            MetricKind::Temporal => dims.p,
            MetricKind::Spatial => dims.n,
        };
        let g = (0..size)
            .map(|r| {
                (0..size)
                    .map(|c| if r == c { Expr::one() } else { Expr::zero() })
                    .collect()
            })
            .collect();
        Metric::new(kind, dims, g)
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    /// Size of the metric (`p` or `n`).
    pub fn dim(&self) -> usize {
        match self.kind {
            MetricKind::Temporal => self.dims.p,
            MetricKind::Spatial => self.dims.n,
        }
    }

    /// Dimensions of the jet bundle the metric lives on.
    pub fn jet_dims(&self) -> Dims {
        self.dims
    }

    pub fn g(&self, a: usize, b: usize) -> &Expr {
        &self.g[a * self.dim() + b]
    }

    pub fn g_inv(&self, a: usize, b: usize) -> &Expr {
        &self.g_inv[a * self.dim() + b]
    }

    pub fn det(&self) -> &Expr {
        &self.det
    }

    fn coord(&self, a: usize) -> Coord {
        match self.kind {
            MetricKind::Temporal => Coord::Time(a),
            MetricKind::Spatial => Coord::Space(a),
        }
    }

    fn slots(&self) -> (SlotKind, SlotKind) {
        match self.kind {
            MetricKind::Temporal => (TimeUp, TimeDown),
            MetricKind::Spatial => (SpaceUp, SpaceDown),
        }
    }

    /// Checks symmetry, invertibility (`|det g| > 1e-12`) and `g⁻¹g = I`
    /// (residual `< 1e-9`) at every point.
    pub fn validate_at(&self, points: &[Point]) -> Result<()> {
        let d = self.dim();
        for q in points {
            let mut ev = Evaluator::new(q);
            let mut g = vec![0.0; d * d];
            for (k, e) in self.g.iter().enumerate() {
                g[k] = ev.eval(e)?;
            }
            for a in 0..d {
                for b in 0..a {
                    let (x, y) = (g[a * d + b], g[b * d + a]);
                    if (x - y).abs() > 1e-12 * (1.0 + x.abs().max(y.abs())) {
                        return Err(Error::AsymmetricMetric(format!(
                            "{:?} components ({},{}) and ({},{}) differ at {q:?}",
                            self.kind,
                            a + 1,
                            b + 1,
                            b + 1,
                            a + 1
                        )));
                    }
                }
            }
            let det = ev.eval(&self.det)?;
            if !(det.abs() > 1e-12) {
                return Err(Error::SingularMetric(format!(
                    "{:?} metric has det {det:e} at {q:?}",
                    self.kind
                )));
            }
            let singular = |e: crate::expr::EvalError| {
                Error::SingularMetric(format!("{:?} metric inverse fails at {q:?}: {e}", self.kind))
            };
            let mut inv = vec![0.0; d * d];
            for (k, e) in self.g_inv.iter().enumerate() {
                inv[k] = ev.eval(e).map_err(singular)?;
            }
            for a in 0..d {
                for b in 0..d {
                    let s: f64 = (0..d).map(|m| inv[a * d + m] * g[m * d + b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    if (s - want).abs() >= 1e-9 {
                        return Err(Error::SingularMetric(format!(
                            "{:?} metric inverse residual {:e} at {q:?}",
                            self.kind,
                            (s - want).abs()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Christoffel symbols `H^γ_{αβ} = ½ g^{γμ}(∂_α g_{μβ} + ∂_β g_{αμ} − ∂_μ g_{αβ})`
/// with signature `[up, down, down]` of the metric's kind. Symmetric in the
/// two lower indices by construction.
pub fn christoffel(m: &Metric) -> DTensor {
    let d = m.dim();
    let (up, down) = m.slots();
    // ∂_c g_{ab}
    let dg: Vec<Expr> = (0..d * d * d)
        .map(|k| {
            let (ab, c) = (k / d, k % d);
            m.g[ab].diff(m.coord(c))
        })
        .collect();
    let dg = |a: usize, b: usize, c: usize| &dg[(a * d + b) * d + c];
    let mut comps = vec![Expr::zero(); d * d * d];
    for g in 0..d {
        for a in 0..d {
            for b in a..d {
                let e = Expr::sum((0..d).map(|mu| {
                    let bracket = dg(mu, b, a).add(dg(a, mu, b)).sub(dg(a, b, mu));
                    m.g_inv(g, mu).mul(&bracket)
                }))
                .mul(&Expr::constant(0.5));
                comps[(g * d + a) * d + b] = e.clone();
                comps[(g * d + b) * d + a] = e;
            }
        }
    }
    DTensor::from_components(Signature::new(m.dims, &[up, down, down]), comps)
        .expect("christoffel grid size")
}

/// Curvature of a metric from its Christoffel symbols,
/// `R^α_{ηβγ} = ∂_γ H^α_{ηβ} − ∂_β H^α_{ηγ} + H^μ_{ηβ} H^α_{μγ} − H^μ_{ηγ} H^α_{μβ}`,
/// signature `[up, down, down, down]`. Antisymmetric in `(β, γ)`.
pub fn metric_curvature(m: &Metric, chr: &DTensor) -> DTensor {
    let d = m.dim();
    let (up, down) = m.slots();
    let h = |a: usize, b: usize, c: usize| chr.get(&[a, b, c]);
    let mut comps = vec![Expr::zero(); d * d * d * d];
    let at = |a: usize, e: usize, b: usize, c: usize| ((a * d + e) * d + b) * d + c;
    for a in 0..d {
        for e in 0..d {
            for b in 0..d {
                for c in (b + 1)..d {
                    let lin = h(a, e, b)
                        .diff(m.coord(c))
                        .sub(&h(a, e, c).diff(m.coord(b)));
                    let quad = Expr::sum((0..d).map(|mu| {
                        h(mu, e, b).mul(h(a, mu, c)).sub(&h(mu, e, c).mul(h(a, mu, b)))
                    }));
                    let r = lin.add(&quad);
                    comps[at(a, e, c, b)] = r.neg();
                    comps[at(a, e, b, c)] = r;
                }
            }
        }
    }
    DTensor::from_components(Signature::new(m.dims, &[up, down, down, down]), comps)
        .expect("curvature grid size")
}

/// A nonlinear connection: temporal components `M^{(j)}_{(β)α}` with
/// signature `[FU (j,β), TL α]` and spatial components `N^{(j)}_{(β)i}` with
/// signature `[FU (j,β), SL i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearConnection {
    m: DTensor,
    n: DTensor,
}

impl NonlinearConnection {
    pub fn new(m: DTensor, n: DTensor) -> Result<Self> {
        let dims = m.dims();
        let want_m = Signature::new(dims, &[FiberUp, TimeDown]);
        let want_n = Signature::new(dims, &[FiberUp, SpaceDown]);
        if *m.signature() != want_m || *n.signature() != want_n {
            return Err(Error::Dimension(format!(
                "nonlinear connection signatures {} / {} (expected {want_m} / {want_n})",
                m.signature(),
                n.signature()
            )));
        }
        Ok(NonlinearConnection { m, n })
    }

    pub fn zero(dims: Dims) -> Self {
        NonlinearConnection {
            m: DTensor::zero(Signature::new(dims, &[FiberUp, TimeDown])),
            n: DTensor::zero(Signature::new(dims, &[FiberUp, SpaceDown])),
        }
    }

    pub fn dims(&self) -> Dims {
        self.m.dims()
    }

    pub fn m(&self) -> &DTensor {
        &self.m
    }

    pub fn n(&self) -> &DTensor {
        &self.n
    }

    /// `δe/δt^α = ∂e/∂t^α − M^{(k)}_{(γ)α} ∂e/∂x^k_γ`
    pub fn delta_t(&self, e: &Expr, alpha: usize) -> Expr {
        self.adapted(e, Coord::Time(alpha), &self.m, alpha)
    }

    /// `δe/δx^i = ∂e/∂x^i − N^{(k)}_{(γ)i} ∂e/∂x^k_γ`
    pub fn delta_x(&self, e: &Expr, i: usize) -> Expr {
        self.adapted(e, Coord::Space(i), &self.n, i)
    }

    fn adapted(&self, e: &Expr, c: Coord, coef: &DTensor, slot: usize) -> Expr {
        let dims = self.dims();
        let mut out = e.diff(c);
        for k in 0..dims.n {
            for g in 0..dims.p {
                let f = dims.fiber(k, g);
                let m = coef.get(&[f, slot]);
                if m.is_zero() {
                    continue;
                }
                let dv = e.diff(Coord::Fiber { i: k, a: g });
                if !dv.is_zero() {
                    out = out.sub(&m.mul(&dv));
                }
            }
        }
        out
    }
}

/// Direction of an adapted derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adapted {
    /// `δ/δt^α`
    Time(usize),
    /// `δ/δx^i`
    Space(usize),
}

/// Adapted derivative of a scalar along `δ/δt^α` or `δ/δx^i`.
pub fn adapted_derivative(nc: &NonlinearConnection, e: &Expr, which: Adapted) -> Expr {
    match which {
        Adapted::Time(a) => nc.delta_t(e, a),
        Adapted::Space(i) => nc.delta_x(e, i),
    }
}

/// The canonical nonlinear connection of a metric pair:
/// `M^{(j)}_{(β)α} = −H^γ_{αβ} x^j_γ`, `N^{(j)}_{(β)i} = γ^j_{ik} x^k_β`.
pub fn canonical_nonlinear(h: &Metric, phi: &Metric) -> Result<NonlinearConnection> {
    check_pair(h, phi)?;
    let dims = h.jet_dims();
    let hc = christoffel(h);
    let gc = christoffel(phi);
    let m = DTensor::from_fn(Signature::new(dims, &[FiberUp, TimeDown]), |idx| {
        let (j, b) = dims.fiber_parts(idx[0]);
        let a = idx[1];
        Expr::sum((0..dims.p).map(|g| hc.get(&[g, a, b]).mul(&Expr::v(j, g)))).neg()
    });
    let n = DTensor::from_fn(Signature::new(dims, &[FiberUp, SpaceDown]), |idx| {
        let (j, b) = dims.fiber_parts(idx[0]);
        let i = idx[1];
        Expr::sum((0..dims.n).map(|k| gc.get(&[j, i, k]).mul(&Expr::v(k, b))))
    });
    Ok(NonlinearConnection { m, n })
}

fn check_pair(h: &Metric, phi: &Metric) -> Result<()> {
    if h.kind() != MetricKind::Temporal || phi.kind() != MetricKind::Spatial {
        return Err(Error::Dimension("expected a (temporal, spatial) metric pair".into()));
    }
    if h.jet_dims() != phi.jet_dims() {
        return Err(Error::Dimension(format!(
            "metric dims differ: {:?} vs {:?}",
            h.jet_dims(),
            phi.jet_dims()
        )));
    }
    Ok(())
}

/// The four effective coefficients `(H, G, L, C)` of an h-normal
/// Γ-linear connection.
#[derive(Debug, Clone)]
pub struct HNormalSpec {
    /// `H^γ_{αβ}`, signature `[TU, TL, TL]`.
    pub h: DTensor,
    /// `G^k_{iγ}`, signature `[SU, SL, TL]`.
    pub g: DTensor,
    /// `L^k_{ij}`, signature `[SU, SL, SL]`.
    pub l: DTensor,
    /// `C^{k(γ)}_{i(j)}`, signature `[SU, SL, FC (j,γ)]`.
    pub c: DTensor,
}

impl HNormalSpec {
    pub fn dims(&self) -> Dims {
        self.h.dims()
    }

    pub fn check(&self) -> Result<()> {
        let dims = self.dims();
        let expect = [
            ("H", &self.h, Signature::new(dims, &[TimeUp, TimeDown, TimeDown])),
            ("G", &self.g, Signature::new(dims, &[SpaceUp, SpaceDown, TimeDown])),
            ("L", &self.l, Signature::new(dims, &[SpaceUp, SpaceDown, SpaceDown])),
            ("C", &self.c, Signature::new(dims, &[SpaceUp, SpaceDown, FiberDown])),
        ];
        for (name, t, want) in expect {
            if *t.signature() != want {
                return Err(Error::Dimension(format!(
                    "{name} has signature {} over {:?}, expected {want} over {dims:?}",
                    t.signature(),
                    t.dims()
                )));
            }
        }
        Ok(())
    }

    /// Coefficients of the Berwald connection `(H, 0, γ, 0)` of a metric pair.
    pub fn berwald(h: &Metric, phi: &Metric) -> Result<Self> {
        check_pair(h, phi)?;
        let dims = h.jet_dims();
        Ok(HNormalSpec {
            h: christoffel(h),
            g: DTensor::zero(Signature::new(dims, &[SpaceUp, SpaceDown, TimeDown])),
            l: christoffel(phi),
            c: DTensor::zero(Signature::new(dims, &[SpaceUp, SpaceDown, FiberDown])),
        })
    }
}

/// The nine coefficient families of a Γ-linear connection over a nonlinear
/// connection. Torsion and curvature are computed on first use and cached.
#[derive(Debug)]
pub struct GammaConnection {
    nc: NonlinearConnection,
    /// `Ḡ^α_{βγ}`: `[TU, TL, TL]`
    pub g_bar: DTensor,
    /// `G^k_{iγ}`: `[SU, SL, TL]`
    pub g: DTensor,
    /// `G^{(k)(β)}_{(α)(i)γ}`: `[FU (k,α), FC (β,i), TL γ]`
    pub g_fib: DTensor,
    /// `L̄^α_{βj}`: `[TU, TL, SL]`
    pub l_bar: DTensor,
    /// `L^k_{ij}`: `[SU, SL, SL]`
    pub l: DTensor,
    /// `L^{(k)(β)}_{(α)(i)j}`: `[FU, FC, SL]`
    pub l_fib: DTensor,
    /// `C̄^{α(γ)}_{β(k)}`: `[TU, TL, FC]`
    pub c_bar: DTensor,
    /// `C^{k(γ)}_{i(j)}`: `[SU, SL, FC]`
    pub c: DTensor,
    /// `C^{(k)(β)(γ)}_{(α)(i)(j)}`: `[FU, FC, FC]`
    pub c_fib: DTensor,
    spec: Option<HNormalSpec>,
    pub(crate) torsion: OnceLock<TorsionSet>,
    pub(crate) curvature: OnceLock<CurvatureSet>,
}

impl Clone for GammaConnection {
    fn clone(&self) -> Self {
        GammaConnection {
            nc: self.nc.clone(),
            g_bar: self.g_bar.clone(),
            g: self.g.clone(),
            g_fib: self.g_fib.clone(),
            l_bar: self.l_bar.clone(),
            l: self.l.clone(),
            l_fib: self.l_fib.clone(),
            c_bar: self.c_bar.clone(),
            c: self.c.clone(),
            c_fib: self.c_fib.clone(),
            spec: self.spec.clone(),
            torsion: OnceLock::new(),
            curvature: OnceLock::new(),
        }
    }
}

/// The nine families in the order `Ḡ, G, G-block, L̄, L, L-block, C̄, C, C-block`.
pub type Families = [DTensor; 9];

impl GammaConnection {
    /// A general Γ-linear connection from its nine families.
    pub fn general(families: Families, nc: NonlinearConnection) -> Result<Self> {
        let dims = nc.dims();
        let expected = family_signatures(dims);
        for (k, (t, want)) in families.iter().zip(&expected).enumerate() {
            if t.signature() != want {
                return Err(Error::Dimension(format!(
                    "family {k} has signature {} over {:?}, expected {want} over {dims:?}",
                    t.signature(),
                    t.dims()
                )));
            }
        }
        let [g_bar, g, g_fib, l_bar, l, l_fib, c_bar, c, c_fib] = families;
        Ok(GammaConnection {
            nc,
            g_bar,
            g,
            g_fib,
            l_bar,
            l,
            l_fib,
            c_bar,
            c,
            c_fib,
            spec: None,
            torsion: OnceLock::new(),
            curvature: OnceLock::new(),
        })
    }

    pub fn dims(&self) -> Dims {
        self.nc.dims()
    }

    pub fn nonlinear(&self) -> &NonlinearConnection {
        &self.nc
    }

    /// The four effective coefficients, for connections built by
    /// [`build_hnormal`].
    pub fn hnormal_spec(&self) -> Option<&HNormalSpec> {
        self.spec.as_ref()
    }

    /// Cached torsion d-tensors.
    pub fn torsion(&self) -> &TorsionSet {
        self.torsion
            .get_or_init(|| crate::tensors::torsion_set(self, &self.nc))
    }

    /// Cached curvature d-tensors.
    pub fn curvature(&self) -> &CurvatureSet {
        self.curvature
            .get_or_init(|| crate::tensors::curvature_set(self, &self.nc, self.torsion()))
    }
}

fn family_signatures(dims: Dims) -> [Signature; 9] {
    let s = |slots: &[SlotKind]| Signature::new(dims, slots);
    [
        s(&[TimeUp, TimeDown, TimeDown]),
        s(&[SpaceUp, SpaceDown, TimeDown]),
        s(&[FiberUp, FiberDown, TimeDown]),
        s(&[TimeUp, TimeDown, SpaceDown]),
        s(&[SpaceUp, SpaceDown, SpaceDown]),
        s(&[FiberUp, FiberDown, SpaceDown]),
        s(&[TimeUp, TimeDown, FiberDown]),
        s(&[SpaceUp, SpaceDown, FiberDown]),
        s(&[FiberUp, FiberDown, FiberDown]),
    ]
}

/// Builds the h-normal Γ-linear connection with effective coefficients
/// `spec` over `nc`:
/// `Ḡ = H`, `L̄ = 0`, `C̄ = 0`,
/// `G^{(k)(β)}_{(α)(i)γ} = δ^β_α G^k_{iγ} − δ^k_i H^β_{αγ}`,
/// `L^{(k)(β)}_{(α)(i)j} = δ^β_α L^k_{ij}`,
/// `C^{(k)(β)(γ)}_{(α)(i)(j)} = δ^β_α C^{k(γ)}_{i(j)}`.
pub fn build_hnormal(spec: &HNormalSpec, nc: &NonlinearConnection) -> Result<GammaConnection> {
    spec.check()?;
    let dims = spec.dims();
    if nc.dims() != dims {
        return Err(Error::Dimension(format!(
            "connection coefficients over {dims:?} but nonlinear connection over {:?}",
            nc.dims()
        )));
    }
    let sigs = family_signatures(dims);
    // split a fiber-up (k,α) and fiber-down (β,i) pair
    let parts = |up: usize, down: usize| {
        let (k, a) = dims.fiber_parts(up);
        let (i, b) = dims.fiber_parts(down);
        (k, a, i, b)
    };
    let g_fib = DTensor::from_fn(sigs[2].clone(), |idx| {
        let (k, a, i, b) = parts(idx[0], idx[1]);
        let g = idx[2];
        let first = if a == b { spec.g.get(&[k, i, g]).clone() } else { Expr::zero() };
        if k == i {
            first.sub(spec.h.get(&[b, a, g]))
        } else {
            first
        }
    });
    let l_fib = DTensor::from_fn(sigs[5].clone(), |idx| {
        let (k, a, i, b) = parts(idx[0], idx[1]);
        if a == b {
            spec.l.get(&[k, i, idx[2]]).clone()
        } else {
            Expr::zero()
        }
    });
    let c_fib = DTensor::from_fn(sigs[8].clone(), |idx| {
        let (k, a, i, b) = parts(idx[0], idx[1]);
        if a == b {
            spec.c.get(&[k, i, idx[2]]).clone()
        } else {
            Expr::zero()
        }
    });
    let mut conn = GammaConnection::general(
        [
            spec.h.clone(),
            spec.g.clone(),
            g_fib,
            DTensor::zero(sigs[3].clone()),
            spec.l.clone(),
            l_fib,
            DTensor::zero(sigs[6].clone()),
            spec.c.clone(),
            c_fib,
        ],
        nc.clone(),
    )?;
    conn.spec = Some(spec.clone());
    Ok(conn)
}

/// The Berwald connection of a metric pair over its canonical nonlinear
/// connection.
pub fn berwald(h: &Metric, phi: &Metric) -> Result<(GammaConnection, NonlinearConnection)> {
    let nc = canonical_nonlinear(h, phi)?;
    let spec = HNormalSpec::berwald(h, phi)?;
    let conn = build_hnormal(&spec, &nc)?;
    Ok((conn, nc))
}

/// First failure of the Cartan-type conditions `L^i_{jk} = L^i_{kj}` and
/// `C^{i(γ)}_{j(k)} = C^{i(γ)}_{k(j)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CartanViolation {
    pub family: &'static str,
    /// 1-based `(i, j, k)` and, for `C`, the temporal index `γ`.
    pub indices: Vec<usize>,
    pub residual: f64,
    pub point: Point,
}

impl std::fmt::Display for CartanViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} not symmetric at indices {:?}: residual {:.3e} at t={:?} x={:?} v={:?}",
            self.family, self.indices, self.residual, self.point.t, self.point.x, self.point.v
        )
    }
}

/// Residual threshold for the Cartan-type symmetry checks.
pub const CARTAN_TOLERANCE: f64 = 1e-10;

pub fn cartan_violation(spec: &HNormalSpec, points: &[Point]) -> Result<Option<CartanViolation>> {
    spec.check()?;
    symmetry_violation(&spec.l, &spec.c, points)
}

/// [`cartan_violation`] for the `L`, `C` families of any connection.
pub fn symmetry_violation(l: &DTensor, c: &DTensor, points: &[Point]) -> Result<Option<CartanViolation>> {
    let dims = l.dims();
    for q in points {
        let mut ev = Evaluator::new(q);
        for i in 0..dims.n {
            for j in 0..dims.n {
                for k in (j + 1)..dims.n {
                    let r = (ev.eval(l.get(&[i, j, k]))? - ev.eval(l.get(&[i, k, j]))?).abs();
                    if r >= CARTAN_TOLERANCE {
                        return Ok(Some(CartanViolation {
                            family: "L",
                            indices: vec![i + 1, j + 1, k + 1],
                            residual: r,
                            point: q.clone(),
                        }));
                    }
                    for g in 0..dims.p {
                        let a = c.get(&[i, j, dims.fiber(k, g)]);
                        let b = c.get(&[i, k, dims.fiber(j, g)]);
                        let r = (ev.eval(a)? - ev.eval(b)?).abs();
                        if r >= CARTAN_TOLERANCE {
                            return Ok(Some(CartanViolation {
                                family: "C",
                                indices: vec![i + 1, j + 1, k + 1, g + 1],
                                residual: r,
                                point: q.clone(),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Whether `spec` is of Cartan type at every sample point.
pub fn is_cartan_type(spec: &HNormalSpec, points: &[Point]) -> Result<bool> {
    Ok(cartan_violation(spec, points)?.is_none())
}
