//! Torsion, curvature and deflection d-tensors of an h-normal Γ-linear
//! connection, built from their closed forms.
//!
//! Storage conventions (0-based, fiber pairs combined as in [`Dims::fiber`]):
//!
//! | family                          | signature          | index order          |
//! |---------------------------------|--------------------|----------------------|
//! | `T^m_{αj}`                      | `[SU, TL, SL]`     | `m, α, j`            |
//! | `T^m_{ij}`                      | `[SU, SL, SL]`     | `m, i, j`            |
//! | `P^{m(β)}_{i(j)}`               | `[SU, SL, FC]`     | `m, i, (β,j)`        |
//! | `R^{(m)}_{(μ)αβ}`               | `[FU, TL, TL]`     | `(m,μ), α, β`        |
//! | `R^{(m)}_{(μ)αj}`               | `[FU, TL, SL]`     | `(m,μ), α, j`        |
//! | `R^{(m)}_{(μ)ij}`               | `[FU, SL, SL]`     | `(m,μ), i, j`        |
//! | `P^{(m)(β)}_{(μ)α(j)}`          | `[FU, TL, FC]`     | `(m,μ), α, (β,j)`    |
//! | `P^{(m)(β)}_{(μ)i(j)}`          | `[FU, SL, FC]`     | `(m,μ), i, (β,j)`    |
//! | `S^{(m)(α)(β)}_{(μ)(i)(j)}`     | `[FU, FC, FC]`     | `(m,μ), (α,i), (β,j)`|
//!
//! Curvature families carry the result index first, then the transported
//! index, then the two directions, e.g. `R^l_{iβk}` is `[SU, SL, TL, SL]`
//! and `P^{l(γ)}_{iβ(k)}` is `[SU, SL, TL, FC]`.

use crate::covderiv::{cd_spatial, cd_temporal, cd_vertical};
use crate::dtensor::{liouville, DTensor, Signature, SlotKind};
use crate::expr::{Coord, Dims, Expr};
use crate::geometry::{christoffel, metric_curvature, GammaConnection, Metric, NonlinearConnection};

use SlotKind::*;

/// The nine torsion d-tensors, named after their cell in the torsion table
/// (row of the pair of arguments, column of the output component).
#[derive(Debug, Clone)]
pub struct TorsionSet {
    /// `T^m_{αj} = −G^m_{jα}`
    pub t_tx: DTensor,
    /// `T^m_{ij} = L^m_{ij} − L^m_{ji}`
    pub t_xx: DTensor,
    /// `P^{m(β)}_{i(j)} = C^{m(β)}_{i(j)}`
    pub p_xv: DTensor,
    /// `R^{(m)}_{(μ)αβ}`
    pub r_tt: DTensor,
    /// `R^{(m)}_{(μ)αj}`
    pub r_tx: DTensor,
    /// `R^{(m)}_{(μ)ij}`
    pub r_xx: DTensor,
    /// `P^{(m)(β)}_{(μ)α(j)}`
    pub p_t: DTensor,
    /// `P^{(m)(β)}_{(μ)i(j)}`
    pub p_x: DTensor,
    /// `S^{(m)(α)(β)}_{(μ)(i)(j)}`
    pub s: DTensor,
}

impl TorsionSet {
    /// Stable identifiers and tensors, in table order.
    pub fn families(&self) -> [(&'static str, &DTensor); 9] {
        [
            ("hThT.v", &self.r_tt),
            ("hMhT.hM", &self.t_tx),
            ("hMhT.v", &self.r_tx),
            ("hMhM.hM", &self.t_xx),
            ("hMhM.v", &self.r_xx),
            ("vhT.v", &self.p_t),
            ("vhM.hM", &self.p_xv),
            ("vhM.v", &self.p_x),
            ("vv.v", &self.s),
        ]
    }
}

/// The seven curvature d-tensors and their fiber blocks.
#[derive(Debug, Clone)]
pub struct CurvatureSet {
    /// `H^α_{ηβγ}`
    pub h: DTensor,
    /// `R^l_{iβγ}`
    pub r_tt: DTensor,
    /// `R^l_{iβk}`
    pub r_tx: DTensor,
    /// `R^l_{ijk}`
    pub r_xx: DTensor,
    /// `P^{l(γ)}_{iβ(k)}`
    pub p_t: DTensor,
    /// `P^{l(γ)}_{ij(k)}`
    pub p_x: DTensor,
    /// `S^{l(β)(γ)}_{i(j)(k)}`
    pub s: DTensor,
    /// `R^{(l)(α)}_{(η)(i)βγ} = δ^α_η R^l_{iβγ} + δ^l_i H^α_{ηβγ}`: `[FU, FC, TL, TL]`
    pub v_r_tt: DTensor,
    /// `δ^α_η R^l_{iβk}`: `[FU, FC, TL, SL]`
    pub v_r_tx: DTensor,
    /// `δ^α_η R^l_{ijk}`: `[FU, FC, SL, SL]`
    pub v_r_xx: DTensor,
    /// `δ^α_η P^{l(γ)}_{iβ(k)}`: `[FU, FC, TL, FC]`
    pub v_p_t: DTensor,
    /// `δ^α_η P^{l(γ)}_{ij(k)}`: `[FU, FC, SL, FC]`
    pub v_p_x: DTensor,
    /// `δ^α_η S^{l(β)(γ)}_{i(j)(k)}`: `[FU, FC, FC, FC]`
    pub v_s: DTensor,
}

impl CurvatureSet {
    /// The seven effective families, in table order.
    pub fn families(&self) -> [(&'static str, &DTensor); 7] {
        [
            ("hThT.hT", &self.h),
            ("hThT.hM", &self.r_tt),
            ("hMhT.hM", &self.r_tx),
            ("hMhM.hM", &self.r_xx),
            ("vhT.hM", &self.p_t),
            ("vhM.hM", &self.p_x),
            ("vv.hM", &self.s),
        ]
    }

    /// The six fiber blocks, in table order.
    pub fn fiber_blocks(&self) -> [(&'static str, &DTensor); 6] {
        [
            ("hThT.v", &self.v_r_tt),
            ("hMhT.v", &self.v_r_tx),
            ("hMhM.v", &self.v_r_xx),
            ("vhT.v", &self.v_p_t),
            ("vhM.v", &self.v_p_x),
            ("vv.v", &self.v_s),
        ]
    }
}

/// Deflection d-tensors `D̄^{(i)}_{(α)β}` `[FU, TL]`, `D^{(i)}_{(α)k}` `[FU, SL]`
/// and `d^{(i)(γ)}_{(α)(k)}` `[FU, FC]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflectionSet {
    pub d_bar: DTensor,
    pub d_x: DTensor,
    pub d_v: DTensor,
}

fn sig(dims: Dims, slots: &[SlotKind]) -> Signature {
    Signature::new(dims, slots)
}

/// Torsion d-tensors from the closed forms of an h-normal connection.
pub fn torsion_set(conn: &GammaConnection, nc: &NonlinearConnection) -> TorsionSet {
    let dims = conn.dims();
    let (m, n) = (nc.m(), nc.n());
    let fib = |f: usize| dims.fiber_parts(f);
    let vcoord = |f: usize| {
        let (j, b) = fib(f);
        Coord::Fiber { i: j, a: b }
    };

    let t_tx = DTensor::from_fn(sig(dims, &[SpaceUp, TimeDown, SpaceDown]), |ix| {
        conn.g.get(&[ix[0], ix[2], ix[1]]).neg()
    });
    let t_xx = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, SpaceDown]), |ix| {
        conn.l.get(&[ix[0], ix[1], ix[2]]).sub(conn.l.get(&[ix[0], ix[2], ix[1]]))
    });
    let p_xv = conn.c.clone();
    let r_tt = DTensor::from_fn(sig(dims, &[FiberUp, TimeDown, TimeDown]), |ix| {
        let (f, a, b) = (ix[0], ix[1], ix[2]);
        nc.delta_t(m.get(&[f, a]), b).sub(&nc.delta_t(m.get(&[f, b]), a))
    });
    let r_tx = DTensor::from_fn(sig(dims, &[FiberUp, TimeDown, SpaceDown]), |ix| {
        let (f, a, j) = (ix[0], ix[1], ix[2]);
        nc.delta_x(m.get(&[f, a]), j).sub(&nc.delta_t(n.get(&[f, j]), a))
    });
    let r_xx = DTensor::from_fn(sig(dims, &[FiberUp, SpaceDown, SpaceDown]), |ix| {
        let (f, i, j) = (ix[0], ix[1], ix[2]);
        nc.delta_x(n.get(&[f, i]), j).sub(&nc.delta_x(n.get(&[f, j]), i))
    });
    let p_t = DTensor::from_fn(sig(dims, &[FiberUp, TimeDown, FiberDown]), |ix| {
        let (f, a, g) = (ix[0], ix[1], ix[2]);
        let ((mm, mu), (j, b)) = (fib(f), fib(g));
        let mut e = m.get(&[f, a]).diff(vcoord(g));
        if b == mu {
            e = e.sub(conn.g.get(&[mm, j, a]));
        }
        if mm == j {
            e = e.add(conn.g_bar.get(&[b, mu, a]));
        }
        e
    });
    let p_x = DTensor::from_fn(sig(dims, &[FiberUp, SpaceDown, FiberDown]), |ix| {
        let (f, i, g) = (ix[0], ix[1], ix[2]);
        let ((mm, mu), (j, b)) = (fib(f), fib(g));
        let e = n.get(&[f, i]).diff(vcoord(g));
        if b == mu {
            e.sub(conn.l.get(&[mm, j, i]))
        } else {
            e
        }
    });
    let s = DTensor::from_fn(sig(dims, &[FiberUp, FiberDown, FiberDown]), |ix| {
        let ((mm, mu), (i, a), (j, b)) = (fib(ix[0]), fib(ix[1]), fib(ix[2]));
        let first = if a == mu { conn.c.get(&[mm, i, dims.fiber(j, b)]).clone() } else { Expr::zero() };
        if b == mu {
            first.sub(conn.c.get(&[mm, j, dims.fiber(i, a)]))
        } else {
            first
        }
    });
    TorsionSet {
        t_tx,
        t_xx,
        p_xv,
        r_tt,
        r_tx,
        r_xx,
        p_t,
        p_x,
        s,
    }
}

/// `Σ_{(m,μ)} C^{l(μ)}_{i(m)} · t[(m,μ), rest..]`
fn c_contract(conn: &GammaConnection, l: usize, i: usize, t: &DTensor, rest: &[usize]) -> Expr {
    let dims = conn.dims();
    let mut ix = Vec::with_capacity(rest.len() + 1);
    Expr::sum((0..dims.n * dims.p).filter_map(|f| {
        let c = conn.c.get(&[l, i, f]);
        if c.is_zero() {
            return None;
        }
        ix.clear();
        ix.push(f);
        ix.extend_from_slice(rest);
        let v = t.get(&ix);
        (!v.is_zero()).then(|| c.mul(v))
    }))
}

/// Curvature d-tensors from the closed forms of an h-normal connection.
pub fn curvature_set(conn: &GammaConnection, nc: &NonlinearConnection, tor: &TorsionSet) -> CurvatureSet {
    let dims = conn.dims();
    let (p, n) = (dims.p, dims.n);
    let (hh, g, l, c) = (&conn.g_bar, &conn.g, &conn.l, &conn.c);
    let fib = |f: usize| dims.fiber_parts(f);
    let vcoord = |f: usize| {
        let (j, b) = fib(f);
        Coord::Fiber { i: j, a: b }
    };

    let h = DTensor::from_fn(sig(dims, &[TimeUp, TimeDown, TimeDown, TimeDown]), |ix| {
        let (a, e, b, gm) = (ix[0], ix[1], ix[2], ix[3]);
        let lin = hh.get(&[a, e, b]).diff(Coord::Time(gm)).sub(&hh.get(&[a, e, gm]).diff(Coord::Time(b)));
        lin.add(&Expr::sum((0..p).map(|mu| {
            hh.get(&[mu, e, b]).mul(hh.get(&[a, mu, gm])).sub(&hh.get(&[mu, e, gm]).mul(hh.get(&[a, mu, b])))
        })))
    });
    let r_tt = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, TimeDown, TimeDown]), |ix| {
        let (lo, i, b, gm) = (ix[0], ix[1], ix[2], ix[3]);
        let lin = nc.delta_t(g.get(&[lo, i, b]), gm).sub(&nc.delta_t(g.get(&[lo, i, gm]), b));
        let quad = Expr::sum((0..n).map(|m| {
            g.get(&[m, i, b]).mul(g.get(&[lo, m, gm])).sub(&g.get(&[m, i, gm]).mul(g.get(&[lo, m, b])))
        }));
        lin.add(&quad).add(&c_contract(conn, lo, i, &tor.r_tt, &[b, gm]))
    });
    let r_tx = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, TimeDown, SpaceDown]), |ix| {
        let (lo, i, b, k) = (ix[0], ix[1], ix[2], ix[3]);
        let lin = nc.delta_x(g.get(&[lo, i, b]), k).sub(&nc.delta_t(l.get(&[lo, i, k]), b));
        let quad = Expr::sum((0..n).map(|m| {
            g.get(&[m, i, b]).mul(l.get(&[lo, m, k])).sub(&l.get(&[m, i, k]).mul(g.get(&[lo, m, b])))
        }));
        lin.add(&quad).add(&c_contract(conn, lo, i, &tor.r_tx, &[b, k]))
    });
    let r_xx = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, SpaceDown, SpaceDown]), |ix| {
        let (lo, i, j, k) = (ix[0], ix[1], ix[2], ix[3]);
        let lin = nc.delta_x(l.get(&[lo, i, j]), k).sub(&nc.delta_x(l.get(&[lo, i, k]), j));
        let quad = Expr::sum((0..n).map(|m| {
            l.get(&[m, i, j]).mul(l.get(&[lo, m, k])).sub(&l.get(&[m, i, k]).mul(l.get(&[lo, m, j])))
        }));
        lin.add(&quad).add(&c_contract(conn, lo, i, &tor.r_xx, &[j, k]))
    });
    // C as a d-tensor [SU, SL, FC]; its derivatives gain a trailing slot
    let c_t = cd_temporal(c, conn);
    let c_x = cd_spatial(c, conn);
    let p_t = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, TimeDown, FiberDown]), |ix| {
        let (lo, i, b, f) = (ix[0], ix[1], ix[2], ix[3]);
        g.get(&[lo, i, b])
            .diff(vcoord(f))
            .sub(c_t.get(&[lo, i, f, b]))
            .add(&c_contract(conn, lo, i, &tor.p_t, &[b, f]))
    });
    let p_x = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, SpaceDown, FiberDown]), |ix| {
        let (lo, i, j, f) = (ix[0], ix[1], ix[2], ix[3]);
        l.get(&[lo, i, j])
            .diff(vcoord(f))
            .sub(c_x.get(&[lo, i, f, j]))
            .add(&c_contract(conn, lo, i, &tor.p_x, &[j, f]))
    });
    let s = DTensor::from_fn(sig(dims, &[SpaceUp, SpaceDown, FiberDown, FiberDown]), |ix| {
        let (lo, i, fj, fk) = (ix[0], ix[1], ix[2], ix[3]);
        let lin = c.get(&[lo, i, fj]).diff(vcoord(fk)).sub(&c.get(&[lo, i, fk]).diff(vcoord(fj)));
        let quad = Expr::sum((0..n).map(|m| {
            c.get(&[m, i, fj])
                .mul(c.get(&[lo, m, fk]))
                .sub(&c.get(&[m, i, fk]).mul(c.get(&[lo, m, fj])))
        }));
        lin.add(&quad)
    });

    // fiber blocks: first slot (l,η), second slot (α,i)
    let block = |base: &DTensor, extra: &[SlotKind], with_h: bool| {
        let mut slots = vec![FiberUp, FiberDown];
        slots.extend_from_slice(extra);
        DTensor::from_fn(sig(dims, &slots), |ix| {
            let ((lo, eta), (i, a)) = (fib(ix[0]), fib(ix[1]));
            let mut rest = vec![lo, i];
            rest.extend_from_slice(&ix[2..]);
            let first = if a == eta { base.get(&rest).clone() } else { Expr::zero() };
            if with_h && lo == i {
                first.add(h.get(&[a, eta, ix[2], ix[3]]))
            } else {
                first
            }
        })
    };
    let v_r_tt = block(&r_tt, &[TimeDown, TimeDown], true);
    let v_r_tx = block(&r_tx, &[TimeDown, SpaceDown], false);
    let v_r_xx = block(&r_xx, &[SpaceDown, SpaceDown], false);
    let v_p_t = block(&p_t, &[TimeDown, FiberDown], false);
    let v_p_x = block(&p_x, &[SpaceDown, FiberDown], false);
    let v_s = block(&s, &[FiberDown, FiberDown], false);

    CurvatureSet {
        h,
        r_tt,
        r_tx,
        r_xx,
        p_t,
        p_x,
        s,
        v_r_tt,
        v_r_tx,
        v_r_xx,
        v_p_t,
        v_p_x,
        v_s,
    }
}

/// Deflection d-tensors from their closed forms:
/// `D̄ = −M + G^i_{mβ}x^m_α − H^μ_{αβ}x^i_μ`, `D = −N + L^i_{mj}x^m_α`,
/// `d = δ^i_j δ^β_α + C^{i(β)}_{m(j)} x^m_α`.
pub fn deflection_closed(conn: &GammaConnection, nc: &NonlinearConnection) -> DeflectionSet {
    let dims = conn.dims();
    let (p, n) = (dims.p, dims.n);
    let fib = |f: usize| dims.fiber_parts(f);
    let d_bar = DTensor::from_fn(sig(dims, &[FiberUp, TimeDown]), |ix| {
        let ((i, a), b) = (fib(ix[0]), ix[1]);
        let g = Expr::sum((0..n).map(|m| conn.g.get(&[i, m, b]).mul(&Expr::v(m, a))));
        let h = Expr::sum((0..p).map(|mu| conn.g_bar.get(&[mu, a, b]).mul(&Expr::v(i, mu))));
        nc.m().get(&[ix[0], b]).neg().add(&g).sub(&h)
    });
    let d_x = DTensor::from_fn(sig(dims, &[FiberUp, SpaceDown]), |ix| {
        let ((i, a), j) = (fib(ix[0]), ix[1]);
        let l = Expr::sum((0..n).map(|m| conn.l.get(&[i, m, j]).mul(&Expr::v(m, a))));
        nc.n().get(&[ix[0], j]).neg().add(&l)
    });
    let d_v = DTensor::from_fn(sig(dims, &[FiberUp, FiberDown]), |ix| {
        let ((i, a), (j, b)) = (fib(ix[0]), fib(ix[1]));
        let kron = if i == j && a == b { Expr::one() } else { Expr::zero() };
        let c = Expr::sum((0..n).map(|m| conn.c.get(&[i, m, dims.fiber(j, b)]).mul(&Expr::v(m, a))));
        kron.add(&c)
    });
    DeflectionSet { d_bar, d_x, d_v }
}

/// Deflection d-tensors as the three covariant derivatives of the Liouville
/// field.
pub fn deflection_direct(conn: &GammaConnection, _nc: &NonlinearConnection) -> DeflectionSet {
    let c = liouville(conn.dims());
    DeflectionSet {
        d_bar: cd_temporal(&c, conn),
        d_x: cd_spatial(&c, conn),
        d_v: cd_vertical(&c, conn),
    }
}

/// Torsion families of the Berwald connection as written in the closed form
/// `R^{(m)}_{(μ)αβ} = −H^γ_{μαβ} x^m_γ`, `R^{(m)}_{(μ)ij} = r^m_{ijl} x^l_μ`,
/// with `H`, `r` from [`metric_curvature`].
pub fn berwald_torsion_reference(h: &Metric, phi: &Metric) -> (DTensor, DTensor) {
    berwald_reference(h, phi, |r, m, i, j, l| r.get(&[m, i, j, l]).clone())
}

/// Same as [`berwald_torsion_reference`] but with the spatial curvature
/// contracted on its second index, `R^{(m)}_{(μ)ij} = r^m_{lij} x^l_μ`, which
/// is what the definition of `R^{(m)}_{(μ)ij}` produces for the canonical
/// nonlinear connection.
pub fn berwald_torsion_reference_transposed(h: &Metric, phi: &Metric) -> (DTensor, DTensor) {
    berwald_reference(h, phi, |r, m, i, j, l| r.get(&[m, l, i, j]).clone())
}

fn berwald_reference(
    h: &Metric,
    phi: &Metric,
    r_component: impl Fn(&DTensor, usize, usize, usize, usize) -> Expr,
) -> (DTensor, DTensor) {
    let dims = h.jet_dims();
    let hc = metric_curvature(h, &christoffel(h));
    let rc = metric_curvature(phi, &christoffel(phi));
    let r_tt = DTensor::from_fn(sig(dims, &[FiberUp, TimeDown, TimeDown]), |ix| {
        let ((m, mu), a, b) = (dims.fiber_parts(ix[0]), ix[1], ix[2]);
        Expr::sum((0..dims.p).map(|g| hc.get(&[g, mu, a, b]).mul(&Expr::v(m, g)))).neg()
    });
    let r_xx = DTensor::from_fn(sig(dims, &[FiberUp, SpaceDown, SpaceDown]), |ix| {
        let ((m, mu), i, j) = (dims.fiber_parts(ix[0]), ix[1], ix[2]);
        Expr::sum((0..dims.n).map(|l| r_component(&rc, m, i, j, l).mul(&Expr::v(l, mu))))
    });
    (r_tt, r_xx)
}
