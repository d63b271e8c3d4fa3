//! Seeded generators for test connections, d-vector fields and sample points.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dtensor::{DTensor, Signature, SlotKind};
use crate::expr::{Coord, Dims, Expr, Point};
use crate::geometry::{christoffel, HNormalSpec, Metric, MetricKind};
use crate::identities::DVectorField;

/// The generator used everywhere a seed is accepted.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coef(rng: &mut impl Rng) -> Expr {
    Expr::constant(rng.gen_range(-1.0..=1.0))
}

/// A polynomial of degree at most `degree` in all jet coordinates: a random
/// constant plus `terms` monomials with distinct random factors, every
/// coefficient uniform in `[−1, 1]`.
pub fn polynomial(dims: Dims, degree: u32, terms: usize, rng: &mut impl Rng) -> Expr {
    let coords = dims.coords();
    let mut out = vec![coef(rng)];
    for _ in 0..terms {
        let deg = rng.gen_range(1..=degree.max(1));
        let mut mono = coef(rng);
        for _ in 0..deg {
            let c = *coords.choose(rng).expect("at least one coordinate");
            mono = mono.mul(&Expr::var(c));
        }
        out.push(mono);
    }
    Expr::sum(out)
}

/// A curved metric of the given kind, positive definite on `[−1, 1]`
/// boxes: diagonal entries `exp(c·y)` with `|c| ≤ 0.4`, off-diagonal
/// entries `0.1·c·y` with `|c| ≤ 1`, where `y` is a random coordinate of the
/// matching kind (temporal metrics depend on `t` only, spatial on `x` only).
pub fn curved_metric(kind: MetricKind, dims: Dims, rng: &mut impl Rng) -> Metric {
    let k = match kind {
        MetricKind::Temporal => dims.p,
        MetricKind::Spatial => dims.n,
    };
    let var = |rng: &mut dyn rand::RngCore| {
        let j = rng.gen_range(0..k);
        match kind {
            MetricKind::Temporal => Expr::t(j),
            MetricKind::Spatial => Expr::x(j),
        }
    };
    let mut g = vec![vec![Expr::zero(); k]; k];
    for a in 0..k {
        let c = rng.gen_range(-0.4..=0.4);
        g[a][a] = Expr::constant(c).mul(&var(rng)).exp();
        for b in 0..a {
            let c = rng.gen_range(-1.0..=1.0) * 0.1;
            let e = Expr::constant(c).mul(&var(rng));
            g[a][b] = e.clone();
            g[b][a] = e;
        }
    }
    Metric::new(kind, dims, g).expect("generated metric is well formed")
}

fn coefficients(h: &Metric, terms: usize, cartan: bool, rng: &mut impl Rng) -> HNormalSpec {
    let dims = h.jet_dims();
    let (p, n) = (dims.p, dims.n);
    let sig = |slots: &[SlotKind]| Signature::new(dims, slots);
    use SlotKind::*;

    let g = DTensor::from_fn(sig(&[SpaceUp, SpaceDown, TimeDown]), |_| polynomial(dims, 2, terms, rng));

    let mut l = vec![Expr::zero(); n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if cartan && k < j {
                    l[(i * n + j) * n + k] = l[(i * n + k) * n + j].clone();
                } else {
                    l[(i * n + j) * n + k] = polynomial(dims, 2, terms, rng);
                }
            }
        }
    }
    let l = DTensor::from_components(sig(&[SpaceUp, SpaceDown, SpaceDown]), l).expect("grid size");

    let csig = sig(&[SpaceUp, SpaceDown, FiberDown]);
    let mut c = vec![Expr::zero(); csig.size()];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for gm in 0..p {
                    let at = csig.offset(&[i, j, dims.fiber(k, gm)]);
                    c[at] = if cartan && k < j {
                        c[csig.offset(&[i, k, dims.fiber(j, gm)])].clone()
                    } else {
                        polynomial(dims, 2, terms, rng)
                    };
                }
            }
        }
    }
    let c = DTensor::from_components(csig, c).expect("grid size");

    HNormalSpec {
        h: christoffel(h),
        g,
        l,
        c,
    }
}

/// Random effective coefficients `(H, G, L, C)` of Cartan type over the
/// temporal metric `h`: `H` are the Christoffel symbols of `h`; `G`, `L`, `C`
/// are degree-2 polynomials, with `L^i_{jk} = L^i_{kj}` and
/// `C^{i(γ)}_{j(k)} = C^{i(γ)}_{k(j)}` enforced by copying.
pub fn cartan_spec(h: &Metric, terms: usize, rng: &mut impl Rng) -> HNormalSpec {
    coefficients(h, terms, true, rng)
}

/// Like [`cartan_spec`] without the symmetry constraints.
pub fn general_spec(h: &Metric, terms: usize, rng: &mut impl Rng) -> HNormalSpec {
    coefficients(h, terms, false, rng)
}

/// A random expression tree of depth at most `depth` over the coordinates
/// of `dims`, built from constants in `[−1, 1]`, sums, differences,
/// products, small integer powers and `sin`, `cos`, `exp`, `sinh`, `cosh`,
/// plus `log` and `sqrt` guarded as `log(1 + e²)` and `sqrt(1 + e²)` so the
/// result is defined everywhere.
pub fn expression(dims: Dims, depth: u32, rng: &mut impl Rng) -> Expr {
    if depth == 0 || rng.gen_bool(0.2) {
        return if rng.gen_bool(0.7) {
            Expr::var(coord(dims, rng))
        } else {
            coef(rng)
        };
    }
    let a = expression(dims, depth - 1, rng);
    match rng.gen_range(0..11) {
        0 => a.add(&expression(dims, depth - 1, rng)),
        1 => a.sub(&expression(dims, depth - 1, rng)),
        2 | 3 => a.mul(&expression(dims, depth - 1, rng)),
        4 => a.powi(rng.gen_range(2..=3)),
        5 => a.sin(),
        6 => a.cos(),
        7 => a.mul(&Expr::constant(0.5)).exp(),
        8 => a.mul(&Expr::constant(0.5)).sinh().add(&a.mul(&Expr::constant(0.5)).cosh()),
        9 => Expr::one().add(&a.powi(2)).ln(),
        _ => Expr::one().add(&a.powi(2)).sqrt(),
    }
}

/// A d-vector field whose components are random polynomials of the given
/// degree.
pub fn dvector_field(dims: Dims, degree: u32, terms: usize, rng: &mut impl Rng) -> DVectorField {
    let mut block =
        |slot: SlotKind| DTensor::from_fn(Signature::new(dims, &[slot]), |_| polynomial(dims, degree, terms, rng));
    DVectorField {
        time: block(SlotKind::TimeUp),
        space: block(SlotKind::SpaceUp),
        fiber: block(SlotKind::FiberUp),
    }
}

/// Ranges for uniform sampling of jet points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub t: Vec<(f64, f64)>,
    pub x: Vec<(f64, f64)>,
    pub v: (f64, f64),
}

impl SampleBox {
    /// The same range for every coordinate.
    pub fn uniform(dims: Dims, lo: f64, hi: f64) -> Self {
        SampleBox {
            t: vec![(lo, hi); dims.p],
            x: vec![(lo, hi); dims.n],
            v: (lo, hi),
        }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.t.len(), self.x.len())
    }
}

fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

/// `count` points drawn uniformly from `bx`, in a fixed coordinate order
/// (all `t`, then all `x`, then `v` row by row) so a seed fully determines
/// the sample.
pub fn sample_points(bx: &SampleBox, count: usize, rng: &mut impl Rng) -> Vec<Point> {
    let dims = bx.dims();
    (0..count)
        .map(|_| {
            let t = bx.t.iter().map(|&r| draw(rng, r)).collect();
            let x = bx.x.iter().map(|&r| draw(rng, r)).collect();
            let v = (0..dims.n).map(|_| (0..dims.p).map(|_| draw(rng, bx.v)).collect()).collect();
            Point::new(t, x, v)
        })
        .collect()
}

/// A random coordinate of `dims`.
pub fn coord(dims: Dims, rng: &mut impl Rng) -> Coord {
    *dims.coords().choose(rng).expect("at least one coordinate")
}
