#![allow(dead_code)]

use jetcalc::expr::evaluate;
use jetcalc::geometry::{build_hnormal, canonical_nonlinear};
use jetcalc::random::{cartan_spec, curved_metric, general_spec, rng, sample_points, SampleBox};
use jetcalc::{DTensor, Dims, GammaConnection, Metric, MetricKind, NonlinearConnection, Point};

pub fn metric(kind: MetricKind, dims: Dims, rows: &[&[&str]]) -> Metric {
    let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
    Metric::parse(kind, dims, &rows).unwrap()
}

/// `h = (1)` and the round metric `diag(1, sin²x¹)`.
pub fn sphere_pair() -> (Metric, Metric) {
    let d = Dims::new(1, 2);
    (
        metric(MetricKind::Temporal, d, &[&["1"]]),
        metric(MetricKind::Spatial, d, &[&["1", "0"], &["0", "sin(x1)^2"]]),
    )
}

/// `h = (exp(2t¹))` and the round metric.
pub fn exp_sphere_pair() -> (Metric, Metric) {
    let d = Dims::new(1, 2);
    (
        metric(MetricKind::Temporal, d, &[&["exp(2*t1)"]]),
        metric(MetricKind::Spatial, d, &[&["1", "0"], &["0", "sin(x1)^2"]]),
    )
}

pub fn sphere_box() -> SampleBox {
    SampleBox {
        t: vec![(-1.0, 1.0)],
        x: vec![(0.3, 2.8), (0.0, 6.0)],
        v: (-1.0, 1.0),
    }
}

pub fn points(dims: Dims, count: usize, seed: u64) -> Vec<Point> {
    sample_points(&SampleBox::uniform(dims, -1.0, 1.0), count, &mut rng(seed))
}

pub fn curved_pair(dims: Dims, seed: u64) -> (Metric, Metric) {
    let mut r = rng(seed);
    (
        curved_metric(MetricKind::Temporal, dims, &mut r),
        curved_metric(MetricKind::Spatial, dims, &mut r),
    )
}

/// A random Cartan-type h-normal connection over a curved metric pair.
pub fn random_cartan(dims: Dims, seed: u64) -> (GammaConnection, NonlinearConnection) {
    let (h, phi) = curved_pair(dims, seed);
    let spec = cartan_spec(&h, 3, &mut rng(seed ^ 0x5eed));
    let nc = canonical_nonlinear(&h, &phi).unwrap();
    (build_hnormal(&spec, &nc).unwrap(), nc)
}

/// A random h-normal connection without symmetry constraints.
pub fn random_general(dims: Dims, seed: u64) -> (GammaConnection, NonlinearConnection, Metric) {
    let (h, phi) = curved_pair(dims, seed);
    let spec = general_spec(&h, 3, &mut rng(seed ^ 0x5eed));
    let nc = canonical_nonlinear(&h, &phi).unwrap();
    (build_hnormal(&spec, &nc).unwrap(), nc, h)
}

/// Largest componentwise difference of two tensors of the same signature
/// over the given points.
pub fn max_diff(a: &DTensor, b: &DTensor, pts: &[Point]) -> f64 {
    assert_eq!(a.signature(), b.signature());
    let mut worst: f64 = 0.0;
    for q in pts {
        for (x, y) in a.components().iter().zip(b.components()) {
            let d = (evaluate(x, q).unwrap() - evaluate(y, q).unwrap()).abs();
            worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
        }
    }
    worst
}

pub fn max_abs(a: &DTensor, pts: &[Point]) -> f64 {
    let mut worst: f64 = 0.0;
    for q in pts {
        for x in a.components() {
            let v = evaluate(x, q).unwrap().abs();
            worst = worst.max(if v.is_nan() { f64::INFINITY } else { v });
        }
    }
    worst
}

/// Inverse of a small dense matrix by Gauss-Jordan elimination with partial
/// pivoting.
pub fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs())).unwrap();
        a.swap(c, piv);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != c {
                let f = a[r][c];
                let row_c = a[c].clone();
                for (v, w) in a[r].iter_mut().zip(row_c) {
                    *v -= f * w;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}
