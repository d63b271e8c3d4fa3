//! Manifest-driven pipeline: metrics and connection from a JSON manifest,
//! seeded sampling, the requested identity suites, and a deterministic
//! JSON report.
//!
//! Exit codes: 0 all entries pass, 1 some entry fails, 2 manifest or
//! expression errors, 3 singular metric (or an expression undefined) at a
//! sampled point, 4 connection not of Cartan type, 5 I/O.

use std::fmt::Write as _;

use jetcalc::expr::parse;
use jetcalc::geometry::{build_hnormal, canonical_nonlinear, christoffel};
use jetcalc::identities::{
    bianchi_suite, curvature_check, deflection_suite, ricci_suite, torsion_check, DVectorField, IdentityReport,
    DEFAULT_TOLERANCE,
};
use jetcalc::random::{rng, sample_points, SampleBox};
use jetcalc::{DTensor, Dims, Error, Expr, GammaConnection, HNormalSpec, Metric, MetricKind, NonlinearConnection, Point, Signature, SlotKind};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Manifest(_) => 2,
            CliError::Core(e) => match e {
                Error::Parse(_)
                | Error::Dimension(_)
                | Error::InvalidDims { .. }
                | Error::AsymmetricMetric(_)
                | Error::MetricDependence(_) => 2,
                Error::SingularMetric(_) | Error::Eval(_) => 3,
                Error::NotCartan(_) => 4,
            },
            CliError::Io { .. } => 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestDims {
    pub p: usize,
    pub n: usize,
}

/// Explicit effective coefficients. Layouts: `G[i][j][α]` for
/// `G^i_{jα}`, `L[i][j][k]` for `L^i_{jk}`, `C[i][j][k][γ]` for
/// `C^{i(γ)}_{j(k)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplicitConnection {
    #[serde(rename = "G")]
    pub g: Vec<Vec<Vec<String>>>,
    #[serde(rename = "L")]
    pub l: Vec<Vec<Vec<String>>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConnectionSpec {
    Named(String),
    Explicit(ExplicitConnection),
}

fn default_v_range() -> [f64; 2] {
    [-1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    pub count: usize,
    pub seed: u64,
    pub t_ranges: Vec<[f64; 2]>,
    pub x_ranges: Vec<[f64; 2]>,
    #[serde(default = "default_v_range")]
    pub v_range: [f64; 2],
}

/// `time[α]`, `space[i]`, `fiber[i][α]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFieldSpec {
    pub time: Vec<String>,
    pub space: Vec<String>,
    pub fiber: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    TorsionCheck,
    CurvatureCheck,
    Deflection,
    Ricci,
    Bianchi,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::TorsionCheck,
        Suite::CurvatureCheck,
        Suite::Deflection,
        Suite::Ricci,
        Suite::Bianchi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::TorsionCheck => "torsion_check",
            Suite::CurvatureCheck => "curvature_check",
            Suite::Deflection => "deflection",
            Suite::Ricci => "ricci",
            Suite::Bianchi => "bianchi",
        }
    }
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

fn default_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub dims: ManifestDims,
    pub h: Vec<Vec<String>>,
    pub phi: Vec<Vec<String>>,
    pub connection: ConnectionSpec,
    pub sampling: Sampling,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_suites")]
    pub suites: Vec<Suite>,
    #[serde(rename = "X", default)]
    pub x: Option<VectorFieldSpec>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Manifest(e.to_string()))
    }

    fn jet_dims(&self) -> Result<Dims, CliError> {
        let d = Dims::new(self.dims.p, self.dims.n);
        if !d.is_valid() {
            return Err(Error::InvalidDims { p: d.p, n: d.n }.into());
        }
        Ok(d)
    }

    /// Structural checks that need no expression parsing.
    pub fn validate(&self) -> Result<(), CliError> {
        let d = self.jet_dims()?;
        let s = &self.sampling;
        if s.count == 0 {
            return Err(CliError::Manifest("sampling.count must be at least 1".into()));
        }
        if s.t_ranges.len() != d.p || s.x_ranges.len() != d.n {
            return Err(CliError::Manifest(format!(
                "sampling needs {} t_ranges and {} x_ranges, got {} and {}",
                d.p,
                d.n,
                s.t_ranges.len(),
                s.x_ranges.len()
            )));
        }
        for r in s.t_ranges.iter().chain(&s.x_ranges).chain([&s.v_range]) {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                return Err(CliError::Manifest(format!("range {r:?} is empty or not finite")));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(CliError::Manifest(format!("tolerance {} must be positive", self.tolerance)));
        }
        if self.suites.contains(&Suite::Ricci) && self.x.is_none() {
            return Err(CliError::Manifest("suite \"ricci\" needs the d-vector field X".into()));
        }
        if let ConnectionSpec::Named(name) = &self.connection {
            if name != "berwald" {
                return Err(CliError::Manifest(format!(
                    "unknown connection \"{name}\"; use \"berwald\" or explicit {{G, L, C}}"
                )));
            }
        }
        Ok(())
    }
}

fn shape_error(what: &str, want: &[usize]) -> CliError {
    CliError::Manifest(format!("{what} must be a nested array of shape {want:?}"))
}

fn parse_grid<'a>(
    what: &str,
    dims: Dims,
    want: &[usize],
    items: impl Iterator<Item = Option<&'a String>>,
) -> Result<Vec<Expr>, CliError> {
    let mut out = Vec::new();
    for s in items {
        let s = s.ok_or_else(|| shape_error(what, want))?;
        out.push(parse(s, dims).map_err(Error::from)?);
    }
    Ok(out)
}

fn check_shape2(what: &str, g: &[Vec<String>], a: usize, b: usize) -> Result<(), CliError> {
    if g.len() != a || g.iter().any(|r| r.len() != b) {
        return Err(shape_error(what, &[a, b]));
    }
    Ok(())
}

fn check_shape3(what: &str, g: &[Vec<Vec<String>>], a: usize, b: usize, c: usize) -> Result<(), CliError> {
    if g.len() != a || g.iter().any(|r| r.len() != b || r.iter().any(|s| s.len() != c)) {
        return Err(shape_error(what, &[a, b, c]));
    }
    Ok(())
}

fn explicit_spec(e: &ExplicitConnection, h: &Metric) -> Result<HNormalSpec, CliError> {
    use SlotKind::*;
    let d = h.jet_dims();
    let (p, n) = (d.p, d.n);
    check_shape3("G", &e.g, n, n, p)?;
    check_shape3("L", &e.l, n, n, n)?;
    if e.c.len() != n || e.c.iter().any(|r| {
        r.len() != n || r.iter().any(|s| s.len() != n || s.iter().any(|t| t.len() != p))
    }) {
        return Err(shape_error("C", &[n, n, n, p]));
    }
    let g = parse_grid(
        "G",
        d,
        &[n, n, p],
        e.g.iter().flatten().flatten().map(Some),
    )?;
    let l = parse_grid("L", d, &[n, n, n], e.l.iter().flatten().flatten().map(Some))?;
    let csig = Signature::new(d, &[SpaceUp, SpaceDown, FiberDown]);
    let c = parse_grid(
        "C",
        d,
        &[n, n, n, p],
        csig.indices().map(|idx| {
            let (k, gm) = d.fiber_parts(idx[2]);
            Some(&e.c[idx[0]][idx[1]][k][gm])
        }),
    )?;
    Ok(HNormalSpec {
        h: christoffel(h),
        g: DTensor::from_components(Signature::new(d, &[SpaceUp, SpaceDown, TimeDown]), g)?,
        l: DTensor::from_components(Signature::new(d, &[SpaceUp, SpaceDown, SpaceDown]), l)?,
        c: DTensor::from_components(csig, c)?,
    })
}

fn vector_field(x: &VectorFieldSpec, d: Dims) -> Result<DVectorField, CliError> {
    if x.time.len() != d.p {
        return Err(shape_error("X.time", &[d.p]));
    }
    if x.space.len() != d.n {
        return Err(shape_error("X.space", &[d.n]));
    }
    check_shape2("X.fiber", &x.fiber, d.n, d.p)?;
    let block = |slot: SlotKind, items: Vec<&String>| -> Result<DTensor, CliError> {
        let comps = items
            .into_iter()
            .map(|s| parse(s, d).map_err(|e| CliError::Core(e.into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DTensor::from_components(Signature::new(d, &[slot]), comps)?)
    };
    Ok(DVectorField {
        time: block(SlotKind::TimeUp, x.time.iter().collect())?,
        space: block(SlotKind::SpaceUp, x.space.iter().collect())?,
        fiber: block(SlotKind::FiberUp, x.fiber.iter().flatten().collect())?,
    })
}

/// Everything built from a manifest before any suite runs.
pub struct Setup {
    pub dims: Dims,
    pub h: Metric,
    pub phi: Metric,
    pub nc: NonlinearConnection,
    pub conn: GammaConnection,
    pub x: Option<DVectorField>,
    pub points: Vec<Point>,
}

pub fn build(manifest: &Manifest) -> Result<Setup, CliError> {
    manifest.validate()?;
    let dims = manifest.jet_dims()?;
    check_shape2("h", &manifest.h, dims.p, dims.p)?;
    check_shape2("phi", &manifest.phi, dims.n, dims.n)?;
    let h = Metric::parse(MetricKind::Temporal, dims, &manifest.h)?;
    let phi = Metric::parse(MetricKind::Spatial, dims, &manifest.phi)?;
    let x = manifest.x.as_ref().map(|x| vector_field(x, dims)).transpose()?;
    let s = &manifest.sampling;
    let bx = SampleBox {
        t: s.t_ranges.iter().map(|r| (r[0], r[1])).collect(),
        x: s.x_ranges.iter().map(|r| (r[0], r[1])).collect(),
        v: (s.v_range[0], s.v_range[1]),
    };
    let points = sample_points(&bx, s.count, &mut rng(s.seed));
    h.validate_at(&points)?;
    phi.validate_at(&points)?;
    let nc = canonical_nonlinear(&h, &phi)?;
    let spec = match &manifest.connection {
        ConnectionSpec::Named(_) => HNormalSpec::berwald(&h, &phi)?,
        ConnectionSpec::Explicit(e) => explicit_spec(e, &h)?,
    };
    let conn = build_hnormal(&spec, &nc)?;
    Ok(Setup {
        dims,
        h,
        phi,
        nc,
        conn,
        x,
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntryRecord {
    pub suite: String,
    pub identity_id: String,
    pub max_residual: f64,
    pub raw_residual: f64,
    pub max_term: f64,
    pub worst_point: PointRecord,
    pub worst_indices: Vec<usize>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub manifest_hash: String,
    pub seed: u64,
    pub tolerance: f64,
    pub points_used: usize,
    pub entries: Vec<EntryRecord>,
    pub all_pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Fixed-width text table, one line per entry.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<16} {:<22} {:>12} {:>12}  status", "suite", "identity", "residual", "scale");
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<16} {:<22} {:>12.3e} {:>12.3e}  {}",
                e.suite,
                e.identity_id,
                e.max_residual,
                e.max_term,
                if e.pass { "pass" } else { "FAIL" }
            );
        }
        let failed = self.entries.iter().filter(|e| !e.pass).count();
        let _ = writeln!(
            out,
            "{} entries, {} failed, tolerance {:e}, {} points",
            self.entries.len(),
            failed,
            self.tolerance,
            self.points_used
        );
        out
    }
}

pub fn manifest_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Overrides applied on top of the manifest.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
}

/// Parses `text`, applies `ov`, builds the geometry and runs every requested
/// suite in the canonical order torsion, curvature, deflection, Ricci,
/// Bianchi.
pub fn run(text: &str, ov: Overrides) -> Result<Report, CliError> {
    let mut manifest = Manifest::from_json(text)?;
    if let Some(t) = ov.tolerance {
        manifest.tolerance = t;
    }
    if let Some(s) = ov.seed {
        manifest.sampling.seed = s;
    }
    let setup = build(&manifest)?;
    let mut suites = manifest.suites.clone();
    suites.sort();
    suites.dedup();
    let tol = manifest.tolerance;
    let (conn, nc, pts) = (&setup.conn, &setup.nc, &setup.points);
    let mut entries = Vec::new();
    for suite in suites {
        let report: IdentityReport = match suite {
            Suite::TorsionCheck => torsion_check(conn, nc, pts, tol)?,
            Suite::CurvatureCheck => curvature_check(conn, nc, pts, tol)?,
            Suite::Deflection => deflection_suite(conn, nc, pts, tol)?,
            Suite::Ricci => ricci_suite(conn, nc, setup.x.as_ref().expect("validated"), pts, tol)?,
            Suite::Bianchi => bianchi_suite(conn, nc, pts, tol)?,
        };
        entries.extend(report.entries.into_iter().map(|e| EntryRecord {
            suite: suite.name().to_string(),
            identity_id: e.identity_id,
            max_residual: e.max_residual,
            raw_residual: e.raw_residual,
            max_term: e.max_term,
            worst_point: PointRecord {
                t: e.worst_point.t,
                x: e.worst_point.x,
                v: e.worst_point.v,
            },
            worst_indices: e.worst_indices,
            pass: e.pass,
        }));
    }
    let all_pass = entries.iter().all(|e| e.pass);
    Ok(Report {
        manifest_hash: manifest_hash(text.as_bytes()),
        seed: manifest.sampling.seed,
        tolerance: tol,
        points_used: setup.points.len(),
        entries,
        all_pass,
    })
}
