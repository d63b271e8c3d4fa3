//! Runs every check on the Berwald connection of the round sphere and on a
//! random Cartan-type connection over a flat temporal metric, printing the
//! residual of every entry.

use std::time::Instant;

use jetcalc::geometry::{berwald, build_hnormal, canonical_nonlinear};
use jetcalc::identities::{
    bianchi_suite, curvature_block_check, curvature_check, deflection_suite, ricci_suite, torsion_check,
    IdentityReport,
};
use jetcalc::random::{cartan_spec, dvector_field, rng, sample_points, SampleBox};
use jetcalc::{Dims, Metric, MetricKind};

fn show(title: &str, r: &IdentityReport) {
    println!("== {title}");
    for e in &r.entries {
        println!(
            "{:>5} {:<22} norm {:9.2e} raw {:9.2e} size {:9.2e} at {:?}",
            if e.pass { "ok" } else { "FAIL" },
            e.identity_id,
            e.max_residual,
            e.raw_residual,
            e.max_term,
            e.worst_indices
        );
    }
}

fn main() -> jetcalc::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, n) = (args.first().copied().unwrap_or(1), args.get(1).copied().unwrap_or(2));
    let d = Dims::new(1, 2);
    let h = Metric::flat(MetricKind::Temporal, d)?;
    let phi = Metric::parse(
        MetricKind::Spatial,
        d,
        &[vec!["1".into(), "0".into()], vec!["0".into(), "sin(x1)^2".into()]],
    )?;
    let (conn, nc) = berwald(&h, &phi)?;
    let bx = SampleBox {
        t: vec![(-1.0, 1.0)],
        x: vec![(0.3, 2.8), (0.0, 6.0)],
        v: (-1.0, 1.0),
    };
    let mut r = rng(1);
    let pts = sample_points(&bx, 3, &mut r);
    show("sphere torsion", &torsion_check(&conn, &nc, &pts, 1e-9)?);
    show("sphere curvature", &curvature_check(&conn, &nc, &pts, 1e-9)?);
    show("sphere curvature blocks", &curvature_block_check(&conn, &nc, &pts, 1e-9)?);

    let d = Dims::new(p, n);
    let diag = |kind, k: usize, var: &str| -> jetcalc::Result<Metric> {
        let rows: Vec<Vec<String>> = (0..k)
            .map(|a| {
                (0..k)
                    .map(|b| {
                        if a == b {
                            format!("exp(0.3*{var}{})", (a + 1) % k + 1)
                        } else if a + b == 1 {
                            format!("0.1*{var}1")
                        } else {
                            "0".into()
                        }
                    })
                    .collect()
            })
            .collect();
        Metric::parse(kind, d, &rows)
    };
    let h = diag(MetricKind::Temporal, p, "t")?;
    let phi = diag(MetricKind::Spatial, n, "x")?;
    let spec = cartan_spec(&h, 3, &mut r);
    let nc = canonical_nonlinear(&h, &phi)?;
    let conn = build_hnormal(&spec, &nc)?;
    let pts = sample_points(&SampleBox::uniform(d, -1.0, 1.0), 2, &mut r);
    let x = dvector_field(d, 2, 3, &mut r);
    let t0 = Instant::now();
    let frame = jetcalc::frame::FrameConnection::new(&conn);
    for q in &pts {
        println!("general identities on the frame: {:?}", frame.general_bianchi(q)?);
    }
    show("random torsion", &torsion_check(&conn, &nc, &pts, 1e-9)?);
    show("random curvature", &curvature_check(&conn, &nc, &pts, 1e-9)?);
    show("random curvature blocks", &curvature_block_check(&conn, &nc, &pts, 1e-9)?);
    show("random ricci", &ricci_suite(&conn, &nc, &x, &pts, 1e-9)?);
    show("random deflection", &deflection_suite(&conn, &nc, &pts, 1e-9)?);
    show("random bianchi", &bianchi_suite(&conn, &nc, &pts, 1e-9)?);
    show("random amended", &jetcalc::identities::amended_bianchi_suite(&conn, &nc, &pts, 1e-9)?);
    eprintln!("{:?}", t0.elapsed());
    Ok(())
}
