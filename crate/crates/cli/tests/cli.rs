use std::path::{Path, PathBuf};
use std::process::Command;

use jetcalc_cli::{manifest_hash, run, CliError, Overrides};

fn manifest(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("manifests").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(manifest(name)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn jetcalc(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_jetcalc")).args(args).output().unwrap()
}

fn write_manifest(name: &str, text: &str) -> String {
    let path = scratch(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn flat_manifest_runs_every_suite() {
    let report = run(&read("flat.json"), Overrides::default()).unwrap();
    assert!(report.all_pass);
    assert_eq!(report.entries.len(), 70);
    for (suite, count) in [
        ("torsion_check", 9),
        ("curvature_check", 7),
        ("deflection", 6),
        ("ricci", 18),
        ("bianchi", 30),
    ] {
        assert_eq!(report.entries.iter().filter(|e| e.suite == suite).count(), count, "{suite}");
    }
    assert!(report.entries.iter().all(|e| e.raw_residual == 0.0));
}

#[test]
fn sphere_manifest_passes() {
    let text = read("sphere.json");
    let report = run(&text, Overrides::default()).unwrap();
    let bad: Vec<_> = report.entries.iter().filter(|e| !e.pass).map(|e| &e.identity_id).collect();
    assert!(bad.is_empty(), "{bad:?}");
    assert_eq!(report.points_used, 20);
    assert_eq!(report.manifest_hash, manifest_hash(text.as_bytes()));
    assert_eq!(report.manifest_hash.len(), 64);
}

#[test]
fn non_cartan_manifest_is_rejected() {
    let err = run(&read("non_cartan.json"), Overrides::default()).unwrap_err();
    assert_eq!(err.exit_code(), 4);
    assert!(matches!(err, CliError::Core(jetcalc::Error::NotCartan(_))));
    assert!(err.to_string().contains("[1, 1, 2]"), "{err}");
}

#[test]
fn overrides_replace_seed_and_tolerance() {
    let text = read("sphere.json");
    let base = run(&text, Overrides::default()).unwrap();
    let other = run(
        &text,
        Overrides {
            tolerance: Some(1e-3),
            seed: Some(99),
        },
    )
    .unwrap();
    assert_eq!(base.seed, 7);
    assert_eq!(other.seed, 99);
    assert_eq!(other.tolerance, 1e-3);
    assert_ne!(base.entries[0].worst_point, other.entries[0].worst_point);
}

#[test]
fn manifest_errors() {
    let sphere = read("sphere.json");
    let cases = [
        sphere.replace("\"seed\": 7", "\"seed\": 7, \"extra\": 1"),
        sphere.replace("\"p\": 1", "\"p\": 5"),
        sphere.replace("sin(x1)^2", "sin(x1)^^2"),
        sphere.replace("\"count\": 20", "\"count\": 0"),
        sphere.replace("\"berwald\"", "\"cartan\""),
        sphere.replace("[[\"1\"]]", "[[\"x1\"]]"),
        "{".to_string(),
    ];
    for text in cases {
        let err = run(&text, Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2, "{err}");
    }
    // sin²x¹ vanishes at x¹ = 0
    let singular = sphere.replace("[0.3, 2.8]", "[0, 0]");
    assert_eq!(run(&singular, Overrides::default()).unwrap_err().exit_code(), 3);
}

#[test]
fn binary_exit_codes() {
    let out = scratch("flat-report.json");
    let ok = jetcalc(&["--manifest", manifest("flat.json").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(json["entries"].as_array().unwrap().len(), 70);
    assert_eq!(json["all_pass"], true);
    assert!(String::from_utf8_lossy(&ok.stdout).contains("bianchi.11.1"));

    let nc = jetcalc(&["--manifest", manifest("non_cartan.json").to_str().unwrap()]);
    assert_eq!(nc.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&nc.stderr).contains("Cartan"));

    let bad = write_manifest("bad.json", "{\"dims\": 3}");
    assert_eq!(jetcalc(&["--manifest", &bad]).status.code(), Some(2));

    let missing = scratch("does-not-exist.json");
    assert_eq!(jetcalc(&["--manifest", missing.to_str().unwrap()]).status.code(), Some(5));

    // a tolerance no floating-point residual can meet
    let strict = jetcalc(&["--manifest", manifest("sphere.json").to_str().unwrap(), "--tolerance", "1e-300"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let m = manifest("sphere.json");
    let (a, b) = (scratch("run-a.json"), scratch("run-b.json"));
    for out in [&a, &b] {
        let r = jetcalc(&["--manifest", m.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}
