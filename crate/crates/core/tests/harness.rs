use std::fs;
use std::path::Path;

use fixenrich::harness::{
    bench_compare, generate_affine_family, read_family, run_experiment, write_family,
    BenchScheme, ExperimentConfig, Scheme,
};
use fixenrich::iteration::StopRule;
use fixenrich::{operator_norm, Error, Mapping, Matrix, NormKind, Vector};
use serde_json::Value;

fn example1() -> Mapping {
    Mapping::scalar_affine(-2.0, 100.0).unwrap()
}

fn example2(b: f64) -> Mapping {
    Mapping::linear(Matrix::identity(1).scale(1.0 - b))
}

fn solve_config(dir: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(example1(), Scheme::SolveModified);
    c.b = Some(3.0);
    c.x0 = Some(Vector::zeros(1));
    c.output_dir = dir.to_path_buf();
    c
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn solve_run_writes_its_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let summary = run_experiment(&solve_config(tmp.path())).unwrap();
    assert_eq!(summary.status, "converged");
    assert!(summary.succeeded());
    let x = summary.fixed_point.as_ref().unwrap()[0];
    assert!((x - 100.0 / 3.0).abs() <= 1e-8);
    assert_eq!(summary.lambda, Some(0.25));

    for name in ["config.json", "trace.csv", "summary.json", "result.json"] {
        assert!(tmp.path().join(name).is_file(), "{name} missing");
    }
    assert!(!tmp.path().join("iterates.csv").exists());

    let trace = fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("iter,residual,ratio"));
    assert_eq!(lines.count(), summary.iterations);

    let written = read_json(&tmp.path().join("summary.json"));
    assert_eq!(written["status"], "converged");
    assert_eq!(written["config_digest"], summary.config_digest);

    let result = read_json(&tmp.path().join("result.json"));
    assert_eq!(result["lambda"], 0.25);
    assert!(result["residual_T"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn config_echo_reproduces_the_digest() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = solve_config(tmp.path());
    c.seed = Some(99);
    let summary = run_experiment(&c).unwrap();
    let echoed = ExperimentConfig::load(&tmp.path().join("config.json")).unwrap();
    assert_eq!(echoed.sampler.seed, 99);
    assert_eq!(echoed.digest(), summary.config_digest);
    assert_eq!(c.digest(), summary.config_digest);
}

#[test]
fn identical_configs_give_identical_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for run in ["one", "two"] {
        let mut c = ExperimentConfig::new(Mapping::rotation(1.0).unwrap(), Scheme::Krasnoselskij);
        c.lambda = Some(0.3);
        c.x0 = Some(Vector::new(vec![4.0, -1.0]).unwrap());
        c.store_iterates = true;
        c.output_dir = tmp.path().join(run);
        let s = run_experiment(&c).unwrap();
        assert_eq!(s.status, "converged");
        texts.push((
            fs::read(c.output_dir.join("trace.csv")).unwrap(),
            fs::read(c.output_dir.join("iterates.csv")).unwrap(),
        ));
    }
    assert_eq!(texts[0], texts[1]);
    let iterates = String::from_utf8(texts[0].1.clone()).unwrap();
    assert!(iterates.starts_with("iter,x0,x1\n0,4.0,-1.0\n"));
}

#[test]
fn verify_run_on_example_two_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(example2(2.0), Scheme::Verify);
    c.b = Some(2.0);
    c.output_dir = tmp.path().to_path_buf();
    let s = run_experiment(&c).unwrap();
    assert_eq!(s.status, "passed");
    let report = s.report.unwrap();
    assert!(report.passed);
    assert!((report.max_ratio - 1.0).abs() <= 1e-10);
    assert_eq!(
        fs::read_to_string(tmp.path().join("trace.csv")).unwrap(),
        "iter,residual,ratio\n"
    );
}

#[test]
fn verify_refutation_is_a_scheme_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(example1(), Scheme::Verify);
    c.b = Some(0.0);
    c.output_dir = tmp.path().to_path_buf();
    let s = run_experiment(&c).unwrap();
    assert_eq!(s.status, "refuted");
    assert!(!s.succeeded());
    assert!((s.report.unwrap().max_ratio - 2.0).abs() <= 1e-10);
}

#[test]
fn negative_b_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = solve_config(tmp.path());
    c.b = Some(-1.0);
    match run_experiment(&c) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "b"),
        other => panic!("expected a config error, got {other:?}"),
    }
    // Nothing is written for an invalid config.
    assert!(fs::read_dir(tmp.path()).unwrap().next().is_none());
}

#[test]
fn config_documents_are_strict() {
    let text = r#"{"mapping":{"kind":"identity","dim":2},"scheme":"picard","x0":[0,0],"colour":1}"#;
    assert!(matches!(ExperimentConfig::from_json_str(text), Err(Error::Config { .. })));
    let text = r#"{"mapping":{"kind":"shear","dim":2},"scheme":"picard","x0":[0,0]}"#;
    assert!(ExperimentConfig::from_json_str(text).is_err());
    let text = r#"{"mapping":{"kind":"identity","dim":2},"scheme":"picard","x0":[0,0]}"#;
    let c = ExperimentConfig::from_json_str(text).unwrap();
    assert_eq!(c.norm, NormKind::L2);
    assert_eq!(c.stop, StopRule::default());
}

#[test]
fn picard_divergence_is_reported_not_raised() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(example1(), Scheme::Picard);
    c.x0 = Some(Vector::zeros(1));
    c.output_dir = tmp.path().to_path_buf();
    let s = run_experiment(&c).unwrap();
    assert_eq!(s.status, "diverged");
    assert!(!s.succeeded());
}

#[test]
fn min_b_run() {
    let tmp = tempfile::tempdir().unwrap();
    let mut c = ExperimentConfig::new(example1(), Scheme::MinB);
    c.kind = fixenrich::ConditionKind::Enriched;
    c.output_dir = tmp.path().join("enriched");
    let s = run_experiment(&c).unwrap();
    assert_eq!(s.status, "found");
    assert!((s.min_b.unwrap() - 0.5).abs() <= 1e-6);

    let mut c = ExperimentConfig::new(
        Mapping::linear(Matrix::identity(2).scale(2.0)),
        Scheme::MinB,
    );
    c.output_dir = tmp.path().join("empty");
    let s = run_experiment(&c).unwrap();
    assert_eq!(s.status, "empty");
    assert_eq!(s.min_b, None);

    let mut c = ExperimentConfig::new(Mapping::rotation(0.5).unwrap(), Scheme::MinB);
    c.mapping = Mapping::composition(vec![
        Mapping::rotation(0.5).unwrap(),
        Mapping::box_projection(Vector::zeros(2), Vector::filled(2, 1.0)).unwrap(),
    ])
    .unwrap();
    c.output_dir = tmp.path().join("nonaffine");
    assert!(matches!(run_experiment(&c), Err(Error::Config { .. })));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let c = solve_config(&blocker.join("run"));
    let err = run_experiment(&c).unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn contractive_family_converges_under_picard() {
    let family = generate_affine_family(42, 3, &[0.5], 8).unwrap();
    let table = bench_compare(&family, &[BenchScheme::Picard], &StopRule::default(), NormKind::L2).unwrap();
    assert!(table.all("converged"));
    for row in &table.rows {
        // Random orthogonal factors with equal singular values: A = 0.5·Q.
        assert!((row.empirical_ratio.unwrap() - 0.5).abs() <= 1e-6);
    }
}

#[test]
fn expansive_family_diverges_under_picard() {
    let family = generate_affine_family(42, 2, &[2.0], 8).unwrap();
    let table = bench_compare(&family, &[BenchScheme::Picard], &StopRule::default(), NormKind::L2).unwrap();
    assert!(table.all("diverged"));
}

#[test]
fn negated_expansive_family_converges_under_krasnoselskij() {
    let lambda = 1.0 / 3.0;
    let family: Vec<Mapping> = generate_affine_family(42, 2, &[2.0], 4)
        .unwrap()
        .into_iter()
        .map(|t| {
            let (_, c) = t.as_affine().unwrap();
            Mapping::affine(Matrix::identity(2).scale(-2.0), c).unwrap()
        })
        .collect();
    for t in &family {
        // Oracle: ‖(1−λ)I + λA‖₂ < 1 for A = −2I.
        let (a, _) = t.as_affine().unwrap();
        assert!(operator_norm(&a.shifted(1.0 - lambda, lambda), NormKind::L2).unwrap() < 1.0);
    }
    let schemes = [BenchScheme::Picard, BenchScheme::Krasnoselskij { lambda }];
    let table = bench_compare(&family, &schemes, &StopRule::default(), NormKind::L2).unwrap();
    for row in &table.rows {
        let expected = match row.scheme {
            BenchScheme::Picard => "diverged",
            _ => "converged",
        };
        assert_eq!(row.status, expected, "{row:?}");
    }
}

#[test]
fn family_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("family.json");
    let family = generate_affine_family(7, 3, &[1.0, 0.5, 0.1], 3).unwrap();
    write_family(&path, &family).unwrap();
    assert_eq!(read_family(&path).unwrap(), family);
    assert!(matches!(
        read_family(&tmp.path().join("absent.json")),
        Err(Error::Io { .. })
    ));
}
