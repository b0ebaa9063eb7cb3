use serde_json::json;

use isav_core::harness::{
    compare_schemes, convergence_study, read_series, read_snapshot, run_simulation, ReferenceSpec, RunConfig, Sweep,
    OUTPUT_DIR_ENV,
};
use isav_core::{Error, Scheme};

fn config(doc: serde_json::Value) -> RunConfig {
    RunConfig::from_json_str(&doc.to_string()).unwrap()
}

fn small_ex4(series: &std::path::Path) -> RunConfig {
    config(json!({
        "preset": "ex4",
        "grid": { "nx": 32, "ny": 32 },
        "tau": 0.01,
        "t_end": 0.1,
        "init": { "kind": "random", "seed": 11 },
        "outputs": { "series_path": series }
    }))
}

#[test]
fn seeded_random_run_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_simulation(&small_ex4(&a)).unwrap();
    run_simulation(&small_ex4(&b)).unwrap();
    let a = std::fs::read(a).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, std::fs::read(b).unwrap());
}

#[test]
fn one_row_per_step_including_t0() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = run_simulation(&small_ex4(&path)).unwrap();
    let rows = read_series(&path).unwrap();
    assert_eq!(rows.len(), 11);
    assert_eq!(rows, out.records);
    assert_eq!(rows[0].t, 0.0);
    assert!(rows[0].d_be.is_none() && rows[1].d_be.is_some());
    assert!((rows[10].t - 0.1).abs() < 1e-15);
}

#[test]
fn downsampled_series_keeps_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_ex4(&dir.path().join("s.csv"));
    cfg.outputs.record_every = 4;
    let steps: Vec<usize> = run_simulation(&cfg).unwrap().records.iter().map(|r| r.step).collect();
    assert_eq!(steps, vec![0, 4, 8, 10]);
}

#[test]
fn snapshots_round_trip_into_a_file_initial_condition() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_ex4(&dir.path().join("s.csv"));
    cfg.outputs.field_snapshot_times = vec![0.05, 0.1];
    cfg.outputs.snapshot_dir = Some(dir.path().join("snaps"));
    let out = run_simulation(&cfg).unwrap();
    assert_eq!(out.snapshots.len(), 2);
    let (phi, t) = read_snapshot(&out.snapshots[1]).unwrap();
    assert_eq!(t, 0.1);
    assert_eq!(phi, out.final_state.phi);

    let restart = config(json!({
        "preset": "ex4",
        "grid": { "nx": 32, "ny": 32 },
        "potential": { "c_add": 37.5 },
        "S": 6250.0,
        "tau": 0.01,
        "t_end": 0.05,
        "init": { "kind": "file", "path": out.snapshots[0] }
    }));
    let (from_file, _) = read_snapshot(&out.snapshots[0]).unwrap();
    assert_eq!(run_simulation(&restart).unwrap().records[0].mass, from_file.mean());
}

#[test]
fn snapshot_on_wrong_grid_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_ex4(&dir.path().join("s.csv"));
    cfg.outputs.field_snapshot_times = vec![0.0];
    cfg.outputs.snapshot_dir = Some(dir.path().to_path_buf());
    let snap = run_simulation(&cfg).unwrap().snapshots.remove(0);
    let other = config(json!({
        "preset": "ex4", "S": 10.0, "init": { "kind": "file", "path": snap }
    }));
    let err = run_simulation(&other).unwrap_err();
    assert!(err.is_validation(), "{err}");
}

/// Allen–Cahn Flory–Huggins without the additive constant drives `∫F` negative.
fn failing_config(series: &std::path::Path) -> RunConfig {
    config(json!({
        "preset": "ex3-isav-be",
        "grid": { "nx": 32, "ny": 32 },
        "model": { "alpha": 0.0 },
        "potential": { "c_add": 0.0 },
        "tau": 0.01,
        "t_end": 2.0,
        "outputs": { "series_path": series }
    }))
}

#[test]
fn runtime_failure_reports_the_step_and_keeps_earlier_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let err = run_simulation(&failing_config(&path)).unwrap_err();
    assert!(err.is_runtime());
    let Error::StepFailed { step, source } = &err else {
        panic!("unexpected {err}")
    };
    assert!(*step > 1);
    assert!(matches!(**source, Error::NonPositiveBulk { .. }), "{source}");
    let rows = read_series(&path).unwrap();
    assert_eq!(rows.len(), *step);
    assert_eq!(rows.last().unwrap().step, step - 1);
}

#[test]
fn assert_energy_passes_for_isav_be() {
    let mut cfg = config(json!({
        "preset": "ex2-isav-be", "grid": { "nx": 64, "ny": 64 }, "tau": 0.01, "t_end": 0.2
    }));
    cfg.assert_energy = true;
    run_simulation(&cfg).unwrap();
}

#[test]
fn ex2_isav_be_energy_is_non_increasing() {
    let cfg = config(json!({ "preset": "ex2-isav-be", "tau": 0.01, "t_end": 0.5 }));
    let recs = run_simulation(&cfg).unwrap().records;
    assert!(recs.windows(2).all(|w| w[1].e_orig <= w[0].e_orig));
}

#[test]
fn output_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    // Only this test touches the variable in this binary.
    std::env::set_var(OUTPUT_DIR_ENV, dir.path());
    let cfg = config(json!({
        "preset": "ex1", "grid": { "nx": 8, "ny": 8 }, "tau": 0.1, "t_end": 0.5,
        "outputs": { "series_path": "nested/series.csv" }
    }));
    let res = run_simulation(&cfg);
    std::env::remove_var(OUTPUT_DIR_ENV);
    res.unwrap();
    assert_eq!(read_series(&dir.path().join("nested/series.csv")).unwrap().len(), 6);
}

fn ex2_pair(a: Scheme, b: Scheme) -> (RunConfig, RunConfig) {
    let base = config(json!({ "preset": "ex2", "grid": { "nx": 64, "ny": 64 }, "tau": 0.001, "t_end": 0.1 }));
    (base.with_scheme(a), base.with_scheme(b))
}

#[test]
fn compare_be_pair() {
    let (sav, isav) = ex2_pair(Scheme::SavBe, Scheme::IsavBe);
    let cmp = compare_schemes(&sav, &isav).unwrap();
    assert_eq!(cmp.labels, ["sav_be".to_string(), "isav_be".to_string()]);
    assert!(cmp.b.iter().all(|r| r.d_be.is_none_or(|d| d <= 1e-10 * (1.0 + r.e_orig.abs()))));
    assert!(cmp.a.iter().filter_map(|r| r.d_be).any(|d| d > 0.0));
    // The first step out of the indicator data is an O(1) jump for both
    // schemes; the drift comparison starts after it.
    let drift = |rs: &[isav_core::StepRecord]| rs[2..].iter().map(|r| r.r_drift.abs()).fold(0.0, f64::max);
    let (sav, isav) = (drift(&cmp.a), drift(&cmp.b));
    assert!(sav >= 10.0 * isav, "SAV {sav:e} vs iSAV {isav:e}");

    let csv = cmp.to_csv();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("step,t,sav_be_E_orig,"));
    assert!(header.ends_with(",isav_be_max_phi"));
    assert_eq!(lines.count(), 101);
}

#[test]
fn compare_bdf_pair() {
    let (sav, isav) = ex2_pair(Scheme::SavBdf, Scheme::IsavBdf);
    let cmp = compare_schemes(&sav, &isav).unwrap();
    // Step 2 compares against 𝓔₂[φ¹, φ⁰], which straddles the O(1) start-up
    // jump from the indicator data; the law is checked from step 3 on.
    let worst = cmp.b[3..]
        .iter()
        .map(|r| r.d_bdf.unwrap() / (1.0 + r.e2.unwrap().abs()))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(worst <= 1e-10, "{worst}");
    assert!(cmp.a[3..].iter().any(|r| r.d_bdf.unwrap() > 0.0));
}

#[test]
fn compare_rejects_misaligned_runs() {
    let (a, b) = ex2_pair(Scheme::SavBe, Scheme::IsavBe);
    let err = compare_schemes(&a, &b.with_tau(0.002)).unwrap_err();
    assert!(matches!(err, Error::Config { ref path, .. } if path == "tau"));
    let mut c = b.clone();
    c.t_end = 0.2;
    let err = compare_schemes(&a, &c).unwrap_err();
    assert!(matches!(err, Error::Config { ref path, .. } if path == "t_end"));
}

#[test]
fn spatial_study_at_the_full_horizon() {
    let base = config(json!({ "preset": "ex1-isav-be", "tau": 1e-5, "t_end": 0.5 }));
    let rows = convergence_study(&base, &Sweep::Grids(vec![4, 8, 12, 16, 20]), &ReferenceSpec::default()).unwrap();
    let errs: Vec<f64> = rows.iter().map(|r| r.h1_error).collect();
    eprintln!("spatial errors at T=0.5: {errs:?}");
    assert!(errs[0] > 1e-3 && errs[0] < 1e-2);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));
    assert!(errs[3] < 1e-9 && errs[4] < 1e-11);
}
