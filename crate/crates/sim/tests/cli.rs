use std::io::Write;
use std::process::Command;

use noma_lf_sim::cli::{parse_config, render};
use noma_lf_sim::config::{DeltaPolicy, ExperimentConfig, ExperimentKind};
use noma_lf_sim::harness::RunStats;
use noma_lf_sim::output::{write_csv, HEADER};
use noma_lf_sim::ConfigError;
use proptest::prelude::*;

fn parse(args: &[&str]) -> Result<ExperimentConfig, ConfigError> {
    let mut argv = vec!["noma-lf"];
    argv.extend_from_slice(args);
    parse_config(argv).map(|inv| inv.config)
}

fn flag_of(err: ConfigError) -> &'static str {
    match err {
        ConfigError::Invalid { flag, .. } => flag,
        other => panic!("expected a flag error, got {other}"),
    }
}

#[test]
fn minrate_sweep_and_trial_count() {
    let cfg = parse(&["minrate", "--p-db", "0:30:5", "--delta", "0.01,0.05", "--trials", "1e6"]).unwrap();
    assert_eq!(cfg.kind, ExperimentKind::MinRate);
    assert_eq!(cfg.p_db, vec![0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]);
    assert_eq!(cfg.deltas, vec![DeltaPolicy::Fixed(0.01), DeltaPolicy::Fixed(0.05)]);
    assert_eq!(cfg.trials, 1_000_000);
    assert_eq!(cfg.lambdas, vec![1.0, 0.5]);
    assert_eq!(cfg.eps, 1e-4);
    assert_eq!(cfg.seed, 0);
}

#[test]
fn outage_with_capped_policy() {
    let cfg = parse(&["outage", "--delta-policy", "min02-pcube", "--min-outage-events", "10000"]).unwrap();
    assert_eq!(cfg.deltas, vec![DeltaPolicy::CappedCubeRoot(0.2)]);
    assert_eq!(cfg.min_outage_events, Some(10_000));
    assert_eq!(cfg.r_th, 1.0);
}

#[test]
fn bad_values_name_their_flag() {
    assert_eq!(flag_of(parse(&["rateloss", "--delta", "1.5"]).unwrap_err()), "--delta");
    assert_eq!(flag_of(parse(&["minrate", "--p-db", "0:30"]).unwrap_err()), "--p-db");
    assert_eq!(flag_of(parse(&["minrate", "--trials", "lots"]).unwrap_err()), "--trials");
    assert_eq!(flag_of(parse(&["outage", "--delta-policy", "cube"]).unwrap_err()), "--delta-policy");
    assert_eq!(flag_of(parse(&["outage", "--window", "20"]).unwrap_err()), "--window");
    assert_eq!(flag_of(parse(&["rateloss", "--p-db", "0,10"]).unwrap_err()), "--p-db");
    assert_eq!(flag_of(parse(&["kuser", "--k", "1"]).unwrap_err()), "--k");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert!(matches!(parse(&["minrate", "--bogus", "1"]), Err(ConfigError::Usage(_))));
    assert!(matches!(parse(&["teleport"]), Err(ConfigError::Usage(_))));
}

#[test]
fn negative_powers_parse() {
    let cfg = parse(&["outageloss", "--p-db", "-10:40:5", "--delta", "0.2"]).unwrap();
    assert_eq!(cfg.p_db.first(), Some(&-10.0));
    assert_eq!(cfg.p_db.len(), 11);
}

#[test]
fn k_user_defaults_are_harmonic() {
    let cfg = parse(&["kuser", "--k", "3"]).unwrap();
    assert_eq!(cfg.lambdas, vec![1.0, 0.5, 1.0 / 3.0]);
    assert_eq!(parse(&["kuser"]).unwrap().lambdas.len(), 4);
}

#[test]
fn file_values_yield_to_flags() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "p_db = \"0:20:10\"\ndelta = [0.02, 0.04]\nseed = 7\ntrials = 5000").unwrap();
    let path = file.path().to_str().unwrap();
    let cfg = parse(&["minrate", "--config", path, "--seed", "9"]).unwrap();
    assert_eq!(cfg.p_db, vec![0.0, 10.0, 20.0]);
    assert_eq!(cfg.deltas, vec![DeltaPolicy::Fixed(0.02), DeltaPolicy::Fixed(0.04)]);
    assert_eq!(cfg.trials, 5000);
    assert_eq!(cfg.seed, 9);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "colour = 3").unwrap();
    let err = parse(&["minrate", "--config", bad.path().to_str().unwrap()]).unwrap_err();
    assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
}

fn arb_config() -> impl Strategy<Value = ExperimentConfig> {
    let kinds = prop::sample::select(ExperimentKind::ALL.to_vec());
    (
        kinds,
        prop::collection::vec(-5.0f64..35.0, 1..5),
        prop::collection::vec(0.003f64..0.3, 1..4),
        any::<bool>(),
        0.1f64..3.0,
        1e-9f64..1e-2,
        1u64..1_000_000,
        prop::option::of(1u64..100_000),
        any::<u64>(),
        prop::option::of((0.0f64..20.0, 0.0f64..20.0)),
        2usize..6,
    )
        .prop_map(|(kind, p_db, deltas, policy, r_th, eps, trials, events, seed, window, k)| {
            let mut cfg = ExperimentConfig::defaults(kind);
            cfg.p_db = p_db;
            cfg.deltas = deltas.into_iter().map(DeltaPolicy::Fixed).collect();
            if policy && !cfg.delta_axis() {
                cfg.deltas.push(DeltaPolicy::CappedCubeRoot(0.2));
            }
            if matches!(kind, ExperimentKind::RateLoss | ExperimentKind::KUser) {
                cfg.p_db.truncate(1);
            }
            if kind == ExperimentKind::KUser {
                cfg.lambdas = (1..=k).map(|i| 1.0 / i as f64).collect();
            }
            cfg.r_th = r_th;
            cfg.eps = eps;
            cfg.trials = trials;
            cfg.min_outage_events = events;
            cfg.seed = seed;
            cfg.window = window.map(|(a, b)| (a.min(b), a.max(b)));
            cfg
        })
        .prop_filter("valid", |cfg| cfg.validate().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]
    #[test]
    fn render_round_trips(cfg in arb_config()) {
        let argv = render(&cfg);
        let back = parse_config(argv.clone()).map_err(|e| TestCaseError::fail(format!("{e}: {argv:?}")))?;
        prop_assert_eq!(back.config, cfg);
    }
}

#[test]
fn empty_sweep_writes_header_only() {
    let stats = RunStats {
        kind: ExperimentKind::MinRate,
        seed: 0,
        axis: "p_db",
        points: vec![],
        summaries: vec![],
        warnings: vec![],
    };
    let mut buf = Vec::new();
    write_csv(&stats, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", HEADER.join(",")));
}

fn run_bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_noma-lf")).args(args).env_remove("NOMA_LF_WORKERS").output().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(run_bin(&["rateloss", "--delta", "1.5"]).status.code(), Some(2));
    assert_eq!(run_bin(&["minrate", "--nope"]).status.code(), Some(2));
    let out = run_bin(&["minrate", "-q", "--p-db", "10", "--trials", "10", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/dir/x.csv"));
    assert!(run_bin(&["--help"]).status.success());
}

#[test]
fn minrate_csv_schema_and_byte_identity() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for workers in ["1", "3", "1"] {
        let path = dir.path().join(format!("run{}.csv", files.len()));
        let out = run_bin(&[
            "minrate", "-q", "--p-db", "0:30:10", "--delta", "0.01,0.05", "--trials", "40000",
            "--workers", workers, "--out", path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        files.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(files[0], files[1], "worker count changed the output");
    assert_eq!(files[0], files[2], "re-run changed the output");

    let mut reader = csv::ReaderBuilder::new().flexible(false).from_reader(files[0].as_slice());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), HEADER.to_vec());
    let mut metrics = Vec::new();
    let mut last: Option<(f64, String)> = None;
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert_eq!(&rec[0], "minrate");
        assert_eq!(&rec[1], "p_db");
        let p: f64 = rec[2].parse().unwrap();
        let _: f64 = rec[4].parse().unwrap();
        let _: f64 = rec[5].parse().unwrap();
        let n: u64 = rec[6].parse().unwrap();
        assert_eq!(n, 40_000);
        assert_eq!(&rec[7], "0");
        if let Some((lp, lm)) = &last {
            assert!(*lp < p || (*lp == p && lm.as_str() < &rec[3]), "row order");
        }
        last = Some((p, rec[3].to_string()));
        if p == 0.0 {
            metrics.push(rec[3].to_string());
        }
    }
    for m in ["r_full", "r_qr[delta=0.01]", "r_qr[delta=0.05]", "r_tdma"] {
        assert!(metrics.iter().any(|x| x == m), "missing {m}");
    }
}

#[test]
fn json_matches_csv_rows() {
    let out = run_bin(&["feedback", "-q", "--delta", "0.05", "--trials", "1000", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    let csv = run_bin(&["feedback", "-q", "--delta", "0.05", "--trials", "1000"]);
    let lines = String::from_utf8(csv.stdout).unwrap().lines().count();
    assert_eq!(rows.len(), lines - 1);
    assert_eq!(rows[0]["experiment"], "feedback");
    assert!(rows.iter().any(|r| r["metric"] == "t_r" && r["value"] == 60.0));
}
