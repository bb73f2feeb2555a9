use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use screenant_cli::{config_to_json, parse_config, RunManifest, SUMMARY_HEADER};
use screenant_core::experiments::{BlockageConfig, ScenarioConfig};
use screenant_core::{run_sweep, BlockagePattern, SweepKind};

fn screenant(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_screenant"))
        .args(args)
        .current_dir(dir)
        .env_remove("SCREENANT_SEED")
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().clone();
    (header, r.records().map(Result::unwrap).collect())
}

#[test]
fn unknown_subcommand_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenant(&["transmogrify"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}

#[test]
fn validate_prints_pass_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenant(&["validate", "--seed", "1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 6);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn alpha_sweep_writes_ten_rows_and_refuses_overwrite() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "sweep",
        "--name",
        "alpha",
        "--values",
        "0.1:1.0:0.1",
        "--trials",
        "20",
        "--seed",
        "3",
        "--out",
        "res",
    ];
    let out = screenant(&args, dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let res = dir.path().join("res");
    let text = fs::read_to_string(res.join("summary.csv")).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(!text.contains('\r') && text.ends_with('\n'));
    let (header, rows) = read_csv(&res.join("summary.csv"));
    assert_eq!(header.iter().collect::<Vec<_>>(), SUMMARY_HEADER);
    assert_eq!(&rows[2][1], "3.00000000e-1");
    assert!(rows.iter().all(|r| &r[0] == "alpha" && &r[12] == "20"));
    assert!(!res.join("trials.csv").exists());

    let again = screenant(&args, dir.path());
    assert_eq!(again.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));

    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(screenant(&forced, dir.path()).status.code(), Some(0));
    assert_eq!(fs::read_to_string(res.join("summary.csv")).unwrap(), text);
}

#[test]
fn records_flag_writes_trial_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenant(
        &[
            "sweep",
            "--name",
            "ratio",
            "--values",
            "0,0.5",
            "--trials",
            "7",
            "--records",
            "--out",
            "r",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("r/trials.csv"));
    assert_eq!(&header[2], "trial_index");
    assert_eq!(rows.len(), 14);
    let popcounts: Vec<&str> = rows.iter().map(|r| r.get(8).unwrap()).collect();
    assert!(popcounts[..7].iter().all(|p| *p == "0"));
    assert!(popcounts[7..].iter().all(|p| *p == "25"));
}

#[test]
fn replaying_a_manifest_reproduces_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenant(
        &[
            "sweep", "--name", "beta", "--values", "0.2,0.8", "--trials", "15", "--seed", "9",
            "--out", "a",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let manifest = RunManifest::load(&dir.path().join("a/manifest.json")).unwrap();
    assert_eq!(manifest.base_seed, 9);
    assert_eq!(manifest.sweep.as_ref().unwrap().values, vec![0.2, 0.8]);

    let out = screenant(
        &["replay", "a/manifest.json", "--out", "b", "--threads", "2"],
        dir.path(),
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        fs::read(dir.path().join("a/summary.csv")).unwrap(),
        fs::read(dir.path().join("b/summary.csv")).unwrap()
    );
}

#[test]
fn seed_env_applies_without_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_screenant"))
        .args([
            "sweep", "--name", "power", "--values", "10", "--trials", "2", "--out", "o",
        ])
        .current_dir(dir.path())
        .env("SCREENANT_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let manifest = RunManifest::load(&dir.path().join("o/manifest.json")).unwrap();
    assert_eq!(manifest.config.run.base_seed, 77);
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), r#"{"link": {"alpha": 1.5}}"#).unwrap();
    let out = screenant(&["run", "--config", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));

    fs::write(dir.path().join("typo.json"), r#"{"run": {"trails": 5}}"#).unwrap();
    let out = screenant(&["run", "--config", "typo.json"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trails"));
}

#[test]
fn config_file_drives_run() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"screen": {"sx": 2, "sy": 2}, "run": {"trials": 4, "base_seed": 1}}"#,
    )
    .unwrap();
    let out = screenant(&["run", "--config", "cfg.json", "--out", "o"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let (_, rows) = read_csv(&dir.path().join("o/summary.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "scenario");
    assert_eq!(&rows[0][12], "4");
}

#[test]
fn summary_values_parse_back_to_aggregates() {
    let dir = tempfile::tempdir().unwrap();
    let out = screenant(
        &[
            "sweep", "--name", "distance", "--values", "2,5", "--trials", "30", "--seed", "4",
            "--out", "d",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let mut cfg = ScenarioConfig::default();
    cfg.run.trials = 30;
    cfg.run.base_seed = 4;
    let expected = run_sweep::<f64>(SweepKind::Distance, &cfg, &[2.0, 5.0], false)
        .unwrap()
        .result;
    let (_, rows) = read_csv(&dir.path().join("d/summary.csv"));
    for (row, p) in rows.iter().zip(&expected.points) {
        let s = &p.stats;
        let want = [
            p.value,
            s.screenant.mean,
            s.screenant.std,
            s.screenant.ci95,
            s.oracle.mean,
            s.oracle.std,
            s.oracle.ci95,
            s.edgeant.mean,
            s.edgeant.std,
            s.edgeant.ci95,
            s.relative_gain,
        ];
        for (field, w) in row.iter().skip(1).zip(want) {
            let got: f64 = field.parse().unwrap();
            let text = format!("{w:.8e}");
            assert_eq!(got, text.parse::<f64>().unwrap());
            assert!((got - w).abs() <= 5e-9 * w.abs(), "{got} vs {w}");
        }
    }
}

fn pattern() -> impl Strategy<Value = BlockagePattern> {
    prop_oneof![
        Just(BlockagePattern::RandomSubset),
        Just(BlockagePattern::Rectangle),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(
        alpha in 0.01f64..=1.0,
        tx in -20.0f64..40.0,
        noise in -130.0f64..-80.0,
        side in 1usize..12,
        spacing in 0.1f64..2.0,
        trials in 1u64..100_000,
        seed in any::<u64>(),
        blockage in proptest::option::of((0.0f64..=1.0, 0.001f64..=1.0, pattern())),
    ) {
        let mut cfg = ScenarioConfig::default();
        cfg.link.alpha = alpha;
        cfg.link.tx_power_dbm = tx;
        cfg.link.noise_power_dbm = noise;
        cfg.screen.sx = side;
        cfg.screen.sy = side;
        cfg.screen.spacing_wavelengths = spacing;
        cfg.run.trials = trials;
        cfg.run.base_seed = seed;
        cfg.blockage = blockage.map(|(ratio, beta, screen_pattern)| BlockageConfig {
            ratio,
            beta,
            screen_pattern,
            edge_pattern: BlockagePattern::RandomSubset,
        });
        let back = parse_config(&config_to_json(&cfg), Path::new("mem.json")).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
