use approx::assert_relative_eq;
use proptest::prelude::*;
use screenant_core::experiments::{thread_pool, BlockageConfig};
use screenant_core::{
    aggregate, mrt_oracle, run_sweep, sample_channel, trial_rng, BlockagePattern, Scenario,
    ScenarioConfig, Substream, SweepKind,
};

fn small(side: usize, trials: u64, seed: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::default();
    cfg.screen.sx = side;
    cfg.screen.sy = side;
    cfg.run.trials = trials;
    cfg.run.base_seed = seed;
    cfg
}

#[test]
fn sweep_is_identical_across_pools() {
    let cfg = small(4, 12, 5);
    let values = [0.3, 0.6, 0.9];
    let one = thread_pool(1)
        .unwrap()
        .install(|| run_sweep::<f64>(SweepKind::Alpha, &cfg, &values, true))
        .unwrap();
    let three = thread_pool(3)
        .unwrap()
        .install(|| run_sweep::<f64>(SweepKind::Alpha, &cfg, &values, true))
        .unwrap();
    assert_eq!(one.result, three.result);
    assert_eq!(one.records, three.records);
}

#[test]
fn oracle_in_record_matches_regenerated_channel() {
    let cfg = small(5, 6, 13);
    let sc = Scenario::prepare(&cfg).unwrap();
    for r in sc.run_trials().unwrap() {
        let mut rng = trial_rng(13, r.trial_index, Substream::ScreenChannel);
        let h = sample_channel(sc.screen_correlation(), sc.screen_link(), &mut rng, 0).unwrap();
        let link = sc.screen_link();
        let oracle = mrt_oracle(&h, link.tx_power_w, link.noise_power_w).unwrap();
        assert_eq!(oracle.se, r.se_oracle);
    }
}

#[test]
fn rectangle_and_edge_segment_patterns_run() {
    let mut cfg = small(5, 8, 2);
    cfg.blockage = Some(BlockageConfig {
        ratio: 0.3,
        beta: 0.2,
        screen_pattern: BlockagePattern::Rectangle,
        edge_pattern: BlockagePattern::EdgeSegment,
    });
    let records = Scenario::prepare(&cfg).unwrap().run_trials().unwrap();
    assert!(records.iter().all(|r| r.mask_popcount == 8));
}

#[test]
fn frequency_sweep_shrinks_the_array_by_default() {
    let cfg = small(3, 1, 0);
    let at = |ghz: f64| {
        let c = SweepKind::Frequency.apply(&cfg, ghz).unwrap();
        Scenario::prepare(&c)
            .unwrap()
            .screen_geometry()
            .distance(0, 1)
    };
    assert_relative_eq!(at(28.0) / at(56.0), 2.0, max_relative = 1e-12);

    let mut fixed = cfg.clone();
    fixed.screen.spacing_m = Some(0.004);
    let c = SweepKind::Frequency.apply(&fixed, 100.0).unwrap();
    let d = Scenario::prepare(&c)
        .unwrap()
        .screen_geometry()
        .distance(0, 1);
    assert_relative_eq!(d, 0.004, max_relative = 1e-12);
}

#[test]
fn single_and_double_precision_agree() {
    let cfg = small(3, 20, 8);
    let a = Scenario::prepare(&cfg).unwrap().run_trials().unwrap();
    let b = screenant_core::experiments::Scenario::<f32>::prepare(&cfg)
        .unwrap()
        .run_trials()
        .unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_relative_eq!(x.se_oracle, y.se_oracle as f64, max_relative = 1e-4);
        assert_relative_eq!(x.se_edgeant, y.se_edgeant as f64, max_relative = 1e-4);
    }
}

#[test]
fn extra_loss_lowers_every_mean() {
    let base = small(3, 50, 4);
    let mut lossy = base.clone();
    lossy.link.extra_loss_db = 30.0;
    let a = aggregate(&Scenario::prepare(&base).unwrap().run_trials().unwrap()).unwrap();
    let b = aggregate(&Scenario::prepare(&lossy).unwrap().run_trials().unwrap()).unwrap();
    assert!(b.oracle.mean < a.oracle.mean);
    assert!(b.edgeant.mean < a.edgeant.mean);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn records_are_dominated_and_reproducible(
        side in 1usize..5,
        seed in any::<u64>(),
        alpha in 0.05f64..1.0,
        tx in -10.0f64..30.0,
        blockage in proptest::option::of((0.0f64..=1.0, 0.01f64..=1.0)),
    ) {
        let mut cfg = small(side, 4, seed);
        cfg.link.alpha = alpha;
        cfg.link.tx_power_dbm = tx;
        cfg.blockage = blockage.map(|(ratio, beta)| BlockageConfig { ratio, beta, ..BlockageConfig::default() });
        let sc = Scenario::prepare(&cfg).unwrap();
        let first = sc.run_trials().unwrap();
        prop_assert_eq!(&first, &sc.run_trials().unwrap());
        for r in &first {
            prop_assert!(r.se_screenant <= r.se_oracle + 1e-9);
            prop_assert!(r.se_screenant >= 0.0 && r.se_edgeant >= 0.0);
            prop_assert!(r.optimizer_iters <= cfg.optimizer.max_iters);
        }
    }
}
