mod common;

use common::load;
use mdik::bench::{
    aggregate, joint_fluctuation, run_paired, sample_setups, write_report, AggregateOptions,
    ReportOptions, SolverId, TrajectorySampler, TrialSettings,
};
use mdik::Config;
use proptest::prelude::*;

fn short_sampler() -> TrajectorySampler {
    TrajectorySampler {
        duration: 0.5,
        ..Default::default()
    }
}

#[test]
fn paired_runs_are_reproducible() {
    let model = load("arm6r");
    let settings = TrialSettings::new(Config::iteration_capped(20));
    let run = || {
        let setups = sample_setups(&model, "tool", &short_sampler(), 4, 99).unwrap();
        run_paired(&model, &SolverId::ALL, &setups, &settings).unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.len(), 20);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!((x.trial, x.solver), (y.trial, y.solver));
        for (s, t) in x.ticks.iter().zip(&y.ticks) {
            assert_eq!(s.q_ref, t.q_ref);
            assert_eq!(s.error_norm.to_bits(), t.error_norm.to_bits());
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let opts = ReportOptions { omit_timing: true };
    let write = |results: &[mdik::bench::TrialResult], name: &str| {
        let summary = aggregate(results, &AggregateOptions::default()).unwrap();
        let path = dir.path().join(name);
        let s = write_report(results, &summary, &path, opts).unwrap();
        (std::fs::read(path).unwrap(), std::fs::read(s).unwrap())
    };
    assert_eq!(write(&a, "a.csv"), write(&b, "b.csv"));
}

#[test]
fn trials_share_setups_across_solvers() {
    let model = load("planar2r");
    let setups = sample_setups(&model, "tip", &short_sampler(), 3, 7).unwrap();
    let more = sample_setups(&model, "tip", &short_sampler(), 5, 7).unwrap();
    // trial i only depends on the seed and i
    assert_eq!(setups[..], more[..3]);
    let results = run_paired(
        &model,
        &[SolverId::Jt, SolverId::Samd],
        &setups,
        &TrialSettings::new(Config::iteration_capped(5)),
    )
    .unwrap();
    let order: Vec<(usize, SolverId)> = results.iter().map(|r| (r.trial, r.solver)).collect();
    assert_eq!(
        order,
        vec![
            (0, SolverId::Jt),
            (0, SolverId::Samd),
            (1, SolverId::Jt),
            (1, SolverId::Samd),
            (2, SolverId::Jt),
            (2, SolverId::Samd)
        ]
    );
    for r in &results {
        assert_eq!(r.ticks.len(), 100);
    }
}

proptest! {
    #[test]
    fn fluctuation_ignores_constant_offsets(
        qs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 3..30),
        offset in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let shifted: Vec<Vec<f64>> = qs
            .iter()
            .map(|q| q.iter().zip(&offset).map(|(a, b)| a + b).collect())
            .collect();
        let a = joint_fluctuation(&qs).unwrap();
        let b = joint_fluctuation(&shifted).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a));
    }
}
