use ifm_core::montecarlo::frequency_violations;
use ifm_core::{chi_square_check, ev_mine_test, sample, sample_range, zeno_ifm, TrialLedger, ZenoConfig};

/// Seed frozen for the statistical tests.
const CI_SEED: u64 = 0x00c0_ffee_2026;
const TRIALS: u64 = 1_000_000;

#[test]
fn frequencies_within_four_sigma() {
    let dists = [
        ev_mine_test(0.5, true).unwrap().distribution,
        ev_mine_test(0.5, false).unwrap().distribution,
        zeno_ifm(&ZenoConfig {
            cycles: 10,
            object_present: true,
        })
        .unwrap()
        .distribution,
    ];
    for d in &dists {
        let ledger = sample(d, TRIALS, CI_SEED);
        assert_eq!(ledger.counts.values().sum::<u64>(), TRIALS);
        assert!(frequency_violations(&ledger, d, 4.0).is_empty(), "{d:?} {ledger:?}");
        assert!(chi_square_check(&ledger, d).pass);
    }
}

#[test]
fn four_quarters_equal_one_run() {
    let d = ev_mine_test(0.5, true).unwrap().distribution;
    let whole = sample(&d, TRIALS, CI_SEED);
    let mut quarters = TrialLedger::empty(&d, CI_SEED);
    for k in 0..4 {
        quarters.merge(&sample_range(&d, k * 250_000..(k + 1) * 250_000, CI_SEED));
    }
    assert_eq!(quarters, whole);
}
