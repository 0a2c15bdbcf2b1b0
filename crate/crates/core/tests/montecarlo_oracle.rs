use statrs::distribution::{ChiSquared, ContinuousCDF};

use nvreadout::montecarlo::{self, FlipMode, McConfig, TrialModel};
use nvreadout::readout::{self, poisson_pmf};
use nvreadout::Scenario;

fn quiet_scenario() -> Scenario {
    let mut s = Scenario::default();
    s.setup.t2 = f64::INFINITY;
    s.emitter.k_singlet_m0 = 0.0;
    s
}

/// Pearson statistic over bins with expected count ≥ 5; the upper tail is pooled.
fn chi_square(histogram: &[u64], lambda: f64, n: u64) -> (f64, usize) {
    let mut stat = 0.0;
    let mut bins = 0;
    let mut k = 0usize;
    let mut covered = 0.0;
    let mut observed_covered = 0u64;
    loop {
        let p = poisson_pmf(k as u64, lambda).unwrap();
        let expected = p * n as f64;
        let remaining = (1.0 - covered - p) * n as f64;
        if expected < 5.0 && k as f64 > lambda || remaining < 5.0 {
            break;
        }
        if expected >= 5.0 {
            let obs = histogram.get(k).copied().unwrap_or(0) as f64;
            stat += (obs - expected).powi(2) / expected;
            bins += 1;
            covered += p;
            observed_covered += obs as u64;
        }
        k += 1;
    }
    let tail_expected = (1.0 - covered) * n as f64;
    let tail_observed = (n - observed_covered) as f64;
    stat += (tail_observed - tail_expected).powi(2) / tail_expected;
    (stat, bins)
}

#[test]
fn count_histograms_are_poisson() {
    let n = 200_000;
    for (dark, bright) in [(1.0, 18.0), (0.3, 7.5)] {
        let s = montecarlo::run_campaign_with_model(&TrialModel::counting_only(dark, bright, 6), n, 31)
            .unwrap();
        for (hist, lambda) in [(&s.dark.histogram, dark), (&s.bright.histogram, bright)] {
            let (stat, bins) = chi_square(hist, lambda, n);
            let critical = ChiSquared::new(bins as f64).unwrap().inverse_cdf(1.0 - 1e-3);
            assert!(stat < critical, "λ={lambda}: χ² = {stat} over {bins} dof, critical {critical}");
        }
    }
}

#[test]
fn quiet_scenario_matches_counting_error() {
    let s = quiet_scenario();
    let cfg = McConfig {
        n_trials: 400_000,
        master_seed: 5,
        flip_mode: FlipMode::MidMeasurement,
        scenario: s,
    };
    let mc = montecarlo::run_campaign(&cfg).unwrap();
    let b = readout::error_budget(&s.cavity, &s.emitter, &s.setup).unwrap();
    assert_eq!(mc.dark.flips + mc.bright.flips + mc.dark.shelvings, 0);
    assert!((mc.empirical_total - b.counting_error).abs() <= 3.0 * mc.total_standard_error);
}

#[test]
fn strict_mode_brackets_analytic_total() {
    let cfg = McConfig {
        n_trials: 400_000,
        master_seed: 6,
        flip_mode: FlipMode::PaperStrict,
        scenario: Scenario::default(),
    };
    let mc = montecarlo::run_campaign(&cfg).unwrap();
    let s = Scenario::default();
    let b = readout::error_budget(&s.cavity, &s.emitter, &s.setup).unwrap();
    // strict mode counts a flip in either branch, so decoherence enters twice
    let expect = b.counting_error + 2.0 * b.decoherence_error + b.singlet_error;
    assert!((mc.empirical_total - expect).abs() <= 4.0 * mc.total_standard_error);
    let physical = montecarlo::run_campaign(&McConfig {
        flip_mode: FlipMode::MidMeasurement,
        ..cfg
    })
    .unwrap();
    assert!(physical.empirical_total < mc.empirical_total);
}

#[test]
fn independent_of_thread_count() {
    let cfg = McConfig {
        n_trials: 30_000,
        master_seed: 123,
        flip_mode: FlipMode::MidMeasurement,
        scenario: Scenario::default(),
    };
    let run_with = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| montecarlo::run_campaign(&cfg).unwrap())
    };
    let one = run_with(1);
    assert_eq!(one, run_with(3));
    assert_eq!(one, run_with(8));
}

#[test]
fn trial_streams_are_distinct() {
    use nvreadout::cavity::SpinState;
    use rand::RngCore;
    let a = montecarlo::trial_stream(1, SpinState::M0, 0).next_u64();
    let b = montecarlo::trial_stream(1, SpinState::M0, 1).next_u64();
    let c = montecarlo::trial_stream(1, SpinState::MPlus1, 0).next_u64();
    let d = montecarlo::trial_stream(2, SpinState::M0, 0).next_u64();
    assert!(a != b && a != c && a != d && b != c);
}
