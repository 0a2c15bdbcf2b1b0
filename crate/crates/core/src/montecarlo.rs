//! Seeded Monte Carlo of the readout experiment.
//!
//! Each trial prepares a spin, draws a Poisson number of detected photons and
//! applies the threshold rule. Decoherence flips (both branches) and singlet
//! shelving (m=0 branch only, the only branch whose transition is driven)
//! occur at a uniformly distributed fraction of the measurement window.
//!
//! Every trial owns a ChaCha8 stream selected by `(branch, trial index)` from
//! the master seed, so results do not depend on scheduling or thread count.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cavity::{self, SpinState};
use crate::error::{ModelError, Result};
use crate::readout;
use crate::scenario::Scenario;

/// Below this mean the Poisson draw is done by sequential inversion.
const INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlipMode {
    /// A flip at fraction f of the window switches the remaining (1 − f) of
    /// the expected counts to the opposite branch.
    #[default]
    MidMeasurement,
    /// Any flip or shelving event is counted as a readout error.
    PaperStrict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Declared {
    Dark,
    Bright,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TrialOutcome {
    pub true_spin: SpinState,
    pub detected_counts: u64,
    pub declared_spin: Declared,
    pub spin_flipped_during_measurement: bool,
    pub shelved_in_singlet: bool,
    pub is_error: bool,
}

/// Per-trial stochastic model derived from a scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialModel {
    /// Mean detected counts for m0, m+1, m−1.
    pub lambda: [f64; 3],
    pub threshold: u64,
    /// Probability of a decoherence flip within the measurement window.
    pub p_flip: f64,
    /// Probability of singlet shelving during an m=0 measurement.
    pub p_shelve: f64,
    pub flip_mode: FlipMode,
}

fn spin_index(spin: SpinState) -> usize {
    match spin {
        SpinState::M0 => 0,
        SpinState::MPlus1 => 1,
        SpinState::MMinus1 => 2,
    }
}

impl TrialModel {
    pub fn from_scenario(scenario: &Scenario, flip_mode: FlipMode) -> Result<Self> {
        scenario.validate()?;
        let Scenario {
            cavity,
            emitter,
            setup,
            ..
        } = scenario;
        let mut lambda = [0.0; 3];
        for spin in SpinState::ALL {
            let r = cavity::reflectance(cavity, emitter, spin, 0.0)?;
            lambda[spin_index(spin)] = readout::expected_counts(setup, r)?;
        }
        let t_meas = readout::measurement_time(lambda[1], setup)?;
        let p_flip = readout::decoherence_error(t_meas, setup.t2)?;
        let purcell = cavity::purcell_factor(cavity, emitter)?;
        let p_shelve = readout::singlet_error(setup.n_input_photons as f64, emitter, purcell)?;
        Ok(Self {
            lambda,
            threshold: setup.threshold,
            p_flip,
            p_shelve,
            flip_mode,
        })
    }

    /// Two-branch model with flips disabled.
    pub fn counting_only(lambda_dark: f64, lambda_bright: f64, threshold: u64) -> Self {
        Self {
            lambda: [lambda_dark, lambda_bright, lambda_bright],
            threshold,
            p_flip: 0.0,
            p_shelve: 0.0,
            flip_mode: FlipMode::MidMeasurement,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(ModelError::domain("branch means must be finite and >= 0"));
        }
        for (name, p) in [("p_flip", self.p_flip), ("p_shelve", self.p_shelve)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::domain(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    fn mean(&self, spin: SpinState) -> f64 {
        self.lambda[spin_index(spin)]
    }

    fn opposite(spin: SpinState) -> SpinState {
        match spin {
            SpinState::M0 => SpinState::MPlus1,
            _ => SpinState::M0,
        }
    }
}

/// Poisson draw; inversion for small means, `rand_distr` above.
pub fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    if lambda < INVERSION_LIMIT {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            // u within rounding of 1: the tail is exhausted
            if p < f64::EPSILON * cdf && k as f64 > lambda {
                break;
            }
        }
        k
    } else {
        Poisson::new(lambda)
            .map(|d| d.sample(rng) as u64)
            .unwrap_or(0)
    }
}

/// One readout of a spin prepared in `spin`.
pub fn run_trial<R: Rng + ?Sized>(model: &TrialModel, spin: SpinState, rng: &mut R) -> TrialOutcome {
    // fixed draw order: flip, flip time, shelve, shelve time, counts
    let flip_roll: f64 = rng.random();
    let flip_at: f64 = rng.random();
    let shelve_roll: f64 = rng.random();
    let shelve_at: f64 = rng.random();

    let flipped = flip_roll < model.p_flip;
    let shelved = spin == SpinState::M0 && shelve_roll < model.p_shelve;

    let own = model.mean(spin);
    let mean = match (model.flip_mode, flipped, shelved) {
        (FlipMode::MidMeasurement, true, _) | (FlipMode::MidMeasurement, _, true) => {
            let f = match (flipped, shelved) {
                (true, true) => flip_at.min(shelve_at),
                (true, false) => flip_at,
                _ => shelve_at,
            };
            f * own + (1.0 - f) * model.mean(TrialModel::opposite(spin))
        }
        _ => own,
    };
    let detected_counts = sample_poisson(mean, rng);
    let declared_spin = if detected_counts >= model.threshold {
        Declared::Bright
    } else {
        Declared::Dark
    };
    let misdeclared = (declared_spin == Declared::Bright) != spin.is_bright();
    let is_error = misdeclared
        || (model.flip_mode == FlipMode::PaperStrict && (flipped || shelved));
    TrialOutcome {
        true_spin: spin,
        detected_counts,
        declared_spin,
        spin_flipped_during_measurement: flipped,
        shelved_in_singlet: shelved,
        is_error,
    }
}

/// Independent stream for trial `index` of `spin`'s branch.
pub fn trial_stream(master_seed: u64, spin: SpinState, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((spin_index(spin) as u64) << 56) | index);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub n_trials: u64,
    pub master_seed: u64,
    pub flip_mode: FlipMode,
    pub scenario: Scenario,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchTally {
    pub errors: u64,
    pub flips: u64,
    pub shelvings: u64,
    /// `histogram[k]` = number of trials with k detected photons.
    pub histogram: Vec<u64>,
}

impl BranchTally {
    fn empty() -> Self {
        Self {
            errors: 0,
            flips: 0,
            shelvings: 0,
            histogram: Vec::new(),
        }
    }

    fn add(&mut self, o: &TrialOutcome) {
        self.errors += o.is_error as u64;
        self.flips += o.spin_flipped_during_measurement as u64;
        self.shelvings += o.shelved_in_singlet as u64;
        let k = o.detected_counts as usize;
        if self.histogram.len() <= k {
            self.histogram.resize(k + 1, 0);
        }
        self.histogram[k] += 1;
    }

    fn merge(mut self, other: Self) -> Self {
        self.errors += other.errors;
        self.flips += other.flips;
        self.shelvings += other.shelvings;
        if self.histogram.len() < other.histogram.len() {
            self.histogram.resize(other.histogram.len(), 0);
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignSummary {
    pub n_trials: u64,
    pub master_seed: u64,
    pub empirical_dark_error: f64,
    pub empirical_bright_error: f64,
    /// Dark plus bright error, the same convention as the analytic counting error.
    pub empirical_total: f64,
    pub dark_standard_error: f64,
    pub bright_standard_error: f64,
    pub total_standard_error: f64,
    pub dark: BranchTally,
    pub bright: BranchTally,
}

fn run_branch(model: &TrialModel, spin: SpinState, n_trials: u64, seed: u64) -> BranchTally {
    let base = ChaCha8Rng::seed_from_u64(seed);
    let tag = (spin_index(spin) as u64) << 56;
    (0..n_trials)
        .into_par_iter()
        .fold(BranchTally::empty, |mut tally, i| {
            let mut rng = base.clone();
            rng.set_stream(tag | i);
            tally.add(&run_trial(model, spin, &mut rng));
            tally
        })
        .reduce(BranchTally::empty, BranchTally::merge)
}

fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// `n_trials` readouts each of m=0 and m=+1.
pub fn run_campaign_with_model(model: &TrialModel, n_trials: u64, master_seed: u64) -> Result<CampaignSummary> {
    model.validate()?;
    if n_trials < 1 {
        return Err(ModelError::domain("n_trials must be >= 1"));
    }
    let dark = run_branch(model, SpinState::M0, n_trials, master_seed);
    let bright = run_branch(model, SpinState::MPlus1, n_trials, master_seed);
    let pd = dark.errors as f64 / n_trials as f64;
    let pb = bright.errors as f64 / n_trials as f64;
    let sd = binomial_se(pd, n_trials);
    let sb = binomial_se(pb, n_trials);
    Ok(CampaignSummary {
        n_trials,
        master_seed,
        empirical_dark_error: pd,
        empirical_bright_error: pb,
        empirical_total: pd + pb,
        dark_standard_error: sd,
        bright_standard_error: sb,
        total_standard_error: sd.hypot(sb),
        dark,
        bright,
    })
}

pub fn run_campaign(config: &McConfig) -> Result<CampaignSummary> {
    let model = TrialModel::from_scenario(&config.scenario, config.flip_mode)?;
    run_campaign_with_model(&model, config.n_trials, config.master_seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::readout::{counting_error, DetectionSetup};

    #[test]
    fn zero_efficiency_is_always_dark() {
        let scenario = Scenario {
            setup: DetectionSetup {
                efficiency: 0.0,
                ..DetectionSetup::default()
            },
            ..Scenario::default()
        };
        let model = TrialModel::from_scenario(&scenario, FlipMode::MidMeasurement).unwrap();
        for spin in SpinState::ALL {
            for i in 0..200 {
                let mut rng = trial_stream(3, spin, i);
                let o = run_trial(&model, spin, &mut rng);
                assert_eq!(o.detected_counts, 0);
                assert_eq!(o.declared_spin, Declared::Dark);
            }
        }
    }

    #[test]
    fn declared_follows_threshold() {
        let model = TrialModel::counting_only(2.0, 8.0, 5);
        for i in 0..500 {
            let mut rng = trial_stream(11, SpinState::MPlus1, i);
            let o = run_trial(&model, SpinState::MPlus1, &mut rng);
            assert_eq!(o.declared_spin == Declared::Bright, o.detected_counts >= 5);
        }
    }

    #[test]
    fn single_trial_rates_are_binary() {
        let s = run_campaign_with_model(&TrialModel::counting_only(1.0, 18.0, 6), 1, 9).unwrap();
        for p in [s.empirical_dark_error, s.empirical_bright_error] {
            assert!(p == 0.0 || p == 1.0);
        }
    }

    #[test]
    fn identical_branches_misclassify_once_per_pair() {
        let n = 20_000;
        let s = run_campaign_with_model(&TrialModel::counting_only(5.0, 5.0, 5), n, 4).unwrap();
        assert!((s.empirical_total - 1.0).abs() <= 3.0 * s.total_standard_error);
    }

    #[test]
    fn matches_analytic_counting_error() {
        let n = 200_000;
        let s = run_campaign_with_model(&TrialModel::counting_only(1.0, 6.0, 3), n, 21).unwrap();
        let analytic = counting_error(1.0, 6.0, 3).unwrap();
        assert!((s.empirical_total - analytic).abs() <= 3.0 * s.total_standard_error);
    }

    #[test]
    fn strict_mode_counts_every_flip() {
        let mut model = TrialModel::counting_only(0.0, 50.0, 10);
        model.p_flip = 0.2;
        model.flip_mode = FlipMode::PaperStrict;
        let s = run_campaign_with_model(&model, 5_000, 8).unwrap();
        // the two branches are perfectly separable, so errors are exactly flips
        assert_eq!(s.dark.errors, s.dark.flips);
        assert_eq!(s.bright.errors, s.bright.flips);
    }

    #[test]
    fn large_mean_sampler() {
        let mut rng = trial_stream(5, SpinState::M0, 0);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| sample_poisson(120.0, &mut rng) as f64).sum::<f64>() / n as f64;
        assert!((mean - 120.0).abs() < 3.0 * (120.0f64 / n as f64).sqrt() * 1.5);
    }

    #[test]
    fn deterministic() {
        let cfg = McConfig {
            n_trials: 10_000,
            master_seed: 77,
            flip_mode: FlipMode::MidMeasurement,
            scenario: Scenario::default(),
        };
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&cfg).unwrap();
        assert_eq!(a, b);
        let c = run_campaign(&McConfig {
            master_seed: 78,
            ..cfg
        })
        .unwrap();
        assert_ne!(a.dark.histogram, c.dark.histogram);
    }

    #[test]
    fn rejects_zero_trials() {
        assert!(run_campaign_with_model(&TrialModel::counting_only(1.0, 2.0, 1), 0, 0).is_err());
    }
}
