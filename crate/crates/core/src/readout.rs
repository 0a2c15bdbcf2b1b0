//! Analytic readout-error budget.
//!
//! The spin is read by counting reflected photons: the m=0 branch is nearly
//! dark, the m=±1 branches reflect. Errors come from overlap of the two
//! Poisson count distributions, from spin decoherence during the
//! dead-time-limited measurement window, and from shelving through the
//! singlet state while the m=0 transition is driven. The three channels are
//! summed.

use serde::{Deserialize, Serialize};

use crate::cavity::{self, CavityParams, EmitterParams, SpinState};
use crate::error::{ModelError, Result};

/// Mean counts below this are treated as exactly zero in tail sums.
pub const LAMBDA_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionSetup {
    /// Probe photons sent per measurement.
    pub n_input_photons: u64,
    /// Overall detection efficiency in [0, 1].
    pub efficiency: f64,
    /// Declare bright iff detected counts ≥ threshold.
    pub threshold: u64,
    #[serde(rename = "dead_time_ns")]
    pub dead_time: f64,
    /// Fraction of the detector saturation rate used, in (0, 1].
    pub duty_factor: f64,
    #[serde(rename = "t2_us")]
    pub t2: f64,
}

impl Default for DetectionSetup {
    fn default() -> Self {
        Self {
            n_input_photons: 60,
            efficiency: 0.33,
            threshold: 6,
            dead_time: 50.0,
            duty_factor: 1.0 / 3.0,
            t2: 600.0,
        }
    }
}

impl DetectionSetup {
    pub fn validate(&self) -> Result<()> {
        if self.n_input_photons < 1 {
            return Err(ModelError::param("n_input_photons", "must be >= 1"));
        }
        if !(0.0..=1.0).contains(&self.efficiency) {
            return Err(ModelError::param("efficiency", "must lie in [0, 1]"));
        }
        if !(self.dead_time.is_finite() && self.dead_time >= 0.0) {
            return Err(ModelError::param("dead_time_ns", "must be finite and >= 0"));
        }
        if !(self.duty_factor > 0.0 && self.duty_factor <= 1.0) {
            return Err(ModelError::param("duty_factor", "must lie in (0, 1]"));
        }
        // T2 may be infinite (no decoherence)
        if !(self.t2 > 0.0) {
            return Err(ModelError::param("t2_us", "must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    /// Expected detected counts for m=0.
    pub lambda_dark: f64,
    /// Expected detected counts for m=+1.
    pub lambda_bright: f64,
    pub counting_error: f64,
    #[serde(rename = "measurement_time_us")]
    pub measurement_time: f64,
    pub decoherence_error: f64,
    pub singlet_error: f64,
    pub total_error: f64,
}

/// Mean detected photons for a branch with the given reflectance.
pub fn expected_counts(setup: &DetectionSetup, reflectance_value: f64) -> Result<f64> {
    // small overshoot from rounding in |r|² is tolerated
    if !(-1e-12..=1.0 + 1e-12).contains(&reflectance_value) {
        return Err(ModelError::domain(format!(
            "reflectance {reflectance_value} outside [0, 1]"
        )));
    }
    Ok(setup.n_input_photons as f64 * setup.efficiency * reflectance_value.clamp(0.0, 1.0))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda >= 0.0) {
        return Err(ModelError::domain(format!(
            "Poisson mean must be finite and >= 0 (got {lambda})"
        )));
    }
    Ok(())
}

/// ln k!
pub fn ln_factorial(k: u64) -> f64 {
    if k <= 170 {
        (2..=k).map(|j| (j as f64).ln()).sum()
    } else {
        // Stirling series; error below f64 resolution for k > 170
        let x = k as f64;
        x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
            - 1.0 / (360.0 * x.powi(3))
            + 1.0 / (1260.0 * x.powi(5))
    }
}

fn ln_pmf(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    k as f64 * lambda.ln() - lambda - ln_factorial(k)
}

pub fn poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(ln_pmf(k, lambda).exp())
}

/// P(N ≤ k).
pub fn poisson_cdf(k: u64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(cdf_unchecked(k, lambda))
}

fn cdf_unchecked(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let ln_lambda = lambda.ln();
    let mut ln_term = -lambda;
    let mut sum = ln_term.exp();
    for j in 1..=k {
        ln_term += ln_lambda - (j as f64).ln();
        let term = ln_term.exp();
        sum += term;
        if j as f64 > lambda && term < sum * 1e-17 {
            break;
        }
    }
    sum.min(1.0)
}

/// P(N > k), summed directly in the upper tail to avoid cancellation.
pub fn poisson_sf(k: u64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(sf_unchecked(k, lambda))
}

fn sf_unchecked(k: u64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    if (k as f64) < lambda {
        return (1.0 - cdf_unchecked(k, lambda)).max(0.0);
    }
    let ln_lambda = lambda.ln();
    let mut j = k + 1;
    let mut ln_term = ln_pmf(j, lambda);
    let mut sum = 0.0;
    loop {
        let term = ln_term.exp();
        sum += term;
        if term <= sum * 1e-17 || term == 0.0 {
            break;
        }
        j += 1;
        ln_term += ln_lambda - (j as f64).ln();
    }
    sum.min(1.0)
}

fn floor_lambda(lambda: f64) -> f64 {
    if lambda < LAMBDA_FLOOR {
        0.0
    } else {
        lambda
    }
}

/// P(N ≥ threshold).
fn tail_at_least(threshold: u64, lambda: f64) -> f64 {
    match threshold {
        0 => 1.0,
        t => sf_unchecked(t - 1, lambda),
    }
}

/// P(N < threshold).
fn tail_below(threshold: u64, lambda: f64) -> f64 {
    match threshold {
        0 => 0.0,
        t => cdf_unchecked(t - 1, lambda),
    }
}

/// Misassignment probability of the rule "bright iff count ≥ threshold",
/// summed over the dark and bright branches.
pub fn counting_error(lambda_dark: f64, lambda_bright: f64, threshold: u64) -> Result<f64> {
    check_lambda(lambda_dark)?;
    check_lambda(lambda_bright)?;
    if lambda_dark > lambda_bright {
        return Err(ModelError::domain(format!(
            "dark mean {lambda_dark} exceeds bright mean {lambda_bright}"
        )));
    }
    let dark = floor_lambda(lambda_dark);
    let bright = floor_lambda(lambda_bright);
    let err = tail_at_least(threshold, dark) + tail_below(threshold, bright);
    Ok(err.clamp(0.0, 1.0))
}

/// Threshold in `0..=ceil(3·λ_bright)` minimising [`counting_error`]; ties
/// resolve to the smaller threshold.
pub fn optimal_threshold(lambda_dark: f64, lambda_bright: f64) -> Result<u64> {
    check_lambda(lambda_dark)?;
    check_lambda(lambda_bright)?;
    if lambda_dark >= lambda_bright {
        return Err(ModelError::domain(format!(
            "optimal threshold needs dark mean {lambda_dark} < bright mean {lambda_bright}"
        )));
    }
    let upper = (3.0 * lambda_bright).ceil() as u64;
    let mut best = (0, counting_error(lambda_dark, lambda_bright, 0)?);
    for t in 1..=upper {
        let err = counting_error(lambda_dark, lambda_bright, t)?;
        if err < best.1 {
            best = (t, err);
        }
    }
    Ok(best.0)
}

/// Time (µs) to register `n_detected` photons at the setup's fraction of the
/// dead-time-limited saturation rate.
pub fn measurement_time(n_detected: f64, setup: &DetectionSetup) -> Result<f64> {
    if !(n_detected.is_finite() && n_detected >= 0.0) {
        return Err(ModelError::domain("detected photon number must be finite and >= 0"));
    }
    Ok(n_detected * setup.dead_time / setup.duty_factor / 1000.0)
}

/// Probability that the spin dephases within `t_meas` (same time unit as `t2`).
pub fn decoherence_error(t_meas: f64, t2: f64) -> Result<f64> {
    if !(t_meas.is_finite() && t_meas >= 0.0) {
        return Err(ModelError::domain("measurement time must be finite and >= 0"));
    }
    if !(t2 > 0.0) {
        return Err(ModelError::param("t2_us", "must be > 0"));
    }
    Ok(-(-t_meas / t2).exp_m1())
}

/// Per-excitation probability of decaying through the singlet from the
/// Purcell-enhanced m=0 excited state.
pub fn singlet_branching(emitter: &EmitterParams, purcell: f64) -> f64 {
    let k = emitter.k_singlet_m0;
    if k == 0.0 {
        return 0.0;
    }
    k / (k + 1.0 + purcell)
}

/// Probability of at least one singlet shelving event in `n_excitations`
/// optical cycles.
pub fn singlet_error(n_excitations: f64, emitter: &EmitterParams, purcell: f64) -> Result<f64> {
    if !(n_excitations.is_finite() && n_excitations >= 0.0) {
        return Err(ModelError::domain("excitation number must be finite and >= 0"));
    }
    if !(purcell.is_finite() && purcell >= 0.0) {
        return Err(ModelError::domain("Purcell factor must be finite and >= 0"));
    }
    if !(emitter.k_singlet_m0.is_finite() && emitter.k_singlet_m0 >= 0.0) {
        return Err(ModelError::param("k_singlet_m0", "must be finite and >= 0"));
    }
    let p1 = singlet_branching(emitter, purcell);
    Ok(-(n_excitations * (-p1).ln_1p()).exp_m1())
}

/// Full budget for the m=0 versus m=+1 decision with the probe on the
/// cavity resonance.
pub fn error_budget(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    setup: &DetectionSetup,
) -> Result<ErrorBudget> {
    setup.validate()?;
    let dark_r = cavity::reflectance(cavity, emitter, SpinState::M0, 0.0)?;
    let bright_r = cavity::reflectance(cavity, emitter, SpinState::MPlus1, 0.0)?;
    let lambda_dark = expected_counts(setup, dark_r)?;
    let lambda_bright = expected_counts(setup, bright_r)?;

    let counting = counting_error(lambda_dark, lambda_bright, setup.threshold)?;
    let t_meas = measurement_time(lambda_bright, setup)?;
    let decoherence = decoherence_error(t_meas, setup.t2)?;
    let purcell = cavity::purcell_factor(cavity, emitter)?;
    let singlet = singlet_error(setup.n_input_photons as f64, emitter, purcell)?;

    Ok(ErrorBudget {
        lambda_dark,
        lambda_bright,
        counting_error: counting,
        measurement_time: t_meas,
        decoherence_error: decoherence,
        singlet_error: singlet,
        total_error: (counting + decoherence + singlet).clamp(0.0, 1.0),
    })
}
