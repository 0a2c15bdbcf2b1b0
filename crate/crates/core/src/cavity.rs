//! Single-sided cavity with an embedded emitter, probed in reflection.
//!
//! In the weak-excitation limit the Heisenberg equations for the cavity field
//! and the emitter dipole have a steady state that, combined with the
//! input-output relation of the waveguide port, gives
//!
//! ```text
//!          [i(ω_a−ω) + γ/2][i(ω_c−ω) + κ/2 − η/2] − σ_z g²
//! r(ω) = ---------------------------------------------------
//!          [i(ω_a−ω) + γ/2][i(ω_c−ω) + κ/2 + η/2] − σ_z g²
//! ```
//!
//! with σ_z = −1. The cavity is locked to the m=0 transition, so
//! ω_a = ω_c + δ(spin).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::units::{self, UEV_PER_EV};

/// Cavity resonance used throughout: 637 nm.
pub const DEFAULT_OMEGA_C_EV: f64 = 1.9464;
pub const DEFAULT_Q_TOTAL: f64 = 55.0;
pub const DEFAULT_ETA_OVER_KAPPA: f64 = 50.0;

/// Cavity decay channels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityParams {
    /// Side leakage ħκ (µeV).
    #[serde(rename = "kappa_ueV")]
    pub kappa: f64,
    /// Waveguide coupling ħη (µeV).
    #[serde(rename = "eta_ueV")]
    pub eta: f64,
    /// Cavity resonance (eV).
    #[serde(rename = "omega_c_eV")]
    pub omega_c: f64,
}

impl Default for CavityParams {
    fn default() -> Self {
        Self::from_q_total(DEFAULT_OMEGA_C_EV, DEFAULT_Q_TOTAL, DEFAULT_ETA_OVER_KAPPA)
    }
}

impl CavityParams {
    pub fn new(kappa: f64, eta: f64, omega_c: f64) -> Result<Self> {
        let c = Self {
            kappa,
            eta,
            omega_c,
        };
        c.validate()?;
        Ok(c)
    }

    /// Splits the total linewidth ω_c/Q_tot between side leakage and the
    /// waveguide so that η = `eta_over_kappa`·κ.
    pub fn from_q_total(omega_c: f64, q_total: f64, eta_over_kappa: f64) -> Self {
        let total = omega_c * UEV_PER_EV / q_total;
        let kappa = total / (1.0 + eta_over_kappa);
        Self {
            kappa,
            eta: total - kappa,
            omega_c,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(ModelError::param("kappa_ueV", "must be finite and >= 0"));
        }
        if !(self.eta.is_finite() && self.eta >= 0.0) {
            return Err(ModelError::param("eta_ueV", "must be finite and >= 0"));
        }
        if self.kappa + self.eta <= 0.0 {
            return Err(ModelError::param(
                "eta_ueV",
                "kappa_ueV + eta_ueV must be > 0",
            ));
        }
        if !(self.omega_c.is_finite() && self.omega_c > 0.0) {
            return Err(ModelError::param("omega_c_eV", "must be finite and > 0"));
        }
        Ok(())
    }

    /// κ + η in µeV.
    pub fn total_decay(&self) -> f64 {
        self.kappa + self.eta
    }

    pub fn omega_c_microev(&self) -> f64 {
        self.omega_c * UEV_PER_EV
    }
}

/// Emitter and its coupling to the cavity mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitterParams {
    /// Emitter-cavity coupling ħg (µeV).
    #[serde(rename = "g_ueV")]
    pub g: f64,
    /// Zero-phonon linewidth ħγ (µeV).
    #[serde(rename = "gamma_ueV")]
    pub gamma: f64,
    /// Detuning of the m=+1 transition from the m=0 transition (µeV).
    #[serde(rename = "delta_m_plus1_ueV")]
    pub delta_m_plus1: f64,
    /// Detuning of the m=−1 transition from the m=0 transition (µeV).
    #[serde(rename = "delta_m_minus1_ueV")]
    pub delta_m_minus1: f64,
    /// Spontaneous-emission lifetime (ns).
    #[serde(rename = "tau_ns")]
    pub tau_rad: f64,
    /// Singlet branching rate from the m=0 excited state, in units of 1/τ.
    pub k_singlet_m0: f64,
    /// Singlet branching rate from the m=±1 excited states, in units of 1/τ.
    pub k_singlet_m1: f64,
}

impl Default for EmitterParams {
    fn default() -> Self {
        Self {
            g: 30.0,
            gamma: 0.1,
            delta_m_plus1: units::ghz_to_microev(1.4),
            delta_m_minus1: units::ghz_to_microev(2.5),
            tau_rad: 13.0,
            k_singlet_m0: 1.0e-4,
            k_singlet_m1: 0.4,
        }
    }
}

impl EmitterParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.g.is_finite() && self.g >= 0.0) {
            return Err(ModelError::param("g_ueV", "must be finite and >= 0"));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(ModelError::param("gamma_ueV", "must be finite and > 0"));
        }
        if !self.delta_m_plus1.is_finite() {
            return Err(ModelError::param("delta_m_plus1_ueV", "must be finite"));
        }
        if !self.delta_m_minus1.is_finite() {
            return Err(ModelError::param("delta_m_minus1_ueV", "must be finite"));
        }
        if !(self.tau_rad.is_finite() && self.tau_rad > 0.0) {
            return Err(ModelError::param("tau_ns", "must be finite and > 0"));
        }
        if !(self.k_singlet_m0.is_finite() && self.k_singlet_m0 >= 0.0) {
            return Err(ModelError::param("k_singlet_m0", "must be finite and >= 0"));
        }
        if !(self.k_singlet_m1.is_finite() && self.k_singlet_m1 >= self.k_singlet_m0) {
            return Err(ModelError::param(
                "k_singlet_m1",
                "must be finite and >= k_singlet_m0",
            ));
        }
        Ok(())
    }

    /// Radiative linewidth ħ/τ (µeV).
    pub fn radiative_linewidth(&self) -> f64 {
        units::linewidth_from_lifetime(self.tau_rad)
    }
}

/// Fixed assumptions of the reflection model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModelAssumptions;

impl ModelAssumptions {
    /// Population inversion in the weak-excitation limit.
    pub const SIGMA_Z: f64 = -1.0;

    pub fn sigma_z(&self) -> f64 {
        Self::SIGMA_Z
    }

    pub fn probe_is_classical_weak_field(&self) -> bool {
        true
    }
}

/// NV ground-state spin projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpinState {
    M0,
    MPlus1,
    MMinus1,
}

impl SpinState {
    pub const ALL: [SpinState; 3] = [SpinState::M0, SpinState::MPlus1, SpinState::MMinus1];

    /// Offset of this spin's optical transition from the m=0 transition (µeV).
    pub fn transition_detuning(self, emitter: &EmitterParams) -> f64 {
        match self {
            SpinState::M0 => 0.0,
            SpinState::MPlus1 => emitter.delta_m_plus1,
            SpinState::MMinus1 => emitter.delta_m_minus1,
        }
    }

    pub fn is_bright(self) -> bool {
        self != SpinState::M0
    }

    pub fn label(self) -> &'static str {
        match self {
            SpinState::M0 => "m0",
            SpinState::MPlus1 => "m_plus1",
            SpinState::MMinus1 => "m_minus1",
        }
    }
}

impl std::str::FromStr for SpinState {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "m0" | "0" => Ok(SpinState::M0),
            "m_plus1" | "m+1" | "+1" => Ok(SpinState::MPlus1),
            "m_minus1" | "m-1" | "-1" => Ok(SpinState::MMinus1),
            other => Err(ModelError::domain(format!(
                "unknown spin state '{other}' (expected m0, m_plus1 or m_minus1)"
            ))),
        }
    }
}

fn reflection_unchecked(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    spin: SpinState,
    detuning: f64,
) -> Complex64 {
    let sigma_z = ModelAssumptions.sigma_z();
    let i = Complex64::i();
    // ω_c − ω and ω_a − ω, with ω = ω_c + detuning
    let cavity_offset = -detuning;
    let atom_offset = spin.transition_detuning(emitter) - detuning;

    let dipole = i * atom_offset + emitter.gamma / 2.0;
    let coupling = -sigma_z * emitter.g * emitter.g;
    let num = dipole * (i * cavity_offset + (cavity.kappa - cavity.eta) / 2.0) + coupling;
    let den = dipole * (i * cavity_offset + (cavity.kappa + cavity.eta) / 2.0) + coupling;
    num / den
}

/// Complex reflection amplitude b_out/b_in at probe detuning `detuning` = ω − ω_c (µeV).
pub fn reflection_coefficient(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    spin: SpinState,
    detuning: f64,
) -> Result<Complex64> {
    cavity.validate()?;
    emitter.validate()?;
    if !detuning.is_finite() {
        return Err(ModelError::domain("probe detuning must be finite"));
    }
    Ok(reflection_unchecked(cavity, emitter, spin, detuning))
}

/// Reflected intensity |r|².
pub fn reflectance(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    spin: SpinState,
    detuning: f64,
) -> Result<f64> {
    reflection_coefficient(cavity, emitter, spin, detuning).map(|r| r.norm_sqr())
}

/// Sampled reflection response over a uniform detuning grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectionSpectrum {
    /// ω − ω_c (µeV).
    pub detunings: Vec<f64>,
    pub r_complex: Vec<Complex64>,
    pub reflectance: Vec<f64>,
}

impl ReflectionSpectrum {
    pub fn len(&self) -> usize {
        self.detunings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.detunings.is_empty()
    }

    /// Indices of interior local minima of the reflectance.
    pub fn local_minima(&self) -> Vec<usize> {
        local_extrema(&self.reflectance, |a, b| a < b)
    }

    /// Indices of interior local maxima of the reflectance.
    pub fn local_maxima(&self) -> Vec<usize> {
        local_extrema(&self.reflectance, |a, b| a > b)
    }

    pub fn grid_step(&self) -> f64 {
        (self.detunings[self.len() - 1] - self.detunings[0]) / (self.len() - 1) as f64
    }
}

// A plateau counts once: strictly beyond the left neighbour, not beyond the right.
fn local_extrema(values: &[f64], beyond: impl Fn(f64, f64) -> bool) -> Vec<usize> {
    if values.len() < 3 {
        return Vec::new();
    }
    (1..values.len() - 1)
        .filter(|&i| beyond(values[i], values[i - 1]) && !beyond(values[i + 1], values[i]))
        .collect()
}

/// Inclusive uniform grid of `n_points` values between `min` and `max`.
pub fn uniform_grid(min: f64, max: f64, n_points: usize) -> Result<Vec<f64>> {
    if n_points < 2 {
        return Err(ModelError::domain("grid needs at least 2 points"));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(ModelError::domain(format!(
            "grid bounds must be finite with min < max (got {min}, {max})"
        )));
    }
    let step = (max - min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|i| if i == n_points - 1 { max } else { min + step * i as f64 })
        .collect())
}

pub fn spectrum(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    spin: SpinState,
    detuning_min: f64,
    detuning_max: f64,
    n_points: usize,
) -> Result<ReflectionSpectrum> {
    cavity.validate()?;
    emitter.validate()?;
    let detunings = uniform_grid(detuning_min, detuning_max, n_points)?;
    let r_complex: Vec<Complex64> = detunings
        .iter()
        .map(|&d| reflection_unchecked(cavity, emitter, spin, d))
        .collect();
    let reflectance = r_complex.iter().map(|r| r.norm_sqr()).collect();
    Ok(ReflectionSpectrum {
        detunings,
        r_complex,
        reflectance,
    })
}

/// Reflectance difference between `bright_spin` and m=0, probing at ω = ω_c.
pub fn contrast(cavity: &CavityParams, emitter: &EmitterParams, bright_spin: SpinState) -> Result<f64> {
    contrast_at(cavity, emitter, bright_spin, 0.0)
}

/// Spin contrast at an arbitrary probe detuning.
pub fn contrast_at(
    cavity: &CavityParams,
    emitter: &EmitterParams,
    bright_spin: SpinState,
    detuning: f64,
) -> Result<f64> {
    if bright_spin == SpinState::M0 {
        return Err(ModelError::domain("contrast needs a bright spin state (m_plus1 or m_minus1)"));
    }
    let bright = reflectance(cavity, emitter, bright_spin, detuning)?;
    let dark = reflectance(cavity, emitter, SpinState::M0, detuning)?;
    Ok(bright - dark)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    StrongCoupling,
    OneDimensionalAtom,
    WeakCoupling,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::StrongCoupling => "strong_coupling",
            Regime::OneDimensionalAtom => "one_dimensional_atom",
            Regime::WeakCoupling => "weak_coupling",
        }
    }
}

/// Coupling regime from the ordering of g, κ+η, γ and the crossover 4g²/γ.
///
/// Ties go to the less strongly coupled regime. An emitter with g ≤ γ is
/// always weakly coupled.
pub fn classify_regime(cavity: &CavityParams, emitter: &EmitterParams) -> Result<Regime> {
    cavity.validate()?;
    emitter.validate()?;
    let total = cavity.total_decay();
    let g = emitter.g;
    let crossover = crossover_eta(g, emitter.gamma)?;
    let regime = if total >= crossover || g <= emitter.gamma {
        Regime::WeakCoupling
    } else if g > total {
        Regime::StrongCoupling
    } else {
        Regime::OneDimensionalAtom
    };
    Ok(regime)
}

/// Waveguide coupling 4g²/γ at which the on-resonance reflectance vanishes.
pub fn crossover_eta(g: f64, gamma: f64) -> Result<f64> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(ModelError::param("gamma_ueV", "must be finite and > 0"));
    }
    if !(g.is_finite() && g >= 0.0) {
        return Err(ModelError::param("g_ueV", "must be finite and >= 0"));
    }
    Ok(4.0 * g * g / gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QFactors {
    /// ω_c/κ; `None` when κ = 0 (unbounded).
    pub q_cavity: Option<f64>,
    /// ω_c/(κ+η).
    pub q_total: f64,
}

pub fn q_factors(cavity: &CavityParams) -> Result<QFactors> {
    cavity.validate()?;
    let omega = cavity.omega_c_microev();
    let q_cavity = (cavity.kappa > 0.0).then(|| omega / cavity.kappa);
    Ok(QFactors {
        q_cavity,
        q_total: omega / cavity.total_decay(),
    })
}

/// 4g²/((κ+η)·γ_rad), using the radiative linewidth ħ/τ rather than the ZPL width.
pub fn purcell_factor(cavity: &CavityParams, emitter: &EmitterParams) -> Result<f64> {
    cavity.validate()?;
    emitter.validate()?;
    Ok(4.0 * emitter.g * emitter.g / (cavity.total_decay() * emitter.radiative_linewidth()))
}
