//! Design and analysis of cavity-enhanced spin readout for a single NV center.
//!
//! The crate is organised bottom-up:
//!
//! - [`cavity`]: closed-form reflection coefficient of a single-sided cavity
//!   with an embedded two-level emitter (weak-excitation steady state),
//!   spectra, spin contrast, coupling-regime classification, Q and Purcell
//!   accounting.
//! - [`readout`]: analytic readout-error budget built on Poissonian photon
//!   counting, detector dead time, spin decoherence and singlet shelving.
//! - [`montecarlo`]: seeded Monte Carlo of the readout experiment, used as an
//!   independent check of the analytic budget.
//! - [`scenario`], [`sweep`], [`presets`], [`table`]: configuration files,
//!   parameter sweeps, figure presets and tabular output used by the CLI.
//!
//! Energies (rates, linewidths, detunings) are expressed in µeV with ħ
//! absorbed; the cavity resonance is in eV. See [`units`].

pub mod cavity;
pub mod error;
pub mod montecarlo;
pub mod presets;
pub mod readout;
pub mod scenario;
pub mod sweep;
pub mod table;
pub mod units;

pub use cavity::{
    CavityParams, EmitterParams, ModelAssumptions, QFactors, ReflectionSpectrum, Regime, SpinState,
};
pub use error::{ModelError, Result};
pub use montecarlo::{CampaignSummary, FlipMode, McConfig, TrialModel, TrialOutcome};
pub use readout::{DetectionSetup, ErrorBudget};
pub use scenario::{MonteCarloSettings, Scenario, ScenarioFile};
