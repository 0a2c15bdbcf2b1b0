//! Scenario configuration files.
//!
//! A scenario is one JSON document with `cavity`, `emitter`, `detection` and
//! `monte_carlo` sections. Every key carries its unit as a suffix and any key
//! may be omitted, in which case the default operating point is used.
//!
//! ```json
//! {"cavity": {"kappa_ueV": 693.9, "eta_ueV": 34695.2, "omega_c_eV": 1.9464},
//!  "detection": {"threshold": 6},
//!  "monte_carlo": {"n_trials": 1000000, "master_seed": 2008, "paper_strict_flip": false}}
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cavity::{CavityParams, EmitterParams, ModelAssumptions};
use crate::error::{ModelError, Result};
use crate::montecarlo::{FlipMode, McConfig};
use crate::readout::DetectionSetup;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Scenario {
    pub cavity: CavityParams,
    pub emitter: EmitterParams,
    pub setup: DetectionSetup,
    pub assumptions: ModelAssumptions,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.cavity.validate()?;
        self.emitter.validate()?;
        self.setup.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MonteCarloSettings {
    pub n_trials: u64,
    pub master_seed: u64,
    pub paper_strict_flip: bool,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        Self {
            n_trials: 1_000_000,
            master_seed: 2008,
            paper_strict_flip: false,
        }
    }
}

impl MonteCarloSettings {
    pub fn flip_mode(&self) -> FlipMode {
        if self.paper_strict_flip {
            FlipMode::PaperStrict
        } else {
            FlipMode::MidMeasurement
        }
    }
}

/// On-disk form of a scenario plus Monte Carlo settings.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioFile {
    pub cavity: CavityParams,
    pub emitter: EmitterParams,
    pub detection: DetectionSetup,
    pub monte_carlo: MonteCarloSettings,
}

impl ScenarioFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let file: ScenarioFile = serde_path_to_error::deserialize(de).map_err(|e| {
            ModelError::Parse {
                path: e.path().to_string(),
                reason: e.inner().to_string(),
            }
        })?;
        file.validate()?;
        Ok(file)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario().validate()?;
        if self.monte_carlo.n_trials < 1 {
            return Err(ModelError::param("n_trials", "must be >= 1"));
        }
        Ok(())
    }

    pub fn scenario(&self) -> Scenario {
        Scenario {
            cavity: self.cavity,
            emitter: self.emitter,
            setup: self.detection,
            assumptions: ModelAssumptions,
        }
    }

    pub fn mc_config(&self) -> McConfig {
        McConfig {
            n_trials: self.monte_carlo.n_trials,
            master_seed: self.monte_carlo.master_seed,
            flip_mode: self.monte_carlo.flip_mode(),
            scenario: self.scenario(),
        }
    }

    pub fn to_json_string(&self) -> String {
        // plain data with finite floats cannot fail to serialise
        serde_json::to_string_pretty(self).expect("scenario serialises")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n").map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })
    }
}

/// Reads, defaults and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ModelError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    ScenarioFile::from_json_str(&text)
}
