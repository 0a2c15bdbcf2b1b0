//! One-dimensional parameter sweeps over a scenario.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cavity::{self, uniform_grid, SpinState};
use crate::error::{ModelError, Result};
use crate::readout::{self, ErrorBudget};
use crate::scenario::Scenario;
use crate::table::{num, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Kappa,
    Eta,
    /// η/κ at fixed total linewidth κ+η.
    EtaOverKappa,
    /// Probe detuning ω − ω_c.
    Detuning,
    G,
    Gamma,
    Threshold,
    NInputPhotons,
}

impl SweepVariable {
    pub const NAMES: [&'static str; 8] = [
        "kappa",
        "eta",
        "eta_over_kappa",
        "detuning",
        "g",
        "gamma",
        "threshold",
        "n_input_photons",
    ];

    /// Output column name, unit suffixed.
    pub fn column(self) -> &'static str {
        match self {
            SweepVariable::Kappa => "kappa_ueV",
            SweepVariable::Eta => "eta_ueV",
            SweepVariable::EtaOverKappa => "eta_over_kappa",
            SweepVariable::Detuning => "detuning_ueV",
            SweepVariable::G => "g_ueV",
            SweepVariable::Gamma => "gamma_ueV",
            SweepVariable::Threshold => "threshold",
            SweepVariable::NInputPhotons => "n_input_photons",
        }
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "kappa" => SweepVariable::Kappa,
            "eta" => SweepVariable::Eta,
            "eta_over_kappa" => SweepVariable::EtaOverKappa,
            "detuning" => SweepVariable::Detuning,
            "g" => SweepVariable::G,
            "gamma" => SweepVariable::Gamma,
            "threshold" => SweepVariable::Threshold,
            "n_input_photons" => SweepVariable::NInputPhotons,
            other => {
                return Err(ModelError::domain(format!(
                    "unknown sweep variable '{other}' (expected one of {})",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    #[default]
    Linear,
    Logarithmic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub n_points: usize,
    pub scale: Scale,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(ModelError::domain("sweep needs at least 2 points"));
        }
        if !(self.min.is_finite() && self.max.is_finite() && self.min < self.max) {
            return Err(ModelError::domain("sweep bounds must be finite with min < max"));
        }
        if self.scale == Scale::Logarithmic && self.min <= 0.0 {
            return Err(ModelError::domain("logarithmic sweep needs min > 0"));
        }
        Ok(())
    }

    /// Sweep values in ascending order, endpoints included.
    pub fn grid(&self) -> Result<Vec<f64>> {
        self.validate()?;
        match self.scale {
            Scale::Linear => uniform_grid(self.min, self.max, self.n_points),
            Scale::Logarithmic => {
                let exps = uniform_grid(self.min.log10(), self.max.log10(), self.n_points)?;
                let mut values: Vec<f64> = exps.into_iter().map(|e| 10f64.powf(e)).collect();
                values[0] = self.min;
                *values.last_mut().expect("n_points >= 2") = self.max;
                Ok(values)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub reflectance_m0: f64,
    pub reflectance_m_plus1: f64,
    pub contrast: f64,
    /// Only defined for a resonant probe with the bright branch above the dark one.
    pub budget: Option<ErrorBudget>,
}

fn apply(base: &Scenario, variable: SweepVariable, value: f64) -> Result<(Scenario, f64)> {
    let mut s = *base;
    let mut detuning = 0.0;
    match variable {
        SweepVariable::Kappa => s.cavity.kappa = value,
        SweepVariable::Eta => s.cavity.eta = value,
        SweepVariable::EtaOverKappa => {
            let total = s.cavity.total_decay();
            s.cavity.kappa = total / (1.0 + value);
            s.cavity.eta = total - s.cavity.kappa;
        }
        SweepVariable::Detuning => detuning = value,
        SweepVariable::G => s.emitter.g = value,
        SweepVariable::Gamma => s.emitter.gamma = value,
        SweepVariable::Threshold => {
            if value < 0.0 {
                return Err(ModelError::param("threshold", "must be >= 0"));
            }
            s.setup.threshold = value.round() as u64;
        }
        SweepVariable::NInputPhotons => s.setup.n_input_photons = value.round() as u64,
    }
    s.validate()?;
    Ok((s, detuning))
}

fn evaluate(base: &Scenario, variable: SweepVariable, value: f64) -> Result<SweepRow> {
    let (s, detuning) = apply(base, variable, value)?;
    let r0 = cavity::reflectance(&s.cavity, &s.emitter, SpinState::M0, detuning)?;
    let r1 = cavity::reflectance(&s.cavity, &s.emitter, SpinState::MPlus1, detuning)?;
    let budget = if variable == SweepVariable::Detuning {
        None
    } else {
        readout::error_budget(&s.cavity, &s.emitter, &s.setup).ok()
    };
    Ok(SweepRow {
        value,
        reflectance_m0: r0,
        reflectance_m_plus1: r1,
        contrast: r1 - r0,
        budget,
    })
}

/// Evaluates every grid point independently; rows come back in grid order.
pub fn run_sweep(base: &Scenario, spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    base.validate()?;
    let grid = spec.grid()?;
    grid.par_iter()
        .map(|&v| evaluate(base, spec.variable, v))
        .collect()
}

pub fn sweep_table(variable: SweepVariable, rows: &[SweepRow]) -> Table {
    let mut t = Table::new([
        variable.column(),
        "reflectance_m0",
        "reflectance_m_plus1",
        "contrast",
        "counting_error",
        "measurement_time_us",
        "decoherence_error",
        "singlet_error",
        "total_error",
    ]);
    for row in rows {
        let mut cells = vec![
            num(row.value),
            num(row.reflectance_m0),
            num(row.reflectance_m_plus1),
            num(row.contrast),
        ];
        match &row.budget {
            Some(b) => cells.extend([
                num(b.counting_error),
                num(b.measurement_time),
                num(b.decoherence_error),
                num(b.singlet_error),
                num(b.total_error),
            ]),
            None => cells.extend(std::iter::repeat_n(Value::Null, 5)),
        }
        t.push(cells);
    }
    t
}
