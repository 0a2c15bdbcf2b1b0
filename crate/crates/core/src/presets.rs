//! Figure presets with their parameters pinned.
//!
//! - `fig3a`..`fig3d`: reflection spectra for κ = 75, 7.5, 0.75, 0.075 µeV
//!   with η = 50κ and ω_a = ω_c.
//! - `fig4`: on-resonance reflectance against η (κ neglected), log-spaced.
//! - `fig5`: spin contrast against η/κ at Q_tot = 55.

use crate::cavity::{self, CavityParams, EmitterParams, ReflectionSpectrum, SpinState};
use crate::cavity::{DEFAULT_ETA_OVER_KAPPA, DEFAULT_OMEGA_C_EV, DEFAULT_Q_TOTAL};
use crate::error::{ModelError, Result};
use crate::table::{num, Table};

pub const FIG3_KAPPAS_UEV: [f64; 4] = [75.0, 7.5, 0.75, 0.075];
pub const FIG3_SPAN_UEV: f64 = 100.0;
pub const FIG3_POINTS: usize = 2001;

pub const FIG4_ETA_MIN_UEV: f64 = 1.0e2;
pub const FIG4_ETA_MAX_UEV: f64 = 1.0e6;
pub const FIG4_POINTS: usize = 200;

pub const FIG5_RATIO_MIN: f64 = 1.0;
pub const FIG5_RATIO_MAX: f64 = 100.0;
pub const FIG5_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4,
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig3c,
        Preset::Fig3d,
        Preset::Fig4,
        Preset::Fig5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig3c => "fig3c",
            Preset::Fig3d => "fig3d",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                ModelError::domain(format!(
                    "unknown preset '{s}' (expected fig3a, fig3b, fig3c, fig3d, fig4 or fig5)"
                ))
            })
    }
}

pub fn fig3_cavity(kappa: f64) -> CavityParams {
    CavityParams {
        kappa,
        eta: DEFAULT_ETA_OVER_KAPPA * kappa,
        omega_c: DEFAULT_OMEGA_C_EV,
    }
}

pub fn fig3_spectrum(kappa: f64) -> Result<ReflectionSpectrum> {
    cavity::spectrum(
        &fig3_cavity(kappa),
        &EmitterParams::default(),
        SpinState::M0,
        -FIG3_SPAN_UEV,
        FIG3_SPAN_UEV,
        FIG3_POINTS,
    )
}

/// On-resonance reflectance of m=0 for log-spaced η with κ = 0, over `n_points`.
pub fn fig4_curve(n_points: usize) -> Result<Vec<(f64, f64)>> {
    let emitter = EmitterParams::default();
    let exps = cavity::uniform_grid(FIG4_ETA_MIN_UEV.log10(), FIG4_ETA_MAX_UEV.log10(), n_points)?;
    exps.into_iter()
        .map(|e| {
            let eta = 10f64.powf(e);
            let c = CavityParams {
                kappa: 0.0,
                eta,
                omega_c: DEFAULT_OMEGA_C_EV,
            };
            Ok((eta, cavity::reflectance(&c, &emitter, SpinState::M0, 0.0)?))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastPoint {
    pub eta_over_kappa: f64,
    pub reflectance_m0: f64,
    pub reflectance_m_plus1: f64,
    pub contrast: f64,
}

pub fn fig5_point(eta_over_kappa: f64) -> Result<ContrastPoint> {
    let c = CavityParams::from_q_total(DEFAULT_OMEGA_C_EV, DEFAULT_Q_TOTAL, eta_over_kappa);
    let e = EmitterParams::default();
    let r0 = cavity::reflectance(&c, &e, SpinState::M0, 0.0)?;
    let r1 = cavity::reflectance(&c, &e, SpinState::MPlus1, 0.0)?;
    Ok(ContrastPoint {
        eta_over_kappa,
        reflectance_m0: r0,
        reflectance_m_plus1: r1,
        contrast: r1 - r0,
    })
}

pub fn fig5_curve() -> Result<Vec<ContrastPoint>> {
    cavity::uniform_grid(FIG5_RATIO_MIN, FIG5_RATIO_MAX, FIG5_POINTS)?
        .into_iter()
        .map(fig5_point)
        .collect()
}

pub fn spectrum_table(s: &ReflectionSpectrum) -> Table {
    let mut t = Table::new(["detuning_ueV", "reflectance", "r_re", "r_im"]);
    for ((d, r), rr) in s.detunings.iter().zip(&s.r_complex).zip(&s.reflectance) {
        t.push_f64(&[*d, *rr, r.re, r.im]);
    }
    t
}

pub fn run_preset(preset: Preset) -> Result<Table> {
    match preset {
        Preset::Fig3a | Preset::Fig3b | Preset::Fig3c | Preset::Fig3d => {
            let idx = preset as usize;
            Ok(spectrum_table(&fig3_spectrum(FIG3_KAPPAS_UEV[idx])?))
        }
        Preset::Fig4 => {
            let mut t = Table::new(["eta_ueV", "reflectance_at_resonance"]);
            for (eta, r) in fig4_curve(FIG4_POINTS)? {
                t.push_f64(&[eta, r]);
            }
            Ok(t)
        }
        Preset::Fig5 => {
            let mut t = Table::new([
                "eta_over_kappa",
                "reflectance_m0",
                "reflectance_m_plus1",
                "contrast",
                "q_cavity",
            ]);
            for p in fig5_curve()? {
                let q = DEFAULT_Q_TOTAL * (1.0 + p.eta_over_kappa);
                t.push(vec![
                    num(p.eta_over_kappa),
                    num(p.reflectance_m0),
                    num(p.reflectance_m_plus1),
                    num(p.contrast),
                    num(q),
                ]);
            }
            Ok(t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig6".parse::<Preset>().is_err());
    }

    #[test]
    fn fig3_kappa_mapping() {
        let t = run_preset(Preset::Fig3d).unwrap();
        assert_eq!(t.rows.len(), FIG3_POINTS);
        let s = fig3_spectrum(0.075).unwrap();
        assert_eq!(t.column_f64("reflectance").unwrap(), s.reflectance);
    }

    #[test]
    fn fig4_low_eta_reflects() {
        let curve = fig4_curve(FIG4_POINTS).unwrap();
        assert!(curve[0].1 > 0.98);
    }

    #[test]
    fn fig5_anchor_points() {
        assert!((fig5_point(50.0).unwrap().contrast - 0.92).abs() < 0.01);
        assert!((fig5_point(10.0).unwrap().contrast - 0.65).abs() < 0.02);
        let t = run_preset(Preset::Fig5).unwrap();
        let ratios = t.column_f64("eta_over_kappa").unwrap();
        assert_eq!(ratios.len(), 100);
        assert_eq!(ratios[49], 50.0);
    }
}
