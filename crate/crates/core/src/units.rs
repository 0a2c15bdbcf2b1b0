//! Unit conventions.
//!
//! Rates, linewidths and detunings are energies in µeV (ħ absorbed), optical
//! energies in eV, times in ns or µs as the name suffix says.

/// Planck constant in µeV per GHz.
pub const H_UEV_PER_GHZ: f64 = 4.135667696;

/// Reduced Planck constant in µeV·ns.
pub const HBAR_UEV_NS: f64 = 0.658212;

pub const UEV_PER_EV: f64 = 1.0e6;

/// Converts a frequency in GHz to the equivalent photon energy in µeV.
pub fn ghz_to_microev(f_ghz: f64) -> f64 {
    H_UEV_PER_GHZ * f_ghz
}

/// Energy-equivalent linewidth (µeV) of a decay with lifetime `tau_ns`.
pub fn linewidth_from_lifetime(tau_ns: f64) -> f64 {
    HBAR_UEV_NS / tau_ns
}
