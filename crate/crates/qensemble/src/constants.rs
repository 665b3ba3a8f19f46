//! Physical constants and the derived electron-volume quantities.
//!
//! Everything is SI. The library-wide energy convention is the total
//! energy E_T = m u^2 (twice the classical kinetic energy), so the free
//! wave-number cutoff is k_max = m u / hbar = sqrt(m E_T) / hbar.
//! Operations that deliberately use the kinetic convention E_k = m u^2 / 2
//! (with k^2 = 2 m E_k / hbar^2) say so at their definition.

use crate::error::{Error, Result};

/// Reduced Planck constant (J s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Electron mass (kg), CODATA 2018.
pub const M_ELECTRON: f64 = 9.109_383_7015e-31;

/// Hydrogen atomic radius used to size the free-electron volume (m).
pub const R_HYDROGEN: f64 = 3.3e-10;

/// Registry of the constants every other module consumes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Electron mass (kg).
    pub m_electron: f64,
    /// Radius parameter the electron volume is derived from (m).
    pub r_hydrogen: f64,
    /// Free-electron volume 2 pi r^3 (m^3).
    pub v_electron: f64,
    /// Local constant hbar / v_electron (kg m^-1 s^-1).
    pub beta_el: f64,
}

impl PhysicalConstants {
    /// Registry for the standard electron parameters.
    pub fn electron() -> Self {
        derived_constants(R_HYDROGEN).expect("default radius is positive")
    }
}

/// Build the constants registry for a given radius parameter.
///
/// The electron volume is 2 pi r^3 and the local constant is
/// beta_el = hbar / v_electron.
pub fn derived_constants(r_hydrogen: f64) -> Result<PhysicalConstants> {
    if !(r_hydrogen > 0.0) || !r_hydrogen.is_finite() {
        return Err(Error::Domain(format!(
            "radius must be positive and finite, got {r_hydrogen}"
        )));
    }
    let v_electron = 2.0 * std::f64::consts::PI * r_hydrogen.powi(3);
    Ok(PhysicalConstants {
        hbar: HBAR,
        m_electron: M_ELECTRON,
        r_hydrogen,
        v_electron,
        beta_el: HBAR / v_electron,
    })
}

/// Proportionality constant alpha = 4 pi m^4 / (3 hbar^3) relating the
/// space integral of a free ensemble's |psi|^2 to u^3.
pub fn norm_integral_coefficient(mass: f64, hbar: f64) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::Domain(format!("mass must be positive, got {mass}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
    }
    Ok(4.0 * std::f64::consts::PI * mass.powi(4) / (3.0 * hbar.powi(3)))
}
