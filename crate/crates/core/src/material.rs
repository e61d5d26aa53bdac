//! Bulk conduction-band models: three-band g(E) and nonparabolic mass m(E).

use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Band parameters of one semiconductor.
///
/// `cb_offset_mev` places the conduction-band edge on a common scale with
/// GaAs at zero, so a heterostructure's confining offset is
/// `barrier.cb_offset_mev - well.cb_offset_mev`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialParams {
    pub name: String,
    pub band_gap_mev: f64,
    pub spin_orbit_mev: f64,
    pub kane_energy_mev: f64,
    pub g_remote: f64,
    pub cb_offset_mev: f64,
    pub band_edge_mass: f64,
}

impl MaterialParams {
    /// Build a material whose `g_remote` is fixed so that `g(0) = g_target`.
    #[allow(clippy::too_many_arguments)]
    pub fn calibrated(
        consts: &PhysicalConstants,
        name: &str,
        band_gap_mev: f64,
        spin_orbit_mev: f64,
        kane_energy_mev: f64,
        cb_offset_mev: f64,
        band_edge_mass: f64,
        g_target: f64,
    ) -> Result<Self> {
        let mut m = Self {
            name: name.to_string(),
            band_gap_mev,
            spin_orbit_mev,
            kane_energy_mev,
            g_remote: 0.0,
            cb_offset_mev,
            band_edge_mass,
        };
        m.validate()?;
        m.g_remote = g_target - bulk_g(consts, &m, 0.0)?;
        Ok(m)
    }

    pub fn inas() -> Self {
        Self::calibrated(&PhysicalConstants::default(), "InAs", 418.0, 380.0, 21_500.0, -450.0, 0.023, -14.9)
            .expect("InAs defaults are valid")
    }

    pub fn gaas() -> Self {
        Self::calibrated(&PhysicalConstants::default(), "GaAs", 1519.0, 341.0, 28_900.0, 0.0, 0.067, -0.44)
            .expect("GaAs defaults are valid")
    }

    /// Al₀.₃₅Ga₀.₆₅As, linear interpolation between GaAs and AlAs for the
    /// band parameters, 60:40 split of the gap difference for the offset.
    pub fn algaas_035() -> Self {
        Self::calibrated(&PhysicalConstants::default(), "Al0.35Ga0.65As", 1955.0, 320.0, 26_170.0, 262.0, 0.096, 0.5)
            .expect("AlGaAs defaults are valid")
    }

    /// Look up one of the built-in materials by (case-insensitive) name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "inas" => Some(Self::inas()),
            "gaas" => Some(Self::gaas()),
            "algaas" | "al0.35ga0.65as" | "algaas035" => Some(Self::algaas_035()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.band_gap_mev,
            self.spin_orbit_mev,
            self.kane_energy_mev,
            self.g_remote,
            self.cb_offset_mev,
            self.band_edge_mass,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::Parameter(format!("{}: non-finite band parameter", self.name)));
        }
        if self.band_gap_mev <= 0.0 {
            return Err(Error::Parameter(format!("{}: band gap must be > 0", self.name)));
        }
        if self.spin_orbit_mev < 0.0 || self.kane_energy_mev < 0.0 {
            return Err(Error::Parameter(format!(
                "{}: spin-orbit splitting and Kane energy must be >= 0",
                self.name
            )));
        }
        if self.band_edge_mass <= 0.0 {
            return Err(Error::Parameter(format!("{}: band-edge mass must be > 0", self.name)));
        }
        Ok(())
    }
}

fn check_energy(material: &MaterialParams, energy_mev: f64) -> Result<()> {
    if !(energy_mev >= 0.0) {
        return Err(Error::Parameter(format!("energy must be >= 0, got {energy_mev}")));
    }
    if material.band_gap_mev + energy_mev <= 0.0 {
        return Err(Error::Parameter(format!("{}: E_g + E must be > 0", material.name)));
    }
    Ok(())
}

/// Bulk electron g-factor at kinetic energy `energy_mev` above the band edge:
/// `g0 + g_remote - (2 E_P / 3) [1/(E_g + E) - 1/(E_g + E + Δ_so)]`.
pub fn bulk_g(consts: &PhysicalConstants, material: &MaterialParams, energy_mev: f64) -> Result<f64> {
    check_energy(material, energy_mev)?;
    let eg = material.band_gap_mev + energy_mev;
    let kane = 2.0 * material.kane_energy_mev / 3.0 * (1.0 / eg - 1.0 / (eg + material.spin_orbit_mev));
    let g = consts.g0() + material.g_remote - kane;
    if !g.is_finite() {
        return Err(Error::Parameter(format!("{}: g({energy_mev}) is not finite", material.name)));
    }
    Ok(g)
}

fn inverse_mass_factor(material: &MaterialParams, energy_mev: f64) -> f64 {
    let eg = material.band_gap_mev + energy_mev;
    1.0 + material.kane_energy_mev / 3.0 * (2.0 / eg + 1.0 / (eg + material.spin_orbit_mev))
}

/// Energy-dependent effective mass in units of m₀, rescaled so that
/// `eff_mass(m, 0) == m.band_edge_mass`.
pub fn eff_mass(material: &MaterialParams, energy_mev: f64) -> Result<f64> {
    check_energy(material, energy_mev)?;
    let m = material.band_edge_mass * inverse_mass_factor(material, 0.0) / inverse_mass_factor(material, energy_mev);
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Parameter(format!("{}: m({energy_mev}) is not positive", material.name)));
    }
    Ok(m)
}
