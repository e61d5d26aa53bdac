use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants in the unit system used throughout the crate:
/// energies in meV, times in ps, lengths in nm, fields in T.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    /// Bohr magneton, meV/T.
    mu_b: f64,
    /// Reduced Planck constant, meV·ps.
    hbar: f64,
    /// Free-electron Landé factor.
    g0: f64,
    /// ħ²/(2 m₀), meV·nm².
    hbar2_over_2m0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            mu_b: 0.057_883_82,
            hbar: 0.658_211_96,
            g0: 2.0,
            hbar2_over_2m0: 38.099_821_2,
        }
    }
}

impl PhysicalConstants {
    pub fn new(mu_b: f64, hbar: f64, g0: f64, hbar2_over_2m0: f64) -> Result<Self> {
        let c = Self { mu_b, hbar, g0, hbar2_over_2m0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mu_b", self.mu_b),
            ("hbar", self.hbar),
            ("g0", self.g0),
            ("hbar2_over_2m0", self.hbar2_over_2m0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn mu_b(&self) -> f64 {
        self.mu_b
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn hbar2_over_2m0(&self) -> f64 {
        self.hbar2_over_2m0
    }

    /// Zeeman splitting μ_B·g·B in meV.
    pub fn zeeman(&self, g: f64, field_tesla: f64) -> f64 {
        self.mu_b * g * field_tesla
    }

    /// ħΩ of a rectangular π pulse lasting `duration_ps`.
    pub fn pi_pulse_energy(&self, duration_ps: f64) -> f64 {
        std::f64::consts::PI * self.hbar / duration_ps
    }
}
