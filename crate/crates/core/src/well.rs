//! Ground state of a disk-shaped dot: a finite square well along z with a
//! Gaussian lateral envelope, and the envelope-weighted effective g-factor.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::material::{bulk_g, eff_mass, MaterialParams};
use crate::roots::bisect_sign;

/// Distance below the barrier edge at which a state is flagged barely bound.
pub const BARELY_BOUND_MEV: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DotGeometry {
    /// Half of the well width along z (the well spans `-d..d`), nm.
    pub half_width_nm: f64,
    /// Lateral extension of the in-plane Gaussian, nm.
    pub lateral_nm: f64,
    pub well: MaterialParams,
    pub barrier: MaterialParams,
}

impl DotGeometry {
    pub fn new(half_width_nm: f64, lateral_nm: f64, well: MaterialParams, barrier: MaterialParams) -> Self {
        Self { half_width_nm, lateral_nm, well, barrier }
    }

    /// InAs well in GaAs, the default material system.
    pub fn inas_gaas(half_width_nm: f64, lateral_nm: f64) -> Self {
        Self::new(half_width_nm, lateral_nm, MaterialParams::inas(), MaterialParams::gaas())
    }

    /// Conduction-band offset confining the electron, meV.
    pub fn band_offset_mev(&self) -> f64 {
        self.barrier.cb_offset_mev - self.well.cb_offset_mev
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.half_width_nm.is_finite() && self.half_width_nm > 0.0) {
            return Err(Error::Parameter(format!("half width must be > 0, got {}", self.half_width_nm)));
        }
        if !(self.lateral_nm > 0.0) {
            return Err(Error::Parameter(format!("lateral extension must be > 0, got {}", self.lateral_nm)));
        }
        self.well.validate()?;
        self.barrier.validate()?;
        if !(self.band_offset_mev() > 0.0) {
            return Err(Error::Parameter(format!(
                "{} does not confine electrons in {} (offset {} meV)",
                self.barrier.name,
                self.well.name,
                self.band_offset_mev()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellSolution {
    /// Bound-state energy above the well band edge, meV.
    pub energy_mev: f64,
    /// Interior wavenumber, 1/nm.
    pub k: f64,
    /// Barrier decay constant, 1/nm.
    pub kappa: f64,
    pub mass_well: f64,
    pub mass_barrier: f64,
    /// Probability weight inside the well layer.
    pub w_well: f64,
    /// Probability weight in the barrier.
    pub w_barrier: f64,
    /// `(k/m_A) tan(kd) - κ/m_B` at the returned energy, 1/nm.
    pub residual: f64,
    pub barely_bound: bool,
}

struct WellModel<'a> {
    consts: &'a PhysicalConstants,
    geom: &'a DotGeometry,
    offset: f64,
}

impl WellModel<'_> {
    fn k(&self, e: f64) -> Result<f64> {
        Ok((eff_mass(&self.geom.well, e)? * e / self.consts.hbar2_over_2m0()).sqrt())
    }

    fn kappa(&self, e: f64) -> Result<f64> {
        let depth = (self.offset - e).max(0.0);
        Ok((eff_mass(&self.geom.barrier, e)? * depth / self.consts.hbar2_over_2m0()).sqrt())
    }

    /// Current-matching condition multiplied through by cos(kd) so that it
    /// stays finite across the bracket.
    fn matching(&self, e: f64) -> Result<f64> {
        let d = self.geom.half_width_nm;
        let k = self.k(e)?;
        let kappa = self.kappa(e)?;
        let ma = eff_mass(&self.geom.well, e)?;
        let mb = eff_mass(&self.geom.barrier, e)?;
        Ok(k / ma * (k * d).sin() - kappa / mb * (k * d).cos())
    }
}

/// Even-parity ground state of the finite well with BenDaniel–Duke matching
/// `(k/m_A) tan(kd) = κ/m_B` and energy-dependent masses.
pub fn solve_well(consts: &PhysicalConstants, geom: &DotGeometry) -> Result<WellSolution> {
    geom.validate()?;
    let offset = geom.band_offset_mev();
    let model = WellModel { consts, geom, offset };
    let d = geom.half_width_nm;

    // Restrict the bracket to kd <= π/2, where only the ground state lives.
    let mut hi = offset;
    if model.k(offset)? * d > FRAC_PI_2 {
        let mut err = None;
        hi = bisect_sign(0.0, offset, |e| match model.k(e) {
            Ok(k) => k * d - FRAC_PI_2,
            Err(e) => {
                err = Some(e);
                0.0
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }

    let f_lo = model.matching(0.0)?;
    let f_hi = model.matching(hi)?;
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Bracket { what: "finite-well matching", lo: 0.0, hi, f_lo, f_hi });
    }
    let mut err = None;
    let energy = bisect_sign(0.0, hi, |e| {
        model.matching(e).unwrap_or_else(|x| {
            err = Some(x);
            0.0
        })
    });
    if let Some(e) = err {
        return Err(e);
    }

    let k = model.k(energy)?;
    let kappa = model.kappa(energy)?;
    let ma = eff_mass(&geom.well, energy)?;
    let mb = eff_mass(&geom.barrier, energy)?;
    let residual = k / ma * (k * d).tan() - kappa / mb;
    let (w_well, w_barrier) = envelope_weights(k, kappa, d, 1.0);
    Ok(WellSolution {
        energy_mev: energy,
        k,
        kappa,
        mass_well: ma,
        mass_barrier: mb,
        w_well,
        w_barrier,
        residual,
        barely_bound: offset - energy < BARELY_BOUND_MEV,
    })
}

/// Well/barrier probability weights of the unnormalized envelope
/// `a cos(kz)` inside and `a cos(kd) exp(-κ(|z|-d))` outside.
pub fn envelope_weights(k: f64, kappa: f64, half_width: f64, amplitude: f64) -> (f64, f64) {
    let a2 = amplitude * amplitude;
    let kd = k * half_width;
    let inside = if k > 0.0 {
        a2 * (half_width + (2.0 * kd).sin() / (2.0 * k))
    } else {
        a2 * 2.0 * half_width
    };
    let outside = if kappa > 0.0 { a2 * kd.cos().powi(2) / kappa } else { f64::INFINITY };
    if outside.is_infinite() {
        return (0.0, 1.0);
    }
    let total = inside + outside;
    (inside / total, outside / total)
}

/// Ground state of a disk dot: z-confinement, lateral zero-point energy and
/// the envelope-weighted g-factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DotState {
    pub well: WellSolution,
    /// Lateral zero-point energy `2ħ²ω_lt / m_A(E_z)` with `ω_lt = π / (8 d_lt²)`.
    pub lateral_mev: f64,
    pub ground_energy_mev: f64,
    pub g_well: f64,
    pub g_barrier: f64,
    pub g: f64,
}

pub fn lateral_energy(consts: &PhysicalConstants, lateral_nm: f64, mass_well: f64) -> f64 {
    let omega_lt = PI / (8.0 * lateral_nm * lateral_nm);
    4.0 * consts.hbar2_over_2m0() * omega_lt / mass_well
}

pub fn solve_dot(consts: &PhysicalConstants, geom: &DotGeometry) -> Result<DotState> {
    let well = solve_well(consts, geom)?;
    let lateral_mev = lateral_energy(consts, geom.lateral_nm, well.mass_well);
    let g_well = bulk_g(consts, &geom.well, well.energy_mev)?;
    let g_barrier = bulk_g(consts, &geom.barrier, well.energy_mev)?;
    Ok(DotState {
        well,
        lateral_mev,
        ground_energy_mev: well.energy_mev + lateral_mev,
        g_well,
        g_barrier,
        g: weighted_g(consts, well.w_well, well.w_barrier, g_well, g_barrier),
    })
}

pub(crate) fn weighted_g(consts: &PhysicalConstants, w_well: f64, w_barrier: f64, g_well: f64, g_barrier: f64) -> f64 {
    let g0 = consts.g0();
    g0 + w_well * (g_well - g0) + w_barrier * (g_barrier - g0)
}

/// Quantization energy E_k of the dot, meV.
pub fn dot_ground_energy(consts: &PhysicalConstants, geom: &DotGeometry) -> Result<f64> {
    Ok(solve_dot(consts, geom)?.ground_energy_mev)
}

/// Effective g_zz of the dot.
pub fn dot_g(consts: &PhysicalConstants, geom: &DotGeometry) -> Result<f64> {
    Ok(solve_dot(consts, geom)?.g)
}
