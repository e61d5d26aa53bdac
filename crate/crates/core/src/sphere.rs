//! Spherical dot of material A embedded in B: s-state of the finite
//! spherical well and the four-term g-factor decomposition.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::material::{bulk_g, eff_mass, MaterialParams};
use crate::roots::bisect_sign;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereG {
    pub radius_nm: f64,
    pub energy_mev: f64,
    pub q: f64,
    pub kappa: f64,
    pub w_well: f64,
    pub w_barrier: f64,
    pub g_well: f64,
    pub g_barrier: f64,
    /// V(R) f²(R), the boundary density times the dot volume.
    pub surface_density: f64,
    /// g0
    pub term_g0: f64,
    /// [g_A(E) - g0] w_A
    pub term_well: f64,
    /// [g_B(E) - g0] w_B
    pub term_barrier: f64,
    /// [g_B(E) - g_A(E)] V(R) f²(R)
    pub term_interface: f64,
    pub g: f64,
}

struct SphereModel<'a> {
    consts: &'a PhysicalConstants,
    well: &'a MaterialParams,
    barrier: &'a MaterialParams,
    radius: f64,
    offset: f64,
}

impl SphereModel<'_> {
    fn q(&self, e: f64) -> Result<f64> {
        Ok((eff_mass(self.well, e)? * e / self.consts.hbar2_over_2m0()).sqrt())
    }

    fn kappa(&self, e: f64) -> Result<f64> {
        let depth = (self.offset - e).max(0.0);
        Ok((eff_mass(self.barrier, e)? * depth / self.consts.hbar2_over_2m0()).sqrt())
    }

    /// BenDaniel–Duke matching for f = sin(qr)/r inside and e^{-κr}/r
    /// outside, multiplied by sin(qR): positive below the root, negative above.
    fn matching(&self, e: f64) -> Result<f64> {
        let x = self.q(e)? * self.radius;
        let kr = self.kappa(e)? * self.radius;
        let ma = eff_mass(self.well, e)?;
        let mb = eff_mass(self.barrier, e)?;
        Ok((x * x.cos() - x.sin()) / ma + (kr + 1.0) * x.sin() / mb)
    }
}

pub fn sphere_g(
    consts: &PhysicalConstants,
    radius_nm: f64,
    well: &MaterialParams,
    barrier: &MaterialParams,
) -> Result<SphereG> {
    if !(radius_nm.is_finite() && radius_nm > 0.0) {
        return Err(Error::Parameter(format!("radius must be > 0, got {radius_nm}")));
    }
    well.validate()?;
    barrier.validate()?;
    let offset = barrier.cb_offset_mev - well.cb_offset_mev;
    if !(offset > 0.0) {
        return Err(Error::Parameter(format!("{} does not confine electrons in {}", barrier.name, well.name)));
    }
    let model = SphereModel { consts, well, barrier, radius: radius_nm, offset };

    let mut hi = offset;
    if model.q(offset)? * radius_nm > PI {
        hi = bisect_sign(0.0, offset, |e| model.q(e).map(|q| q * radius_nm - PI).unwrap_or(0.0));
    }
    let f_hi = model.matching(hi)?;
    if f_hi >= 0.0 {
        return Err(Error::Unbound(format!(
            "{radius_nm} nm {} sphere in {} holds no s-state below the {offset} meV offset",
            well.name, barrier.name
        )));
    }
    // The sign convention of the bisection helper wants f < 0 below the root.
    let energy = bisect_sign(0.0, hi, |e| -model.matching(e).unwrap_or(f64::NAN));
    let q = model.q(energy)?;
    let kappa = model.kappa(energy)?;

    let x = q * radius_nm;
    let inside = 4.0 * PI * (radius_nm / 2.0 - (2.0 * x).sin() / (4.0 * q));
    let outside = 4.0 * PI * x.sin().powi(2) / (2.0 * kappa);
    let norm = inside + outside;
    let w_well = inside / norm;
    let w_barrier = outside / norm;
    let volume = 4.0 / 3.0 * PI * radius_nm.powi(3);
    let f2_boundary = x.sin().powi(2) / (radius_nm * radius_nm) / norm;
    let surface_density = volume * f2_boundary;

    let g0 = consts.g0();
    let g_well = bulk_g(consts, well, energy)?;
    let g_barrier = bulk_g(consts, barrier, energy)?;
    let term_well = (g_well - g0) * w_well;
    let term_barrier = (g_barrier - g0) * w_barrier;
    let term_interface = (g_barrier - g_well) * surface_density;
    Ok(SphereG {
        radius_nm,
        energy_mev: energy,
        q,
        kappa,
        w_well,
        w_barrier,
        g_well,
        g_barrier,
        surface_density,
        term_g0: g0,
        term_well,
        term_barrier,
        term_interface,
        g: g0 + term_well + term_barrier + term_interface,
    })
}
