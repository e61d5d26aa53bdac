//! Rectangular-pulse dynamics: closed-form two-level Rabi flopping, the
//! 2nπ detuning-cancellation rule and the integrated three-level Vee system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::ode::Rk4;
use crate::trace::EvolutionTrace;

/// Allowed |Σp - 1| of an integrated trace before it is rejected.
pub const TRACE_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoLevelPulse {
    /// ħΩ, meV.
    pub rabi_mev: f64,
    /// ħ(ω₀ - ω), meV.
    pub detuning_mev: f64,
    pub duration_ps: f64,
}

impl TwoLevelPulse {
    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_mev > 0.0) {
            return Err(Error::Parameter(format!("Rabi energy must be > 0, got {}", self.rabi_mev)));
        }
        if !(self.duration_ps >= 0.0) || !self.detuning_mev.is_finite() {
            return Err(Error::Parameter("duration must be >= 0 and detuning finite".into()));
        }
        Ok(())
    }
}

/// ħΩ̃ = √((ħΩ)² + (ħΔ)²).
pub fn generalized_rabi(rabi_mev: f64, detuning_mev: f64) -> f64 {
    rabi_mev.hypot(detuning_mev)
}

/// Excited-state probability `(Ω/Ω̃)² sin²(Ω̃t/2)` starting from the ground state.
pub fn two_level_population(consts: &PhysicalConstants, pulse: &TwoLevelPulse, t_ps: f64) -> f64 {
    let eff = generalized_rabi(pulse.rabi_mev, pulse.detuning_mev);
    if eff == 0.0 {
        return 0.0;
    }
    let amp = (pulse.rabi_mev / eff).powi(2);
    amp * (eff * t_ps / (2.0 * consts.hbar())).sin().powi(2)
}

/// Closed-form ground/excited populations on `samples + 1` uniform times.
pub fn two_level_trace(consts: &PhysicalConstants, pulse: &TwoLevelPulse, samples: usize) -> Result<EvolutionTrace> {
    pulse.validate()?;
    let samples = samples.max(1);
    let mut trace = EvolutionTrace::new(vec!["p1".into(), "p2".into()]);
    for s in 0..=samples {
        let t = pulse.duration_ps * s as f64 / samples as f64;
        let p = two_level_population(consts, pulse, t);
        trace.push(t, vec![1.0 - p, p]);
    }
    Ok(trace)
}

/// Detuning ħΔ for which a π pulse of length `tsw_ps` on the addressed
/// transition is a 2nπ pulse on the detuned one: ħΩ √(4n² - 1), ħΩ = πħ/T_sw.
pub fn cancellation_detuning(consts: &PhysicalConstants, tsw_ps: f64, n: u32) -> Result<f64> {
    if !(tsw_ps > 0.0 && tsw_ps.is_finite()) {
        return Err(Error::Parameter(format!("T_sw must be > 0, got {tsw_ps}")));
    }
    if n == 0 {
        return Err(Error::Parameter("cancellation order n must be >= 1".into()));
    }
    let rabi = consts.pi_pulse_energy(tsw_ps);
    let n = f64::from(n);
    Ok(rabi * (4.0 * n * n - 1.0).sqrt())
}

/// Three-level Vee system: level 1 coupled to 2 (addressed) and 3 (leakage)
/// in the rotating frame of the 1→2 drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VeeSpec {
    pub rabi_12_mev: f64,
    pub rabi_13_mev: f64,
    #[serde(default)]
    pub detuning_12_mev: f64,
    pub detuning_13_mev: f64,
    pub duration_ps: f64,
    pub dt_ps: f64,
}

impl VeeSpec {
    /// Equal couplings, resonant 1→2 drive and the default step of
    /// one 2000th of the π-pulse time.
    pub fn new(consts: &PhysicalConstants, rabi_12_mev: f64, detuning_13_mev: f64, duration_ps: f64) -> Self {
        Self {
            rabi_12_mev,
            rabi_13_mev: rabi_12_mev,
            detuning_12_mev: 0.0,
            detuning_13_mev,
            duration_ps,
            dt_ps: pi_time(consts, rabi_12_mev) / 2000.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_12_mev > 0.0) {
            return Err(Error::Parameter(format!("rabi_12 must be > 0, got {}", self.rabi_12_mev)));
        }
        if !(self.rabi_13_mev >= 0.0) {
            return Err(Error::Parameter(format!("rabi_13 must be >= 0, got {}", self.rabi_13_mev)));
        }
        if !(self.duration_ps > 0.0 && self.duration_ps.is_finite()) {
            return Err(Error::Parameter(format!("duration must be > 0, got {}", self.duration_ps)));
        }
        if !(self.dt_ps > 0.0 && self.dt_ps <= self.duration_ps / 100.0) {
            return Err(Error::Parameter(format!(
                "dt must lie in (0, duration/100] = (0, {}], got {}",
                self.duration_ps / 100.0,
                self.dt_ps
            )));
        }
        if !(self.detuning_12_mev.is_finite() && self.detuning_13_mev.is_finite()) {
            return Err(Error::Parameter("detunings must be finite".into()));
        }
        Ok(())
    }
}

/// Length of a resonant π pulse, πħ/ħΩ, in ps.
pub fn pi_time(consts: &PhysicalConstants, rabi_mev: f64) -> f64 {
    PI * consts.hbar() / rabi_mev
}

/// Integrate the Vee system from |1⟩ with fixed-step RK4, sampling every step.
pub fn evolve_vee(consts: &PhysicalConstants, spec: &VeeSpec) -> Result<EvolutionTrace> {
    spec.validate()?;
    let steps = (spec.duration_ps / spec.dt_ps - 1e-9).ceil().max(1.0) as usize;
    let dt = spec.duration_ps / steps as f64;
    let hb = consts.hbar();
    let (w12, w13) = (spec.rabi_12_mev / (2.0 * hb), spec.rabi_13_mev / (2.0 * hb));
    let (d2, d3) = (spec.detuning_12_mev / hb, spec.detuning_13_mev / hb);
    let mi = -Complex64::i();
    let mut f = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        dy[0] = mi * (y[1] * w12 + y[2] * w13);
        dy[1] = mi * (y[0] * w12 + y[1] * d2);
        dy[2] = mi * (y[0] * w13 + y[2] * d3);
    };

    let mut psi = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
    let mut rk = Rk4::new(3);
    let mut trace = EvolutionTrace::new(vec!["p1".into(), "p2".into(), "p3".into()]);
    trace.push(0.0, vec![1.0, 0.0, 0.0]);
    for s in 0..steps {
        rk.step(&mut f, s as f64 * dt, dt, &mut psi);
        let row: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
        let drift = (row.iter().sum::<f64>() - 1.0).abs();
        if drift > TRACE_DRIFT_LIMIT {
            return Err(Error::Drift { drift, limit: TRACE_DRIFT_LIMIT });
        }
        trace.push((s + 1) as f64 * dt, row);
    }
    Ok(trace)
}
