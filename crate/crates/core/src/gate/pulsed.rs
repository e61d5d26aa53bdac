//! Pulsed evolution of the two-electron system in the extended basis under
//! rotating-wave optical and magnetic drives.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::sync::Arc;

use super::basis::{enumerate_basis, fidelity, BasisMode, Configuration, Orbital, TwoElectronBasis, TwoElectronState};
use super::ops::{cnot_ideal, cnot_sequence, product_state, CnotRoles, GateOp};
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::ode::Rk4;
use crate::spectrum::{level_table, Spin, SpinLevelTable, StackDesign};
use crate::trace::EvolutionTrace;

/// Largest tolerated |‖ψ‖² - 1| during pulsed evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Fixed-step RK4 in the interaction picture.
    #[default]
    Rk4,
    /// Piecewise-constant rotating-frame Hamiltonian, diagonalized per pulse.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulsedConfig {
    /// On-site Coulomb energy of a doubly occupied dot, meV.
    pub coulomb_mev: f64,
    /// Integration steps per switching time T_sw.
    pub steps_per_tsw: usize,
    pub integrator: Integrator,
    /// Trace sampling stride in steps.
    pub record_every: usize,
}

impl Default for PulsedConfig {
    fn default() -> Self {
        Self { coulomb_mev: 50.0, steps_per_tsw: 8000, integrator: Integrator::Rk4, record_every: 20 }
    }
}

impl PulsedConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.coulomb_mev > 0.0 && self.coulomb_mev.is_finite()) {
            return Err(Error::Parameter(format!("U must be > 0, got {}", self.coulomb_mev)));
        }
        if self.steps_per_tsw < 100 || self.record_every == 0 {
            return Err(Error::Parameter("steps_per_tsw must be >= 100 and record_every >= 1".into()));
        }
        Ok(())
    }
}

/// Spin levels and drive strengths seen by the pulses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSystem {
    pub table: SpinLevelTable,
    pub tsw_ps: f64,
    pub b1_tesla: f64,
    pub constants: PhysicalConstants,
}

impl PulseSystem {
    pub fn from_stack(stack: &StackDesign) -> Result<Self> {
        Ok(Self {
            table: level_table(stack)?,
            tsw_ps: stack.tsw_ps,
            b1_tesla: stack.b1_tesla,
            constants: stack.constants,
        })
    }

    /// Every single-electron level multiplied by `factor`; drive strengths
    /// are kept, so all spectral separations grow by `factor`.
    pub fn with_scaled_separations(&self, factor: f64) -> Self {
        let mut s = self.clone();
        for l in &mut s.table.levels {
            l[0] *= factor;
            l[1] *= factor;
        }
        for e in &mut s.table.quantization_mev {
            *e *= factor;
        }
        s
    }

    fn level(&self, o: Orbital) -> f64 {
        self.table.levels[o.dot][o.spin.index()]
    }

    fn optical_rabi(&self) -> f64 {
        self.constants.pi_pulse_energy(self.tsw_ps)
    }

    fn magnetic_rabi(&self, dot: usize) -> f64 {
        self.constants.zeeman(self.table.g[dot].abs(), self.b1_tesla)
    }
}

#[derive(Debug, Clone, Copy)]
struct Coupling {
    a: usize,
    b: usize,
    v: f64,
    /// n_b - n_a
    dn: f64,
    /// E_b - E_a - ħω (n_b - n_a), meV
    delta: f64,
}

struct Pulse {
    duration: f64,
    omega_mev: f64,
    phase: f64,
    /// Photon-number potential of each configuration.
    n: Vec<f64>,
    couplings: Vec<Coupling>,
}

fn config_energy(sys: &PulseSystem, c: &Configuration, u: f64) -> f64 {
    sys.level(c.a) + sys.level(c.b) + if c.doubly_occupied() { u } else { 0.0 }
}

fn sign_or_one(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

fn build_pulse(sys: &PulseSystem, basis: &TwoElectronBasis, energies: &[f64], op: &GateOp) -> Result<Pulse> {
    let nd = basis.n_dots;
    op.validate(nd)?;
    // Single-electron photon number: absorbing a photon raises it by one.
    let mut p = vec![[0.0f64; 2]; nd];
    let (duration, omega_mev, is_hop) = match *op {
        GateOp::Hop { spin, k, l, .. } => {
            for s in Spin::ALL {
                for d in 1..nd {
                    let step = sign_or_one(sys.table.levels[d][s.index()] - sys.table.levels[d - 1][s.index()]);
                    p[d][s.index()] = p[d - 1][s.index()] + step;
                }
            }
            let w = (sys.level(Orbital::new(k, spin)) - sys.level(Orbital::new(l, spin))).abs();
            (sys.tsw_ps, w, true)
        }
        GateOp::Flip { dot, .. } => {
            for (d, pd) in p.iter_mut().enumerate() {
                let up_higher = sys.table.levels[d][0] > sys.table.levels[d][1];
                *pd = if up_higher { [1.0, 0.0] } else { [0.0, 1.0] };
            }
            let rabi = sys.magnetic_rabi(dot);
            if !(rabi > 0.0) {
                return Err(Error::Parameter(format!(
                    "dot {} has no magnetic Rabi coupling (g = {}, B1 = {})",
                    dot + 1,
                    sys.table.g[dot],
                    sys.b1_tesla
                )));
            }
            let w = (sys.table.levels[dot][0] - sys.table.levels[dot][1]).abs();
            (PI * sys.constants.hbar() / rabi, w, false)
        }
    };
    let n: Vec<f64> = basis
        .states()
        .iter()
        .map(|c| p[c.a.dot][c.a.spin.index()] + p[c.b.dot][c.b.spin.index()])
        .collect();

    let mut couplings = Vec::new();
    for (a, c) in basis.states().iter().enumerate() {
        for (e, other) in [(c.a, c.b), (c.b, c.a)] {
            let mut targets: Vec<(Orbital, f64)> = Vec::with_capacity(2);
            if is_hop {
                let v = sys.optical_rabi() / 2.0;
                if e.dot > 0 {
                    targets.push((Orbital::new(e.dot - 1, e.spin), v));
                }
                if e.dot + 1 < nd {
                    targets.push((Orbital::new(e.dot + 1, e.spin), v));
                }
            } else {
                targets.push((Orbital::new(e.dot, e.spin.flipped()), sys.magnetic_rabi(e.dot) / 2.0));
            }
            for (dest, v) in targets {
                let Some(img) = Configuration::new(dest, other) else { continue };
                let Some(b) = basis.index_of(&img) else { continue };
                if b <= a {
                    continue;
                }
                let dn = n[b] - n[a];
                couplings.push(Coupling { a, b, v, dn, delta: energies[b] - energies[a] - omega_mev * dn });
            }
        }
    }
    Ok(Pulse { duration, omega_mev, phase: op.phase_rad(), n, couplings })
}

#[derive(Debug, Clone)]
pub struct PulsedRun {
    /// Final state in the interaction picture of the bare energies.
    pub state: TwoElectronState,
    pub trace: EvolutionTrace,
    /// Population left on doubly occupied configurations.
    pub leakage: f64,
    pub norm_error: f64,
    pub durations_ps: Vec<f64>,
}

fn check_norm(psi: &[Complex64], worst: &mut f64) -> Result<()> {
    let drift = (psi.iter().map(Complex64::norm_sqr).sum::<f64>() - 1.0).abs();
    *worst = worst.max(drift);
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::Drift { drift, limit: NORM_DRIFT_LIMIT });
    }
    Ok(())
}

/// Run `sequence` from `initial`, which is lifted to the extended basis.
pub fn evolve_pulsed(
    sys: &PulseSystem,
    sequence: &[GateOp],
    initial: &TwoElectronState,
    cfg: &PulsedConfig,
) -> Result<PulsedRun> {
    cfg.validate()?;
    let nd = sys.table.n_dots();
    if initial.basis().n_dots != nd {
        return Err(Error::Contract(format!(
            "state covers {} dots but the stack has {nd}",
            initial.basis().n_dots
        )));
    }
    if !(sys.tsw_ps > 0.0) {
        return Err(Error::Parameter(format!("T_sw must be > 0, got {}", sys.tsw_ps)));
    }
    let basis = Arc::new(enumerate_basis(nd, BasisMode::Extended));
    let mut psi: Vec<Complex64> = initial.embed(basis.clone(), 0.0)?.amplitudes().to_vec();
    let energies: Vec<f64> = basis.states().iter().map(|c| config_energy(sys, c, cfg.coulomb_mev)).collect();
    let hbar = sys.constants.hbar();
    let dt_nominal = sys.tsw_ps / cfg.steps_per_tsw as f64;

    let mut trace = EvolutionTrace::new(basis.labels());
    trace.push(0.0, psi.iter().map(Complex64::norm_sqr).collect());
    let mut worst = 0.0;
    let mut t0 = 0.0;
    let mut durations = Vec::with_capacity(sequence.len());
    let mut rk = Rk4::new(basis.len());

    for op in sequence {
        let pulse = build_pulse(sys, &basis, &energies, op)?;
        let steps = (pulse.duration / dt_nominal).ceil().max(1.0) as usize;
        let dt = pulse.duration / steps as f64;
        durations.push(pulse.duration);
        match cfg.integrator {
            Integrator::Rk4 => {
                let rates: Vec<(usize, usize, Complex64, f64)> = pulse
                    .couplings
                    .iter()
                    .map(|c| {
                        let amp = Complex64::from_polar(c.v / hbar, -c.dn * pulse.phase);
                        (c.a, c.b, amp, c.delta / hbar)
                    })
                    .collect();
                let mut f = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
                    dy.iter_mut().for_each(|d| *d = Complex64::new(0.0, 0.0));
                    for &(a, b, amp, w) in &rates {
                        // H_ba/ħ = amp e^{iwt}; dy = -i H y / ħ.
                        let h = amp * Complex64::from_polar(1.0, w * t);
                        dy[b] += Complex64::new(h.im, -h.re) * y[a];
                        let hc = h.conj();
                        dy[a] += Complex64::new(hc.im, -hc.re) * y[b];
                    }
                };
                for s in 0..steps {
                    rk.step(&mut f, t0 + s as f64 * dt, dt, &mut psi);
                    check_norm(&psi, &mut worst)?;
                    if (s + 1) % cfg.record_every == 0 || s + 1 == steps {
                        trace.push(t0 + (s + 1) as f64 * dt, psi.iter().map(Complex64::norm_sqr).collect());
                    }
                }
            }
            Integrator::Exact => {
                let dim = basis.len();
                let lambda: Vec<f64> = energies.iter().zip(&pulse.n).map(|(e, n)| e - pulse.omega_mev * n).collect();
                let shift = lambda.iter().copied().fold(f64::INFINITY, f64::min);
                let lam: Vec<f64> = lambda.iter().map(|l| l - shift).collect();
                let mut h = DMatrix::<Complex64>::from_diagonal(&DVector::from_iterator(
                    dim,
                    lam.iter().map(|&l| Complex64::new(l, 0.0)),
                ));
                for c in &pulse.couplings {
                    let z = Complex64::from_polar(c.v, -c.dn * pulse.phase);
                    h[(c.b, c.a)] += z;
                    h[(c.a, c.b)] += z.conj();
                }
                let eig = h.symmetric_eigen();
                let q = &eig.eigenvectors;
                let phases = DMatrix::<Complex64>::from_diagonal(&DVector::from_iterator(
                    dim,
                    eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * dt / hbar)),
                ));
                let step_u = q * phases * q.adjoint();
                let frame = |t: f64, sign: f64| -> Vec<Complex64> {
                    lam.iter().map(|&l| Complex64::from_polar(1.0, sign * l * t / hbar)).collect()
                };
                let into = frame(t0, -1.0);
                let mut r = DVector::from_iterator(dim, psi.iter().zip(&into).map(|(a, f)| a * f));
                for s in 0..steps {
                    r = &step_u * r;
                    check_norm(r.as_slice(), &mut worst)?;
                    if (s + 1) % cfg.record_every == 0 || s + 1 == steps {
                        trace.push(t0 + (s + 1) as f64 * dt, r.iter().map(Complex64::norm_sqr).collect());
                    }
                }
                let out = frame(t0 + pulse.duration, 1.0);
                psi = r.iter().zip(&out).map(|(a, f)| a * f).collect();
            }
        }
        t0 += pulse.duration;
    }
    let state = TwoElectronState::from_raw(basis, psi);
    let leakage = state.double_occupancy();
    Ok(PulsedRun { state, trace, leakage, norm_error: worst, durations_ps: durations })
}

/// The controlled-NOT with a quarter-turn drive phase on the final C1
/// pulse, which cancels the control-dependent phase left by the resonant
/// π pulses.
pub fn compensated_cnot_sequence(table: &SpinLevelTable, roles: &CnotRoles) -> Result<Vec<GateOp>> {
    roles.validate(table.n_dots())?;
    let mut seq = cnot_sequence(roles);
    let uphill = table.levels[roles.swap][Spin::Down.index()] - table.levels[roles.control][Spin::Down.index()];
    let last = seq.len() - 1;
    seq[last] = seq[last].with_phase(sign_or_one(uphill) * FRAC_PI_2);
    Ok(seq)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputFidelity {
    /// `00`, `01`, `10`, `11` (control, target) or `++`.
    pub input: String,
    pub fidelity: f64,
    pub leakage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulsedCnotReport {
    pub sequence: Vec<String>,
    pub inputs: Vec<InputFidelity>,
    pub average_fidelity: f64,
    pub min_fidelity: f64,
    pub max_leakage: f64,
}

/// The four computational inputs and the uniform superposition.
pub fn cnot_report_inputs(n_dots: usize, roles: &CnotRoles) -> Result<Vec<(String, TwoElectronState)>> {
    let basis = Arc::new(enumerate_basis(n_dots, BasisMode::Strict));
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let unit = |s: usize| if s == 0 { [one, zero] } else { [zero, one] };
    let mut out = Vec::with_capacity(5);
    for c in 0..2 {
        for t in 0..2 {
            out.push((format!("{c}{t}"), product_state(basis.clone(), roles, unit(c), unit(t))?));
        }
    }
    out.push(("++".into(), product_state(basis, roles, [h, h], [h, h])?));
    Ok(out)
}

/// Fidelity of the pulsed `sequence` against the ideal controlled-NOT.
pub fn pulsed_cnot_report(
    sys: &PulseSystem,
    roles: &CnotRoles,
    sequence: &[GateOp],
    cfg: &PulsedConfig,
) -> Result<PulsedCnotReport> {
    let inputs = cnot_report_inputs(sys.table.n_dots(), roles)?;
    let results: Vec<InputFidelity> = inputs
        .par_iter()
        .map(|(label, input)| {
            let ideal = cnot_ideal(input, roles)?;
            let run = evolve_pulsed(sys, sequence, input, cfg)?;
            Ok(InputFidelity { input: label.clone(), fidelity: fidelity(&ideal, &run.state), leakage: run.leakage })
        })
        .collect::<Result<_>>()?;
    let average = results.iter().map(|r| r.fidelity).sum::<f64>() / results.len() as f64;
    let min = results.iter().map(|r| r.fidelity).fold(f64::INFINITY, f64::min);
    let leak = results.iter().map(|r| r.leakage).fold(0.0, f64::max);
    Ok(PulsedCnotReport {
        sequence: sequence.iter().map(ToString::to_string).collect(),
        inputs: results,
        average_fidelity: average,
        min_fidelity: min,
        max_leakage: leak,
    })
}
