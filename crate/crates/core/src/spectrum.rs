//! Zeeman-split single-electron levels of a dot stack, transition energies
//! and the spectral-selectivity requirements for magnetic and optical pulses.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::well::{solve_dot, DotGeometry};

/// Absolute slack, meV, below which a constraint evaluated exactly at its
/// threshold still counts as satisfied.
pub const PASS_TOL_MEV: f64 = 1e-12;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Spin state of the electron. Index 0 is ↑ (logical |0⟩), 1 is ↓ (|1⟩), so
/// that `E(↑) - E(↓) = μ_B g B` and `E_{i,k} = E_k + (-1)^i μ_B g_k B / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const ALL: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn index(self) -> usize {
        match self {
            Spin::Up => 0,
            Spin::Down => 1,
        }
    }

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Spin::Up),
            1 => Ok(Spin::Down),
            _ => Err(Error::Index(format!("spin index must be 0 or 1, got {i}"))),
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// An ordered stack of dots together with the static field, the rotating
/// field amplitude and the optical switching time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackDesign {
    pub dots: Vec<DotGeometry>,
    pub field_tesla: f64,
    pub b1_tesla: f64,
    pub tsw_ps: f64,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl StackDesign {
    pub fn validate(&self) -> Result<()> {
        if self.dots.is_empty() {
            return Err(Error::Parameter("stack must contain at least one dot".into()));
        }
        if !(self.field_tesla >= 0.0 && self.field_tesla.is_finite()) {
            return Err(Error::Parameter(format!("B must be >= 0, got {}", self.field_tesla)));
        }
        if !(self.b1_tesla >= 0.0 && self.b1_tesla.is_finite()) {
            return Err(Error::Parameter(format!("B1 must be >= 0, got {}", self.b1_tesla)));
        }
        if !(self.tsw_ps > 0.0 && self.tsw_ps.is_finite()) {
            return Err(Error::Parameter(format!("T_sw must be > 0, got {}", self.tsw_ps)));
        }
        self.constants.validate()?;
        self.dots.iter().try_for_each(DotGeometry::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinLevelTable {
    pub field_tesla: f64,
    /// E_k per dot, meV.
    pub quantization_mev: Vec<f64>,
    /// g_k per dot.
    pub g: Vec<f64>,
    /// `levels[k][i]` = E_{i,k}, meV.
    pub levels: Vec<[f64; 2]>,
}

impl SpinLevelTable {
    pub fn from_parts(consts: &PhysicalConstants, quantization_mev: Vec<f64>, g: Vec<f64>, field_tesla: f64) -> Result<Self> {
        if quantization_mev.len() != g.len() {
            return Err(Error::Parameter(format!(
                "{} quantization energies but {} g-factors",
                quantization_mev.len(),
                g.len()
            )));
        }
        let levels = quantization_mev
            .iter()
            .zip(&g)
            .map(|(&e, &gk)| {
                let half = consts.zeeman(gk, field_tesla) / 2.0;
                [e + Spin::Up.sign() * half, e + Spin::Down.sign() * half]
            })
            .collect();
        Ok(Self { field_tesla, quantization_mev, g, levels })
    }

    pub fn n_dots(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, spin: Spin, dot: usize) -> Result<f64> {
        self.levels
            .get(dot)
            .map(|l| l[spin.index()])
            .ok_or_else(|| Error::Index(format!("dot {dot} not in a {}-dot table", self.n_dots())))
    }

    /// Same-spin transition energies of adjacent-dot pairs.
    pub fn rows(&self, pairs: &[(usize, usize)]) -> Result<Vec<TransitionRow>> {
        pairs
            .iter()
            .map(|&(k, l)| {
                Ok(TransitionRow {
                    pair: (k, l),
                    de00_mev: transition_energy(self, Spin::Up, Spin::Up, k, l)?,
                    de11_mev: transition_energy(self, Spin::Down, Spin::Down, k, l)?,
                })
            })
            .collect()
    }
}

pub fn level_table(stack: &StackDesign) -> Result<SpinLevelTable> {
    stack.validate()?;
    let c = &stack.constants;
    let (energies, g): (Vec<f64>, Vec<f64>) = stack
        .dots
        .iter()
        .map(|d| solve_dot(c, d).map(|s| (s.ground_energy_mev, s.g)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    SpinLevelTable::from_parts(c, energies, g, stack.field_tesla)
}

/// ΔE_{ijkl} = E_{i,k} - E_{j,l}, meV.
pub fn transition_energy(table: &SpinLevelTable, i: Spin, j: Spin, k: usize, l: usize) -> Result<f64> {
    Ok(table.level(i, k)? - table.level(j, l)?)
}

/// Neighbouring pairs `(k, k+1)` of an `n`-dot stack.
pub fn adjacent_pairs(n: usize) -> Vec<(usize, usize)> {
    (1..n).map(|k| (k - 1, k)).collect()
}

/// One row of the transition listing: the two same-spin photon-assisted
/// tunneling energies between dots `pair.0` and `pair.1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionRow {
    /// Zero-based dot indices.
    pub pair: (usize, usize),
    pub de00_mev: f64,
    pub de11_mev: f64,
}

impl TransitionRow {
    /// One-based `k-l` label.
    pub fn label(&self) -> String {
        format!("{}-{}", self.pair.0 + 1, self.pair.1 + 1)
    }

    pub fn energy(&self, spin: Spin) -> f64 {
        match spin {
            Spin::Up => self.de00_mev,
            Spin::Down => self.de11_mev,
        }
    }

    fn shares_dot(&self, other: &TransitionRow) -> bool {
        let (a, b) = self.pair;
        let (c, d) = other.pair;
        a == c || a == d || b == c || b == d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// Magnetic rotation: |g_i - g_j| μ_B B ≥ √3 ħΩ_Ri.
    Rotation,
    /// Optical, opposite spins on one pair: ||ΔE_00| - |ΔE_11|| ≥ √3 ħΩ_op.
    SpinSelective,
    /// Optical, same spin on pairs sharing a dot: ≥ 2√3 ħΩ_op.
    DotSelective,
    /// Optical, every two driven transitions: ≥ 2√3 ħΩ_op.
    AllPairs,
}

impl Constraint {
    pub fn id(self) -> &'static str {
        match self {
            Constraint::Rotation => "rotation",
            Constraint::SpinSelective => "spin-selective",
            Constraint::DotSelective => "dot-selective",
            Constraint::AllPairs => "all-pairs",
        }
    }
}

/// Which optical pairs the 2√3 ħΩ_op requirement is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpticalMode {
    /// Every two driven transitions, in addition to the shared-dot pairs.
    #[default]
    Strict,
    /// Only same-spin transitions on pairs sharing a dot.
    SharedDot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintCheck {
    pub constraint: Constraint,
    pub subject: String,
    pub actual_mev: f64,
    pub threshold_mev: f64,
}

impl ConstraintCheck {
    pub fn margin_mev(&self) -> f64 {
        self.actual_mev - self.threshold_mev
    }

    /// Margin relative to the threshold; infinite when the threshold is zero.
    pub fn normalized_margin(&self) -> f64 {
        if self.threshold_mev > 0.0 {
            self.margin_mev() / self.threshold_mev
        } else {
            f64::INFINITY
        }
    }

    pub fn passes(&self) -> bool {
        self.margin_mev() >= -PASS_TOL_MEV
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectivityReport {
    pub pass: bool,
    /// Margin of the binding (smallest normalized margin) constraint, meV.
    pub margin_mev: f64,
    pub normalized_margin: f64,
    pub checks: Vec<ConstraintCheck>,
    pub violations: Vec<ConstraintCheck>,
    /// Smallest gap between any two driven optical transitions (strict mode).
    pub min_pairwise_gap_mev: Option<f64>,
}

impl SelectivityReport {
    fn from_checks(checks: Vec<ConstraintCheck>, min_pairwise_gap_mev: Option<f64>) -> Self {
        let violations: Vec<_> = checks.iter().filter(|c| !c.passes()).cloned().collect();
        let binding = checks
            .iter()
            .min_by(|a, b| a.normalized_margin().total_cmp(&b.normalized_margin()));
        let (margin_mev, normalized_margin) = binding
            .map(|c| (c.margin_mev(), c.normalized_margin()))
            .unwrap_or((f64::INFINITY, f64::INFINITY));
        Self { pass: violations.is_empty(), margin_mev, normalized_margin, checks, violations, min_pairwise_gap_mev }
    }
}

/// Rotation selectivity from bare g-factors.
pub fn check_rotation_for_g(consts: &PhysicalConstants, g: &[f64], field_tesla: f64, b1_tesla: f64) -> SelectivityReport {
    let mut checks = Vec::with_capacity(g.len() * g.len().saturating_sub(1));
    for (i, &gi) in g.iter().enumerate() {
        let rabi = consts.zeeman(gi.abs(), b1_tesla);
        for (j, &gj) in g.iter().enumerate() {
            if i == j {
                continue;
            }
            checks.push(ConstraintCheck {
                constraint: Constraint::Rotation,
                subject: format!("{}|{}", i + 1, j + 1),
                actual_mev: consts.zeeman((gi - gj).abs(), field_tesla),
                threshold_mev: SQRT3 * rabi,
            });
        }
    }
    SelectivityReport::from_checks(checks, None)
}

pub fn check_rotation_selectivity(stack: &StackDesign) -> Result<SelectivityReport> {
    let table = level_table(stack)?;
    Ok(check_rotation_for_g(&stack.constants, &table.g, stack.field_tesla, stack.b1_tesla))
}

pub fn check_optical_selectivity(
    consts: &PhysicalConstants,
    table: &SpinLevelTable,
    tsw_ps: f64,
    driven_pairs: &[(usize, usize)],
    mode: OpticalMode,
) -> Result<SelectivityReport> {
    if driven_pairs.is_empty() {
        return Err(Error::Contract("at least one driven pair is required".into()));
    }
    for &(k, l) in driven_pairs {
        if k.abs_diff(l) != 1 || k.max(l) >= table.n_dots() {
            return Err(Error::Contract(format!("({}, {}) is not an adjacent pair of the stack", k + 1, l + 1)));
        }
    }
    check_optical_rows(consts, &table.rows(driven_pairs)?, tsw_ps, mode)
}

/// Optical selectivity of a raw transition listing, e.g. a tabulated design.
pub fn check_optical_rows(
    consts: &PhysicalConstants,
    rows: &[TransitionRow],
    tsw_ps: f64,
    mode: OpticalMode,
) -> Result<SelectivityReport> {
    if rows.is_empty() {
        return Err(Error::Contract("at least one driven pair is required".into()));
    }
    if !(tsw_ps > 0.0) {
        return Err(Error::Parameter(format!("T_sw must be > 0, got {tsw_ps}")));
    }
    let rabi = consts.pi_pulse_energy(tsw_ps);
    let thr_spin = SQRT3 * rabi;
    let thr_dot = 2.0 * SQRT3 * rabi;
    let mut checks = Vec::new();

    for r in rows {
        checks.push(ConstraintCheck {
            constraint: Constraint::SpinSelective,
            subject: r.label(),
            actual_mev: (r.de00_mev.abs() - r.de11_mev.abs()).abs(),
            threshold_mev: thr_spin,
        });
    }
    for (a, ra) in rows.iter().enumerate() {
        for rb in &rows[a + 1..] {
            if !ra.shares_dot(rb) {
                continue;
            }
            for s in Spin::ALL {
                checks.push(ConstraintCheck {
                    constraint: Constraint::DotSelective,
                    subject: format!("{}/{} spin {s}", ra.label(), rb.label()),
                    actual_mev: (ra.energy(s).abs() - rb.energy(s).abs()).abs(),
                    threshold_mev: thr_dot,
                });
            }
        }
    }

    let mut min_gap = None;
    if mode == OpticalMode::Strict {
        let lines: Vec<(String, f64)> = rows
            .iter()
            .flat_map(|r| Spin::ALL.map(|s| (format!("{}:{s}{s}", r.label()), r.energy(s).abs())))
            .collect();
        let mut gap = f64::INFINITY;
        for (a, (la, ea)) in lines.iter().enumerate() {
            for (lb, eb) in &lines[a + 1..] {
                let actual = (ea - eb).abs();
                gap = gap.min(actual);
                checks.push(ConstraintCheck {
                    constraint: Constraint::AllPairs,
                    subject: format!("{la}/{lb}"),
                    actual_mev: actual,
                    threshold_mev: thr_dot,
                });
            }
        }
        min_gap = Some(gap);
    }
    Ok(SelectivityReport::from_checks(checks, min_gap))
}
