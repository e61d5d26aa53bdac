//! Randomized search for dot stacks meeting the selectivity requirements,
//! and validation of stacks or raw transition listings.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::material::MaterialParams;
use crate::spectrum::{
    adjacent_pairs, check_optical_rows, check_optical_selectivity, check_rotation_for_g, level_table, Constraint,
    OpticalMode, SelectivityReport, StackDesign, TransitionRow,
};
use crate::well::DotGeometry;

/// The transition listing of the reference nine-dot design.
pub const TABLE1_CSV: &str = include_str!("../fixtures/table1.csv");

fn default_b1() -> f64 {
    0.1
}
fn default_lateral() -> f64 {
    10.0
}
fn default_starts() -> usize {
    64
}
fn default_iterations() -> usize {
    500
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignProblem {
    pub n_dots: usize,
    pub field_tesla: f64,
    #[serde(default = "default_b1")]
    pub b1_tesla: f64,
    pub tsw_ps: f64,
    #[serde(default = "MaterialParams::inas")]
    pub well: MaterialParams,
    #[serde(default = "MaterialParams::gaas")]
    pub barrier: MaterialParams,
    #[serde(default = "default_lateral")]
    pub lateral_nm: f64,
    pub d_min_nm: f64,
    pub d_max_nm: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    #[serde(default)]
    pub optical_mode: OpticalMode,
    #[serde(default)]
    pub constants: PhysicalConstants,
}

impl DesignProblem {
    /// InAs dots in GaAs, d ∈ [1, 12] nm, d_lt = 10 nm, B₁ = 0.1 T.
    pub fn inas_gaas(n_dots: usize, field_tesla: f64, tsw_ps: f64, seed: u64) -> Self {
        Self {
            n_dots,
            field_tesla,
            b1_tesla: default_b1(),
            tsw_ps,
            well: MaterialParams::inas(),
            barrier: MaterialParams::gaas(),
            lateral_nm: default_lateral(),
            d_min_nm: 1.0,
            d_max_nm: 12.0,
            seed,
            starts: default_starts(),
            iterations: default_iterations(),
            optical_mode: OpticalMode::Strict,
            constants: PhysicalConstants::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_dots < 2 {
            return Err(Error::Parameter(format!("a design needs at least 2 dots, got {}", self.n_dots)));
        }
        if !(self.d_min_nm > 0.0 && self.d_min_nm <= self.d_max_nm && self.d_max_nm.is_finite()) {
            return Err(Error::Parameter(format!(
                "half-width bounds must satisfy 0 < d_min <= d_max, got [{}, {}]",
                self.d_min_nm, self.d_max_nm
            )));
        }
        if self.starts == 0 {
            return Err(Error::Parameter("at least one start is required".into()));
        }
        self.stack(&vec![self.d_min_nm; self.n_dots]).validate()
    }

    fn stack(&self, widths: &[f64]) -> StackDesign {
        StackDesign {
            dots: widths
                .iter()
                .map(|&d| DotGeometry::new(d, self.lateral_nm, self.well.clone(), self.barrier.clone()))
                .collect(),
            field_tesla: self.field_tesla,
            b1_tesla: self.b1_tesla,
            tsw_ps: self.tsw_ps,
            constants: self.constants,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub label: String,
    pub de00_mev: f64,
    pub de11_mev: f64,
    /// Opposite-spin separation of this pair meets √3 ħΩ_op.
    pub pass17: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    /// Absent when a raw listing was validated.
    pub stack: Option<StackDesign>,
    pub rotation: Option<SelectivityReport>,
    pub optical: SelectivityReport,
    pub table: Vec<TableRow>,
    /// Binding constraint over both reports.
    pub worst_margin_mev: f64,
    pub worst_normalized_margin: f64,
    pub feasible: bool,
    /// Search start that produced the stack.
    pub start_index: Option<usize>,
}

impl DesignReport {
    fn build(
        stack: Option<StackDesign>,
        rotation: Option<SelectivityReport>,
        optical: SelectivityReport,
        rows: &[TransitionRow],
    ) -> Self {
        let table = rows
            .iter()
            .map(|r| TableRow {
                label: r.label(),
                de00_mev: r.de00_mev,
                de11_mev: r.de11_mev,
                pass17: optical
                    .checks
                    .iter()
                    .filter(|c| c.constraint == Constraint::SpinSelective && c.subject == r.label())
                    .all(|c| c.passes()),
            })
            .collect();
        let mut worst = (optical.margin_mev, optical.normalized_margin);
        if let Some(rot) = &rotation {
            if rot.normalized_margin < worst.1 {
                worst = (rot.margin_mev, rot.normalized_margin);
            }
        }
        let feasible = optical.pass && rotation.as_ref().is_none_or(|r| r.pass);
        Self {
            stack,
            rotation,
            optical,
            table,
            worst_margin_mev: worst.0,
            worst_normalized_margin: worst.1,
            feasible,
            start_index: None,
        }
    }

    /// `k-l,dE00_meV,dE11_meV,pass17` listing.
    pub fn table_csv(&self) -> String {
        let mut out = String::from("k-l,dE00_meV,dE11_meV,pass17\n");
        for r in &self.table {
            out.push_str(&format!("{},{},{},{}\n", r.label, sig9(r.de00_mev), sig9(r.de11_mev), r.pass17));
        }
        out
    }
}

/// Rotation and optical selectivity of a stack, all adjacent pairs driven.
pub fn validate_stack(stack: &StackDesign, mode: OpticalMode) -> Result<DesignReport> {
    let table = level_table(stack)?;
    let c = &stack.constants;
    let pairs = adjacent_pairs(table.n_dots());
    let rows = table.rows(&pairs)?;
    let rotation = check_rotation_for_g(c, &table.g, stack.field_tesla, stack.b1_tesla);
    let optical = if pairs.is_empty() {
        return Err(Error::Contract("a single dot has no optical transitions to validate".into()));
    } else {
        check_optical_selectivity(c, &table, stack.tsw_ps, &pairs, mode)?
    };
    Ok(DesignReport::build(Some(stack.clone()), Some(rotation), optical, &rows))
}

/// Optical requirements of a raw transition listing.
pub fn validate_rows(
    consts: &PhysicalConstants,
    rows: &[TransitionRow],
    tsw_ps: f64,
    mode: OpticalMode,
) -> Result<DesignReport> {
    let optical = check_optical_rows(consts, rows, tsw_ps, mode)?;
    Ok(DesignReport::build(None, None, optical, rows))
}

/// Parse a `k-l,dE00_meV,dE11_meV[,…]` listing with one-based labels.
pub fn parse_table_csv(text: &str) -> Result<Vec<TransitionRow>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty transition table".into()))?;
    if !header.starts_with("k-l,dE00_meV,dE11_meV") {
        return Err(Error::Parse(format!("unexpected table header `{header}`")));
    }
    lines
        .map(|line| {
            let bad = || Error::Parse(format!("bad table row `{line}`"));
            let mut f = line.split(',');
            let (label, e0, e1) = (f.next().ok_or_else(bad)?, f.next().ok_or_else(bad)?, f.next().ok_or_else(bad)?);
            let (k, l) = label.split_once('-').ok_or_else(bad)?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            let l: usize = l.trim().parse().map_err(|_| bad())?;
            if k == 0 || l == 0 {
                return Err(bad());
            }
            Ok(TransitionRow {
                pair: (k - 1, l - 1),
                de00_mev: e0.trim().parse().map_err(|_| bad())?,
                de11_mev: e1.trim().parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

pub fn table1_rows() -> Vec<TransitionRow> {
    parse_table_csv(TABLE1_CSV).expect("embedded fixture parses")
}

/// Score of a set of half-widths: binding normalized margin, then the summed
/// normalized violation as a tie-break. Unsolvable geometries score -∞.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Score {
    worst: f64,
    violation: f64,
}

impl Score {
    const FAIL: Score = Score { worst: f64::NEG_INFINITY, violation: f64::NEG_INFINITY };

    fn better_than(&self, other: &Score) -> bool {
        const EPS: f64 = 1e-12;
        if self.worst > other.worst + EPS {
            return true;
        }
        self.worst >= other.worst - EPS && self.violation > other.violation + EPS
    }
}

fn score(problem: &DesignProblem, widths: &[f64]) -> Score {
    let stack = problem.stack(widths);
    let Ok(rep) = validate_stack(&stack, problem.optical_mode) else { return Score::FAIL };
    let violation: f64 = rep
        .rotation
        .iter()
        .flat_map(|r| r.checks.iter())
        .chain(rep.optical.checks.iter())
        .map(|c| c.normalized_margin().min(0.0))
        .sum();
    Score { worst: rep.worst_normalized_margin, violation }
}

struct StartResult {
    widths: Vec<f64>,
    score: Score,
}

fn run_start(problem: &DesignProblem, start: usize) -> StartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(problem.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(start as u64));
    let (lo, hi) = (problem.d_min_nm, problem.d_max_nm);
    let span = hi - lo;
    let n = problem.n_dots;
    let mut x: Vec<f64> = (0..n).map(|_| if span > 0.0 { rng.gen_range(lo..=hi) } else { lo }).collect();
    let mut best = score(problem, &x);
    let mut step = vec![span / 4.0; n];
    let floor = span * 1e-5;
    for _ in 0..problem.iterations {
        if span == 0.0 {
            break;
        }
        let i = rng.gen_range(0..n);
        let dir = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let len = step[i] * rng.gen_range(0.5..1.5);
        let mut moved = false;
        for d in [dir, -dir] {
            let mut y = x.clone();
            y[i] = (x[i] + d * len).clamp(lo, hi);
            if y[i] == x[i] {
                continue;
            }
            let s = score(problem, &y);
            if s.better_than(&best) {
                x = y;
                best = s;
                step[i] = (step[i] * 1.5).min(span);
                moved = true;
                break;
            }
        }
        if !moved {
            step[i] *= 0.5;
            if step[i] < floor {
                step[i] = span * rng.gen_range(0.05..0.5);
            }
        }
    }
    StartResult { widths: x, score: best }
}

/// Multi-start randomized coordinate descent on the half-widths. The report
/// comes from the lowest-index feasible start, or else from the best start;
/// an infeasible outcome is a normal result with `feasible == false`.
pub fn design_stack(problem: &DesignProblem) -> Result<DesignReport> {
    problem.validate()?;
    let results: Vec<StartResult> = (0..problem.starts).into_par_iter().map(|s| run_start(problem, s)).collect();
    let pick = results.iter().position(|r| r.score.worst >= 0.0).unwrap_or_else(|| {
        let mut b = 0;
        for (i, r) in results.iter().enumerate() {
            if r.score.better_than(&results[b].score) {
                b = i;
            }
        }
        b
    });
    let stack = problem.stack(&results[pick].widths);
    let mut report = match validate_stack(&stack, problem.optical_mode) {
        Ok(r) => r,
        Err(e) if results[pick].score == Score::FAIL => {
            return Err(Error::Contract(format!("no start produced a solvable stack: {e}")))
        }
        Err(e) => return Err(e),
    };
    report.start_index = Some(pick);
    Ok(report)
}
