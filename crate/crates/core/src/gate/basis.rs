//! Two-electron configuration space over a dot stack.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::spectrum::Spin;

/// Allowed deviation of |ψ|² from one for a state to count as normalized.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisMode {
    /// At most one electron per dot.
    #[default]
    Strict,
    /// Opposite-spin double occupancy allowed.
    Extended,
}

/// A single-electron orbital: zero-based dot and spin. Ordered by dot, then spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Orbital {
    pub dot: usize,
    pub spin: Spin,
}

impl Orbital {
    pub fn new(dot: usize, spin: Spin) -> Self {
        Self { dot, spin }
    }
}

impl fmt::Display for Orbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self.spin {
            Spin::Up => 'u',
            Spin::Down => 'd',
        };
        write!(f, "{}{s}", self.dot + 1)
    }
}

/// Two distinct orbitals with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub a: Orbital,
    pub b: Orbital,
}

impl Configuration {
    /// Canonical pair; `None` for a repeated orbital (Pauli).
    pub fn new(x: Orbital, y: Orbital) -> Option<Self> {
        match x.cmp(&y) {
            std::cmp::Ordering::Less => Some(Self { a: x, b: y }),
            std::cmp::Ordering::Greater => Some(Self { a: y, b: x }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn electrons(&self) -> [Orbital; 2] {
        [self.a, self.b]
    }

    pub fn doubly_occupied(&self) -> bool {
        self.a.dot == self.b.dot
    }

    pub fn occupancy(&self, dot: usize) -> usize {
        usize::from(self.a.dot == dot) + usize::from(self.b.dot == dot)
    }

    /// The two orbitals joined, e.g. `1u3d`.
    pub fn label(&self) -> String {
        format!("{}{}", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoElectronBasis {
    pub n_dots: usize,
    pub mode: BasisMode,
    states: Vec<Configuration>,
    index: HashMap<Configuration, usize>,
}

impl TwoElectronBasis {
    pub fn states(&self) -> &[Configuration] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, c: &Configuration) -> Option<usize> {
        self.index.get(c).copied()
    }

    pub fn labels(&self) -> Vec<String> {
        self.states.iter().map(Configuration::label).collect()
    }
}

/// All two-electron configurations of `n_dots` dots in lexicographic order
/// of their (dot, spin) pairs.
pub fn enumerate_basis(n_dots: usize, mode: BasisMode) -> TwoElectronBasis {
    let orbitals: Vec<Orbital> = (0..n_dots)
        .flat_map(|d| Spin::ALL.map(|s| Orbital::new(d, s)))
        .collect();
    let mut states = Vec::new();
    for (i, &x) in orbitals.iter().enumerate() {
        for &y in &orbitals[i + 1..] {
            if mode == BasisMode::Strict && x.dot == y.dot {
                continue;
            }
            states.push(Configuration { a: x, b: y });
        }
    }
    let index = states.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    TwoElectronBasis { n_dots, mode, states, index }
}

/// Normalized amplitude vector over a shared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoElectronState {
    basis: Arc<TwoElectronBasis>,
    amplitudes: Vec<Complex64>,
}

impl TwoElectronState {
    pub fn new(basis: Arc<TwoElectronBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::Parameter(format!(
                "{} amplitudes for a {}-state basis",
                amplitudes.len(),
                basis.len()
            )));
        }
        let s = Self { basis, amplitudes };
        let n = s.norm_sqr();
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!("state is not normalized: |ψ|² = {n}")));
        }
        Ok(s)
    }

    /// Unchecked constructor for evolution results.
    pub(crate) fn from_raw(basis: Arc<TwoElectronBasis>, amplitudes: Vec<Complex64>) -> Self {
        Self { basis, amplitudes }
    }

    pub fn basis_state(basis: Arc<TwoElectronBasis>, c: &Configuration) -> Result<Self> {
        let i = basis
            .index_of(c)
            .ok_or_else(|| Error::Index(format!("configuration {} is not in the basis", c.label())))?;
        let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
        amps[i] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes: amps })
    }

    pub fn basis(&self) -> &Arc<TwoElectronBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, c: &Configuration) -> Complex64 {
        self.basis
            .index_of(c)
            .map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    /// Total population on doubly occupied configurations.
    pub fn double_occupancy(&self) -> f64 {
        self.basis
            .states()
            .iter()
            .zip(&self.amplitudes)
            .filter(|(c, _)| c.doubly_occupied())
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// The same state expressed over `target`. Amplitude on configurations
    /// missing from `target` must be below `tol`.
    pub fn embed(&self, target: Arc<TwoElectronBasis>, tol: f64) -> Result<Self> {
        if target.n_dots != self.basis.n_dots {
            return Err(Error::Contract("bases cover different dot counts".into()));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); target.len()];
        for (c, a) in self.basis.states().iter().zip(&self.amplitudes) {
            match target.index_of(c) {
                Some(i) => amps[i] = *a,
                None if a.norm() <= tol => {}
                None => {
                    return Err(Error::Contract(format!("amplitude on {} has no place in the target basis", c.label())))
                }
            }
        }
        Ok(Self { basis: target, amplitudes: amps })
    }

    /// Configurations carrying more than `tol` amplitude.
    pub fn support(&self, tol: f64) -> impl Iterator<Item = (&Configuration, Complex64)> {
        self.basis
            .states()
            .iter()
            .zip(self.amplitudes.iter().copied())
            .filter(move |(_, a)| a.norm() > tol)
    }
}

/// |⟨a|b⟩|². States over different bases are compared configuration-wise.
pub fn fidelity(a: &TwoElectronState, b: &TwoElectronState) -> f64 {
    let overlap: Complex64 = if Arc::ptr_eq(&a.basis, &b.basis) || a.basis.states == b.basis.states {
        a.amplitudes.iter().zip(&b.amplitudes).map(|(x, y)| x.conj() * y).sum()
    } else {
        a.basis
            .states()
            .iter()
            .zip(&a.amplitudes)
            .map(|(c, x)| x.conj() * b.amplitude(c))
            .sum()
    };
    overlap.norm_sqr().min(1.0)
}
