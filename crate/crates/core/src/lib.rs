//! Spin-qubit logic gates in a stack of coupled quantum dots of different
//! size: dot physics, Zeeman spectra, pulse dynamics, two-electron gate
//! simulation and selective stack design.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod material;
mod roots;
pub mod sphere;
pub mod well;

pub use constants::PhysicalConstants;
pub use error::{Error, Result};
pub use material::{bulk_g, eff_mass, MaterialParams};
pub use sphere::{sphere_g, SphereG};
pub use well::{dot_g, dot_ground_energy, solve_dot, solve_well, DotGeometry, DotState, WellSolution};

pub mod designer;
pub mod format;
pub mod gate;
pub mod ode;
pub mod pulse;
pub mod spectrum;
pub mod trace;

pub use pulse::{
    cancellation_detuning, evolve_vee, generalized_rabi, two_level_population, TwoLevelPulse, VeeSpec,
};
pub use spectrum::{
    check_optical_rows, check_optical_selectivity, check_rotation_selectivity, level_table, transition_energy,
    OpticalMode, SelectivityReport, Spin, SpinLevelTable, StackDesign, TransitionRow,
};
pub use trace::EvolutionTrace;
pub use designer::{design_stack, validate_rows, validate_stack, DesignProblem, DesignReport};
