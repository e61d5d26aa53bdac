//! Two-electron gate simulation: configuration basis, ideal gate layer and
//! pulsed multi-level evolution.

mod basis;
mod ops;
mod pulsed;

pub use basis::{enumerate_basis, fidelity, BasisMode, Configuration, Orbital, TwoElectronBasis, TwoElectronState, NORM_TOL};
pub use ops::{
    apply_ideal, cnot_ideal, cnot_ideal_trace, cnot_sequence, computational_state, one_bit_rotation, parse_sequence,
    product_state, rotate_qubit, CnotRoles, GateOp,
};
pub use pulsed::{
    cnot_report_inputs, compensated_cnot_sequence, evolve_pulsed, pulsed_cnot_report, InputFidelity, Integrator,
    PulseSystem, PulsedCnotReport, PulsedConfig, PulsedRun, NORM_DRIFT_LIMIT,
};
