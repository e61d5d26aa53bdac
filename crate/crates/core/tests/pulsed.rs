use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use qdstack::gate::*;
use qdstack::spectrum::Spin;
use qdstack::*;

fn stack(b1: f64) -> StackDesign {
    StackDesign {
        dots: [12.0, 1.0, 6.16].iter().map(|&d| DotGeometry::inas_gaas(d, 10.0)).collect(),
        field_tesla: 10.0,
        b1_tesla: b1,
        tsw_ps: 10.0,
        constants: PhysicalConstants::default(),
    }
}

fn plus_plus(roles: &CnotRoles) -> TwoElectronState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    product_state(Arc::new(enumerate_basis(3, BasisMode::Strict)), roles, [h, h], [h, h]).unwrap()
}

#[test]
fn integrators_agree() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let seq = compensated_cnot_sequence(&sys.table, &roles).unwrap();
    let input = plus_plus(&roles);
    let rk = evolve_pulsed(&sys, &seq, &input, &PulsedConfig::default()).unwrap();
    let ex = evolve_pulsed(&sys, &seq, &input, &PulsedConfig { integrator: Integrator::Exact, ..Default::default() }).unwrap();
    assert!(fidelity(&rk.state, &ex.state) > 1.0 - 1e-6);
    assert!((rk.leakage - ex.leakage).abs() < 1e-6);
    assert_eq!(rk.durations_ps, ex.durations_ps);
    assert!(ex.norm_error < 1e-10);
}

#[test]
fn pulse_durations() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let run = evolve_pulsed(&sys, &cnot_sequence(&roles), &plus_plus(&roles), &PulsedConfig::default()).unwrap();
    let k = PhysicalConstants::default();
    let rt = std::f64::consts::PI * k.hbar() / k.zeeman(sys.table.g[2].abs(), 0.1);
    let want = [10.0, 10.0, 10.0, rt, 10.0, 10.0, 10.0];
    for (d, w) in run.durations_ps.iter().zip(want) {
        assert!((d - w).abs() < 1e-12);
    }
    let total: f64 = want.iter().sum();
    assert!((run.trace.times.last().unwrap() - total).abs() < 1e-9);
}

#[test]
fn norm_and_trace_are_conserved() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    for (_, input) in cnot_report_inputs(3, &roles).unwrap() {
        let run = evolve_pulsed(&sys, &cnot_sequence(&roles), &input, &PulsedConfig::default()).unwrap();
        assert!((run.state.norm_sqr() - 1.0).abs() < 1e-8);
        assert!(run.trace.max_trace_error() < 1e-8);
        assert!((0.0..1.0).contains(&run.leakage));
    }
}

#[test]
fn halving_dt_changes_fidelity_below_1e6() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let seq = compensated_cnot_sequence(&sys.table, &roles).unwrap();
    let a = pulsed_cnot_report(&sys, &roles, &seq, &PulsedConfig::default()).unwrap();
    let b = pulsed_cnot_report(&sys, &roles, &seq, &PulsedConfig { steps_per_tsw: 16_000, ..Default::default() }).unwrap();
    for (x, y) in a.inputs.iter().zip(&b.inputs) {
        assert!((x.fidelity - y.fidelity).abs() < 1e-6, "{} {}", x.fidelity, y.fidelity);
    }
}

#[test]
fn separated_limit_reaches_ideal_populations() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap().with_scaled_separations(1000.0);
    let roles = CnotRoles::default();
    let cfg = PulsedConfig { integrator: Integrator::Exact, ..Default::default() };
    let rep = pulsed_cnot_report(&sys, &roles, &cnot_sequence(&roles), &cfg).unwrap();
    // Basis inputs are blind to the branch phase; the superposition is not.
    for r in &rep.inputs[..4] {
        assert!(r.fidelity > 1.0 - 1e-4, "{}: {}", r.input, r.fidelity);
    }
    assert!(rep.inputs[4].fidelity < 0.6);
    let comp = pulsed_cnot_report(&sys, &roles, &compensated_cnot_sequence(&sys.table, &roles).unwrap(), &cfg).unwrap();
    assert!(comp.min_fidelity > 1.0 - 1e-4);
}

#[test]
fn opposite_compensation_phase_is_worse() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let good = compensated_cnot_sequence(&sys.table, &roles).unwrap();
    let mut bad = good.clone();
    let last = bad.len() - 1;
    bad[last] = bad[last].with_phase(-bad[last].phase_rad());
    let cfg = PulsedConfig::default();
    let g = pulsed_cnot_report(&sys, &roles, &good, &cfg).unwrap();
    let b = pulsed_cnot_report(&sys, &roles, &bad, &cfg).unwrap();
    assert!(g.average_fidelity > 0.99);
    assert!(b.average_fidelity < g.average_fidelity - 0.1);
}

#[test]
fn single_resonant_hop_is_a_full_transfer() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let input = computational_state(3, &roles, Spin::Down, Spin::Up).unwrap();
    let c1 = GateOp::parse("C1", &roles).unwrap();
    let run = evolve_pulsed(&sys, &[c1], &input, &PulsedConfig::default()).unwrap();
    let ideal = apply_ideal(&c1, &input).unwrap();
    assert!(fidelity(&ideal, &run.state) > 0.99);
}

#[test]
fn bad_inputs_are_errors() {
    let sys = PulseSystem::from_stack(&stack(0.0)).unwrap();
    let roles = CnotRoles::default();
    let input = plus_plus(&roles);
    let rt = GateOp::parse("RT", &roles).unwrap();
    assert!(matches!(evolve_pulsed(&sys, &[rt], &input, &PulsedConfig::default()), Err(Error::Parameter(_))));
    let four = computational_state(4, &CnotRoles::default(), Spin::Up, Spin::Up).unwrap();
    assert!(evolve_pulsed(&sys, &[], &four, &PulsedConfig::default()).is_err());
    assert!(evolve_pulsed(&sys, &[], &input, &PulsedConfig { coulomb_mev: 0.0, ..Default::default() }).is_err());
}

#[test]
fn trace_csv_uses_configuration_labels() {
    let sys = PulseSystem::from_stack(&stack(0.1)).unwrap();
    let roles = CnotRoles::default();
    let run = evolve_pulsed(
        &sys,
        &[GateOp::parse("C1", &roles).unwrap()],
        &plus_plus(&roles),
        &PulsedConfig { record_every: 800, ..Default::default() },
    )
    .unwrap();
    let csv = run.trace.to_csv();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t_ps,1u1d,1u2u,1u2d"));
    assert_eq!(header.split(',').count(), 16);
    assert_eq!(csv.lines().count(), 1 + 1 + 10);
}
