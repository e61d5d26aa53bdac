//! Gate operators, sequence tokens and the ideal (instantaneous) layer.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

use super::basis::{enumerate_basis, BasisMode, Configuration, Orbital, TwoElectronBasis, TwoElectronState};
use crate::error::{Error, Result};
use crate::spectrum::Spin;

/// Amplitudes below this are treated as absent in precondition checks.
const SUPPORT_TOL: f64 = 1e-12;

/// One pulse of a gate sequence. Dots are zero-based. `phase_rad` is the
/// drive phase; it only matters for pulsed evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GateOp {
    /// Photon-assisted hop of a spin-`spin` electron between dots `k` and `l`.
    Hop { spin: Spin, k: usize, l: usize, phase_rad: f64 },
    /// Magnetic π rotation of the electron in `dot`.
    Flip { dot: usize, phase_rad: f64 },
}

/// Dot roles of the controlled-NOT; zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnotRoles {
    pub control: usize,
    pub swap: usize,
    pub target: usize,
}

impl Default for CnotRoles {
    fn default() -> Self {
        Self { control: 0, swap: 1, target: 2 }
    }
}

impl CnotRoles {
    pub fn validate(&self, n_dots: usize) -> Result<()> {
        let CnotRoles { control, swap, target } = *self;
        if control.max(swap).max(target) >= n_dots {
            return Err(Error::Index(format!("CNOT roles exceed a {n_dots}-dot stack")));
        }
        if control.abs_diff(swap) != 1 || swap.abs_diff(target) != 1 || control == target {
            return Err(Error::Contract("swap dot must sit between adjacent control and target dots".into()));
        }
        Ok(())
    }
}

impl GateOp {
    pub fn hop(spin: Spin, k: usize, l: usize) -> Self {
        GateOp::Hop { spin, k, l, phase_rad: 0.0 }
    }

    pub fn flip(dot: usize) -> Self {
        GateOp::Flip { dot, phase_rad: 0.0 }
    }

    pub fn phase_rad(&self) -> f64 {
        match *self {
            GateOp::Hop { phase_rad, .. } | GateOp::Flip { phase_rad, .. } => phase_rad,
        }
    }

    pub fn with_phase(self, phase: f64) -> Self {
        match self {
            GateOp::Hop { spin, k, l, .. } => GateOp::Hop { spin, k, l, phase_rad: phase },
            GateOp::Flip { dot, .. } => GateOp::Flip { dot, phase_rad: phase },
        }
    }

    pub fn validate(&self, n_dots: usize) -> Result<()> {
        match *self {
            GateOp::Hop { k, l, .. } => {
                if k.max(l) >= n_dots {
                    return Err(Error::Index(format!("hop {}-{} outside a {n_dots}-dot stack", k + 1, l + 1)));
                }
                if k.abs_diff(l) != 1 {
                    return Err(Error::Contract(format!("hop {}-{} is not between adjacent dots", k + 1, l + 1)));
                }
            }
            GateOp::Flip { dot, .. } => {
                if dot >= n_dots {
                    return Err(Error::Index(format!("rotation on dot {} outside a {n_dots}-dot stack", dot + 1)));
                }
            }
        }
        if !self.phase_rad().is_finite() {
            return Err(Error::Parameter("drive phase must be finite".into()));
        }
        Ok(())
    }

    /// Parse `C1`, `C2`, `C3`, `RT` (resolved against `roles`),
    /// `C:<spin>:<k>-<l>` or `R:<dot>` with one-based dots, each optionally
    /// followed by `@<degrees>`.
    pub fn parse(token: &str, roles: &CnotRoles) -> Result<Self> {
        let (body, phase) = match token.split_once('@') {
            Some((b, p)) => {
                let deg: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad phase in gate token `{token}`")))?;
                (b.trim(), deg.to_radians())
            }
            None => (token.trim(), 0.0),
        };
        let bad = || Error::Parse(format!("unrecognized gate token `{token}`"));
        let one_based = |s: &str| -> Result<usize> {
            match s.trim().parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n - 1),
                _ => Err(bad()),
            }
        };
        let op = match body {
            "C1" => GateOp::hop(Spin::Down, roles.control, roles.swap),
            "C2" => GateOp::hop(Spin::Down, roles.swap, roles.target),
            "C3" => GateOp::hop(Spin::Up, roles.swap, roles.target),
            "RT" => GateOp::flip(roles.target),
            _ => {
                if let Some(rest) = body.strip_prefix("C:") {
                    let (s, pair) = rest.split_once(':').ok_or_else(bad)?;
                    let spin = match s.trim() {
                        "0" => Spin::Up,
                        "1" => Spin::Down,
                        _ => return Err(bad()),
                    };
                    let (k, l) = pair.split_once('-').ok_or_else(bad)?;
                    GateOp::hop(spin, one_based(k)?, one_based(l)?)
                } else if let Some(d) = body.strip_prefix("R:") {
                    GateOp::flip(one_based(d)?)
                } else {
                    return Err(bad());
                }
            }
        };
        Ok(op.with_phase(phase))
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GateOp::Hop { spin, k, l, .. } => write!(f, "C:{spin}:{}-{}", k + 1, l + 1)?,
            GateOp::Flip { dot, .. } => write!(f, "R:{}", dot + 1)?,
        }
        let p = self.phase_rad();
        if p != 0.0 {
            write!(f, "@{}", p.to_degrees())?;
        }
        Ok(())
    }
}

pub fn parse_sequence<S: AsRef<str>>(tokens: &[S], roles: &CnotRoles) -> Result<Vec<GateOp>> {
    tokens.iter().map(|t| GateOp::parse(t.as_ref(), roles)).collect()
}

/// C1 C2 C3 R_T C3 C2 C1 in time order.
pub fn cnot_sequence(roles: &CnotRoles) -> Vec<GateOp> {
    ["C1", "C2", "C3", "RT", "C3", "C2", "C1"]
        .iter()
        .map(|t| GateOp::parse(t, roles).expect("built-in tokens parse"))
        .collect()
}

/// Image of a configuration under the ideal action of `op`.
fn map_configuration(op: &GateOp, c: &Configuration) -> Configuration {
    match *op {
        GateOp::Hop { spin, k, l, .. } => {
            let inside: Vec<Orbital> = c.electrons().into_iter().filter(|o| o.dot == k || o.dot == l).collect();
            // Only a lone spin-`spin` electron on the pair moves; an occupied
            // destination blocks the hop.
            if let [e] = inside[..] {
                if e.spin == spin {
                    let other = if c.a == e { c.b } else { c.a };
                    let dest = Orbital::new(if e.dot == k { l } else { k }, spin);
                    return Configuration::new(dest, other).unwrap_or(*c);
                }
            }
            *c
        }
        GateOp::Flip { dot, .. } => {
            let inside: Vec<Orbital> = c.electrons().into_iter().filter(|o| o.dot == dot).collect();
            if let [e] = inside[..] {
                let other = if c.a == e { c.b } else { c.a };
                return Configuration::new(Orbital::new(dot, e.spin.flipped()), other).unwrap_or(*c);
            }
            *c
        }
    }
}

/// Instantaneous ideal action: a real permutation of basis configurations.
pub fn apply_ideal(op: &GateOp, state: &TwoElectronState) -> Result<TwoElectronState> {
    let basis = state.basis();
    op.validate(basis.n_dots)?;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (c, a) in basis.states().iter().zip(state.amplitudes()) {
        let img = map_configuration(op, c);
        let j = basis
            .index_of(&img)
            .ok_or_else(|| Error::Index(format!("{} maps outside the basis", img.label())))?;
        out[j] += *a;
    }
    Ok(TwoElectronState::from_raw(basis.clone(), out))
}

/// `U(θ) = P₊ + e^{iθ} P₋` on the spin of the electron in `dot`, with P±
/// the projectors on (|0⟩ ± |1⟩)/√2. θ = π is the real swap |0⟩ ↔ |1⟩.
pub fn one_bit_rotation(state: &TwoElectronState, dot: usize, angle: f64) -> Result<TwoElectronState> {
    let basis = state.basis();
    if dot >= basis.n_dots {
        return Err(Error::Index(format!("dot {} outside a {}-dot stack", dot + 1, basis.n_dots)));
    }
    let flip = GateOp::flip(dot);
    let e = Complex64::from_polar(1.0, angle);
    let same = (Complex64::new(1.0, 0.0) + e) / 2.0;
    let cross = (Complex64::new(1.0, 0.0) - e) / 2.0;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.len()];
    for (i, (c, a)) in basis.states().iter().zip(state.amplitudes()).enumerate() {
        let img = map_configuration(&flip, c);
        if img == *c {
            out[i] += *a;
            continue;
        }
        let j = basis.index_of(&img).ok_or_else(|| Error::Index(format!("{} not in basis", img.label())))?;
        out[i] += same * a;
        out[j] += cross * a;
    }
    Ok(TwoElectronState::from_raw(basis.clone(), out))
}

/// Single-qubit form of [`one_bit_rotation`] on `[c₀, c₁]`.
pub fn rotate_qubit(amps: [Complex64; 2], angle: f64) -> [Complex64; 2] {
    let e = Complex64::from_polar(1.0, angle);
    let one = Complex64::new(1.0, 0.0);
    let (s, x) = ((one + e) / 2.0, (one - e) / 2.0);
    [s * amps[0] + x * amps[1], x * amps[0] + s * amps[1]]
}

/// Product state (c₀|0⟩ + c₁|1⟩)_C (t₀|0⟩ + t₁|1⟩)_T with the swap dot empty.
pub fn product_state(
    basis: Arc<TwoElectronBasis>,
    roles: &CnotRoles,
    control: [Complex64; 2],
    target: [Complex64; 2],
) -> Result<TwoElectronState> {
    roles.validate(basis.n_dots)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); basis.len()];
    for sc in Spin::ALL {
        for st in Spin::ALL {
            let c = Configuration::new(Orbital::new(roles.control, sc), Orbital::new(roles.target, st))
                .expect("control and target differ");
            let i = basis.index_of(&c).expect("product configurations are in every basis");
            amps[i] += control[sc.index()] * target[st.index()];
        }
    }
    TwoElectronState::new(basis, amps)
}

/// Computational basis input |c⟩_C|t⟩_T over the strict basis.
pub fn computational_state(n_dots: usize, roles: &CnotRoles, c: Spin, t: Spin) -> Result<TwoElectronState> {
    let unit = |s: Spin| {
        let mut v = [Complex64::new(0.0, 0.0); 2];
        v[s.index()] = Complex64::new(1.0, 0.0);
        v
    };
    product_state(Arc::new(enumerate_basis(n_dots, BasisMode::Strict)), roles, unit(c), unit(t))
}

fn check_cnot_input(state: &TwoElectronState, roles: &CnotRoles) -> Result<()> {
    roles.validate(state.basis().n_dots)?;
    for (c, _) in state.support(SUPPORT_TOL) {
        if c.occupancy(roles.swap) != 0 || c.occupancy(roles.control) != 1 || c.occupancy(roles.target) != 1 {
            return Err(Error::Contract(format!(
                "CNOT input needs one electron in C, one in T and none in S; found {}",
                c.label()
            )));
        }
    }
    Ok(())
}

/// Input followed by the state after each of the seven operations.
pub fn cnot_ideal_trace(state: &TwoElectronState, roles: &CnotRoles) -> Result<Vec<TwoElectronState>> {
    check_cnot_input(state, roles)?;
    let mut steps = vec![state.clone()];
    for op in cnot_sequence(roles) {
        let next = apply_ideal(&op, steps.last().expect("non-empty"))?;
        steps.push(next);
    }
    Ok(steps)
}

pub fn cnot_ideal(state: &TwoElectronState, roles: &CnotRoles) -> Result<TwoElectronState> {
    Ok(cnot_ideal_trace(state, roles)?.pop().expect("non-empty"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn strict3() -> Arc<TwoElectronBasis> {
        Arc::new(enumerate_basis(3, BasisMode::Strict))
    }

    fn only_config(s: &TwoElectronState) -> String {
        let sup: Vec<_> = s.support(1e-12).collect();
        assert_eq!(sup.len(), 1);
        assert!((sup[0].1 - c(1.0, 0.0)).norm() < 1e-15);
        sup[0].0.label()
    }

    #[test]
    fn token_parsing() {
        let r = CnotRoles::default();
        assert_eq!(GateOp::parse("C1", &r).unwrap(), GateOp::hop(Spin::Down, 0, 1));
        assert_eq!(GateOp::parse("C2", &r).unwrap(), GateOp::hop(Spin::Down, 1, 2));
        assert_eq!(GateOp::parse("C3", &r).unwrap(), GateOp::hop(Spin::Up, 1, 2));
        assert_eq!(GateOp::parse("RT", &r).unwrap(), GateOp::flip(2));
        assert_eq!(GateOp::parse("C:0:4-5", &r).unwrap(), GateOp::hop(Spin::Up, 3, 4));
        assert_eq!(GateOp::parse("R:7", &r).unwrap(), GateOp::flip(6));
        let ph = GateOp::parse("C1@90", &r).unwrap();
        assert!((ph.phase_rad() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        for bad in ["", "C4", "C:2:1-2", "C:0:0-1", "R:x", "C1@deg", "X"] {
            assert!(GateOp::parse(bad, &r).is_err(), "{bad}");
        }
        let t = GateOp::hop(Spin::Down, 1, 2).to_string();
        assert_eq!(t, "C:1:2-3");
        assert_eq!(GateOp::parse(&t, &r).unwrap(), GateOp::hop(Spin::Down, 1, 2));
    }

    #[test]
    fn non_adjacent_hop_is_rejected() {
        let s = computational_state(3, &CnotRoles::default(), Spin::Up, Spin::Up).unwrap();
        assert!(apply_ideal(&GateOp::hop(Spin::Up, 0, 2), &s).is_err());
        assert!(apply_ideal(&GateOp::flip(3), &s).is_err());
    }

    #[test]
    fn single_gate_examples() {
        let r = CnotRoles::default();
        let s10 = computational_state(3, &r, Spin::Down, Spin::Up).unwrap();
        let after_c1 = apply_ideal(&GateOp::parse("C1", &r).unwrap(), &s10).unwrap();
        assert_eq!(only_config(&after_c1), "2d3u");
        let blocked = apply_ideal(&GateOp::parse("C2", &r).unwrap(), &after_c1).unwrap();
        assert_eq!(blocked, after_c1);
        let s01 = computational_state(3, &r, Spin::Up, Spin::Down).unwrap();
        let rt = apply_ideal(&GateOp::parse("RT", &r).unwrap(), &s01).unwrap();
        assert_eq!(only_config(&rt), "1u3u");
    }

    /// Hand-traced configuration after each of the seven pulses.
    #[test]
    fn golden_cnot_traces() {
        let r = CnotRoles::default();
        let golden = [
            (Spin::Up, Spin::Up, ["1u3u", "1u3u", "1u3u", "1u2u", "1u2u", "1u3u", "1u3u", "1u3u"]),
            (Spin::Up, Spin::Down, ["1u3d", "1u3d", "1u2d", "1u2d", "1u2d", "1u2d", "1u3d", "1u3d"]),
            (Spin::Down, Spin::Up, ["1d3u", "2d3u", "2d3u", "2d3u", "2d3d", "2d3d", "2d3d", "1d3d"]),
            (Spin::Down, Spin::Down, ["1d3d", "2d3d", "2d3d", "2d3d", "2d3u", "2d3u", "2d3u", "1d3u"]),
        ];
        for (cs, ts, want) in golden {
            let steps = cnot_ideal_trace(&computational_state(3, &r, cs, ts).unwrap(), &r).unwrap();
            let got: Vec<String> = steps.iter().map(only_config).collect();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn cnot_on_product_grid() {
        let r = CnotRoles::default();
        let b = strict3();
        let n = 12;
        for i in 0..n {
            for j in 0..n {
                let (th, ph) = (PI * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
                let ctrl = [c(th.cos(), 0.0), Complex64::from_polar(th.sin(), ph)];
                let tgt = [Complex64::from_polar((th / 2.0).sin(), -ph), c((th / 2.0).cos(), 0.0)];
                let input = product_state(b.clone(), &r, ctrl, tgt).unwrap();
                let out = cnot_ideal(&input, &r).unwrap();
                let want = {
                    let mut a = product_state(b.clone(), &r, [ctrl[0], c(0.0, 0.0)], tgt)
                        .map(|s| s.amplitudes().to_vec())
                        .unwrap_or_else(|_| unnormalized(&b, &r, [ctrl[0], c(0.0, 0.0)], tgt));
                    let x = unnormalized(&b, &r, [c(0.0, 0.0), ctrl[1]], [tgt[1], tgt[0]]);
                    a.iter_mut().zip(x).for_each(|(p, q)| *p += q);
                    a
                };
                for (p, q) in out.amplitudes().iter().zip(&want) {
                    assert!((p - q).norm() < 1e-12);
                }
            }
        }
    }

    fn unnormalized(b: &TwoElectronBasis, r: &CnotRoles, ctrl: [Complex64; 2], tgt: [Complex64; 2]) -> Vec<Complex64> {
        let mut v = vec![c(0.0, 0.0); b.len()];
        for sc in Spin::ALL {
            for st in Spin::ALL {
                let cfg = Configuration::new(Orbital::new(r.control, sc), Orbital::new(r.target, st)).unwrap();
                v[b.index_of(&cfg).unwrap()] += ctrl[sc.index()] * tgt[st.index()];
            }
        }
        v
    }

    #[test]
    fn cnot_precondition() {
        let r = CnotRoles::default();
        let b = strict3();
        let bad = Configuration::new(Orbital::new(1, Spin::Up), Orbital::new(2, Spin::Up)).unwrap();
        let s = TwoElectronState::basis_state(b, &bad).unwrap();
        assert!(matches!(cnot_ideal(&s, &r), Err(Error::Contract(_))));
        assert!(CnotRoles { control: 0, swap: 2, target: 1 }.validate(3).is_err());
    }

    #[test]
    fn rotation_examples() {
        let th: f64 = 0.4;
        let al: f64 = 1.1;
        let q = [c(th.cos(), 0.0), Complex64::from_polar(th.sin(), al)];
        let x = rotate_qubit(q, PI);
        assert!((x[0] - q[1]).norm() < 1e-15 && (x[1] - q[0]).norm() < 1e-15);
        let id = rotate_qubit(q, 2.0 * PI);
        assert!((id[0] - q[0]).norm() < 1e-15 && (id[1] - q[1]).norm() < 1e-15);
        let half = rotate_qubit([c(1.0, 0.0), c(0.0, 0.0)], PI / 2.0);
        assert!((half[0].norm_sqr() - 0.5).abs() < 1e-15 && (half[1].norm_sqr() - 0.5).abs() < 1e-15);

        let r = CnotRoles::default();
        let s = product_state(strict3(), &r, [c(1.0, 0.0), c(0.0, 0.0)], q).unwrap();
        let out = one_bit_rotation(&s, 2, PI).unwrap();
        let want = product_state(strict3(), &r, [c(1.0, 0.0), c(0.0, 0.0)], [q[1], q[0]]).unwrap();
        for (a, b) in out.amplitudes().iter().zip(want.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }
        // The swap dot is empty: nothing to rotate.
        assert_eq!(one_bit_rotation(&s, 1, PI / 3.0).unwrap(), s);
    }

    fn spin_z(cf: &Configuration) -> i32 {
        cf.electrons().iter().map(|o| if o.spin == Spin::Up { 1 } else { -1 }).sum()
    }

    fn arb_op() -> impl Strategy<Value = GateOp> {
        prop_oneof![
            (0usize..2, 0usize..3).prop_map(|(s, k)| GateOp::hop(Spin::from_index(s).unwrap(), k, k + 1)),
            (0usize..4).prop_map(GateOp::flip),
        ]
    }

    fn arb_state(b: Arc<TwoElectronBasis>) -> impl Strategy<Value = TwoElectronState> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), b.len()).prop_filter_map("zero vector", move |v| {
            let amps: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
            let n = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            (n > 1e-3).then(|| TwoElectronState::new(b.clone(), amps.iter().map(|a| a / n).collect()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn ideal_ops_are_involutive_permutations(op in arb_op(), mode in prop_oneof![Just(BasisMode::Strict), Just(BasisMode::Extended)]) {
            let b = Arc::new(enumerate_basis(4, mode));
            let mut seen = vec![false; b.len()];
            for cf in b.states() {
                let s = TwoElectronState::basis_state(b.clone(), cf).unwrap();
                let once = apply_ideal(&op, &s).unwrap();
                let img = once.support(0.5).next().unwrap().0;
                let j = b.index_of(img).unwrap();
                prop_assert!(!seen[j]);
                seen[j] = true;
                prop_assert_eq!(apply_ideal(&op, &once).unwrap(), s);
                let (n0, n1) = (cf.electrons().len(), img.electrons().len());
                prop_assert_eq!(n0, n1);
                match op {
                    GateOp::Hop { .. } => prop_assert_eq!(spin_z(cf), spin_z(img)),
                    GateOp::Flip { dot, .. } => {
                        let dz = (spin_z(cf) - spin_z(img)).abs();
                        prop_assert_eq!(dz, if cf.occupancy(dot) == 1 { 2 } else { 0 });
                    }
                }
            }
        }

        #[test]
        fn ideal_ops_preserve_norm(op in arb_op(), s in arb_state(Arc::new(enumerate_basis(4, BasisMode::Strict)))) {
            let out = apply_ideal(&op, &s).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
        }

        #[test]
        fn rotation_preserves_norm(dot in 0usize..4, angle in -7.0f64..7.0, s in arb_state(Arc::new(enumerate_basis(4, BasisMode::Strict)))) {
            let out = one_bit_rotation(&s, dot, angle).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
        }

        #[test]
        fn cnot_twice_is_identity(a in 0.0f64..PI, pa in 0.0f64..6.3, g in 0.0f64..PI, pg in 0.0f64..6.3) {
            let r = CnotRoles::default();
            let input = product_state(strict3(), &r,
                [c(a.cos(), 0.0), Complex64::from_polar(a.sin(), pa)],
                [Complex64::from_polar(g.cos(), pg), c(g.sin(), 0.0)]).unwrap();
            let twice = cnot_ideal(&cnot_ideal(&input, &r).unwrap(), &r).unwrap();
            for (p, q) in twice.amplitudes().iter().zip(input.amplitudes()) {
                prop_assert!((p - q).norm() < 1e-12);
            }
        }
    }
}
