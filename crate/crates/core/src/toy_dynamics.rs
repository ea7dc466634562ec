//! Deterministic maps on physical states and their push-forward onto
//! epistemic states.
//!
//! The beamsplitter reads its first mode argument as the `L` input and the
//! second as `R`. The map is asymmetric (the phase of `R` passes through), so
//! swapping the arguments gives a different, equally valid, beamsplitter.

use crate::error::{Error, Result};
use crate::phase_space::{AncillaState, EpistemicState, ModeState, PhysicalState, RegisterShape, MAX_SUBSYSTEMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ToyGate {
    Beamsplitter { a: usize, b: usize },
    PhaseShift { mode: usize, s: u8 },
    Cnot { control: usize, target: usize },
    SwapModes { a: usize, b: usize },
    Identity,
}

/// Beamsplitter on the bits of two modes.
pub fn bs_bits(l: ModeState, r: ModeState) -> (ModeState, ModeState) {
    let dphi = l.phi ^ r.phi;
    (ModeState::new(dphi, l.n ^ r.phi), ModeState::new(l.n ^ r.n ^ dphi, r.phi))
}

/// Controlled-NOT between a mode and an ancilla.
pub fn cnot_bits(m: ModeState, a: AncillaState) -> (ModeState, AncillaState) {
    (ModeState::new(m.n, m.phi ^ a.p), AncillaState::new(a.q ^ m.n, a.p))
}

fn check_pair(shape: &RegisterShape, a: usize, b: usize) -> Result<()> {
    shape.check_mode(a)?;
    shape.check_mode(b)?;
    if a == b {
        return Err(Error::RepeatedMode(a));
    }
    Ok(())
}

pub fn apply_beamsplitter(state: PhysicalState, a: usize, b: usize) -> Result<PhysicalState> {
    check_pair(&state.shape(), a, b)?;
    Ok(ToyGate::Beamsplitter { a, b }.apply(state))
}

pub fn apply_phase_shift(state: PhysicalState, mode: usize, s: u8) -> Result<PhysicalState> {
    state.shape().check_mode(mode)?;
    Ok(ToyGate::PhaseShift { mode, s }.apply(state))
}

pub fn apply_cnot(state: PhysicalState, control: usize, target: usize) -> Result<PhysicalState> {
    state.shape().check_mode(control)?;
    state.shape().check_ancilla(target)?;
    Ok(ToyGate::Cnot { control, target }.apply(state))
}

pub fn apply_swap(state: PhysicalState, a: usize, b: usize) -> Result<PhysicalState> {
    check_pair(&state.shape(), a, b)?;
    Ok(ToyGate::SwapModes { a, b }.apply(state))
}

impl ToyGate {
    /// Applies the gate without range checks; see [`ToyGate::validate`].
    pub fn apply(&self, state: PhysicalState) -> PhysicalState {
        match *self {
            ToyGate::Beamsplitter { a, b } => {
                let (l, r) = bs_bits(state.mode(a), state.mode(b));
                state.with_mode(a, l).with_mode(b, r)
            }
            ToyGate::PhaseShift { mode, s } => {
                let m = state.mode(mode);
                state.with_mode(mode, ModeState::new(m.n, m.phi ^ s))
            }
            ToyGate::Cnot { control, target } => {
                let (m, a) = cnot_bits(state.mode(control), state.ancilla(target));
                state.with_mode(control, m).with_ancilla(target, a)
            }
            ToyGate::SwapModes { a, b } => {
                let (x, y) = (state.mode(a), state.mode(b));
                state.with_mode(a, y).with_mode(b, x)
            }
            ToyGate::Identity => state,
        }
    }

    /// Range checks plus an exhaustive bijection check on small registers.
    pub fn validate(&self, shape: &RegisterShape) -> Result<()> {
        match *self {
            ToyGate::Beamsplitter { a, b } | ToyGate::SwapModes { a, b } => check_pair(shape, a, b)?,
            ToyGate::PhaseShift { mode, .. } => shape.check_mode(mode)?,
            ToyGate::Cnot { control, target } => {
                shape.check_mode(control)?;
                shape.check_ancilla(target)?;
            }
            ToyGate::Identity => {}
        }
        if shape.subsystems() <= MAX_SUBSYSTEMS {
            let mut hit = vec![false; shape.points()];
            for s in shape.all_states() {
                let img = self.apply(s).code() as usize;
                if std::mem::replace(&mut hit[img], true) {
                    return Err(Error::NotBijective);
                }
            }
        }
        Ok(())
    }
}

/// Image of the support under the gate.
pub fn push_forward(state: &EpistemicState, gate: &ToyGate) -> Result<EpistemicState> {
    gate.validate(&state.shape())?;
    let shape = state.shape();
    Ok(state.map_codes(|c| gate.apply(PhysicalState::from_code(shape, c)).code()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_space::{make_ancilla, make_occupied, valid_states, Functional, Var};

    fn two() -> RegisterShape {
        RegisterShape::modes(2)
    }

    fn st(bits: &[u8]) -> PhysicalState {
        PhysicalState::from_bits(two(), bits).unwrap()
    }

    fn es(tuples: &[&[u8]]) -> EpistemicState {
        EpistemicState::from_tuples(two(), tuples).unwrap()
    }

    /// Beamsplitter written as the swap of `N_L` with `ΔΦ`, holding `ΔN` and `Φ_R` fixed.
    fn swap_rule_oracle(s: PhysicalState) -> PhysicalState {
        let (nl, pl, nr, pr) = (s.bit(0), s.bit(1), s.bit(2), s.bit(3));
        let (dn, dphi) = (nl ^ nr, pl ^ pr);
        let (nl2, dphi2) = (dphi, nl);
        let pr2 = pr;
        let pl2 = dphi2 ^ pr2;
        let nr2 = dn ^ nl2;
        PhysicalState::from_bits(s.shape(), &[nl2, pl2, nr2, pr2]).unwrap()
    }

    #[test]
    fn beamsplitter_examples() {
        assert_eq!(apply_beamsplitter(st(&[1, 0, 0, 0]), 0, 1).unwrap(), st(&[0, 1, 1, 0]));
        assert_eq!(apply_beamsplitter(st(&[0, 0, 0, 0]), 0, 1).unwrap(), st(&[0, 0, 0, 0]));
        for s in two().all_states() {
            let once = apply_beamsplitter(s, 0, 1).unwrap();
            assert_eq!(apply_beamsplitter(once, 0, 1).unwrap(), s);
            assert_eq!(once, swap_rule_oracle(s));
        }
        assert_eq!(apply_beamsplitter(st(&[0, 0, 0, 0]), 1, 1), Err(Error::RepeatedMode(1)));
    }

    #[test]
    fn phase_and_swap_examples() {
        let one = RegisterShape::modes(1);
        let s = PhysicalState::from_bits(one, &[1, 0]).unwrap();
        assert_eq!(apply_phase_shift(s, 0, 1).unwrap().bits(), vec![1, 1]);
        assert_eq!(apply_phase_shift(s, 0, 0).unwrap(), s);
        for s in two().all_states() {
            let f = apply_phase_shift(s, 1, 1).unwrap();
            assert_eq!(apply_phase_shift(f, 1, 1).unwrap(), s);
            let w = apply_swap(s, 0, 1).unwrap();
            assert_eq!(apply_swap(w, 0, 1).unwrap(), s);
        }
        assert_eq!(apply_swap(st(&[1, 0, 0, 1]), 0, 1).unwrap(), st(&[0, 1, 1, 0]));
    }

    #[test]
    fn cnot_examples() {
        // Register (N_R, Φ_R, q, p): one mode and one ancilla.
        let shape = RegisterShape::new(1, 1);
        let s = |b: &[u8]| PhysicalState::from_bits(shape, b).unwrap();
        assert_eq!(apply_cnot(s(&[1, 0, 0, 1]), 0, 0).unwrap(), s(&[1, 1, 1, 1]));
        assert_eq!(apply_cnot(s(&[0, 0, 0, 0]), 0, 0).unwrap(), s(&[0, 0, 0, 0]));
        assert_eq!(apply_cnot(s(&[1, 1, 1, 0]), 0, 0).unwrap(), s(&[1, 1, 0, 0]));
        assert!(matches!(apply_cnot(s(&[0, 0, 0, 0]), 0, 1), Err(Error::AncillaOutOfRange { .. })));
    }

    #[test]
    fn swapping_in_vacuum_exports_uniform_phase() {
        let shape = RegisterShape::modes(3);
        let start = EpistemicState::from_constraints(
            shape,
            &[
                (Functional::of(&shape, Var::N(0)).unwrap(), 1),
                (Functional::of(&shape, Var::N(1)).unwrap(), 0),
                (Functional::of(&shape, Var::Phi(1)).unwrap(), 0),
                (Functional::of(&shape, Var::N(2)).unwrap(), 0),
            ],
        )
        .unwrap();
        let out = push_forward(&start, &ToyGate::SwapModes { a: 1, b: 2 }).unwrap();
        let phi1 = Functional::of(&shape, Var::Phi(1)).unwrap();
        assert_eq!(out.knows(phi1), None);
        assert_eq!(out.probability(phi1, 1), crate::outcome::Prob::new(1, 2));
    }

    #[test]
    fn push_forward_examples() {
        let input = make_occupied(2, 0).unwrap();
        let bs = ToyGate::Beamsplitter { a: 0, b: 1 };
        let after = push_forward(&input, &bs).unwrap();
        assert_eq!(after, es(&[&[0, 0, 1, 1], &[0, 1, 1, 0], &[1, 0, 0, 1], &[1, 1, 0, 0]]));
        let shifted = push_forward(&after, &ToyGate::PhaseShift { mode: 1, s: 1 }).unwrap();
        assert_eq!(shifted, es(&[&[0, 0, 1, 0], &[0, 1, 1, 1], &[1, 0, 0, 0], &[1, 1, 0, 1]]));
        assert_eq!(push_forward(&after, &bs).unwrap(), input);
    }

    #[test]
    fn product_through_beamsplitter() {
        let joint = make_occupied(2, 0).unwrap().product(&make_ancilla(0)).unwrap();
        let out = push_forward(&joint, &ToyGate::Beamsplitter { a: 0, b: 1 }).unwrap();
        // Oracle: each state of the product pushed through the bit formula by hand.
        let mut expected = Vec::new();
        for pl in 0..2u8 {
            for pr in 0..2u8 {
                for p in 0..2u8 {
                    let dphi = pl ^ pr;
                    expected.push(vec![dphi, 1 ^ pr, 1 ^ dphi, pr, 0, p]);
                }
            }
        }
        expected.sort();
        assert_eq!(out.tuples(), expected);
        assert_eq!(out.len(), 8);
    }

    #[test]
    fn gates_are_bijections_and_preserve_validity() {
        let shapes = [RegisterShape::modes(2), RegisterShape::new(2, 1), RegisterShape::modes(3)];
        for shape in shapes {
            let mut gates = vec![ToyGate::Identity, ToyGate::Beamsplitter { a: 0, b: 1 }, ToyGate::SwapModes { a: 1, b: 0 }];
            gates.extend([0, 1].map(|s| ToyGate::PhaseShift { mode: 1, s }));
            if shape.ancillas > 0 {
                gates.push(ToyGate::Cnot { control: 1, target: 0 });
            }
            let catalog = valid_states(shape).unwrap();
            for g in &gates {
                g.validate(&shape).unwrap();
                for s in &catalog {
                    let out = push_forward(s, g).unwrap();
                    assert!(out.is_valid(), "{g:?} broke {s}");
                    assert_eq!(out.len(), s.len());
                }
            }
        }
    }

    #[test]
    fn occupation_parity_is_conserved() {
        let shape = RegisterShape::new(2, 1);
        for s in shape.all_states() {
            let parity = |x: PhysicalState| x.bit(0) ^ x.bit(2);
            assert_eq!(parity(ToyGate::Beamsplitter { a: 0, b: 1 }.apply(s)), parity(s));
            assert_eq!(parity(ToyGate::PhaseShift { mode: 0, s: 1 }.apply(s)), parity(s));
            let c = ToyGate::Cnot { control: 1, target: 0 }.apply(s);
            assert_eq!((c.bit(0), c.bit(2)), (s.bit(0), s.bit(2)));
        }
    }
}
