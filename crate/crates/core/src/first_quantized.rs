//! Coarse-grained description of the single-excitation sector by a
//! which-way bit `w` and a relative phase `theta`.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::phase_space::{EpistemicState, PhysicalState, RegisterShape};
use crate::toy_dynamics::ToyGate;
use crate::toy_measurement::{measure_occupation, Disturbance, DisturbanceKind};
use crate::outcome::Prob;

/// `w = 1` means the excitation is in `L`, `w = 0` in `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqState {
    pub w: u8,
    pub theta: u8,
}

impl FqState {
    pub const fn new(w: u8, theta: u8) -> Self {
        Self { w: w & 1, theta: theta & 1 }
    }
}

/// Flat distribution over the four coarse states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FqEpistemicState {
    support: BTreeSet<FqState>,
}

impl FqEpistemicState {
    pub fn new(states: impl IntoIterator<Item = FqState>) -> Result<Self> {
        let support: BTreeSet<FqState> = states.into_iter().collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        Ok(Self { support })
    }

    pub fn states(&self) -> impl Iterator<Item = FqState> + '_ {
        self.support.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Size 4, or size 2 with exactly one of `w`, `theta`, `w ⊕ theta` known.
    pub fn is_valid(&self) -> bool {
        // Two distinct points leave exactly one nonzero functional constant.
        matches!(self.support.len(), 2 | 4)
    }

    fn map(&self, f: impl Fn(FqState) -> FqState) -> Self {
        Self { support: self.states().map(f).collect() }
    }
}

impl fmt::Display for FqEpistemicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.states().map(|s| format!("({},{})", s.w, s.theta)).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn check_sector(state: PhysicalState) -> Result<()> {
    let shape = state.shape();
    if shape != RegisterShape::modes(2) {
        return Err(Error::ShapeMismatch { expected: RegisterShape::modes(2).to_string(), found: shape.to_string() });
    }
    if state.mode(0).n ^ state.mode(1).n != 1 {
        return Err(Error::OutsideSector);
    }
    Ok(())
}

pub fn coarse_grain(state: PhysicalState) -> Result<FqState> {
    check_sector(state)?;
    let (l, r) = (state.mode(0), state.mode(1));
    Ok(FqState::new(l.n, l.phi ^ r.phi))
}

pub fn coarse_grain_epistemic(state: &EpistemicState) -> Result<FqEpistemicState> {
    FqEpistemicState::new(state.states().map(coarse_grain).collect::<Result<Vec<_>>>()?)
}

/// The eight physical states with exactly one occupied mode.
pub fn sector_states() -> Vec<PhysicalState> {
    RegisterShape::modes(2).all_states().filter(|s| check_sector(*s).is_ok()).collect()
}

pub fn fq_beamsplitter(state: FqState) -> FqState {
    FqState::new(state.theta, state.w)
}

/// A phase flip on either arm flips `theta`; flipping both arms cancels out.
pub fn fq_phase(state: FqState, s: u8) -> FqState {
    FqState::new(state.w, state.theta ^ s)
}

/// Which-way measurement: condition on `w`, randomize `theta`.
pub fn fq_measure_whichway(state: &FqEpistemicState) -> Vec<(u8, Prob, FqEpistemicState)> {
    let total = state.len() as u64;
    let mut out = Vec::new();
    for w in 0..2 {
        let kept: Vec<FqState> = state.states().filter(|s| s.w == w).collect();
        if kept.is_empty() {
            continue;
        }
        let p = Prob::new(kept.len() as u64, total);
        let post = FqEpistemicState::new([FqState::new(w, 0), FqState::new(w, 1)]).expect("nonempty");
        out.push((w, p, post));
    }
    out
}

/// Operations allowed in a sector circuit on modes `L = 0`, `R = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorOp {
    Gate(ToyGate),
    /// Nondestructive occupation measurement of a mode.
    Measure(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommutationReport {
    pub ontic_checks: usize,
    pub epistemic_checks: usize,
    pub failures: Vec<String>,
}

impl CommutationReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn fq_gate(gate: &ToyGate, s: FqState) -> Result<FqState> {
    match *gate {
        ToyGate::Beamsplitter { a: 0, b: 1 } => Ok(fq_beamsplitter(s)),
        ToyGate::PhaseShift { s: bit, .. } => Ok(fq_phase(s, bit)),
        ToyGate::Identity => Ok(s),
        other => Err(Error::Unsupported { engine: "first-quantized", reason: format!("{other:?}") }),
    }
}

/// Checks `coarse ∘ fine-step = coarse-step ∘ coarse` at every step of the
/// circuit, for every sector input and every disturbance branch, and again on
/// every valid epistemic state supported inside the sector.
pub fn check_commutation(circuit: &[SectorOp]) -> Result<CommutationReport> {
    let shape = RegisterShape::modes(2);
    for op in circuit {
        match op {
            SectorOp::Gate(g) => {
                g.validate(&shape)?;
                fq_gate(g, FqState::new(0, 0))?;
            }
            SectorOp::Measure(m) => shape.check_mode(*m)?,
        }
    }
    let mut report = CommutationReport::default();

    // Ontic level: follow every branch of every sector state.
    let mut frontier: Vec<PhysicalState> = sector_states();
    for (step, op) in circuit.iter().enumerate() {
        let mut next = Vec::new();
        for x in frontier {
            let c = coarse_grain(x)?;
            match op {
                SectorOp::Gate(g) => {
                    let y = g.apply(x);
                    report.ontic_checks += 1;
                    match coarse_grain(y) {
                        Ok(cy) if cy == fq_gate(g, c)? => {}
                        _ => report.failures.push(format!("step {step}: gate {g:?} on {x}")),
                    }
                    next.push(y);
                }
                SectorOp::Measure(m) => {
                    let value = x.mode(*m).n;
                    // Measuring the occupation of L reads w, of R reads 1 - w.
                    let w_read = if *m == 0 { value } else { value ^ 1 };
                    report.ontic_checks += 1;
                    if w_read != c.w {
                        report.failures.push(format!("step {step}: outcome mismatch on {x}"));
                    }
                    let fine: BTreeSet<FqState> = DisturbanceKind::Nondestructive
                        .choices()
                        .iter()
                        .map(|f| {
                            let y = crate::toy_measurement::apply_occupation_disturbance(x, *m, *f);
                            next.push(y);
                            coarse_grain(y)
                        })
                        .collect::<Result<_>>()?;
                    let coarse: BTreeSet<FqState> =
                        [Disturbance::Identity, Disturbance::Flip].iter().map(|f| FqState::new(c.w, f.apply(c.theta))).collect();
                    if fine != coarse {
                        report.failures.push(format!("step {step}: posterior mismatch on {x}"));
                    }
                }
            }
        }
        frontier = next;
    }

    // Epistemic level: every valid state living inside the sector.
    let inputs: Vec<EpistemicState> = crate::phase_space::valid_states(shape)?
        .into_iter()
        .filter(|s| s.states().all(|x| check_sector(x).is_ok()))
        .collect();
    for input in inputs {
        let mut branches = vec![(input.clone(), coarse_grain_epistemic(&input)?)];
        for (step, op) in circuit.iter().enumerate() {
            let mut next = Vec::new();
            for (fine, coarse) in branches {
                report.epistemic_checks += 1;
                match op {
                    SectorOp::Gate(g) => {
                        let f2 = crate::toy_dynamics::push_forward(&fine, g)?;
                        let c2 = coarse.map(|s| fq_gate(g, s).expect("checked above"));
                        if coarse_grain_epistemic(&f2).ok().as_ref() != Some(&c2) {
                            report.failures.push(format!("step {step}: epistemic gate mismatch from {input}"));
                        }
                        next.push((f2, c2));
                    }
                    SectorOp::Measure(m) => {
                        let fine_out = measure_occupation(&fine, *m, DisturbanceKind::Nondestructive)?;
                        let coarse_out = fq_measure_whichway(&coarse);
                        if fine_out.len() != coarse_out.len() {
                            report.failures.push(format!("step {step}: outcome count mismatch from {input}"));
                            continue;
                        }
                        for o in fine_out {
                            let w = if *m == 0 { o.value } else { o.value ^ 1 };
                            let matched = coarse_out.iter().find(|(cw, _, _)| *cw == w);
                            let ok = matches!(matched, Some((_, p, post))
                                if *p == o.probability && coarse_grain_epistemic(&o.posterior).ok().as_ref() == Some(post));
                            if !ok {
                                report.failures.push(format!("step {step}: epistemic measurement mismatch from {input}"));
                            }
                            if let Some((_, _, post)) = matched {
                                next.push((o.posterior, post.clone()));
                            }
                        }
                    }
                }
            }
            branches = next;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(bits: &[u8]) -> PhysicalState {
        PhysicalState::from_bits(RegisterShape::modes(2), bits).unwrap()
    }

    const BS: SectorOp = SectorOp::Gate(ToyGate::Beamsplitter { a: 0, b: 1 });

    #[test]
    fn coarse_grain_examples() {
        assert_eq!(coarse_grain(st(&[1, 0, 0, 1])).unwrap(), FqState::new(1, 1));
        assert_eq!(coarse_grain(st(&[0, 0, 1, 0])).unwrap(), FqState::new(0, 0));
        assert_eq!(coarse_grain(st(&[0, 0, 0, 0])), Err(Error::OutsideSector));
    }

    #[test]
    fn coarse_grain_is_two_to_one() {
        let sector = sector_states();
        assert_eq!(sector.len(), 8);
        let mut counts = std::collections::BTreeMap::new();
        for x in sector {
            *counts.entry(coarse_grain(x).unwrap()).or_insert(0) += 1;
            let both = x.with_mode(0, crate::phase_space::ModeState::new(x.mode(0).n, x.mode(0).phi ^ 1));
            let both = both.with_mode(1, crate::phase_space::ModeState::new(x.mode(1).n, x.mode(1).phi ^ 1));
            assert_eq!(coarse_grain(both).unwrap(), coarse_grain(x).unwrap());
        }
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 2));
    }

    #[test]
    fn fq_beamsplitter_examples() {
        assert_eq!(fq_beamsplitter(FqState::new(1, 0)), FqState::new(0, 1));
        assert_eq!(fq_beamsplitter(FqState::new(0, 0)), FqState::new(0, 0));
        for w in 0..2 {
            for t in 0..2 {
                let s = FqState::new(w, t);
                assert_eq!(fq_beamsplitter(fq_beamsplitter(s)), s);
            }
        }
    }

    #[test]
    fn fq_measurement_examples() {
        let tracked = FqEpistemicState::new([FqState::new(1, 1), FqState::new(0, 0)]).unwrap();
        let out = fq_measure_whichway(&tracked);
        let l = out.iter().find(|o| o.0 == 1).unwrap();
        assert_eq!(l.1, Prob::new(1, 2));
        assert_eq!(l.2, FqEpistemicState::new([FqState::new(1, 0), FqState::new(1, 1)]).unwrap());
        let known = FqEpistemicState::new([FqState::new(1, 0), FqState::new(1, 1)]).unwrap();
        let again = fq_measure_whichway(&known);
        assert_eq!(again.len(), 1);
        assert_eq!(again[0].0, 1);
        let uniform = FqEpistemicState::new((0..4).map(|c| FqState::new(c & 1, c >> 1))).unwrap();
        assert!(fq_measure_whichway(&uniform).iter().all(|o| o.1 == Prob::new(1, 2)));
        assert!(tracked.is_valid() && known.is_valid() && uniform.is_valid());
        assert!(!FqEpistemicState::new([FqState::new(1, 0)]).unwrap().is_valid());
    }

    #[test]
    fn commutation_on_interferometers() {
        let phase = SectorOp::Gate(ToyGate::PhaseShift { mode: 1, s: 1 });
        let report = check_commutation(&[BS, phase, BS]).unwrap();
        assert!(report.holds(), "{:?}", report.failures);
        assert!(report.ontic_checks >= 24);
        let report = check_commutation(&[BS, SectorOp::Measure(1), BS, SectorOp::Measure(0)]).unwrap();
        assert!(report.holds(), "{:?}", report.failures);
        // joint flip of both arms
        let joint = [SectorOp::Gate(ToyGate::PhaseShift { mode: 0, s: 1 }), phase];
        assert!(check_commutation(&joint).unwrap().holds());
        for x in sector_states() {
            let c = coarse_grain(x).unwrap();
            assert_eq!(fq_phase(fq_phase(c, 1), 1), c);
        }
    }

    #[test]
    fn swap_gate_is_outside_the_coarse_vocabulary() {
        let swap = SectorOp::Gate(ToyGate::SwapModes { a: 0, b: 1 });
        assert!(matches!(check_commutation(&[swap]), Err(Error::Unsupported { .. })));
    }
}
