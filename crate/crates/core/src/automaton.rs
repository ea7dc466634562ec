//! Cellular-automaton realization of the interferometer.
//!
//! Two wires `L` and `R` of `length` cells each (numbered from 1) carry
//! excitations rightward under a Margolus partition. At even steps the
//! pairs are `(2,3), (4,5), …` with cells `1` and `length` left as
//! singletons; at odd steps the pairs are `(1,2), (3,4), …`. Free
//! propagation exchanges the two cells of a pair, so a right-mover sits at a
//! cell whose index has the parity of the step.
//!
//! Gates replace free propagation on their group at even steps only. With
//! the default length:
//!
//! | cells | map |
//! |---|---|
//! | `L1` | source of the excitation |
//! | `R1` | vacuum source |
//! | `(L4,R4)`→`(L5,R5)` | first beamsplitter |
//! | `(R8,R9)` | arm device: phase shifter or which-way detector |
//! | `(L12,R12)`→`(L13,R13)` | second beamsplitter |
//! | `L16`, `R16` | port detectors and sinks |
//!
//! Corner mirrors are plain cells of the wire.
//!
//! The beamsplitter map creates excitation pairs from vacuum inputs whose
//! phases differ, so cells fill with spurious traffic. The run reads each
//! detector only at the step the injected wave reaches it. Right-movers
//! never mix with left-movers, so the injected wave sees exactly the circuit.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::outcome::{join_labels, OutcomeDistribution, DETECTOR_L, DETECTOR_R};
use crate::phase_space::ModeState;
use crate::plan::MeasureLabels;
use crate::scenarios::ScenarioSpec;
use crate::toy_dynamics::bs_bits;
use crate::toy_measurement::DisturbanceKind;

pub const DEFAULT_WIRE_LENGTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wire {
    L,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub wire: Wire,
    /// 1-based position along the wire.
    pub index: usize,
}

impl CellId {
    pub const fn l(index: usize) -> Self {
        Self { wire: Wire::L, index }
    }

    pub const fn r(index: usize) -> Self {
        Self { wire: Wire::R, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.wire, self.index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub state: ModeState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MapKind {
    FreeSwap,
    Beamsplitter4,
    PhaseShift2,
    DetectorNondestructive2,
    DetectorDestructive2,
    Source1,
    VacuumSource1,
    Sink1,
}

impl MapKind {
    pub fn is_deterministic(self) -> bool {
        matches!(self, MapKind::FreeSwap | MapKind::Beamsplitter4 | MapKind::PhaseShift2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A group of cells and the map applied to it at one parity.
///
/// Pair groups list the left cell first; the beamsplitter lists
/// `(L_j, R_j, L_{j+1}, R_{j+1})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleBinding {
    pub cells: Vec<CellId>,
    pub kind: MapKind,
    pub parity: Parity,
}

/// What sits in arm `R` between the beamsplitters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Device {
    Empty,
    Phase(u8),
    Detector { kind: DisturbanceKind, labels: MeasureLabels },
}

/// The interferometer as the automaton hosts it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MziLayout {
    pub device: Device,
    /// Labels of the `L` and `R` port detectors.
    pub port_labels: [Option<String>; 2],
}

impl MziLayout {
    pub fn new(device: Device) -> Self {
        Self { device, port_labels: [Some(DETECTOR_L.into()), Some(DETECTOR_R.into())] }
    }
}

/// Cell positions of the gates along a wire of the given length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Geometry {
    pub length: usize,
    pub bs1: usize,
    pub device: usize,
    pub bs2: usize,
}

impl Geometry {
    pub fn new(length: usize) -> Result<Self> {
        if length < 8 || !length.is_multiple_of(8) {
            return Err(Error::Unsupported {
                engine: "automaton",
                reason: format!("wire length {length} must be a positive multiple of 8"),
            });
        }
        Ok(Self { length, bs1: length / 4, device: length / 2, bs2: 3 * length / 4 })
    }
}

/// Steps at which the injected wave meets each group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Schedule {
    pub source: u64,
    pub bs1: u64,
    pub device: u64,
    pub bs2: u64,
    pub readout: u64,
}

/// The wave injected at even step `t` occupies cell `j` at step `t + j`.
/// Gates act at even steps only, so every arrival must be even.
pub fn compute_schedule(g: &Geometry) -> Result<Schedule> {
    for t in (0..4u64).step_by(2) {
        let at = |j: usize| t + j as u64;
        let arrivals = [at(g.bs1), at(g.device), at(g.bs2), at(g.length)];
        if arrivals.iter().all(|a| a % 2 == 0) {
            return Ok(Schedule { source: t, bs1: arrivals[0], device: arrivals[1], bs2: arrivals[2], readout: arrivals[3] });
        }
    }
    Err(Error::Unsupported { engine: "automaton", reason: "no even source step aligns the gates".into() })
}

/// A detector reading taken during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Reading {
    pub t: u64,
    pub cell: CellId,
    pub n: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellGrid {
    pub length: usize,
    pub t: u64,
    l: Vec<ModeState>,
    r: Vec<ModeState>,
    /// Shared between the grids of one run, so stepping copies only cells.
    pub even_rules: Arc<[RuleBinding]>,
    pub odd_rules: Arc<[RuleBinding]>,
    /// Steps at which the source injects an excitation.
    pub source_steps: Vec<u64>,
    /// Readings of the most recent step.
    pub readings: Vec<Reading>,
}

fn pair(wire: Wire, j: usize, kind: MapKind, parity: Parity) -> RuleBinding {
    RuleBinding { cells: vec![CellId { wire, index: j }, CellId { wire, index: j + 1 }], kind, parity }
}

impl CellGrid {
    /// Only free propagation plus the boundary sources and sinks.
    pub fn free(length: usize) -> Result<Self> {
        Self::with_layout(length, None)
    }

    pub fn mzi(layout: &MziLayout, length: usize) -> Result<Self> {
        Self::with_layout(length, Some(layout))
    }

    fn with_layout(length: usize, layout: Option<&MziLayout>) -> Result<Self> {
        let g = Geometry::new(length)?;
        let sched = compute_schedule(&g)?;
        let mut even = Vec::new();
        even.push(RuleBinding { cells: vec![CellId::l(1)], kind: MapKind::Source1, parity: Parity::Even });
        even.push(RuleBinding { cells: vec![CellId::r(1)], kind: MapKind::VacuumSource1, parity: Parity::Even });
        for wire in [Wire::L, Wire::R] {
            even.push(RuleBinding { cells: vec![CellId { wire, index: length }], kind: MapKind::Sink1, parity: Parity::Even });
        }
        for j in (2..length - 1).step_by(2) {
            let is_bs = layout.is_some() && (j == g.bs1 || j == g.bs2);
            if is_bs {
                even.push(RuleBinding {
                    cells: vec![CellId::l(j), CellId::r(j), CellId::l(j + 1), CellId::r(j + 1)],
                    kind: MapKind::Beamsplitter4,
                    parity: Parity::Even,
                });
                continue;
            }
            even.push(pair(Wire::L, j, MapKind::FreeSwap, Parity::Even));
            let r_kind = match layout.map(|l| &l.device) {
                Some(Device::Phase(1)) if j == g.device => MapKind::PhaseShift2,
                Some(Device::Detector { kind: DisturbanceKind::Nondestructive, .. }) if j == g.device => {
                    MapKind::DetectorNondestructive2
                }
                Some(Device::Detector { kind: DisturbanceKind::Destructive, .. }) if j == g.device => {
                    MapKind::DetectorDestructive2
                }
                _ => MapKind::FreeSwap,
            };
            even.push(pair(Wire::R, j, r_kind, Parity::Even));
        }
        let mut odd = Vec::new();
        for wire in [Wire::L, Wire::R] {
            for j in (1..length).step_by(2) {
                odd.push(pair(wire, j, MapKind::FreeSwap, Parity::Odd));
            }
        }
        Ok(Self {
            length,
            t: 0,
            l: vec![ModeState::vacuum(0); length],
            r: vec![ModeState::vacuum(0); length],
            even_rules: even.into(),
            odd_rules: odd.into(),
            source_steps: if layout.is_some() { vec![sched.source] } else { vec![] },
            readings: Vec::new(),
        })
    }

    /// Vacuum everywhere with independent uniform phases.
    pub fn randomize_phases<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for c in self.l.iter_mut().chain(self.r.iter_mut()) {
            *c = ModeState::vacuum(rng.random_range(0..2));
        }
    }

    pub fn get(&self, id: CellId) -> ModeState {
        match id.wire {
            Wire::L => self.l[id.index - 1],
            Wire::R => self.r[id.index - 1],
        }
    }

    pub fn set(&mut self, id: CellId, state: ModeState) {
        match id.wire {
            Wire::L => self.l[id.index - 1] = state,
            Wire::R => self.r[id.index - 1] = state,
        }
    }

    pub fn cells(&self) -> Vec<Cell> {
        let mut v = Vec::with_capacity(2 * self.length);
        for (wire, cells) in [(Wire::L, &self.l), (Wire::R, &self.r)] {
            for (i, s) in cells.iter().enumerate() {
                v.push(Cell { id: CellId { wire, index: i + 1 }, state: *s });
            }
        }
        v
    }

    pub fn rules(&self, parity: Parity) -> &[RuleBinding] {
        match parity {
            Parity::Even => &self.even_rules,
            Parity::Odd => &self.odd_rules,
        }
    }

    pub fn total_occupation(&self) -> usize {
        self.l.iter().chain(&self.r).map(|c| c.n as usize).sum()
    }

    /// One update of every group. Maps see only their own group; each map
    /// draws the same amount of randomness whatever its inputs.
    pub fn step<R: Rng + ?Sized>(&self, rng: &mut R) -> CellGrid {
        let parity = if self.t.is_multiple_of(2) { Parity::Even } else { Parity::Odd };
        let mut next = self.clone();
        next.readings.clear();
        for rule in self.rules(parity) {
            let inputs: Vec<ModeState> = rule.cells.iter().map(|&c| self.get(c)).collect();
            let (outputs, reading) = apply_map(rule.kind, &inputs, self.source_steps.contains(&self.t), rng);
            for (&c, s) in rule.cells.iter().zip(outputs) {
                next.set(c, s);
            }
            if let Some(n) = reading {
                next.readings.push(Reading { t: self.t, cell: rule.cells[0], n });
            }
        }
        next.t += 1;
        next
    }

    /// `t`, occupied cells, then the phase bits of each wire.
    pub fn trace_line(&self) -> String {
        let occupied: Vec<String> = self.cells().iter().filter(|c| c.state.n == 1).map(|c| c.id.to_string()).collect();
        let phases = |v: &[ModeState]| v.iter().map(|c| if c.phi == 1 { '1' } else { '0' }).collect::<String>();
        format!("t={:<3} occupied=[{}] phi_L={} phi_R={}", self.t, occupied.join(","), phases(&self.l), phases(&self.r))
    }
}

fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> u8 {
    rng.random_range(0..2)
}

/// Output of one group map and an optional detector reading.
fn apply_map<R: Rng + ?Sized>(kind: MapKind, x: &[ModeState], inject: bool, rng: &mut R) -> (Vec<ModeState>, Option<u8>) {
    match kind {
        MapKind::FreeSwap => (vec![x[1], x[0]], None),
        MapKind::Beamsplitter4 => {
            let (l_out, r_out) = bs_bits(x[0], x[1]);
            let (l_back, r_back) = bs_bits(x[2], x[3]);
            (vec![l_back, r_back, l_out, r_out], None)
        }
        MapKind::PhaseShift2 => {
            let flip = |m: ModeState| ModeState::new(m.n, m.phi ^ 1);
            (vec![flip(x[1]), flip(x[0])], None)
        }
        MapKind::DetectorNondestructive2 => {
            let (a, b) = (random_phase(rng), random_phase(rng));
            (vec![ModeState::new(x[1].n, a), ModeState::new(x[0].n, b)], Some(x[0].n))
        }
        MapKind::DetectorDestructive2 => {
            let (a, b) = (random_phase(rng), random_phase(rng));
            (vec![ModeState::vacuum(a), ModeState::vacuum(b)], Some(x[0].n))
        }
        MapKind::Source1 => {
            let phi = random_phase(rng);
            (vec![ModeState::new(u8::from(inject), phi)], None)
        }
        MapKind::VacuumSource1 => (vec![ModeState::vacuum(random_phase(rng))], None),
        MapKind::Sink1 => (vec![ModeState::vacuum(random_phase(rng))], Some(x[0].n)),
    }
}

/// Deterministic pair-group map given as `(cells j, cells j+1) ↦ (cells j, cells j+1)`.
pub type GroupMap<'a> = &'a dyn Fn(&[ModeState], &[ModeState]) -> (Vec<ModeState>, Vec<ModeState>);

/// Time-reversal symmetry of a group map: the state arriving at side `j+1`
/// is a function of side `j` alone, the state arriving at side `j` is a
/// function of side `j+1` alone, and the two functions coincide.
#[allow(clippy::needless_range_loop)]
pub fn check_time_reversal_of(map: GroupMap<'_>, width: usize) -> bool {
    let n = 1usize << (2 * width);
    let decode = |code: usize| -> Vec<ModeState> {
        (0..width).map(|i| ModeState::new(((code >> (2 * i)) & 1) as u8, ((code >> (2 * i + 1)) & 1) as u8)).collect()
    };
    let mut forward: Vec<Option<Vec<ModeState>>> = vec![None; n];
    let mut backward: Vec<Option<Vec<ModeState>>> = vec![None; n];
    for a in 0..n {
        for b in 0..n {
            let (out_j, out_j1) = map(&decode(a), &decode(b));
            match &forward[a] {
                Some(prev) if *prev != out_j1 => return false,
                _ => forward[a] = Some(out_j1),
            }
            match &backward[b] {
                Some(prev) if *prev != out_j => return false,
                _ => backward[b] = Some(out_j),
            }
        }
    }
    forward == backward
}

pub fn check_time_reversal(kind: MapKind) -> Result<bool> {
    if !kind.is_deterministic() {
        return Err(Error::NotDeterministic);
    }
    let width = if kind == MapKind::Beamsplitter4 { 2 } else { 1 };
    let map = move |a: &[ModeState], b: &[ModeState]| {
        let x: Vec<ModeState> = a.iter().chain(b).copied().collect();
        // Deterministic maps never draw, so any generator will do.
        let (out, _) = apply_map(kind, &x, false, &mut ChaCha8Rng::seed_from_u64(0));
        let (j, j1) = out.split_at(width);
        (j.to_vec(), j1.to_vec())
    };
    Ok(check_time_reversal_of(&map, width))
}

/// Runs one shot and returns its outcome label.
pub fn run_once(layout: &MziLayout, length: usize, seed: u64, run: u64) -> Result<String> {
    let g = Geometry::new(length)?;
    let sched = compute_schedule(&g)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run);
    let mut grid = CellGrid::mzi(layout, length)?;
    grid.randomize_phases(&mut rng);
    let mut measure_labels: Vec<String> = Vec::new();
    let mut port_labels: Vec<String> = Vec::new();
    let device_cell = CellId::r(g.device);
    while grid.t <= sched.readout {
        let t = grid.t;
        grid = grid.step(&mut rng);
        let read = |cell: CellId| grid.readings.iter().find(|r| r.cell == cell && r.t == t).map(|r| r.n);
        if t == sched.device {
            if let Device::Detector { kind, labels } = &layout.device {
                let n = read(device_cell).expect("detector group reads at even steps");
                if let Some(l) = labels.for_value(n) {
                    measure_labels.push(l.to_string());
                }
                if *kind == DisturbanceKind::Destructive && n == 1 {
                    return Ok(join_labels(&measure_labels));
                }
            }
        }
        if t == sched.readout {
            for (i, cell) in [CellId::l(length), CellId::r(length)].into_iter().enumerate() {
                if read(cell) == Some(1) {
                    if let Some(l) = &layout.port_labels[i] {
                        port_labels.push(l.clone());
                    }
                }
            }
        }
    }
    measure_labels.extend(port_labels);
    Ok(join_labels(&measure_labels))
}

pub fn run_layout(layout: &MziLayout, length: usize, shots: u64, seed: u64) -> Result<OutcomeDistribution> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    Geometry::new(length)?;
    let counts = (0..shots)
        .into_par_iter()
        .map(|run| run_once(layout, length, seed, run))
        .try_fold(BTreeMap::new, |mut m: BTreeMap<String, u64>, label| {
            *m.entry(label?).or_insert(0) += 1;
            Ok::<_, Error>(m)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })?;
    Ok(OutcomeDistribution::Sampled { shots, counts })
}

/// Empirical distribution of a scenario on the default layout.
pub fn run_experiment(scenario: &ScenarioSpec, shots: u64, seed: u64) -> Result<OutcomeDistribution> {
    let layout = crate::circuit_dsl::compile_automaton(&scenario.program()?)?;
    run_layout(&layout, DEFAULT_WIRE_LENGTH, shots, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn grid_with(layout: Option<&MziLayout>) -> CellGrid {
        CellGrid::with_layout(DEFAULT_WIRE_LENGTH, layout).unwrap()
    }

    #[test]
    fn partition_covers_every_cell_once() {
        let layouts = [
            MziLayout::new(Device::Empty),
            MziLayout::new(Device::Phase(1)),
            MziLayout::new(Device::Detector { kind: DisturbanceKind::Destructive, labels: MeasureLabels::default() }),
        ];
        for layout in &layouts {
            let g = grid_with(Some(layout));
            for parity in [Parity::Even, Parity::Odd] {
                let mut seen = BTreeSet::new();
                for rule in g.rules(parity) {
                    assert_eq!(rule.parity, parity);
                    for c in &rule.cells {
                        assert!(seen.insert(*c), "{c} in two groups");
                    }
                }
                assert_eq!(seen.len(), 2 * DEFAULT_WIRE_LENGTH);
            }
            assert!(g.odd_rules.iter().all(|r| r.kind == MapKind::FreeSwap));
        }
    }

    #[test]
    fn schedule_is_even_aligned() {
        let s = compute_schedule(&Geometry::new(16).unwrap()).unwrap();
        assert_eq!((s.source, s.bs1, s.device, s.bs2, s.readout), (0, 4, 8, 12, 16));
        assert!(Geometry::new(12).is_err());
    }

    /// A lone right-mover placed at L1 just after an even step walks one cell per step.
    #[test]
    fn excitation_walks_right() {
        let mut g = grid_with(None);
        g.t = 1;
        g.set(CellId::l(1), ModeState::new(1, 0));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for expected in 2..=4 {
            g = g.step(&mut rng);
            let occupied: Vec<CellId> = g.cells().iter().filter(|c| c.state.n == 1).map(|c| c.id).collect();
            assert_eq!(occupied, vec![CellId::l(expected)]);
        }
    }

    #[test]
    fn free_grid_conserves_occupation_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut g = grid_with(None);
        g.randomize_phases(&mut rng);
        for _ in 0..40 {
            g = g.step(&mut rng);
            assert_eq!(g.total_occupation(), 0);
        }
    }

    /// Beamsplitters turn vacuum pairs with unequal phases into two
    /// excitations, so only parity survives on the full layout.
    #[test]
    fn beamsplitter_groups_conserve_parity_only() {
        let x = [ModeState::vacuum(0), ModeState::vacuum(1), ModeState::vacuum(0), ModeState::vacuum(0)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, _) = apply_map(MapKind::Beamsplitter4, &x, false, &mut rng);
        assert_eq!(out.iter().map(|m| m.n).sum::<u8>(), 2);
        for code in 0..256usize {
            let x: Vec<ModeState> =
                (0..4).map(|i| ModeState::new((code >> (2 * i) & 1) as u8, (code >> (2 * i + 1) & 1) as u8)).collect();
            let (out, _) = apply_map(MapKind::Beamsplitter4, &x, false, &mut rng);
            let n = |v: &[ModeState]| v.iter().map(|m| m.n as u32).sum::<u32>();
            assert_eq!(n(&out) % 2, n(&x) % 2);
        }
    }

    #[test]
    fn beamsplitter_group_matches_bit_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = [ModeState::new(1, 0), ModeState::new(0, 0), ModeState::vacuum(1), ModeState::vacuum(1)];
        let (out, _) = apply_map(MapKind::Beamsplitter4, &x, false, &mut rng);
        // (N_L, Φ_L, N_R, Φ_R) = (1,0,0,0) ↦ (0,1,1,0) on the j+1 side
        assert_eq!((out[2], out[3]), (ModeState::new(0, 1), ModeState::new(1, 0)));
    }

    #[test]
    fn time_reversal() {
        for kind in [MapKind::FreeSwap, MapKind::Beamsplitter4, MapKind::PhaseShift2] {
            assert!(check_time_reversal(kind).unwrap(), "{kind:?}");
        }
        assert_eq!(check_time_reversal(MapKind::Sink1), Err(Error::NotDeterministic));
        // Flips the phase only on the way right.
        let broken = |a: &[ModeState], b: &[ModeState]| (b.to_vec(), vec![ModeState::new(a[0].n, a[0].phi ^ 1)]);
        assert!(!check_time_reversal_of(&broken, 1));
        // Lets the left-mover leak into the right-moving output.
        let leaky = |a: &[ModeState], b: &[ModeState]| (b.to_vec(), vec![ModeState::new(a[0].n ^ b[0].n, a[0].phi)]);
        assert!(!check_time_reversal_of(&leaky, 1));
    }

    /// A group's next state ignores every cell outside it.
    #[test]
    fn updates_are_local() {
        let layout = MziLayout::new(Device::Detector { kind: DisturbanceKind::Nondestructive, labels: MeasureLabels::default() });
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut base = grid_with(Some(&layout));
        base.randomize_phases(&mut rng);
        for t in 0..2u64 {
            base.t = t;
            let parity = if t == 0 { Parity::Even } else { Parity::Odd };
            let rng0 = ChaCha8Rng::seed_from_u64(77);
            let reference = base.step(&mut rng0.clone());
            for rule in base.rules(parity) {
                for cell in base.cells().iter().map(|c| c.id).filter(|c| !rule.cells.contains(c)) {
                    let mut perturbed = base.clone();
                    let s = perturbed.get(cell);
                    perturbed.set(cell, ModeState::new(s.n ^ 1, s.phi ^ 1));
                    let out = perturbed.step(&mut rng0.clone());
                    for c in &rule.cells {
                        assert_eq!(out.get(*c), reference.get(*c));
                    }
                }
            }
        }
    }

    #[test]
    fn deterministic_ports() {
        for (s, port) in [(0u8, DETECTOR_L), (1, DETECTOR_R)] {
            let layout = MziLayout::new(if s == 1 { Device::Phase(1) } else { Device::Empty });
            for run in 0..200 {
                assert_eq!(run_once(&layout, 16, 3, run).unwrap(), port);
            }
        }
    }

    #[test]
    fn constructive_port_is_exact_over_an_ensemble() {
        let d = run_experiment(&ScenarioSpec::mzi_phase(0), 10_000, 8).unwrap();
        assert_eq!(d.frequency(DETECTOR_L), 1.0);
    }

    /// Between sources, detectors and sinks the occupation changes only in
    /// pairs, at beamsplitter groups.
    #[test]
    fn deterministic_groups_conserve_occupation_parity() {
        let layout = MziLayout::new(Device::Phase(1));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut g = grid_with(Some(&layout));
        g.randomize_phases(&mut rng);
        let mut created = false;
        for _ in 0..40 {
            let parity = if g.t % 2 == 0 { Parity::Even } else { Parity::Odd };
            let next = g.step(&mut rng);
            for rule in g.rules(parity).iter().filter(|r| r.kind.is_deterministic()) {
                let n = |grid: &CellGrid| rule.cells.iter().map(|c| grid.get(*c).n as u32).sum::<u32>();
                assert_eq!(n(&g) % 2, n(&next) % 2, "{rule:?}");
                created |= n(&next) > n(&g);
            }
            g = next;
        }
        assert!(created, "vacuum inputs with unequal phases should create pairs");
    }

    #[test]
    fn trace_dump() {
        let layout = MziLayout::new(Device::Empty);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut g = grid_with(Some(&layout));
        g.randomize_phases(&mut rng);
        let g = g.step(&mut rng);
        let line = g.trace_line();
        assert!(line.starts_with("t=1"));
        assert!(line.contains("L1"));
    }
}
