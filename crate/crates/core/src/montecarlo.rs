//! Ensemble realization of the toy plans: each run draws one physical state
//! from the prepared support and one disturbance function per measurement.
//!
//! Randomness: run `r` of seed `s` uses ChaCha8 stream `r` of key `s`. The
//! initial draw and the draw of each operation sit at fixed word offsets of
//! that stream, so a draw depends only on `(seed, run, op index)`.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::outcome::{format_prob, join_labels, prob_to_f64, OutcomeDistribution, Prob};
use crate::phase_space::PhysicalState;
use crate::plan::{ToyOp, ToyPlan};
use crate::scenarios::toy_engine;
use crate::toy_measurement::{apply_ancilla_disturbance, apply_occupation_disturbance, Disturbance, DisturbanceKind};

/// Words of the stream reserved for each labeled draw.
const WORDS_PER_DRAW: u128 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventRecord {
    /// Position of the operation in the plan.
    pub op_index: usize,
    pub label: String,
    pub value: u8,
    pub f: Disturbance,
    #[serde(serialize_with = "ser_state")]
    pub before: PhysicalState,
    #[serde(serialize_with = "ser_state")]
    pub after: PhysicalState,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub run: u64,
    #[serde(serialize_with = "ser_state")]
    pub initial: PhysicalState,
    pub events: Vec<EventRecord>,
    pub outcome: String,
}

fn ser_state<S: Serializer>(s: &PhysicalState, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.serialize_str(&s.to_string())
}

fn ser_probs<S: Serializer>(m: &BTreeMap<String, Prob>, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_map(m.iter().map(|(k, p)| (k, format_prob(p))))
}

/// Source of the random choices of one run.
pub trait Draws {
    /// Index into an initial support of size `n`.
    fn initial(&mut self, n: usize) -> usize;
    /// Which of the two disturbance functions the operation at `op_index` uses.
    fn choice(&mut self, op_index: usize) -> usize;
}

/// Labeled draws from the seeded stream of one run.
pub struct StreamDraws {
    rng: ChaCha8Rng,
}

impl StreamDraws {
    pub fn new(seed: u64, run: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run);
        Self { rng }
    }
}

impl Draws for StreamDraws {
    fn initial(&mut self, n: usize) -> usize {
        self.rng.set_word_pos(0);
        self.rng.random_range(0..n)
    }

    fn choice(&mut self, op_index: usize) -> usize {
        self.rng.set_word_pos((op_index as u128 + 1) * WORDS_PER_DRAW);
        self.rng.random_range(0..2)
    }
}

/// Fixed choices, used for exhaustive enumeration.
struct FixedDraws<'a> {
    initial: usize,
    choices: &'a [usize],
    next: usize,
}

impl Draws for FixedDraws<'_> {
    fn initial(&mut self, _n: usize) -> usize {
        self.initial
    }

    fn choice(&mut self, _op_index: usize) -> usize {
        let c = self.choices[self.next];
        self.next += 1;
        c
    }
}

/// Single-run measurement update: returns the read value and the new state.
pub type UpdateFn = fn(PhysicalState, &ToyOp, Disturbance) -> (u8, PhysicalState);

/// The measurement update of the toy theory.
pub fn standard_update(state: PhysicalState, op: &ToyOp, f: Disturbance) -> (u8, PhysicalState) {
    match op {
        ToyOp::MeasureN { mode, .. } | ToyOp::Detect { mode, .. } => {
            (state.mode(*mode).n, apply_occupation_disturbance(state, *mode, f))
        }
        ToyOp::MeasureAncilla { ancilla, basis, .. } => {
            let a = state.ancilla(*ancilla);
            let value = if *basis == crate::toy_measurement::Basis::Q { a.q } else { a.p };
            (value, apply_ancilla_disturbance(state, *ancilla, *basis, f))
        }
        ToyOp::Gate(g) => (0, g.apply(state)),
    }
}

fn kind_of(op: &ToyOp) -> DisturbanceKind {
    match op {
        ToyOp::MeasureN { kind, .. } => *kind,
        ToyOp::Detect { .. } => DisturbanceKind::Destructive,
        _ => DisturbanceKind::Nondestructive,
    }
}

fn event_label(plan: &ToyPlan, op: &ToyOp) -> String {
    match op {
        ToyOp::MeasureN { mode, kind, .. } => format!("measure N{mode} {kind:?}"),
        ToyOp::MeasureAncilla { ancilla, basis, .. } => format!("measure {basis:?}{ancilla}"),
        ToyOp::Detect { mode, label } => format!("detect N{mode} as {label}"),
        ToyOp::Gate(g) => format!("{g:?} on {}", plan.shape),
    }
}

fn run_with(plan: &ToyPlan, seed: u64, run: u64, draws: &mut dyn Draws, update: UpdateFn) -> Result<RunRecord> {
    let support: Vec<PhysicalState> = plan.initial_state()?.states().collect();
    let initial = support[draws.initial(support.len())];
    let mut state = initial;
    let mut events = Vec::new();
    let mut measure_labels: Vec<String> = Vec::new();
    let mut detect_labels: Vec<String> = Vec::new();
    for (i, op) in plan.ops.iter().enumerate() {
        if let ToyOp::Gate(g) = op {
            state = g.apply(state);
            continue;
        }
        let kind = kind_of(op);
        let f = kind.choices()[draws.choice(i)];
        let (value, after) = update(state, op, f);
        events.push(EventRecord { op_index: i, label: event_label(plan, op), value, f, before: state, after });
        state = after;
        match op {
            ToyOp::MeasureN { labels, .. } | ToyOp::MeasureAncilla { labels, .. } => {
                if let Some(l) = labels.for_value(value) {
                    measure_labels.push(l.to_string());
                }
                if kind == DisturbanceKind::Destructive && value == 1 && matches!(op, ToyOp::MeasureN { .. }) {
                    break;
                }
            }
            ToyOp::Detect { label, .. } if value == 1 => detect_labels.push(label.clone()),
            _ => {}
        }
    }
    measure_labels.extend(detect_labels);
    Ok(RunRecord { seed, run, initial, events, outcome: join_labels(&measure_labels) })
}

/// One replayable run.
pub fn sample_run(plan: &ToyPlan, seed: u64, run: u64) -> Result<RunRecord> {
    run_with(plan, seed, run, &mut StreamDraws::new(seed, run), standard_update)
}

/// Averages the outcome over every initial state and every sequence of
/// disturbance choices with their exact weights.
pub fn enumerate_runs(plan: &ToyPlan) -> Result<BTreeMap<String, Prob>> {
    let support = plan.initial_state()?.len();
    let events = plan.ops.iter().filter(|op| op.is_stochastic()).count();
    let weight = Prob::new(1, support as u64 * (1u64 << events));
    let mut out = BTreeMap::new();
    for initial in 0..support {
        for bits in 0..1usize << events {
            let choices: Vec<usize> = (0..events).map(|k| (bits >> k) & 1).collect();
            let mut draws = FixedDraws { initial, choices: &choices, next: 0 };
            let rec = run_with(plan, 0, 0, &mut draws, standard_update)?;
            crate::outcome::accumulate(&mut out, rec.outcome, weight);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyReport {
    pub scenario: String,
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
    #[serde(serialize_with = "ser_probs")]
    pub exact: BTreeMap<String, Prob>,
    /// `None` when the exact probability is 0 or 1 and the frequency differs.
    pub z_scores: BTreeMap<String, Option<f64>>,
    pub tv_distance: f64,
}

impl FrequencyReport {
    pub fn distribution(&self) -> OutcomeDistribution {
        OutcomeDistribution::Sampled { shots: self.shots, counts: self.counts.clone() }
    }

    pub fn frequency(&self, label: &str) -> f64 {
        self.counts.get(label).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    pub fn max_abs_z(&self) -> Option<f64> {
        self.z_scores.values().try_fold(0.0f64, |m, z| z.map(|z| m.max(z.abs())))
    }

    /// Loose acceptance bound on the total-variation distance.
    pub fn tv_bound(&self) -> f64 {
        4.0 * (self.exact.len().max(1) as f64 / self.shots as f64).sqrt()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// `(freq − p) / √(p(1 − p)/shots)`.
pub fn z_score(freq: f64, p: f64, shots: u64) -> Option<f64> {
    if p <= 0.0 || p >= 1.0 {
        return ((freq - p).abs() < f64::EPSILON).then_some(0.0);
    }
    Some((freq - p) / (p * (1.0 - p) / shots as f64).sqrt())
}

pub fn count_outcomes(plan: &ToyPlan, shots: u64, seed: u64) -> Result<BTreeMap<String, u64>> {
    (0..shots)
        .into_par_iter()
        .map(|run| sample_run(plan, seed, run).map(|r| r.outcome))
        .try_fold(BTreeMap::new, |mut m: BTreeMap<String, u64>, label| {
            *m.entry(label?).or_insert(0) += 1;
            Ok::<_, Error>(m)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            Ok(a)
        })
}

pub fn estimate(plan: &ToyPlan, shots: u64, seed: u64) -> Result<FrequencyReport> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let exact = toy_engine::distribution(plan)?;
    let counts = count_outcomes(plan, shots, seed)?;
    let labels: BTreeSet<&String> = exact.keys().chain(counts.keys()).collect();
    let freq = |l: &str| counts.get(l).copied().unwrap_or(0) as f64 / shots as f64;
    let p = |l: &str| exact.get(l).map(prob_to_f64).unwrap_or(0.0);
    let z_scores = labels.iter().map(|l| ((*l).clone(), z_score(freq(l), p(l), shots))).collect();
    let tv_distance = 0.5 * labels.iter().map(|l| (freq(l) - p(l)).abs()).sum::<f64>();
    Ok(FrequencyReport { scenario: plan.name.clone(), shots, seed, counts, exact, z_scores, tv_distance })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalityViolation {
    pub record: RunRecord,
    pub event: usize,
    pub mode: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LocalityReport {
    pub runs: u64,
    pub events_checked: u64,
    pub violations: Vec<LocalityViolation>,
}

impl LocalityReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn locality_audit(plan: &ToyPlan, shots: u64, seed: u64) -> Result<LocalityReport> {
    locality_audit_with(plan, shots, seed, standard_update)
}

/// Checks per run that an event on mode `R` leaves the bits of mode `L`
/// unchanged, and that an ancilla event leaves every mode unchanged.
pub fn locality_audit_with(plan: &ToyPlan, shots: u64, seed: u64, update: UpdateFn) -> Result<LocalityReport> {
    if plan.shape.modes != 2 {
        return Err(Error::Unsupported { engine: "locality audit", reason: "two-mode circuits only".into() });
    }
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let per_run = (0..shots).into_par_iter().map(|run| -> Result<(u64, Vec<LocalityViolation>)> {
        let rec = run_with(plan, seed, run, &mut StreamDraws::new(seed, run), update)?;
        let mut checked = 0;
        let mut found = Vec::new();
        for (k, e) in rec.events.iter().enumerate() {
            let untouched: &[usize] = match &plan.ops[e.op_index] {
                ToyOp::MeasureN { mode: 1, .. } | ToyOp::Detect { mode: 1, .. } => &[0],
                ToyOp::MeasureAncilla { .. } => &[0, 1],
                _ => continue,
            };
            checked += 1;
            for &m in untouched {
                if e.before.mode(m) != e.after.mode(m) {
                    found.push(LocalityViolation { record: rec.clone(), event: k, mode: m });
                }
            }
        }
        Ok((checked, found))
    });
    let results: Vec<(u64, Vec<LocalityViolation>)> = per_run.collect::<Result<_>>()?;
    let mut report = LocalityReport { runs: shots, ..Default::default() };
    for (c, v) in results {
        report.events_checked += c;
        report.violations.extend(v);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::outcome::{DETECTOR_L, DETECTOR_R};
    use crate::phase_space::ModeState;
    use crate::scenarios::ScenarioSpec;
    use crate::toy_measurement::Basis;

    fn whichway() -> ToyPlan {
        ScenarioSpec::mzi_whichway(DisturbanceKind::Nondestructive).toy
    }

    #[test]
    fn constructive_port_every_run() {
        let plan = ScenarioSpec::mzi_phase(0).toy;
        for run in 0..500 {
            assert_eq!(sample_run(&plan, 11, run).unwrap().outcome, DETECTOR_L);
        }
        let r = estimate(&plan, 1000, 1).unwrap();
        assert_eq!(r.tv_distance, 0.0);
        assert_eq!(r.max_abs_z(), Some(0.0));
    }

    /// The which-way outcome is fixed by the initial phase difference and
    /// the detector's disturbance; all eight combinations give all four
    /// joint outcomes equally often.
    #[test]
    fn whichway_depends_on_phase_and_disturbance() {
        let plan = whichway();
        let support: Vec<PhysicalState> = plan.initial_state().unwrap().states().collect();
        assert_eq!(support.len(), 4);
        let mut seen = BTreeMap::new();
        for (i, s) in support.iter().enumerate() {
            for f in 0..2 {
                // The single port detector choices do not affect the label.
                let choices = [f, 0, 0];
                let mut d = FixedDraws { initial: i, choices: &choices, next: 0 };
                let rec = run_with(&plan, 0, 0, &mut d, standard_update).unwrap();
                let dphi = s.mode(0).phi ^ s.mode(1).phi;
                *seen.entry(rec.outcome.clone()).or_insert(0) += 1;
                // After the first beamsplitter N_R = N_L ⊕ N_R ⊕ ΔΦ = 1 ⊕ ΔΦ.
                let expected_fired = dphi == 0;
                assert_eq!(rec.outcome.starts_with("fired"), expected_fired, "{s}");
            }
        }
        assert_eq!(seen.len(), 4);
        assert!(seen.values().all(|&c| c == 2));
        let mut outcomes = BTreeSet::new();
        for run in 0..200 {
            outcomes.insert(sample_run(&plan, 5, run).unwrap().outcome);
        }
        assert_eq!(outcomes.len(), 4);
    }

    #[test]
    fn replay_is_exact() {
        let plan = ScenarioSpec::quantum_eraser(Basis::P, false).toy;
        for run in 0..50 {
            assert_eq!(sample_run(&plan, 9, run).unwrap(), sample_run(&plan, 9, run).unwrap());
        }
        assert_eq!(estimate(&plan, 2000, 4).unwrap(), estimate(&plan, 2000, 4).unwrap());
    }

    #[test]
    fn enumeration_matches_exact() {
        for spec in crate::scenarios::all_settings() {
            assert_eq!(enumerate_runs(&spec.toy).unwrap(), toy_engine::distribution(&spec.toy).unwrap(), "{}", spec.title());
        }
    }

    #[test]
    fn zero_shots() {
        assert_eq!(estimate(&whichway(), 0, 1), Err(Error::ZeroShots));
    }

    #[test]
    fn z_score_edges() {
        assert_eq!(z_score(1.0, 1.0, 10), Some(0.0));
        assert_eq!(z_score(0.5, 0.0, 10), None);
        let z = z_score(0.51, 0.5, 10_000).unwrap();
        assert!((z - 2.0).abs() < 1e-9);
    }

    #[test]
    fn report_json_shape() {
        let r = estimate(&whichway(), 100, 2).unwrap();
        let v = r.to_json();
        for key in ["scenario", "shots", "seed", "counts", "exact", "z_scores", "tv_distance"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["exact"]["silent & detector_L"], "1/4");
        assert_eq!(r.counts.values().sum::<u64>(), 100);
    }

    #[test]
    fn locality_holds_and_fault_is_caught() {
        let r = locality_audit(&whichway(), 5000, 3).unwrap();
        assert!(r.holds());
        // The arm detector and the `R` port detector, every run.
        assert_eq!(r.events_checked, 5000 * 2);
        let eraser = locality_audit(&ScenarioSpec::quantum_eraser(Basis::P, false).toy, 2000, 3).unwrap();
        assert!(eraser.holds());
        fn leaky(state: PhysicalState, op: &ToyOp, f: Disturbance) -> (u8, PhysicalState) {
            let (v, s) = standard_update(state, op, f);
            let l = s.mode(0);
            (v, s.with_mode(0, ModeState::new(l.n, l.phi ^ 1)))
        }
        let bad = locality_audit_with(&whichway(), 100, 3, leaky).unwrap();
        assert!(!bad.holds());
        assert_eq!(bad.violations[0].mode, 0);
    }

    #[test]
    fn port_detectors_split_evenly() {
        let r = estimate(&whichway(), 20_000, 7).unwrap();
        for port in [DETECTOR_L, DETECTOR_R] {
            let f: f64 = r.counts.iter().filter(|(k, _)| k.ends_with(port)).map(|(_, c)| *c as f64).sum::<f64>() / 20_000.0;
            let z = z_score(f, 0.5, 20_000).unwrap();
            assert!(z.abs() <= 3.0, "{port}: z = {z}");
        }
        assert!(r.tv_distance < r.tv_bound());
    }
}
