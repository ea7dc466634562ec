//! Acceptance gate: one PASS/FAIL line per criterion, then a single assertion
//! that every criterion passed.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use toyfield::automaton::{check_time_reversal, run_layout, run_once, Device, MapKind, MziLayout, DEFAULT_WIRE_LENGTH};
use toyfield::checks;
use toyfield::circuit_dsl::{compile_automaton, compile_quantum, compile_toy, parse, DslErrorKind};
use toyfield::montecarlo::z_score;
use toyfield::outcome::{prob_to_f64, OutcomeDistribution, Prob};
use toyfield::scenarios::{all_settings, quantum_engine, toy_engine, Engine, ScenarioSpec};
use toyfield::toy_measurement::{Basis, DisturbanceKind};

const SHOTS: u64 = 100_000;
const SEED: u64 = 20_240_601;

struct Gate {
    lines: Vec<String>,
    all_passed: bool,
}

impl Gate {
    fn record(&mut self, id: u32, name: &str, budget: Option<Duration>, body: impl FnOnce() -> Result<(), String>) {
        let start = Instant::now();
        let outcome = body();
        let elapsed = start.elapsed();
        let verdict = match (&outcome, budget) {
            (Err(e), _) => Err(e.clone()),
            (Ok(()), Some(b)) if elapsed > b => Err(format!("took {elapsed:?}, budget {b:?}")),
            (Ok(()), _) => Ok(()),
        };
        let line = match &verdict {
            Ok(()) => format!("PASS {id:>2} {name} ({elapsed:.2?})"),
            Err(e) => format!("FAIL {id:>2} {name} ({elapsed:.2?}): {e}"),
        };
        println!("{line}");
        self.all_passed &= verdict.is_ok();
        self.lines.push(line);
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dist(pairs: &[(&str, u64, u64)]) -> BTreeMap<String, Prob> {
    pairs.iter().map(|(l, n, d)| (l.to_string(), Prob::new(*n, *d))).collect()
}

fn toy(spec: &ScenarioSpec) -> Result<BTreeMap<String, Prob>, String> {
    toy_engine::distribution(&spec.toy).map_err(|e| e.to_string())
}

fn same(spec: &ScenarioSpec, want: &BTreeMap<String, Prob>) -> Result<(), String> {
    let got = toy(spec)?;
    ensure(&got == want, || format!("{}: got {got:?}, want {want:?}", spec.title()))
}

/// Largest |z| of a sampled distribution against exact values.
fn max_z(d: &OutcomeDistribution, exact: &BTreeMap<String, Prob>, shots: u64) -> Result<f64, String> {
    let mut labels: Vec<String> = exact.keys().cloned().collect();
    labels.extend(d.labels().iter().map(|s| s.to_string()));
    let mut worst = 0.0f64;
    for l in labels {
        let p = exact.get(&l).map(prob_to_f64).unwrap_or(0.0);
        let z = z_score(d.frequency(&l), p, shots).ok_or_else(|| format!("{l}: impossible outcome observed"))?;
        worst = worst.max(z.abs());
    }
    Ok(worst)
}

fn criterion_1() -> Result<(), String> {
    same(&ScenarioSpec::mzi_phase(0), &dist(&[("detector_L", 1, 1)]))?;
    same(&ScenarioSpec::mzi_phase(1), &dist(&[("detector_R", 1, 1)]))
}

fn criterion_2() -> Result<(), String> {
    let d = ScenarioSpec::mzi_whichway(DisturbanceKind::Nondestructive).run(Engine::Toy).map_err(|e| e.to_string())?;
    let half = Some(Prob::new(1, 2));
    for part in ["fired", "detector_L", "detector_R"] {
        let got = d.exact_marginal(part);
        ensure(got == half, || format!("P({part}) = {got:?}"))?;
    }
    Ok(())
}

fn criterion_3() -> Result<(), String> {
    same(
        &ScenarioSpec::bomb_tester(true),
        &dist(&[("exploded", 1, 2), ("safe & detector_R", 1, 4), ("safe & detector_L", 1, 4)]),
    )?;
    same(&ScenarioSpec::bomb_tester(false), &dist(&[("detector_L", 1, 1)]))
}

fn criterion_4() -> Result<(), String> {
    let p_want = dist(&[("a+ & detector_L", 1, 2), ("a- & detector_R", 1, 2)]);
    let q_want = dist(&[
        ("a0 & detector_L", 1, 4),
        ("a0 & detector_R", 1, 4),
        ("a1 & detector_L", 1, 4),
        ("a1 & detector_R", 1, 4),
    ]);
    for after in [false, true] {
        same(&ScenarioSpec::quantum_eraser(Basis::P, after), &p_want)?;
        same(&ScenarioSpec::quantum_eraser(Basis::Q, after), &q_want)?;
    }
    for basis in [Basis::P, Basis::Q] {
        let d = ScenarioSpec::quantum_eraser(basis, false).run(Engine::Toy).map_err(|e| e.to_string())?;
        for port in ["detector_L", "detector_R"] {
            ensure(d.exact_marginal(port) == Some(Prob::new(1, 2)), || format!("{basis:?} marginal of {port}"))?;
        }
    }
    Ok(())
}

fn criterion_5() -> Result<(), String> {
    for spec in all_settings() {
        let raw = quantum_engine::probabilities(&spec.quantum).map_err(|e| e.to_string())?;
        let exact = toy(&spec)?;
        for (label, p) in &raw {
            let want = exact.get(label).map(prob_to_f64).unwrap_or(0.0);
            ensure((p - want).abs() <= 1e-9, || format!("{}: {label} quantum {p} vs toy {want}", spec.title()))?;
        }
        let q = quantum_engine::distribution(&spec.quantum).map_err(|e| e.to_string())?;
        ensure(q == exact, || format!("{}: {q:?} vs {exact:?}", spec.title()))?;
    }
    Ok(())
}

fn report(r: toyfield::Result<checks::CheckReport>) -> Result<(), String> {
    let r = r.map_err(|e| e.to_string())?;
    ensure(r.passed() && r.checked > 0, || r.to_string())
}

fn criterion_9() -> Result<(), String> {
    for (device, port) in [(Device::Empty, "detector_L"), (Device::Phase(1), "detector_R")] {
        let layout = MziLayout::new(device);
        for run in 0..2_000 {
            let got = run_once(&layout, DEFAULT_WIRE_LENGTH, SEED, run).map_err(|e| e.to_string())?;
            ensure(got == port, || format!("{layout:?} run {run}: {got}"))?;
        }
    }
    for spec in [ScenarioSpec::mzi_whichway(DisturbanceKind::Nondestructive), ScenarioSpec::bomb_tester(true)] {
        let layout = compile_automaton(&spec.program().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let d = run_layout(&layout, DEFAULT_WIRE_LENGTH, SHOTS, SEED).map_err(|e| e.to_string())?;
        let z = max_z(&d, &toy(&spec)?, SHOTS)?;
        ensure(z <= 3.0, || format!("{}: |z| = {z:.2}", spec.title()))?;
    }
    for kind in [MapKind::FreeSwap, MapKind::Beamsplitter4, MapKind::PhaseShift2] {
        ensure(check_time_reversal(kind) == Ok(true), || format!("{kind:?} is not time-reversal symmetric"))?;
    }
    Ok(())
}

fn criterion_11() -> Result<(), String> {
    for spec in all_settings() {
        let program = spec.program().map_err(|e| e.to_string())?;
        let reparsed = parse(&program.render()).map_err(|e| e.to_string())?;
        ensure(reparsed == program, || format!("{}: round trip changed the program", spec.title()))?;
        let want = toy(&spec)?;
        let t = toy_engine::distribution(&compile_toy(&program).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let q = quantum_engine::distribution(&compile_quantum(&program).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(t == want && q == want, || format!("{}: compiled program differs", spec.title()))?;
    }
    let cases: [(&str, usize, usize); 3] = [
        ("mode L R;\nsource L\nbs L R;", 3, 1),
        ("mode L R;\nmeasure N X as hit;", 2, 11),
        ("mode L; source L; vacuum L;", 1, 26),
    ];
    for (text, line, col) in cases {
        let err = parse(text).err().ok_or_else(|| format!("{text:?} parsed"))?;
        ensure((err.line, err.col) == (line, col), || format!("{text:?}: error at {}:{}", err.line, err.col))?;
    }
    let err = parse("mode L R;\nmeasure N X as hit;").unwrap_err();
    ensure(err.kind == DslErrorKind::UnknownIdentifier("X".into()), || format!("{err}"))
}

#[test]
fn acceptance() {
    let mut gate = Gate { lines: Vec::new(), all_passed: true };
    let ms = Duration::from_millis;
    gate.record(1, "MZI phase: constructive and destructive ports", Some(ms(1)), criterion_1);
    gate.record(2, "MZI which-way: detector and ports at 1/2", None, criterion_2);
    gate.record(3, "bomb tester distributions", None, criterion_3);
    gate.record(4, "quantum eraser joint and marginal distributions", None, criterion_4);
    gate.record(5, "toy and quantum engines agree exactly", Some(ms(1000)), criterion_5);
    gate.record(6, "coarse-graining commutes on sector circuits", Some(ms(1000)), || report(checks::coarse_grain()));
    gate.record(7, "destructive and nondestructive agree on distributions", Some(ms(1000)), || {
        report(checks::destructive())
    });
    gate.record(8, "operations preserve the epistemic restriction", Some(ms(10_000)), || report(checks::closure()));
    gate.record(9, "cellular automaton ports, frequencies and reversibility", Some(ms(30_000)), criterion_9);
    gate.record(10, "locality audit over seeded runs", Some(ms(30_000)), || report(checks::locality(SHOTS, SEED)));
    gate.record(11, "circuit language round trip, errors and compilation", None, criterion_11);
    assert!(gate.all_passed, "failed criteria:\n{}", gate.lines.iter().filter(|l| l.starts_with("FAIL")).cloned().collect::<Vec<_>>().join("\n"));
}
