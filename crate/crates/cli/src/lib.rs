//! Command-line front end for the toyfield engines.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use toyfield::automaton::{run_layout, DEFAULT_WIRE_LENGTH};
use toyfield::checks::{self, CheckReport};
use toyfield::circuit_dsl::{compile_automaton, compile_quantum, compile_toy, parse};
use toyfield::montecarlo::{estimate, FrequencyReport};
use toyfield::outcome::{format_prob, OutcomeDistribution};
use toyfield::phase_space::{EpistemicState, RegisterShape, Subsystem};
use toyfield::plan::{QuantumPlan, ToyPlan};
use toyfield::scenarios::{build_scenario, quantum_engine, toy_engine, Choice, ScenarioParams, Timing};
use toyfield::toy_measurement::{Basis, DisturbanceKind};
use toyfield::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PROGRAM: i32 = 3;

/// Shots and seed of the built-in locality suite.
pub const LOCALITY_SHOTS: u64 = 100_000;
pub const LOCALITY_SEED: u64 = 2024;

#[derive(Debug, Parser)]
#[command(name = "toyfield", version, about = "Toy field theory interference experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a named scenario, a `.mzi` program file, or `-` for stdin.
    Run(RunArgs),
    /// Run a property suite; exits with 1 if any check fails.
    Check {
        #[arg(value_enum)]
        suite: Suite,
    },
    /// Draw the toy epistemic state after each operation as 4×4 grids.
    Grid {
        target: String,
        #[command(flatten)]
        params: ParamArgs,
        /// Only show this step (0 is the prepared state).
        #[arg(long)]
        step: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    pub target: String,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = EngineArg::Toy)]
    pub engine: EngineArg,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args, Default)]
pub struct ParamArgs {
    /// Arm-R phase: `0` or `pi`.
    #[arg(long, value_parser = parse_phase)]
    pub phase: Option<u8>,
    /// Bomb state; a bare flag means working.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub functional: Option<bool>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_enum)]
    pub basis: Option<BasisArg>,
    /// Delayed choice: `phase0`, `phasepi` or `detector`.
    #[arg(long, value_enum)]
    pub choice: Option<ChoiceArg>,
    #[arg(long, value_enum)]
    pub timing: Option<TimingArg>,
    /// Eraser: measure the ancilla after the port detectors.
    #[arg(long)]
    pub ancilla_after_ports: bool,
}

impl ParamArgs {
    fn is_empty(&self) -> bool {
        self.phase.is_none()
            && self.functional.is_none()
            && self.kind.is_none()
            && self.basis.is_none()
            && self.choice.is_none()
            && self.timing.is_none()
            && !self.ancilla_after_ports
    }

    fn to_params(&self) -> ScenarioParams {
        ScenarioParams {
            phase: self.phase,
            kind: self.kind.map(|k| match k {
                KindArg::Nondestructive => DisturbanceKind::Nondestructive,
                KindArg::Destructive => DisturbanceKind::Destructive,
            }),
            functional: self.functional,
            basis: self.basis.map(|b| match b {
                BasisArg::Q => Basis::Q,
                BasisArg::P => Basis::P,
            }),
            choice: self.choice.map(|c| match c {
                ChoiceArg::Phase0 => Choice::Phase(0),
                ChoiceArg::Phasepi => Choice::Phase(1),
                ChoiceArg::Detector => Choice::Detector,
            }),
            timing: self.timing.map(|t| match t {
                TimingArg::Before => Timing::Before,
                TimingArg::After => Timing::After,
            }),
            ancilla_after_ports: self.ancilla_after_ports.then_some(true),
            mirror_present: None,
        }
    }
}

fn parse_phase(s: &str) -> Result<u8, String> {
    match s {
        "0" => Ok(0),
        "pi" => Ok(1),
        _ => Err(format!("phase must be `0` or `pi`, got `{s}`")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Toy,
    Quantum,
    Ca,
    Montecarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Grids,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Equivalence,
    CoarseGrain,
    Destructive,
    Closure,
    Locality,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Nondestructive,
    Destructive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    #[value(alias = "q")]
    Q,
    #[value(alias = "p")]
    P,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChoiceArg {
    Phase0,
    Phasepi,
    Detector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TimingArg {
    Before,
    After,
}

/// Failure of a command, tagged with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, error: anyhow::anyhow!(msg.into()) }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::UnknownScenario(_) | Error::ZeroShots => EXIT_USAGE,
            _ => EXIT_PROGRAM,
        };
        Self { code, error: e.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self { code: EXIT_USAGE, error: e.into() }
    }
}

/// The three compiled forms of whatever the user pointed at.
struct Target {
    title: String,
    toy: Option<ToyPlan>,
    quantum: Option<QuantumPlan>,
    dsl: String,
}

fn is_program_path(target: &str) -> bool {
    target == "-" || target.ends_with(".mzi") || Path::new(target).is_file()
}

fn load_target(target: &str, params: &ParamArgs, stdin: &mut dyn Read) -> Result<Target, Failure> {
    if is_program_path(target) {
        if !params.is_empty() {
            return Err(Failure::usage("scenario parameters apply to named scenarios only"));
        }
        let text = if target == "-" {
            let mut s = String::new();
            stdin.read_to_string(&mut s)?;
            s
        } else {
            std::fs::read_to_string(target).with_context(|| format!("reading {target}")).map_err(|error| Failure {
                code: EXIT_USAGE,
                error,
            })?
        };
        let program = parse(&text).map_err(Error::from)?;
        // Compilation errors surface only for the engine that needs the plan.
        return Ok(Target {
            title: target.to_string(),
            toy: compile_toy(&program).ok(),
            quantum: compile_quantum(&program).ok(),
            dsl: text,
        });
    }
    let spec = build_scenario(target, &params.to_params())?;
    Ok(Target { title: spec.title(), toy: Some(spec.toy), quantum: Some(spec.quantum), dsl: spec.dsl })
}

fn require_toy(t: &Target) -> Result<&ToyPlan, Failure> {
    match &t.toy {
        Some(p) => Ok(p),
        None => Err(compile_toy(&parse(&t.dsl).map_err(Error::from)?).unwrap_err().into()),
    }
}

fn require_quantum(t: &Target) -> Result<&QuantumPlan, Failure> {
    match &t.quantum {
        Some(p) => Ok(p),
        None => Err(compile_quantum(&parse(&t.dsl).map_err(Error::from)?).unwrap_err().into()),
    }
}

enum RunOutput {
    Distribution(OutcomeDistribution),
    Report(FrequencyReport),
}

pub fn cmd_run(args: &RunArgs, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), Failure> {
    let sampled = matches!(args.engine, EngineArg::Ca | EngineArg::Montecarlo);
    match (sampled, args.shots, args.seed) {
        (true, Some(_), Some(_)) | (false, None, None) => {}
        (true, ..) => return Err(Failure::usage("--shots and --seed are required for the ca and montecarlo engines")),
        (false, ..) => return Err(Failure::usage("--shots and --seed apply only to the ca and montecarlo engines")),
    }
    let target = load_target(&args.target, &args.params, stdin)?;
    if args.format == Format::Grids {
        if args.engine != EngineArg::Toy {
            return Err(Failure::usage("--format grids shows the toy engine's states; use --engine toy"));
        }
        return render_grids(&target, None, out);
    }
    let result = match args.engine {
        EngineArg::Toy => RunOutput::Distribution(toy_engine::run_exact(require_toy(&target)?)?),
        EngineArg::Quantum => RunOutput::Distribution(quantum_engine::run_exact(require_quantum(&target)?)?),
        EngineArg::Ca => {
            let layout = compile_automaton(&parse(&target.dsl).map_err(Error::from)?)?;
            let d = run_layout(&layout, DEFAULT_WIRE_LENGTH, args.shots.unwrap_or(0), args.seed.unwrap_or(0))?;
            RunOutput::Distribution(d)
        }
        EngineArg::Montecarlo => RunOutput::Report(estimate(
            require_toy(&target)?,
            args.shots.unwrap_or(0),
            args.seed.unwrap_or(0),
        )?),
    };
    match (args.format, result) {
        (Format::Json, RunOutput::Distribution(d)) => writeln!(out, "{}", d.to_json())?,
        (Format::Json, RunOutput::Report(r)) => writeln!(out, "{}", r.to_json())?,
        (_, RunOutput::Distribution(d)) => {
            writeln!(out, "{}", target.title)?;
            write!(out, "{d}")?;
        }
        (_, RunOutput::Report(r)) => {
            writeln!(out, "{}", target.title)?;
            write!(out, "{}", r.distribution())?;
            writeln!(out, "exact reference:")?;
            for (label, p) in &r.exact {
                let z = match r.z_scores.get(label).copied().flatten() {
                    Some(z) => format!("{z:+.2}"),
                    None => "n/a".into(),
                };
                writeln!(out, "  {label}: {}  z = {z}", format_prob(p))?;
            }
            writeln!(out, "total variation distance: {:.5}", r.tv_distance)?;
        }
    }
    Ok(())
}

pub fn cmd_check(suite: Suite, out: &mut dyn Write) -> Result<bool, Failure> {
    let reports: Vec<CheckReport> = match suite {
        Suite::Equivalence => vec![checks::equivalence()?],
        Suite::CoarseGrain => vec![checks::coarse_grain()?],
        Suite::Destructive => vec![checks::destructive()?],
        Suite::Closure => vec![checks::closure()?],
        Suite::Locality => vec![checks::locality(LOCALITY_SHOTS, LOCALITY_SEED)?],
        Suite::All => checks::all(LOCALITY_SHOTS, LOCALITY_SEED)?,
    };
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    Ok(reports.iter().all(CheckReport::passed))
}

const AXIS: [&str; 4] = ["00", "01", "10", "11"];

pub const GRID_LEGEND: &str =
    "rows: (N_L,Φ_L)  columns: (N_R,Φ_R)  order 00 01 10 11  ■ supported  · excluded";

/// One 4×4 diagram of the two-mode marginal.
pub fn grid(state: &EpistemicState) -> Result<String, Error> {
    let two = if state.shape() == RegisterShape::modes(2) {
        state.clone()
    } else {
        state.marginal(&[Subsystem::Mode(0), Subsystem::Mode(1)])?
    };
    let mut s = format!("       R {}\n", AXIS.join(" "));
    for (row, l) in AXIS.iter().enumerate() {
        s.push_str(&format!("  L {l}  "));
        for col in 0..4 {
            // Code bits: N_L, Φ_L, N_R, Φ_R from least significant.
            let code = ((row >> 1) | ((row & 1) << 1) | ((col >> 1) << 2) | ((col & 1) << 3)) as u16;
            let filled = two.codes().any(|c| c == code);
            s.push_str(if filled { " ■ " } else { " · " });
        }
        s.push('\n');
    }
    Ok(s)
}

fn render_grids(target: &Target, only: Option<usize>, out: &mut dyn Write) -> Result<(), Failure> {
    let plan = require_toy(target)?;
    if plan.shape.modes != 2 {
        return Err(Failure::usage("grids are drawn for two-mode circuits"));
    }
    let steps = toy_engine::trace(plan)?;
    if let Some(k) = only {
        if k >= steps.len() {
            return Err(Failure::usage(format!("step {k} out of range 0..{}", steps.len() - 1)));
        }
    }
    writeln!(out, "{}", target.title)?;
    writeln!(out, "{GRID_LEGEND}")?;
    for (k, step) in steps.iter().enumerate() {
        if only.is_some_and(|o| o != k) {
            continue;
        }
        let what = match &step.op {
            None => "prepared state".to_string(),
            Some(op) => format!("after {op:?}"),
        };
        writeln!(out, "\nstep {k}: {what}")?;
        for b in &step.branches {
            let ended = if b.terminated { ", ended" } else { "" };
            writeln!(out, "branch p = {}, record {}{ended}", format_prob(&b.probability), b.history())?;
            write!(out, "{}", grid(&b.state)?)?;
        }
    }
    Ok(())
}

pub fn cmd_grid(target: &str, params: &ParamArgs, step: Option<usize>, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), Failure> {
    let t = load_target(target, params, stdin)?;
    render_grids(&t, step, out)
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: &Cli, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, stdin, out).map(|_| true),
        Command::Check { suite } => cmd_check(*suite, out),
        Command::Grid { target, params, step } => cmd_grid(target, params, *step, stdin, out).map(|_| true),
    };
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use toyfield::phase_space::make_occupied;

    #[test]
    fn grid_of_prepared_state() {
        // L occupied with unknown phase, R empty with unknown phase.
        let g = grid(&make_occupied(2, 0).unwrap()).unwrap();
        let rows: Vec<&str> = g.lines().collect();
        assert_eq!(rows[1], "  L 00   ·  ·  ·  · ");
        assert_eq!(rows[3], "  L 10   ■  ■  ·  · ");
        assert_eq!(rows[4], "  L 11   ■  ■  ·  · ");
    }

    #[test]
    fn phase_values() {
        assert_eq!(parse_phase("pi"), Ok(1));
        assert!(parse_phase("pi/2").is_err());
    }
}
