//! Textual circuit language shared by every engine.
//!
//! ```text
//! program := decl* stmt*
//! decl    := "mode" ident+ ";" | "ancilla" ident ";"
//! stmt    := "source" ident ";" | "vacuum" ident ";"
//!          | "bs" ident ident ";" | "phase" ident ("0" | "pi") ";"
//!          | "cnot" ident ident ";" | "swap" ident ident ";"
//!          | "measure" ("N" | "Q" | "P") ident ("nondestructive" | "destructive")? "as" labels ";"
//!          | "detect" ident "as" label ";"
//! labels  := label | label "/" label
//! ```
//!
//! `#` starts a comment that runs to the end of the line. A label is a run
//! of letters, digits, `_`, `+` and `-`; the label `_` records nothing. With
//! a pair `zero/one` the label for the observed value is recorded; a single
//! label is recorded only for the value 1.
//!
//! Modes without a `source` or `vacuum` statement start in the vacuum.
//! Ancillas start with `Q̄` known to be `a0`. Preparations precede every
//! other statement.

mod compile;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

pub use compile::{compile, compile_automaton, compile_quantum, compile_toy, CompiledPlan, Target};
pub use parser::parse;

use crate::toy_measurement::DisturbanceKind;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DslErrorKind {
    Lexical(String),
    Syntax { expected: String, found: String },
    UnknownIdentifier(String),
    DuplicateDeclaration(String),
    DuplicatePreparation(String),
    PreparationAfterOperation(String),
    WrongSubsystem { name: String, expected: &'static str },
    RepeatedOperand(String),
}

impl fmt::Display for DslErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DslErrorKind::Lexical(c) => write!(f, "unexpected character {c}"),
            DslErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            DslErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier {id}"),
            DslErrorKind::DuplicateDeclaration(id) => write!(f, "duplicate declaration of {id}"),
            DslErrorKind::DuplicatePreparation(id) => write!(f, "duplicate preparation of {id}"),
            DslErrorKind::PreparationAfterOperation(id) => write!(f, "preparation of {id} after the first operation"),
            DslErrorKind::WrongSubsystem { name, expected } => write!(f, "{name} is not {expected}"),
            DslErrorKind::RepeatedOperand(id) => write!(f, "{id} used twice in one statement"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct DslError {
    pub kind: DslErrorKind,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhaseLiteral {
    Zero,
    Pi,
}

impl PhaseLiteral {
    pub fn bit(self) -> u8 {
        match self {
            PhaseLiteral::Zero => 0,
            PhaseLiteral::Pi => 1,
        }
    }

    pub fn angle(self) -> f64 {
        match self {
            PhaseLiteral::Zero => 0.0,
            PhaseLiteral::Pi => std::f64::consts::PI,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasuredVar {
    N,
    Q,
    P,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OutcomeLabels {
    /// Recorded when the value is 1.
    Single(String),
    /// Labels for the values 0 and 1.
    Pair(String, String),
}

pub const SILENT_LABEL: &str = "_";

impl OutcomeLabels {
    pub fn for_value(&self, value: u8) -> Option<&str> {
        let l = match (self, value) {
            (OutcomeLabels::Single(_), 0) => return None,
            (OutcomeLabels::Single(l), _) => l,
            (OutcomeLabels::Pair(z, _), 0) => z,
            (OutcomeLabels::Pair(_, o), _) => o,
        };
        (l != SILENT_LABEL).then_some(l.as_str())
    }
}

impl fmt::Display for OutcomeLabels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutcomeLabels::Single(l) => write!(f, "{l}"),
            OutcomeLabels::Pair(z, o) => write!(f, "{z}/{o}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Source(String),
    Vacuum(String),
    Bs(String, String),
    Phase(String, PhaseLiteral),
    Cnot(String, String),
    Swap(String, String),
    Measure { var: MeasuredVar, target: String, kind: Option<DisturbanceKind>, labels: OutcomeLabels },
    Detect { target: String, label: String },
}

impl Stmt {
    pub fn is_preparation(&self) -> bool {
        matches!(self, Stmt::Source(_) | Stmt::Vacuum(_))
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Stmt::Source(m) => write!(f, "source {m};"),
            Stmt::Vacuum(m) => write!(f, "vacuum {m};"),
            Stmt::Bs(a, b) => write!(f, "bs {a} {b};"),
            Stmt::Phase(m, p) => write!(f, "phase {m} {};", if *p == PhaseLiteral::Pi { "pi" } else { "0" }),
            Stmt::Cnot(a, b) => write!(f, "cnot {a} {b};"),
            Stmt::Swap(a, b) => write!(f, "swap {a} {b};"),
            Stmt::Measure { var, target, kind, labels } => {
                let v = match var {
                    MeasuredVar::N => "N",
                    MeasuredVar::Q => "Q",
                    MeasuredVar::P => "P",
                };
                write!(f, "measure {v} {target}")?;
                match kind {
                    Some(DisturbanceKind::Nondestructive) => write!(f, " nondestructive")?,
                    Some(DisturbanceKind::Destructive) => write!(f, " destructive")?,
                    None => {}
                }
                write!(f, " as {labels};")
            }
            Stmt::Detect { target, label } => write!(f, "detect {target} as {label};"),
        }
    }
}

/// A parsed and semantically checked program.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Program {
    pub modes: Vec<String>,
    pub ancillas: Vec<String>,
    pub stmts: Vec<Stmt>,
}

impl Program {
    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m == name)
    }

    pub fn ancilla_index(&self, name: &str) -> Option<usize> {
        self.ancillas.iter().position(|m| m == name)
    }

    /// Canonical text: one declaration or statement per line.
    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.modes.is_empty() {
            writeln!(f, "mode {};", self.modes.join(" "))?;
        }
        for a in &self.ancillas {
            writeln!(f, "ancilla {a};")?;
        }
        for s in &self.stmts {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

pub fn render(program: &Program) -> String {
    program.render()
}
