use std::collections::{HashMap, HashSet};

use super::lexer::{lex, Tok, Token};
use super::{DslError, DslErrorKind, MeasuredVar, OutcomeLabels, PhaseLiteral, Program, Stmt};
use crate::toy_measurement::DisturbanceKind;

const KEYWORDS: &[&str] = &[
    "mode", "ancilla", "source", "vacuum", "bs", "phase", "cnot", "swap", "measure", "detect", "as", "nondestructive",
    "destructive",
];

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Mode,
    Ancilla,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    program: Program,
    kinds: HashMap<String, Kind>,
    prepared: HashSet<String>,
    operated: bool,
}

/// Parses and checks a program.
pub fn parse(text: &str) -> Result<Program, DslError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        program: Program::default(),
        kinds: HashMap::new(),
        prepared: HashSet::new(),
        operated: false,
    };
    p.program_rule()?;
    Ok(p.program)
}

fn is_ident(w: &str) -> bool {
    let mut chars = w.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && w != "_"
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err_at(t: &Token, kind: DslErrorKind) -> DslError {
        DslError { kind, line: t.line, col: t.col }
    }

    fn syntax(t: &Token, expected: &str) -> DslError {
        Self::err_at(t, DslErrorKind::Syntax { expected: expected.into(), found: t.tok.describe() })
    }

    fn peek_word(&self) -> Option<&str> {
        match &self.peek().tok {
            Tok::Word(w) => Some(w),
            _ => None,
        }
    }

    fn expect_semi(&mut self) -> Result<(), DslError> {
        let t = self.next();
        if t.tok == Tok::Semi {
            Ok(())
        } else {
            Err(Self::syntax(&t, "`;`"))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<(), DslError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) if w == kw => Ok(()),
            _ => Err(Self::syntax(&t, &format!("`{kw}`"))),
        }
    }

    fn ident(&mut self) -> Result<(String, Token), DslError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) if is_ident(w) && !KEYWORDS.contains(&w.as_str()) => Ok((w.clone(), t.clone())),
            _ => Err(Self::syntax(&t, "identifier")),
        }
    }

    fn label(&mut self) -> Result<String, DslError> {
        let t = self.next();
        match &t.tok {
            Tok::Word(w) => Ok(w.clone()),
            _ => Err(Self::syntax(&t, "label")),
        }
    }

    fn declare(&mut self, name: String, at: &Token, kind: Kind) -> Result<(), DslError> {
        if self.kinds.insert(name.clone(), kind).is_some() {
            return Err(Self::err_at(at, DslErrorKind::DuplicateDeclaration(name)));
        }
        match kind {
            Kind::Mode => self.program.modes.push(name),
            Kind::Ancilla => self.program.ancillas.push(name),
        }
        Ok(())
    }

    fn use_as(&mut self, kind: Kind) -> Result<(String, Token), DslError> {
        let (name, at) = self.ident()?;
        match self.kinds.get(&name) {
            None => Err(Self::err_at(&at, DslErrorKind::UnknownIdentifier(name))),
            Some(k) if *k != kind => {
                let expected = if kind == Kind::Mode { "a mode" } else { "an ancilla" };
                Err(Self::err_at(&at, DslErrorKind::WrongSubsystem { name, expected }))
            }
            Some(_) => Ok((name, at)),
        }
    }

    fn two_modes(&mut self) -> Result<(String, String), DslError> {
        let (a, _) = self.use_as(Kind::Mode)?;
        let (b, at) = self.use_as(Kind::Mode)?;
        if a == b {
            return Err(Self::err_at(&at, DslErrorKind::RepeatedOperand(b)));
        }
        Ok((a, b))
    }

    fn program_rule(&mut self) -> Result<(), DslError> {
        while let Some(w) = self.peek_word() {
            match w {
                "mode" => {
                    self.next();
                    let (name, at) = self.ident()?;
                    self.declare(name, &at, Kind::Mode)?;
                    while self.peek().tok != Tok::Semi {
                        let (name, at) = self.ident()?;
                        self.declare(name, &at, Kind::Mode)?;
                    }
                    self.expect_semi()?;
                }
                "ancilla" => {
                    self.next();
                    let (name, at) = self.ident()?;
                    self.declare(name, &at, Kind::Ancilla)?;
                    self.expect_semi()?;
                }
                _ => break,
            }
        }
        loop {
            if self.peek().tok == Tok::Eof {
                return Ok(());
            }
            let stmt = self.stmt()?;
            self.program.stmts.push(stmt);
        }
    }

    fn stmt(&mut self) -> Result<Stmt, DslError> {
        let head = self.next();
        let word = match &head.tok {
            Tok::Word(w) => w.clone(),
            _ => return Err(Self::syntax(&head, "statement")),
        };
        let stmt = match word.as_str() {
            "source" | "vacuum" => {
                let (m, at) = self.use_as(Kind::Mode)?;
                if self.operated {
                    return Err(Self::err_at(&head, DslErrorKind::PreparationAfterOperation(m)));
                }
                if !self.prepared.insert(m.clone()) {
                    return Err(Self::err_at(&at, DslErrorKind::DuplicatePreparation(m)));
                }
                if word == "source" {
                    Stmt::Source(m)
                } else {
                    Stmt::Vacuum(m)
                }
            }
            "bs" => {
                let (a, b) = self.two_modes()?;
                Stmt::Bs(a, b)
            }
            "swap" => {
                let (a, b) = self.two_modes()?;
                Stmt::Swap(a, b)
            }
            "phase" => {
                let (m, _) = self.use_as(Kind::Mode)?;
                let t = self.next();
                let lit = match &t.tok {
                    Tok::Word(w) if w == "0" => PhaseLiteral::Zero,
                    Tok::Word(w) if w == "pi" => PhaseLiteral::Pi,
                    _ => return Err(Self::syntax(&t, "`0` or `pi`")),
                };
                Stmt::Phase(m, lit)
            }
            "cnot" => {
                let (m, _) = self.use_as(Kind::Mode)?;
                let (a, _) = self.use_as(Kind::Ancilla)?;
                Stmt::Cnot(m, a)
            }
            "measure" => {
                let t = self.next();
                let var = match &t.tok {
                    Tok::Word(w) if w == "N" => MeasuredVar::N,
                    Tok::Word(w) if w == "Q" => MeasuredVar::Q,
                    Tok::Word(w) if w == "P" => MeasuredVar::P,
                    _ => return Err(Self::syntax(&t, "`N`, `Q` or `P`")),
                };
                let kind_of_target = if var == MeasuredVar::N { Kind::Mode } else { Kind::Ancilla };
                let (target, _) = self.use_as(kind_of_target)?;
                let kind = match (var, self.peek_word()) {
                    (MeasuredVar::N, Some("nondestructive")) => Some(DisturbanceKind::Nondestructive),
                    (MeasuredVar::N, Some("destructive")) => Some(DisturbanceKind::Destructive),
                    _ => None,
                };
                if kind.is_some() {
                    self.next();
                }
                self.expect_keyword("as")?;
                let first = self.label()?;
                let labels = if self.peek().tok == Tok::Slash {
                    self.next();
                    OutcomeLabels::Pair(first, self.label()?)
                } else {
                    OutcomeLabels::Single(first)
                };
                Stmt::Measure { var, target, kind, labels }
            }
            "detect" => {
                let (target, _) = self.use_as(Kind::Mode)?;
                self.expect_keyword("as")?;
                Stmt::Detect { target, label: self.label()? }
            }
            _ => return Err(Self::syntax(&head, "statement")),
        };
        if !stmt.is_preparation() {
            self.operated = true;
        }
        self.expect_semi()?;
        Ok(stmt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MZI_PI: &str = "mode L R; source L; vacuum R; bs L R; phase R pi; bs L R; detect L as dl; detect R as dr;";

    #[test]
    fn mzi_program() {
        let p = parse(MZI_PI).unwrap();
        assert_eq!(p.modes, vec!["L", "R"]);
        assert_eq!(p.stmts.len(), 7);
        assert_eq!(p.stmts[3], Stmt::Phase("R".into(), PhaseLiteral::Pi));
        assert_eq!(parse(&p.render()).unwrap(), p);
    }

    #[test]
    fn missing_semicolon_position() {
        let err = parse("mode L R;\nsource L\nbs L R;").unwrap_err();
        assert_eq!((err.line, err.col), (3, 1));
        assert!(matches!(err.kind, DslErrorKind::Syntax { .. }));
        assert_eq!(err.to_string(), "line 3, column 1: expected `;`, found `bs`");
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("mode L R;\nmeasure N X as hit;").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::UnknownIdentifier("X".into()));
        assert_eq!((err.line, err.col), (2, 11));
        assert!(err.to_string().contains("unknown identifier X"));
    }

    #[test]
    fn duplicate_preparation() {
        let err = parse("mode L; source L; vacuum L;").unwrap_err();
        assert_eq!(err.kind, DslErrorKind::DuplicatePreparation("L".into()));
        assert_eq!((err.line, err.col), (1, 26));
    }

    #[test]
    fn rejected_forms() {
        assert!(matches!(parse("mode L R; phase R pi/3;").unwrap_err().kind, DslErrorKind::Syntax { .. }));
        assert!(matches!(parse("mode L R; bs L L;").unwrap_err().kind, DslErrorKind::RepeatedOperand(_)));
        assert!(matches!(parse("mode L; ancilla A; cnot A L;").unwrap_err().kind, DslErrorKind::WrongSubsystem { .. }));
        assert!(matches!(parse("mode L R; bs L R; source L;").unwrap_err().kind, DslErrorKind::PreparationAfterOperation(_)));
        assert!(matches!(parse("mode L L;").unwrap_err().kind, DslErrorKind::DuplicateDeclaration(_)));
        assert!(matches!(parse("mode L; ancilla A; measure Q A destructive as x;").unwrap_err().kind, DslErrorKind::Syntax { .. }));
        assert!(matches!(parse("mode L; bs L R;").unwrap_err().kind, DslErrorKind::UnknownIdentifier(_)));
        assert!(matches!(parse("mode as;").unwrap_err().kind, DslErrorKind::Syntax { .. }));
    }

    #[test]
    fn labels_and_comments() {
        let text = "# eraser\nmode L R;\nancilla A;\nsource L; # photon\nbs L R;\ncnot R A;\nbs L R;\nmeasure P A as a+/a-;\ndetect L as detector_L;\ndetect R as detector_R;\n";
        let p = parse(text).unwrap();
        assert_eq!(p.ancillas, vec!["A"]);
        let Stmt::Measure { labels, .. } = &p.stmts[4] else { panic!() };
        assert_eq!(labels, &OutcomeLabels::Pair("a+".into(), "a-".into()));
        assert_eq!(labels.for_value(1), Some("a-"));
        let silent = OutcomeLabels::Pair("_".into(), "_".into());
        assert_eq!(silent.for_value(0), None);
        assert_eq!(OutcomeLabels::Single("hit".into()).for_value(0), None);
    }
}
