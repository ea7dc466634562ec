//! Discrete phase space of modes and ancillas, and the calculus of flat
//! epistemic states over it.
//!
//! A register holds `modes` field modes followed by `ancillas` abstract
//! two-level systems. Every subsystem carries two bits: a mode has an
//! occupation number `N` and a phase `Φ`; an ancilla has a coordinate `Q̄`
//! and a momentum `P̄`. Physical states are packed little-endian in register
//! order:
//!
//! ```text
//! bit 0: N of mode 0   bit 1: Φ of mode 0
//! bit 2: N of mode 1   bit 3: Φ of mode 1
//! ...
//! bit 2m: Q̄ of ancilla 0   bit 2m+1: P̄ of ancilla 0
//! ```
//!
//! An epistemic state is stored as its explicit support; the weight of each
//! supported point is `1/|support|`. Registers are capped at
//! [`MAX_SUBSYSTEMS`] subsystems, so the whole phase space has at most 64
//! points and every check here is exhaustive.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::outcome::Prob;

/// Largest register an [`EpistemicState`] may describe.
pub const MAX_SUBSYSTEMS: usize = 3;

/// Occupation number and phase of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeState {
    pub n: u8,
    pub phi: u8,
}

impl ModeState {
    pub const fn new(n: u8, phi: u8) -> Self {
        Self { n: n & 1, phi: phi & 1 }
    }

    pub const fn vacuum(phi: u8) -> Self {
        Self::new(0, phi)
    }

    pub(crate) const fn code(self) -> u16 {
        (self.n as u16) | ((self.phi as u16) << 1)
    }

    pub(crate) const fn from_code(code: u16) -> Self {
        Self::new((code & 1) as u8, ((code >> 1) & 1) as u8)
    }
}

/// Coordinate and momentum bits of an ancilla.
///
/// `q = 0` is the `a₀` value of `Q_A`, `q = 1` is `a₁`; `p = 0` is `a₊`,
/// `p = 1` is `a₋`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AncillaState {
    pub q: u8,
    pub p: u8,
}

impl AncillaState {
    pub const fn new(q: u8, p: u8) -> Self {
        Self { q: q & 1, p: p & 1 }
    }

    pub fn q_label(self) -> &'static str {
        if self.q == 0 {
            "a0"
        } else {
            "a1"
        }
    }

    pub fn p_label(self) -> &'static str {
        if self.p == 0 {
            "a+"
        } else {
            "a-"
        }
    }
}

/// Number of modes and ancillas in a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RegisterShape {
    pub modes: usize,
    pub ancillas: usize,
}

impl RegisterShape {
    pub const fn new(modes: usize, ancillas: usize) -> Self {
        Self { modes, ancillas }
    }

    pub const fn modes(modes: usize) -> Self {
        Self::new(modes, 0)
    }

    pub const fn subsystems(&self) -> usize {
        self.modes + self.ancillas
    }

    pub const fn bits(&self) -> usize {
        2 * self.subsystems()
    }

    /// Number of points of the physical state space.
    pub const fn points(&self) -> usize {
        1 << self.bits()
    }

    pub fn all_states(self) -> impl Iterator<Item = PhysicalState> {
        (0..self.points() as u32).map(move |c| PhysicalState { shape: self, code: c as u16 })
    }

    pub fn check_mode(&self, index: usize) -> Result<()> {
        if index < self.modes {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange { index, count: self.modes })
        }
    }

    pub fn check_ancilla(&self, index: usize) -> Result<()> {
        if index < self.ancillas {
            Ok(())
        } else {
            Err(Error::AncillaOutOfRange { index, count: self.ancillas })
        }
    }

    /// Bit position of a variable, after range checking.
    pub fn bit(&self, var: Var) -> Result<usize> {
        match var {
            Var::N(m) => self.check_mode(m).map(|_| 2 * m),
            Var::Phi(m) => self.check_mode(m).map(|_| 2 * m + 1),
            Var::Q(a) => self.check_ancilla(a).map(|_| 2 * (self.modes + a)),
            Var::P(a) => self.check_ancilla(a).map(|_| 2 * (self.modes + a) + 1),
        }
    }

    /// Register position of a subsystem (modes first, then ancillas).
    pub fn position(&self, sub: Subsystem) -> Result<usize> {
        match sub {
            Subsystem::Mode(m) => self.check_mode(m).map(|_| m),
            Subsystem::Ancilla(a) => self.check_ancilla(a).map(|_| self.modes + a),
        }
    }

    pub(crate) fn ensure_same(&self, other: &RegisterShape) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ShapeMismatch { expected: self.to_string(), found: other.to_string() })
        }
    }
}

impl fmt::Display for RegisterShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} modes + {} ancillas", self.modes, self.ancillas)
    }
}

/// A single elementary variable of the register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    /// Occupation number of a mode.
    N(usize),
    /// Phase of a mode.
    Phi(usize),
    /// Coordinate `Q̄` of an ancilla.
    Q(usize),
    /// Momentum `P̄` of an ancilla.
    P(usize),
}

impl Var {
    /// The canonically conjugate variable.
    pub fn conjugate(self) -> Var {
        match self {
            Var::N(m) => Var::Phi(m),
            Var::Phi(m) => Var::N(m),
            Var::Q(a) => Var::P(a),
            Var::P(a) => Var::Q(a),
        }
    }
}

/// A mode or an ancilla of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    Mode(usize),
    Ancilla(usize),
}

/// Binary linear functional on the phase space, as a mask over state bits.
///
/// Its value on a physical state is the parity of the masked bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Functional(pub u16);

impl Functional {
    pub fn of(shape: &RegisterShape, var: Var) -> Result<Self> {
        shape.bit(var).map(|b| Functional(1 << b))
    }

    /// Sum (mod 2) of several elementary variables, e.g. `ΔΦ = Φ_L ⊕ Φ_R`.
    pub fn sum(shape: &RegisterShape, vars: &[Var]) -> Result<Self> {
        vars.iter().try_fold(Functional(0), |acc, &v| Ok(acc ^ Functional::of(shape, v)?))
    }

    pub fn eval(self, state: PhysicalState) -> u8 {
        ((self.0 & state.code).count_ones() & 1) as u8
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::ops::BitXor for Functional {
    type Output = Functional;
    fn bitxor(self, rhs: Self) -> Self {
        Functional(self.0 ^ rhs.0)
    }
}

/// Symplectic pairing; bit `2k` is paired with bit `2k + 1`.
pub fn symplectic_form(f: Functional, g: Functional) -> u8 {
    let swapped = ((g.0 & 0x5555) << 1) | ((g.0 & 0xAAAA) >> 1);
    ((f.0 & swapped).count_ones() & 1) as u8
}

/// Complete assignment of every bit of a register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhysicalState {
    shape: RegisterShape,
    code: u16,
}

impl PhysicalState {
    pub fn from_code(shape: RegisterShape, code: u16) -> Self {
        debug_assert!((code as usize) < shape.points());
        Self { shape, code }
    }

    /// Builds a state from its bits in register order, e.g. `(N_L, Φ_L, N_R, Φ_R)`.
    pub fn from_bits(shape: RegisterShape, bits: &[u8]) -> Result<Self> {
        if bits.len() != shape.bits() {
            return Err(Error::ShapeMismatch {
                expected: format!("{} bits", shape.bits()),
                found: format!("{} bits", bits.len()),
            });
        }
        let code = bits.iter().enumerate().fold(0u16, |acc, (i, &b)| acc | (((b & 1) as u16) << i));
        Ok(Self { shape, code })
    }

    pub fn new(modes: &[ModeState], ancillas: &[AncillaState]) -> Self {
        let shape = RegisterShape::new(modes.len(), ancillas.len());
        let mut code = 0u16;
        for (i, m) in modes.iter().enumerate() {
            code |= m.code() << (2 * i);
        }
        for (k, a) in ancillas.iter().enumerate() {
            code |= ((a.q as u16) | ((a.p as u16) << 1)) << (2 * (modes.len() + k));
        }
        Self { shape, code }
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn code(&self) -> u16 {
        self.code
    }

    pub fn bit(&self, index: usize) -> u8 {
        ((self.code >> index) & 1) as u8
    }

    pub fn get(&self, var: Var) -> Result<u8> {
        self.shape.bit(var).map(|b| self.bit(b))
    }

    pub fn mode(&self, index: usize) -> ModeState {
        ModeState::from_code((self.code >> (2 * index)) & 3)
    }

    pub fn ancilla(&self, index: usize) -> AncillaState {
        let c = self.code >> (2 * (self.shape.modes + index));
        AncillaState::new((c & 1) as u8, ((c >> 1) & 1) as u8)
    }

    pub fn modes(&self) -> Vec<ModeState> {
        (0..self.shape.modes).map(|i| self.mode(i)).collect()
    }

    pub fn ancillas(&self) -> Vec<AncillaState> {
        (0..self.shape.ancillas).map(|k| self.ancilla(k)).collect()
    }

    pub fn with_mode(self, index: usize, state: ModeState) -> Self {
        let shift = 2 * index;
        let code = (self.code & !(3 << shift)) | (state.code() << shift);
        Self { code, ..self }
    }

    pub fn with_ancilla(self, index: usize, state: AncillaState) -> Self {
        let shift = 2 * (self.shape.modes + index);
        let bits = (state.q as u16) | ((state.p as u16) << 1);
        let code = (self.code & !(3 << shift)) | (bits << shift);
        Self { code, ..self }
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.shape.bits()).map(|i| self.bit(i)).collect()
    }
}

impl fmt::Display for PhysicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for i in 0..self.shape.bits() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.bit(i))?;
        }
        write!(f, ")")
    }
}

/// Why a support set fails to be a valid epistemic state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    EmptySupport,
    NotFlat,
    NotAffine,
    NotIsotropic,
    TooMuchKnowledge,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Violation::EmptySupport => "empty support",
            Violation::NotFlat => "distribution is not flat",
            Violation::NotAffine => "not an affine subspace",
            Violation::NotIsotropic => "isotropy violated",
            Violation::TooMuchKnowledge => "more known functionals than subsystems",
        })
    }
}

/// Flat distribution over a set of physical states.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpistemicState {
    shape: RegisterShape,
    support: BTreeSet<u16>,
}

impl EpistemicState {
    pub fn from_codes(shape: RegisterShape, codes: impl IntoIterator<Item = u16>) -> Result<Self> {
        if shape.subsystems() > MAX_SUBSYSTEMS {
            return Err(Error::RegisterTooLarge(shape.subsystems()));
        }
        let support: BTreeSet<u16> = codes.into_iter().collect();
        if support.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(&max) = support.iter().next_back() {
            if max as usize >= shape.points() {
                return Err(Error::ShapeMismatch {
                    expected: shape.to_string(),
                    found: format!("state code {max}"),
                });
            }
        }
        Ok(Self { shape, support })
    }

    pub fn from_states(shape: RegisterShape, states: impl IntoIterator<Item = PhysicalState>) -> Result<Self> {
        let mut codes = Vec::new();
        for s in states {
            shape.ensure_same(&s.shape)?;
            codes.push(s.code);
        }
        Self::from_codes(shape, codes)
    }

    /// Parses bit tuples in register order, e.g. `&[&[1,0,0,0], &[1,1,0,0]]`.
    pub fn from_tuples(shape: RegisterShape, tuples: &[&[u8]]) -> Result<Self> {
        let states = tuples.iter().map(|t| PhysicalState::from_bits(shape, t)).collect::<Result<Vec<_>>>()?;
        Self::from_states(shape, states)
    }

    /// The states satisfying every `(functional, value)` constraint.
    pub fn from_constraints(shape: RegisterShape, constraints: &[(Functional, u8)]) -> Result<Self> {
        let codes = shape
            .all_states()
            .filter(|s| constraints.iter().all(|&(f, v)| f.eval(*s) == v & 1))
            .map(|s| s.code);
        Self::from_codes(shape, codes)
    }

    pub fn shape(&self) -> RegisterShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn codes(&self) -> impl Iterator<Item = u16> + '_ {
        self.support.iter().copied()
    }

    pub fn states(&self) -> impl Iterator<Item = PhysicalState> + '_ {
        let shape = self.shape;
        self.support.iter().map(move |&code| PhysicalState { shape, code })
    }

    pub fn contains(&self, state: PhysicalState) -> bool {
        state.shape == self.shape && self.support.contains(&state.code)
    }

    pub fn weight(&self) -> Prob {
        Prob::new(1, self.len() as u64)
    }

    /// Probability that `functional` takes `value`.
    pub fn probability(&self, functional: Functional, value: u8) -> Prob {
        let hits = self.states().filter(|s| functional.eval(*s) == value & 1).count();
        Prob::new(hits as u64, self.len() as u64)
    }

    /// Whether the value of `functional` is certain.
    pub fn knows(&self, functional: Functional) -> Option<u8> {
        let mut values = self.states().map(|s| functional.eval(s));
        let first = values.next()?;
        values.all(|v| v == first).then_some(first)
    }

    /// All functionals constant on the support, the zero functional included.
    pub fn known_functionals(&self) -> Vec<Functional> {
        (0..self.shape.points() as u32)
            .map(|m| Functional(m as u16))
            .filter(|&f| self.knows(f).is_some())
            .collect()
    }

    fn is_affine(&self) -> bool {
        let base = match self.support.iter().next() {
            Some(&b) => b,
            None => return false,
        };
        if !self.len().is_power_of_two() {
            return false;
        }
        let shifted: BTreeSet<u16> = self.support.iter().map(|&c| c ^ base).collect();
        shifted.iter().all(|&x| shifted.iter().all(|&y| shifted.contains(&(x ^ y))))
    }

    /// First violated validity condition, if any.
    pub fn validate(&self) -> std::result::Result<(), Violation> {
        if self.support.is_empty() {
            return Err(Violation::EmptySupport);
        }
        // Weights are implicit and uniform, so flatness holds by construction.
        if !self.is_affine() {
            return Err(Violation::NotAffine);
        }
        let known = self.known_functionals();
        for (i, &f) in known.iter().enumerate() {
            if known[i + 1..].iter().any(|&g| symplectic_form(f, g) == 1) {
                return Err(Violation::NotIsotropic);
            }
        }
        // `known` is a linear space with 2^d elements.
        let dim = known.len().trailing_zeros() as usize;
        if dim > self.shape.subsystems() {
            return Err(Violation::TooMuchKnowledge);
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub(crate) fn map_codes(&self, f: impl Fn(u16) -> u16) -> Self {
        Self { shape: self.shape, support: self.support.iter().map(|&c| f(c)).collect() }
    }

    /// Restricts the support to states where `functional` equals `value`.
    pub fn condition(&self, functional: Functional, value: u8) -> Result<Self> {
        let shape = self.shape;
        let support: BTreeSet<u16> = self
            .support
            .iter()
            .copied()
            .filter(|&c| functional.eval(PhysicalState { shape, code: c }) == value & 1)
            .collect();
        if support.is_empty() {
            return Err(Error::ImpossibleOutcome);
        }
        Ok(Self { shape, support })
    }

    /// Union of the support with its image under flipping `var`.
    pub fn randomize(&self, var: Var) -> Result<Self> {
        let bit = self.shape.bit(var)?;
        let mut support = self.support.clone();
        support.extend(self.support.iter().map(|&c| c ^ (1 << bit)));
        Ok(Self { shape: self.shape, support })
    }

    /// Projection onto the selected subsystems, kept in register order.
    pub fn marginal(&self, selection: &[Subsystem]) -> Result<Self> {
        if selection.is_empty() {
            return Err(Error::EmptySelection);
        }
        let mut chosen: Vec<Subsystem> = selection.to_vec();
        chosen.sort();
        chosen.dedup();
        let positions = chosen.iter().map(|&s| self.shape.position(s)).collect::<Result<Vec<_>>>()?;
        let modes = chosen.iter().filter(|s| matches!(s, Subsystem::Mode(_))).count();
        let shape = RegisterShape::new(modes, chosen.len() - modes);
        let support = self
            .support
            .iter()
            .map(|&c| {
                positions
                    .iter()
                    .enumerate()
                    .fold(0u16, |acc, (i, &p)| acc | (((c >> (2 * p)) & 3) << (2 * i)))
            })
            .collect();
        Ok(Self { shape, support })
    }

    /// Independent joint state; the modes of `self` precede those of
    /// `other`, followed by the ancillas of `self` and then of `other`.
    pub fn product(&self, other: &EpistemicState) -> Result<Self> {
        let shape = RegisterShape::new(self.shape.modes + other.shape.modes, self.shape.ancillas + other.shape.ancillas);
        if shape.subsystems() > MAX_SUBSYSTEMS {
            return Err(Error::RegisterTooLarge(shape.subsystems()));
        }
        let a_modes_bits = 2 * self.shape.modes;
        let b_modes_bits = 2 * other.shape.modes;
        let mask = |bits: usize| ((1u32 << bits) - 1) as u16;
        let mut support = BTreeSet::new();
        for &a in &self.support {
            let a_modes = a & mask(a_modes_bits);
            let a_anc = a >> a_modes_bits;
            for &b in &other.support {
                let b_modes = b & mask(b_modes_bits);
                let b_anc = b >> b_modes_bits;
                let code = a_modes
                    | (b_modes << a_modes_bits)
                    | (a_anc << (a_modes_bits + b_modes_bits))
                    | (b_anc << (a_modes_bits + b_modes_bits + 2 * self.shape.ancillas));
                support.insert(code);
            }
        }
        Ok(Self { shape, support })
    }

    /// Sorted bit tuples of the support, the canonical ordering.
    pub fn tuples(&self) -> Vec<Vec<u8>> {
        let mut t: Vec<Vec<u8>> = self.states().map(|s| s.bits()).collect();
        t.sort();
        t
    }
}

impl fmt::Display for EpistemicState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, t) in self.tuples().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, b) in t.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{b}")?;
            }
            write!(f, ")")?;
        }
        write!(f, "}}")
    }
}

/// Mode `occupied_index` holds the excitation, every other mode is empty,
/// and all phases are unknown.
pub fn make_occupied(mode_count: usize, occupied_index: usize) -> Result<EpistemicState> {
    let shape = RegisterShape::modes(mode_count);
    shape.check_mode(occupied_index)?;
    let constraints = (0..mode_count)
        .map(|m| Ok((Functional::of(&shape, Var::N(m))?, (m == occupied_index) as u8)))
        .collect::<Result<Vec<_>>>()?;
    EpistemicState::from_constraints(shape, &constraints)
}

/// Every mode empty, phases unknown and uncorrelated.
pub fn make_vacuum(mode_count: usize) -> Result<EpistemicState> {
    if mode_count == 0 {
        return Err(Error::EmptySelection);
    }
    let shape = RegisterShape::modes(mode_count);
    let constraints = (0..mode_count)
        .map(|m| Ok((Functional::of(&shape, Var::N(m))?, 0)))
        .collect::<Result<Vec<_>>>()?;
    EpistemicState::from_constraints(shape, &constraints)
}

/// A single ancilla with `Q̄ = q` known and `P̄` unknown.
pub fn make_ancilla(q: u8) -> EpistemicState {
    let shape = RegisterShape::new(0, 1);
    EpistemicState::from_codes(shape, [(q & 1) as u16, ((q & 1) as u16) | 2]).expect("one-ancilla register")
}

/// Every valid epistemic state of a register, generated from isotropic
/// subspaces of functionals and their value assignments.
pub fn valid_states(shape: RegisterShape) -> Result<Vec<EpistemicState>> {
    if shape.subsystems() > MAX_SUBSYSTEMS {
        return Err(Error::RegisterTooLarge(shape.subsystems()));
    }
    let n = shape.points() as u32;
    // Isotropic subspaces, each stored once as a sorted list of basis-spanned elements.
    let mut seen: BTreeSet<Vec<u16>> = BTreeSet::new();
    let mut frontier: Vec<Vec<u16>> = vec![vec![0]];
    seen.insert(vec![0]);
    let mut bases: Vec<Vec<Functional>> = vec![vec![]];
    let mut frontier_bases: Vec<Vec<Functional>> = vec![vec![]];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        let mut next_bases = Vec::new();
        for (space, basis) in frontier.iter().zip(&frontier_bases) {
            for g in 1..n {
                let g = g as u16;
                if space.contains(&g) || space.iter().any(|&f| symplectic_form(Functional(f), Functional(g)) == 1) {
                    continue;
                }
                let mut grown: Vec<u16> = space.iter().flat_map(|&f| [f, f ^ g]).collect();
                grown.sort_unstable();
                if seen.insert(grown.clone()) {
                    let mut b = basis.clone();
                    b.push(Functional(g));
                    next.push(grown);
                    next_bases.push(b.clone());
                    bases.push(b);
                }
            }
        }
        frontier = next;
        frontier_bases = next_bases;
    }
    let mut out = Vec::new();
    for basis in bases {
        for values in 0..(1u32 << basis.len()) {
            let constraints: Vec<(Functional, u8)> =
                basis.iter().enumerate().map(|(i, &f)| (f, ((values >> i) & 1) as u8)).collect();
            out.push(EpistemicState::from_constraints(shape, &constraints)?);
        }
    }
    Ok(out)
}
