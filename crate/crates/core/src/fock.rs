//! Truncated fermionic Fock space of three dots with spin.
//!
//! Modes are ordered `1↑, 2↑, 3↑, 1↓, 2↓, 3↓`. A basis ket with occupied
//! modes `m1 < m2` is `d†_{m1} d†_{m2} |0⟩`, so `d†_m` picks up
//! `(-1)^(occupied modes before m)`.

use std::fmt;

use faer::{c64, Mat};

use crate::error::{Error, Result};
use crate::operator::{dagger, OperatorMatrix};

pub const N_MODES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    pub fn flip(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinOrbital {
    pub dot: u8,
    pub spin: Spin,
}

impl SpinOrbital {
    pub fn new(dot: u8, spin: Spin) -> Result<Self> {
        if !(1..=3).contains(&dot) {
            return Err(Error::Argument(format!("dot index {dot} outside 1..=3")));
        }
        Ok(SpinOrbital { dot, spin })
    }

    pub fn up(dot: u8) -> Self {
        Self::new(dot, Spin::Up).expect("dot in 1..=3")
    }

    pub fn down(dot: u8) -> Self {
        Self::new(dot, Spin::Down).expect("dot in 1..=3")
    }

    /// Position in the canonical mode order.
    pub fn mode(self) -> usize {
        (self.dot as usize - 1) + if self.spin == Spin::Down { 3 } else { 0 }
    }

    pub fn from_mode(mode: usize) -> Self {
        assert!(mode < N_MODES);
        let spin = if mode < 3 { Spin::Up } else { Spin::Down };
        SpinOrbital { dot: (mode % 3) as u8 + 1, spin }
    }

    /// All six orbitals in canonical order.
    pub fn all() -> [SpinOrbital; N_MODES] {
        std::array::from_fn(SpinOrbital::from_mode)
    }
}

impl fmt::Display for SpinOrbital {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = if self.spin == Spin::Up { '↑' } else { '↓' };
        write!(f, "{}{}", self.dot, arrow)
    }
}

/// Occupation bitmask over the canonical mode order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FockState {
    pub occupation: u8,
}

impl FockState {
    pub const VACUUM: FockState = FockState { occupation: 0 };

    pub fn from_orbitals(orbs: &[SpinOrbital]) -> Result<Self> {
        let mut occ = 0u8;
        for o in orbs {
            let bit = 1u8 << o.mode();
            if occ & bit != 0 {
                return Err(Error::Argument(format!("orbital {o} listed twice")));
            }
            occ |= bit;
        }
        Ok(FockState { occupation: occ })
    }

    pub fn electron_count(self) -> usize {
        self.occupation.count_ones() as usize
    }

    pub fn is_occupied(self, orb: SpinOrbital) -> bool {
        self.occupation & (1 << orb.mode()) != 0
    }

    /// Occupied orbitals in canonical order.
    pub fn orbitals(self) -> Vec<SpinOrbital> {
        (0..N_MODES).filter(|m| self.occupation & (1 << m) != 0).map(SpinOrbital::from_mode).collect()
    }

    /// Twice the total spin projection.
    pub fn two_sz(self) -> i32 {
        self.orbitals().iter().map(|o| if o.spin == Spin::Up { 1 } else { -1 }).sum()
    }

    /// Conserved-quantity label `(N, 2Sz)` of the dot Hamiltonian.
    pub fn sector(self) -> (usize, i32) {
        (self.electron_count(), self.two_sz())
    }

    pub fn occupies_dot(self, dot: u8) -> bool {
        Spin::BOTH.iter().any(|&s| self.is_occupied(SpinOrbital { dot, spin: s }))
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.occupation == 0 {
            return write!(f, "|0⟩");
        }
        write!(f, "|")?;
        for o in self.orbitals() {
            write!(f, "{o}")?;
        }
        write!(f, "⟩")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    pub max_electrons: usize,
    pub states: Vec<FockState>,
    index: [Option<usize>; 64],
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, s: FockState) -> Option<usize> {
        self.index[s.occupation as usize]
    }

    /// Index of the ket with the given occupied orbitals.
    pub fn ket(&self, orbs: &[SpinOrbital]) -> Result<usize> {
        let s = FockState::from_orbitals(orbs)?;
        self.index_of(s)
            .ok_or_else(|| Error::Argument(format!("{s} outside the {}-electron basis", self.max_electrons)))
    }

    pub fn sectors(&self) -> Vec<(usize, i32)> {
        self.states.iter().map(|s| s.sector()).collect()
    }
}

pub fn build_basis(max_electrons: usize) -> Result<FockBasis> {
    if !(1..=2).contains(&max_electrons) {
        return Err(Error::Argument(format!("max_electrons must be 1 or 2, got {max_electrons}")));
    }
    let mut states = vec![FockState::VACUUM];
    for m in 0..N_MODES {
        states.push(FockState { occupation: 1 << m });
    }
    if max_electrons == 2 {
        for a in 0..N_MODES {
            for b in a + 1..N_MODES {
                states.push(FockState { occupation: (1 << a) | (1 << b) });
            }
        }
    }
    let mut index = [None; 64];
    for (k, s) in states.iter().enumerate() {
        index[s.occupation as usize] = Some(k);
    }
    Ok(FockBasis { max_electrons, states, index })
}

/// `d†_orb`, with images beyond `max_electrons` projected to zero.
pub fn creation_op(basis: &FockBasis, orb: SpinOrbital) -> OperatorMatrix {
    let n = basis.dim();
    let m = orb.mode();
    let mut op = Mat::<c64>::zeros(n, n);
    for (col, s) in basis.states.iter().enumerate() {
        if s.is_occupied(orb) {
            continue;
        }
        let before = (s.occupation & ((1u8 << m) - 1)).count_ones();
        let target = FockState { occupation: s.occupation | (1 << m) };
        if let Some(row) = basis.index_of(target) {
            op[(row, col)] = c64::new(if before % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
        }
    }
    op
}

pub fn annihilation_op(basis: &FockBasis, orb: SpinOrbital) -> OperatorMatrix {
    dagger(&creation_op(basis, orb))
}

pub fn number_op(basis: &FockBasis, orb: SpinOrbital) -> OperatorMatrix {
    let n = basis.dim();
    let mut op = Mat::<c64>::zeros(n, n);
    for (k, s) in basis.states.iter().enumerate() {
        if s.is_occupied(orb) {
            op[(k, k)] = c64::new(1.0, 0.0);
        }
    }
    op
}

/// `Σ_σ n_{dot σ}`.
pub fn dot_number_op(basis: &FockBasis, dot: u8) -> OperatorMatrix {
    number_op(basis, SpinOrbital::up(dot)) + number_op(basis, SpinOrbital::down(dot))
}

/// Outcome of comparing the generic creation operators with the reference
/// table of matrix elements.
#[derive(Debug, Clone)]
pub struct CreationTableReport {
    pub checked: usize,
    /// Indices into [`CREATION_TABLE`](crate::reference::CREATION_TABLE) that disagree.
    pub mismatches: Vec<usize>,
    /// Nonzero elements of the six generic operators; the table lists all of them.
    pub nonzero: usize,
}

impl CreationTableReport {
    pub fn passes(&self) -> bool {
        self.mismatches.is_empty() && self.nonzero == self.checked
    }
}

pub fn creation_table_check() -> Result<CreationTableReport> {
    let basis = build_basis(2)?;
    let mut mismatches = Vec::new();
    for (k, e) in crate::reference::CREATION_TABLE.iter().enumerate() {
        let op = creation_op(&basis, e.op);
        let (to, from) = (basis.ket(e.to)?, basis.ket(e.from)?);
        if op[(to, from)] != c64::new(e.sign as f64, 0.0) {
            mismatches.push(k);
        }
    }
    let mut nonzero = 0;
    for orb in SpinOrbital::all() {
        let op = creation_op(&basis, orb);
        for j in 0..basis.dim() {
            for i in 0..basis.dim() {
                if op[(i, j)] != c64::new(0.0, 0.0) {
                    nonzero += 1;
                }
            }
        }
    }
    Ok(CreationTableReport { checked: crate::reference::CREATION_TABLE.len(), mismatches, nonzero })
}
