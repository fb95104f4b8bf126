//! Physical parameters and the dot Hamiltonian.
//!
//! Energies and rates are in units of Γ (the source rate Γ₁ = Γ₂) unless a
//! function says otherwise.

use faer::{c64, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{creation_op, dot_number_op, number_op, FockBasis, FockState, Spin, SpinOrbital};
use crate::operator::{dagger, scale, re, OperatorMatrix};
use crate::reference::{OPPOSITE_SPIN_ORDER, PARALLEL_ORDER};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;

/// Coulomb-blockade regime, modelled by truncating the Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    SingleElectron,
    TwoElectron,
}

impl Mode {
    pub fn max_electrons(self) -> usize {
        match self {
            Mode::SingleElectron => 1,
            Mode::TwoElectron => 2,
        }
    }

    pub fn from_max_electrons(n: usize) -> Result<Self> {
        match n {
            1 => Ok(Mode::SingleElectron),
            2 => Ok(Mode::TwoElectron),
            _ => Err(Error::Argument(format!("max_electrons must be 1 or 2, got {n}"))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::SingleElectron => "single_electron",
            Mode::TwoElectron => "two_electron",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DotParams {
    #[serde(rename = "E", default)]
    pub e: [f64; 3],
    #[serde(rename = "T1")]
    pub t1: f64,
    #[serde(rename = "T2")]
    pub t2: f64,
    #[serde(rename = "U", default)]
    pub u: [[f64; 3]; 3],
    #[serde(rename = "Gamma")]
    pub gamma: [f64; 3],
}

impl DotParams {
    /// Single-electron setup: dots 1 and 2 degenerate, dot 3 raised by `delta2`.
    pub fn single_electron(t1: f64, t2: f64, delta2: f64, gamma3: f64) -> Self {
        DotParams { e: [0.0, 0.0, delta2], t1, t2, u: [[0.0; 3]; 3], gamma: [1.0, 1.0, gamma3] }
    }

    /// Identical dots (`Δᵢ = 0`) with charging energies chosen so that the
    /// detunings come out as `δ33`, `δw`, `δu` (taking `U₁₂ = 0`).
    pub fn two_electron(t: f64, delta33: f64, delta_w: f64, delta_u: f64, gamma3: f64) -> Self {
        let u = [[delta_u, 0.0, delta_w], [0.0, delta_u, delta_w], [delta_w, delta_w, delta33]];
        DotParams { e: [0.0; 3], t1: t, t2: t, u, gamma: [1.0, 1.0, gamma3] }
    }

    /// `δ33 = 2T`, `δw = T`, `δu = 0`.
    pub fn antisymmetric(t: f64, gamma3: f64) -> Self {
        Self::two_electron(t, 2.0 * t, t, 0.0, gamma3)
    }

    /// All charging energies equal, identical dots.
    pub fn symmetric(t: f64, gamma3: f64) -> Self {
        Self::two_electron(t, 0.0, 0.0, 0.0, gamma3)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.e.iter().chain(self.u.iter().flatten()).chain(self.gamma.iter()).all(|x| x.is_finite())
            && self.t1.is_finite()
            && self.t2.is_finite();
        if !finite {
            return Err(Error::Argument("dot parameters must be finite".into()));
        }
        if self.gamma.iter().any(|&g| g < 0.0) {
            return Err(Error::Argument(format!("lead rates must be >= 0, got {:?}", self.gamma)));
        }
        for i in 0..3 {
            for j in 0..3 {
                if self.u[i][j] != self.u[j][i] {
                    return Err(Error::Argument("charging matrix U must be symmetric".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhononParams {
    pub omega_m: f64,
    pub gamma_p: f64,
    pub nbar_p: f64,
    pub alpha: f64,
}

impl PhononParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_m > 0.0 && self.omega_m.is_finite()) {
            return Err(Error::Argument(format!("omega_m must be > 0, got {}", self.omega_m)));
        }
        if !(self.gamma_p >= 0.0 && self.nbar_p >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Argument("gamma_p and nbar_p must be >= 0, alpha finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detunings {
    pub delta1_e: f64,
    pub delta2_e: f64,
    pub delta3_e: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub delta11: f64,
    pub delta22: f64,
    pub delta33: f64,
    pub delta13: f64,
    pub delta23: f64,
    /// Defined only when `δ11 = δ22`.
    pub delta_u: Option<f64>,
    /// Defined only when `δ13 = δ23`.
    pub delta_w: Option<f64>,
}

pub fn detunings(p: &DotParams) -> Detunings {
    let [e1, e2, e3] = p.e;
    let u = &p.u;
    let (d1e, d2e, d3e) = (e2 - e1, e3 - e1, e3 - e2);
    let delta1 = u[0][2] - u[0][1];
    let delta2 = u[1][2] - u[0][1];
    let delta11 = -d1e + u[0][0] - u[0][1];
    let delta22 = d1e + u[1][1] - u[0][1];
    let delta33 = d2e + d3e + u[2][2] - u[0][1];
    let delta13 = d2e + delta1;
    let delta23 = d3e + delta2;
    Detunings {
        delta1_e: d1e,
        delta2_e: d2e,
        delta3_e: d3e,
        delta1,
        delta2,
        delta11,
        delta22,
        delta33,
        delta13,
        delta23,
        delta_u: (delta11 == delta22).then_some(delta11),
        delta_w: (delta13 == delta23).then_some(delta13),
    }
}

pub fn dot_hamiltonian(p: &DotParams, basis: &FockBasis) -> OperatorMatrix {
    let n = basis.dim();
    let mut h = Mat::<c64>::zeros(n, n);
    for o in SpinOrbital::all() {
        h += scale(&number_op(basis, o), re(p.e[o.dot as usize - 1]));
    }
    for s in Spin::BOTH {
        let d3 = dagger(&creation_op(basis, SpinOrbital { dot: 3, spin: s }));
        let hop = scale(&(creation_op(basis, SpinOrbital { dot: 1, spin: s }) * &d3), re(p.t1))
            + scale(&(creation_op(basis, SpinOrbital { dot: 2, spin: s }) * &d3), re(p.t2));
        h += &hop + dagger(&hop);
    }
    for i in 1..=3u8 {
        let uii = p.u[i as usize - 1][i as usize - 1];
        h += scale(&(number_op(basis, SpinOrbital::up(i)) * number_op(basis, SpinOrbital::down(i))), re(uii));
    }
    for i in 1..=3u8 {
        for j in i + 1..=3u8 {
            let uij = p.u[i as usize - 1][j as usize - 1];
            h += scale(&(dot_number_op(basis, i) * dot_number_op(basis, j)), re(uij));
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockLabel {
    SingleSigma,
    Parallel,
    Opposite,
}

/// A Hamiltonian block together with the kets it is written in and the
/// scalar offset pulled out of its diagonal.
#[derive(Debug, Clone)]
pub struct Block {
    pub label: BlockLabel,
    pub states: Vec<FockState>,
    /// Full block, offset included.
    pub matrix: OperatorMatrix,
    pub offset: f64,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.states.len()
    }
}

fn real_matrix<const N: usize>(m: [[f64; N]; N], offset: f64) -> OperatorMatrix {
    Mat::from_fn(N, N, |i, j| c64::new(m[i][j] + if i == j { offset } else { 0.0 }, 0.0))
}

fn states_of<const K: usize>(lists: &[[SpinOrbital; K]]) -> Vec<FockState> {
    lists.iter().map(|l| FockState::from_orbitals(l).expect("distinct orbitals")).collect()
}

/// One-electron block in `(|1σ⟩, |2σ⟩, |3σ⟩)`.
pub fn block_h_sigma(p: &DotParams) -> Block {
    let d = detunings(p);
    let m = [[0.0, 0.0, p.t1], [0.0, d.delta1_e, p.t2], [p.t1, p.t2, d.delta2_e]];
    Block {
        label: BlockLabel::SingleSigma,
        states: states_of(&[[SpinOrbital::up(1)], [SpinOrbital::up(2)], [SpinOrbital::up(3)]]),
        matrix: real_matrix(m, p.e[0]),
        offset: p.e[0],
    }
}

/// Parallel-spin block in `(|1σ2σ⟩, |1σ3σ⟩, |2σ3σ⟩)`, as it follows from the
/// dot Hamiltonian with the canonical sign convention.
pub fn block_h_parallel(p: &DotParams) -> Block {
    let d = detunings(p);
    let m = [
        [0.0, p.t2, -p.t1],
        [p.t2, d.delta3_e + d.delta1, 0.0],
        [-p.t1, 0.0, d.delta2_e + d.delta2],
    ];
    let offset = p.e[0] + p.e[1] + p.u[0][1];
    Block { label: BlockLabel::Parallel, states: states_of(&PARALLEL_ORDER), matrix: real_matrix(m, offset), offset }
}

/// Opposite-spin block in the fixed nine-ket order. Requires `T₁ = T₂`.
pub fn block_h_opposite(p: &DotParams) -> Result<Block> {
    if p.t1 != p.t2 {
        return Err(Error::Unsupported(format!(
            "opposite-spin block literal form needs T1 = T2 (got {} and {}); use dot_hamiltonian",
            p.t1, p.t2
        )));
    }
    let t = p.t1;
    let d = detunings(p);
    let (d13, d23) = (d.delta3_e + d.delta1, d.delta2_e + d.delta2);
    let diag = [d.delta11, 0.0, 0.0, d.delta22, d.delta33, d13, d23, d13, d23];
    let hops: [(usize, usize); 12] =
        [(0, 5), (0, 7), (1, 5), (1, 8), (2, 6), (2, 7), (3, 6), (3, 8), (4, 5), (4, 6), (4, 7), (4, 8)];
    let mut m = [[0.0; 9]; 9];
    for (k, v) in diag.iter().enumerate() {
        m[k][k] = *v;
    }
    for (a, b) in hops {
        m[a][b] = t;
        m[b][a] = t;
    }
    let offset = p.e[0] + p.e[1] + p.u[0][1];
    Ok(Block { label: BlockLabel::Opposite, states: states_of(&OPPOSITE_SPIN_ORDER), matrix: real_matrix(m, offset), offset })
}

/// Principal sub-block of an operator on the given kets.
pub fn sub_block(op: &OperatorMatrix, basis: &FockBasis, states: &[FockState]) -> Result<OperatorMatrix> {
    let idx: Vec<usize> = states
        .iter()
        .map(|&s| basis.index_of(s).ok_or_else(|| Error::Argument(format!("{s} not in basis"))))
        .collect::<Result<_>>()?;
    Ok(Mat::from_fn(idx.len(), idx.len(), |i, j| op[(idx[i], idx[j])]))
}

/// Opposite-spin block read off `dot_hamiltonian`; valid for any `T₁`, `T₂`.
pub fn opposite_block_general(p: &DotParams, basis: &FockBasis) -> Result<Block> {
    let states = states_of(&OPPOSITE_SPIN_ORDER);
    let matrix = sub_block(&dot_hamiltonian(p, basis), basis, &states)?;
    Ok(Block { label: BlockLabel::Opposite, states, matrix, offset: p.e[0] + p.e[1] + p.u[0][1] })
}

/// `Ô = Σ_σ (n₂σ + n₃σ)`.
pub fn coupling_observable(basis: &FockBasis) -> OperatorMatrix {
    dot_number_op(basis, 2) + dot_number_op(basis, 3)
}

/// Bose-Einstein occupation for an angular frequency in rad/s and a
/// temperature in kelvin.
pub fn thermal_occupation(omega_m_absolute: f64, t_p: f64) -> f64 {
    if t_p <= 0.0 {
        return 0.0;
    }
    1.0 / (HBAR * omega_m_absolute / (K_B * t_p)).exp_m1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::operator::hermiticity_defect;

    fn generic() -> DotParams {
        DotParams {
            e: [0.3, -0.7, 1.9],
            t1: 2.1,
            t2: 5.3,
            u: [[4.0, 1.1, 0.4], [1.1, 3.3, 0.9], [0.4, 0.9, 6.2]],
            gamma: [1.0, 1.0, 0.5],
        }
    }

    #[test]
    fn diagonal_entries() {
        let b = build_basis(2).unwrap();
        let mut p = generic();
        p.t1 = 0.0;
        p.t2 = 0.0;
        let mut q = p.clone();
        q.u = [[0.0; 3]; 3];
        let h = dot_hamiltonian(&q, &b);
        let k = b.ket(&[SpinOrbital::up(1), SpinOrbital::down(2)]).unwrap();
        assert!((h[(k, k)].re - (q.e[0] + q.e[1])).abs() < 1e-14);
        assert!(hermiticity_defect(&h) == 0.0);
        let h = dot_hamiltonian(&p, &b);
        let k = b.ket(&[SpinOrbital::up(1), SpinOrbital::down(1)]).unwrap();
        assert!((h[(k, k)].re - (2.0 * p.e[0] + p.u[0][0])).abs() < 1e-14);
    }

    #[test]
    fn blocks_match_full_hamiltonian() {
        let b = build_basis(2).unwrap();
        let mut p = generic();
        let h = dot_hamiltonian(&p, &b);
        assert!(hermiticity_defect(&h) < 1e-12);
        for spin in Spin::BOTH {
            let s = block_h_sigma(&p);
            let states: Vec<FockState> = (1..=3)
                .map(|d| FockState::from_orbitals(&[SpinOrbital { dot: d, spin }]).unwrap())
                .collect();
            assert!((sub_block(&h, &b, &states).unwrap() - &s.matrix).norm_max() < 1e-14);
            let par = block_h_parallel(&p);
            let states: Vec<FockState> = [(1, 2), (1, 3), (2, 3)]
                .iter()
                .map(|&(x, y)| {
                    FockState::from_orbitals(&[SpinOrbital { dot: x, spin }, SpinOrbital { dot: y, spin }]).unwrap()
                })
                .collect();
            assert!((sub_block(&h, &b, &states).unwrap() - &par.matrix).norm_max() < 1e-14);
        }
        p.t2 = p.t1;
        let h = dot_hamiltonian(&p, &b);
        let opp = block_h_opposite(&p).unwrap();
        assert!((sub_block(&h, &b, &opp.states).unwrap() - &opp.matrix).norm_max() < 1e-14);
        assert!(block_h_opposite(&generic()).is_err());
    }

    #[test]
    fn single_block_eigenvalues() {
        let p = DotParams::single_electron(10.0, 10.0, 2.0, 0.5);
        let ev = block_h_sigma(&p).matrix.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let r = 201f64.sqrt();
        for (got, want) in ev.iter().zip([1.0 - r, 0.0, 1.0 + r]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn detuning_round_trip() {
        let p = DotParams::two_electron(10.0, 23.0, 7.5, 1.25, 1.0);
        let d = detunings(&p);
        assert_eq!(d.delta33, 23.0);
        assert_eq!(d.delta_w, Some(7.5));
        assert_eq!(d.delta_u, Some(1.25));
        let mut q = p.clone();
        q.u = [[2.0; 3]; 3];
        let d = detunings(&q);
        assert_eq!((d.delta11, d.delta33, d.delta13, d.delta_w), (0.0, 0.0, 0.0, Some(0.0)));
        q.u[0][0] = 3.0;
        assert_eq!(detunings(&q).delta_u, None);
    }

    #[test]
    fn observable_entries() {
        let b = build_basis(2).unwrap();
        let o = coupling_observable(&b);
        let k = b.ket(&[SpinOrbital::up(2), SpinOrbital::down(3)]).unwrap();
        assert_eq!(o[(k, k)].re, 2.0);
        let k = b.ket(&[SpinOrbital::up(1), SpinOrbital::down(1)]).unwrap();
        assert_eq!(o[(k, k)].re, 0.0);
    }

    #[test]
    fn bose_einstein() {
        assert_eq!(thermal_occupation(1.0e9, 0.0), 0.0);
        let w = 2.0f64.ln() * K_B * 0.05 / HBAR;
        assert!((thermal_occupation(w, 0.05) - 1.0).abs() < 1e-12);
        let n = thermal_occupation(2.0 * std::f64::consts::PI * 100e6, 0.1);
        assert!((n - 20.34).abs() < 0.01, "{n}");
    }
}
