//! Eigenanalysis of Hamiltonian blocks, dark states, and checks of the
//! closed-form dressed states and transformation matrices.

use faer::{c64, Col, Mat, Side};

use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockState};
use crate::model::{block_h_opposite, coupling_observable, detunings, sub_block, Block, BlockLabel, DotParams};
use crate::operator::{hermiticity_defect, OperatorMatrix};
use crate::reference::{
    OPPOSITE_SPIN_ORDER, SYMMETRIC_DARK_STATE, W_A_EIGENVALUES, W_A_ROWS, W_A_SCALE, W_S_EIGENVALUES, W_S_ROWS,
    W_S_SCALE,
};

pub const DEFAULT_DARK_THRESHOLD: f64 = 1e-10;
/// Relative gap below which eigenvalues are treated as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct DressedSpectrum {
    pub label: Option<BlockLabel>,
    /// Ascending, relative to the block offset.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub vectors: Mat<c64>,
    /// Kets the block is written in.
    pub states: Vec<FockState>,
}

impl DressedSpectrum {
    pub fn vector(&self, k: usize) -> Col<c64> {
        self.vectors.col(k).to_owned()
    }

    /// Index ranges of (numerically) degenerate eigenvalues.
    pub fn degenerate_groups(&self) -> Vec<std::ops::Range<usize>> {
        let scale = self.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.eigenvalues.len() {
            if k == self.eigenvalues.len() || self.eigenvalues[k] - self.eigenvalues[k - 1] > DEGENERACY_TOL * scale {
                out.push(start..k);
                start = k;
            }
        }
        out
    }
}

fn fix_phase(v: &mut Col<c64>) {
    let mut best = 0;
    for k in 1..v.nrows() {
        if v[k].norm() > v[best].norm() + 1e-9 {
            best = k;
        }
    }
    let ph = v[best].conj() / v[best].norm();
    for k in 0..v.nrows() {
        v[k] *= ph;
    }
}

/// Pivoted Cholesky of the projector onto a degenerate eigenspace: pick the
/// largest diagonal entry (lowest index on ties), take that column, deflate.
fn canonical_basis(group: &Mat<c64>) -> Vec<Col<c64>> {
    let n = group.nrows();
    let mut p = group * group.adjoint();
    let mut out = Vec::new();
    for _ in 0..group.ncols() {
        let mut r = 0;
        for k in 1..n {
            if p[(k, k)].re > p[(r, r)].re + 1e-9 {
                r = k;
            }
        }
        let piv = p[(r, r)].re.sqrt();
        let v = Col::from_fn(n, |i| p[(i, r)] / piv);
        p = Mat::from_fn(n, n, |i, j| p[(i, j)] - v[i] * v[j].conj());
        out.push(v);
    }
    out
}

/// Diagonalizes a Hermitian matrix; eigenvalues are reported minus `offset`.
pub fn diagonalize_matrix(h: &OperatorMatrix, offset: f64) -> Result<(Vec<f64>, Mat<c64>)> {
    let scale = h.norm_max().max(1.0);
    if hermiticity_defect(h) > 1e-12 * scale {
        return Err(Error::Argument("diagonalize_block needs a Hermitian matrix".into()));
    }
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::LinearAlgebra(format!("{e:?}")))?;
    let n = h.nrows();
    let eigenvalues: Vec<f64> = (0..n).map(|k| evd.S().column_vector()[k].re - offset).collect();
    let mut spec = DressedSpectrum { label: None, eigenvalues, vectors: evd.U().to_owned(), states: Vec::new() };
    let mut vectors = Mat::<c64>::zeros(n, n);
    for g in spec.degenerate_groups() {
        let sub = Mat::from_fn(n, g.len(), |i, k| spec.vectors[(i, g.start + k)]);
        let basis = if g.len() == 1 { vec![sub.col(0).to_owned()] } else { canonical_basis(&sub) };
        for (k, mut v) in basis.into_iter().enumerate() {
            fix_phase(&mut v);
            for i in 0..n {
                vectors[(i, g.start + k)] = v[i];
            }
        }
    }
    spec.vectors = vectors;
    Ok((spec.eigenvalues, spec.vectors))
}

pub fn diagonalize_block(block: &Block) -> Result<DressedSpectrum> {
    let (eigenvalues, vectors) = diagonalize_matrix(&block.matrix, block.offset)?;
    Ok(DressedSpectrum { label: Some(block.label), eigenvalues, vectors, states: block.states.clone() })
}

/// Closed-form one-electron spectrum `[λ₋, λ₁, λ₊]` with vectors in
/// `(|1σ⟩, |2σ⟩, |3σ⟩)`. Requires `Δ1 = 0`.
pub fn single_electron_closed_form(p: &DotParams) -> Result<DressedSpectrum> {
    let d = detunings(p);
    if d.delta1_e != 0.0 {
        return Err(Error::Precondition(format!("closed form needs E2 = E1 (Delta1 = {})", d.delta1_e)));
    }
    let (t1, t2, d2) = (p.t1, p.t2, d.delta2_e);
    let r2 = t1 * t1 + t2 * t2;
    let omega = (d2 * d2 + 4.0 * r2).sqrt();
    let eta = t1.atan2(t2);
    let theta = ((omega - d2) / (omega + d2)).sqrt().atan();
    let (se, ce, st, ct) = (eta.sin(), eta.cos(), theta.sin(), theta.cos());
    let root = (r2 + d2 * d2 / 4.0).sqrt();
    let eigenvalues = vec![d2 / 2.0 - root, 0.0, d2 / 2.0 + root];
    let cols = [[-ct * se, -ct * ce, st], [ce, -se, 0.0], [st * se, st * ce, ct]];
    let vectors = Mat::from_fn(3, 3, |i, k| c64::new(cols[k][i], 0.0));
    let block = crate::model::block_h_sigma(p);
    Ok(DressedSpectrum { label: Some(BlockLabel::SingleSigma), eigenvalues, vectors, states: block.states })
}

/// Largest disagreement between the closed-form one-electron spectrum and
/// numerical diagonalization, over eigenvalues and phase-aligned vectors.
pub fn closed_form_defect(p: &DotParams) -> Result<f64> {
    let cf = single_electron_closed_form(p)?;
    let num = diagonalize_block(&crate::model::block_h_sigma(p))?;
    let mut worst: f64 = 0.0;
    for k in 0..3 {
        worst = worst.max((num.eigenvalues[k] - cf.eigenvalues[k]).abs());
        worst = worst.max(phase_aligned_distance(&num.vector(k), &cf.vector(k)));
    }
    Ok(worst)
}

/// Max componentwise distance between two vectors after aligning the phase.
pub fn phase_aligned_distance(a: &Col<c64>, b: &Col<c64>) -> f64 {
    let ov: c64 = (0..a.nrows()).map(|k| b[k].conj() * a[k]).sum();
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { c64::new(1.0, 0.0) };
    (0..a.nrows()).map(|k| (a[k] - b[k] * ph).norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct DarkStateReport {
    /// Eigenvector indices flagged dark.
    pub indices: Vec<usize>,
    /// Dot-3 weight of each eigenvector.
    pub dot3_weight: Vec<f64>,
    /// Dark directions found inside degenerate eigenspaces, as
    /// `(eigenvalue, vector)`; includes the flagged eigenvectors.
    pub dark_vectors: Vec<(f64, Col<c64>)>,
    pub threshold: f64,
}

pub fn find_dark_states(spec: &DressedSpectrum, threshold: f64) -> DarkStateReport {
    let n = spec.states.len();
    let on3: Vec<bool> = spec.states.iter().map(|s| s.occupies_dot(3)).collect();
    let weight = |v: &Col<c64>| (0..n).filter(|&i| on3[i]).map(|i| v[i].norm_sqr()).sum::<f64>();
    let dot3_weight: Vec<f64> = (0..n).map(|k| weight(&spec.vector(k))).collect();
    let indices = (0..n).filter(|&k| dot3_weight[k] < threshold).collect();
    let mut dark_vectors = Vec::new();
    for g in spec.degenerate_groups() {
        let m = g.len();
        let w = Mat::<c64>::from_fn(m, m, |a, b| {
            (0..n).filter(|&i| on3[i]).map(|i| spec.vectors[(i, g.start + a)].conj() * spec.vectors[(i, g.start + b)]).sum()
        });
        let evd = match w.self_adjoint_eigen(Side::Lower) {
            Ok(e) => e,
            Err(_) => continue,
        };
        for c in 0..m {
            if evd.S().column_vector()[c].re < threshold {
                let mut v = Col::from_fn(n, |i| (0..m).map(|a| spec.vectors[(i, g.start + a)] * evd.U()[(a, c)]).sum());
                fix_phase(&mut v);
                dark_vectors.push((spec.eigenvalues[g.start], v));
            }
        }
    }
    DarkStateReport { indices, dot3_weight, dark_vectors, threshold }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WMatrix {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone)]
pub struct TransformationReport {
    pub which: WMatrix,
    /// `max |W W† - I|`.
    pub orthonormality_defect: f64,
    /// Largest off-diagonal `|(W H W†)_kl|`.
    pub max_off_diagonal: f64,
    /// Largest `|(W H W†)_kk - λ_k|` against the reference list.
    pub max_eigenvalue_error: f64,
    /// `‖H w_k - λ_k w_k‖` per row.
    pub row_residuals: Vec<f64>,
}

impl TransformationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.orthonormality_defect < tol && self.max_off_diagonal < tol && self.max_eigenvalue_error < tol
    }

    pub fn failing_rows(&self, tol: f64) -> Vec<usize> {
        (0..9).filter(|&k| self.row_residuals[k] >= tol).map(|k| k + 1).collect()
    }
}

pub fn transformation_matrix(which: WMatrix) -> Mat<c64> {
    let (rows, s) = match which {
        WMatrix::Symmetric => (&W_S_ROWS, W_S_SCALE),
        WMatrix::Antisymmetric => (&W_A_ROWS, W_A_SCALE),
    };
    Mat::from_fn(9, 9, |i, j| c64::new(rows[i][j] * s, 0.0))
}

/// The opposite-spin Hamiltonian (offset removed) each matrix belongs to.
pub fn preset_block(which: WMatrix, t: f64) -> Result<Block> {
    let p = match which {
        WMatrix::Symmetric => DotParams::symmetric(t, 1.0),
        WMatrix::Antisymmetric => DotParams::antisymmetric(t, 1.0),
    };
    block_h_opposite(&p)
}

pub fn verify_transformation_matrix(which: WMatrix, t: f64) -> Result<TransformationReport> {
    let w = transformation_matrix(which);
    let block = preset_block(which, t)?;
    let h = Mat::from_fn(9, 9, |i, j| block.matrix[(i, j)] - if i == j { c64::new(block.offset, 0.0) } else { c64::new(0.0, 0.0) });
    let listed = match which {
        WMatrix::Symmetric => W_S_EIGENVALUES,
        WMatrix::Antisymmetric => W_A_EIGENVALUES,
    };
    let gram = &w * w.adjoint();
    let orthonormality_defect = (gram - Mat::<c64>::identity(9, 9)).norm_max();
    let d = &w * &h * w.adjoint();
    let mut max_off_diagonal = 0.0f64;
    let mut max_eigenvalue_error = 0.0f64;
    for i in 0..9 {
        for j in 0..9 {
            if i == j {
                max_eigenvalue_error = max_eigenvalue_error.max((d[(i, i)] - c64::new(listed[i] * t, 0.0)).norm());
            } else {
                max_off_diagonal = max_off_diagonal.max(d[(i, j)].norm());
            }
        }
    }
    let row_residuals = (0..9)
        .map(|k| {
            let v = w.row(k).transpose().to_owned();
            let hv = &h * &v;
            (0..9).map(|i| (hv[i] - v[i] * listed[k] * t).norm_sqr()).sum::<f64>().sqrt()
        })
        .collect();
    Ok(TransformationReport { which, orthonormality_defect, max_off_diagonal, max_eigenvalue_error, row_residuals })
}

/// The reference symmetric dark state in the opposite-spin order.
pub fn symmetric_dark_state() -> Col<c64> {
    Col::from_fn(9, |i| c64::new(SYMMETRIC_DARK_STATE[i] * 0.5, 0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionKind {
    /// Target above the dark state: absorbs a phonon.
    Cooling,
    /// Target below the dark state: emits a phonon.
    Heating,
    Diagonal,
}

#[derive(Debug, Clone)]
pub struct CouplingEntry {
    pub target: usize,
    pub amplitude: c64,
    /// `λ_target - λ_dark`.
    pub frequency: f64,
    pub kind: TransitionKind,
}

/// `⟨Φ_k|Ô|Φ_dark⟩` for all k with a nonzero element. `o` is written in the
/// same kets as `spec`.
pub fn dressed_coupling_table(spec: &DressedSpectrum, o: &OperatorMatrix, dark_index: usize) -> Vec<CouplingEntry> {
    let n = spec.eigenvalues.len();
    let od = o * spec.vectors.col(dark_index);
    let lam0 = spec.eigenvalues[dark_index];
    let scale = spec.eigenvalues.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    (0..n)
        .filter_map(|k| {
            let amp: c64 = (0..n).map(|i| spec.vectors[(i, k)].conj() * od[i]).sum();
            if amp.norm() < 1e-12 {
                return None;
            }
            let frequency = spec.eigenvalues[k] - lam0;
            let kind = if k == dark_index || frequency.abs() <= DEGENERACY_TOL * scale {
                TransitionKind::Diagonal
            } else if frequency > 0.0 {
                TransitionKind::Cooling
            } else {
                TransitionKind::Heating
            };
            Some(CouplingEntry { target: k, amplitude: amp, frequency, kind })
        })
        .collect()
}

/// Coupling strength summed over each degenerate target level:
/// `(frequency, sqrt(Σ|amplitude|²), number of targets)`. Invariant under
/// rotations inside degenerate eigenspaces.
pub fn coupling_by_level(spec: &DressedSpectrum, table: &[CouplingEntry]) -> Vec<(f64, f64, usize)> {
    let mut out = Vec::new();
    for g in spec.degenerate_groups() {
        let hits: Vec<&CouplingEntry> = table.iter().filter(|e| g.contains(&e.target)).collect();
        if hits.is_empty() {
            continue;
        }
        let s = hits.iter().map(|e| e.amplitude.norm_sqr()).sum::<f64>().sqrt();
        out.push((hits[0].frequency, s, hits.len()));
    }
    out
}

/// `Ô` written in the kets of a block.
pub fn observable_on_block(basis: &FockBasis, states: &[FockState]) -> Result<OperatorMatrix> {
    sub_block(&coupling_observable(basis), basis, states)
}

/// Opposite-spin kets in block order, as Fock states.
pub fn opposite_states() -> Vec<FockState> {
    OPPOSITE_SPIN_ORDER.iter().map(|k| FockState::from_orbitals(k).expect("distinct")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::model::{block_h_parallel, block_h_sigma, dot_hamiltonian};

    const S2: f64 = std::f64::consts::SQRT_2;

    fn assert_eigs(got: &[f64], want: &[f64]) {
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-10, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn symmetric_block_eigenvalues() {
        let t = 10.0;
        let spec = diagonalize_block(&block_h_opposite(&DotParams::symmetric(t, 1.0)).unwrap()).unwrap();
        assert_eigs(&spec.eigenvalues, &[-2.0 * S2 * t, -S2 * t, -S2 * t, 0.0, 0.0, 0.0, S2 * t, S2 * t, 2.0 * S2 * t]);
        let u = &spec.vectors;
        assert!((u.adjoint() * u - Mat::<c64>::identity(9, 9)).norm_max() < 1e-10);
    }

    #[test]
    fn antisymmetric_block_eigenvalues() {
        let t = 10.0;
        let spec = diagonalize_block(&block_h_opposite(&DotParams::antisymmetric(t, 1.0)).unwrap()).unwrap();
        assert_eigs(&spec.eigenvalues, &[-2.0 * t, -t, -t, 0.0, t, t, 2.0 * t, 2.0 * t, 4.0 * t]);
        let h = &block_h_opposite(&DotParams::antisymmetric(t, 1.0)).unwrap().matrix;
        for k in 0..9 {
            let v = spec.vector(k);
            let r = h * &v - &v * faer::Scale(c64::new(spec.eigenvalues[k], 0.0));
            assert!(r.norm_l2() < 1e-10);
        }
    }

    #[test]
    fn uncoupled_block_is_bare() {
        let spec = diagonalize_block(&block_h_sigma(&DotParams::single_electron(0.0, 0.0, 2.0, 1.0))).unwrap();
        assert!((spec.vectors.clone() - Mat::<c64>::identity(3, 3)).norm_max() < 1e-14);
        let rep = find_dark_states(&spec, DEFAULT_DARK_THRESHOLD);
        assert_eq!(rep.indices, vec![0, 1]);
    }

    #[test]
    fn closed_form_examples() {
        let p = DotParams::single_electron(10.0, 10.0, 2.0, 0.5);
        let cf = single_electron_closed_form(&p).unwrap();
        assert!((cf.eigenvalues[2] - (1.0 + 201f64.sqrt())).abs() < 1e-12);
        let v = cf.vector(1);
        assert!((v[0] + v[1]).norm() < 1e-15 && v[2].norm() == 0.0);
        let cf = single_electron_closed_form(&DotParams::single_electron(3.0, 4.0, 0.0, 0.5)).unwrap();
        assert!((cf.eigenvalues[0] + 5.0).abs() < 1e-12 && (cf.eigenvalues[2] - 5.0).abs() < 1e-12);
        let mut q = p.clone();
        q.e[1] = 0.1;
        assert_eq!(single_electron_closed_form(&q).unwrap_err().code(), "precondition");
    }

    #[test]
    fn closed_form_matches_numerics() {
        let p = DotParams::single_electron(3.7, 8.1, -2.3, 0.5);
        let cf = single_electron_closed_form(&p).unwrap();
        let num = diagonalize_block(&block_h_sigma(&p)).unwrap();
        assert_eigs(&num.eigenvalues, &cf.eigenvalues);
        for k in 0..3 {
            assert!(phase_aligned_distance(&num.vector(k), &cf.vector(k)) < 1e-12);
        }
        assert!(cf.eigenvalues[2] > cf.eigenvalues[1] && cf.eigenvalues[1] > cf.eigenvalues[0]);
    }

    #[test]
    fn dark_state_counts() {
        let sym = diagonalize_block(&block_h_opposite(&DotParams::symmetric(10.0, 1.0)).unwrap()).unwrap();
        let rep = find_dark_states(&sym, DEFAULT_DARK_THRESHOLD);
        assert_eq!(rep.dark_vectors.len(), 1);
        assert_eq!(rep.indices.len(), 1);
        assert!(phase_aligned_distance(&rep.dark_vectors[0].1, &symmetric_dark_state()) < 1e-12);
        let par = diagonalize_block(&block_h_parallel(&DotParams::single_electron(2.0, 5.0, 1.0, 1.0))).unwrap();
        assert!(find_dark_states(&par, DEFAULT_DARK_THRESHOLD).dark_vectors.is_empty());
        let one = diagonalize_block(&block_h_sigma(&DotParams::single_electron(2.0, 5.0, 1.0, 1.0))).unwrap();
        assert_eq!(find_dark_states(&one, DEFAULT_DARK_THRESHOLD).dark_vectors.len(), 1);
        let mut q = DotParams::single_electron(2.0, 5.0, 1.0, 1.0);
        q.e[1] = 0.3;
        let one = diagonalize_block(&block_h_sigma(&q)).unwrap();
        assert!(find_dark_states(&one, DEFAULT_DARK_THRESHOLD).dark_vectors.is_empty());
    }

    #[test]
    fn full_spectrum_is_union_of_blocks() {
        let b = build_basis(2).unwrap();
        let p = DotParams::two_electron(4.0, 6.0, 1.5, 0.7, 1.0);
        let mut want: Vec<f64> = vec![0.0];
        for _ in 0..2 {
            let s = block_h_sigma(&p);
            want.extend(diagonalize_block(&s).unwrap().eigenvalues.iter().map(|x| x + s.offset));
            let s = block_h_parallel(&p);
            want.extend(diagonalize_block(&s).unwrap().eigenvalues.iter().map(|x| x + s.offset));
        }
        let s = block_h_opposite(&p).unwrap();
        want.extend(diagonalize_block(&s).unwrap().eigenvalues.iter().map(|x| x + s.offset));
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let got = dot_hamiltonian(&p, &b).self_adjoint_eigenvalues(Side::Lower).unwrap();
        assert_eigs(&got, &want);
    }

    #[test]
    fn antisymmetric_transformation_matrix_holds() {
        let rep = verify_transformation_matrix(WMatrix::Antisymmetric, 10.0).unwrap();
        assert!(rep.passes(1e-10), "{rep:?}");
    }

    #[test]
    fn symmetric_matrix_dark_row() {
        let w = transformation_matrix(WMatrix::Symmetric);
        let row9 = w.row(8).transpose().to_owned();
        let dark = symmetric_dark_state();
        assert!((0..9).all(|i| (row9[i] + dark[i]).norm() < 1e-15));
    }

    #[test]
    fn coupling_tables() {
        let b = build_basis(2).unwrap();
        let states = opposite_states();
        let o = observable_on_block(&b, &states).unwrap();
        let sym = diagonalize_block(&block_h_opposite(&DotParams::symmetric(10.0, 1.0)).unwrap()).unwrap();
        let dark = find_dark_states(&sym, DEFAULT_DARK_THRESHOLD).indices[0];
        let table = dressed_coupling_table(&sym, &o, dark);
        let diag = table.iter().find(|e| e.kind == TransitionKind::Diagonal).unwrap();
        assert!((diag.amplitude.re - 1.0).abs() < 1e-12);
        let levels = coupling_by_level(&sym, &table);
        let up: Vec<_> = levels.iter().filter(|l| l.0 > 1e-9).collect();
        let down: Vec<_> = levels.iter().filter(|l| l.0 < -1e-9).collect();
        assert_eq!((up.len(), down.len()), (1, 1));
        assert!((up[0].0 + down[0].0).abs() < 1e-10 && (up[0].0 - S2 * 10.0).abs() < 1e-10);
        assert!((up[0].1 - 0.5).abs() < 1e-12 && (down[0].1 - 0.5).abs() < 1e-12);

        let id = Mat::<c64>::identity(9, 9);
        let t = dressed_coupling_table(&sym, &id, dark);
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].frequency, 0.0);
    }
}
