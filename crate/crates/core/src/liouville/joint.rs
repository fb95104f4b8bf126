//! Dot ⊗ phonon master equation, for validating the perturbative rate model.
//!
//! Stored sparse and restricted to matrix units whose dot parts share the
//! conserved `(N, 2Sz)` label, which is where the steady state lives. The
//! joint index is `dot * n_phonon + n`.

use faer::sparse::{SparseColMat, Triplet};
use faer::{c64, Mat};

use super::electrode_jumps;
use crate::error::{Error, Result};
use crate::fock::FockBasis;
use crate::model::{coupling_observable, dot_hamiltonian, DotParams, PhononParams};

/// Default cap on the number of reduced unknowns.
pub const DEFAULT_JOINT_CAP: usize = 60_000;

type Sparse = Vec<(usize, usize, c64)>;

#[derive(Debug, Clone)]
pub struct JointLiouvillian {
    pub dot_dim: usize,
    pub n_phonon: usize,
    /// `(row, col)` joint indices of each reduced unknown.
    pub pairs: Vec<(usize, usize)>,
    pub matrix: SparseColMat<usize, c64>,
}

impl JointLiouvillian {
    pub fn unknowns(&self) -> usize {
        self.pairs.len()
    }

    /// Largest `|Σ_diag L[:, col]|`; zero for a trace-preserving generator.
    pub fn trace_defect(&self) -> f64 {
        let diag: Vec<bool> = self.pairs.iter().map(|(i, j)| i == j).collect();
        let m = self.matrix.as_ref();
        let mut worst = 0.0f64;
        for col in 0..self.unknowns() {
            let s: c64 = m
                .row_idx_of_col(col)
                .zip(m.val_of_col(col))
                .filter(|(r, _)| diag[*r])
                .map(|(_, v)| *v)
                .sum();
            worst = worst.max(s.norm());
        }
        worst
    }
}

fn dense_nonzeros(m: &Mat<c64>) -> Sparse {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != c64::new(0.0, 0.0) {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// `A ⊗ B` of two sparse lists with `B` of size `nb`.
fn kron_sparse(a: &Sparse, b: &Sparse, nb: usize) -> Sparse {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &(i, j, x) in a {
        for &(k, l, y) in b {
            out.push((i * nb + k, j * nb + l, x * y));
        }
    }
    out
}

fn identity(n: usize) -> Sparse {
    (0..n).map(|k| (k, k, c64::new(1.0, 0.0))).collect()
}

fn product(a: &Sparse, b: &Sparse, n: usize) -> Sparse {
    let mut dense = vec![c64::new(0.0, 0.0); n * n];
    for &(i, k, x) in a {
        for &(k2, j, y) in b {
            if k == k2 {
                dense[i + j * n] += x * y;
            }
        }
    }
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let v = dense[i + j * n];
            if v != c64::new(0.0, 0.0) {
                out.push((i, j, v));
            }
        }
    }
    out
}

fn adjoint(a: &Sparse) -> Sparse {
    a.iter().map(|&(i, j, v)| (j, i, v.conj())).collect()
}

fn by_col(a: &Sparse, n: usize) -> Vec<Vec<(usize, c64)>> {
    let mut out = vec![Vec::new(); n];
    for &(i, j, v) in a {
        out[j].push((i, v));
    }
    out
}

fn by_row(a: &Sparse, n: usize) -> Vec<Vec<(usize, c64)>> {
    let mut out = vec![Vec::new(); n];
    for &(i, j, v) in a {
        out[i].push((j, v));
    }
    out
}

/// Full dot ⊗ phonon generator with `H = H_d + ω_m a†a + α Ô (a + a†)`,
/// the lead jumps, and thermal phonon damping at rate `γ_p`.
pub fn joint_liouvillian(
    p: &DotParams,
    ph: &PhononParams,
    n_phonon: usize,
    basis: &FockBasis,
    cap: usize,
) -> Result<JointLiouvillian> {
    if n_phonon < 2 {
        return Err(Error::Argument(format!("need at least 2 phonon levels, got {n_phonon}")));
    }
    p.validate()?;
    ph.validate()?;
    let nd = basis.dim();
    let m = nd * n_phonon;
    let sectors = basis.sectors();
    let label = |k: usize| sectors[k / n_phonon];

    let mut lookup = vec![usize::MAX; m * m];
    let mut pairs = Vec::new();
    for j in 0..m {
        for i in 0..m {
            if label(i) == label(j) {
                lookup[i + j * m] = pairs.len();
                pairs.push((i, j));
            }
        }
    }
    if pairs.len() > cap {
        return Err(Error::Resource { what: "joint reduced unknowns", requested: pairs.len(), cap });
    }

    let a: Sparse = (1..n_phonon).map(|n| (n - 1, n, c64::new((n as f64).sqrt(), 0.0))).collect();
    let ad = adjoint(&a);
    let num: Sparse = (1..n_phonon).map(|n| (n, n, c64::new(n as f64, 0.0))).collect();
    let x: Sparse = a.iter().chain(ad.iter()).copied().collect();
    let id_d = identity(nd);
    let id_p = identity(n_phonon);

    let mut h = kron_sparse(&dense_nonzeros(&dot_hamiltonian(p, basis)), &id_p, n_phonon);
    h.extend(kron_sparse(&id_d, &num, n_phonon).into_iter().map(|(i, j, v)| (i, j, v * ph.omega_m)));
    h.extend(
        kron_sparse(&dense_nonzeros(&coupling_observable(basis)), &x, n_phonon)
            .into_iter()
            .map(|(i, j, v)| (i, j, v * ph.alpha)),
    );

    let mut jumps: Vec<(f64, Sparse)> = electrode_jumps(basis, p.gamma)
        .into_iter()
        .map(|(g, j)| (g, kron_sparse(&dense_nonzeros(&j), &id_p, n_phonon)))
        .collect();
    jumps.push(((ph.nbar_p + 1.0) * ph.gamma_p, kron_sparse(&id_d, &a, n_phonon)));
    jumps.push((ph.nbar_p * ph.gamma_p, kron_sparse(&id_d, &ad, n_phonon)));
    jumps.retain(|(g, _)| *g != 0.0);

    let h_col = by_col(&h, m);
    let h_row = by_row(&h, m);
    struct Jump {
        g: f64,
        col: Vec<Vec<(usize, c64)>>,
        kcol: Vec<Vec<(usize, c64)>>,
        krow: Vec<Vec<(usize, c64)>>,
    }
    let jumps: Vec<Jump> = jumps
        .iter()
        .map(|(g, j)| {
            let k = product(&adjoint(j), j, m);
            Jump { g: *g, col: by_col(j, m), kcol: by_col(&k, m), krow: by_row(&k, m) }
        })
        .collect();

    let minus_i = c64::new(0.0, -1.0);
    let mut triplets = Vec::new();
    let mut column: Vec<(usize, c64)> = Vec::new();
    for (c, &(i, j)) in pairs.iter().enumerate() {
        column.clear();
        let mut push = |r: usize, s: usize, v: c64| {
            let k = lookup[r + s * m];
            debug_assert!(k != usize::MAX, "generator left the invariant subspace");
            column.push((k, v));
        };
        for &(k, v) in &h_col[i] {
            push(k, j, minus_i * v);
        }
        for &(k, v) in &h_row[j] {
            push(i, k, -minus_i * v);
        }
        for jp in &jumps {
            for &(k, v) in &jp.col[i] {
                for &(l, u) in &jp.col[j] {
                    push(k, l, v * u.conj() * jp.g);
                }
            }
            for &(k, v) in &jp.kcol[i] {
                push(k, j, v * (-0.5 * jp.g));
            }
            for &(k, v) in &jp.krow[j] {
                push(i, k, v * (-0.5 * jp.g));
            }
        }
        column.sort_by_key(|e| e.0);
        let mut last: Option<(usize, c64)> = None;
        for &(r, v) in column.iter() {
            match last {
                Some((lr, lv)) if lr == r => last = Some((lr, lv + v)),
                Some((lr, lv)) => {
                    triplets.push(Triplet::new(lr, c, lv));
                    last = Some((r, v));
                }
                None => last = Some((r, v)),
            }
        }
        if let Some((lr, lv)) = last {
            triplets.push(Triplet::new(lr, c, lv));
        }
    }
    let n = pairs.len();
    let matrix = SparseColMat::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::LinearAlgebra(format!("sparse assembly: {e:?}")))?;
    Ok(JointLiouvillian { dot_dim: nd, n_phonon, pairs, matrix })
}

#[derive(Debug, Clone)]
pub struct JointSteadyState {
    /// `⟨a†a⟩`.
    pub mean_phonon: f64,
    /// `⟨a⟩`.
    pub amplitude: c64,
    /// Reduced phonon populations `p_n`.
    pub phonon_populations: Vec<f64>,
    pub trace: c64,
}

impl JointSteadyState {
    /// `⟨a†a⟩ - |⟨a⟩|²`.
    pub fn fluctuation(&self) -> f64 {
        self.mean_phonon - self.amplitude.norm_sqr()
    }
}

/// Solves `L x = 0` with one diagonal row replaced by the trace condition.
pub fn joint_steady_state(jl: &JointLiouvillian) -> Result<JointSteadyState> {
    use faer::linalg::solvers::Solve;
    let n = jl.unknowns();
    let diag: Vec<usize> = (0..n).filter(|&k| jl.pairs[k].0 == jl.pairs[k].1).collect();
    let r0 = diag[0];
    let m = jl.matrix.as_ref();
    let mut triplets = Vec::with_capacity(m.compute_nnz() + diag.len());
    for col in 0..n {
        for (r, v) in m.row_idx_of_col(col).zip(m.val_of_col(col)) {
            if r != r0 {
                triplets.push(Triplet::new(r, col, *v));
            }
        }
    }
    for &d in &diag {
        triplets.push(Triplet::new(r0, d, c64::new(1.0, 0.0)));
    }
    let a = SparseColMat::<usize, c64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::LinearAlgebra(format!("sparse assembly: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::LinearAlgebra(format!("sparse LU: {e:?}")))?;
    let mut rhs = Mat::<c64>::zeros(n, 1);
    rhs[(r0, 0)] = c64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    if !x.norm_max().is_finite() {
        return Err(Error::LinearAlgebra("joint steady state solve produced non-finite values".into()));
    }

    let np = jl.n_phonon;
    let mut index = std::collections::HashMap::with_capacity(n);
    for (k, &pq) in jl.pairs.iter().enumerate() {
        index.insert(pq, k);
    }
    let mut pops = vec![0.0; np];
    let mut trace = c64::new(0.0, 0.0);
    let mut amplitude = c64::new(0.0, 0.0);
    for dot in 0..jl.dot_dim {
        for nph in 0..np {
            let i = dot * np + nph;
            let v = x[(index[&(i, i)], 0)];
            trace += v;
            pops[nph] += v.re;
            if nph + 1 < np {
                if let Some(&k) = index.get(&(i + 1, i)) {
                    amplitude += x[(k, 0)] * ((nph + 1) as f64).sqrt();
                }
            }
        }
    }
    let mean_phonon = pops.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    Ok(JointSteadyState { mean_phonon, amplitude, phonon_populations: pops, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;

    #[test]
    fn decoupled_mode_thermalizes() {
        let b = build_basis(1).unwrap();
        let p = DotParams::single_electron(3.0, 3.0, 1.0, 0.5);
        let ph = PhononParams { omega_m: 4.0, gamma_p: 0.3, nbar_p: 0.5, alpha: 0.0 };
        let jl = joint_liouvillian(&p, &ph, 14, &b, DEFAULT_JOINT_CAP).unwrap();
        assert!(jl.trace_defect() < 1e-12);
        let ss = joint_steady_state(&jl).unwrap();
        let r: f64 = 1.0 / 3.0;
        let z: f64 = (0..14).map(|k| r.powi(k)).sum();
        let want: f64 = (0..14).map(|k| k as f64 * r.powi(k)).sum::<f64>() / z;
        assert!((ss.mean_phonon - want).abs() < 1e-10, "{} vs {want}", ss.mean_phonon);
        assert!((ss.mean_phonon - 0.5).abs() < 1e-5);
        assert!((ss.trace.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let b = build_basis(2).unwrap();
        let ph = PhononParams { omega_m: 20.0, gamma_p: 2e-4, nbar_p: 0.5, alpha: 0.5 };
        let err = joint_liouvillian(&DotParams::antisymmetric(10.0, 0.5), &ph, 12, &b, 1000).unwrap_err();
        assert_eq!(err.code(), "resource");
    }

    #[test]
    fn coupled_generator_is_trace_preserving() {
        let b = build_basis(2).unwrap();
        let ph = PhononParams { omega_m: 20.0, gamma_p: 2e-4, nbar_p: 0.5, alpha: 0.5 };
        let jl = joint_liouvillian(&DotParams::antisymmetric(10.0, 0.5), &ph, 3, &b, DEFAULT_JOINT_CAP).unwrap();
        assert_eq!(jl.unknowns(), 118 * 9);
        assert!(jl.trace_defect() < 1e-12);
    }
}
