//! Dot-only Liouvillian, steady states and time evolution.
//!
//! The dot Hamiltonian conserves electron number and spin projection, and the
//! jump operators shift bra and ket alike, so the span of matrix units
//! `|a⟩⟨b|` with equal `(N, 2Sz)` is invariant. Solves are done on the
//! smallest invariant coordinate subspace containing the data (see
//! [`Superoperator::reachable`]), which is exact and keeps matrices small.

mod joint;
mod rate_check;

pub use joint::{joint_liouvillian, joint_steady_state, JointLiouvillian, JointSteadyState, DEFAULT_JOINT_CAP};
pub use rate_check::{dressed_diagonal_state, dressed_rate_check, phi_states, RateCheckReport};

use faer::{c64, Col, Mat};

use crate::error::{Error, Result};
use crate::fock::{annihilation_op, creation_op, FockBasis, FockState, Spin, SpinOrbital};
use crate::model::{dot_hamiltonian, DotParams};
use crate::operator::{dagger, hermitian_eigenvalues, kron, scale, trace, unvec, vec, vec_index, DensityMatrix, I};

/// Relative singular-value threshold below which a direction counts as stationary.
pub const DEFAULT_NULL_THRESHOLD: f64 = 1e-9;

/// Dense Liouvillian acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Superoperator {
    pub dim: usize,
    pub matrix: Mat<c64>,
}

impl Superoperator {
    pub fn zeros(dim: usize) -> Self {
        Superoperator { dim, matrix: Mat::zeros(dim * dim, dim * dim) }
    }

    pub fn apply(&self, rho: &Mat<c64>) -> Mat<c64> {
        unvec(&(&self.matrix * vec(rho)), self.dim)
    }

    /// Sorted coordinates reachable from `seeds` through the sparsity
    /// pattern of the matrix. Their span is an invariant subspace.
    pub fn reachable(&self, seeds: &[usize]) -> Vec<usize> {
        let n = self.matrix.nrows();
        let mut seen = vec![false; n];
        let mut stack: Vec<usize> = Vec::new();
        for &s in seeds {
            if !seen[s] {
                seen[s] = true;
                stack.push(s);
            }
        }
        while let Some(j) = stack.pop() {
            for i in 0..n {
                if !seen[i] && self.matrix[(i, j)] != c64::new(0.0, 0.0) {
                    seen[i] = true;
                    stack.push(i);
                }
            }
        }
        (0..n).filter(|&k| seen[k]).collect()
    }

    pub fn restrict(&self, idx: &[usize]) -> Mat<c64> {
        Mat::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])])
    }

    /// Largest `|tr L(E_ij)|` over matrix units; zero for a trace-preserving map.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for col in 0..d * d {
            let s: c64 = (0..d).map(|k| self.matrix[(vec_index(k, k, d), col)]).sum();
            worst = worst.max(s.norm());
        }
        worst
    }
}

impl std::ops::Add for Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator { dim: self.dim, matrix: self.matrix + rhs.matrix }
    }
}

/// `-i[H, ·]`.
pub fn hamiltonian_superoperator(h: &Mat<c64>) -> Superoperator {
    let d = h.nrows();
    let id = Mat::<c64>::identity(d, d);
    let m = kron(&id, h) - kron(&h.transpose().to_owned(), &id);
    Superoperator { dim: d, matrix: scale(&m, -I) }
}

/// `rate (J ρ J† - ½{J†J, ρ})`.
pub fn lindblad_dissipator(j: &Mat<c64>, rate: f64) -> Superoperator {
    let d = j.nrows();
    let id = Mat::<c64>::identity(d, d);
    let jdj = dagger(j) * j;
    let m = kron(&j.conjugate().to_owned(), j)
        - scale(&kron(&id, &jdj), c64::new(0.5, 0.0))
        - scale(&kron(&jdj.transpose().to_owned(), &id), c64::new(0.5, 0.0));
    Superoperator { dim: d, matrix: scale(&m, c64::new(rate, 0.0)) }
}

/// Jump operators of the leads: injection `d†` into dots 1, 2 and removal `d`
/// from dot 3, for both spins, paired with their rates.
pub fn electrode_jumps(basis: &FockBasis, gamma: [f64; 3]) -> Vec<(f64, Mat<c64>)> {
    let mut out = Vec::new();
    for s in Spin::BOTH {
        out.push((gamma[0], creation_op(basis, SpinOrbital { dot: 1, spin: s })));
        out.push((gamma[1], creation_op(basis, SpinOrbital { dot: 2, spin: s })));
        out.push((gamma[2], annihilation_op(basis, SpinOrbital { dot: 3, spin: s })));
    }
    out
}

pub fn dissipator_electrodes(basis: &FockBasis, gamma: [f64; 3]) -> Result<Superoperator> {
    if gamma.iter().any(|&g| g < 0.0 || !g.is_finite()) {
        return Err(Error::Argument(format!("lead rates must be finite and >= 0, got {gamma:?}")));
    }
    let d = basis.dim();
    Ok(electrode_jumps(basis, gamma)
        .into_iter()
        .filter(|(g, _)| *g != 0.0)
        .fold(Superoperator::zeros(d), |acc, (g, j)| acc + lindblad_dissipator(&j, g)))
}

pub fn liouvillian_dots(p: &DotParams, basis: &FockBasis) -> Result<Superoperator> {
    p.validate()?;
    Ok(hamiltonian_superoperator(&dot_hamiltonian(p, basis)) + dissipator_electrodes(basis, p.gamma)?)
}

/// Null space of a Liouvillian restricted to an invariant coordinate subspace.
#[derive(Debug, Clone)]
pub struct StationarySpace {
    pub dim: usize,
    /// Coordinates (in the full `dim²` vectorization) spanning the subspace.
    pub indices: Vec<usize>,
    pub l_red: Mat<c64>,
    /// Right null vectors as columns.
    pub right: Mat<c64>,
    /// Left null vectors as columns (`left[:,k]† L = 0`).
    pub left: Mat<c64>,
    /// Absolute singular-value cutoff that was applied.
    pub cutoff: f64,
    pub singular_values: Vec<f64>,
}

impl StationarySpace {
    pub fn compute(l: &Superoperator, seeds: &[usize], rel_threshold: f64) -> Result<Self> {
        let indices = l.reachable(seeds);
        let l_red = l.restrict(&indices);
        let n = indices.len();
        let svd = l_red.svd().map_err(|e| Error::LinearAlgebra(format!("svd: {e:?}")))?;
        let s: Vec<f64> = (0..n).map(|k| svd.S().column_vector()[k].re).collect();
        let cutoff = rel_threshold * s.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let null: Vec<usize> = (0..n).filter(|&k| s[k] < cutoff).collect();
        let right = Mat::from_fn(n, null.len(), |i, k| svd.V()[(i, null[k])]);
        let left = Mat::from_fn(n, null.len(), |i, k| svd.U()[(i, null[k])]);
        Ok(StationarySpace { dim: l.dim, indices, l_red, right, left, cutoff, singular_values: s })
    }

    pub fn null_dimension(&self) -> usize {
        self.right.ncols()
    }

    /// Reduced coordinates of a full density matrix; entries outside the
    /// subspace must vanish.
    pub fn reduce(&self, x: &Mat<c64>) -> Col<c64> {
        let v = vec(x);
        Col::from_fn(self.indices.len(), |k| v[self.indices[k]])
    }

    pub fn expand(&self, y: &Col<c64>) -> Mat<c64> {
        let mut v = Col::<c64>::zeros(self.dim * self.dim);
        for (k, &i) in self.indices.iter().enumerate() {
            v[i] = y[k];
        }
        unvec(&v, self.dim)
    }

    /// Spectral projection onto the stationary subspace,
    /// `R (F†R)⁻¹ F† y` with `R`, `F` the right and left null vectors.
    pub fn stationary_part(&self, y: &Col<c64>) -> Col<c64> {
        if self.null_dimension() == 0 {
            return Col::zeros(y.nrows());
        }
        use faer::linalg::solvers::Solve;
        let fr = self.left.adjoint() * &self.right;
        let coeff = fr.partial_piv_lu().solve(self.left.adjoint() * y);
        &self.right * coeff
    }

    /// `Q y = y - stationary_part(y)`.
    pub fn remove_stationary(&self, y: &Col<c64>) -> Col<c64> {
        y - self.stationary_part(y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SteadyStateMethod {
    NullSpace,
    EvolvedFromVacuum,
}

impl SteadyStateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SteadyStateMethod::NullSpace => "null_space",
            SteadyStateMethod::EvolvedFromVacuum => "evolved_from_vacuum",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SteadyStateResult {
    pub rho_ss: DensityMatrix,
    /// Dimension of the null space inside the subspace reachable from the vacuum.
    pub null_dimension: usize,
    pub method: SteadyStateMethod,
    /// `‖L ρ_ss‖_max`.
    pub residual: f64,
}

pub fn steady_state(l: &Superoperator, basis: &FockBasis) -> Result<SteadyStateResult> {
    steady_state_with(l, basis, DEFAULT_NULL_THRESHOLD).map(|(r, _)| r)
}

/// Steady state plus the stationary-space data it was derived from.
pub fn steady_state_with(
    l: &Superoperator,
    basis: &FockBasis,
    rel_threshold: f64,
) -> Result<(SteadyStateResult, StationarySpace)> {
    let d = basis.dim();
    let vac = basis.index_of(FockState::VACUUM).expect("vacuum present");
    let space = StationarySpace::compute(l, &[vec_index(vac, vac, d)], rel_threshold)?;
    let trace_row: Vec<Option<usize>> = space.indices.iter().map(|&i| (i % d == i / d).then_some(i % d)).collect();
    let tr_of = |y: &Col<c64>| -> c64 { (0..y.nrows()).filter(|&k| trace_row[k].is_some()).map(|k| y[k]).sum() };

    let nd = space.null_dimension();
    if nd == 0 || (0..nd).all(|k| tr_of(&space.right.col(k).to_owned()).norm() < 1e-8) {
        return Err(Error::Structural(format!("null space (dimension {nd}) has no trace-one element")));
    }
    let (y, method) = if nd == 1 {
        let v = space.right.col(0).to_owned();
        let t = tr_of(&v);
        (Col::from_fn(v.nrows(), |k| v[k] / t), SteadyStateMethod::NullSpace)
    } else {
        (evolve_to_stationarity(&space, vac, d)?, SteadyStateMethod::EvolvedFromVacuum)
    };
    let mut rho = space.expand(&y);
    rho = Mat::from_fn(d, d, |i, j| (rho[(i, j)] + rho[(j, i)].conj()) * 0.5);
    let t = trace(&rho);
    rho = scale(&rho, t.inv());
    let residual = l.apply(&rho).norm_max();
    if residual > 1e-8 {
        return Err(Error::Structural(format!("steady-state residual {residual:e} above 1e-8")));
    }
    Ok((SteadyStateResult { rho_ss: rho, null_dimension: nd, method, residual }, space))
}

fn rk4_polynomial(a: &Mat<c64>, h: f64) -> Mat<c64> {
    let n = a.nrows();
    let ha = scale(a, c64::new(h, 0.0));
    let mut term = Mat::<c64>::identity(n, n);
    let mut p = term.clone();
    for k in 1..=4 {
        term = scale(&(&term * &ha), c64::new(1.0 / k as f64, 0.0));
        p += &term;
    }
    p
}

fn inf_norm(a: &Mat<c64>) -> f64 {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Long-time limit of RK4 evolution from the vacuum, reached by repeatedly
/// squaring the one-step propagator (step `2^k` after `k` squarings).
fn evolve_to_stationarity(space: &StationarySpace, vac: usize, d: usize) -> Result<Col<c64>> {
    let l = &space.l_red;
    let n = l.nrows();
    let h = 0.5 / inf_norm(l).max(f64::MIN_POSITIVE);
    let mut prop = rk4_polynomial(l, h);
    let start = space.indices.iter().position(|&i| i == vec_index(vac, vac, d)).expect("vacuum seed");
    let mut y = Col::<c64>::zeros(n);
    y[start] = c64::new(1.0, 0.0);
    for _ in 0..64 {
        prop = &prop * &prop;
        let z = &prop * &y;
        if (l * &z).norm_max() < 1e-10 {
            return Ok(z);
        }
    }
    Err(Error::Structural("evolution from vacuum did not reach stationarity".into()))
}

/// Fixed-step RK4 integration of `dρ/dt = L ρ`, done in the invariant
/// subspace that contains `rho0`.
pub fn time_evolve(l: &Superoperator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::Argument(format!("need dt > 0 and t_final >= 0 (dt = {dt}, t = {t_final})")));
    }
    let d = l.dim;
    let v0 = vec(rho0);
    let seeds: Vec<usize> = (0..d * d).filter(|&k| v0[k] != c64::new(0.0, 0.0)).collect();
    let idx = l.reachable(&seeds);
    let a = l.restrict(&idx);
    let mut y = Col::from_fn(idx.len(), |k| v0[idx[k]]);
    let steps = (t_final / dt).ceil() as usize;
    if steps > 0 {
        let h = t_final / steps as f64;
        let prop = rk4_polynomial(&a, h);
        for _ in 0..steps {
            y = &prop * &y;
        }
    }
    let mut full = Col::<c64>::zeros(d * d);
    for (k, &i) in idx.iter().enumerate() {
        full[i] = y[k];
    }
    let rho = unvec(&full, d);
    if !rho.norm_max().is_finite() {
        return Err(Error::IntegratorInstability { min_eigenvalue: f64::NEG_INFINITY });
    }
    let min_eigenvalue = hermitian_eigenvalues(&rho)?[0];
    if min_eigenvalue < -1e-6 {
        return Err(Error::IntegratorInstability { min_eigenvalue });
    }
    Ok(rho)
}

/// `max |ρ_dt(t) - ρ_{dt/2}(t)|`, the step-halving convergence check.
pub fn step_halving_difference(l: &Superoperator, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<f64> {
    let a = time_evolve(l, rho0, t_final, dt)?;
    let b = time_evolve(l, rho0, t_final, dt / 2.0)?;
    Ok((a - b).norm_max())
}

pub fn vacuum_state(basis: &FockBasis) -> DensityMatrix {
    let d = basis.dim();
    let mut rho = Mat::<c64>::zeros(d, d);
    let v = basis.index_of(FockState::VACUUM).expect("vacuum present");
    rho[(v, v)] = c64::new(1.0, 0.0);
    rho
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::build_basis;
    use crate::operator::{check_density_matrix, projector};

    fn random_hermitian(d: usize, seed: u64) -> Mat<c64> {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = Mat::from_fn(d, d, |_, _| c64::new(next(), next()));
        let h = &a * a.adjoint();
        let t = trace(&h);
        scale(&h, t.inv())
    }

    #[test]
    fn trace_preserving() {
        let b = build_basis(2).unwrap();
        let l = liouvillian_dots(&DotParams::antisymmetric(10.0, 0.5), &b).unwrap();
        assert!(l.trace_defect() < 1e-12);
        let rho = random_hermitian(22, 3);
        assert!(trace(&l.apply(&rho)).norm() < 1e-10);
    }

    #[test]
    fn closed_system_spectrum() {
        let b = build_basis(1).unwrap();
        let mut p = DotParams::single_electron(1.0, 2.0, 0.7, 0.0);
        p.gamma = [0.0; 3];
        let l = liouvillian_dots(&p, &b).unwrap();
        let ev = dot_hamiltonian(&p, &b).self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
        let mut lam = l.matrix.eigenvalues().unwrap();
        for z in &lam {
            assert!(z.re.abs() < 1e-10);
            let hit = ev.iter().any(|a| ev.iter().any(|b| (z.im + (a - b)).abs() < 1e-9));
            assert!(hit, "{z}");
        }
        lam.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
    }

    #[test]
    fn eigenvalues_in_left_half_plane() {
        let b = build_basis(2).unwrap();
        let l = liouvillian_dots(&DotParams::symmetric(3.0, 1.3), &b).unwrap();
        for z in l.matrix.eigenvalues().unwrap() {
            assert!(z.re <= 1e-10, "{z}");
        }
    }

    #[test]
    fn drain_only_empties_the_dots() {
        let b = build_basis(2).unwrap();
        let mut p = DotParams::antisymmetric(10.0, 0.5);
        p.gamma = [0.0, 0.0, 0.5];
        let l = liouvillian_dots(&p, &b).unwrap();
        let ss = steady_state(&l, &b).unwrap();
        assert!((ss.rho_ss - vacuum_state(&b)).norm_max() < 1e-12);
        assert!(l.apply(&vacuum_state(&b)).norm_max() == 0.0);
    }

    #[test]
    fn single_electron_dark_states() {
        let b = build_basis(1).unwrap();
        let p = DotParams::single_electron(10.0, 10.0, 0.0, 0.5);
        let l = liouvillian_dots(&p, &b).unwrap();
        let ss = steady_state(&l, &b).unwrap();
        assert!(ss.null_dimension > 1);
        assert_eq!(ss.method, SteadyStateMethod::EvolvedFromVacuum);
        let mut want = Mat::<c64>::zeros(7, 7);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for s in Spin::BOTH {
            let mut v = Col::<c64>::zeros(7);
            v[b.ket(&[SpinOrbital { dot: 1, spin: s }]).unwrap()] = c64::new(h, 0.0);
            v[b.ket(&[SpinOrbital { dot: 2, spin: s }]).unwrap()] = c64::new(-h, 0.0);
            let pr = projector(&v);
            assert!(l.apply(&pr).norm_max() < 1e-12);
            want += scale(&pr, c64::new(0.5, 0.0));
        }
        assert!((&ss.rho_ss - &want).norm_max() < 1e-9);
        check_density_matrix(&ss.rho_ss).unwrap();
    }

    #[test]
    fn evolution_converges_to_steady_state() {
        let b = build_basis(2).unwrap();
        let p = DotParams::two_electron(2.0, 3.0, 1.0, 0.4, 1.5);
        let l = liouvillian_dots(&p, &b).unwrap();
        let ss = steady_state(&l, &b).unwrap();
        assert_eq!(ss.method, SteadyStateMethod::NullSpace);
        let rho = time_evolve(&l, &vacuum_state(&b), 400.0, 0.01).unwrap();
        assert!((rho - &ss.rho_ss).norm_max() < 1e-8);
    }

    #[test]
    fn identity_evolution() {
        let b = build_basis(1).unwrap();
        let l = Superoperator::zeros(b.dim());
        let rho = random_hermitian(7, 11);
        assert!((time_evolve(&l, &rho, 3.0, 0.1).unwrap() - &rho).norm_max() < 1e-15);
    }

    #[test]
    fn pure_decay_matches_exponential() {
        let b = build_basis(1).unwrap();
        let mut p = DotParams::single_electron(0.0, 0.0, 0.0, 0.8);
        p.gamma = [0.0, 0.0, 0.8];
        let l = liouvillian_dots(&p, &b).unwrap();
        let k = b.ket(&[SpinOrbital::up(3)]).unwrap();
        let mut rho = Mat::<c64>::zeros(7, 7);
        rho[(k, k)] = c64::new(1.0, 0.0);
        let out = time_evolve(&l, &rho, 2.5, 0.01).unwrap();
        assert!((out[(k, k)].re - (-0.8f64 * 2.5).exp()).abs() < 1e-6);
        assert!((trace(&out) - c64::new(1.0, 0.0)).norm() < 1e-8);
        assert!(step_halving_difference(&l, &rho, 2.5, 0.02).unwrap() < 1e-8);
    }

    #[test]
    fn unstable_step_is_reported() {
        let b = build_basis(2).unwrap();
        let l = liouvillian_dots(&DotParams::antisymmetric(10.0, 0.5), &b).unwrap();
        let err = time_evolve(&l, &vacuum_state(&b), 2.0, 0.5).unwrap_err();
        assert_eq!(err.code(), "integrator_instability");
    }
}
