//! Dense complex matrix plumbing shared by the physics modules.
//!
//! Vectorization is column-stacking throughout: `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.

use faer::{c64, Col, Mat, Side};

use crate::error::{Error, Result};

/// Dense complex operator on the dot Fock space.
pub type OperatorMatrix = Mat<c64>;

/// Dense complex density matrix. Validate with [`check_density_matrix`].
pub type DensityMatrix = Mat<c64>;

pub const I: c64 = c64 { re: 0.0, im: 1.0 };

pub fn re(x: f64) -> c64 {
    c64::new(x, 0.0)
}

pub fn dagger(a: &Mat<c64>) -> Mat<c64> {
    a.adjoint().to_owned()
}

pub fn kron(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    a.kron(b)
}

pub fn scale(a: &Mat<c64>, s: c64) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn commutator(a: &Mat<c64>, b: &Mat<c64>) -> Mat<c64> {
    a * b - b * a
}

pub fn trace(a: &Mat<c64>) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// Column-stacking vectorization.
pub fn vec(x: &Mat<c64>) -> Col<c64> {
    let n = x.nrows();
    Col::from_fn(n * x.ncols(), |k| x[(k % n, k / n)])
}

pub fn unvec(v: &Col<c64>, dim: usize) -> Mat<c64> {
    assert_eq!(v.nrows(), dim * dim, "unvec: length is not dim²");
    Mat::from_fn(dim, dim, |i, j| v[i + j * dim])
}

/// Index of matrix unit `|i⟩⟨j|` in the column-stacked vector.
#[inline]
pub fn vec_index(i: usize, j: usize, dim: usize) -> usize {
    i + j * dim
}

pub fn max_abs(a: &Mat<c64>) -> f64 {
    a.norm_max()
}

pub fn hermiticity_defect(a: &Mat<c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    m
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(a: &Mat<c64>) -> Result<Vec<f64>> {
    let h = Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5);
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::LinearAlgebra(format!("hermitian eigensolver: {e:?}")))
}

/// Checks the density-matrix invariants: Hermitian and unit trace to 1e-10,
/// smallest eigenvalue above -1e-8.
pub fn check_density_matrix(rho: &DensityMatrix) -> Result<()> {
    let herm = hermiticity_defect(rho);
    if herm > 1e-10 {
        return Err(Error::Argument(format!("density matrix not Hermitian (defect {herm:e})")));
    }
    let tr = trace(rho);
    if (tr - re(1.0)).norm() > 1e-10 {
        return Err(Error::Argument(format!("density matrix trace {tr} != 1")));
    }
    let min = hermitian_eigenvalues(rho)?[0];
    if min < -1e-8 {
        return Err(Error::Argument(format!("density matrix not positive (min eigenvalue {min:e})")));
    }
    Ok(())
}

/// `|ψ⟩⟨ψ|` for a normalized column.
pub fn projector(psi: &Col<c64>) -> Mat<c64> {
    Mat::from_fn(psi.nrows(), psi.nrows(), |i, j| psi[i] * psi[j].conj())
}

/// `⟨a|M|b⟩`.
pub fn sandwich(a: &Col<c64>, m: &Mat<c64>, b: &Col<c64>) -> c64 {
    let mb = m * b;
    (0..a.nrows()).map(|k| a[k].conj() * mb[k]).sum()
}

/// Random full-rank density matrix `G G† / tr(G G†)` with Gaussian-like
/// complex entries.
pub fn random_density_matrix<R: rand::Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let mut normal = || {
        // Box-Muller; one draw per component is enough here.
        let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    };
    let g = Mat::<c64>::from_fn(dim, dim, |_, _| c64::new(normal(), normal()));
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    Mat::from_fn(dim, dim, |i, j| m[(i, j)] / tr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vec_round_trip_is_exact() {
        let x = Mat::from_fn(4, 4, |i, j| c64::new(i as f64 + 0.5, j as f64 - 1.25));
        assert_eq!(unvec(&vec(&x), 4), x);
    }

    #[test]
    fn column_stacking_identity() {
        let a = Mat::from_fn(3, 3, |i, j| c64::new((i * 3 + j) as f64, 1.0));
        let x = Mat::from_fn(3, 3, |i, j| c64::new(1.0, (i + 2 * j) as f64));
        let b = Mat::from_fn(3, 3, |i, j| c64::new(i as f64 - j as f64, 0.5));
        let lhs = vec(&(&a * &x * &b));
        let rhs = kron(&b.transpose().to_owned(), &a) * vec(&x);
        assert!((&lhs - &rhs).norm_max() < 1e-12);
    }

    #[test]
    fn density_check_rejects_bad_trace() {
        let rho = Mat::<c64>::identity(2, 2);
        assert!(check_density_matrix(&rho).is_err());
        assert!(check_density_matrix(&scale(&rho, re(0.5))).is_ok());
    }
}
