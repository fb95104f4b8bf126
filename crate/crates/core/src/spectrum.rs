//! Stationary correlation spectrum of the coupling observable and the
//! resulting heating/cooling rates.
//!
//! `S(ω) = ∫₀^∞ dτ tr(Ô e^{Lτ}[Q(Ô ρ_ss)]) e^{-iωτ}` where `Q` removes the
//! whole stationary subspace, so `S(ω) = c · (iω - L)⁻¹ x₀` on the reduced
//! coordinates.

use faer::linalg::solvers::Solve;
use faer::{c64, Col, Mat, Row};

use crate::error::{Eigenvalue, Error, Result};
use crate::fock::{build_basis, FockBasis};
use crate::liouville::{liouvillian_dots, steady_state_with, StationarySpace, SteadyStateResult, Superoperator};
use crate::model::{coupling_observable, DotParams, Mode, PhononParams};
use crate::operator::{vec, DensityMatrix, OperatorMatrix};
use crate::liouville::DEFAULT_NULL_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMethod {
    Resolvent,
    TimeDomain,
}

impl RateMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            RateMethod::Resolvent => "resolvent",
            RateMethod::TimeDomain => "time_domain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    pub a_plus: f64,
    pub a_minus: f64,
    pub omega_m: f64,
    pub method: RateMethod,
}

/// Everything needed to evaluate `S(ω)` repeatedly for one Liouvillian.
#[derive(Debug, Clone)]
pub struct SpectralContext {
    pub space: StationarySpace,
    /// `Q vec(Ô ρ_ss)` in reduced coordinates.
    pub x0: Col<c64>,
    /// Row functional with `c · y = tr(Ô unvec(y))`.
    pub functional: Row<c64>,
}

impl SpectralContext {
    pub fn new(l: &Superoperator, rho_ss: &DensityMatrix, o: &OperatorMatrix, rel_threshold: f64) -> Result<Self> {
        let x = o * rho_ss;
        let (vr, vx) = (vec(rho_ss), vec(&x));
        let zero = c64::new(0.0, 0.0);
        let seeds: Vec<usize> = (0..vr.nrows()).filter(|&k| vr[k] != zero || vx[k] != zero).collect();
        let space = StationarySpace::compute(l, &seeds, rel_threshold)?;
        Ok(Self::from_space(space, &x, o))
    }

    /// Reuses a stationary space whose subspace already contains `Ô ρ_ss`.
    pub fn from_space(space: StationarySpace, x: &Mat<c64>, o: &OperatorMatrix) -> Self {
        let d = space.dim;
        let x0 = space.remove_stationary(&space.reduce(x));
        let functional = Row::from_fn(space.indices.len(), |k| {
            let (i, j) = (space.indices[k] % d, space.indices[k] / d);
            o[(j, i)]
        });
        SpectralContext { space, x0, functional }
    }

    pub fn spectrum(&self, omega: f64) -> Result<c64> {
        let l = &self.space.l_red;
        let n = l.nrows();
        let a = Mat::from_fn(n, n, |i, j| if i == j { c64::new(0.0, omega) - l[(i, j)] } else { -l[(i, j)] });
        let y = a.partial_piv_lu().solve(&self.x0);
        let scale = self.x0.norm_l2().max(f64::MIN_POSITIVE);
        let resid = (&a * &y - &self.x0).norm_l2();
        if !y.norm_l2().is_finite() || resid > 1e-8 * scale || y.norm_l2() > 1e12 * scale {
            return Err(self.singularity(omega));
        }
        Ok(&self.functional * &y)
    }

    fn singularity(&self, omega: f64) -> Error {
        let nearest = self
            .eigenvalues()
            .unwrap_or_default()
            .into_iter()
            .min_by(|a, b| {
                let da = (a - c64::new(0.0, omega)).norm();
                let db = (b - c64::new(0.0, omega)).norm();
                da.partial_cmp(&db).unwrap()
            })
            .unwrap_or(c64::new(f64::NAN, f64::NAN));
        Error::SpectralSingularity { omega, eigenvalue: Eigenvalue { re: nearest.re, im: nearest.im } }
    }

    /// Eigenvalues of the reduced Liouvillian (diagnostics only).
    pub fn eigenvalues(&self) -> Result<Vec<c64>> {
        self.space.l_red.eigenvalues().map_err(|e| Error::LinearAlgebra(format!("{e:?}")))
    }

    /// `(slowest nonzero decay rate, largest |Im λ|)` over the reduced spectrum.
    pub fn time_scales(&self) -> Result<(f64, f64)> {
        let ev = self.eigenvalues()?;
        let cut = 1e-9 * self.space.singular_values.first().copied().unwrap_or(1.0);
        let mut kappa = f64::INFINITY;
        let mut nu: f64 = 0.0;
        for z in ev {
            nu = nu.max(z.im.abs());
            if z.norm() > cut {
                kappa = kappa.min(-z.re);
            }
        }
        Ok((kappa, nu))
    }

    /// Samples `f(τ_k) = tr(Ô X(τ_k))` on `τ_k = k dt`, `k = 0..=N` with `N`
    /// even, using the exact propagator `exp(L dt)`.
    pub fn samples(&self, tau_max: f64, dt: f64) -> Result<CorrelationSamples> {
        if !(dt > 0.0 && tau_max > 0.0) {
            return Err(Error::Argument(format!("need tau_max > 0 and dt > 0 (got {tau_max}, {dt})")));
        }
        let mut steps = (tau_max / dt).ceil() as usize;
        steps += steps % 2;
        let l = &self.space.l_red;
        // Rows r_j = c exp(L j dt) for one block of `block` sub-steps; X advances
        // one block at a time, so each sample costs a single dot product.
        let block = 64usize;
        let step = expm(l, dt);
        let mut rows = Vec::with_capacity(block);
        let mut r = self.functional.clone();
        for _ in 0..block {
            rows.push(r.clone());
            r = &r * &step;
        }
        let jump = expm(l, dt * block as f64);
        let mut x = self.x0.clone();
        let mut values = Vec::with_capacity(steps + 1);
        'outer: loop {
            for row in &rows {
                values.push(row * &x);
                if values.len() == steps + 1 {
                    break 'outer;
                }
            }
            x = &jump * &x;
        }
        // `x` sits at the start of the last block; finish the remaining sub-steps.
        let mut x_end = x;
        for _ in 0..steps % block {
            x_end = &step * &x_end;
        }
        let (kappa, _) = self.time_scales()?;
        let c_norm = self.functional.norm_l2();
        let remainder = if kappa.is_finite() && kappa > 0.0 {
            c_norm * x_end.norm_l2() / kappa
        } else if x_end.norm_l2() * c_norm == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Ok(CorrelationSamples { dt, values, remainder })
    }

    /// Grid `(tau_max, dt)` resolving the slowest decay to `e^-28` and the
    /// fastest oscillation (including `omega_max`) with `ν dt = 0.05`.
    pub fn auto_grid(&self, omega_max: f64) -> Result<(f64, f64)> {
        let (kappa, nu) = self.time_scales()?;
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InconclusiveIntegration { remainder: f64::INFINITY, tolerance: 0.0 });
        }
        let tau_max = 28.0 / kappa;
        let dt = 0.05 / (nu + omega_max.abs()).max(1.0);
        Ok((tau_max, dt))
    }
}

/// `exp(A t)` by scaling and squaring a degree-18 Taylor polynomial.
pub fn expm(a: &Mat<c64>, t: f64) -> Mat<c64> {
    let n = a.nrows();
    let norm1 = (0..n).map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max) * t.abs();
    let s = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let h = t / 2f64.powi(s);
    let b = Mat::from_fn(n, n, |i, j| a[(i, j)] * h);
    let mut term = Mat::<c64>::identity(n, n);
    let mut e = term.clone();
    for k in 1..=18 {
        term = &term * &b * faer::Scale(c64::new(1.0 / k as f64, 0.0));
        e += &term;
    }
    for _ in 0..s {
        e = &e * &e;
    }
    e
}

/// Uniform samples of the correlation function plus a tail bound
/// `‖c‖ ‖X(τ_max)‖ / κ`.
#[derive(Debug, Clone)]
pub struct CorrelationSamples {
    pub dt: f64,
    pub values: Vec<c64>,
    pub remainder: f64,
}

impl CorrelationSamples {
    pub fn tau_max(&self) -> f64 {
        self.dt * (self.values.len() - 1) as f64
    }

    /// Composite Simpson estimate of `∫ f(τ) e^{-iωτ} dτ` over the grid.
    pub fn transform(&self, omega: f64) -> c64 {
        let n = self.values.len() - 1;
        let mut acc = c64::new(0.0, 0.0);
        for (k, f) in self.values.iter().enumerate() {
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            let ph = -omega * self.dt * k as f64;
            acc += f * c64::new(ph.cos(), ph.sin()) * w;
        }
        acc * (self.dt / 3.0)
    }

    /// Transform with the tail check: fails when the remainder bound exceeds
    /// `rel_tol · |S|`.
    pub fn checked_transform(&self, omega: f64, rel_tol: f64) -> Result<c64> {
        let v = self.transform(omega);
        let tolerance = rel_tol * v.norm();
        if self.remainder > tolerance && self.remainder > 0.0 {
            return Err(Error::InconclusiveIntegration { remainder: self.remainder, tolerance });
        }
        Ok(v)
    }
}

/// Tail tolerance used by the time-domain method, relative to `|S|`.
pub const TIME_DOMAIN_TAIL_TOL: f64 = 1e-8;

pub fn correlation_spectrum(l: &Superoperator, rho_ss: &DensityMatrix, o: &OperatorMatrix, omega: f64) -> Result<c64> {
    if omega == 0.0 {
        return Err(Error::Argument("correlation spectrum needs omega != 0".into()));
    }
    SpectralContext::new(l, rho_ss, o, DEFAULT_NULL_THRESHOLD)?.spectrum(omega)
}

#[derive(Debug, Clone, Copy)]
pub struct TimeDomainValue {
    pub value: c64,
    pub remainder: f64,
}

pub fn correlation_time_domain(
    l: &Superoperator,
    rho_ss: &DensityMatrix,
    o: &OperatorMatrix,
    omega: f64,
    tau_max: f64,
    dt: f64,
) -> Result<TimeDomainValue> {
    let ctx = SpectralContext::new(l, rho_ss, o, DEFAULT_NULL_THRESHOLD)?;
    let s = ctx.samples(tau_max, dt)?;
    let value = s.checked_transform(omega, TIME_DOMAIN_TAIL_TOL)?;
    Ok(TimeDomainValue { value, remainder: s.remainder })
}

/// Dot steady state and spectral data for one set of dot parameters. The
/// phonon parameters only enter through `α` and `ω_m`, so one model serves
/// a whole frequency sweep.
#[derive(Debug, Clone)]
pub struct RateModel {
    pub basis: FockBasis,
    pub steady: SteadyStateResult,
    pub ctx: SpectralContext,
}

impl RateModel {
    pub fn new(p: &DotParams, mode: Mode) -> Result<Self> {
        Self::with_threshold(p, mode, DEFAULT_NULL_THRESHOLD)
    }

    pub fn with_threshold(p: &DotParams, mode: Mode, rel_threshold: f64) -> Result<Self> {
        let basis = build_basis(mode.max_electrons())?;
        let l = liouvillian_dots(p, &basis)?;
        let (steady, space) = steady_state_with(&l, &basis, rel_threshold)?;
        let o = coupling_observable(&basis);
        let x = &o * &steady.rho_ss;
        let ctx = SpectralContext::from_space(space, &x, &o);
        Ok(RateModel { basis, steady, ctx })
    }

    pub fn rates(&self, alpha: f64, omega_m: f64) -> Result<RateResult> {
        let plus = self.ctx.spectrum(omega_m)?;
        let minus = self.ctx.spectrum(-omega_m)?;
        let k = 2.0 * alpha * alpha;
        Ok(RateResult { a_plus: k * plus.re, a_minus: k * minus.re, omega_m, method: RateMethod::Resolvent })
    }

    /// Rates from the time-domain oracle on an automatic grid.
    pub fn rates_time_domain(&self, alpha: f64, omega_m: f64) -> Result<RateResult> {
        let (tau, dt) = self.ctx.auto_grid(omega_m)?;
        let s = self.ctx.samples(tau, dt)?;
        let plus = s.checked_transform(omega_m, TIME_DOMAIN_TAIL_TOL)?;
        let minus = s.checked_transform(-omega_m, TIME_DOMAIN_TAIL_TOL)?;
        let k = 2.0 * alpha * alpha;
        Ok(RateResult { a_plus: k * plus.re, a_minus: k * minus.re, omega_m, method: RateMethod::TimeDomain })
    }
}

/// `A± = 2α² Re S(±ω_m)` for the given dot parameters; the mode follows the
/// basis truncation.
pub fn cooling_rates(p: &DotParams, basis: &FockBasis, ph: &PhononParams) -> Result<RateResult> {
    ph.validate()?;
    let mode = Mode::from_max_electrons(basis.max_electrons)?;
    RateModel::new(p, mode)?.rates(ph.alpha, ph.omega_m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_observable_has_no_spectrum() {
        let b = build_basis(2).unwrap();
        let p = DotParams::antisymmetric(10.0, 0.5);
        let l = liouvillian_dots(&p, &b).unwrap();
        let ss = crate::liouville::steady_state(&l, &b).unwrap();
        let id = Mat::<c64>::identity(22, 22);
        for w in [0.3, 5.0, -20.0] {
            assert!(correlation_spectrum(&l, &ss.rho_ss, &id, w).unwrap().re.abs() < 1e-12);
        }
    }

    #[test]
    fn two_level_lorentzian() {
        // One decaying coherence: L acts on |0⟩⟨1| as -(κ + iΔ).
        let (kappa, delta) = (0.7, 3.0);
        let d = 2;
        let mut l = Superoperator::zeros(d);
        let z = c64::new(-kappa, -delta);
        l.matrix[(crate::operator::vec_index(0, 1, d), crate::operator::vec_index(0, 1, d))] = z;
        l.matrix[(crate::operator::vec_index(1, 0, d), crate::operator::vec_index(1, 0, d))] = z.conj();
        let mut rho = Mat::<c64>::zeros(2, 2);
        rho[(0, 0)] = c64::new(1.0, 0.0);
        let o = Mat::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
        for w in [-5.0, -3.0, 0.5, 3.0, 7.0] {
            let s = correlation_spectrum(&l, &rho, &o, w).unwrap();
            let want = kappa / (kappa * kappa + (w - delta) * (w - delta));
            assert!((s.re - want).abs() < 1e-8, "{w}: {} vs {want}", s.re);
            let td = correlation_time_domain(&l, &rho, &o, w, 60.0, 0.002).unwrap();
            assert!((td.value - s).norm() < 1e-8 * s.norm().max(1.0));
        }
    }

    #[test]
    fn undamped_oscillation_is_singular() {
        let d = 2;
        let mut l = Superoperator::zeros(d);
        let idx = crate::operator::vec_index(0, 1, d);
        l.matrix[(idx, idx)] = c64::new(0.0, -2.0);
        l.matrix[(crate::operator::vec_index(1, 0, d), crate::operator::vec_index(1, 0, d))] = c64::new(0.0, 2.0);
        let rho = Mat::<c64>::identity(2, 2) * faer::Scale(c64::new(0.5, 0.0));
        let o = Mat::from_fn(2, 2, |i, j| if i != j { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) });
        let mut r = rho.clone();
        r[(0, 1)] = c64::new(0.1, 0.0);
        r[(1, 0)] = c64::new(0.1, 0.0);
        let err = correlation_spectrum(&l, &r, &o, -2.0).unwrap_err();
        assert_eq!(err.code(), "spectral_singularity");
    }

    #[test]
    fn alpha_scaling_and_identity_shift() {
        let m = RateModel::new(&DotParams::antisymmetric(10.0, 1.0), Mode::TwoElectron).unwrap();
        let a = m.rates(1.0, 20.0).unwrap();
        let b = m.rates(2.0, 20.0).unwrap();
        assert!((b.a_minus - 4.0 * a.a_minus).abs() < 1e-12 * b.a_minus);
        assert!((b.a_plus - 4.0 * a.a_plus).abs() < 1e-12 * b.a_minus);
        assert_eq!(m.rates(0.0, 20.0).unwrap().a_minus, 0.0);

        let basis = &m.basis;
        let o = coupling_observable(basis);
        let shifted = &o + Mat::<c64>::identity(22, 22) * faer::Scale(c64::new(3.5, 0.0));
        let l = liouvillian_dots(&DotParams::antisymmetric(10.0, 1.0), basis).unwrap();
        let s1 = correlation_spectrum(&l, &m.steady.rho_ss, &o, 20.0).unwrap();
        let s2 = correlation_spectrum(&l, &m.steady.rho_ss, &shifted, 20.0).unwrap();
        assert!((s1.re - s2.re).abs() < 1e-10 * s1.re.abs().max(1e-3));
    }
}
