//! Phonon-number rate model driven by the rates `A±`.

use crate::error::{Error, Result};
use crate::model::{PhononParams, HBAR, K_B};
use crate::spectrum::RateResult;

/// Default truncation for the birth-death chain; doubled on overflow.
pub const DEFAULT_N_MAX: usize = 256;
/// Largest truncation tried before giving up.
pub const MAX_N_MAX: usize = 1 << 16;
/// Tail probability above which the truncation is deemed inadequate.
pub const TAIL_THRESHOLD: f64 = 1e-6;

fn denominator(rates: &RateResult, ph: &PhononParams) -> f64 {
    ph.gamma_p + rates.a_minus - rates.a_plus
}

/// `⟨n⟩ₛ = (γ_p n̄_p + A₊)/(γ_p + A₋ − A₊)`.
pub fn steady_phonon_number(rates: &RateResult, ph: &PhononParams) -> Result<f64> {
    let d = denominator(rates, ph);
    if !(d > 0.0) {
        return Err(Error::HeatingInstability { denominator: d });
    }
    Ok((ph.gamma_p * ph.nbar_p + rates.a_plus) / d)
}

/// Relaxation rate of `⟨n⟩`, in units of Γ.
pub fn relaxation_rate(rates: &RateResult, ph: &PhononParams) -> f64 {
    denominator(rates, ph)
}

/// `⟨n⟩(t)` at each requested time; exact solution of the linear mean equation.
pub fn phonon_mean_evolution(rates: &RateResult, ph: &PhononParams, n0: f64, times: &[f64]) -> Vec<f64> {
    let k = denominator(rates, ph);
    let src = ph.gamma_p * ph.nbar_p + rates.a_plus;
    times
        .iter()
        .map(|&t| {
            if k == 0.0 {
                n0 + src * t
            } else {
                let e = (-k * t).exp();
                n0 * e + src / k * (-(-k * t).exp_m1())
            }
        })
        .collect()
}

/// `1/rate` converted to seconds, with `Γ = 2π · gamma_over_2pi_mhz · 10⁶ s⁻¹`.
pub fn cooling_time_seconds(rate_over_gamma: f64, gamma_over_2pi_mhz: f64) -> Result<f64> {
    if !(rate_over_gamma > 0.0 && gamma_over_2pi_mhz > 0.0) {
        return Err(Error::Domain(format!(
            "cooling time needs positive rate and Γ (got {rate_over_gamma}, {gamma_over_2pi_mhz})"
        )));
    }
    Ok(1.0 / (rate_over_gamma * 2.0 * std::f64::consts::PI * gamma_over_2pi_mhz * 1e6))
}

/// `T = ħω / (k_B ln(1 + 1/n))` in kelvin.
pub fn effective_temperature(n_ss: f64, omega_m_absolute: f64) -> Result<f64> {
    if !(n_ss > 0.0) {
        return Err(Error::Domain(format!("effective temperature needs n_ss > 0, got {n_ss}")));
    }
    if !(omega_m_absolute > 0.0) {
        return Err(Error::Domain(format!("omega_m must be > 0, got {omega_m_absolute}")));
    }
    Ok(HBAR * omega_m_absolute / (K_B * (1.0 / n_ss).ln_1p()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhononDistribution {
    pub p: Vec<f64>,
}

impl PhononDistribution {
    pub fn n_max(&self) -> usize {
        self.p.len() - 1
    }

    pub fn fock(n: usize, n_max: usize) -> Result<Self> {
        if n > n_max {
            return Err(Error::Argument(format!("Fock level {n} beyond N_max = {n_max}")));
        }
        let mut p = vec![0.0; n_max + 1];
        p[n] = 1.0;
        Ok(PhononDistribution { p })
    }

    /// Geometric law with mean `nbar`, truncated and renormalized.
    pub fn thermal(nbar: f64, n_max: usize) -> Self {
        let r = nbar / (1.0 + nbar);
        let mut p: Vec<f64> = (0..=n_max).map(|n| r.powi(n as i32)).collect();
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        PhononDistribution { p }
    }

    pub fn mean(&self) -> f64 {
        self.p.iter().enumerate().map(|(n, x)| n as f64 * x).sum()
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    pub fn tail(&self) -> f64 {
        *self.p.last().unwrap()
    }

    fn padded(&self, n_max: usize) -> Self {
        let mut p = self.p.clone();
        p.resize(n_max + 1, 0.0);
        PhononDistribution { p }
    }
}

/// Down and up transition rates of the chain, per phonon.
pub fn chain_rates(rates: &RateResult, ph: &PhononParams) -> (f64, f64) {
    ((ph.nbar_p + 1.0) * ph.gamma_p + rates.a_minus, ph.nbar_p * ph.gamma_p + rates.a_plus)
}

fn chain_derivative(p: &[f64], down: f64, up: f64, out: &mut [f64]) {
    let last = p.len() - 1;
    for n in 0..=last {
        let nf = n as f64;
        let mut d = -(down * nf) * p[n];
        if n < last {
            d += down * (nf + 1.0) * p[n + 1] - up * (nf + 1.0) * p[n];
        }
        if n > 0 {
            d += up * nf * p[n - 1];
        }
        out[n] = d;
    }
}

/// RK4 integration of the birth-death chain. Starts at the larger of
/// `p0`'s truncation and [`DEFAULT_N_MAX`] and doubles it while the top level
/// carries more than [`TAIL_THRESHOLD`].
pub fn distribution_evolution(
    rates: &RateResult,
    ph: &PhononParams,
    p0: &PhononDistribution,
    t: f64,
    dt: f64,
) -> Result<PhononDistribution> {
    if !(dt > 0.0 && t >= 0.0) {
        return Err(Error::Argument(format!("need t >= 0 and dt > 0 (got {t}, {dt})")));
    }
    let (down, up) = chain_rates(rates, ph);
    let mut n_max = p0.n_max().max(DEFAULT_N_MAX);
    loop {
        let out = integrate_chain(&p0.padded(n_max), down, up, t, dt)?;
        let tail = out.tail();
        if tail < TAIL_THRESHOLD {
            return Ok(out);
        }
        if n_max >= MAX_N_MAX {
            return Err(Error::TruncationOverflow { n_max, tail });
        }
        n_max *= 2;
    }
}

fn integrate_chain(p0: &PhononDistribution, down: f64, up: f64, t: f64, dt: f64) -> Result<PhononDistribution> {
    let steps = (t / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t / steps as f64 };
    let n = p0.p.len();
    // RK4 is stable for h·λ_max ≲ 2.78; refuse steps beyond that.
    let lam = (down + up) * n as f64;
    if h * lam > 2.7 {
        return Err(Error::IntegratorInstability { min_eigenvalue: -h * lam });
    }
    let mut p = p0.p.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    for _ in 0..steps {
        chain_derivative(&p, down, up, &mut k1);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k1[i];
        }
        chain_derivative(&tmp, down, up, &mut k2);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k2[i];
        }
        chain_derivative(&tmp, down, up, &mut k3);
        for i in 0..n {
            tmp[i] = p[i] + h * k3[i];
        }
        chain_derivative(&tmp, down, up, &mut k4);
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(PhononDistribution { p })
}

/// Minimum of sampled `(x, y)` data: grid argmin refined by the vertex of the
/// parabola through its neighbours. Returns `(x_grid, x_refined, y_min)`.
pub fn locate_minimum(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let (k, &ymin) = y
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())?;
    if k == 0 || k + 1 == x.len() || !y[k - 1].is_finite() || !y[k + 1].is_finite() {
        return Some((x[k], x[k], ymin));
    }
    let (x0, x1, x2) = (x[k - 1], x[k], x[k + 1]);
    let (y0, y1, y2) = (y[k - 1], y[k], y[k + 1]);
    let num = (x1 - x0).powi(2) * (y1 - y2) - (x1 - x2).powi(2) * (y1 - y0);
    let den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
    if den == 0.0 {
        return Some((x1, x1, ymin));
    }
    let xr = (x1 - 0.5 * num / den).clamp(x0, x2);
    Some((x1, xr, ymin))
}
