//! Projection of the dot master equation onto selected two-electron dressed
//! states of the antisymmetric charging configuration.

use faer::{c64, Col, Mat};

use super::liouvillian_dots;
use crate::dressed::single_electron_closed_form;
use crate::error::{Error, Result};
use crate::fock::{FockBasis, FockState, Spin, SpinOrbital};
use crate::model::{detunings, DotParams};
use crate::operator::{projector, sandwich, DensityMatrix};
use crate::reference::{OPPOSITE_SPIN_ORDER, PARALLEL_ORDER, W_A_ROWS, W_A_SCALE};

/// `|Φ₁⟩..|Φ₉⟩` from the reference antisymmetric transformation rows, embedded
/// in the full Fock basis.
pub fn phi_states(basis: &FockBasis) -> Result<Vec<Col<c64>>> {
    let idx: Vec<usize> = OPPOSITE_SPIN_ORDER.iter().map(|k| basis.ket(k)).collect::<Result<_>>()?;
    Ok(W_A_ROWS
        .iter()
        .map(|row| {
            let mut v = Col::<c64>::zeros(basis.dim());
            for (b, &i) in idx.iter().enumerate() {
                v[i] = c64::new(row[b] * W_A_SCALE, 0.0);
            }
            v
        })
        .collect())
}

/// Closed-form one-electron dressed states `[φ₋, φ₁, φ₊]` for one spin.
fn single_states(p: &DotParams, basis: &FockBasis, spin: Spin) -> Result<Vec<Col<c64>>> {
    let spec = single_electron_closed_form(p)?;
    let idx: Vec<usize> = (1..=3).map(|d| basis.ket(&[SpinOrbital { dot: d, spin }])).collect::<Result<_>>()?;
    Ok((0..3)
        .map(|k| {
            let mut v = Col::<c64>::zeros(basis.dim());
            for (b, &i) in idx.iter().enumerate() {
                v[i] = spec.vectors[(b, k)];
            }
            v
        })
        .collect())
}

/// `Σ_k w_k |v_k⟩⟨v_k|` over the dressed basis: vacuum, the six one-electron
/// dressed states, `Φ₁..Φ₉`, and the six parallel-spin kets (22 weights).
pub fn dressed_diagonal_state(p: &DotParams, basis: &FockBasis, weights: &[f64]) -> Result<DensityMatrix> {
    let mut vs = Vec::with_capacity(22);
    let mut vac = Col::<c64>::zeros(basis.dim());
    vac[basis.index_of(FockState::VACUUM).expect("vacuum")] = c64::new(1.0, 0.0);
    vs.push(vac);
    for s in Spin::BOTH {
        vs.extend(single_states(p, basis, s)?);
    }
    vs.extend(phi_states(basis)?);
    for s in Spin::BOTH {
        for pair in PARALLEL_ORDER {
            let orbs = pair.map(|o| SpinOrbital { dot: o.dot, spin: s });
            let mut v = Col::<c64>::zeros(basis.dim());
            v[basis.ket(&orbs)?] = c64::new(1.0, 0.0);
            vs.push(v);
        }
    }
    if weights.len() != vs.len() || weights.iter().any(|&w| w < 0.0) {
        return Err(Error::Argument(format!("need {} nonnegative weights", vs.len())));
    }
    let total: f64 = weights.iter().sum();
    let d = basis.dim();
    let mut rho = Mat::<c64>::zeros(d, d);
    for (w, v) in weights.iter().zip(&vs) {
        rho += projector(v) * faer::Scale(c64::new(w / total, 0.0));
    }
    Ok(rho)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RateCheckReport {
    /// Max residual of the `ρ₇₇` row over the random states.
    pub rho77: f64,
    /// Max residual of the `ρ₂₂` row over the dressed-diagonal states.
    pub rho22: f64,
    /// Max residual of the `ρ₃₃` row over the dressed-diagonal states.
    pub rho33: f64,
    /// Same rows on the random states; nonzero because coherences feed them.
    pub rho22_random: f64,
    pub rho33_random: f64,
}

impl RateCheckReport {
    pub fn max_checked(&self) -> f64 {
        self.rho77.max(self.rho22).max(self.rho33)
    }
}

/// Compares `⟨Φ_k| L(ρ) |Φ_k⟩` (k = 7, 2, 3) with the closed rate expressions.
///
/// The `ρ₇₇` row includes the `δu` coherence term
/// `-(δu/3)[Im ρ₁₇ - 2 Im ρ₅₇ - 2 Im ρ₆₇]`, `ρ_k7 = ⟨Φ_k|ρ|Φ₇⟩`, and is
/// checked on arbitrary states. The `ρ₂₂`, `ρ₃₃` rows omit coherence
/// feeding, so they are checked on states diagonal in the dressed basis.
pub fn dressed_rate_check(
    p: &DotParams,
    basis: &FockBasis,
    random_states: &[DensityMatrix],
    diagonal_states: &[DensityMatrix],
) -> Result<RateCheckReport> {
    let d = detunings(p);
    let t = p.t1;
    let ok = basis.max_electrons == 2
        && p.t1 == p.t2
        && p.gamma[0] == p.gamma[1]
        && d.delta1_e == 0.0
        && d.delta2_e == 0.0
        && (d.delta33 - 2.0 * t).abs() < 1e-12 * t.abs().max(1.0)
        && d.delta_w.is_some_and(|w| (w - t).abs() < 1e-12 * t.abs().max(1.0))
        && d.delta_u.is_some();
    if !ok {
        return Err(Error::Precondition(
            "dressed rate check needs the antisymmetric two-electron setup (T1 = T2, E equal, Gamma1 = Gamma2, delta33 = 2T, delta_w = T)".into(),
        ));
    }
    let du = d.delta_u.unwrap_or(0.0);
    let (g, g3) = (p.gamma[0], p.gamma[2]);
    let l = liouvillian_dots(p, basis)?;
    let phi = phi_states(basis)?;
    let up = single_states(p, basis, Spin::Up)?;
    let down = single_states(p, basis, Spin::Down)?;
    let pop = |rho: &DensityMatrix, v: &Col<c64>| sandwich(v, rho, v).re;
    let (a, b) = ((1.0 + 2f64.sqrt()).powi(2), (2f64.sqrt() - 1.0).powi(2));

    let rows = |rho: &DensityMatrix| -> [f64; 3] {
        let dr = l.apply(rho);
        let coh = |k: usize| sandwich(&phi[k], rho, &phi[6]).im;
        let e77 = g * (pop(rho, &down[1]) + pop(rho, &up[1])) - du / 3.0 * (coh(0) - 2.0 * coh(4) - 2.0 * coh(5));
        let e22 = -2.0 / 3.0 * g3 * pop(rho, &phi[1])
            + g / 6.0 * (2.0 * pop(rho, &down[1]) + a * pop(rho, &up[2]) + b * pop(rho, &up[0]));
        let e33 = -2.0 / 3.0 * g3 * pop(rho, &phi[2])
            + g / 6.0 * (2.0 * pop(rho, &up[1]) + a * pop(rho, &down[2]) + b * pop(rho, &down[0]));
        [
            (sandwich(&phi[6], &dr, &phi[6]) - c64::new(e77, 0.0)).norm(),
            (sandwich(&phi[1], &dr, &phi[1]) - c64::new(e22, 0.0)).norm(),
            (sandwich(&phi[2], &dr, &phi[2]) - c64::new(e33, 0.0)).norm(),
        ]
    };
    let mut rep = RateCheckReport::default();
    for rho in random_states {
        let [r7, r2, r3] = rows(rho);
        rep.rho77 = rep.rho77.max(r7);
        rep.rho22_random = rep.rho22_random.max(r2);
        rep.rho33_random = rep.rho33_random.max(r3);
    }
    for rho in diagonal_states {
        let [r7, r2, r3] = rows(rho);
        rep.rho77 = rep.rho77.max(r7);
        rep.rho22 = rep.rho22.max(r2);
        rep.rho33 = rep.rho33.max(r3);
    }
    Ok(rep)
}
