use faer::{c64, Mat};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tqd_cooling::cooling::{
    distribution_evolution, effective_temperature, steady_phonon_number, PhononDistribution,
};
use tqd_cooling::fock::build_basis;
use tqd_cooling::liouville::{liouvillian_dots, steady_state};
use tqd_cooling::model::{coupling_observable, DotParams, Mode, PhononParams};
use tqd_cooling::operator::{hermiticity_defect, random_density_matrix, trace};
use tqd_cooling::spectrum::{correlation_spectrum, RateMethod, RateModel, RateResult};

fn two_electron() -> impl Strategy<Value = DotParams> {
    (3.0..15.0f64, 0.0..3.0f64, 0.0..1.5f64, -2.0..2.0f64, 0.2..3.0f64)
        .prop_map(|(t, d33, dw, du, g3)| DotParams::two_electron(t, d33 * t, dw * t, du, g3))
}

fn single_electron() -> impl Strategy<Value = DotParams> {
    (1.0..15.0f64, 1.0..15.0f64, -5.0..5.0f64, 0.2..3.0f64).prop_map(|(a, b, d, g)| DotParams::single_electron(a, b, d, g))
}

fn rates(a_plus: f64, a_minus: f64) -> RateResult {
    RateResult { a_plus, a_minus, omega_m: 1.0, method: RateMethod::Resolvent }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generator_preserves_trace_and_hermiticity(p in two_electron(), seed in any::<u64>()) {
        let b = build_basis(2).unwrap();
        let l = liouvillian_dots(&p, &b).unwrap();
        let rho = random_density_matrix(&mut ChaCha8Rng::seed_from_u64(seed), b.dim());
        let d = l.apply(&rho);
        prop_assert!(trace(&d).norm() < 1e-10);
        prop_assert!(hermiticity_defect(&d) < 1e-10);
    }

    #[test]
    fn spectrum_is_nonnegative(p in two_electron(), w in 0.5..35.0f64, sign in any::<bool>()) {
        let m = RateModel::new(&p, Mode::TwoElectron).unwrap();
        let w = if sign { w } else { -w };
        if let Ok(s) = m.ctx.spectrum(w) {
            prop_assert!(s.re >= -1e-8, "Re S({w}) = {}", s.re);
        }
    }

    #[test]
    fn single_electron_spectrum_is_nonnegative(p in single_electron(), w in 0.5..35.0f64, sign in any::<bool>()) {
        let m = RateModel::new(&p, Mode::SingleElectron).unwrap();
        let w = if sign { w } else { -w };
        if let Ok(s) = m.ctx.spectrum(w) {
            prop_assert!(s.re >= -1e-8, "Re S({w}) = {}", s.re);
        }
    }

    #[test]
    fn rates_scale_as_alpha_squared(p in single_electron(), alpha in 0.1..4.0f64, w in 2.0..30.0f64) {
        let m = RateModel::new(&p, Mode::SingleElectron).unwrap();
        let (a, b) = (m.rates(alpha, w).unwrap(), m.rates(2.0 * alpha, w).unwrap());
        let scale = b.a_minus.abs().max(b.a_plus.abs()).max(1e-300);
        prop_assert!((b.a_minus - 4.0 * a.a_minus).abs() <= 1e-12 * scale);
        prop_assert!((b.a_plus - 4.0 * a.a_plus).abs() <= 1e-12 * scale);
    }

    #[test]
    fn identity_shift_leaves_spectrum(p in two_electron(), shift in -5.0..5.0f64, w in 2.0..30.0f64) {
        let b = build_basis(2).unwrap();
        let l = liouvillian_dots(&p, &b).unwrap();
        let ss = steady_state(&l, &b).unwrap();
        let o = coupling_observable(&b);
        let o2 = Mat::from_fn(22, 22, |i, j| o[(i, j)] + if i == j { c64::new(shift, 0.0) } else { c64::new(0.0, 0.0) });
        let (s1, s2) = (correlation_spectrum(&l, &ss.rho_ss, &o, w), correlation_spectrum(&l, &ss.rho_ss, &o2, w));
        if let (Ok(s1), Ok(s2)) = (s1, s2) {
            prop_assert!((s1.re - s2.re).abs() < 1e-9 * s1.norm().max(1e-3));
        }
    }

    #[test]
    fn steady_number_is_monotone(ap in 0.0..1.0f64, am in 1.1..10.0f64, nbar in 0.0..50.0f64, d in 1e-3..1.0f64) {
        let ph = PhononParams { omega_m: 1.0, gamma_p: 2e-4, nbar_p: nbar, alpha: 1.0 };
        let n = steady_phonon_number(&rates(ap, am), &ph).unwrap();
        prop_assert!(steady_phonon_number(&rates(ap, am + d), &ph).unwrap() < n);
        prop_assert!(steady_phonon_number(&rates(ap + d * 0.05, am), &ph).unwrap() > n);
        let hotter = PhononParams { nbar_p: nbar + d, ..ph };
        prop_assert!(steady_phonon_number(&rates(ap, am), &hotter).unwrap() > n);
    }

    #[test]
    fn chain_conserves_probability(ap in 0.0..0.5f64, am in 0.0..2.0f64, nbar in 0.0..5.0f64, k in 0usize..20) {
        let ph = PhononParams { omega_m: 1.0, gamma_p: 0.05, nbar_p: nbar, alpha: 1.0 };
        let out = distribution_evolution(&rates(ap, am), &ph, &PhononDistribution::fock(k, 64).unwrap(), 1.0, 1e-3).unwrap();
        prop_assert!((out.total() - 1.0).abs() < 1e-10);
        prop_assert!(out.p.iter().all(|&x| x > -1e-12));
    }

    #[test]
    fn temperature_increases_with_occupation(n in 1e-6..100.0f64, f in 1.001..3.0f64) {
        let w = 2.0 * std::f64::consts::PI * 1e8;
        prop_assert!(effective_temperature(n * f, w).unwrap() > effective_temperature(n, w).unwrap());
    }
}
