//! Cross-checks between independent computational routes.

use std::f64::consts::PI;

use fadecap::capacity::{cap_per_unit_energy, gauss_markov_cp_closed, information_rate_integral};
use fadecap::real::sinc;
use fadecap::sampling::{cp_kk, i_k, sampled_variance};
use fadecap::toeplitz::{
    build_gram, coherent_divergence, log_det_rate, prediction_trace, subset_search,
    AlphaFunctional, LogDetMethod,
};
use fadecap::{Spectrum, SupportSet, Table, TimeDomain};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gm(rho: f64) -> Spectrum {
    Spectrum::gauss_markov(rho, TimeDomain::Discrete).unwrap()
}

/// An asymmetric band-pass spectrum, so that `R(k)` is genuinely complex.
fn skewed_table() -> Spectrum {
    let t = Table::new(
        TimeDomain::Discrete,
        vec![
            (-PI, 0.0),
            (-2.0, 0.0),
            (-1.0, 0.5),
            (0.4, 3.0),
            (1.2, 0.0),
            (PI, 0.0),
        ],
        true,
    )
    .unwrap();
    Spectrum::tabulated(t)
}

#[test]
fn szego_error_at_4096_is_well_inside_the_acceptance_tolerance() {
    for rho in [0.5, 0.9] {
        for p in [0.1, 1.0, 10.0] {
            let i = gauss_markov_cp_closed(rho, p, TimeDomain::Discrete)
                .unwrap()
                .i_of_p
                .finite()
                .unwrap();
            let trace = prediction_trace(&gm(rho), p, 4095).unwrap();
            let rates = &trace.log_det_rates;
            assert!(rates.windows(2).all(|w| w[1] <= w[0] + 1e-15));
            let err = trace.terminal_rate() - i;
            assert!((0.0..=5e-4).contains(&err), "rho={rho} P={p}: {err:e}");
            // O(1/n) decay: doubling n roughly halves the excess
            let half = rates[2047] - i;
            assert!(
                (half / err - 2.0).abs() < 0.05,
                "rho={rho} P={p}: {}",
                half / err
            );
        }
    }
}

#[test]
fn levinson_and_cholesky_agree_for_complex_generators() {
    let model = skewed_table();
    for n in [1, 5, 64, 300] {
        let g = build_gram(&model, n).unwrap();
        for p in [0.2, 5.0] {
            let a = log_det_rate(&g, p, LogDetMethod::Levinson).unwrap();
            let b = log_det_rate(&g, p, LogDetMethod::Cholesky).unwrap();
            assert!((a - b).abs() <= 1e-10, "n={n} P={p}");
        }
    }
}

#[test]
fn log_det_rate_of_table_tends_to_quadrature() {
    let model = skewed_table();
    let p = 2.0;
    let i = information_rate_integral(&model, p).unwrap().value;
    let trace = prediction_trace(&model, p, 4095).unwrap();
    assert!(trace.terminal_rate() >= i);
    assert!(trace.terminal_rate() - i < 5e-3);
}

#[test]
fn pruned_search_agrees_with_plain_enumeration() {
    // n > 15 enables pruning
    let n = 16;
    for (model, p) in [(skewed_table(), 4.0), (gm(0.3), 0.5)] {
        let alpha = AlphaFunctional::new(&model, p, n).unwrap();
        let mut best = (f64::INFINITY, 0u64);
        for mask in 1u64..1 << n {
            let v = alpha.value_mask(mask).unwrap() / mask.count_ones() as f64;
            if best.1 == 0 || v < best.0 - 1e-12 * best.0.abs().max(1.0) {
                best = (v, mask);
            }
        }
        let found = subset_search(&model, p, n).unwrap();
        assert!(
            (found.value - best.0).abs() < 1e-12,
            "{} {:?} vs {} {:?}",
            found.value,
            found.set,
            best.0,
            SupportSet::from_mask(best.1)
        );
        assert_eq!(found.set.len(), SupportSet::from_mask(best.1).len());
        assert!(found.evaluated < 1 << n || found.pruned == 0);
    }
}

#[test]
fn coherent_identity_for_complex_fading() {
    let model = skewed_table();
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..30 {
        let t = rng.gen_range(1..=8);
        let x: Vec<Complex<f64>> = (0..t)
            .map(|_| Complex::from_polar(rng.gen::<f64>().sqrt() * 1.5, rng.gen::<f64>() * 6.0))
            .collect();
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        let d = coherent_divergence(&x, &model, 2.25).unwrap();
        assert!((d - energy).abs() < 1e-9);
    }
}

#[test]
fn sampled_capacity_at_level_zero_is_a_discrete_capacity() {
    // Band-limited inside |w| < pi: at K = 0 the sampled spectrum is
    // S(w) sinc^2(w), of variance b_0. A unit-variance discrete channel with
    // density S sinc^2 / b_0 and peak P b_0 has capacity c with
    // b_0 c = b_0 - I_0 / P.
    let cont = Table::new(
        TimeDomain::Continuous,
        vec![(-2.0, 0.0), (-0.5, 1.0), (1.0, 2.0), (2.5, 0.0)],
        true,
    )
    .unwrap();
    let model = Spectrum::tabulated(cont);
    let b0 = sampled_variance(&model, 0).unwrap().value;
    let nodes = 40_001;
    let samples: Vec<(f64, f64)> = (0..nodes)
        .map(|i| {
            let w = -PI + 2.0 * PI * i as f64 / (nodes - 1) as f64;
            let s = if (-2.0..=2.5).contains(&w) {
                model.density(w).unwrap()
            } else {
                0.0
            };
            (w, s * sinc(w).powi(2) / b0)
        })
        .collect();
    let discrete = Spectrum::tabulated(Table::new(TimeDomain::Discrete, samples, true).unwrap());
    for p in [0.3, 1.0, 4.0] {
        let sampled = cp_kk(&model, 0, p).unwrap().cp_kk;
        let via_discrete = b0 * cap_per_unit_energy(&discrete, p * b0).unwrap().c_p;
        assert!(
            (sampled - via_discrete).abs() < 1e-7,
            "P={p}: {sampled} vs {via_discrete}"
        );
    }
}

#[test]
fn sampled_clarke_information_rate_converges() {
    let model = Spectrum::clarke(1.0).unwrap();
    let exact = information_rate_integral(&model, 1.0).unwrap().value;
    let sampled = i_k(&model, 8, 1.0).unwrap().value;
    assert!((sampled - exact).abs() < 1e-3);
    // undersampled: the band edges alias into the fundamental band
    let coarse = cp_kk(&model, 1, 1.0).unwrap();
    assert!(coarse.cp_kk.is_finite() && coarse.b_k < 1.0);
}

#[test]
fn continuous_quadrature_matches_closed_form_across_parameters() {
    for rho in [0.01, 0.3, 0.9, 0.9999] {
        for p in [1e-3, 0.7, 50.0] {
            let closed = gauss_markov_cp_closed(rho, p, TimeDomain::Continuous)
                .unwrap()
                .c_p;
            let m = Spectrum::gauss_markov(rho, TimeDomain::Continuous).unwrap();
            let quad = cap_per_unit_energy(&m, p).unwrap().c_p;
            assert!((closed - quad).abs() < 1e-9, "rho={rho} P={p}");
        }
    }
}
