use proptest::prelude::*;

use stencil_spectra::oracle::{exactness_check, solve_moment_system, MomentSystem};
use stencil_spectra::signal::{differentiate, SampledSignal};
use stencil_spectra::spectra::{dft_spectrum, EmbeddingMode, FilterTaps};
use stencil_spectra::weights::half_point;
use stencil_spectra::{RationalWeight, Stencil, StencilKind};

fn kind() -> impl Strategy<Value = StencilKind> {
    prop::sample::select(StencilKind::ALL.to_vec())
}

fn taps(min_index: u64) -> impl Strategy<Value = Vec<(u64, f64)>> {
    prop::collection::btree_map(min_index..12u64, -4.0..4.0f64, 1..6).prop_map(|m| m.into_iter().collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_display_round_trips(numer in any::<i64>(), denom in 1..i64::MAX) {
        let w = RationalWeight::new(numer, denom);
        let text = w.to_string();
        prop_assert_eq!(text.parse::<RationalWeight>().unwrap(), w.clone());
        let json = serde_json::to_string(&w).unwrap();
        prop_assert_eq!(serde_json::from_str::<RationalWeight>(&json).unwrap(), w);
    }

    #[test]
    fn stencil_json_round_trips(kind in kind(), n in 1..10u32) {
        let s = Stencil::generate(kind, n).unwrap();
        prop_assert_eq!(Stencil::from_json(&s.to_json()).unwrap(), s);
    }

    #[test]
    fn solver_satisfies_moment_conditions(n in 1..9u32, l_frac in 0.0..1.0f64) {
        let l = ((f64::from(n) + 1.0) * l_frac) as u32;
        let l = l.min(n);
        let w = solve_moment_system(&MomentSystem::one_sided(n, l).unwrap()).unwrap();
        for k in 0..=n {
            let sum: RationalWeight = w
                .iter()
                .enumerate()
                .map(|(m, a)| a * &RationalWeight::from(num_bigint::BigInt::from(m).pow(k)))
                .sum();
            let expect = if k == l { RationalWeight::one() } else { RationalWeight::zero() };
            prop_assert_eq!(sum, expect);
        }
    }

    #[test]
    fn exactness_degree_matches_family(kind in kind(), n in 1..11u32) {
        let s = Stencil::generate(kind, n).unwrap();
        let report = exactness_check(&s, kind.exactness_degree(n) + 2);
        prop_assert_eq!(report.max_exact_degree, i64::from(kind.exactness_degree(n)));
    }

    #[test]
    fn spectrum_is_conjugate_symmetric(taps in taps(0), half in 12..64usize) {
        let len = 2 * half;
        let taps = FilterTaps::from_values(taps).unwrap();
        let tol = 1e-12 * taps.abs_sum().max(1.0);
        for mode in [EmbeddingMode::HalfSequence, EmbeddingMode::FullSymmetric] {
            let s = dft_spectrum(&taps, len, mode).unwrap();
            for r in 1..len {
                prop_assert!((s.b(len - r) - s.b(r).conj()).norm() <= tol);
            }
        }
    }

    #[test]
    fn antisymmetric_embedding_is_imaginary(taps in taps(1), half in 12..64usize) {
        let len = 2 * half;
        let taps = FilterTaps::from_values(taps).unwrap();
        let tol = 1e-12 * taps.abs_sum();
        let s = dft_spectrum(&taps, len, EmbeddingMode::FullAntisymmetric).unwrap();
        for r in 0..len {
            prop_assert!(s.b(r).re.abs() <= tol);
        }
    }

    #[test]
    fn half_point_spectrum_is_mirror_symmetric(n in 1..12u32, quarter in 25..200usize) {
        let len = 4 * quarter;
        let s = dft_spectrum(&FilterTaps::from_stencil(&half_point(n).unwrap()), len, EmbeddingMode::HalfSequence).unwrap();
        for r in 0..=len / 2 {
            prop_assert!((s.im_conj(r) - s.im_conj(len / 2 - r)).abs() <= 1e-12 * f64::from(n));
        }
    }

    #[test]
    fn differentiate_is_linear(
        f in prop::collection::vec(-10.0..10.0f64, 40),
        g in prop::collection::vec(-10.0..10.0f64, 40),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        n in 1..5u32,
        order in 1..3u32,
    ) {
        let h = 0.1;
        let combined: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y).collect();
        let df = differentiate(&SampledSignal::new(h, f.clone(), 0).unwrap(), n, order).unwrap();
        let dg = differentiate(&SampledSignal::new(h, g.clone(), 0).unwrap(), n, order).unwrap();
        let dc = differentiate(&SampledSignal::new(h, combined, 0).unwrap(), n, order).unwrap();
        let scale = 1e-10 / h.powi(order as i32) * 100.0;
        for i in 0..40 {
            match (df.values[i], dg.values[i], dc.values[i]) {
                (Some(x), Some(y), Some(z)) => prop_assert!((a * x + b * y - z).abs() <= scale, "index {}", i),
                (None, None, None) => {}
                other => prop_assert!(false, "mismatched coverage {:?}", other),
            }
        }
    }

    #[test]
    fn differentiate_commutes_with_shifts(
        f in prop::collection::vec(-10.0..10.0f64, 48),
        shift in 1..8usize,
        n in 1..5u32,
        order in 1..3u32,
    ) {
        let full = differentiate(&SampledSignal::new(0.25, f.clone(), 0).unwrap(), n, order).unwrap();
        let shifted = differentiate(&SampledSignal::new(0.25, f[shift..].to_vec(), 0).unwrap(), n, order).unwrap();
        let reach = n as usize;
        for i in reach..f.len() - shift - reach {
            prop_assert_eq!(shifted.values[i], full.values[i + shift]);
        }
    }
}
