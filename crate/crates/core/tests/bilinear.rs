use mbkdv::bilinear::*;
use mbkdv::diophantine::theta_subsequence;
use mbkdv::resonance::{c_roots, Alpha};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn half() -> Alpha {
    Alpha::ratio(1, 2)
}

#[test]
fn mean_break_ratio_is_linear_in_n() {
    // ratio / N at the zero-frequency spike, by b
    let expected = [(0.0, 0.7833936678835930), (0.5, 0.6314160545661034), (1.0, 0.5286778715556366), (2.0, 0.4038200862913567)];
    for (b, c) in expected {
        for n in [10, 100, 1000] {
            let family = SpikeFamily::mean_break(n);
            let ratio = spike_ratio(&half(), &family.case_id.weights(0.3, b), &family).unwrap();
            assert!((ratio / n as f64 - c).abs() < 1e-12, "b = {b}, N = {n}: {}", ratio / n as f64);
        }
    }
}

#[test]
fn weights_must_match_family() {
    let family = SpikeFamily::mean_break(16);
    let err = spike_ratio(&half(), &WeightSpec::first_form(0.0, 0.5), &family).unwrap_err();
    assert_eq!(err, BilinearError::InconsistentFamily { case: CaseId::P2_MeanBreak });
}

#[test]
fn rational_family_is_exactly_resonant() {
    let alpha = Alpha::ratio(12, 7);
    let ns = resonant_frequencies(&alpha, 96).unwrap();
    assert_eq!(ns, (1..=16).map(|j| 6 * j).collect::<Vec<_>>());
    for n in ns {
        let family = SpikeFamily::rational(&alpha, n).unwrap();
        assert!(family.modulation_offset(&alpha).is_zero());
        assert_eq!(family.output_frequency(), n as i64);
    }
    assert_eq!(SpikeFamily::rational(&alpha, 7).unwrap_err(), BilinearError::NotResonant(7));
}

#[test]
fn shifting_preserves_the_offset() {
    let alpha = half();
    let c = BigRational::new(BigInt::from(17), BigInt::from(3));
    for family in [SpikeFamily::nearest_pair(&alpha, 91).unwrap(), SpikeFamily::low_high(40), SpikeFamily::mean_break(40)] {
        let before = family.modulation_offset(&alpha);
        assert_eq!(family.shifted(&c).modulation_offset(&alpha), before);
    }
}

#[test]
fn threshold_at_half_crosses_below_one() {
    let c1 = c_roots(&half()).unwrap().0;
    let ns: Vec<u64> = theta_subsequence(&c1, 100_000).unwrap().iter().map(|w| w.n).filter(|&n| n >= 15).collect();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let scan = threshold_scan(&half(), 0.5, &grid, &ns).unwrap();
    match scan.estimate {
        ThresholdEstimate::Crossing(s) => assert!(s > 0.4 && s < 0.6, "{s}"),
        other => panic!("{other:?}"),
    }
    assert_eq!(scan.rows.len(), grid.len() * ns.len());
}

#[test]
fn threshold_at_rational_root_stays_positive() {
    let alpha = Alpha::ratio(12, 7);
    let ns = resonant_frequencies(&alpha, 96).unwrap();
    let grid: Vec<f64> = (0..=19).map(|i| i as f64 * 0.05).collect();
    let scan = threshold_scan(&alpha, 0.5, &grid, &ns).unwrap();
    assert!(scan.slopes.iter().all(|(_, m)| *m > 0.0));
    assert!(matches!(scan.estimate, ThresholdEstimate::AtLeast(s) if (s - 0.95).abs() < 1e-12));
}

#[test]
fn threshold_scan_needs_four_frequencies() {
    let err = threshold_scan(&half(), 0.5, &[0.0], &[15, 19, 72]).unwrap_err();
    assert_eq!(err, BilinearError::InsufficientWitnesses { found: 3, needed: 4 });
    assert!(threshold_scan(&half(), 0.5, &[], &[15, 19, 72, 91]).is_err());
}

#[test]
fn omega_measure_respects_bound() {
    for lambda in [1.0, 2.0] {
        for xi in [16.0, 32.0, 64.0] {
            for e in 0..=20 {
                let m = 2f64.powi(e);
                let c = omega_count(&half(), lambda, xi, m, 1.0).unwrap();
                assert!(c.measure >= 0.0 && c.measure <= c.bound, "lambda {lambda} xi {xi} M {m}");
            }
        }
    }
}

#[test]
fn omega_requires_frequency_above_cutoff() {
    let err = omega_count(&half(), 1.0, 1.0, 4.0, 1.0).unwrap_err();
    assert!(matches!(err, BilinearError::XiBelowCutoff { .. }));
    assert!(omega_count(&half(), 0.0, 16.0, 4.0, 1.0).is_err());
    assert!(omega_count(&half(), 1.0, 16.0, 0.5, 1.0).is_err());
}

#[test]
fn rectangle_validation() {
    assert!(Rectangle::new((0.0, 0.0), (0.0, 1.0)).is_err());
    let r = Rectangle::new((0.0, 0.0), (1.0, 2.0)).unwrap();
    let s = Rectangle::new((3.0, -1.0), (2.0, 1.0)).unwrap();
    assert_eq!(r.area(), 8.0);
    assert_eq!(rect_conv_lower_bound(&r, &s, 11).unwrap_err(), BilinearError::DimensionMismatch);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn rectangle_convolution_lower_bound(
        cx in -10.0f64..10.0, ct in -10.0f64..10.0,
        dx in -10.0f64..10.0, dt in -10.0f64..10.0,
        hx in 0.01f64..5.0, ht in 0.01f64..5.0,
    ) {
        let r = Rectangle::new((cx, ct), (hx, ht)).unwrap();
        let s = Rectangle::new((dx, dt), (hx, ht)).unwrap();
        let check = rect_conv_lower_bound(&r, &s, 21).unwrap();
        prop_assert!(check.holds);
        prop_assert!(check.equality_at_corners);
    }

    #[test]
    fn modulation_margin_is_nonnegative(n in 2u64..2000, num in 1i64..=40, den in 1i64..=10) {
        prop_assume!(num < 4 * den);
        let alpha = Alpha::ratio(num, den);
        for family in [SpikeFamily::nearest_pair(&alpha, n).unwrap(), SpikeFamily::low_high(n), SpikeFamily::nearest_dual(&alpha, n).unwrap()] {
            prop_assert!(max_modulation_margin(&alpha, &family, 9) >= -1e-9);
        }
    }

    #[test]
    fn ratio_is_positive_and_finite(n in 2u64..500, s in -1.0f64..1.0, b in 0.0f64..1.0) {
        let alpha = half();
        for family in [SpikeFamily::nearest_pair(&alpha, n).unwrap(), SpikeFamily::low_high(n), SpikeFamily::mean_break(n)] {
            let r = spike_ratio(&alpha, &family.case_id.weights(s, b), &family).unwrap();
            prop_assert!(r.is_finite() && r > 0.0);
        }
    }
}
