use mbkdv::picard::*;
use mbkdv::resonance::Alpha;
use proptest::prelude::*;

fn rational() -> Alpha {
    Alpha::ratio(12, 7)
}

#[test]
fn closed_form_at_first_resonance() {
    let c = picard_closed_form(&rational(), 0.0, 12, 0.01, PicardMode::RationalCase).unwrap();
    assert_eq!((c.k1, c.k2), (10, 2));
    assert_eq!(c.gap, 0.0);
    assert!((c.phi2_norm - 0.21269446210866).abs() < 1e-13);
    assert!((c.psi3_norm - 0.016267998190878).abs() < 1e-14);
}

#[test]
fn quadrature_reproduces_resonant_channel() {
    let alpha = rational();
    for n in [6, 12] {
        let closed = picard_closed_form(&alpha, 0.0, n, 0.01, PicardMode::RationalCase).unwrap();
        let quad = picard_quadrature(&alpha, 0.0, n, 0.01, &QuadratureOptions::default()).unwrap();
        assert!(((quad.phi2_resonant_norm - closed.phi2_norm) / closed.phi2_norm).abs() < 1e-10);
        assert!(((quad.psi3_resonant_norm - closed.psi3_norm) / closed.psi3_norm).abs() < 1e-10);
        assert!(quad.phi2_norm >= quad.phi2_resonant_norm);
        assert_eq!(quad.psi2_max, 0.0);
    }
}

#[test]
fn coarse_quadrature_is_refused() {
    let opts = QuadratureOptions { order: 4, panels: Some(1) };
    let err = picard_quadrature(&rational(), 0.0, 48, 0.1, &opts).unwrap_err();
    assert!(matches!(err, PicardError::QuadratureUnderResolved { .. }));
}

#[test]
fn rational_growth_exponents() {
    let alpha = rational();
    let ns = resonant_multiples(&alpha, 96).unwrap();
    assert_eq!(ns.len(), 16);
    for (s, phi_slope, psi_slope) in [(0.0, 1.0, 2.0), (0.5, 0.5, 1.0)] {
        let report = picard_scan(&alpha, s, &ns, 0.01, PicardMode::RationalCase).unwrap();
        let (phi, psi) = report.fitted_slopes.unwrap();
        assert!((phi.slope - phi_slope).abs() < 0.05, "s = {s}: {}", phi.slope);
        assert!((psi.slope - psi_slope).abs() < 0.05, "s = {s}: {}", psi.slope);
    }
}

#[test]
fn nonresonant_frequency_is_rejected_in_rational_mode() {
    let err = picard_closed_form(&rational(), 0.0, 7, 0.01, PicardMode::RationalCase).unwrap_err();
    assert_eq!(err, PicardError::NotRationalResonance(7));
    assert!(picard_closed_form(&rational(), 0.0, 7, 0.01, PicardMode::NearestInteger).unwrap().gap > 0.0);
}

#[test]
fn time_window_is_enforced() {
    for t in [-0.01, 0.2] {
        let err = picard_closed_form(&rational(), 0.0, 12, t, PicardMode::RationalCase).unwrap_err();
        assert_eq!(err, PicardError::TimeOutOfRange(t));
    }
}

#[test]
fn irrational_root_has_no_resonant_multiples() {
    assert!(resonant_multiples(&Alpha::ratio(1, 2), 1000).unwrap().is_empty());
}

#[test]
fn growth_fit_on_exact_power_law() {
    let data: Vec<(f64, f64)> = [10.0, 20.0, 40.0, 80.0, 160.0].iter().map(|&n: &f64| (n, 3.0 * n.powf(1.25))).collect();
    let fit = growth_fit(&data).unwrap();
    assert!((fit.slope - 1.25).abs() < 1e-12);
    assert!((fit.intercept - 3f64.ln()).abs() < 1e-10);
    assert!(fit.half_width < 1e-10);
    assert!(matches!(growth_fit(&data[..3]), Err(PicardError::InsufficientEntries { found: 3, needed: 4 })));
    let mut zero = data.clone();
    zero[2].1 = 0.0;
    assert_eq!(growth_fit(&zero).unwrap_err(), PicardError::DegenerateFit);
}

#[test]
fn least_squares_reports_scatter() {
    let xs = [0.0, 1.0, 2.0, 3.0];
    let ys = [0.1, 0.9, 2.1, 2.9];
    let fit = least_squares(&xs, &ys);
    assert!((fit.slope - 0.96).abs() < 1e-12);
    assert!(fit.slope_std_err > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn phi2_norm_scales_with_weight(j in 1u64..=40, s in -1.0f64..1.0) {
        // data of size N^-s, phi2 supported on +-N, so H^s changes by ((1 + N) / N^2)^s
        let n = 6 * j;
        let alpha = rational();
        let base = picard_closed_form(&alpha, 0.0, n, 0.01, PicardMode::RationalCase).unwrap();
        let weighted = picard_closed_form(&alpha, s, n, 0.01, PicardMode::RationalCase).unwrap();
        let expect = base.phi2_norm * ((1.0 + n as f64) / (n * n) as f64).powf(s);
        prop_assert!((weighted.phi2_norm - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn norms_grow_with_time(j in 1u64..=20, t in 0.001f64..0.05) {
        let alpha = rational();
        let a = picard_closed_form(&alpha, 0.0, 6 * j, t, PicardMode::RationalCase).unwrap();
        let b = picard_closed_form(&alpha, 0.0, 6 * j, 2.0 * t, PicardMode::RationalCase).unwrap();
        prop_assert!(b.phi2_norm > a.phi2_norm);
        prop_assert!(b.psi3_norm > a.psi3_norm);
    }
}
