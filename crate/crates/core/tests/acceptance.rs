//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{airy_error, expm_i, jacobi_eigen, temporal_order};
use mbkdv::bilinear::{
    omega_count, rect_conv_lower_bound, resonant_frequencies, spike_ratio, threshold_scan, Rectangle, SpikeFamily, ThresholdEstimate,
};
use mbkdv::diophantine::{estimate_type_index, theta_subsequence, verify_type_bound, Classification, TypeIndex};
use mbkdv::picard::{picard_closed_form, picard_quadrature, picard_scan, PicardMode, QuadratureOptions};
use mbkdv::resonance::{c_equation, c_roots, d_equation, d_roots, resonance_gap_integer, Alpha};
use mbkdv::spectral::{closed_form_eigenvalues, evolve, linear_operator, mode_dispersion, FieldPair, Scheme, SimConfig, TorusGrid};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn criterion(id: u32, limit: Option<Duration>, body: fn() -> Outcome) -> bool {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let passed = out.passed && in_time;
    let budget = limit.map(|l| format!(" / {:.0?}", l)).unwrap_or_default();
    println!("criterion {id}: {} ({}; {:.2?}{budget})", if passed { "PASS" } else { "FAIL" }, out.detail, elapsed);
    passed
}

fn scale_of(a: [[f64; 2]; 2]) -> f64 {
    a.iter().flatten().fold(1.0_f64, |m, x| m.max(x.abs()))
}

fn root_residuals() -> Outcome {
    let mut worst_c = 0.0_f64;
    let mut worst_d = 0.0_f64;
    let mut checked = 0;
    for k in 1..=1000 {
        let alpha = Alpha::ratio(k, 250);
        let (c1, c2) = c_roots(&alpha).unwrap();
        worst_c = worst_c.max(c_equation(&alpha, &c1).magnitude_bound()).max(c_equation(&alpha, &c2).magnitude_bound());
        if k != 250 {
            let (d1, d2) = d_roots(&alpha).unwrap();
            worst_d = worst_d.max(d_equation(&alpha, &d1).magnitude_bound()).max(d_equation(&alpha, &d2).magnitude_bound());
        }
        checked += 1;
    }
    outcome(worst_c == 0.0 && worst_d < 1e-12, format!("{checked} values, max c residual {worst_c:e}, max d residual {worst_d:e}"))
}

fn is_rational_square(r: &BigRational) -> bool {
    if r.is_negative() {
        return false;
    }
    let square = |x: &BigInt| {
        let s = x.sqrt();
        &s * &s == *x
    };
    square(r.numer()) && square(r.denom())
}

fn rationality_classification() -> Outcome {
    let mut cases: Vec<Alpha> = (0..=10i64).map(|k| Alpha::ratio(12, k * k + 3)).collect();
    for (p, q) in [(1, 2), (2, 1), (3, 2), (5, 2), (7, 3), (1, 10)] {
        cases.push(Alpha::ratio(p, q));
    }
    let mut mismatches = Vec::new();
    for alpha in &cases {
        let a = alpha.as_rational();
        let criterion = is_rational_square(&(BigRational::from_integer(12.into()) / &a - BigRational::from_integer(3.into())));
        let (c1, _) = c_roots(alpha).unwrap();
        if c1.is_rational() != Some(criterion) {
            mismatches.push(alpha.to_string());
        }
    }
    let c1_at = |alpha: Alpha| c_roots(&alpha).unwrap().0.to_string();
    let four = c1_at(Alpha::ratio(4, 1));
    let twelve_sevenths = c1_at(Alpha::ratio(12, 7));
    let passed = mismatches.is_empty() && four == "1/2" && twelve_sevenths == "5/6";
    outcome(passed, format!("{} values, mismatches {mismatches:?}, c1(4) = {four}, c1(12/7) = {twelve_sevenths}", cases.len()))
}

fn diophantine_half() -> Outcome {
    let x = c_roots(&Alpha::ratio(1, 2)).unwrap().0;
    let est = estimate_type_index(&x, 100_000).unwrap();
    let witnesses = theta_subsequence(&x, 10_000).unwrap();
    let good = witnesses.iter().filter(|w| w.theta.abs() < 1.0 / w.n as f64).count();
    let check = verify_type_bound(&x, est.k_hat, 0.0, 100_000).unwrap();
    let passed = est.classification == Classification::QuadraticSurd
        && est.nu_hat == TypeIndex::Finite(0.0)
        && good >= 5
        && good == witnesses.len()
        && check.holds;
    outcome(
        passed,
        format!(
            "{:?}, nu = {:?}, {good} witnesses, K = {:.10} {}",
            est.classification,
            est.nu_hat,
            est.k_hat,
            if check.holds { "holds" } else { "violated" }
        ),
    )
}

fn gap_expansion() -> Outcome {
    let mut worst = 0.0_f64;
    let mut absolute_mismatches = 0;
    let mut count = 0;
    for alpha in [Alpha::ratio(1, 2), Alpha::ratio(899, 1000)] {
        for n in 1..=1000 {
            let r = resonance_gap_integer(&alpha, n).unwrap();
            let scale = r.gamma_at_nearest.abs().max(1e-300);
            if r.gamma_at_nearest != 0.0 {
                worst = worst.max((r.expansion() - r.gamma_at_nearest).abs() / scale);
            }
            if (r.absolute_expansion() - r.gap).abs() > 1e-9 * scale {
                absolute_mismatches += 1;
            }
            count += 1;
        }
    }
    outcome(
        worst <= 1e-9,
        format!("{count} values, max relative error of signed expansion {worst:e}; termwise-absolute form differs at {absolute_mismatches}"),
    )
}

fn solver_correctness() -> Outcome {
    let airy = airy_error(256, 1e-4, std::f64::consts::PI, Scheme::Ifrk4);
    let (order_if, _) = temporal_order(Scheme::Ifrk4, &[0.008, 0.004, 0.002, 0.001], 0.5, 1.25e-4);
    let (order_etd, _) = temporal_order(Scheme::Etdrk4, &[0.008, 0.004, 0.002, 0.001], 0.5, 1.25e-4);
    let grid = TorusGrid::new(1.0, 256).unwrap();
    let state = FieldPair::from_fn(&grid, |x| 0.1 * x.cos(), |x| 0.1 * (2.0 * x).cos());
    let mut drifts = Vec::new();
    let mut drift_ok = true;
    for alpha in [0.899, 0.960, 0.980] {
        let mut cfg = SimConfig::new(alpha, 1e-4, 1.0);
        cfg.monitor_stride = 1000;
        let evo = evolve(&state, &grid, &cfg).unwrap();
        drift_ok &= evo.drift.e3 < 1e-8 && evo.drift.e4 < 1e-6;
        drifts.push(format!("{alpha}: e3 {:.1e} e4 {:.1e}", evo.drift.e3, evo.drift.e4));
    }
    let in_band = |p: f64| (3.5..=4.5).contains(&p);
    let passed = airy < 1e-8 && in_band(order_if) && in_band(order_etd) && drift_ok;
    outcome(passed, format!("airy {airy:.2e}, order {order_if:.3}/{order_etd:.3}, drift [{}]", drifts.join(", ")))
}

fn diagonalization() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_eig = 0.0_f64;
    let mut worst_orth = 0.0_f64;
    let mut worst_prop = 0.0_f64;
    for _ in 0..10_000 {
        let (p, q, xi) = (rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-40.0..40.0));
        let a = linear_operator(1.0, p, q, xi);
        let scale = scale_of(a);
        let ((o1, o2), _) = jacobi_eigen(a);
        let (d1, d2) = closed_form_eigenvalues(p, q, xi);
        let (d1, d2) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        worst_eig = worst_eig.max(((d1 - o1).abs() / scale).max((d2 - o2).abs() / scale));

        let alpha: f64 = rng.gen_range(0.05..4.0);
        let m = mode_dispersion(alpha, p, q, xi);
        let r = m.rotation;
        for i in 0..2 {
            for j in 0..2 {
                let gram = r[0][i] * r[0][j] + r[1][i] * r[1][j];
                worst_orth = worst_orth.max((gram - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        let xi_small = xi / 4.0;
        let t: f64 = rng.gen_range(0.0..0.2);
        let m = mode_dispersion(alpha, p, q, xi_small);
        let ours = m.propagator(t);
        let oracle = expm_i(m.a_matrix, t);
        for i in 0..2 {
            for j in 0..2 {
                worst_prop = worst_prop.max((ours[i][j] - oracle[i][j]).norm());
            }
        }
    }
    let passed = worst_eig <= 1e-12 && worst_orth <= 1e-12 && worst_prop <= 1e-10;
    outcome(passed, format!("10000 samples, eigenvalues {worst_eig:.1e}, orthogonality {worst_orth:.1e}, propagator {worst_prop:.1e}"))
}

fn picard_exponents() -> Outcome {
    let rational = Alpha::ratio(12, 7);
    let ns: Vec<u64> = (6..=96).step_by(6).collect();
    let report = picard_scan(&rational, 0.0, &ns, 0.01, PicardMode::RationalCase).unwrap();
    let phi = report.fitted_slopes.unwrap().0.slope;
    let mut passed = (phi - 1.0).abs() <= 0.1;
    let mut detail = format!("phi2 slope {phi:.4}");

    let half = Alpha::ratio(1, 2);
    let c1 = c_roots(&half).unwrap().0;
    let witnesses: Vec<u64> = theta_subsequence(&c1, 10_000_000_000).unwrap().iter().map(|w| w.n).filter(|&n| n >= 10_000).collect();
    for s in [0.0, 0.5] {
        let report = picard_scan(&half, s, &witnesses, 0.01, PicardMode::NearestInteger).unwrap();
        let psi = report.fitted_slopes.unwrap().1.slope;
        passed &= (psi - (1.0 - 2.0 * s)).abs() <= 0.15;
        detail += &format!(", psi3 slope at s = {s}: {psi:.4}");
    }

    let closed = picard_closed_form(&rational, 0.0, 12, 0.01, PicardMode::RationalCase).unwrap();
    let quad = picard_quadrature(&rational, 0.0, 12, 0.01, &QuadratureOptions::default()).unwrap();
    let rel = ((quad.phi2_resonant_norm - closed.phi2_norm) / closed.phi2_norm)
        .abs()
        .max(((quad.psi3_resonant_norm - closed.psi3_norm) / closed.psi3_norm).abs());
    passed &= rel <= 1e-4;
    detail += &format!(", quadrature at N = 12 {rel:.1e}");
    outcome(passed, detail)
}

fn bilinear_sharpness() -> Outcome {
    let half = Alpha::ratio(1, 2);
    let c1 = c_roots(&half).unwrap().0;
    let witnesses: Vec<u64> = theta_subsequence(&c1, 1_000_000).unwrap().iter().map(|w| w.n).filter(|&n| n >= 15).collect();
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let scan = threshold_scan(&half, 0.5, &grid, &witnesses).unwrap();
    let s_star = match scan.estimate {
        ThresholdEstimate::Crossing(s) => Some(s),
        _ => None,
    };
    let mut passed = s_star.is_some_and(|s| (s - 0.5).abs() <= 0.1);
    let mut detail = format!("s* = {:?}", scan.estimate);

    let rational = Alpha::ratio(12, 7);
    let resonant = resonant_frequencies(&rational, 96).unwrap();
    let mut below: Vec<f64> = (0..19).map(|i| i as f64 * 0.05).collect();
    below.push(0.949);
    let scan = threshold_scan(&rational, 0.5, &below, &resonant).unwrap();
    let min_slope = scan.slopes.iter().map(|(_, m)| *m).fold(f64::INFINITY, f64::min);
    passed &= min_slope > 0.0;
    detail += &format!(", min slope at 12/7 {min_slope:.4}");

    let mut worst = f64::INFINITY;
    for n in 1..=1000u64 {
        let family = SpikeFamily::mean_break(n);
        for b in [0.0, 0.5, 1.0] {
            for s in [0.0, 0.5, 1.0] {
                let ratio = spike_ratio(&half, &family.case_id.weights(s, b), &family).unwrap();
                worst = worst.min(ratio / n as f64);
            }
        }
    }
    passed &= worst >= 0.5;
    detail += &format!(", min mean-break ratio / N {worst:.4}");
    outcome(passed, detail)
}

fn omega_counting() -> Outcome {
    let half = Alpha::ratio(1, 2);
    let ratio_at = |lambda: f64, xi: f64, e: i32| {
        let c = omega_count(&half, lambda, xi, 2f64.powi(e), 1.0).unwrap();
        c.measure / c.bound
    };
    let constant = (0..=20).map(|e| ratio_at(1.0, 16.0, e)).fold(0.0, f64::max);
    let mut worst = 0.0_f64;
    let mut cases = 0;
    for lambda in [1.0, 2.0] {
        for xi in [16.0, 32.0, 64.0] {
            for e in 0..=20 {
                worst = worst.max(ratio_at(lambda, xi, e));
                cases += 1;
            }
        }
    }
    outcome(worst <= constant, format!("{cases} cases, C = {constant:.4}, largest ratio {worst:.4}"))
}

fn rectangles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut failures = 0;
    let mut min_ratio = f64::INFINITY;
    for _ in 0..200 {
        let half_widths = (rng.gen_range(0.01..5.0), rng.gen_range(0.01..5.0));
        let r = Rectangle::new((rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)), half_widths).unwrap();
        let s = Rectangle::new((rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)), half_widths).unwrap();
        let check = rect_conv_lower_bound(&r, &s, 101).unwrap();
        min_ratio = min_ratio.min(check.min_ratio);
        if !(check.holds && check.equality_at_corners) {
            failures += 1;
        }
    }
    outcome(failures == 0, format!("200 pairs, {failures} failures, min ratio {min_ratio:.12}"))
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        criterion(1, secs(5), root_residuals),
        criterion(2, None, rationality_classification),
        criterion(3, secs(10), diophantine_half),
        criterion(4, None, gap_expansion),
        criterion(5, secs(120), solver_correctness),
        criterion(6, None, diagonalization),
        criterion(7, secs(60), picard_exponents),
        criterion(8, secs(60), bilinear_sharpness),
        criterion(9, secs(30), omega_counting),
        criterion(10, None, rectangles),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
