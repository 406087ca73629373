use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};

use super::report::{Cell, Metadata, Report, Table};
use super::*;
use crate::bilinear::{omega_count, resonant_frequencies, threshold_scan};
use crate::diophantine::{
    cf_expand, convergents, estimate_type_index, theta_subsequence, verify_type_bound, DiophantineError, TypeIndex,
};
use crate::picard::{picard_quadrature, picard_scan, resonant_multiples, PicardMode, QuadratureOptions};
use crate::real::Real;
use crate::resonance::{c_equation, d_equation, resonance_gap_integer, Alpha, ResonanceRoots};
use crate::spectral::{
    conserved_quantities, evolve, write_checkpoint, Checkpoint, FieldPair, Scheme, SimConfig, TorusGrid,
};

/// Frequency ceiling for witness searches on quadratic irrationals.
const WITNESS_LIMIT_SURD: u64 = 10_000_000_000;
/// Frequency ceiling when the root is only known to finite precision.
const WITNESS_LIMIT_APPROX: u64 = 100_000_000;
const MAX_SCAN_LEN: u64 = 10_000_000;
const RANDOM_INIT_MODES: usize = 8;
const MAX_CROSS_CHECK: u64 = 96;

struct Outcome {
    tables: Vec<Table>,
    summary: Value,
    notices: Vec<String>,
    artifacts: Vec<(String, String)>,
}

impl Outcome {
    fn new(summary: Value) -> Self {
        Self { tables: Vec::new(), summary, notices: Vec::new(), artifacts: Vec::new() }
    }
}

/// Executes one configured run and collects its tables and summary.
pub fn run(config: &RunConfig) -> Result<Report, CliError> {
    let started = chrono::Utc::now().to_rfc3339();
    let outcome = match config.command {
        CommandName::Roots => roots(parse_params(&config.params)?),
        CommandName::Diophantine => diophantine(parse_params(&config.params)?),
        CommandName::ResonanceScan => resonance_scan(parse_params(&config.params)?),
        CommandName::Simulate => simulate(parse_params(&config.params)?, config.seed),
        CommandName::Picard => picard(parse_params(&config.params)?),
        CommandName::BilinearScan => bilinear_scan(parse_params(&config.params)?),
        CommandName::OmegaCount => omega(parse_params(&config.params)?),
    }?;
    let metadata = Metadata {
        tool: "mbkdv".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        started,
        finished: chrono::Utc::now().to_rfc3339(),
        notices: outcome.notices,
    };
    Ok(Report { metadata, tables: outcome.tables, summary: outcome.summary, artifacts: outcome.artifacts })
}

fn parse_params<T: DeserializeOwned>(params: &Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(params.clone())).map_err(|e| CliError::Config(format!("params: {e}")))
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_alpha(text: &str, notices: &mut Vec<String>) -> Result<Alpha, CliError> {
    if text.trim().is_empty() {
        return Err(config_err("alpha: required"));
    }
    let alpha: Alpha = text.parse().map_err(|e: crate::resonance::ResonanceError| config_err(format!("alpha: {e}")))?;
    if let Alpha::Float(x) = alpha {
        notices.push(format!("alpha = {x} is a decimal; exact results use its binary64 value (write p/q for a rational)"));
    }
    Ok(alpha)
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

fn real_json(x: &Real) -> Value {
    json!({ "exact": x.to_string(), "value": x.to_f64(), "rational": x.is_rational() })
}

fn witness_limit(root: &Real) -> u64 {
    if root.as_surd().is_some() {
        WITNESS_LIMIT_SURD
    } else {
        WITNESS_LIMIT_APPROX
    }
}

/// Theta witnesses in `[n_min, n_max]`; empty for rational roots.
fn witnesses_in(root: &Real, n_min: u64, n_max: u64) -> Result<Vec<u64>, CliError> {
    match theta_subsequence(root, n_max) {
        Ok(ws) => Ok(ws.into_iter().map(|w| w.n).filter(|&n| n >= n_min).collect()),
        Err(DiophantineError::XRational { .. }) => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

fn roots(args: RootsArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    let roots = ResonanceRoots::compute(&alpha)?;
    let d = roots.d.as_ref().map(|(d1, d2)| json!({ "d1": real_json(d1), "d2": real_json(d2) }));
    let residual = c_equation(&alpha, &roots.c1).magnitude_bound().max(c_equation(&alpha, &roots.c2).magnitude_bound());
    let d_residual = roots
        .d
        .as_ref()
        .map(|(d1, d2)| d_equation(&alpha, d1).magnitude_bound().max(d_equation(&alpha, d2).magnitude_bound()));
    if roots.d.is_none() {
        notices.push("alpha = 1: the d-roots are not defined".into());
    }
    let mut table = Table::new("roots", &["alpha", "c1", "c2", "d1", "d2", "cutoff"]);
    let (d1, d2) = roots.d.as_ref().map_or((f64::NAN, f64::NAN), |(a, b)| (a.to_f64(), b.to_f64()));
    table.push(vec![
        alpha.to_f64().into(),
        roots.c1.to_f64().into(),
        roots.c2.to_f64().into(),
        d1.into(),
        d2.into(),
        roots.cutoff.into(),
    ]);
    let summary = json!({
        "alpha": alpha.to_string(),
        "exact_input": alpha.is_exact(),
        "c1": real_json(&roots.c1),
        "c2": real_json(&roots.c2),
        "d": d,
        "cutoff": roots.cutoff,
        "c_residual": residual,
        "d_residual": d_residual,
    });
    let mut out = Outcome::new(summary);
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}

fn diophantine(args: DiophantineArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(args.terms >= 1 && args.terms <= 10_000, || format!("terms = {} must lie in [1, 10000]", args.terms))?;
    require(args.n_max >= 100, || format!("n_max = {} must be at least 100", args.n_max))?;
    let roots = ResonanceRoots::compute(&alpha)?;
    let x = match args.root {
        RootChoice::C1 => roots.c1.clone(),
        RootChoice::C2 => roots.c2.clone(),
        RootChoice::D1 | RootChoice::D2 => {
            let (d1, d2) = roots.d.clone().ok_or_else(|| config_err("d-roots are undefined at alpha = 1"))?;
            if args.root == RootChoice::D1 {
                d1
            } else {
                d2
            }
        }
    };
    let cf = cf_expand(&x, args.terms)?;
    if cf.precision_exhausted {
        notices.push(format!("continued fraction stopped after {} terms: enclosure too wide", cf.partial_quotients.len() + 1));
    }
    let k = args.terms.min(cf.available_terms().unwrap_or(args.terms));
    let convs = convergents(&cf, k)?;
    let mut conv_table = Table::new("convergents", &["k", "p", "q", "error"]);
    for (i, c) in convs.iter().enumerate() {
        conv_table.push(vec![
            (i as i64).into(),
            c.p.to_f64().unwrap_or(f64::NAN).into(),
            c.q.to_f64().unwrap_or(f64::NAN).into(),
            c.error.into(),
        ]);
    }
    let estimate = estimate_type_index(&x, args.n_max)?;
    let mut wit_table = Table::new("witnesses", &["n", "nearest", "theta", "scaled_distance"]);
    let witnesses = match theta_subsequence(&x, args.n_max) {
        Ok(ws) => ws,
        Err(DiophantineError::XRational { .. }) => Vec::new(),
        Err(e) => return Err(e.into()),
    };
    for w in &witnesses {
        wit_table.push(vec![
            w.n.into(),
            w.nearest.to_string().into(),
            w.theta.into(),
            (w.n as f64 * w.theta.abs()).into(),
        ]);
    }
    let bound_check = match estimate.nu_hat {
        TypeIndex::Finite(nu) if estimate.k_hat > 0.0 => Some(verify_type_bound(&x, estimate.k_hat, nu, args.n_max)?),
        _ => None,
    };
    let summary = json!({
        "alpha": alpha.to_string(),
        "root": args.root,
        "x": real_json(&x),
        "a0": cf.a0.to_string(),
        "partial_quotients": cf.partial_quotients.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "period": cf.period,
        "terminates": cf.terminates,
        "type_index": estimate,
        "bound_check": bound_check,
    });
    let mut out = Outcome::new(summary);
    out.tables = vec![conv_table, wit_table];
    out.notices = notices;
    Ok(out)
}

fn resonance_scan(args: ResonanceScanArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(args.n_min >= 1 && args.n_min <= args.n_max, || {
        format!("need 1 <= n_min <= n_max, got {}..{}", args.n_min, args.n_max)
    })?;
    require(args.n_max - args.n_min < MAX_SCAN_LEN, || format!("scan length exceeds {MAX_SCAN_LEN}"))?;
    let mut table = Table::new("gaps", &["N", "k1", "k2", "theta", "gap", "signed_gap", "expansion"]);
    let mut worst_rel = 0.0_f64;
    let (mut min_gap, mut max_gap) = (f64::INFINITY, 0.0_f64);
    for n in args.n_min..=args.n_max {
        let r = resonance_gap_integer(&alpha, n)?;
        let exp = r.expansion();
        if r.gamma_at_nearest != 0.0 {
            worst_rel = worst_rel.max(((r.gamma_at_nearest - exp) / r.gamma_at_nearest).abs());
        }
        min_gap = min_gap.min(r.gap);
        max_gap = max_gap.max(r.gap);
        table.push(vec![
            n.into(),
            r.nearest_c1n.into(),
            r.nearest_c2n.into(),
            r.theta.into(),
            r.gap.into(),
            r.gamma_at_nearest.into(),
            exp.into(),
        ]);
    }
    let summary = json!({
        "alpha": alpha.to_string(),
        "n_min": args.n_min,
        "n_max": args.n_max,
        "min_gap": min_gap,
        "max_gap": max_gap,
        "max_relative_expansion_error": worst_rel,
    });
    let mut out = Outcome::new(summary);
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}

fn initial_state(args: &SimulateArgs, grid: &TorusGrid, seed: u64) -> FieldPair {
    let a = args.amplitude;
    let k = 1.0 / args.lambda;
    match args.init {
        InitialData::Cosine => FieldPair::from_fn(grid, |x| a * (k * x).cos(), |x| a * (2.0 * k * x).cos()),
        InitialData::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let modes = RANDOM_INIT_MODES.min(grid.dealias_cutoff());
            let draw = |rng: &mut ChaCha8Rng| -> Vec<(f64, f64)> {
                (1..=modes).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))).collect()
            };
            let cu = draw(&mut rng);
            let cv = draw(&mut rng);
            let eval = |coeffs: &[(f64, f64)], x: f64| -> f64 {
                let sum: f64 = coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, (amp, phase))| amp * ((j + 1) as f64 * k * x + phase).cos())
                    .sum();
                a * sum / modes as f64
            };
            FieldPair::from_fn(grid, |x| eval(&cu, x), |x| eval(&cv, x))
        }
    }
}

fn simulate(args: SimulateArgs, seed: u64) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(args.lambda.is_finite() && args.lambda > 0.0, || format!("lambda must be positive, got {}", args.lambda))?;
    require(args.amplitude.is_finite() && args.amplitude >= 0.0, || format!("amplitude must be nonnegative, got {}", args.amplitude))?;
    let grid = TorusGrid::new(args.lambda, args.n)?;
    let state = initial_state(&args, &grid, seed);
    let a = alpha.to_f64();
    let mut cfg = SimConfig::new(a, args.dt, args.t);
    cfg.scheme = match args.scheme {
        SchemeChoice::Ifrk4 => Scheme::Ifrk4,
        SchemeChoice::Etdrk4 => Scheme::Etdrk4,
    };
    cfg.dealias = !args.no_dealias;
    cfg.monitor_stride = args.monitor_stride;
    cfg.reduce_means = args.reduce_means;
    let evo = evolve(&state, &grid, &cfg)?;
    notices.extend(evo.warnings.iter().cloned());
    let reference = evo.monitor.first().map(|r| r.conserved).unwrap_or_else(|| conserved_quantities(&state, &grid, a));
    let mut table = Table::new(
        "conservation",
        &["time", "e1", "e2", "e3", "e4", "drift_e1", "drift_e2", "drift_e3", "drift_e4"],
    );
    for row in &evo.monitor {
        let c = row.conserved;
        let d = c.drift_from(&reference);
        table.push(vec![
            row.time.into(),
            c.e1.into(),
            c.e2.into(),
            c.e3.into(),
            c.e4.into(),
            d.e1.into(),
            d.e2.into(),
            d.e3.into(),
            d.e4.into(),
        ]);
    }
    let mut out = Outcome::new(json!({
        "alpha": alpha.to_string(),
        "grid": { "lambda": args.lambda, "n_points": args.n },
        "scheme": cfg.scheme,
        "steps": evo.steps,
        "final_time": evo.state.time,
        "max_drift": evo.drift,
        "final_max_coefficient": evo.state.max_coefficient(),
        "hermitian_defect": evo.state.hermitian_defect(),
    }));
    if args.checkpoint {
        let p = evo.state.u_hat[0].re;
        let q = evo.state.v_hat[0].re;
        let cp = Checkpoint { grid, alpha: a, p, q, state: evo.state };
        out.artifacts.push(("checkpoint.json".into(), write_checkpoint(&cp) + "\n"));
    }
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}

/// Rational `c1`: multiples of its denominator. Otherwise: theta witnesses.
fn default_frequencies(
    alpha: &Alpha,
    root: &Real,
    n_min: Option<u64>,
    n_max: Option<u64>,
    rational_max: u64,
    witness_min: u64,
    witness_max: u64,
) -> Result<Vec<u64>, CliError> {
    if root.is_rational() == Some(true) {
        let n_min = n_min.unwrap_or(1);
        let ns = resonant_multiples(alpha, n_max.unwrap_or(rational_max))?;
        Ok(ns.into_iter().filter(|&n| n >= n_min).collect())
    } else {
        let limit = n_max.unwrap_or(witness_max).min(witness_limit(root));
        witnesses_in(root, n_min.unwrap_or(witness_min), limit)
    }
}

fn picard(args: PicardArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(args.s.is_finite(), || "s must be finite".into())?;
    let roots = ResonanceRoots::compute(&alpha)?;
    let ns = if args.n_list.is_empty() {
        default_frequencies(&alpha, &roots.c1, args.n_min, args.n_max, 96, 10_000, WITNESS_LIMIT_SURD)?
    } else {
        args.n_list.clone()
    };
    require(!ns.is_empty(), || "no frequencies selected".into())?;
    require(ns.iter().all(|&n| n >= 1), || "frequencies must be positive".into())?;
    let resonant = resonant_multiples(&alpha, *ns.iter().max().expect("nonempty"))?;
    let mode = if ns.iter().all(|n| resonant.contains(n)) { PicardMode::RationalCase } else { PicardMode::NearestInteger };
    let report = picard_scan(&alpha, args.s, &ns, args.t, mode)?;
    if report.fitted_slopes.is_none() {
        notices.push(format!("{} frequencies: no growth exponent fitted (need 4 nonzero norms)", ns.len()));
    }
    let mut table = Table::new("picard", &["N", "theta", "gap", "phi2_norm", "psi3_norm"]);
    for e in &report.entries {
        table.push(vec![e.n.into(), e.theta.into(), e.gap.into(), e.phi2_norm.into(), e.psi3_norm.into()]);
    }
    let cross_check = match args.cross_check {
        Some(n) => {
            require(n <= MAX_CROSS_CHECK, || format!("cross_check = {n} exceeds {MAX_CROSS_CHECK}; quadrature cost grows like N^3"))?;
            let closed = crate::picard::picard_closed_form(&alpha, args.s, n, args.t, PicardMode::NearestInteger)?;
            let quad = picard_quadrature(&alpha, args.s, n, args.t, &QuadratureOptions::default())?;
            let rel = |a: f64, b: f64| if b != 0.0 { ((a - b) / b).abs() } else { (a - b).abs() };
            Some(json!({
                "n": n,
                "closed_form": closed,
                "quadrature": quad,
                "phi2_relative_difference": rel(closed.phi2_norm, quad.phi2_resonant_norm),
                "psi3_relative_difference": rel(closed.psi3_norm, quad.psi3_resonant_norm),
            }))
        }
        None => None,
    };
    let slopes = report.fitted_slopes.map(|(phi, psi)| json!({ "phi2": phi, "psi3": psi }));
    let summary = json!({
        "alpha": alpha.to_string(),
        "s": args.s,
        "t": args.t,
        "mode": report.mode,
        "frequencies": ns.len(),
        "fitted_slopes": slopes,
        "cross_check": cross_check,
    });
    let mut out = Outcome::new(summary);
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}

fn bilinear_scan(args: BilinearScanArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(args.b.is_finite(), || "b must be finite".into())?;
    require(args.s_step > 0.0 && args.s_min <= args.s_max, || {
        format!("need s_step > 0 and s_min <= s_max, got {} {}..{}", args.s_step, args.s_min, args.s_max)
    })?;
    let count = ((args.s_max - args.s_min) / args.s_step + 1e-9).floor() as usize + 1;
    require(count <= 10_000, || format!("{count} grid points in s is too many"))?;
    let s_grid: Vec<f64> = (0..count).map(|i| args.s_min + i as f64 * args.s_step).collect();
    let roots = ResonanceRoots::compute(&alpha)?;
    let ns = if roots.c1.is_rational() == Some(true) {
        let n_max = args.n_max.unwrap_or(960);
        let n_min = args.n_min.unwrap_or(1);
        resonant_frequencies(&alpha, n_max)?.into_iter().filter(|&n| n >= n_min).collect()
    } else {
        witnesses_in(&roots.c1, args.n_min.unwrap_or(15), args.n_max.unwrap_or(1_000_000))?
    };
    let scan = threshold_scan(&alpha, args.b, &s_grid, &ns)?;
    let mut ratios = Table::new("ratios", &["case_id", "s", "b", "N", "ratio"]);
    for r in &scan.rows {
        ratios.push(vec![r.case_id.into(), r.s.into(), r.b.into(), r.n.into(), r.ratio.into()]);
    }
    let mut slopes = Table::new("slopes", &["s", "slope"]);
    for &(s, m) in &scan.slopes {
        slopes.push(vec![s.into(), m.into()]);
    }
    let summary = json!({
        "alpha": alpha.to_string(),
        "b": args.b,
        "frequencies": ns,
        "threshold": scan.estimate,
    });
    let mut out = Outcome::new(summary);
    out.tables = vec![ratios, slopes];
    out.notices = notices;
    Ok(out)
}

fn omega(args: OmegaCountArgs) -> Result<Outcome, CliError> {
    let mut notices = Vec::new();
    let alpha = parse_alpha(&args.alpha, &mut notices)?;
    require(!args.xi.is_empty(), || "xi: at least one frequency is required".into())?;
    require(args.m_max_exp <= 40, || format!("m_max_exp = {} exceeds 40", args.m_max_exp))?;
    let mut table = Table::new("omega", &["xi", "M", "measure", "bound", "ratio"]);
    let mut constants = Vec::new();
    for &xi in &args.xi {
        let mut worst = 0.0_f64;
        for k in 0..=args.m_max_exp {
            let m = 2f64.powi(k as i32);
            let c = omega_count(&alpha, args.lambda, xi, m, args.window_constant)?;
            let ratio = c.measure / c.bound;
            worst = worst.max(ratio);
            table.push(vec![xi.into(), m.into(), c.measure.into(), c.bound.into(), ratio.into()]);
        }
        constants.push(json!({ "xi": xi, "max_ratio": worst }));
    }
    let fitted = constants.first().and_then(|c| c["max_ratio"].as_f64()).unwrap_or(f64::NAN);
    let exceed = table.rows.iter().filter(|r| matches!(r[4], Cell::Num(x) if x > fitted * (1.0 + 1e-12))).count();
    let summary = json!({
        "alpha": alpha.to_string(),
        "lambda": args.lambda,
        "window_constant": args.window_constant,
        "max_ratio_by_xi": constants,
        "fitted_constant": fitted,
        "rows_above_fitted_constant": exceed,
    });
    let mut out = Outcome::new(summary);
    out.tables.push(table);
    out.notices = notices;
    Ok(out)
}
