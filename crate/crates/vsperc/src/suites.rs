//! Preregistered verification suites behind `verify-spectral`, `verify-mc`
//! and `selftest`.

use crate::record::Check;
use serde_json::{json, Value};
use vsperc_core::diagram::{build_diagram, DiagramOptions, Region};
use vsperc_core::params::{Level, TreeParams};
use vsperc_core::quadrature::QuadratureGrid;
use vsperc_core::sim::{
    check_arc_monotonicity, check_cross_sampler, check_decay, check_domination, check_ineq_118,
    estimate_tau_n, estimate_two_point, estimate_window_void, gff_moments, sample_interlacement_window,
    sample_vacancy_marks, Seed, DEFAULT_EXPLORE_CAP,
};
use vsperc_core::spectral::{
    critical_a, discretize, lambda_h, lambda_tilde, lambda_ua, parabola_scan, second_moment_bound,
    solve_h_star, two_point_prediction, v_function, SpectralOptions,
};
use vsperc_core::stats::{log_decay_fit, McEstimate};
use vsperc_core::tree::DEFAULT_MAX_VERTICES;
use vsperc_core::{Error, Result, TrialRunner};

/// `(u, a, ρ)` for the height/level exchange inequality.
pub const INEQ_TRIPLES: [(f64, f64, f64); 6] = [
    (0.1, 0.3, 0.4),
    (0.0, 0.0, 0.5),
    (0.1, 0.0, 0.7),
    (0.05, 0.2, 0.3),
    (0.0, 0.5, 0.25),
    (0.1, 0.3, 1e-3),
];
/// `(a, ρ)` for the domination check.
pub const DOMINATION_SETTINGS: [(f64, f64); 2] = [(0.0, 0.5), (0.5, 0.5)];
pub const DOMINATION_DEPTH: u32 = 8;
/// `(a, ρ)` for the `λ̃` chain.
pub const CHAIN_PAIRS: [(f64, f64); 3] = [(0.0, 1.0), (0.5, 0.5), (1.0, 0.5)];
/// `(v, n)` for the window void probability.
pub const WINDOW_POINTS: [(f64, u32); 3] = [(0.2, 1), (0.2, 2), (1.0, 2)];
/// Target `λ(u,a)` for the decay-rate fit, reached by choosing `u` at `a = 0`.
pub const DECAY_LAMBDA: f64 = 0.8;
pub const DECAY_RADII: (u32, u32) = (6, 12);
pub const ARC_SAMPLES: u32 = 16;
pub const MARGIN: f64 = 1e-6;

fn grid_values(lo: f64, step: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| lo + step * i as f64).collect()
}

/// Smallest gap `λ_a e^{−(aρ+ρ²/2)(d−1)²/d} − λ_{a+ρ}` over `a ∈ {0, 0.25, …, 2}`,
/// `ρ ∈ {0.25, …, 2}`, as `(gap, a, ρ)`.
pub fn thm21_grid(params: &TreeParams, opts: &SpectralOptions) -> Result<(f64, f64, f64)> {
    let heights = grid_values(0.0, 0.25, 17);
    let lams: Vec<f64> = heights.iter().map(|&h| lambda_h(h, params, opts)).collect::<Result<_>>()?;
    let kappa = params.decay_exponent();
    let mut worst = (f64::INFINITY, 0.0, 0.0);
    for i in 0..9 {
        for j in 1..=8 {
            let (a, rho) = (heights[i], heights[j]);
            let gap = lams[i] * (-(a * rho + 0.5 * rho * rho) * kappa).exp() - lams[i + j];
            if gap < worst.0 {
                worst = (gap, a, rho);
            }
        }
    }
    Ok(worst)
}

/// Gap grid, `λ̃` chain and parabola scans at `h_*/2`, `h_*`, `√(2u_*)`, plus
/// `extra_arc` when given.
pub fn spectral_suite(
    params: &TreeParams,
    opts: &SpectralOptions,
    extra_arc: Option<f64>,
) -> Result<(Vec<Check>, Value)> {
    let mut checks = Vec::new();
    let (gap, ga, grho) = thm21_grid(params, opts)?;
    checks.push(Check::new(
        "eigenvalue-gap-grid",
        gap > MARGIN,
        format!("min gap {gap:.3e} at a={ga}, rho={grho}"),
    ));
    let mut chain = Vec::new();
    for &(a, rho) in &CHAIN_PAIRS {
        let lam_a = lambda_h(a, params, opts)?;
        let lam_ar = lambda_h(a + rho, params, opts)?;
        let tilde = lambda_tilde(a, rho, params, opts)?.lambda;
        let p = params.vacancy_probs(Level::new(a * rho + 0.5 * rho * rho)?).p;
        let (m1, m2) = (tilde * p - lam_ar, lam_a - tilde);
        checks.push(Check::new(
            format!("chain a={a} rho={rho}"),
            m1 > MARGIN && m2 > MARGIN,
            format!("lambda_tilde*p - lambda_(a+rho) = {m1:.3e}, lambda_a - lambda_tilde = {m2:.3e}"),
        ));
        chain.push(json!({"a": a, "rho": rho, "lambda_a": lam_a, "lambda_a_rho": lam_ar, "lambda_tilde": tilde, "p": p}));
    }
    let h_star = solve_h_star(params, opts, 1e-12)?.h_star;
    let lam0 = lambda_h(0.0, params, opts)?;
    let mut scans = Vec::new();
    let mut heights = vec![
        ("h*/2".to_string(), 0.5 * h_star),
        ("h*".to_string(), h_star),
        ("sqrt(2u*)".to_string(), (2.0 * params.u_star()).sqrt()),
    ];
    heights.extend(extra_arc.map(|h| (format!("{h}"), h)));
    for (name, h) in heights {
        let scan = parabola_scan(h, ARC_SAMPLES, params, opts)?;
        let first = scan.points[0].lambda - lambda_h(h, params, opts)?;
        let last = scan.points.last().expect("K+1 points").lambda
            - lam0 * (-(0.5 * h * h) * params.decay_exponent()).exp();
        let step = scan.min_step();
        checks.push(Check::new(
            format!("arc h={name}"),
            step > 1e-9 && first.abs() <= 1e-8 && last.abs() <= 1e-8,
            format!("min step {step:.3e}, endpoint errors {first:.1e}, {last:.1e}"),
        ));
        scans.push(json!({"h": h, "min_step": step, "lambda": scan.points.iter().map(|p| p.lambda).collect::<Vec<_>>()}));
    }
    let data = json!({"min_gap": gap, "chain": chain, "h_star": h_star, "scans": scans});
    Ok((checks, data))
}

fn est_json(e: &McEstimate) -> Value {
    json!({"successes": e.successes, "trials": e.trials, "estimate": e.estimate, "stderr": e.stderr})
}

/// The `u` with `λ(u, a) = target`.
pub fn level_for(target: f64, a: f64, params: &TreeParams, opts: &SpectralOptions) -> Result<f64> {
    let lam_a = lambda_h(a, params, opts)?;
    let u = (lam_a / target).ln() / params.decay_exponent();
    if !(u >= 0.0) {
        return Err(Error::Precondition(format!("λ_{a} = {lam_a} is already below {target}")));
    }
    Ok(u)
}

#[allow(clippy::too_many_arguments)]
pub fn mc_suite<R: TrialRunner>(
    params: &TreeParams,
    opts: &SpectralOptions,
    n: u32,
    arc_samples: u32,
    buffer: u32,
    trials: u64,
    seed: Seed,
    runner: &R,
) -> Result<(Vec<Check>, Value)> {
    let mut checks = Vec::new();
    let mut data = serde_json::Map::new();
    let mut ineq = Vec::new();
    for (i, &(u, a, rho)) in INEQ_TRIPLES.iter().enumerate() {
        let r = check_ineq_118(Level::new(u)?, a, rho, n, trials, params, seed.child(100 + i as u64), runner)?;
        checks.push(Check::new(
            format!("ineq u={u} a={a} rho={rho}"),
            r.pass,
            format!("left {:.5} right {:.5} excess {:.2} sigma", r.left.estimate, r.right.estimate, r.excess_sigmas),
        ));
        ineq.push(json!({"u": u, "a": a, "rho": rho, "left": est_json(&r.left), "right": est_json(&r.right)}));
    }
    data.insert("ineq".into(), ineq.into());
    let h_star = solve_h_star(params, opts, 1e-12)?.h_star;
    let mut arcs = Vec::new();
    for (i, h) in [h_star, (2.0 * params.u_star()).sqrt()].into_iter().enumerate() {
        let r = check_arc_monotonicity(h, n, arc_samples, trials, params, seed.child(200 + i as u64), runner)?;
        checks.push(Check::new(
            format!("arc h={h:.6}"),
            r.pass,
            format!("worst drop {:.2} sigma", r.worst_drop_sigmas),
        ));
        arcs.push(json!({"h": h, "tau": r.points.iter().map(|p| json!({"u": p.u, "a": p.a, "tau": est_json(&p.tau)})).collect::<Vec<_>>()}));
    }
    data.insert("arcs".into(), arcs.into());
    let mut dom = Vec::new();
    for (i, &(a, rho)) in DOMINATION_SETTINGS.iter().enumerate() {
        let r = check_domination(a, rho, DOMINATION_DEPTH, buffer, trials, params, seed.child(300 + i as u64), runner)?;
        checks.push(Check::new(
            format!("domination a={a} rho={rho}"),
            r.pass,
            format!("left {:.5} right {:.5} excess {:.2} sigma", r.left.estimate, r.right.estimate, r.excess_sigmas),
        ));
        if let (Some(shift), Some(stable)) = (r.shift_sigmas, r.stable) {
            checks.push(Check::new(
                format!("domination buffer a={a} rho={rho}"),
                stable,
                format!("buffer {} vs {}: shift {shift:.2} sigma", buffer, buffer - 1),
            ));
        }
        dom.push(json!({"a": a, "rho": rho, "left": est_json(&r.left), "right": est_json(&r.right),
            "right_smaller_buffer": r.sensitivity.as_ref().map(est_json), "caveat": r.caveat}));
    }
    data.insert("domination".into(), dom.into());
    let cross = check_cross_sampler(Level::new(0.5)?, 4, trials, params, seed.child(400), runner)?;
    checks.push(Check::new(
        "cross-sampler v=0.5 n=4",
        cross.pass,
        format!("marks {:.5} window {:.5} ({:.2} sigma)", cross.marks.estimate, cross.window.estimate, cross.sigmas),
    ));
    for (i, &(v, m)) in WINDOW_POINTS.iter().enumerate() {
        let r = estimate_window_void(Level::new(v)?, m, trials, params, seed.child(500 + i as u64), runner)?;
        checks.push(Check::new(
            format!("window void v={v} n={m}"),
            r.pass,
            format!("void {:.5} vs {:.5} ({:.2} sigma)", r.void.estimate, r.expected_void, r.void_sigmas),
        ));
    }
    let mom = gff_moments(trials, params, seed.child(600), runner)?;
    checks.push(Check::new(
        "gff moments",
        mom.pass,
        format!("var {:.5} cov {:.5}", mom.root_variance.0, mom.covariance.0),
    ));
    let u_dec = level_for(DECAY_LAMBDA, 0.0, params, opts)?;
    let (lo, hi) = DECAY_RADII;
    let dec = check_decay(Level::new(u_dec)?, 0.0, lo, hi, trials, params, opts, seed.child(700), runner)?;
    checks.push(Check::new(
        format!("decay u={u_dec:.5} a=0"),
        dec.pass,
        format!(
            "slope {:.5} vs ln lambda {:.5} (rel {:.2}%), envelope {}",
            dec.slope,
            dec.lambda.ln(),
            100.0 * dec.relative_error,
            if dec.envelope_ok { "ok" } else { "violated" }
        ),
    ));
    let ray = ray_decay(0.3, 0.3, params, opts, trials, seed.child(800), runner)?;
    checks.push(ray.0);
    data.insert("ray_decay".into(), ray.1);
    data.insert(
        "decay".into(),
        json!({"u": u_dec, "lambda": dec.lambda, "slope": dec.slope, "slope_stderr": dec.slope_stderr,
               "tau": dec.estimates.iter().map(est_json).collect::<Vec<_>>()}),
    );
    Ok((checks, Value::Object(data)))
}

/// Log-slope of the two-point estimate over `n ∈ 6..=12` against `ln(λ/d)`.
pub fn ray_decay<R: TrialRunner>(
    u: f64,
    a: f64,
    params: &TreeParams,
    opts: &SpectralOptions,
    trials: u64,
    seed: Seed,
    runner: &R,
) -> Result<(Check, Value)> {
    let level = Level::new(u)?;
    let lam = lambda_ua(level, a, params, opts)?;
    let ns: Vec<u32> = (6..=12).collect();
    let ests: Vec<McEstimate> = ns
        .iter()
        .map(|&m| estimate_two_point(level, a, m, trials, params, seed.child(u64::from(m)), runner))
        .collect::<Result<_>>()?;
    if ests.iter().any(|e| e.successes == 0) {
        return Err(Error::Precondition("two-point estimate hit zero; raise trials".into()));
    }
    let (slope, se) = log_decay_fit(&ns, &ests);
    let target = (lam / params.df()).ln();
    let rel = ((slope - target) / target).abs();
    let check = Check::new(
        format!("ray decay u={u} a={a}"),
        rel <= 0.05,
        format!("slope {slope:.5} vs ln(lambda/d) {target:.5} (rel {:.2}%)", 100.0 * rel),
    );
    Ok((check, json!({"u": u, "a": a, "slope": slope, "slope_stderr": se, "target": target})))
}

/// The closed-form and construction-level examples of every module, at
/// sample sizes that finish in seconds.
pub fn selftest<R: TrialRunner>(runner: &R) -> Result<Vec<Check>> {
    let mut c = Vec::new();
    let close = |x: f64, y: f64, tol: f64| (x - y).abs() <= tol;
    let p2 = TreeParams::new(2)?;
    let p3 = TreeParams::new(3)?;
    let opts = SpectralOptions::default();
    c.push(Check::new(
        "constants d=2",
        close(p2.sigma2(), 2.0 / 3.0, 1e-15) && close(p2.decay_exponent(), 0.5, 1e-15) && close(p2.point_capacity(), 1.5, 1e-15),
        format!("sigma2 {} kappa {} cap {}", p2.sigma2(), p2.decay_exponent(), p2.point_capacity()),
    ));
    c.push(Check::new(
        "constants d=3",
        close(p3.sigma2(), 3.0 / 8.0, 1e-15) && close(p3.decay_exponent(), 4.0 / 3.0, 1e-15),
        format!("sigma2 {} kappa {}", p3.sigma2(), p3.decay_exponent()),
    ));
    c.push(Check::new(
        "nu density",
        close(p2.nu_density(0.0), 0.488_602_511_902_919_9, 1e-12) && p2.nu_density(0.37) == p2.nu_density(-0.37),
        format!("nu(0) = {}", p2.nu_density(0.0)),
    ));
    let full = QuadratureGrid::build(opts.untruncated_height(&p2), &p2, &opts.grid)?;
    let half = QuadratureGrid::build(0.0, &p2, &opts.grid)?;
    let fine = QuadratureGrid::build(opts.untruncated_height(&p2), &p2, &opts.grid.with_node_count(800))?;
    c.push(Check::new(
        "quadrature mass",
        close(full.total_mass(), 1.0, 1e-12) && close(half.total_mass(), 0.5, 1e-10) && close(fine.total_mass(), full.total_mass(), 1e-12),
        format!("full {} half {}", full.total_mass(), half.total_mass()),
    ));
    let norm = full.integrate(|y| p2.mehler_kernel(0.7, y));
    c.push(Check::new(
        "mehler kernel",
        close(p2.mehler_kernel(0.0, 0.0), 2.0 / 3f64.sqrt(), 1e-12)
            && p2.mehler_kernel(0.3, -1.1) == p2.mehler_kernel(-1.1, 0.3)
            && close(norm, 1.0, 1e-10),
        format!("k(0,0) {} mass {norm}", p2.mehler_kernel(0.0, 0.0)),
    ));
    let zero = p2.vacancy_probs(Level::ZERO);
    let one = p2.vacancy_probs(Level::new(1.0)?);
    c.push(Check::new(
        "vacancy probabilities",
        zero.p0 == 1.0 && zero.p == 1.0 && close(one.p0, (-1.5f64).exp(), 1e-15) && close(one.p, (-0.5f64).exp(), 1e-15),
        format!("v=1: p0 {} p {}", one.p0, one.p),
    ));
    c.push(Check::new(
        "u_star",
        close(p2.u_star(), 2.0 * 2f64.ln(), 1e-14) && close(p3.u_star(), 0.75 * 3f64.ln(), 1e-14),
        format!("d=2 {} d=3 {}", p2.u_star(), p3.u_star()),
    ));
    c.push(Check::new(
        "capacity",
        p2.ball_capacity(0) == p2.point_capacity() && close(p2.ball_capacity(1), 3.0, 1e-15),
        format!("cap(B_0) {} cap(B_1) {}", p2.ball_capacity(0), p2.ball_capacity(1)),
    ));
    let op = discretize(opts.untruncated_height(&p2), &p2, &opts)?;
    let y = op.sqrt_weights.clone();
    let ay = op.apply(&y);
    let rq: f64 = y.iter().zip(&ay).map(|(a, b)| a * b).sum::<f64>() / y.iter().map(|a| a * a).sum::<f64>();
    c.push(Check::new(
        "operator",
        close(rq, 2.0, 1e-6) && op.max_asymmetry() <= 1e-13 && op.matrix.iter().all(|&x| x > 0.0),
        format!("Rayleigh quotient of 1: {rq}"),
    ));
    let hs = solve_h_star(&p2, &opts, 1e-12)?;
    let lam_hs = lambda_h(hs.h_star, &p2, &opts)?;
    let ca = critical_a(Level::ZERO, &p2, &opts, 1e-12)?.unwrap_or(f64::NAN);
    c.push(Check::new(
        "h_star",
        close(lam_hs, 1.0, 1e-8) && close(ca, hs.h_star, 1e-8),
        format!("h* {} |lambda-1| {:.1e}", hs.h_star, (lam_hs - 1.0).abs()),
    ));
    let mut u_zero = true;
    for a in [-1.0, 0.0, 1.0] {
        u_zero &= lambda_ua(Level::ZERO, a, &p2, &opts)? == lambda_h(a, &p2, &opts)?;
    }
    c.push(Check::new("lambda(0,a) = lambda_a", u_zero, "a in {-1,0,1}"));
    let t0 = two_point_prediction(0.3, 0, &p2, &opts)?;
    let tinf = two_point_prediction(opts.untruncated_height(&p2), 7, &p2, &opts)?;
    c.push(Check::new(
        "two-point prediction",
        close(t0, p2.nu_tail(0.3), 1e-10) && close(tinf, 1.0, 1e-6),
        format!("n=0: {t0}, a=-8sigma n=7: {tinf}"),
    ));
    c.push(Check::new(
        "V below the level",
        v_function(0.2, 0.3, 0.5, &p2)? == 1.0,
        "V(b) = 1 for b <= a",
    ));
    let lt = lambda_tilde(0.5, 1e-4, &p2, &opts)?.lambda;
    let l5 = lambda_h(0.5, &p2, &opts)?;
    c.push(Check::new("lambda_tilde small rho", close(lt, l5, 1e-3), format!("{lt} vs {l5}")));
    let sm = second_moment_bound(Level::ZERO, -0.5, &p2, &opts)?;
    c.push(Check::new(
        "second-moment constant",
        sm.a_const <= 1.5 * p2.vacancy_probs(Level::ZERO).p0 + 1e-12,
        format!("A = {}", sm.a_const),
    ));
    c.push(Check::new(
        "child variance",
        close(p2.child_variance(), 0.5, 1e-15),
        format!("{}", p2.child_variance()),
    ));
    let seed = Seed::new(0);
    let marks = sample_vacancy_marks(Level::ZERO, 6, &p2, DEFAULT_MAX_VERTICES, &mut seed.rng(0))?;
    let window = sample_interlacement_window(Level::ZERO, 3, &p2, DEFAULT_MAX_VERTICES, &mut seed.rng(1))?;
    c.push(Check::new(
        "zero level",
        marks.blocked.iter().all(|b| !b) && window.is_void(),
        "no blocked or occupied vertex at v=0",
    ));
    let cross = check_cross_sampler(Level::new(1.0)?, 3, 100_000, &p2, seed.child(1), runner)?;
    let marks_ok = (cross.marks.estimate - (-3.0f64).exp()).abs() <= 3.0 * cross.marks.stderr;
    c.push(Check::new(
        "geodesic of length 3",
        marks_ok,
        format!("{} vs {}", cross.marks.estimate, (-3.0f64).exp()),
    ));
    let void = estimate_window_void(Level::new(0.2)?, 1, 100_000, &p2, seed.child(2), runner)?;
    c.push(Check::new(
        "window base point",
        void.base_sigmas <= 4.0,
        format!("{} vs p0 {}", void.base_vacant.estimate, void.expected_base),
    ));
    c.push(Check::new("lupu closed-form", close(1.0 - (-2.0f64).exp(), 0.864_664_716_763_387_3, 1e-15), "1 - e^-2"));
    let far = opts.untruncated_height(&p2);
    let prof = estimate_tau_n(Level::ZERO, far, 8, 2000, &p2, seed.child(3), DEFAULT_EXPLORE_CAP, runner)?;
    let tp = estimate_two_point(Level::ZERO, far, 8, 2000, &p2, seed.child(4), runner)?;
    c.push(Check::new(
        "no constraint",
        prof.estimates().iter().all(|e| e.estimate == 1.0) && tp.estimate == 1.0,
        "tau_n = two-point = 1 at u=0, a=-8sigma",
    ));
    let tiny = check_ineq_118(Level::new(0.1)?, 0.3, 1e-3, 6, 20_000, &p2, seed.child(5), runner)?;
    c.push(Check::new(
        "tiny rho",
        tiny.excess_sigmas.abs() <= 4.0,
        format!("{:.2} sigma", tiny.excess_sigmas),
    ));
    let small_arc = check_arc_monotonicity(0.2, 6, 3, 20_000, &p2, seed.child(6), runner)?;
    c.push(Check::new("small arc", small_arc.pass, format!("{:.2} sigma", small_arc.worst_drop_sigmas)));
    let big = check_domination(0.0, 5.0, 4, 1, 2000, &p2, seed.child(7), runner)?;
    c.push(Check::new(
        "large rho domination",
        big.pass && big.left.successes == 0,
        format!("left {}", big.left.estimate),
    ));
    let dg = build_diagram(&p2, &[0.0], &[0.0], 1e-3, &DiagramOptions::default())?;
    let at_hstar = Region::classify(lambda_ua(Level::ZERO, dg.summary.h_star, &p2, &opts)?, 1e-3);
    c.push(Check::new(
        "(0, h*) in the critical band",
        at_hstar == Region::CriticalBand,
        format!("h* {}", dg.summary.h_star),
    ));
    Ok(c)
}
