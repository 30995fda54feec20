//! Command-line front end.

use crate::config::{parse_grid, Overrides, RunConfig};
use crate::error::{CliError, EXIT_CHECK_FAILED, EXIT_OK, EXIT_VALIDATION};
use crate::format::{write_diagram_csv, write_tau_csv};
use crate::parallel::ParallelRunner;
use crate::record::{write_json, Check, RunRecord};
use crate::suites;
use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::path::PathBuf;
use vsperc_core::diagram::{build_diagram_with, critical_line_heights, critical_line_rows, DiagramOptions};
use vsperc_core::params::{Level, TreeParams};
use vsperc_core::quadrature::GridOptions;
use vsperc_core::sim::{estimate_tau_n, estimate_two_point, Seed, DEFAULT_EXPLORE_CAP, STAT_K};
use vsperc_core::spectral::{check_thm21, eigenpair, lambda_h, lambda_tilde, lambda_ua, solve_h_star, two_point_prediction, SpectralOptions};

#[derive(Debug, Parser)]
#[command(name = "vsperc", version, about = "Spectral and Monte Carlo tools for vacant-set level-set percolation on regular trees")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// λ_a and λ(u,a) at --a and --u.
    Lambda,
    /// The critical height h_*.
    Hstar,
    /// Trace the critical line λ(u,a) = 1.
    Critline,
    /// Eigenvalue inequalities, the λ̃ chain and parabola scans.
    VerifySpectral,
    /// τ̂_m(u,a) for m ≤ n.
    Tau,
    /// Two-point estimate along a ray against the spectral prediction.
    TwoPoint,
    /// Monte Carlo inequality, sampler and decay suites.
    VerifyMc,
    /// The (u,a) percolation diagram.
    Diagram,
    /// Closed-form and construction checks of every module.
    Selftest,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Lambda => "lambda",
            Command::Hstar => "hstar",
            Command::Critline => "critline",
            Command::VerifySpectral => "verify-spectral",
            Command::Tau => "tau",
            Command::TwoPoint => "two-point",
            Command::VerifyMc => "verify-mc",
            Command::Diagram => "diagram",
            Command::Selftest => "selftest",
        }
    }
}

struct Outcome {
    summary: String,
    results: Value,
    checks: Vec<Check>,
}

struct Ctx {
    cfg: RunConfig,
    params: TreeParams,
    opts: SpectralOptions,
    runner: ParallelRunner,
}

impl Ctx {
    fn new(cfg: RunConfig) -> Result<Self, CliError> {
        let params = TreeParams::new(cfg.d)?;
        let grid = GridOptions {
            node_count: cfg.node_count,
            m: cfg.m,
            ..GridOptions::default()
        };
        grid.validate()?;
        let opts = SpectralOptions { grid, ..SpectralOptions::default() };
        let runner = ParallelRunner::new(cfg.workers).map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Self { cfg, params, opts, runner })
    }

    fn seed(&self) -> Seed {
        Seed::new(self.cfg.seed)
    }

    fn artifact(&self, name: &str) -> Result<Option<PathBuf>, CliError> {
        match &self.cfg.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                Ok(Some(dir.join(name)))
            }
            None => Ok(None),
        }
    }

    fn lambdas(&self, heights: &[f64]) -> Vec<vsperc_core::Result<f64>> {
        self.runner.install(|| heights.par_iter().map(|&a| lambda_h(a, &self.params, &self.opts)).collect())
    }

    fn dump_spectral(&self, name: &str, h: f64) -> Result<(), CliError> {
        if !self.cfg.dump_spectral {
            return Ok(());
        }
        let Some(path) = self.artifact(&format!("{name}-spectral.json"))? else {
            return Ok(());
        };
        let op = vsperc_core::spectral::discretize(h, &self.params, &self.opts)?;
        let pair = eigenpair(h, &self.params, &self.opts)?;
        write_json(
            &path,
            &json!({
                "h": h,
                "lower": pair.lower,
                "upper": pair.upper,
                "node_count": pair.node_count,
                "nodes": op.grid.nodes,
                "weights": op.grid.weights,
                "chi": pair.chi,
                "lambda": pair.lambda,
                "residual": pair.residual,
                "iterations": pair.iterations,
            }),
        )
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, CliError> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    let ctx = Ctx::new(cfg)?;
    let outcome = match cli.command {
        Command::Lambda => cmd_lambda(&ctx)?,
        Command::Hstar => cmd_hstar(&ctx)?,
        Command::Critline => cmd_critline(&ctx)?,
        Command::VerifySpectral => {
            let (checks, results) = suites::spectral_suite(&ctx.params, &ctx.opts, ctx.cfg.h)?;
            suite_outcome(checks, results)
        }
        Command::Tau => cmd_tau(&ctx)?,
        Command::TwoPoint => cmd_two_point(&ctx)?,
        Command::VerifyMc => {
            let c = &ctx.cfg;
            let (checks, results) =
                suites::mc_suite(&ctx.params, &ctx.opts, c.n, c.k, c.buffer, c.trials, ctx.seed(), &ctx.runner)?;
            suite_outcome(checks, results)
        }
        Command::Diagram => cmd_diagram(&ctx)?,
        Command::Selftest => suite_outcome(suites::selftest(&ctx.runner)?, Value::Null),
    };
    let name = cli.command.name();
    if let Some(path) = ctx.artifact(&format!("{name}.json"))? {
        write_json(&path, &RunRecord::new(name, &ctx.cfg, outcome.results.clone(), &outcome.checks))?;
    }
    if outcome.checks.len() > 1 {
        for c in &outcome.checks {
            println!("{}", c.line());
        }
    }
    let passed = outcome.checks.iter().all(|c| c.pass);
    println!("{name}: {}{}", outcome.summary, if passed { "" } else { " [FAIL]" });
    Ok(if passed { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn suite_outcome(checks: Vec<Check>, results: Value) -> Outcome {
    let failed = checks.iter().filter(|c| !c.pass).count();
    Outcome {
        summary: format!("{} checks, {} passed, {failed} failed", checks.len(), checks.len() - failed),
        results,
        checks,
    }
}

fn cmd_lambda(ctx: &Ctx) -> Result<Outcome, CliError> {
    let (u, a) = (ctx.cfg.u, ctx.cfg.a);
    let lam_a = lambda_h(a, &ctx.params, &ctx.opts)?;
    let lam = lambda_ua(Level::new(u)?, a, &ctx.params, &ctx.opts)?;
    ctx.dump_spectral("lambda", a)?;
    let mut summary = format!("d={} a={a} u={u} lambda_a={lam_a:.12} lambda(u,a)={lam:.12}", ctx.cfg.d);
    let mut results = json!({"a": a, "u": u, "lambda_a": lam_a, "lambda_ua": lam});
    // the gap and the damped operator are defined for a >= 0 only
    if a >= 0.0 {
        let rho = ctx.cfg.rho;
        let gap = check_thm21(a, rho, &ctx.params, &ctx.opts)?;
        let tilde = lambda_tilde(a, rho, &ctx.params, &ctx.opts)?.lambda;
        summary.push_str(&format!(" rho={rho} gap={gap:.6e} lambda_tilde={tilde:.12}"));
        results["rho"] = json!(rho);
        results["gap"] = json!(gap);
        results["lambda_tilde"] = json!(tilde);
    }
    Ok(Outcome { summary, results, checks: vec![] })
}

fn cmd_hstar(ctx: &Ctx) -> Result<Outcome, CliError> {
    let hs = solve_h_star(&ctx.params, &ctx.opts, 1e-12)?;
    let lam = lambda_h(hs.h_star, &ctx.params, &ctx.opts)?;
    let bound = (2.0 * ctx.params.u_star()).sqrt();
    let residual = (lam - 1.0).abs();
    ctx.dump_spectral("hstar", hs.h_star)?;
    let check = Check::new(
        "hstar",
        residual <= 1e-8 && hs.h_star > 0.0 && hs.h_star < bound,
        format!("|lambda(h*) - 1| = {residual:.2e}, 0 < h* < sqrt(2u*) = {bound:.12}"),
    );
    Ok(Outcome {
        summary: format!("d={} h*={:.12} |lambda-1|={residual:.2e}", ctx.cfg.d, hs.h_star),
        results: json!({"h_star": hs.h_star, "bracket": [hs.bracket.0, hs.bracket.1], "residual": residual, "sqrt_2u_star": bound}),
        checks: vec![check],
    })
}

fn cmd_critline(ctx: &Ctx) -> Result<Outcome, CliError> {
    let dopts = DiagramOptions { spectral: ctx.opts, ..DiagramOptions::default() };
    let h_star = solve_h_star(&ctx.params, &ctx.opts, dopts.root_tol)?.h_star;
    let heights = critical_line_heights(h_star, &ctx.params, &dopts);
    let values = ctx.lambdas(&heights);
    let (mut rows, failures) = critical_line_rows(&heights, &values, &ctx.params, &dopts);
    rows.reverse();
    if let Some(path) = ctx.artifact("critline.csv")? {
        write_diagram_csv(std::fs::File::create(path)?, &rows)?;
    }
    let u0 = lambda_h(0.0, &ctx.params, &ctx.opts)?.ln() / ctx.params.decay_exponent();
    let decreasing = rows.windows(2).all(|w| w[1].a < w[0].a && w[1].u > w[0].u);
    Ok(Outcome {
        summary: format!("d={} {} points, h*={h_star:.10} u0={u0:.10}", ctx.cfg.d, rows.len()),
        results: json!({"h_star": h_star, "u0": u0, "points": rows.iter().map(|r| [r.u, r.a]).collect::<Vec<_>>(),
                        "failures": failures.iter().map(|f| json!({"a": f.a, "message": f.message})).collect::<Vec<_>>()}),
        checks: vec![Check::new(
            "critical line",
            failures.is_empty() && decreasing,
            format!("{} failures, a_c strictly decreasing: {decreasing}", failures.len()),
        )],
    })
}

fn cmd_tau(ctx: &Ctx) -> Result<Outcome, CliError> {
    let c = &ctx.cfg;
    let prof = estimate_tau_n(Level::new(c.u)?, c.a, c.n, c.trials, &ctx.params, ctx.seed(), DEFAULT_EXPLORE_CAP, &ctx.runner)?;
    if let Some(path) = ctx.artifact("tau.csv")? {
        write_tau_csv(std::fs::File::create(path)?, &prof)?;
    }
    let e = prof.at(c.n);
    Ok(Outcome {
        summary: format!("u={} a={} n={} tau={:.6} +- {:.6} ({} capped)", c.u, c.a, c.n, e.estimate, e.stderr, prof.capped()),
        results: json!({"tau": prof.estimates().iter().map(|e| json!({"successes": e.successes, "trials": e.trials, "estimate": e.estimate, "stderr": e.stderr})).collect::<Vec<_>>(),
                        "capped": prof.capped()}),
        checks: vec![],
    })
}

fn cmd_two_point(ctx: &Ctx) -> Result<Outcome, CliError> {
    let c = &ctx.cfg;
    let level = Level::new(c.u)?;
    let est = estimate_two_point(level, c.a, c.n, c.trials, &ctx.params, ctx.seed(), &ctx.runner)?;
    let vac = ctx.params.vacancy_probs(level);
    let pred = vac.p0 * vac.p.powi(c.n as i32) * two_point_prediction(c.a, c.n, &ctx.params, &ctx.opts)?;
    let se = (pred * (1.0 - pred) / c.trials as f64).sqrt();
    let z = if se > 0.0 { (est.estimate - pred) / se } else { 0.0 };
    Ok(Outcome {
        summary: format!("u={} a={} n={} estimate={:.6} prediction={pred:.6} z={z:.2}", c.u, c.a, c.n, est.estimate),
        results: json!({"estimate": est.estimate, "stderr": est.stderr, "successes": est.successes, "trials": est.trials, "prediction": pred, "z": z}),
        checks: vec![Check::new("two-point", z.abs() <= STAT_K, format!("z = {z:.2}"))],
    })
}

fn cmd_diagram(ctx: &Ctx) -> Result<Outcome, CliError> {
    let u_grid = parse_grid(&ctx.cfg.u_grid)?;
    let a_grid = parse_grid(&ctx.cfg.a_grid)?;
    let dopts = DiagramOptions { spectral: ctx.opts, ..DiagramOptions::default() };
    let dg = build_diagram_with(&ctx.params, &u_grid, &a_grid, ctx.cfg.eps, &dopts, |h| ctx.lambdas(h))?;
    if let Some(path) = ctx.artifact("diagram.csv")? {
        write_diagram_csv(std::fs::File::create(path)?, &dg.rows)?;
    }
    let s = &dg.summary;
    let assertions = json!({
        "line_through_hstar": s.line_through_hstar,
        "hstar_arc_supercritical": s.hstar_arc_supercritical,
        "sqrt2ustar_arc_subcritical": s.sqrt2ustar_arc_subcritical,
        "critical_line_decreasing": s.critical_line_decreasing,
    });
    let summary_json = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": ctx.cfg,
        "params": {"d": ctx.cfg.d, "sigma2": ctx.params.sigma2(), "node_count": ctx.cfg.node_count, "m": ctx.cfg.m, "eps": ctx.cfg.eps},
        "h_star": s.h_star,
        "u_star": s.u_star,
        "u0": s.u0,
        "assertions": assertions,
        "passed": s.all_passed(),
        "failures": dg.failures.iter().map(|f| json!({"source": f.source.as_str(), "u": f.u, "a": f.a, "message": f.message})).collect::<Vec<_>>(),
    });
    if let Some(path) = ctx.artifact("diagram-summary.json")? {
        write_json(&path, &summary_json)?;
    }
    let checks = vec![
        Check::new("critical line through (0, h*)", s.line_through_hstar, format!("h* = {:.10}", s.h_star)),
        Check::new("h* arc supercritical", s.hstar_arc_supercritical, "lambda > 1 for u > 0"),
        Check::new("sqrt(2u*) arc subcritical", s.sqrt2ustar_arc_subcritical, format!("eps = {}", s.eps)),
        Check::new("a_c strictly decreasing", s.critical_line_decreasing, "along the traced line"),
    ];
    Ok(Outcome {
        summary: format!("{} rows, {} failed cells, h*={:.10} u*={:.10} u0={:.10}", dg.rows.len(), dg.failures.len(), s.h_star, s.u_star, s.u0),
        results: summary_json,
        checks,
    })
}
