//! Batch front-end: solve and sensitivity jobs from TOML configs, the
//! verification suites as CSV tables, and the unit-ball witness.
//!
//! Exit codes: 0 ok, 2 configuration or parameter error, 3 domain error,
//! 4 non-convergence or uncertified contraction, 5 check failure. Errors
//! are mirrored as a JSON object on stderr.

mod config;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use holocurve_core::chifun::unboundedness_witness;
use holocurve_core::lincomplex::C64;
use holocurve_core::odesolve::{picard_solve, solution_map_derivative, Certify};
use holocurve_core::verify::run_suite;
use holocurve_core::{Error, Result};

use config::JobConfig;
use report::{
    curve_samples, grid_doc, write_csv, write_json, SensitivityDoc, SolveDoc, SolveSummary,
    WitnessDoc, VERSION,
};

#[derive(Parser)]
#[command(name = "holocurve", version = VERSION, about = "contour-calculus engine")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Picard-solve y' = phi o [id, y], y(t0) = xi, and write a JSON report.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Iterate even when the contraction condition is not certified.
        #[arg(long)]
        force: bool,
    },
    /// Solve, then differentiate the solution map in direction (dxi, dphi)
    /// and cross-check against a central difference quotient.
    Sensitivity {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Run a verification suite and write a CSV table.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a unit-ball vector where chi exceeds the target.
    ChiWitness {
        #[arg(long)]
        target: f64,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn exit_class(e: &Error) -> (i32, &'static str) {
    match e {
        Error::Parameter(_) | Error::Parse { .. } | Error::WitnessUnreachable { .. } => {
            (2, "config")
        }
        Error::Domain { .. } | Error::DegenerateDomain(_) | Error::Evaluation { .. } => {
            (3, "domain")
        }
        Error::NonConvergence { .. } | Error::NotCertified { .. } => (4, "convergence"),
    }
}

fn fail(e: Error) -> ExitCode {
    let (code, kind) = exit_class(&e);
    let detail = match &e {
        Error::WitnessUnreachable {
            suggested_dimension,
            ..
        } => serde_json::json!({ "suggested_dimension": suggested_dimension }),
        _ => serde_json::Value::Null,
    };
    let obj = serde_json::json!({
        "error": { "kind": kind, "exit": code, "message": e.to_string(), "detail": detail }
    });
    eprintln!("{obj}");
    ExitCode::from(code as u8)
}

fn init_thread_pool() -> Result<()> {
    if let Ok(raw) = std::env::var("HOLOCURVE_THREADS") {
        let n: usize = raw.parse().map_err(|_| {
            Error::Parameter(format!("HOLOCURVE_THREADS must be a positive integer, got '{raw}'"))
        })?;
        if n == 0 {
            return Err(Error::Parameter(
                "HOLOCURVE_THREADS must be at least 1".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Parameter(format!("thread pool setup failed: {e}")))?;
    }
    Ok(())
}

fn load(config: &Path, seed: Option<u64>, out: Option<PathBuf>, force: bool) -> Result<(JobConfig, PathBuf)> {
    let (mut cfg, base) = JobConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    if force {
        cfg.force = Some(true);
    }
    Ok((cfg, base))
}

fn cmd_solve(config: &Path, seed: Option<u64>, out: Option<PathBuf>, force: bool) -> Result<()> {
    let (cfg, base) = load(config, seed, out, force)?;
    let phi = cfg.load_phi(&base)?;
    let xi = cfg.parse_xi(phi.dim())?;
    let opts = cfg.picard_options(cfg.force.unwrap_or(false))?;
    let report = picard_solve(&phi, &xi, &opts)?;
    let doc = SolveDoc::new(cfg.seed(), &report, &cfg);
    let path = PathBuf::from(cfg.out.clone().unwrap_or_else(|| "solve-report.json".into()));
    write_json(&path, &doc)?;
    eprintln!(
        "solve: {} iterations, residual {:.3e}, condition_ok={} -> {}",
        report.iterations,
        report.residual,
        report.condition_ok,
        path.display()
    );
    Ok(())
}

fn cmd_sensitivity(
    config: &Path,
    seed: Option<u64>,
    out: Option<PathBuf>,
    force: bool,
) -> Result<i32> {
    let (cfg, base) = load(config, seed, out, force)?;
    let phi = cfg.load_phi(&base)?;
    let dphi = cfg.load_dphi(&base, &phi)?;
    let xi = cfg.parse_xi(phi.dim())?;
    let dxi = cfg.parse_dxi(phi.dim())?;
    let opts = cfg.picard_options(cfg.force.unwrap_or(false))?;
    let base_report = picard_solve(&phi, &xi, &opts)?;

    let v = solution_map_derivative(
        &phi,
        &base_report.solution,
        &dxi,
        dphi.as_ref(),
        &opts.contour,
        opts.tol,
        opts.max_iter,
    )?;

    // Central difference quotient of the solution map; the perturbed
    // solves reuse the base certificate rather than re-deciding it.
    let h = cfg.cross_check_step();
    let ch = C64::new(h, 0.0);
    let fd_opts = holocurve_core::odesolve::PicardOptions {
        certify: Certify::Force,
        ..opts
    };
    let zero_dphi = phi.with_expr(holocurve_core::fieldexpr::FieldExpr::zero(phi.dim()))?;
    let dphi_ref = dphi.as_ref().unwrap_or(&zero_dphi);
    let plus = picard_solve(&phi.add_scaled(ch, dphi_ref)?, &xi.axpy(ch, &dxi), &fd_opts)?;
    let minus = picard_solve(&phi.add_scaled(-ch, dphi_ref)?, &xi.axpy(-ch, &dxi), &fd_opts)?;
    let quotient = plus
        .solution
        .sub(&minus.solution)
        .scale(C64::new(0.5 / h, 0.0));
    let cross_check_error = quotient.sub(&v).sup_norm(phi.domain().norm_p());
    let ok = cross_check_error <= cfg.cross_check_tol();

    let doc = SensitivityDoc {
        version: VERSION,
        command: "sensitivity",
        seed: cfg.seed(),
        base: SolveSummary {
            condition_ok: base_report.condition_ok,
            b1: base_report.b1,
            contraction: base_report.contraction,
            iterations: base_report.iterations,
            residual: base_report.residual,
        },
        cross_check_step: h,
        cross_check_error,
        cross_check_ok: ok,
        grid: grid_doc(&v),
        derivative: curve_samples(&v),
        config: &cfg,
    };
    let path = PathBuf::from(
        cfg.out
            .clone()
            .unwrap_or_else(|| "sensitivity-report.json".into()),
    );
    write_json(&path, &doc)?;
    eprintln!(
        "sensitivity: cross-check error {:.3e} (tol {:.1e}) -> {}",
        cross_check_error,
        cfg.cross_check_tol(),
        path.display()
    );
    Ok(if ok { 0 } else { 5 })
}

fn cmd_verify(
    suite: Option<String>,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<i32> {
    let (mut cfg, _base) = match &config {
        Some(p) => JobConfig::load(p)?,
        None => (JobConfig::default(), PathBuf::from(".")),
    };
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    let suite = suite
        .or_else(|| cfg.verify.as_ref().and_then(|v| v.suite.clone()))
        .unwrap_or_else(|| "all".into());
    let vc = cfg.verify_config()?;
    let rows = run_suite(&suite, &vc)?;
    let path = PathBuf::from(
        cfg.out
            .clone()
            .unwrap_or_else(|| format!("verify-{suite}.csv")),
    );
    write_csv(&path, &rows)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    eprintln!(
        "verify[{suite}]: {} checks, {} failed -> {}",
        rows.len(),
        failed,
        path.display()
    );
    Ok(if failed == 0 { 0 } else { 5 })
}

fn cmd_chi_witness(
    target: f64,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<()> {
    let (mut cfg, _base) = match &config {
        Some(p) => JobConfig::load(p)?,
        None => (JobConfig::default(), PathBuf::from(".")),
    };
    if let Some(s) = seed {
        cfg.seed = Some(s);
    }
    if let Some(o) = out {
        cfg.out = Some(o.to_string_lossy().into_owned());
    }
    let dimension = cfg.dimension.unwrap_or(100);
    let (x, value) = unboundedness_witness(target, dimension)?;
    let index = (0..x.dim())
        .find(|&i| x.get(i).norm() > 0.0)
        .unwrap_or(0);
    let doc = WitnessDoc {
        version: VERSION,
        command: "chi-witness",
        seed: cfg.seed(),
        target,
        dimension,
        index,
        value: [value.re, value.im],
        norm_l1: x.pnorm(1.0),
        norm_l2: x.pnorm(2.0),
        config: &cfg,
    };
    let path = PathBuf::from(cfg.out.clone().unwrap_or_else(|| "chi-witness.json".into()));
    write_json(&path, &doc)?;
    eprintln!(
        "chi-witness: index {index}, value {:.4} (target {target}) -> {}",
        value.re,
        path.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    init_thread_pool()?;
    match cli.cmd {
        Cmd::Solve {
            config,
            seed,
            out,
            force,
        } => cmd_solve(&config, seed, out, force).map(|()| 0),
        Cmd::Sensitivity {
            config,
            seed,
            out,
            force,
        } => cmd_sensitivity(&config, seed, out, force),
        Cmd::Verify {
            suite,
            config,
            seed,
            out,
        } => cmd_verify(suite, config, seed, out),
        Cmd::ChiWitness {
            target,
            config,
            seed,
            out,
        } => cmd_chi_witness(target, config, seed, out).map(|()| 0),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(0) => ExitCode::SUCCESS,
        Ok(code) => {
            let obj = serde_json::json!({
                "error": { "kind": "check", "exit": code, "message": "one or more checks failed" }
            });
            eprintln!("{obj}");
            ExitCode::from(code as u8)
        }
        Err(e) => fail(e),
    }
}
