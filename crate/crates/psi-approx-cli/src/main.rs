//! Command line front end: single error computations, parameter sweeps,
//! method comparisons and kernel dumps, with CSV/JSON persistence.

mod parse;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use parse::{parse_f64_list, parse_method, parse_n_list, parse_p_rule, parse_psi, PRule};
use psi_approx::asymptotics;
use psi_approx::oracle::{class_error_for_multipliers, DeviationKernel};
use psi_approx::psi_class::ClassParams;
use psi_approx::summation::build_multipliers;
use psi_approx::PsiSpec;
use rayon::prelude::*;
use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(name = "psi-approx", version, about = "Approximation errors of ramped trigonometric sums on weighted periodic classes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct ClassArgs {
    /// Weight spec: power:r=2 | powerlog:r=1,b=1 | exp:alpha=0.7,r=1 | log | tab:file=path.csv
    #[arg(long)]
    psi: String,
    /// Phase parameter of the class
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Quadrature tolerance
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args, Clone)]
struct RampArgs {
    /// Fixed ramp width
    #[arg(long, conflicts_with = "p_rule")]
    p: Option<usize>,
    /// Ramp width rule: const:<k> | half_n | t_of_n | one
    #[arg(long)]
    p_rule: Option<String>,
}

impl RampArgs {
    fn rule(&self) -> Result<PRule> {
        match (&self.p, &self.p_rule) {
            (Some(p), None) => Ok(PRule::Const(*p)),
            (None, Some(r)) => parse_p_rule(r),
            (None, None) => Err(anyhow!("one of --p or --p-rule is required")),
            (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Show weight values and half-decay characteristics at given points
    PsiShow {
        /// Weight spec
        #[arg(long)]
        psi: String,
        /// Comma-separated evaluation points, each >= 1
        #[arg(long)]
        t: String,
    },
    /// Compute the class error of one operator at one (n, p)
    Error {
        #[command(flatten)]
        class: ClassArgs,
        /// Operator order parameter
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        ramp: RampArgs,
        /// Method tag: u | vp | fourier | fejer | zygmund:s=<v> | genz:file=<phi.csv>
        #[arg(long, default_value = "u")]
        method: String,
        /// Output directory for CSV and manifest
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep class errors over orders and methods
    Sweep {
        #[command(flatten)]
        class: ClassArgs,
        /// Orders: comma list or geometric range a:b:geomK
        #[arg(long)]
        n: String,
        #[command(flatten)]
        ramp: RampArgs,
        /// Comma-separated method tags
        #[arg(long, default_value = "u")]
        methods: String,
        /// Output directory for CSV and manifest
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare methods at one (n, p)
    Compare {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        ramp: RampArgs,
        /// Comma-separated method tags
        #[arg(long, default_value = "u,vp")]
        methods: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the deviation kernel on a uniform grid
    KernelDump {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        ramp: RampArgs,
        #[arg(long, default_value = "u")]
        method: String,
        /// Number of uniform grid points over one period
        #[arg(long)]
        grid: usize,
        /// Output directory for CSV and manifest
        #[arg(long)]
        out: PathBuf,
    },
}

/// One computed result row.
struct Row {
    n: usize,
    p: usize,
    method: String,
    error: f64,
    main_term: f64,
    a_value: f64,
    remainder: f64,
    err_estimate: f64,
    runtime_ms: u128,
}

impl Row {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.p,
            self.method,
            self.error,
            self.main_term,
            self.a_value,
            self.remainder,
            self.err_estimate,
            self.runtime_ms
        )
    }
}

const CSV_HEADER: &str = "n,p,method,error,main_term,A,remainder,err_estimate,runtime_ms";

/// Ramp width actually used by a method at order `n`: the partial-sum and
/// full-taper methods fix their own width.
fn effective_p(method_tag: &str, rule: &PRule, psi: &PsiSpec, n: usize) -> Result<usize> {
    let family = method_tag.split(':').next().unwrap_or(method_tag);
    Ok(match family {
        "fourier" => 1,
        "fejer" | "zygmund" | "genz" => n,
        _ => rule.apply(psi, n)?,
    })
}

fn compute_row(
    psi: &PsiSpec,
    beta: f64,
    n: usize,
    p: usize,
    method_tag: &str,
    tol: f64,
) -> Result<Row> {
    let started = Instant::now();
    let method = parse_method(method_tag, psi)?;
    let params = ClassParams::new(psi.clone(), beta);
    let mult = build_multipliers(method, n, p)?;
    let measured = class_error_for_multipliers(&params, &mult, tol)?;
    let est = asymptotics::estimate(psi, n, p)?;
    let psi_n = psi.eval(n as f64)?;
    let remainder = measured.value / psi_n - (4.0 / (PI * PI)) * est.a_value;
    Ok(Row {
        n,
        p,
        method: method_tag.to_string(),
        error: measured.value,
        main_term: est.main_term,
        a_value: est.a_value,
        remainder,
        err_estimate: measured.err_estimate,
        runtime_ms: started.elapsed().as_millis(),
    })
}

fn print_rows(rows: &[Row]) {
    println!("{:>6} {:>6} {:>10} {:>14} {:>14} {:>10} {:>12} {:>13} {:>8}",
        "n", "p", "method", "error", "main_term", "A", "remainder", "err_est", "ms");
    for r in rows {
        println!(
            "{:>6} {:>6} {:>10} {:>14.6e} {:>14.6e} {:>10.5} {:>12.5} {:>13.3e} {:>8}",
            r.n, r.p, r.method, r.error, r.main_term, r.a_value, r.remainder, r.err_estimate,
            r.runtime_ms
        );
    }
}

fn write_outputs(out: &Path, rows: &[Row], config: serde_json::Value, tol: f64) -> Result<()> {
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in rows {
        csv.push_str(&r.csv());
        csv.push('\n');
    }
    std::fs::write(out.join("rows.csv"), csv).context("writing rows.csv")?;
    let manifest = json!({
        "config": config,
        "tolerances": {
            "quad_tol": tol,
            "tail_tolerance_fraction": 0.01,
            "per_row_err_estimates": rows.iter().map(|r| r.err_estimate).collect::<Vec<_>>(),
        },
        "version": env!("CARGO_PKG_VERSION"),
        "started_at": chrono::Utc::now().to_rfc3339(),
        "rows_written": rows.len(),
    });
    std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)
        .context("writing manifest.json")?;
    println!("wrote {} rows to {}", rows.len(), out.join("rows.csv").display());
    Ok(())
}

fn validate_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(anyhow!(psi_approx::Error::InvalidParams(format!(
            "tol must be in (0, 0.1], got {tol}"
        ))));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::PsiShow { psi, t } => {
            let spec = parse_psi(&psi)?;
            let points = parse_f64_list(&t)?;
            println!("{:>12} {:>14} {:>14} {:>14} {:>14}", "t", "psi", "eta", "T", "mu");
            for t in points {
                let c = spec.characteristics(t)?;
                println!(
                    "{:>12.6} {:>14.8e} {:>14.6} {:>14.6} {:>14.6}",
                    c.t, c.psi, c.eta, c.period, c.mu
                );
            }
        }
        Cmd::Error { class, n, ramp, method, out } => {
            validate_tol(class.tol)?;
            let psi = parse_psi(&class.psi)?;
            let rule = ramp.rule()?;
            let p = effective_p(&method, &rule, &psi, n)?;
            let row = compute_row(&psi, class.beta, n, p, &method, class.tol)?;
            print_rows(std::slice::from_ref(&row));
            if let Some(out) = out {
                let config = json!({
                    "command": "error", "psi": class.psi, "beta": class.beta,
                    "n": n, "p": p, "method": method, "tol": class.tol,
                });
                write_outputs(&out, std::slice::from_ref(&row), config, class.tol)?;
            }
        }
        Cmd::Sweep { class, n, ramp, methods, out } => {
            validate_tol(class.tol)?;
            let psi = parse_psi(&class.psi)?;
            let rule = ramp.rule()?;
            let n_list = parse_n_list(&n)?;
            let method_tags: Vec<String> =
                methods.split(',').map(|m| m.trim().to_string()).collect();
            for tag in &method_tags {
                parse_method(tag, &psi)?;
            }
            let mut jobs = Vec::new();
            for &n in &n_list {
                for tag in &method_tags {
                    jobs.push((n, effective_p(tag, &rule, &psi, n)?, tag.clone()));
                }
            }
            let mut rows = jobs
                .into_par_iter()
                .map(|(n, p, tag)| compute_row(&psi, class.beta, n, p, &tag, class.tol))
                .collect::<Result<Vec<_>>>()?;
            rows.sort_by(|a, b| (a.n, a.p, &a.method).cmp(&(b.n, b.p, &b.method)));
            print_rows(&rows);
            let config = json!({
                "command": "sweep", "psi": class.psi, "beta": class.beta,
                "n": n_list, "p_rule": format!("{rule:?}"), "methods": method_tags,
                "tol": class.tol,
            });
            write_outputs(&out, &rows, config, class.tol)?;
        }
        Cmd::Compare { class, n, ramp, methods, out } => {
            validate_tol(class.tol)?;
            let psi = parse_psi(&class.psi)?;
            let rule = ramp.rule()?;
            let method_tags: Vec<String> =
                methods.split(',').map(|m| m.trim().to_string()).collect();
            let rows = method_tags
                .iter()
                .map(|tag| {
                    let p = effective_p(tag, &rule, &psi, n)?;
                    compute_row(&psi, class.beta, n, p, tag, class.tol)
                })
                .collect::<Result<Vec<_>>>()?;
            print_rows(&rows);
            for r in rows.iter().skip(1) {
                println!(
                    "ratio {}/{} = {:.6e}",
                    rows[0].method,
                    r.method,
                    rows[0].error / r.error
                );
            }
            if let Some(out) = out {
                let config = json!({
                    "command": "compare", "psi": class.psi, "beta": class.beta,
                    "n": n, "p_rule": format!("{rule:?}"), "methods": method_tags,
                    "tol": class.tol,
                });
                write_outputs(&out, &rows, config, class.tol)?;
            }
        }
        Cmd::KernelDump { class, n, ramp, method, grid, out } => {
            validate_tol(class.tol)?;
            if grid == 0 {
                return Err(anyhow!("grid size must be positive"));
            }
            let psi = parse_psi(&class.psi)?;
            let rule = ramp.rule()?;
            let p = effective_p(&method, &rule, &psi, n)?;
            let params = ClassParams::new(psi.clone(), class.beta);
            let mult = build_multipliers(parse_method(&method, &psi)?, n, p)?;
            let psi_n = psi.eval(n as f64)?;
            let kernel = DeviationKernel::new(&params, &mult, class.tol * psi_n / 100.0)?;
            std::fs::create_dir_all(&out)
                .with_context(|| format!("cannot create {}", out.display()))?;
            // the tail cost scales with 1/|t|, so a constant tolerance is
            // unaffordable at grid points next to t = 0; relax it there the
            // same way the quadrature does
            let eps_tail = class.tol * psi_n / 100.0;
            let t0 = PI / n as f64;
            let mut csv = String::from("t,K\n");
            for j in 0..grid {
                let t = -PI + 2.0 * PI * j as f64 / grid as f64;
                let eps = eps_tail * (t0 / t.abs().max(1e-8)).max(1.0);
                let (k, _) = kernel.eval_with_tol(t, eps)?;
                csv.push_str(&format!("{t},{k}\n"));
            }
            std::fs::write(out.join("kernel.csv"), csv).context("writing kernel.csv")?;
            let manifest = json!({
                "config": {
                    "command": "kernel-dump", "psi": class.psi, "beta": class.beta,
                    "n": n, "p": p, "method": method, "tol": class.tol, "grid": grid,
                },
                "tolerances": { "quad_tol": class.tol, "tail_tolerance_fraction": 0.01 },
                "version": env!("CARGO_PKG_VERSION"),
                "started_at": chrono::Utc::now().to_rfc3339(),
                "rows_written": grid,
            });
            std::fs::write(out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)
                .context("writing manifest.json")?;
            println!("wrote {grid} kernel samples to {}", out.join("kernel.csv").display());
        }
    }
    Ok(())
}

/// Exit 2 for configuration problems, 3 when the numerics did not converge.
fn exit_code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<psi_approx::Error>() {
            match e {
                psi_approx::Error::NonConvergence(_)
                | psi_approx::Error::TailBudget { .. }
                | psi_approx::Error::PanelBudget { .. } => return 3,
                _ => return 2,
            }
        }
    }
    2
}

fn main() {
    if let Ok(threads) = std::env::var("PSI_APPROX_THREADS") {
        if let Ok(k) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(exit_code_for(&e));
    }
}
