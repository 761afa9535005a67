use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lucas_tau::analysis::{convergence_sweep, sweep_csv, SweepOptions};
use lucas_tau::op_matrices::{build_d, build_stretch, format_complex, power_d};
use lucas_tau::tau_solver::{problems, NewtonOptions, ProblemSpec, SolveError, SolveReport, TauSolver};
use lucas_tau::verify::{run_all, VerifyOptions};
use lucas_tau::{BasisConfig, WaveletBasis, WaveletIndex};
use thiserror::Error;

use crate::problem_file::read_problem_file;
use crate::{DumpArgs, Format, SolveArgs, SweepArgs, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Solver(_) => 2,
        }
    }
}

fn config(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

fn load_problem(name: &str) -> Result<ProblemSpec, CliError> {
    if let Some(p) = problems::by_name(name) {
        return Ok(p);
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Config(format!(
            "`{name}` is neither a built-in problem (lane-emden-1, pantograph-2) nor a file"
        )));
    }
    read_problem_file(path).map_err(config)
}

fn check_order(s: usize) -> Result<(), CliError> {
    if s < 3 {
        return Err(CliError::Config(format!("S must be ≥ 3 (got {s})")));
    }
    Ok(())
}

fn emit(output: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| config(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn solve(a: &SolveArgs) -> Result<u8, CliError> {
    check_order(a.s)?;
    let prob = load_problem(&a.common.problem)?;
    let mut cfg = BasisConfig::new(a.k, a.s, prob.length()).map_err(config)?;
    if let Some(q) = a.common.quad_order {
        cfg = cfg.with_quad_order(q).map_err(config)?;
    }
    let solver = TauSolver::new(cfg).map_err(config)?;
    let opts = NewtonOptions {
        tol: a.common.tol,
        max_iter: a.common.max_iter,
        ..NewtonOptions::default()
    };
    let (report, status, code) = match solver.solve(&prob, &opts) {
        Ok(r) => (r, "converged".to_string(), 0),
        Err(SolveError::NonConvergence {
            iterations,
            residual,
            best,
        }) => (
            *best,
            format!("not converged after {iterations} iterations (residual {residual:e})"),
            2,
        ),
        Err(SolveError::Problem(e @ lucas_tau::Error::NonFinite { .. })) => {
            return Err(CliError::Solver(format!("right-hand side failed: {e}")))
        }
        Err(e @ SolveError::SingularJacobian { .. }) => return Err(CliError::Solver(e.to_string())),
        Err(SolveError::Problem(e)) => return Err(config(e)),
    };
    let text = render_solve(&prob, &cfg, &report, &status, a.common.format);
    emit(a.common.output.as_ref(), &text)?;
    if code != 0 {
        eprintln!("error: {status}");
    }
    Ok(code)
}

fn render_solve(prob: &ProblemSpec, cfg: &BasisConfig, rep: &SolveReport, status: &str, format: Format) -> String {
    let summary = [
        ("problem", prob.name().to_string()),
        ("k", cfg.k().to_string()),
        ("S", cfg.order().to_string()),
        ("quad_order", cfg.quad_order().to_string()),
        ("status", status.to_string()),
        ("newton_iters", rep.newton_iters.to_string()),
        ("residual_norm", sci(rep.residual_norm)),
        ("condition_residual_1", sci(rep.condition_residuals[0])),
        ("condition_residual_2", sci(rep.condition_residuals[1])),
        ("max_imag", sci(rep.max_imag)),
        ("system_residual", sci(rep.system_residual)),
    ];
    let coeffs: Vec<[String; 5]> = rep
        .coefficients()
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let idx = WaveletIndex::from_flat(cfg, j);
            [j.to_string(), idx.h.to_string(), idx.s.to_string(), sci(z.re), sci(z.im)]
        })
        .collect();
    let errors: Vec<[String; 4]> = match prob.exact() {
        None => Vec::new(),
        Some(exact) => (0..11)
            .map(|i| {
                let t = prob.length() * i as f64 / 10.0;
                let approx = rep.solution.eval(t);
                let want = exact(t);
                [format!("{t:.2}"), sci(approx.re), sci(want), sci((approx - want).norm())]
            })
            .collect(),
    };

    let mut out = String::new();
    match format {
        Format::Csv => {
            for (key, value) in &summary {
                let _ = writeln!(out, "# {key}={value}");
            }
            out.push_str("j,h,s,re,im\n");
            for row in &coeffs {
                let _ = writeln!(out, "{}", row.join(","));
            }
            if !errors.is_empty() {
                out.push_str("\ntheta,approx,exact,abs_error\n");
                for row in &errors {
                    let _ = writeln!(out, "{}", row.join(","));
                }
            }
        }
        Format::Table => {
            for (key, value) in &summary {
                let _ = writeln!(out, "{key:<22}{value}");
            }
            out.push_str("\ncoefficients\n");
            out.push_str(&align(&["j", "h", "s", "re", "im"], coeffs.iter().map(|r| r.as_slice())));
            if !errors.is_empty() {
                out.push_str("\nerrors\n");
                out.push_str(&align(&["theta", "approx", "exact", "abs_error"], errors.iter().map(|r| r.as_slice())));
            }
        }
    }
    out
}

fn align<'a>(header: &[&str], rows: impl Iterator<Item = &'a [String]> + Clone) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows.clone() {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let mut out = String::new();
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        let _ = writeln!(out, "{}", padded.join("  "));
    };
    line(header.to_vec(), &mut out);
    for row in rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    out
}

/// Parses `3,4,5`, `3..6` (inclusive) or a mix such as `3..5,8`.
fn parse_list<T: std::str::FromStr + Copy + Into<u64> + TryFrom<u64>>(flag: &str, text: &str) -> Result<Vec<T>, CliError> {
    let bad = || CliError::Config(format!("--{flag}: cannot read `{text}` as a list"));
    let mut out = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: T = lo.trim().parse().map_err(|_| bad())?;
            let hi: T = hi.trim().parse().map_err(|_| bad())?;
            let (lo, hi) = (lo.into(), hi.into());
            if lo > hi {
                return Err(bad());
            }
            for v in lo..=hi {
                out.push(T::try_from(v).map_err(|_| bad())?);
            }
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("--{flag} list is empty")));
    }
    Ok(out)
}

pub fn sweep(a: &SweepArgs) -> Result<u8, CliError> {
    let ks: Vec<u32> = parse_list("k", &a.k)?;
    let ss: Vec<usize> = parse_list::<u32>("S", &a.s)?.into_iter().map(|s| s as usize).collect();
    for &s in &ss {
        check_order(s)?;
    }
    let prob = load_problem(&a.common.problem)?;
    if prob.exact().is_none() {
        return Err(config(format!(
            "problem `{}` has no exact solution to measure errors against",
            prob.name()
        )));
    }
    let opts = SweepOptions {
        newton: NewtonOptions {
            tol: a.common.tol,
            max_iter: a.common.max_iter,
            ..NewtonOptions::default()
        },
        quad_order: a.common.quad_order,
        ..SweepOptions::default()
    };
    if let Some(q) = a.common.quad_order {
        let s_max = *ss.iter().max().expect("nonempty");
        BasisConfig::new(0, s_max, prob.length())
            .and_then(|c| c.with_quad_order(q))
            .map_err(config)?;
    }
    let rows = convergence_sweep(&prob, &ks, &ss, &opts).map_err(config)?;
    let csv = sweep_csv(&rows, !a.no_timing);
    let text = match a.common.format {
        Format::Csv => csv,
        Format::Table => {
            let mut lines = csv.lines().map(|l| l.split(',').map(String::from).collect::<Vec<_>>());
            let header = lines.next().expect("header row");
            let body: Vec<Vec<String>> = lines.collect();
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            align(&header, body.iter().map(Vec::as_slice))
        }
    };
    emit(a.common.output.as_ref(), &text)?;
    let failed: Vec<String> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().err().map(|e| format!("k={} S={}: {e}", r.k, r.s)))
        .collect();
    for f in &failed {
        eprintln!("error: {f}");
    }
    Ok(if failed.is_empty() { 0 } else { 2 })
}

pub fn verify(a: &VerifyArgs) -> Result<u8, CliError> {
    if a.quad_order == Some(0) {
        return Err(config("--quad-order must be positive"));
    }
    let results = run_all(&VerifyOptions {
        quad_order: a.quad_order,
    });
    let mut out = String::new();
    for r in &results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {}: {}", r.name, r.detail);
    }
    emit(a.output.as_ref(), &out)?;
    Ok(if results.iter().all(|r| r.passed) { 0 } else { 3 })
}

pub fn dump_matrices(a: &DumpArgs) -> Result<u8, CliError> {
    if a.s == 0 {
        return Err(config("S must be ≥ 1"));
    }
    let mut cfg = BasisConfig::new(a.k, a.s, 2.0).map_err(config)?;
    if let Some(q) = a.quad_order {
        cfg = cfg.with_quad_order(q).map_err(config)?;
    }
    let basis = WaveletBasis::new(cfg);
    let d = build_d(&basis);
    let mut out = String::new();
    let _ = writeln!(out, "# D (k={}, S={}, dimension {})", a.k, a.s, d.dimension());
    out.push_str(&d.to_table());
    if a.s >= 3 {
        let d2 = power_d(&d, 2).map_err(config)?;
        let _ = writeln!(out, "\n# D^2");
        out.push_str(&d2.to_table());
    }
    if let Some(alpha) = a.alpha {
        let p = build_stretch(&basis, alpha).map_err(config)?;
        let _ = writeln!(out, "\n# P (alpha={alpha})");
        out.push_str(&p.to_table());
    }
    let _ = writeln!(out, "\n# normalisation");
    for s in 0..a.s {
        let _ = writeln!(out, "N_{s}\t{}", format_complex(basis.normalisation(s).into()));
    }
    emit(a.output.as_ref(), &out)?;
    Ok(0)
}
