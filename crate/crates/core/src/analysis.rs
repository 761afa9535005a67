//! Coefficient-decay bounds, the truncation error estimate, integral-test
//! remainders and empirical convergence measurement.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::num::NonZeroUsize;
use std::sync::Arc;
use std::time::Instant;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

use crate::error::{invalid, Result};
pub use crate::tau_solver::ErrorSummary;
use crate::tau_solver::{NewtonOptions, ProblemSpec, SolveError, TauSolver};
use crate::wavelet_basis::{BasisConfig, CoefficientVector, WaveletBasis, WaveletIndex};

/// Bound on `|E_{h,s}|` for a function with `|rho''| <= n`:
/// `2 n sqrt(pi) / ((h+1)^{5/2} (s^2 - 1))` for `s > 1`, and
/// `sqrt(pi) / (h+1)^{3/2} * max|rho'|` for `s = 1`.
pub fn coeff_bound(h: usize, s: usize, n: f64, max_rho_prime: f64) -> Result<f64> {
    let h1 = (h + 1) as f64;
    match s {
        0 => invalid("no coefficient bound exists for s = 0"),
        1 => {
            if !(max_rho_prime >= 0.0) {
                return invalid("max |rho'| must be nonnegative");
            }
            Ok(PI.sqrt() / h1.powf(1.5) * max_rho_prime)
        }
        _ => {
            if !(n > 0.0) {
                return invalid("N must be positive");
            }
            let s = s as f64;
            Ok(2.0 * n * PI.sqrt() / (h1.powf(2.5) * (s * s - 1.0)))
        }
    }
}

/// Literal value of the truncation error estimate.
///
/// `value` is NaN whenever the radicand is negative; the radicand is kept so
/// callers can see by how much.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub radicand: f64,
    pub value: f64,
}

impl ErrorEstimate {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }
}

/// `sqrt( N^2 pi / (2^{5(2^k-1)-2} 5 ln 2)
///        * ((S^2-2S) ln S - S^2 ln(S-2) + (2 ln(S-2) - 2) S + 2) / (4 S (S-2)) )`
pub fn error_estimate(k: u32, s: usize, n: f64) -> Result<ErrorEstimate> {
    if s <= 2 {
        return invalid(format!("the error estimate needs S > 2, got {s}"));
    }
    if !(n > 0.0) {
        return invalid("N must be positive");
    }
    let exponent = 5.0 * (2f64.powi(k as i32) - 1.0) - 2.0;
    let k_factor = 1.0 / (2f64.powf(exponent) * 5.0 * 2f64.ln());
    let sf = s as f64;
    let (ls, ls2) = (sf.ln(), (sf - 2.0).ln());
    let s_factor = ((sf * sf - 2.0 * sf) * ls - sf * sf * ls2 + (2.0 * ls2 - 2.0) * sf + 2.0)
        / (4.0 * sf * (sf - 2.0));
    let radicand = n * n * PI * k_factor * s_factor;
    let value = if radicand >= 0.0 { radicand.sqrt() } else { f64::NAN };
    Ok(ErrorEstimate { radicand, value })
}

/// Positive decreasing tail `f` on `[h, inf)`.
#[derive(Clone)]
pub enum TailFunction {
    /// `x^{-p}`
    Power(f64),
    /// `exp(-r x)`
    Exponential(f64),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for TailFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Power(p) => write!(f, "Power({p})"),
            Self::Exponential(r) => write!(f, "Exponential({r})"),
            Self::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl TailFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Power(p) => x.powf(-p),
            Self::Exponential(r) => (-r * x).exp(),
            Self::Custom(f) => f(x),
        }
    }
}

/// `int_h^inf f(x) dx`, which bounds `sum_{j > h} f(j)` by the integral test.
pub fn remainder_bound(f: &TailFunction, h: usize) -> Result<f64> {
    let hf = h as f64;
    match *f {
        TailFunction::Power(p) => {
            if !(p > 1.0) {
                return invalid(format!("x^-{p} has a divergent tail"));
            }
            if h == 0 {
                return invalid("x^-p is not integrable at 0");
            }
            Ok(hf.powf(1.0 - p) / (p - 1.0))
        }
        TailFunction::Exponential(r) => {
            if !(r > 0.0) {
                return invalid(format!("exp(-{r} x) has a divergent tail"));
            }
            Ok((-r * hf).exp() / r)
        }
        TailFunction::Custom(ref g) => {
            let start = g(hf);
            if !(start.is_finite() && start > 0.0) {
                return invalid(format!("tail function must be positive and finite at {h}"));
            }
            let rule = GaussLegendre::new(NonZeroUsize::new(64).expect("nonzero"));
            let mut total = 0.0;
            let mut width = 1.0;
            let mut a = hf;
            for _ in 0..200 {
                let piece = rule.integrate(a, a + width, |x| g(x));
                if !piece.is_finite() {
                    return invalid("tail function produced a non-finite value");
                }
                total += piece;
                a += width;
                if piece <= 1e-17 * total && g(a) * a <= 1e-15 * total {
                    return Ok(total);
                }
                width *= 2.0;
            }
            invalid("tail integral does not converge")
        }
    }
}

/// Uniform-grid max error on the canonical `[0, 2]` (left limit at `2`) and
/// the weighted L2 error.
pub fn empirical_error<F>(basis: &WaveletBasis, e: &CoefficientVector, exact: F, grid_n: usize) -> Result<ErrorSummary>
where
    F: Fn(f64) -> Complex64,
{
    if grid_n < 2 {
        return invalid("grid needs at least two points");
    }
    let mut max = 0.0f64;
    for i in 0..grid_n {
        let x = 2.0 * i as f64 / (grid_n - 1) as f64;
        max = max.max((basis.synthesize_left(e, x)? - exact(x)).norm());
    }
    let approx = basis.synthesize_at_nodes(e)?;
    let diff: Vec<Complex64> = basis
        .node_points()
        .into_iter()
        .zip(approx)
        .map(|(x, v)| v - exact(x))
        .collect();
    Ok(ErrorSummary {
        max,
        l2w: basis.weighted_norm_sq_samples(&diff).sqrt(),
    })
}

/// Projection coefficients of `f` compared with the decay bounds.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub n: f64,
    /// `|E_{h,s}|`, indexed `[h][s]`.
    pub magnitudes: Vec<Vec<f64>>,
    /// Bounds (already scaled by `calibration`); `None` for `s = 0`.
    pub coeff_bounds: Vec<Vec<Option<f64>>>,
    pub calibration: f64,
    pub violations: Vec<WaveletIndex>,
    pub error_bound: Option<ErrorEstimate>,
    /// Weighted L2 distance between `f` and its truncated expansion.
    pub measured_error: f64,
}

impl BoundReport {
    pub fn coefficients_within_bounds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn error_within_bound(&self) -> Option<bool> {
        self.error_bound
            .filter(ErrorEstimate::is_finite)
            .map(|b| self.measured_error <= b.value)
    }
}

/// Projects `f` (canonical variable) and checks every `|E_{h,s}|`, `s >= 1`,
/// against [`coeff_bound`] times `calibration`. Violations are reported,
/// not raised.
pub fn decay_audit<F>(basis: &WaveletBasis, f: F, f2_bound: f64, f1_bound: f64, calibration: f64) -> Result<BoundReport>
where
    F: Fn(f64) -> Complex64,
{
    let cfg = basis.config();
    let e = basis.project(&f)?;
    let mut magnitudes = vec![vec![0.0; cfg.order()]; cfg.blocks()];
    let mut coeff_bounds = vec![vec![None; cfg.order()]; cfg.blocks()];
    let mut violations = Vec::new();
    for j in 0..cfg.dimension() {
        let idx = WaveletIndex::from_flat(cfg, j);
        let mag = e[j].norm();
        magnitudes[idx.h][idx.s] = mag;
        if idx.s >= 1 {
            let b = calibration * coeff_bound(idx.h, idx.s, f2_bound, f1_bound)?;
            coeff_bounds[idx.h][idx.s] = Some(b);
            if mag > b * (1.0 + 1e-12) + 1e-14 {
                violations.push(idx);
            }
        }
    }
    let samples: Vec<Complex64> = basis
        .node_points()
        .into_iter()
        .zip(basis.synthesize_at_nodes(&e)?)
        .map(|(x, v)| f(x) - v)
        .collect();
    let error_bound = if cfg.order() > 2 {
        Some(error_estimate(cfg.k(), cfg.order(), f2_bound)?)
    } else {
        None
    };
    Ok(BoundReport {
        n: f2_bound,
        magnitudes,
        coeff_bounds,
        calibration,
        violations,
        error_bound,
        measured_error: basis.weighted_norm_sq_samples(&samples).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub newton: NewtonOptions,
    /// Bound on `|rho''|` fed to [`error_estimate`].
    pub n_bound: f64,
    pub grid_n: usize,
    /// Quadrature order for every cell; `None` uses each cell's default.
    pub quad_order: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            n_bound: 1.0,
            grid_n: 101,
            quad_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub max_error: f64,
    pub l2w_error: f64,
    pub newton_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: u32,
    pub s: usize,
    pub outcome: std::result::Result<SweepCell, String>,
    /// Literal error estimate; NaN where it is undefined.
    pub bound: f64,
    pub runtime_ms: f64,
}

/// Solves `prob` for every `(k, S)` pair, rows ordered by `k` then `S`.
/// Per-cell failures are recorded in the row.
pub fn convergence_sweep(prob: &ProblemSpec, k_list: &[u32], s_list: &[usize], opts: &SweepOptions) -> Result<Vec<SweepRow>> {
    let Some(exact) = prob.exact() else {
        return invalid("a convergence sweep needs a problem with a known exact solution");
    };
    if k_list.is_empty() || s_list.is_empty() {
        return invalid("k and S lists must be nonempty");
    }
    if let Some(s) = s_list.iter().find(|&&s| s < 3) {
        return invalid(format!("every S must be at least 3, got {s}"));
    }
    let mut ks = k_list.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut ss = s_list.to_vec();
    ss.sort_unstable();
    ss.dedup();

    let mut rows = Vec::with_capacity(ks.len() * ss.len());
    for &k in &ks {
        for &s in &ss {
            let start = Instant::now();
            let outcome = BasisConfig::new(k, s, prob.length())
                .and_then(|cfg| match opts.quad_order {
                    Some(q) => cfg.with_quad_order(q),
                    None => Ok(cfg),
                })
                .and_then(TauSolver::new)
                .map_err(SolveError::from)
                .and_then(|solver| solver.solve(prob, &opts.newton))
                .map(|rep| {
                    let err = rep.solution.error_against(exact.as_ref(), opts.grid_n);
                    SweepCell {
                        max_error: err.max,
                        l2w_error: err.l2w,
                        newton_iters: rep.newton_iters,
                    }
                })
                .map_err(|e| e.to_string());
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let bound = error_estimate(k, s, opts.n_bound)?.value;
            rows.push(SweepRow {
                k,
                s,
                outcome,
                bound,
                runtime_ms,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `k,S,max_error,l2w_error,bound,runtime_ms`. Failed cells
/// carry `NC`. With `timing` off the runtime column is written as `0` so
/// output is reproducible byte for byte.
pub fn sweep_csv(rows: &[SweepRow], timing: bool) -> String {
    let mut out = String::from("k,S,max_error,l2w_error,bound,runtime_ms\n");
    for r in rows {
        let (max, l2) = match &r.outcome {
            Ok(c) => (format!("{:.16e}", c.max_error), format!("{:.16e}", c.l2w_error)),
            Err(_) => ("NC".to_string(), "NC".to_string()),
        };
        let bound = if r.bound.is_finite() {
            format!("{:.16e}", r.bound)
        } else {
            "NaN".to_string()
        };
        let runtime = if timing {
            format!("{:.3}", r.runtime_ms)
        } else {
            "0".to_string()
        };
        let _ = writeln!(out, "{},{},{},{},{},{}", r.k, r.s, max, l2, bound, runtime);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tau_solver::problems;

    #[test]
    fn coeff_bound_substitutions() {
        let sp = PI.sqrt();
        assert!((coeff_bound(0, 2, 1.0, 0.0).unwrap() - 2.0 * sp / 3.0).abs() < 1e-12);
        assert!((coeff_bound(0, 2, 1.0, 0.0).unwrap() - 1.18164).abs() < 1e-5);
        let want = 2.0 * sp / (2f64.powf(2.5) * 8.0);
        assert!((coeff_bound(1, 3, 1.0, 0.0).unwrap() - want).abs() < 1e-12);
        assert!((coeff_bound(1, 3, 1.0, 0.0).unwrap() - 0.07834).abs() < 1e-5);
        assert!((coeff_bound(0, 1, 0.0, 1.0).unwrap() - sp).abs() < 1e-12);
        assert!(coeff_bound(0, 0, 1.0, 1.0).is_err());
    }

    #[test]
    fn error_estimate_is_literal() {
        let e = error_estimate(0, 3, 1.0).unwrap();
        let k_factor = 4.0 / (5.0 * 2f64.ln());
        assert!((k_factor - 1.15416).abs() < 1e-5);
        let s_factor = (3.0 * 3f64.ln() - 4.0) / 12.0;
        assert!((s_factor + 0.05869).abs() < 1e-5);
        assert!((e.radicand - PI * k_factor * s_factor).abs() < 1e-14);
        assert!(!e.is_finite());
        assert!(error_estimate(0, 2, 1.0).is_err());

        // N enters as N^2 under the root
        let a = error_estimate(1, 7, 1.0).unwrap();
        let b = error_estimate(1, 7, 2.0).unwrap();
        assert!((b.radicand - 4.0 * a.radicand).abs() < 1e-15);
    }

    #[test]
    fn remainder_examples() {
        assert!((remainder_bound(&TailFunction::Power(2.0), 1).unwrap() - 1.0).abs() < 1e-15);
        let series: f64 = (2..100_000).map(|k| 1.0 / (k as f64 * k as f64)).sum();
        assert!((series - (PI * PI / 6.0 - 1.0)).abs() < 1e-4);
        assert!(series <= remainder_bound(&TailFunction::Power(2.0), 1).unwrap());
        assert!((remainder_bound(&TailFunction::Exponential(1.0), 0).unwrap() - 1.0).abs() < 1e-15);
        assert!((remainder_bound(&TailFunction::Power(5.0), 1).unwrap() - 0.25).abs() < 1e-15);
        assert!(remainder_bound(&TailFunction::Power(1.0), 1).is_err());
        assert!(remainder_bound(&TailFunction::Power(2.0), 0).is_err());
        let custom = TailFunction::Custom(Arc::new(|x: f64| 1.0 / (x * x)));
        assert!((remainder_bound(&custom, 1).unwrap() - 1.0).abs() < 1e-10);
        let slow = TailFunction::Custom(Arc::new(|x: f64| 1.0 / x));
        assert!(remainder_bound(&slow, 1).is_err());
    }

    #[test]
    fn empirical_error_of_own_synthesis_is_zero() {
        let b = WaveletBasis::new(BasisConfig::new(1, 4, 2.0).unwrap());
        let e = b.project(|x| Complex64::new(x.cos(), 0.0)).unwrap();
        let err = empirical_error(&b, &e, |x| b.synthesize_left(&e, x).unwrap(), 50).unwrap();
        assert!(err.max <= 1e-12 && err.l2w <= 1e-12);
        assert!(empirical_error(&b, &e, |_| Complex64::new(0.0, 0.0), 1).is_err());
    }

    #[test]
    fn audit_of_quadratic_and_constant() {
        let b = WaveletBasis::new(BasisConfig::new(0, 6, 2.0).unwrap());
        let r = decay_audit(&b, |x| Complex64::new(x * x, 0.0), 2.0, 4.0, 1.0).unwrap();
        for s in 3..6 {
            assert!(r.magnitudes[0][s] < 1e-13);
        }
        assert!(r.coeff_bounds[0][0].is_none());
        let c = decay_audit(&b, |_| Complex64::new(3.0, 0.0), 1.0, 0.0, 1.0).unwrap();
        assert!(c.coefficients_within_bounds());
        assert!(c.measured_error < 1e-13);
    }

    #[test]
    fn sweep_and_csv() {
        let rows = convergence_sweep(&problems::pantograph_2(), &[0], &[4, 3], &SweepOptions::default()).unwrap();
        assert_eq!(rows.iter().map(|r| r.s).collect::<Vec<_>>(), vec![3, 4]);
        let csv = sweep_csv(&rows, false);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,S,max_error,l2w_error,bound,runtime_ms");
        assert!(lines[1].starts_with("0,3,") && lines[1].ends_with(",NaN,0"));
        assert!(convergence_sweep(&problems::pantograph_2(), &[0], &[], &SweepOptions::default()).is_err());
        assert!(convergence_sweep(&problems::pantograph_2(), &[0], &[2], &SweepOptions::default()).is_err());
    }

    #[test]
    fn failed_cells_are_marked() {
        let opts = SweepOptions {
            newton: NewtonOptions {
                max_iter: 0,
                ..NewtonOptions::default()
            },
            ..SweepOptions::default()
        };
        let rows = convergence_sweep(&problems::lane_emden_1(), &[0], &[3], &opts).unwrap();
        assert!(rows[0].outcome.is_err());
        assert!(sweep_csv(&rows, false).contains(",NC,NC,"));
    }
}
