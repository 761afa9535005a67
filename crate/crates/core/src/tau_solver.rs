//! Tau method for `rho'' = G(theta, rho, rho', rho(alpha theta))` on `[0, l]`.
//!
//! The problem is mapped affinely onto the canonical interval `[0, 2]`
//! (`theta = l x / 2`), the residual
//! `R(x) = E^T D^2 Psi(x) - G(x, E^T Psi(x), E^T D Psi(x), E^T Psi(alpha x))`
//! is projected onto the first `2^k S - 2` basis functions, and the two
//! condition rows complete a square system solved by damped Newton.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error as ThisError;

use crate::error::{invalid, Error, Result};
use crate::op_matrices::{build_d, build_stretch, power_d, OperationalMatrix};
use crate::wavelet_basis::{BasisConfig, CoefficientVector, WaveletBasis};

/// Right-hand side `G(theta, rho, rho', rho(alpha theta))`.
pub type RhsFn = Arc<dyn Fn(f64, Complex64, Complex64, Complex64) -> Complex64 + Send + Sync>;

/// Closed-form solution used for error reporting.
pub type ExactFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Conditions {
    /// `rho(0) = a1`, `rho'(0) = a2`.
    Initial { a1: f64, a2: f64 },
    /// `rho(0) = b1`, `rho'(l) = b2`.
    Boundary { b1: f64, b2: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transform {
    None,
    /// Solve for `z` with `rho = exp(z)`.
    Log,
}

#[derive(Clone)]
pub struct ProblemSpec {
    name: String,
    rhs: RhsFn,
    alpha: f64,
    length: f64,
    conditions: Conditions,
    transform: Transform,
    exact: Option<ExactFn>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("alpha", &self.alpha)
            .field("length", &self.length)
            .field("conditions", &self.conditions)
            .field("transform", &self.transform)
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl ProblemSpec {
    pub fn new<G>(rhs: G, length: f64, conditions: Conditions) -> Result<Self>
    where
        G: Fn(f64, Complex64, Complex64, Complex64) -> Complex64 + Send + Sync + 'static,
    {
        if !(length > 0.0 && length <= 2.0) {
            return invalid(format!("domain length must lie in (0, 2], got {length}"));
        }
        let (c1, c2) = match conditions {
            Conditions::Initial { a1, a2 } => (a1, a2),
            Conditions::Boundary { b1, b2 } => (b1, b2),
        };
        if !(c1.is_finite() && c2.is_finite()) {
            return invalid("condition values must be finite");
        }
        Ok(Self {
            name: String::from("problem"),
            rhs: Arc::new(rhs),
            alpha: 1.0,
            length,
            conditions,
            transform: Transform::None,
            exact: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Delay factor of the pantograph term; 1 means no delay.
    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return invalid(format!("delay factor must lie in (0, 1], got {alpha}"));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_transform(mut self, transform: Transform) -> Self {
        self.transform = transform;
        self
    }

    pub fn with_exact<F: Fn(f64) -> f64 + Send + Sync + 'static>(mut self, exact: F) -> Self {
        self.exact = Some(Arc::new(exact));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn conditions(&self) -> Conditions {
        self.conditions
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn exact(&self) -> Option<&ExactFn> {
        self.exact.as_ref()
    }

    pub fn rhs(&self, theta: f64, rho: Complex64, drho: Complex64, delayed: Complex64) -> Complex64 {
        (self.rhs)(theta, rho, drho, delayed)
    }
}

/// Rewrites a problem for `z = ln rho`:
/// `z'' = exp(-z) G(theta, e^z, e^z z', e^{z(alpha theta)}) - (z')^2`,
/// `z(0) = ln a1`, `z'(0) = a2 / a1`.
pub fn apply_log_transform(prob: &ProblemSpec) -> Result<ProblemSpec> {
    let (a1, a2) = match prob.conditions {
        Conditions::Initial { a1, a2 } => (a1, a2),
        Conditions::Boundary { .. } => {
            return invalid("the log transform supports initial conditions only")
        }
    };
    if a1 <= 0.0 {
        return invalid(format!("log transform needs rho(0) > 0, got {a1}"));
    }
    let g = prob.rhs.clone();
    let rhs = move |t: f64, z: Complex64, dz: Complex64, zd: Complex64| {
        let rho = z.exp();
        g(t, rho, rho * dz, zd.exp()) / rho - dz * dz
    };
    let mut out = ProblemSpec::new(
        rhs,
        prob.length,
        Conditions::Initial {
            a1: a1.ln(),
            a2: a2 / a1,
        },
    )?
    .with_alpha(prob.alpha)?
    .with_name(format!("{} (log)", prob.name));
    if let Some(exact) = prob.exact.clone() {
        out = out.with_exact(move |t| exact(t).ln());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 50,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSummary {
    pub max: f64,
    pub l2w: f64,
}

/// A solved expansion together with the basis it lives in.
#[derive(Debug, Clone)]
pub struct Solution {
    basis: WaveletBasis,
    coefficients: CoefficientVector,
    exponentiate: bool,
}

impl Solution {
    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &CoefficientVector {
        &self.coefficients
    }

    pub fn is_exponentiated(&self) -> bool {
        self.exponentiate
    }

    /// The expansion itself at physical `theta` (for log-transformed
    /// problems this is `z`, not `rho`).
    pub fn raw(&self, theta: f64) -> Complex64 {
        let x = self.basis.config().to_canonical(theta);
        let v = if x < 2.0 {
            self.basis.synthesize(&self.coefficients, x)
        } else {
            self.basis.synthesize_left(&self.coefficients, x)
        };
        v.expect("coefficients match basis")
    }

    /// `rho(theta)`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let v = self.raw(theta);
        if self.exponentiate {
            v.exp()
        } else {
            v
        }
    }

    /// Monomial form of the expansion on block `h` in `theta`.
    pub fn physical_polynomial(&self, h: usize) -> Result<crate::poly::DensePolynomial> {
        self.basis.physical_polynomial(&self.coefficients, h)
    }

    /// Max error on a uniform grid over `[0, l]` and weighted L2 error.
    pub fn error_against(&self, exact: &dyn Fn(f64) -> f64, grid_n: usize) -> ErrorSummary {
        let cfg = self.basis.config();
        let l = cfg.length();
        let n = grid_n.max(2);
        let max = (0..n)
            .map(|i| {
                let t = l * i as f64 / (n - 1) as f64;
                (self.eval(t) - exact(t)).norm()
            })
            .fold(0.0, f64::max);
        let samples: Vec<Complex64> = self
            .basis
            .node_points()
            .into_iter()
            .map(|x| {
                let t = cfg.to_physical(x);
                self.eval(t) - exact(t)
            })
            .collect();
        let l2w = self.basis.weighted_norm_sq_samples(&samples).sqrt();
        ErrorSummary { max, l2w }
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: Solution,
    /// Weighted L2 norm of the residual `R`.
    pub residual_norm: f64,
    pub newton_iters: usize,
    /// `|rho(0) - c1|` and the derivative-condition defect, physical units.
    pub condition_residuals: [f64; 2],
    /// Max `|Im rho|` over a uniform grid on `[0, l]`.
    pub max_imag: f64,
    /// Max-norm of the stacked tau system at the returned iterate.
    pub system_residual: f64,
    pub errors_vs_exact: Option<ErrorSummary>,
}

impl SolveReport {
    pub fn coefficients(&self) -> &CoefficientVector {
        self.solution.coefficients()
    }
}

#[derive(Debug, ThisError)]
pub enum SolveError {
    #[error(transparent)]
    Problem(#[from] Error),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<SolveReport>,
    },

    #[error("singular Jacobian at Newton iteration {iteration}; try a different S or initial guess")]
    SingularJacobian { iteration: usize },
}

const REPORT_GRID: usize = 101;

/// Tau discretisation on a fixed basis. Holds `D` and `D^2`.
#[derive(Debug, Clone)]
pub struct TauSolver {
    basis: WaveletBasis,
    d: OperationalMatrix,
    d2: OperationalMatrix,
    nodes: Vec<f64>,
    /// Value and slope jumps at interior breakpoints, one row each.
    joins: Vec<Vec<Complex64>>,
}

impl TauSolver {
    pub fn new(cfg: BasisConfig) -> Result<Self> {
        if cfg.dimension() < 3 {
            return invalid(format!(
                "the tau system needs 2^k S >= 3, got {}",
                cfg.dimension()
            ));
        }
        if cfg.blocks() > 1 && cfg.order() < 3 {
            return invalid(format!(
                "with more than one block the tau system needs S >= 3, got {}",
                cfg.order()
            ));
        }
        let basis = WaveletBasis::new(cfg);
        let d = build_d(&basis);
        let d2 = power_d(&d, 2)?;
        let nodes = basis.node_points();
        let mut joins = Vec::new();
        for b in 1..cfg.blocks() {
            let x = cfg.support(b).0;
            let jump: Vec<Complex64> = basis
                .basis_vector_left(x)
                .iter()
                .zip(basis.basis_vector(x))
                .map(|(l, r)| l - r)
                .collect();
            joins.push(d.apply(&jump));
            joins.push(jump);
        }
        Ok(Self {
            basis,
            d,
            d2,
            nodes,
            joins,
        })
    }

    pub fn basis(&self) -> &WaveletBasis {
        &self.basis
    }

    pub fn d(&self) -> &OperationalMatrix {
        &self.d
    }

    pub fn d2(&self) -> &OperationalMatrix {
        &self.d2
    }

    fn check(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<()> {
        let cfg = self.basis.config();
        if (prob.length - cfg.length()).abs() > 1e-15 * cfg.length() {
            return invalid(format!(
                "problem length {} differs from basis length {}",
                prob.length,
                cfg.length()
            ));
        }
        if e.len() != cfg.dimension() {
            return Err(Error::DimensionMismatch {
                expected: cfg.dimension(),
                found: e.len(),
            });
        }
        Ok(())
    }

    fn half_length(&self) -> f64 {
        0.5 * self.basis.config().length()
    }

    /// `G` in canonical variables: `(l/2)^2 G(l x/2, y, 2 y'/l, y(alpha x))`.
    fn canonical_rhs(&self, prob: &ProblemSpec, x: f64, y: Complex64, dy: Complex64, yd: Complex64) -> Result<Complex64> {
        let c = self.half_length();
        let g = prob.rhs(c * x, y, dy / c, yd) * (c * c);
        if g.is_finite() {
            Ok(g)
        } else {
            Err(Error::NonFinite { theta: c * x })
        }
    }

    /// `R` at every quadrature node.
    pub fn residual_samples(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<Vec<Complex64>> {
        self.check(prob, e)?;
        let y = self.basis.synthesize_at_nodes(e)?;
        let dy = self.basis.synthesize_at_nodes(&self.d.transpose_apply(e)?)?;
        let d2y = self.basis.synthesize_at_nodes(&self.d2.transpose_apply(e)?)?;
        let mut out = Vec::with_capacity(self.nodes.len());
        for (i, &x) in self.nodes.iter().enumerate() {
            let yd = if prob.alpha == 1.0 {
                y[i]
            } else {
                self.basis.synthesize(e, prob.alpha * x)?
            };
            out.push(d2y[i] - self.canonical_rhs(prob, x, y[i], dy[i], yd)?);
        }
        Ok(out)
    }

    /// Keeps the projections onto retained test functions and appends the
    /// join rows. With one block this is the first `S - 2` projections; with
    /// several, each block drops its top two modes and the freed rows hold
    /// value and slope continuity at the interior breakpoints.
    fn select_rows(&self, proj: &[Complex64], e: &CoefficientVector) -> Vec<Complex64> {
        let order = self.basis.config().order();
        let mut rows: Vec<Complex64> = proj
            .iter()
            .enumerate()
            .filter(|(j, _)| j % order < order - 2)
            .map(|(_, z)| *z)
            .collect();
        rows.extend(
            self.joins
                .iter()
                .map(|w| w.iter().zip(e.iter()).map(|(a, b)| a * b).sum::<Complex64>()),
        );
        rows
    }

    /// The `2^k S - 2` tau rows: residual projections plus, for `k >= 1`,
    /// continuity of the solution and its slope across blocks.
    pub fn tau_equations(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<Vec<Complex64>> {
        let r = self.residual_samples(prob, e)?;
        let proj = self.basis.project_samples(&r)?.into_vec();
        Ok(self.select_rows(&proj, e))
    }

    /// Tau equations through operational matrices, for `G` affine in its
    /// three solution arguments with constant coefficients:
    /// `D^2T E - a E - b D^T E - c P_alpha^T E - <g0, phi_j>`.
    pub fn tau_equations_linear(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<Vec<Complex64>> {
        self.check(prob, e)?;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let mut g0 = Vec::with_capacity(self.nodes.len());
        let mut coeffs: Option<[Complex64; 3]> = None;
        for &x in &self.nodes {
            let base = self.canonical_rhs(prob, x, zero, zero, zero)?;
            let abc = [
                self.canonical_rhs(prob, x, one, zero, zero)? - base,
                self.canonical_rhs(prob, x, zero, one, zero)? - base,
                self.canonical_rhs(prob, x, zero, zero, one)? - base,
            ];
            let probe = self.canonical_rhs(prob, x, one * 2.0, one * 3.0, one * 5.0)? - base;
            let expect = abc[0] * 2.0 + abc[1] * 3.0 + abc[2] * 5.0;
            let scale = 1.0 + expect.norm();
            if (probe - expect).norm() > 1e-10 * scale {
                return Err(Error::NotLinear(format!(
                    "right-hand side is not affine at theta = {}",
                    self.half_length() * x
                )));
            }
            match coeffs {
                None => coeffs = Some(abc),
                Some(c0) => {
                    if c0.iter().zip(&abc).any(|(p, q)| (p - q).norm() > 1e-10 * (1.0 + p.norm())) {
                        return Err(Error::NotLinear(format!(
                            "coefficients vary with theta (at theta = {})",
                            self.half_length() * x
                        )));
                    }
                }
            }
            g0.push(base);
        }
        let [a, b, c] = coeffs.expect("at least one node");
        let stretch = build_stretch(&self.basis, prob.alpha)?;
        let d2e = self.d2.transpose_apply(e)?;
        let de = self.d.transpose_apply(e)?;
        let pe = stretch.transpose_apply(e)?;
        let forcing = self.basis.project_samples(&g0)?;
        let proj: Vec<Complex64> = (0..e.len())
            .map(|j| d2e[j] - a * e[j] - b * de[j] - c * pe[j] - forcing[j])
            .collect();
        Ok(self.select_rows(&proj, e))
    }

    /// Condition rows in canonical units: `rho(0) - c1` and
    /// `(l/2) (rho'(theta_c) - c2)` with `theta_c = 0` (initial) or `l`
    /// (boundary).
    pub fn condition_rows(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<[Complex64; 2]> {
        self.check(prob, e)?;
        let c = self.half_length();
        let psi0 = self.basis.basis_vector(0.0);
        let value0: Complex64 = e.iter().zip(&psi0).map(|(a, b)| a * b).sum();
        let (c1, c2, dpsi) = match prob.conditions {
            Conditions::Initial { a1, a2 } => (a1, a2, self.d.apply(&psi0)),
            Conditions::Boundary { b1, b2 } => {
                (b1, b2, self.d.apply(&self.basis.basis_vector_left(2.0)))
            }
        };
        let slope: Complex64 = e.iter().zip(&dpsi).map(|(a, b)| a * b).sum();
        Ok([value0 - c1, slope - c * c2])
    }

    /// Stacked tau equations and condition rows.
    pub fn system(&self, prob: &ProblemSpec, e: &CoefficientVector) -> Result<Vec<Complex64>> {
        let mut f = self.tau_equations(prob, e)?;
        f.extend(self.condition_rows(prob, e)?);
        Ok(f)
    }

    fn jacobian(&self, prob: &ProblemSpec, e: &CoefficientVector, f: &[Complex64], step: f64) -> Result<DMatrix<Complex64>> {
        let n = e.len();
        let mut jac = DMatrix::zeros(n, n);
        for j in 0..n {
            let h = step * (1.0 + e[j].norm());
            let mut shifted = e.clone();
            shifted.as_mut_slice()[j] += h;
            let fj = self.system(prob, &shifted)?;
            for i in 0..n {
                jac[(i, j)] = (fj[i] - f[i]) / h;
            }
        }
        Ok(jac)
    }

    /// Solves from the zero vector, applying the log transform if requested.
    pub fn solve(&self, prob: &ProblemSpec, opts: &NewtonOptions) -> std::result::Result<SolveReport, SolveError> {
        self.solve_from(prob, opts, CoefficientVector::zeros(self.basis.dimension()))
    }

    pub fn solve_from(
        &self,
        prob: &ProblemSpec,
        opts: &NewtonOptions,
        initial: CoefficientVector,
    ) -> std::result::Result<SolveReport, SolveError> {
        let (work, exponentiate) = match prob.transform {
            Transform::Log => (apply_log_transform(prob)?, true),
            Transform::None => (prob.clone(), false),
        };
        self.check(&work, &initial)?;

        let mut e = initial;
        let mut f = self.system(&work, &e)?;
        let mut fnorm = max_norm(&f);
        let mut iters = 0;
        while fnorm > opts.tol {
            if iters >= opts.max_iter {
                return Err(self.non_convergence(prob, &work, e, iters, fnorm, exponentiate));
            }
            let jac = self.jacobian(&work, &e, &f, opts.fd_step)?;
            let rhs = DVector::from_iterator(f.len(), f.iter().map(|z| -z));
            let delta = match jac.lu().solve(&rhs) {
                Some(d) if d.iter().all(|z| z.is_finite()) => d,
                _ => return Err(SolveError::SingularJacobian { iteration: iters + 1 }),
            };
            let mut lambda = 1.0;
            let mut accepted = None;
            for _ in 0..=30 {
                let trial: CoefficientVector = e
                    .iter()
                    .zip(delta.iter())
                    .map(|(a, d)| a + d * lambda)
                    .collect::<Vec<_>>()
                    .into();
                if let Ok(ft) = self.system(&work, &trial) {
                    let tn = max_norm(&ft);
                    if tn < fnorm {
                        accepted = Some((trial, ft, tn));
                        break;
                    }
                }
                lambda *= 0.5;
            }
            iters += 1;
            match accepted {
                Some((trial, ft, tn)) => {
                    e = trial;
                    f = ft;
                    fnorm = tn;
                }
                None => {
                    return Err(self.non_convergence(prob, &work, e, iters, fnorm, exponentiate));
                }
            }
        }
        Ok(self.report(prob, &work, e, iters, fnorm, exponentiate)?)
    }

    fn non_convergence(
        &self,
        prob: &ProblemSpec,
        work: &ProblemSpec,
        e: CoefficientVector,
        iterations: usize,
        residual: f64,
        exponentiate: bool,
    ) -> SolveError {
        match self.report(prob, work, e, iterations, residual, exponentiate) {
            Ok(best) => SolveError::NonConvergence {
                iterations,
                residual,
                best: Box::new(best),
            },
            Err(err) => err.into(),
        }
    }

    fn report(
        &self,
        prob: &ProblemSpec,
        work: &ProblemSpec,
        e: CoefficientVector,
        newton_iters: usize,
        system_residual: f64,
        exponentiate: bool,
    ) -> Result<SolveReport> {
        let r = self.residual_samples(work, &e)?;
        let residual_norm = self.basis.weighted_norm_sq_samples(&r).sqrt();
        let cond = self.condition_rows(work, &e)?;
        let condition_residuals = [cond[0].norm(), cond[1].norm() / self.half_length()];
        let solution = Solution {
            basis: self.basis.clone(),
            coefficients: e,
            exponentiate,
        };
        let l = prob.length;
        let max_imag = (0..REPORT_GRID)
            .map(|i| solution.eval(l * i as f64 / (REPORT_GRID - 1) as f64).im.abs())
            .fold(0.0, f64::max);
        let errors_vs_exact = prob
            .exact
            .as_ref()
            .map(|exact| solution.error_against(exact.as_ref(), REPORT_GRID));
        Ok(SolveReport {
            solution,
            residual_norm,
            newton_iters,
            condition_residuals,
            max_imag,
            system_residual,
            errors_vs_exact,
        })
    }
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Tau equations for `prob` at `e` on a fresh basis.
pub fn assemble_tau_equations(cfg: BasisConfig, prob: &ProblemSpec, e: &CoefficientVector) -> Result<Vec<Complex64>> {
    TauSolver::new(cfg)?.tau_equations(prob, e)
}

pub fn condition_rows(cfg: BasisConfig, prob: &ProblemSpec, e: &CoefficientVector) -> Result<[Complex64; 2]> {
    TauSolver::new(cfg)?.condition_rows(prob, e)
}

pub fn newton_solve(cfg: BasisConfig, prob: &ProblemSpec, opts: &NewtonOptions) -> std::result::Result<SolveReport, SolveError> {
    TauSolver::new(cfg)?.solve(prob, opts)
}

/// Built-in worked problems.
pub mod problems {
    use super::*;

    /// `rho'' + (6/theta) rho' + 14 rho = -4 rho ln rho` on `(0, 1]`,
    /// `rho(0) = 1`, `rho'(0) = 0`, solved through `rho = e^z`.
    /// Exact solution `exp(-theta^2)`.
    pub fn lane_emden_1() -> ProblemSpec {
        ProblemSpec::new(
            |t, rho, drho, _| -(drho * 6.0 / t) - rho * 14.0 - rho * rho.ln() * 4.0,
            1.0,
            Conditions::Initial { a1: 1.0, a2: 0.0 },
        )
        .expect("valid built-in problem")
        .with_transform(Transform::Log)
        .with_exact(|t| (-t * t).exp())
        .with_name("lane-emden-1")
    }

    /// `rho'' - (3/4) rho - rho(theta/2) + theta^2 - 2 = 0` on `[0, 1]`,
    /// `rho(0) = rho'(0) = 0`. Exact solution `theta^2`.
    pub fn pantograph_2() -> ProblemSpec {
        ProblemSpec::new(
            |t, rho, _, delayed| rho * 0.75 + delayed - t * t + 2.0,
            1.0,
            Conditions::Initial { a1: 0.0, a2: 0.0 },
        )
        .expect("valid built-in problem")
        .with_alpha(0.5)
        .expect("valid delay")
        .with_exact(|t| t * t)
        .with_name("pantograph-2")
    }

    /// `rho'' = -rho`, `rho(0) = 1`, `rho'(0) = 0` on `[0, 1]`; exact `cos`.
    pub fn cosine() -> ProblemSpec {
        ProblemSpec::new(|_, rho, _, _| -rho, 1.0, Conditions::Initial { a1: 1.0, a2: 0.0 })
            .expect("valid built-in problem")
            .with_exact(f64::cos)
            .with_name("cosine")
    }

    pub fn by_name(name: &str) -> Option<ProblemSpec> {
        match name {
            "lane-emden-1" => Some(lane_emden_1()),
            "pantograph-2" => Some(pantograph_2()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::problems::*;
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn solver(k: u32, s: usize, l: f64) -> TauSolver {
        TauSolver::new(BasisConfig::new(k, s, l).unwrap()).unwrap()
    }

    /// Coefficients of `f(theta)` on `[0, l]`.
    fn coefficients_of(t: &TauSolver, f: impl Fn(f64) -> f64) -> CoefficientVector {
        let cfg = *t.basis().config();
        t.basis().project(|x| c(f(cfg.to_physical(x)))).unwrap()
    }

    #[test]
    fn zero_problem_has_zero_equations() {
        let t = solver(0, 4, 1.0);
        let p = ProblemSpec::new(|_, _, _, _| c(0.0), 1.0, Conditions::Initial { a1: 0.0, a2: 0.0 }).unwrap();
        let e = CoefficientVector::zeros(4);
        let eq = t.tau_equations(&p, &e).unwrap();
        assert_eq!(eq.len(), 2);
        assert!(eq.iter().all(|z| z.norm() == 0.0));
        assert_eq!(t.condition_rows(&p, &e).unwrap(), [c(0.0), c(0.0)]);
    }

    #[test]
    fn exact_quadratic_annihilates_pantograph_residual() {
        let t = solver(0, 3, 1.0);
        let p = pantograph_2();
        let e = coefficients_of(&t, |x| x * x);
        assert!(t.tau_equations(&p, &e).unwrap().iter().all(|z| z.norm() <= 1e-10));
        let rows = t.condition_rows(&p, &e).unwrap();
        assert!(rows.iter().all(|z| z.norm() <= 1e-10));
    }

    #[test]
    fn linear_path_matches_pointwise() {
        for (k, s) in [(0, 3), (0, 5), (1, 4)] {
            let t = solver(k, s, 1.0);
            let p = pantograph_2();
            let e = coefficients_of(&t, |x| 0.3 + x.sin() - 0.2 * x * x);
            let a = t.tau_equations(&p, &e).unwrap();
            let b = t.tau_equations_linear(&p, &e).unwrap();
            let diff = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(diff <= 1e-9, "k={k} S={s}: {diff}");
        }
        let t = solver(0, 3, 1.0);
        let e = CoefficientVector::zeros(3);
        let square = ProblemSpec::new(|_, r, _, _| r * r, 1.0, Conditions::Initial { a1: 0.0, a2: 0.0 }).unwrap();
        let varying = ProblemSpec::new(|th, r, _, _| r * th, 1.0, Conditions::Initial { a1: 0.0, a2: 0.0 }).unwrap();
        for p in [square, varying] {
            assert!(matches!(t.tau_equations_linear(&p, &e), Err(Error::NotLinear(_))));
        }
    }

    #[test]
    fn transformed_lane_emden_conditions_at_exact_solution() {
        let t = solver(0, 3, 1.0);
        let z = apply_log_transform(&lane_emden_1()).unwrap();
        let e = coefficients_of(&t, |x| -x * x);
        assert!(t.condition_rows(&z, &e).unwrap().iter().all(|r| r.norm() <= 1e-10));
        // z = -theta^2 satisfies z'' + z'^2 + 6 z'/theta + 14 + 4 z = 0
        let r = t.residual_samples(&z, &e).unwrap();
        assert!(r.iter().all(|v| v.norm() < 1e-9));
    }

    #[test]
    fn log_transform_rhs_matches_hand_form() {
        let z = apply_log_transform(&lane_emden_1()).unwrap();
        for (t, zv, dz) in [(0.3, -0.09, -0.6), (0.8, 0.2, 1.1)] {
            let got = z.rhs(t, c(zv), c(dz), c(0.0));
            let want = -dz * dz - 6.0 / t * dz - 14.0 - 4.0 * zv;
            assert!((got.re - want).abs() < 1e-12);
        }
        assert_eq!(z.conditions(), Conditions::Initial { a1: 0.0, a2: 0.0 });
        let bvp = ProblemSpec::new(|_, r, _, _| r, 1.0, Conditions::Boundary { b1: 1.0, b2: 0.0 })
            .unwrap()
            .with_transform(Transform::Log);
        assert!(apply_log_transform(&bvp).is_err());
    }

    #[test]
    fn constant_solution() {
        let t = solver(0, 4, 1.0);
        let p = ProblemSpec::new(|_, _, _, _| c(0.0), 1.0, Conditions::Initial { a1: 1.0, a2: 0.0 }).unwrap();
        let rep = t.solve(&p, &NewtonOptions::default()).unwrap();
        for i in 0..=10 {
            assert!((rep.solution.eval(i as f64 / 10.0) - 1.0).norm() <= 1e-12);
        }
    }

    #[test]
    fn pantograph_solution() {
        let t = solver(0, 3, 1.0);
        let rep = t.solve(&pantograph_2(), &NewtonOptions::default()).unwrap();
        let err = rep.errors_vs_exact.unwrap();
        assert!(err.max <= 1e-10, "{err:?}");
        assert!(rep.newton_iters <= 2);
        assert!(rep.max_imag <= 1e-9);
    }

    #[test]
    fn lane_emden_solution() {
        let t = solver(0, 3, 1.0);
        let rep = t.solve(&lane_emden_1(), &NewtonOptions::default()).unwrap();
        assert!(rep.solution.is_exponentiated());
        for i in 0..=100 {
            let th = i as f64 / 100.0;
            assert!((rep.solution.raw(th) + th * th).norm() <= 1e-8);
        }
        assert!((rep.solution.eval(1.0) - (-1f64).exp()).norm() <= 1e-8);
        assert!(rep.newton_iters <= 10);
    }

    #[test]
    fn boundary_value_problem() {
        // rho'' = -rho, rho(0) = 0, rho'(1) = cos(1): exact sin
        let p = ProblemSpec::new(|_, r, _, _| -r, 1.0, Conditions::Boundary { b1: 0.0, b2: 1f64.cos() })
            .unwrap()
            .with_exact(f64::sin);
        let rep = solver(0, 10, 1.0).solve(&p, &NewtonOptions::default()).unwrap();
        assert!(rep.errors_vs_exact.unwrap().max < 1e-8);
        assert!(rep.condition_residuals.iter().all(|r| *r < 1e-10));
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let p = ProblemSpec::new(|_, r, _, _| r.ln(), 1.0, Conditions::Initial { a1: 0.0, a2: 0.0 }).unwrap();
        let t = solver(0, 3, 1.0);
        match t.solve(&p, &NewtonOptions::default()) {
            Err(SolveError::Problem(Error::NonFinite { theta })) => assert!(theta > 0.0 && theta < 1.0),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn non_convergence_carries_best_iterate() {
        let opts = NewtonOptions {
            max_iter: 1,
            ..NewtonOptions::default()
        };
        let t = solver(0, 3, 1.0);
        match t.solve(&lane_emden_1(), &opts) {
            Err(SolveError::NonConvergence { iterations, best, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(best.coefficients().len(), 3);
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(TauSolver::new(BasisConfig::new(0, 2, 1.0).unwrap()).is_err());
        let t = solver(0, 3, 2.0);
        assert!(t.tau_equations(&pantograph_2(), &CoefficientVector::zeros(3)).is_err());
        assert!(pantograph_2().with_alpha(1.2).is_err());
    }
}
