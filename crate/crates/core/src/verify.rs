//! Invariant suites run by `lucas-tau verify`.
//!
//! Sample points come from low-discrepancy sequences so every run checks the
//! same points.

use num_complex::Complex64;

use crate::analysis::{coeff_bound, error_estimate, remainder_bound, TailFunction};
use crate::lucas_poly::*;
use crate::op_matrices::{build_d, build_product_tensor, build_stretch, power_d};
use crate::wavelet_basis::{BasisConfig, WaveletBasis, WaveletIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VerifyOptions {
    /// Quadrature order for the basis suites; `None` uses the default.
    pub quad_order: Option<usize>,
}

fn frac(i: usize, g: f64) -> f64 {
    (0.5 + i as f64 * g).fract()
}

/// Points in the disc `|z| <= radius`.
fn disc_points(n: usize, radius: f64) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let r = radius * frac(i, 0.618_033_988_749_895).sqrt();
            let a = 2.0 * std::f64::consts::PI * frac(i, 0.754_877_666_246_693);
            Complex64::from_polar(r, a)
        })
        .collect()
}

fn config(k: u32, s: usize, opts: &VerifyOptions) -> BasisConfig {
    let cfg = BasisConfig::new(k, s, 2.0).expect("valid suite config");
    match opts.quad_order {
        Some(q) => cfg.with_quad_order_unchecked(q),
        None => cfg,
    }
}

struct Tally {
    name: &'static str,
    failures: Vec<String>,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            failures: Vec::new(),
            worst: 0.0,
        }
    }

    fn check(&mut self, what: &str, value: f64, limit: f64) {
        self.worst = self.worst.max(value / limit);
        if !(value <= limit) {
            self.failures.push(format!("{what}: {value:e} > {limit:e}"));
        }
    }

    fn require(&mut self, what: &str, ok: bool) {
        if !ok {
            self.failures.push(what.to_string());
        }
    }

    fn finish(self) -> SuiteResult {
        let passed = self.failures.is_empty();
        let detail = if passed {
            format!("worst ratio to tolerance {:.3e}", self.worst)
        } else if self.failures.len() > 3 {
            format!("{}; and {} more", self.failures[..3].join("; "), self.failures.len() - 3)
        } else {
            self.failures.join("; ")
        };
        SuiteResult {
            name: self.name,
            passed,
            detail,
        }
    }
}

pub fn polynomial_identities() -> SuiteResult {
    let mut t = Tally::new("polynomial identities");
    let pts = disc_points(100, 4.0);
    for s in 0..=12 {
        for &z in &pts {
            let r = lucas_eval_recurrence(s, z);
            t.check("closed vs recurrence", (lucas_eval_closed(s, z) - r).norm(), 1e-10 * (1.0 + r.norm()));
            t.check("Lucas ODE", lucas_ode_residual(s, z).norm(), 1e-9 * (1.0 + r.norm()));
        }
        let p = lucas_coefficients(s);
        t.require("degree", p.degree() == s);
        t.require(
            "parity",
            p.coeffs().iter().enumerate().all(|(d, c)| (d + s) % 2 == 0 || c.re == 0 && c.im == 0),
        );
    }
    for s in 1..=10 {
        let zs = lucas_zeros(s);
        t.require("zero count", zs.len() == s);
        for z in &zs {
            t.check("zero", lucas_eval_recurrence(s, *z).norm(), 1e-8);
            t.require("zeros closed under negation", zs.iter().any(|w| (w + z).norm() < 1e-12));
        }
        for i in 0..10 {
            let th = -2.0 + 4.0 * frac(i, 0.618_033_988_749_895);
            let scale = 2.0 * (s as f64 * th).cosh();
            t.check("hyperbolic", hyperbolic_check(s, th), 1e-12 * scale);
        }
    }
    for s in 0..=5 {
        for i in 0..20 {
            let x = -3.9 + 7.8 * frac(i, 0.618_033_988_749_895);
            let want = lucas_eval_recurrence(s, Complex64::new(x, 0.0));
            let got = rodrigues_eval(s, Complex64::new(x, 0.0)).expect("real argument");
            t.check("Rodrigues", (got - want).norm(), 1e-8 * want.norm().max(1e-300));
        }
    }
    let (th, tt) = (Complex64::new(0.5, 0.0), Complex64::new(0.2, 0.0));
    let errs: Vec<f64> = (1..=30).map(|n| generating_check(th, tt, n).expect("in region")).collect();
    t.check("generating function at 30 terms", errs[29], 1e-12);
    t.require("generating function decays", [10, 15, 20].iter().all(|&k| errs[k - 1] < errs[k - 6]));
    for m in 0..=10 {
        for n in 0..=m {
            t.check("product identity", product_expand(m, n), 0.0);
        }
    }
    let listed: [&[(i128, i128)]; 4] = [
        &[(2, 0)],
        &[(0, -2), (2, 0)],
        &[(-2, 0), (0, -8), (4, 0)],
        &[(0, 2), (-18, 0), (0, -24), (8, 0)],
    ];
    for (s, want) in listed.iter().enumerate() {
        let got: Vec<(i128, i128)> = shifted_coefficients(s).coeffs().iter().map(|c| (c.re, c.im)).collect();
        t.require("shifted list", got == *want);
    }
    for s in 0..=12 {
        for i in 0..50 {
            let u = -1.0 + 2.0 * frac(i, 0.618_033_988_749_895);
            t.check("Chebyshev bridge", chebyshev_bridge(s, u), 1e-10);
        }
    }
    t.finish()
}

pub fn gram(opts: &VerifyOptions) -> SuiteResult {
    let mut t = Tally::new("gram orthonormality");
    for k in 0..=1 {
        for s in 1..=8 {
            let g = WaveletBasis::new(config(k, s, opts)).gram_matrix();
            let n = g.nrows();
            let dev = (0..n)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .map(|(i, j)| (g[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
                .fold(0.0, f64::max);
            t.check(&format!("k={k} S={s}"), dev, 1e-10);
        }
    }
    t.finish()
}

pub fn differentiation(opts: &VerifyOptions) -> SuiteResult {
    let mut t = Tally::new("differentiation matrix");
    for k in 0..=1 {
        for s in 1..=8 {
            let basis = WaveletBasis::new(config(k, s, opts));
            let cfg = *basis.config();
            let d = build_d(&basis);
            let dil = (1u64 << k) as f64;
            let derivs: Vec<_> = (0..s).map(|r| basis.local_polynomial(r).derivative()).collect();
            for i in 0..200 {
                let x = 2.0 * (i as f64 + 0.5) / 200.0;
                let h = cfg.block_of(x).expect("inside");
                let u = cfg.to_local(h, x);
                let dpsi = d.apply(&basis.basis_vector(x));
                for (j, got) in dpsi.iter().enumerate() {
                    let idx = WaveletIndex::from_flat(&cfg, j);
                    let want = if idx.h == h {
                        derivs[idx.s].eval_real(u) * dil
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    t.check("Psi' = D Psi", (got - want).norm(), 1e-9);
                }
            }
            let e = d.entries();
            for hb in 0..cfg.blocks() {
                for r in 0..s {
                    for c in 0..s {
                        let z = e[(hb * s + r, hb * s + c)];
                        if r > c && (r + c) % 2 == 1 {
                            let want = 2f64.powi(k as i32 + 1) * r as f64 * (alpha_weight(r) / alpha_weight(c)).sqrt();
                            t.check("entry magnitude", (z.norm() - want).abs(), 1e-12);
                        } else {
                            t.check("sparsity", z.norm(), 1e-12);
                        }
                    }
                }
            }
            let nil = power_d(&d, s as u32).expect("differentiation kind");
            t.check("nilpotency", nil.max_abs(), 1e-12);
        }
    }
    t.finish()
}

pub fn product_tensor(opts: &VerifyOptions) -> SuiteResult {
    let mut t = Tally::new("product tensor");
    for s_max in [3, 5, 8] {
        let basis = WaveletBasis::new(config(0, s_max, opts));
        let c = build_product_tensor(&basis);
        let norm = |s: usize| basis.normalisation(s);
        for m in 0..s_max {
            for n in 0..=m {
                if m + n > s_max - 1 {
                    continue;
                }
                // phi_m phi_n = N_m N_n (phi_{m+n}/N_{m+n} + (-1)^n phi_{m-n}/N_{m-n})
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                for r in 0..s_max {
                    let mut want = 0.0;
                    if r == m + n {
                        want += norm(m) * norm(n) / norm(r);
                    }
                    if r == m - n {
                        want += sign * norm(m) * norm(n) / norm(r);
                    }
                    t.check("Lucas product identity", (c.get(m, n, r) - want).norm(), 1e-9);
                }
            }
        }
    }
    t.finish()
}

pub fn stretch(opts: &VerifyOptions) -> SuiteResult {
    let mut t = Tally::new("stretch matrix");
    let basis = WaveletBasis::new(config(0, 6, opts));
    let p1 = build_stretch(&basis, 1.0).expect("valid alpha");
    let e = p1.entries();
    for i in 0..6 {
        for j in 0..6 {
            t.check("P_1 = I", (e[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm(), 1e-10);
        }
    }
    let (a, b) = (0.8, 0.5);
    let pa = build_stretch(&basis, a).expect("valid alpha");
    let pb = build_stretch(&basis, b).expect("valid alpha");
    let pab = build_stretch(&basis, a * b).expect("valid alpha");
    let f = basis
        .project(|x| Complex64::new(1.0 - x + 0.5 * x.powi(3) - 0.1 * x.powi(5), 0.0))
        .expect("finite");
    let two_step = pb
        .transpose_apply(&pa.transpose_apply(&f).expect("dims"))
        .expect("dims");
    let direct = pab.transpose_apply(&f).expect("dims");
    t.check("P_a P_b vs P_ab", two_step.max_abs_diff(&direct), 1e-8);
    t.finish()
}

pub fn bounds() -> SuiteResult {
    let mut t = Tally::new("analysis bounds");
    let sp = std::f64::consts::PI.sqrt();
    t.check("coeff_bound(0,2)", (coeff_bound(0, 2, 1.0, 0.0).unwrap_or(f64::NAN) - 2.0 * sp / 3.0).abs(), 1e-12);
    t.check("coeff_bound(0,1)", (coeff_bound(0, 1, 1.0, 1.0).unwrap_or(f64::NAN) - sp).abs(), 1e-12);
    for h in 0..6 {
        for s in 2..10 {
            let b = coeff_bound(h, s, 1.0, 1.0).unwrap_or(f64::NAN);
            t.require("monotone in h", coeff_bound(h + 1, s, 1.0, 1.0).is_ok_and(|v| v < b));
            t.require("monotone in s", coeff_bound(h, s + 1, 1.0, 1.0).is_ok_and(|v| v < b));
        }
    }
    let family = [
        TailFunction::Power(1.5),
        TailFunction::Power(2.0),
        TailFunction::Power(5.0),
        TailFunction::Exponential(0.5),
        TailFunction::Exponential(2.0),
    ];
    for f in &family {
        for h in 1..5 {
            let bound = remainder_bound(f, h).unwrap_or(f64::NAN);
            let mut partial = 0.0;
            for j in h + 1..h + 5000 {
                partial += f.eval(j as f64);
            }
            t.require("remainder dominates tail", partial <= bound);
        }
    }
    t.require(
        "literal estimate at S=3 is flagged",
        error_estimate(0, 3, 1.0).is_ok_and(|e| !e.is_finite()),
    );
    t.finish()
}

/// Every suite, in a fixed order.
pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteResult> {
    vec![
        polynomial_identities(),
        gram(opts),
        differentiation(opts),
        product_tensor(opts),
        stretch(opts),
        bounds(),
    ]
}
