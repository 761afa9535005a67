//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line.
//!
//! Run with `cargo test -p lucas-tau --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use lucas_tau::analysis::{coeff_bound, error_estimate, remainder_bound, TailFunction};
use lucas_tau::op_matrices::{build_product_matrix, build_product_tensor, build_stretch};
use lucas_tau::tau_solver::{problems, NewtonOptions, TauSolver};
use lucas_tau::verify::{self, VerifyOptions};
use lucas_tau::{BasisConfig, CoefficientVector, WaveletBasis};
use num_complex::Complex64;

fn report(id: u32, title: &str, failures: &[String], elapsed: Duration) {
    let ms = elapsed.as_secs_f64() * 1e3;
    if failures.is_empty() {
        println!("PASS criterion {id}: {title} ({ms:.1} ms)");
    } else {
        println!("FAIL criterion {id}: {title} ({ms:.1} ms): {}", failures.join("; "));
    }
    assert!(failures.is_empty(), "criterion {id} failed");
}

fn check(failures: &mut Vec<String>, what: &str, ok: bool) {
    if !ok {
        failures.push(what.to_string());
    }
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

#[test]
fn criterion_1_pantograph_reproduction() {
    let start = Instant::now();
    let mut f = Vec::new();
    let cfg = BasisConfig::new(0, 3, 1.0).unwrap();
    let rep = TauSolver::new(cfg)
        .unwrap()
        .solve(&problems::pantograph_2(), &NewtonOptions::default())
        .unwrap();
    let err = grid(101)
        .map(|t| (rep.solution.eval(t) - t * t).norm())
        .fold(0.0, f64::max);
    let c2 = rep.solution.physical_polynomial(0).unwrap().coeff(2);
    let elapsed = start.elapsed();
    check(&mut f, &format!("max error {err:e}"), err <= 1e-10);
    check(&mut f, &format!("{} Newton iterations", rep.newton_iters), rep.newton_iters <= 2);
    check(&mut f, &format!("|c2 - 1| = {:e}", (c2 - 1.0).norm()), (c2 - 1.0).norm() <= 1e-12);
    check(&mut f, "runtime", elapsed < Duration::from_secs(1));
    report(1, "pantograph problem reproduced", &f, elapsed);
}

#[test]
fn criterion_2_lane_emden_reproduction() {
    let start = Instant::now();
    let mut f = Vec::new();
    let cfg = BasisConfig::new(0, 3, 1.0).unwrap();
    let rep = TauSolver::new(cfg)
        .unwrap()
        .solve(&problems::lane_emden_1(), &NewtonOptions::default())
        .unwrap();
    let (mut ez, mut erho) = (0.0f64, 0.0f64);
    for t in grid(101) {
        ez = ez.max((rep.solution.raw(t) + t * t).norm());
        erho = erho.max((rep.solution.eval(t) - (-t * t).exp()).norm());
    }
    let elapsed = start.elapsed();
    check(&mut f, &format!("z error {ez:e}"), ez <= 1e-8);
    check(&mut f, &format!("rho error {erho:e}"), erho <= 1e-8);
    check(&mut f, &format!("{} Newton iterations", rep.newton_iters), rep.newton_iters <= 10);
    check(&mut f, "runtime", elapsed < Duration::from_secs(2));
    report(2, "Lane-Emden problem reproduced", &f, elapsed);
}

#[test]
fn criterion_3_orthonormality() {
    let start = Instant::now();
    let r = verify::gram(&VerifyOptions::default());
    let elapsed = start.elapsed();
    let mut f = Vec::new();
    check(&mut f, &r.detail, r.passed);
    check(&mut f, "runtime", elapsed < Duration::from_secs(5));
    report(3, "Gram matrix is the identity", &f, elapsed);
}

#[test]
fn criterion_4_differentiation_matrix() {
    let start = Instant::now();
    let r = verify::differentiation(&VerifyOptions::default());
    let mut f = Vec::new();
    check(&mut f, &r.detail, r.passed);
    report(4, "differentiation matrix exact", &f, start.elapsed());
}

#[test]
fn criterion_5_polynomial_identities() {
    let start = Instant::now();
    let r = verify::polynomial_identities();
    let elapsed = start.elapsed();
    let mut f = Vec::new();
    check(&mut f, &r.detail, r.passed);
    check(&mut f, "runtime", elapsed < Duration::from_secs(10));
    report(5, "polynomial identity suites", &f, elapsed);
}

#[test]
fn criterion_6_product_and_stretch() {
    let start = Instant::now();
    let mut f = Vec::new();

    for k in 0..=1 {
        let basis = WaveletBasis::new(BasisConfig::new(k, 6, 2.0).unwrap());
        let c = build_product_tensor(&basis);
        let real = |p: fn(f64) -> f64| move |x: f64| Complex64::new(p(x), 0.0);
        type RealFn = fn(f64) -> f64;
        let pairs: [(RealFn, RealFn); 3] = [
            (|x| 1.0 + x, |x| x * x - 2.0),
            (|x| x * x, |x| 0.5 - x * x * x),
            (|x| 3.0 - x, |x| x.powi(4) + x),
        ];
        for (a, b) in pairs {
            let ea = basis.project(real(a)).unwrap();
            let eb = basis.project(real(b)).unwrap();
            let want = basis.project(|x| Complex64::new(a(x) * b(x), 0.0)).unwrap();
            let got = build_product_matrix(&c, &ea).unwrap().transpose_apply(&eb).unwrap();
            let err = got.max_abs_diff(&want);
            check(&mut f, &format!("product reconstruction {err:e}"), err <= 1e-9);
        }
        let p1 = build_stretch(&basis, 1.0).unwrap();
        let n = p1.dimension();
        let dev = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (p1.entries()[(i, j)] - if i == j { 1.0 } else { 0.0 }).norm())
            .fold(0.0, f64::max);
        check(&mut f, &format!("P_1 deviation {dev:e}"), dev <= 1e-10);
    }

    let prob = problems::pantograph_2();
    for k in 0..=1 {
        let solver = TauSolver::new(BasisConfig::new(k, 3, 1.0).unwrap()).unwrap();
        let dim = solver.basis().dimension();
        let e: CoefficientVector = (0..dim)
            .map(|j| Complex64::new(0.3 - 0.1 * j as f64, 0.05 * (j % 3) as f64))
            .collect::<Vec<_>>()
            .into();
        let a = solver.tau_equations(&prob, &e).unwrap();
        let b = solver.tau_equations_linear(&prob, &e).unwrap();
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        check(&mut f, &format!("linear vs pointwise {err:e}"), err <= 1e-9);
    }
    report(6, "product and stretch matrices", &f, start.elapsed());
}

#[test]
fn criterion_7_bounds() {
    let start = Instant::now();
    let mut f = Vec::new();
    let sp = std::f64::consts::PI.sqrt();
    let hand = [
        (coeff_bound(0, 2, 1.0, 0.0).unwrap(), 2.0 * sp / 3.0),
        (coeff_bound(1, 3, 1.0, 0.0).unwrap(), 2.0 * sp / (2f64.powf(2.5) * 8.0)),
        (coeff_bound(0, 1, 1.0, 1.0).unwrap(), sp),
    ];
    for (got, want) in hand {
        check(&mut f, &format!("coeff_bound {got} vs {want}"), (got - want).abs() <= 1e-12);
    }

    let family = [
        TailFunction::Power(2.0),
        TailFunction::Power(3.5),
        TailFunction::Exponential(1.0),
        TailFunction::Exponential(0.25),
    ];
    for tail in &family {
        let first = if matches!(tail, TailFunction::Power(_)) { 1 } else { 0 };
        for h in first..first + 4 {
            let bound = remainder_bound(tail, h).unwrap();
            let mut partial = 0.0;
            let mut dominated = true;
            for j in h + 1..h + 20_000 {
                partial += tail.eval(j as f64);
                dominated &= partial <= bound;
            }
            check(&mut f, &format!("{tail:?} tail at h={h}"), dominated);
        }
    }

    let s3 = error_estimate(0, 3, 1.0).unwrap();
    check(&mut f, "S=3 estimate not flagged", !s3.is_finite() && s3.radicand < 0.0);

    let mut not_finite = Vec::new();
    let mut not_decreasing = Vec::new();
    for s in 6..=12 {
        let est: Vec<_> = (0..4).map(|k| error_estimate(k, s, 1.0).unwrap()).collect();
        if !est.iter().all(|e| e.is_finite()) {
            not_finite.push(format!("S={s} radicand {:.3e}", est[0].radicand));
        }
        if !est.windows(2).all(|w| w[1].value < w[0].value) {
            not_decreasing.push(s);
        }
    }
    check(&mut f, &format!("estimate not finite: {}", not_finite.join(", ")), not_finite.is_empty());
    check(&mut f, &format!("estimate not decreasing in k for S in {not_decreasing:?}"), not_decreasing.is_empty());
    report(7, "error bounds", &f, start.elapsed());
}

#[test]
fn criterion_8_empirical_convergence() {
    let start = Instant::now();
    let mut f = Vec::new();
    let prob = problems::cosine();
    let err = |s: usize| {
        let rep = TauSolver::new(BasisConfig::new(0, s, 1.0).unwrap())
            .unwrap()
            .solve(&prob, &NewtonOptions::default())
            .unwrap();
        grid(101)
            .map(|t| (rep.solution.eval(t) - t.cos()).norm())
            .fold(0.0, f64::max)
    };
    let (e4, e8) = (err(4), err(8));
    check(&mut f, &format!("S=4 error {e4:e}, S=8 error {e8:e}"), e8 * 10.0 <= e4);
    report(8, "error drops tenfold from S=4 to S=8", &f, start.elapsed());
}
