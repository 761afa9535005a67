//! Lucas polynomials `L_s(x)` and shifted Lucas polynomials `Q_s(t)`.
//!
//! `L_0 = 2`, `L_1 = x`, `L_s = x L_{s-1} + L_{s-2}`. The shifted family is
//! `Q_s(t) = L_s(2t - 2i)`. Besides evaluation and exact coefficient forms,
//! every classical identity of the family is exposed as a function that
//! returns its defect, so callers (and the `verify` suites) can check it.

use std::f64::consts::PI;

use num_complex::{Complex, Complex64};

use crate::error::{invalid, Result};
use crate::poly::ExactPoly;

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// Normalisation weight: 2 for the constant polynomial, 1 otherwise.
pub fn alpha_weight(s: usize) -> f64 {
    if s == 0 {
        2.0
    } else {
        1.0
    }
}

fn gi(re: i128, im: i128) -> Complex<i128> {
    Complex::new(re, im)
}

/// `L_s(theta)` by the three-term recurrence.
pub fn lucas_eval_recurrence(s: usize, theta: ComplexScalar) -> ComplexScalar {
    let mut prev = Complex64::new(2.0, 0.0);
    if s == 0 {
        return prev;
    }
    let mut cur = theta;
    for _ in 1..s {
        let next = theta * cur + prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_s(theta) = 2^-s [(theta - r)^s + (theta + r)^s]`, `r = sqrt(theta^2 + 4)`
/// on the principal branch.
pub fn lucas_eval_closed(s: usize, theta: ComplexScalar) -> ComplexScalar {
    let r = (theta * theta + 4.0).sqrt();
    let s32 = s as u32;
    ((theta - r).powu(s32) + (theta + r).powu(s32)) * 2f64.powi(-(s as i32))
}

/// Exact integer coefficients of `L_s`.
pub fn lucas_coefficients(s: usize) -> ExactPoly {
    let mut prev = ExactPoly::constant(gi(2, 0));
    if s == 0 {
        return prev;
    }
    let mut cur = ExactPoly::monomial(gi(1, 0), 1);
    for _ in 1..s {
        let next = &cur.shift() + &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Defect of the hyperbolic characterisation: `L_s(2 sinh t)` equals
/// `2 sinh(s t)` for odd `s` and `2 cosh(s t)` for even `s`.
pub fn hyperbolic_check(s: usize, theta: f64) -> f64 {
    let lhs = lucas_eval_recurrence(s, Complex64::new(2.0 * theta.sinh(), 0.0));
    let st = s as f64 * theta;
    let rhs = if s % 2 == 1 {
        2.0 * st.sinh()
    } else {
        2.0 * st.cosh()
    };
    (lhs - rhs).norm()
}

/// Residual of the Lucas differential equation
/// `(x^2 + 4) y'' + x y' - s^2 y = 0` for `y = L_s`.
pub fn lucas_ode_residual(s: usize, theta: ComplexScalar) -> ComplexScalar {
    let p = lucas_coefficients(s);
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let (p, d1, d2) = (p.to_f64(), d1.to_f64(), d2.to_f64());
    (theta * theta + 4.0) * d2.eval(theta) + theta * d1.eval(theta)
        - (s * s) as f64 * p.eval(theta)
}

/// The `s` zeros `2i cos((2j + 1) pi / (2s))`, `j = 0..s`.
pub fn lucas_zeros(s: usize) -> Vec<ComplexScalar> {
    (0..s)
        .map(|j| {
            let c = ((2 * j + 1) as f64 * PI / (2 * s) as f64).cos();
            Complex64::new(0.0, 2.0 * c)
        })
        .collect()
}

/// Numerator polynomial `P_s` with
/// `d^s/dx^s (x^2 + 4)^{s - 1/2} = P_s(x) (x^2 + 4)^{-1/2}`.
///
/// Each differentiation maps `P (x^2+4)^a` to
/// `[(x^2 + 4) P' + 2a x P] (x^2+4)^{a-1}`, and `2a` stays an integer.
pub fn rodrigues_numerator(s: usize) -> ExactPoly {
    let quad = ExactPoly::new(vec![gi(4, 0), gi(0, 0), gi(1, 0)]);
    let mut p = ExactPoly::constant(gi(1, 0));
    for j in 0..s {
        let two_a = 2 * s as i128 - 1 - 2 * j as i128;
        p = &(&quad * &p.derivative()) + &p.shift().scale(&gi(two_a, 0));
    }
    p
}

/// Evaluates the Rodrigues representation
/// `2 s!/(2s)! (x^2+4)^{1/2} d^s/dx^s (x^2+4)^{s-1/2}` at a real point.
pub fn rodrigues_eval(s: usize, theta: ComplexScalar) -> Result<ComplexScalar> {
    if theta.im != 0.0 || !theta.re.is_finite() {
        return invalid(format!(
            "Rodrigues evaluation needs a real argument, got {theta}"
        ));
    }
    let x = theta.re;
    let q = x * x + 4.0;
    let ratio: f64 = (s + 1..=2 * s).map(|m| 1.0 / m as f64).product();
    let numer = rodrigues_numerator(s).to_f64().eval_real(x);
    Ok(numer * (2.0 * ratio * q.sqrt() * q.powf(-0.5)))
}

/// `|sum_{s<terms} L_s(theta) t^s - (2 - theta t)/(1 - theta t - t^2)|`.
pub fn generating_check(theta: ComplexScalar, t: ComplexScalar, terms: usize) -> Result<f64> {
    if terms == 0 {
        return invalid("generating_check needs at least one term");
    }
    if t.norm() * (theta.norm() + t.norm()) >= 1.0 {
        return invalid(format!(
            "|t|(|theta| + |t|) must be < 1 for convergence (theta = {theta}, t = {t})"
        ));
    }
    let mut prev = Complex64::new(2.0, 0.0);
    let mut cur = theta;
    let mut tp = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for s in 0..terms {
        let term = if s == 0 { prev } else { cur };
        sum += term * tp;
        tp *= t;
        if s >= 1 {
            let next = theta * cur + prev;
            prev = cur;
            cur = next;
        }
    }
    let closed = (2.0 - theta * t) / (1.0 - theta * t - t * t);
    Ok((sum - closed).norm())
}

/// Max coefficient deviation of `L_m L_n` from `L_{m+n} + (-1)^n L_{m-n}`,
/// computed in exact integer arithmetic. Arguments are ordered so `m >= n`.
pub fn product_expand(m: usize, n: usize) -> f64 {
    let (m, n) = if m >= n { (m, n) } else { (n, m) };
    let lhs = &lucas_coefficients(m) * &lucas_coefficients(n);
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let rhs = &lucas_coefficients(m + n) + &lucas_coefficients(m - n).scale(&gi(sign, 0));
    (&lhs - &rhs).max_abs_component() as f64
}

/// Exact coefficients of the shifted polynomial `Q_s(t) = L_s(2t - 2i)`.
pub fn shifted_coefficients(s: usize) -> ExactPoly {
    lucas_coefficients(s).compose(&ExactPoly::linear(gi(0, -2), gi(2, 0)))
}

/// Chebyshev polynomial of the first kind by its own recurrence.
pub fn chebyshev_t(s: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, u);
    if s == 0 {
        return prev;
    }
    for _ in 1..s {
        let next = 2.0 * u * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `|L_s(2iu) - 2 i^s T_s(u)|`.
pub fn chebyshev_bridge(s: usize, u: f64) -> f64 {
    let lhs = lucas_eval_recurrence(s, Complex64::new(0.0, 2.0 * u));
    let rhs = Complex64::i().powu(s as u32) * (2.0 * chebyshev_t(s, u));
    (lhs - rhs).norm()
}
