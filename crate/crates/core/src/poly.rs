//! Dense polynomials with complex coefficients.
//!
//! [`ExactPoly`] keeps Gaussian-integer coefficients so identities between
//! Lucas polynomials can be checked without rounding; [`DensePolynomial`] is
//! the floating-point form used at evaluation time.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::{Complex, Complex64};
use num_traits::{Num, NumCast, Zero};

/// Polynomial with ascending complex coefficients, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly<T> {
    coeffs: Vec<Complex<T>>,
}

/// Gaussian-integer polynomial.
pub type ExactPoly = Poly<i128>;

/// Floating complex polynomial.
pub type DensePolynomial = Poly<f64>;

impl<T: Clone + Num> Poly<T> {
    pub fn new(mut coeffs: Vec<Complex<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex<T>) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c * x^n`.
    pub fn monomial(c: Complex<T>, n: usize) -> Self {
        let mut coeffs = vec![Complex::zero(); n + 1];
        coeffs[n] = c;
        Self::new(coeffs)
    }

    /// `a + b x`.
    pub fn linear(a: Complex<T>, b: Complex<T>) -> Self {
        Self::new(vec![a, b])
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Coefficient of `x^n`, zero beyond the degree.
    pub fn coeff(&self, n: usize) -> Complex<T> {
        self.coeffs.get(n).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex<T> {
        self.coeffs.last().cloned().unwrap_or_else(Complex::zero)
    }

    pub fn scale(&self, c: &Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    /// Multiply by `x`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Complex::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    /// `p(q(x))` by Horner's scheme on polynomials.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone());
        }
        acc
    }
}

impl<T: Clone + Num + NumCast> Poly<T> {
    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, c)| {
                    let n: T = NumCast::from(n).expect("degree fits coefficient type");
                    c.clone() * n
                })
                .collect(),
        )
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }
}

impl ExactPoly {
    pub fn to_f64(&self) -> DensePolynomial {
        Poly::new(
            self.coeffs
                .iter()
                .map(|c| Complex64::new(c.re as f64, c.im as f64))
                .collect(),
        )
    }

    /// Largest absolute component over all coefficients.
    pub fn max_abs_component(&self) -> i128 {
        self.coeffs
            .iter()
            .map(|c| c.re.abs().max(c.im.abs()))
            .max()
            .unwrap_or(0)
    }
}

impl DensePolynomial {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::zero(), |acc, c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }
}

impl<T: Clone + Num> Add for &Poly<T> {
    type Output = Poly<T>;

    fn add(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Sub for &Poly<T> {
    type Output = Poly<T>;

    fn sub(self, rhs: &Poly<T>) -> Poly<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Clone + Num> Mul for &Poly<T> {
    type Output = Poly<T>;

    fn mul(self, rhs: &Poly<T>) -> Poly<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Complex::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly::new(out)
    }
}

impl<T: Clone + Num + Neg<Output = T>> Neg for &Poly<T> {
    type Output = Poly<T>;

    fn neg(self) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}
