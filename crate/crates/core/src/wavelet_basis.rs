//! The truncated shifted Lucas wavelet family on `[0, 2]`.
//!
//! For resolution `k`, translation `h < 2^k` and order `s < S`:
//!
//! ```text
//! phi_{h,s}(x) = 2^{(k+1)/2} sqrt(2 / (pi alpha_s)) Q_s(i (2^k x - 2h)),
//!     x in [h / 2^{k-1}, (h + 1) / 2^{k-1})
//! ```
//!
//! and zero elsewhere. With `u = 2^k x - 2h - 1` the argument is `i (u + 1)`
//! and `Q_s(i (u + 1)) = L_s(2iu) = 2 i^s T_s(u)`, so each block is a phased
//! Chebyshev family and the per-block weight `(1 - u^2)^{-1/2}` makes the
//! family orthogonal. The single weight scale [`WEIGHT_SCALE`] makes it
//! orthonormal.

use std::ops::Index;

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};

use crate::error::{invalid, Error, Result};
use crate::lucas_poly::{alpha_weight, shifted_coefficients};
use crate::poly::{DensePolynomial, ExactPoly};
use crate::quadrature::GaussChebyshev;

/// Global constant `c_w` in `w_h(x) = c_w (1 - u^2)^{-1/2}`, fixed so that
/// `<phi_{0,0}, phi_{0,0}> = 1` at `k = 0`.
pub const WEIGHT_SCALE: f64 = 0.125;

/// Parameters of a truncated wavelet family of dimension `2^k S`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConfig {
    k: u32,
    order: usize,
    length: f64,
    quad_order: usize,
}

impl BasisConfig {
    /// Family with resolution `k`, `order` polynomial orders per block, for
    /// problems posed on `[0, length]`.
    pub fn new(k: u32, order: usize, length: f64) -> Result<Self> {
        if order == 0 {
            return invalid("S (polynomial orders per block) must be positive");
        }
        if k > 12 {
            return invalid(format!("resolution k = {k} is too large"));
        }
        if !(length > 0.0 && length <= 2.0) {
            return invalid(format!("domain length must lie in (0, 2], got {length}"));
        }
        Ok(Self {
            k,
            order,
            length,
            quad_order: Self::default_quad_order(order),
        })
    }

    pub fn default_quad_order(order: usize) -> usize {
        64.max(8 * order)
    }

    /// Override the quadrature order; at least `8 S` nodes are required.
    pub fn with_quad_order(self, quad_order: usize) -> Result<Self> {
        if quad_order < 8 * self.order {
            return invalid(format!(
                "quadrature order {quad_order} is below 8*S = {}",
                8 * self.order
            ));
        }
        Ok(Self { quad_order, ..self })
    }

    /// Override the quadrature order without the `8 S` floor, for
    /// deliberately under-resolved diagnostics.
    pub fn with_quad_order_unchecked(self, quad_order: usize) -> Self {
        assert!(quad_order > 0, "quadrature order must be positive");
        Self { quad_order, ..self }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Polynomial orders per block (`S`).
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn blocks(&self) -> usize {
        1 << self.k
    }

    pub fn dimension(&self) -> usize {
        self.blocks() * self.order
    }

    fn scale(&self) -> f64 {
        (1u64 << self.k) as f64
    }

    /// Half-open support `[h / 2^{k-1}, (h+1) / 2^{k-1})` of block `h`.
    pub fn support(&self, h: usize) -> (f64, f64) {
        let s = self.scale();
        (2.0 * h as f64 / s, 2.0 * (h + 1) as f64 / s)
    }

    /// Block containing `x`, `None` outside `[0, 2)`.
    pub fn block_of(&self, x: f64) -> Option<usize> {
        if !(0.0..2.0).contains(&x) {
            return None;
        }
        Some(((x * self.scale() / 2.0).floor() as usize).min(self.blocks() - 1))
    }

    /// Block whose closure contains `x` from the left, for `x` in `(0, 2]`.
    pub fn block_of_left(&self, x: f64) -> Option<usize> {
        if !(x > 0.0 && x <= 2.0) {
            return self.block_of(x);
        }
        let b = (x * self.scale() / 2.0).ceil() as usize;
        Some(b.clamp(1, self.blocks()) - 1)
    }

    /// Local coordinate `u = 2^k x - 2h - 1`.
    pub fn to_local(&self, h: usize, x: f64) -> f64 {
        self.scale() * x - 2.0 * h as f64 - 1.0
    }

    pub fn from_local(&self, h: usize, u: f64) -> f64 {
        (u + 2.0 * h as f64 + 1.0) / self.scale()
    }

    /// Physical `theta in [0, l]` to canonical `x in [0, 2]`.
    pub fn to_canonical(&self, theta: f64) -> f64 {
        2.0 * theta / self.length
    }

    pub fn to_physical(&self, x: f64) -> f64 {
        0.5 * self.length * x
    }
}

/// Position `(h, s)` of a wavelet inside the family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WaveletIndex {
    pub h: usize,
    pub s: usize,
}

impl WaveletIndex {
    pub fn new(h: usize, s: usize) -> Self {
        Self { h, s }
    }

    pub fn flat(&self, cfg: &BasisConfig) -> usize {
        self.h * cfg.order() + self.s
    }

    pub fn from_flat(cfg: &BasisConfig, j: usize) -> Self {
        Self {
            h: j / cfg.order(),
            s: j % cfg.order(),
        }
    }

    pub fn is_valid(&self, cfg: &BasisConfig) -> bool {
        self.h < cfg.blocks() && self.s < cfg.order()
    }
}

/// Expansion coefficients in flat `(h, s)` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<Complex64>);

impl CoefficientVector {
    pub fn zeros(len: usize) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn unit(len: usize, j: usize) -> Self {
        let mut v = Self::zeros(len);
        v.0[j] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    /// Max-norm distance to another vector of the same length.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl From<Vec<Complex64>> for CoefficientVector {
    fn from(v: Vec<Complex64>) -> Self {
        Self(v)
    }
}

impl Index<usize> for CoefficientVector {
    type Output = Complex64;

    fn index(&self, j: usize) -> &Complex64 {
        &self.0[j]
    }
}

/// A basis realisation: per-order local polynomials plus the quadrature
/// tables every projection uses. Immutable once built.
#[derive(Debug, Clone)]
pub struct WaveletBasis {
    cfg: BasisConfig,
    exact: Vec<ExactPoly>,
    norms: Vec<f64>,
    polys: Vec<DensePolynomial>,
    quad: GaussChebyshev,
    // node_values[s][i] = phi_s at local node u_i
    node_values: Vec<Vec<Complex64>>,
}

impl WaveletBasis {
    pub fn new(cfg: BasisConfig) -> Self {
        let i_plus_iu = ExactPoly::linear(Complex::new(0, 1), Complex::new(0, 1));
        let amp = 2f64.powf((cfg.k() as f64 + 1.0) / 2.0);
        let mut exact = Vec::with_capacity(cfg.order());
        let mut norms = Vec::with_capacity(cfg.order());
        let mut polys = Vec::with_capacity(cfg.order());
        for s in 0..cfg.order() {
            let g = shifted_coefficients(s).compose(&i_plus_iu);
            let norm = amp * (2.0 / (std::f64::consts::PI * alpha_weight(s))).sqrt();
            polys.push(g.to_f64().scale(&Complex64::new(norm, 0.0)));
            exact.push(g);
            norms.push(norm);
        }
        let quad = GaussChebyshev::new(cfg.quad_order());
        let node_values = polys
            .iter()
            .map(|p| quad.nodes().iter().map(|&u| p.eval_real(u)).collect())
            .collect();
        Self {
            cfg,
            exact,
            norms,
            polys,
            quad,
            node_values,
        }
    }

    pub fn config(&self) -> &BasisConfig {
        &self.cfg
    }

    pub fn dimension(&self) -> usize {
        self.cfg.dimension()
    }

    /// Local polynomial of order `s`, in `u`, including normalisation.
    pub fn local_polynomial(&self, s: usize) -> &DensePolynomial {
        &self.polys[s]
    }

    /// Gaussian-integer part `L_s(2iu)` of the local polynomial.
    pub fn local_exact(&self, s: usize) -> &ExactPoly {
        &self.exact[s]
    }

    /// Normalisation factor `2^{(k+1)/2} sqrt(2 / (pi alpha_s))`.
    pub fn normalisation(&self, s: usize) -> f64 {
        self.norms[s]
    }

    pub fn quadrature(&self) -> &GaussChebyshev {
        &self.quad
    }

    pub fn wavelet_eval(&self, idx: WaveletIndex, x: f64) -> Result<Complex64> {
        if !idx.is_valid(&self.cfg) {
            return invalid(format!(
                "wavelet index (h={}, s={}) outside 2^k = {} blocks, S = {}",
                idx.h,
                idx.s,
                self.cfg.blocks(),
                self.cfg.order()
            ));
        }
        Ok(match self.cfg.block_of(x) {
            Some(h) if h == idx.h => self.polys[idx.s].eval_real(self.cfg.to_local(h, x)),
            _ => Complex64::new(0.0, 0.0),
        })
    }

    fn vector_in_block(&self, block: Option<usize>, x: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dimension()];
        if let Some(h) = block {
            let u = self.cfg.to_local(h, x);
            let base = h * self.cfg.order();
            for (s, p) in self.polys.iter().enumerate() {
                out[base + s] = p.eval_real(u);
            }
        }
        out
    }

    /// `Psi(x)` in flat order; all zeros outside `[0, 2)`.
    pub fn basis_vector(&self, x: f64) -> Vec<Complex64> {
        self.vector_in_block(self.cfg.block_of(x), x)
    }

    /// Left limit of `Psi` at `x`, so the right end `x = 2` is reachable.
    pub fn basis_vector_left(&self, x: f64) -> Vec<Complex64> {
        self.vector_in_block(self.cfg.block_of_left(x), x)
    }

    /// Quadrature points in canonical coordinates, block-major, ascending.
    pub fn node_points(&self) -> Vec<f64> {
        (0..self.cfg.blocks())
            .flat_map(|h| self.quad.nodes().iter().map(move |&u| (h, u)))
            .map(|(h, u)| self.cfg.from_local(h, u))
            .collect()
    }

    fn block_factor(&self) -> f64 {
        WEIGHT_SCALE / self.cfg.blocks() as f64 * self.quad.weight()
    }

    /// `<f, g> = sum_h int f conj(g) w_h dx` by Gauss–Chebyshev quadrature.
    pub fn inner_product<F, G>(&self, f: F, g: G) -> Result<Complex64>
    where
        F: Fn(f64) -> Complex64,
        G: Fn(f64) -> Complex64,
    {
        let mut total = Complex64::new(0.0, 0.0);
        for x in self.node_points() {
            let (a, b) = (f(x), g(x));
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::NonFinite {
                    theta: self.cfg.to_physical(x),
                });
            }
            total += a * b.conj();
        }
        Ok(total * self.block_factor())
    }

    /// Matrix of pairwise inner products `<phi_i, phi_j>`.
    pub fn gram_matrix(&self) -> DMatrix<Complex64> {
        let n = self.dimension();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            let wi = WaveletIndex::from_flat(&self.cfg, i);
            for j in 0..n {
                let wj = WaveletIndex::from_flat(&self.cfg, j);
                g[(i, j)] = self
                    .inner_product(
                        |x| self.wavelet_eval(wi, x).unwrap(),
                        |x| self.wavelet_eval(wj, x).unwrap(),
                    )
                    .expect("basis functions are finite");
            }
        }
        g
    }

    /// `<f, f>` from samples of `f` at [`Self::node_points`].
    pub fn weighted_norm_sq_samples(&self, samples: &[Complex64]) -> f64 {
        samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.block_factor()
    }

    /// Coefficients `<f, phi_j>` from samples of `f` at [`Self::node_points`].
    pub fn project_samples(&self, samples: &[Complex64]) -> Result<CoefficientVector> {
        let n = self.quad.order();
        if samples.len() != n * self.cfg.blocks() {
            return Err(Error::DimensionMismatch {
                expected: n * self.cfg.blocks(),
                found: samples.len(),
            });
        }
        let factor = self.block_factor();
        let mut out = Vec::with_capacity(self.dimension());
        for block in samples.chunks(n) {
            for vals in &self.node_values {
                let acc: Complex64 = block.iter().zip(vals).map(|(f, p)| f * p.conj()).sum();
                out.push(acc * factor);
            }
        }
        Ok(out.into())
    }

    /// Analysis: `E_{h,s} = <f, phi_{h,s}>`.
    pub fn project<F: Fn(f64) -> Complex64>(&self, f: F) -> Result<CoefficientVector> {
        let pts = self.node_points();
        let mut samples = Vec::with_capacity(pts.len());
        for x in pts {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    theta: self.cfg.to_physical(x),
                });
            }
            samples.push(v);
        }
        self.project_samples(&samples)
    }

    fn check_len(&self, e: &CoefficientVector) -> Result<()> {
        if e.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: e.len(),
            });
        }
        Ok(())
    }

    fn synthesize_block(&self, e: &CoefficientVector, block: Option<usize>, x: f64) -> Complex64 {
        match block {
            Some(h) => {
                let u = self.cfg.to_local(h, x);
                let base = h * self.cfg.order();
                self.polys
                    .iter()
                    .enumerate()
                    .map(|(s, p)| e[base + s] * p.eval_real(u))
                    .sum()
            }
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Synthesis `E^T Psi(x)`.
    pub fn synthesize(&self, e: &CoefficientVector, x: f64) -> Result<Complex64> {
        self.check_len(e)?;
        Ok(self.synthesize_block(e, self.cfg.block_of(x), x))
    }

    /// Synthesis using the left limit at block boundaries (reaches `x = 2`).
    pub fn synthesize_left(&self, e: &CoefficientVector, x: f64) -> Result<Complex64> {
        self.check_len(e)?;
        Ok(self.synthesize_block(e, self.cfg.block_of_left(x), x))
    }

    /// `E^T Psi` at every quadrature node, in [`Self::node_points`] order.
    pub fn synthesize_at_nodes(&self, e: &CoefficientVector) -> Result<Vec<Complex64>> {
        self.check_len(e)?;
        let n = self.quad.order();
        let s_max = self.cfg.order();
        let mut out = Vec::with_capacity(n * self.cfg.blocks());
        for h in 0..self.cfg.blocks() {
            let coeffs = &e.as_slice()[h * s_max..(h + 1) * s_max];
            for i in 0..n {
                out.push(
                    coeffs
                        .iter()
                        .zip(&self.node_values)
                        .map(|(c, vals)| c * vals[i])
                        .sum(),
                );
            }
        }
        Ok(out)
    }

    /// Monomial form of the synthesized function on block `h`, in the
    /// canonical variable `x`.
    pub fn block_polynomial(&self, e: &CoefficientVector, h: usize) -> Result<DensePolynomial> {
        self.check_len(e)?;
        let base = h * self.cfg.order();
        let local = self
            .polys
            .iter()
            .enumerate()
            .fold(DensePolynomial::zero(), |acc, (s, p)| {
                &acc + &p.scale(&e[base + s])
            });
        let u_of_x = DensePolynomial::linear(
            Complex64::new(-(2.0 * h as f64) - 1.0, 0.0),
            Complex64::new(self.cfg.scale(), 0.0),
        );
        Ok(local.compose(&u_of_x))
    }

    /// Monomial form on block `h` in the physical variable `theta = l x / 2`.
    pub fn physical_polynomial(&self, e: &CoefficientVector, h: usize) -> Result<DensePolynomial> {
        let x_of_theta = DensePolynomial::monomial(Complex64::new(2.0 / self.cfg.length(), 0.0), 1);
        Ok(self.block_polynomial(e, h)?.compose(&x_of_theta))
    }
}
