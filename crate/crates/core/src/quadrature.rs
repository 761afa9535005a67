//! Chebyshev-weighted quadrature on `[-1, 1]`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;

/// Gauss–Chebyshev rule of the first kind:
/// `int_{-1}^{1} f(u) (1 - u^2)^{-1/2} du ~ (pi/n) sum f(u_i)`,
/// `u_i = cos((2i - 1) pi / (2n))`. Nodes are interior, so `u = +-1` is never
/// sampled.
#[derive(Debug, Clone)]
pub struct GaussChebyshev {
    nodes: Vec<f64>,
}

impl GaussChebyshev {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature order must be positive");
        let nodes = (1..=n)
            .rev()
            .map(|i| ((2 * i - 1) as f64 * PI / (2 * n) as f64).cos())
            .collect();
        Self { nodes }
    }

    /// Nodes in ascending order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// The common weight `pi / n`.
    pub fn weight(&self) -> f64 {
        PI / self.nodes.len() as f64
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, mut f: F) -> Complex64 {
        self.nodes.iter().map(|&u| f(u)).sum::<Complex64>() * self.weight()
    }
}

/// Weighted integral `int_a^b f(u) (1 - u^2)^{-1/2} du` over a sub-range of
/// `[-1, 1]`, through `u = cos t` and Gauss–Legendre in `t`. Used where the
/// integrand has breakpoints inside a subinterval.
#[derive(Debug, Clone)]
pub struct ChebyshevPieceRule {
    legendre: GaussLegendre,
}

impl ChebyshevPieceRule {
    pub fn new(n: usize) -> Self {
        let n = NonZeroUsize::new(n.max(2)).expect("nonzero");
        Self {
            legendre: GaussLegendre::new(n),
        }
    }

    pub fn integrate<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let (t_lo, t_hi) = (b.clamp(-1.0, 1.0).acos(), a.clamp(-1.0, 1.0).acos());
        let half = 0.5 * (t_hi - t_lo);
        let mid = 0.5 * (t_hi + t_lo);
        self.legendre
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| f((mid + half * x).cos()) * w)
            .sum::<Complex64>()
            * half
    }
}
