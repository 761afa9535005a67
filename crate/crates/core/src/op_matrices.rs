//! Operational matrices on a truncated wavelet family.
//!
//! Rows index the basis function being acted on: `d Psi/dx = D Psi`,
//! `Psi(x) Psi(x)^T E ~ E~ Psi(x)` and `Psi(alpha x) ~ P_alpha Psi(x)`. For a
//! function `f = E^T Psi` the coefficients of `f'` are therefore `D^T E`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::quadrature::ChebyshevPieceRule;
use crate::wavelet_basis::{CoefficientVector, WaveletBasis, WaveletIndex, WEIGHT_SCALE};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixKind {
    Differentiation,
    Power(u32),
    Product,
    Stretch(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationalMatrix {
    entries: DMatrix<Complex64>,
    kind: MatrixKind,
}

impl OperationalMatrix {
    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// `M^T E`: coefficients of `E^T M Psi` in the basis.
    pub fn transpose_apply(&self, e: &CoefficientVector) -> Result<CoefficientVector> {
        if e.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: e.len(),
            });
        }
        let v = DVector::from_column_slice(e.as_slice());
        Ok(self.entries.tr_mul(&v).as_slice().to_vec().into())
    }

    /// `M v` for a vector such as `Psi(x)`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let v = DVector::from_column_slice(v);
        (&self.entries * v).as_slice().to_vec()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Tab-separated `a+bi` cells, one row per line.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        for r in 0..self.entries.nrows() {
            let cells: Vec<String> = (0..self.entries.ncols())
                .map(|c| format_complex(self.entries[(r, c)]))
                .collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }
}

pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// Differentiation matrix, built by expanding each exact local derivative in
/// the lower-order local polynomials (a triangular solve on coefficients).
pub fn build_d(basis: &WaveletBasis) -> OperationalMatrix {
    let cfg = basis.config();
    let order = cfg.order();
    let dilation = (1u64 << cfg.k()) as f64;
    let mut block = DMatrix::<Complex64>::zeros(order, order);
    for s in 1..order {
        let mut rem = basis.local_exact(s).derivative().to_f64();
        for r in (0..s).rev() {
            let g = basis.local_exact(r).to_f64();
            let c = rem.coeff(r) / g.leading();
            rem = &rem - &g.scale(&c);
            block[(s, r)] =
                c * (dilation * basis.normalisation(s) / basis.normalisation(r));
        }
    }
    let n = cfg.dimension();
    let mut entries = DMatrix::zeros(n, n);
    for h in 0..cfg.blocks() {
        entries
            .view_mut((h * order, h * order), (order, order))
            .copy_from(&block);
    }
    OperationalMatrix {
        entries,
        kind: MatrixKind::Differentiation,
    }
}

/// `D^n` by repeated multiplication.
pub fn power_d(d: &OperationalMatrix, n: u32) -> Result<OperationalMatrix> {
    if d.kind != MatrixKind::Differentiation {
        return invalid("power_d needs a differentiation matrix");
    }
    if n == 0 {
        return invalid("derivative order must be at least 1");
    }
    let mut acc = d.entries.clone();
    for _ in 1..n {
        acc = &acc * &d.entries;
    }
    Ok(OperationalMatrix {
        entries: acc,
        kind: MatrixKind::Power(n),
    })
}

/// `C[i][j][m] = <phi_i phi_j, phi_m>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductTensor {
    dim: usize,
    data: Vec<Complex64>,
}

impl ProductTensor {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, m: usize) -> Complex64 {
        self.data[(i * self.dim + j) * self.dim + m]
    }
}

pub fn build_product_tensor(basis: &WaveletBasis) -> ProductTensor {
    let dim = basis.dimension();
    let values: Vec<Vec<Complex64>> = (0..dim)
        .map(|j| {
            basis
                .synthesize_at_nodes(&CoefficientVector::unit(dim, j))
                .expect("unit vector has basis length")
        })
        .collect();
    let order = basis.config().order();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim * dim];
    for i in 0..dim {
        for j in i..dim {
            if i / order != j / order {
                continue;
            }
            let samples: Vec<Complex64> =
                values[i].iter().zip(&values[j]).map(|(a, b)| a * b).collect();
            let coeffs = basis
                .project_samples(&samples)
                .expect("samples taken at basis nodes");
            for (m, c) in coeffs.iter().enumerate() {
                data[(i * dim + j) * dim + m] = *c;
                data[(j * dim + i) * dim + m] = *c;
            }
        }
    }
    ProductTensor { dim, data }
}

/// `E~[j][m] = sum_i E_i C[i][j][m]`, so that `Psi Psi^T E ~ E~ Psi`.
pub fn build_product_matrix(c: &ProductTensor, e: &CoefficientVector) -> Result<OperationalMatrix> {
    let dim = c.dimension();
    if e.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: e.len(),
        });
    }
    let mut entries = DMatrix::zeros(dim, dim);
    for j in 0..dim {
        for m in 0..dim {
            entries[(j, m)] = (0..dim).map(|i| e[i] * c.get(i, j, m)).sum();
        }
    }
    Ok(OperationalMatrix {
        entries,
        kind: MatrixKind::Product,
    })
}

/// `P[j][m] = <phi_j(alpha .), phi_m>`, so `Psi(alpha x) ~ P Psi(x)`.
///
/// The weighted integrals are split wherever `alpha x` crosses a block
/// boundary, since `phi_j(alpha x)` is only piecewise polynomial there.
pub fn build_stretch(basis: &WaveletBasis, alpha: f64) -> Result<OperationalMatrix> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return invalid(format!("stretch factor must lie in (0, 1], got {alpha}"));
    }
    let cfg = *basis.config();
    let dim = cfg.dimension();
    let blocks = cfg.blocks();
    let rule = ChebyshevPieceRule::new(cfg.quad_order());
    let factor = WEIGHT_SCALE / blocks as f64;
    let mut entries = DMatrix::zeros(dim, dim);
    for hm in 0..blocks {
        let mut cuts = vec![-1.0];
        for b in 1..blocks {
            let u = 2.0 * b as f64 / alpha - 2.0 * hm as f64 - 1.0;
            if u > -1.0 && u < 1.0 {
                cuts.push(u);
            }
        }
        cuts.push(1.0);
        for sm in 0..cfg.order() {
            let wm = WaveletIndex::new(hm, sm);
            let m = wm.flat(&cfg);
            for j in 0..dim {
                let wj = WaveletIndex::from_flat(&cfg, j);
                let integrand = |u: f64| {
                    let x = cfg.from_local(hm, u);
                    let a = basis.wavelet_eval(wj, alpha * x).expect("valid index");
                    let b = basis.wavelet_eval(wm, x).expect("valid index");
                    a * b.conj()
                };
                let total: Complex64 = cuts
                    .windows(2)
                    .map(|w| rule.integrate(w[0], w[1], integrand))
                    .sum();
                entries[(j, m)] = total * factor;
            }
        }
    }
    Ok(OperationalMatrix {
        entries,
        kind: MatrixKind::Stretch(alpha),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lucas_poly::alpha_weight;
    use crate::wavelet_basis::BasisConfig;

    fn basis(k: u32, s: usize) -> WaveletBasis {
        WaveletBasis::new(BasisConfig::new(k, s, 2.0).unwrap())
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn magnitudes_for_three_orders() {
        let d = build_d(&basis(0, 3));
        let e = d.entries();
        assert!((e[(1, 0)].norm() - 2f64.sqrt()).abs() < 1e-12);
        assert!((e[(2, 1)].norm() - 4.0).abs() < 1e-12);
        assert!(e[(2, 0)].norm() < 1e-12);
        assert!((0..3).all(|m| e[(0, m)].norm() == 0.0));
    }

    #[test]
    fn block_pattern_and_magnitudes() {
        for k in 0..3u32 {
            let b = basis(k, 8);
            let d = build_d(&b);
            let e = d.entries();
            for h in 0..b.config().blocks() {
                for s in 0..8 {
                    for r in 0..8 {
                        let z = e[(h * 8 + s, h * 8 + r)];
                        if s > r && (s + r) % 2 == 1 {
                            let want = 2f64.powi(k as i32 + 1) * s as f64
                                * (alpha_weight(s) / alpha_weight(r)).sqrt();
                            assert!((z.norm() - want).abs() < 1e-12, "k={k} s={s} r={r}");
                        } else {
                            assert!(z.norm() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn derivative_of_quadratic() {
        let b = basis(0, 4);
        let d = build_d(&b);
        let e = b.project(|x| c(x * x)).unwrap();
        let de = d.transpose_apply(&e).unwrap();
        let want = b.project(|x| c(2.0 * x)).unwrap();
        assert!(de.max_abs_diff(&want) < 1e-9);
    }

    #[test]
    fn powers() {
        let b = basis(0, 3);
        let d = build_d(&b);
        assert_eq!(power_d(&d, 1).unwrap().entries(), d.entries());
        assert!(power_d(&d, 3).unwrap().max_abs() < 1e-12);

        let b5 = basis(0, 5);
        let d5 = build_d(&b5);
        let d2 = power_d(&d5, 2).unwrap();
        let e = b5.project(|x| c(x.powi(3))).unwrap();
        let want = b5.project(|x| c(6.0 * x)).unwrap();
        assert!(d2.transpose_apply(&e).unwrap().max_abs_diff(&want) < 1e-8);
        assert!(power_d(&d2, 2).is_err());
    }

    #[test]
    fn product_tensor_structure() {
        let b = basis(0, 3);
        let t = build_product_tensor(&b);
        let phi0 = 4.0 / (2.0 * std::f64::consts::PI).sqrt();
        assert!((t.get(0, 0, 0) - phi0).norm() < 1e-12);

        let b1 = basis(1, 3);
        let t1 = build_product_tensor(&b1);
        for i in 0..3 {
            for j in 3..6 {
                for m in 0..6 {
                    assert_eq!(t1.get(i, j, m), c(0.0));
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                for m in 0..6 {
                    assert_eq!(t1.get(i, j, m), t1.get(j, i, m));
                }
            }
        }
    }

    #[test]
    fn product_matrix_cases() {
        let b = basis(0, 5);
        let t = build_product_tensor(&b);
        assert!(build_product_matrix(&t, &CoefficientVector::zeros(5))
            .unwrap()
            .max_abs()
            < 1e-300);
        assert!(build_product_matrix(&t, &CoefficientVector::zeros(4)).is_err());

        // multiplying by the constant basis function scales by its value
        let m = build_product_matrix(&t, &CoefficientVector::unit(5, 0)).unwrap();
        let phi0 = 4.0 / (2.0 * std::f64::consts::PI).sqrt();
        for j in 0..5 {
            for k in 0..5 {
                let want = if j == k { phi0 } else { 0.0 };
                assert!((m.entries()[(j, k)] - want).norm() < 1e-12);
            }
        }

        // Psi Psi^T E ~ E~ Psi with E = coefficients of x
        let e = b.project(c).unwrap();
        let m = build_product_matrix(&t, &e).unwrap();
        for x in [0.1, 0.6, 1.3, 1.8] {
            let psi = b.basis_vector(x);
            let rhs = m.apply(&psi);
            for j in 0..4 {
                assert!((rhs[j] - psi[j] * x).norm() < 1e-8, "x={x} j={j}");
            }
        }
    }

    #[test]
    fn stretch_cases() {
        let b = basis(0, 4);
        let p1 = build_stretch(&b, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p1.entries()[(i, j)] - want).norm() < 1e-10);
            }
        }
        let ph = build_stretch(&b, 0.5).unwrap();
        let e = b.project(c).unwrap();
        let want = b.project(|x| c(x / 2.0)).unwrap();
        assert!(ph.transpose_apply(&e).unwrap().max_abs_diff(&want) < 1e-10);
        assert!(build_stretch(&b, 0.0).is_err());
        assert!(build_stretch(&b, 1.5).is_err());
    }

    #[test]
    fn stretch_straddling_blocks() {
        // k = 2, alpha = 0.7: phi_j(0.7 x) crosses block edges inside supports
        let b = basis(2, 4);
        let p = build_stretch(&b, 0.7).unwrap();
        let f = |x: f64| c(1.0 + x - 0.3 * x * x * x);
        let e = b.project(f).unwrap();
        let got = p.transpose_apply(&e).unwrap();
        let want = b.project(|x| f(0.7 * x)).unwrap();
        // f(0.7 x) stays cubic on each block, so both are exact expansions
        assert!(got.max_abs_diff(&want) < 1e-9);
    }

    #[test]
    fn table_format() {
        let d = build_d(&basis(0, 2));
        let table = d.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "0+0i\t0+0i");
        assert_eq!(lines[1].split('\t').count(), 2);
    }
}
