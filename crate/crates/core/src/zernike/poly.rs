//! Elements of `V_N` in coefficient form.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::eval::{complex_norm, ZernikeTable};
use super::index::{basis_len, ZernikeIndex};
use crate::error::{Error, Result};
use crate::point::PolarPoint;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Degree `N` such that `(N+1)(N+2)/2 == len`, if any.
pub fn degree_for_len(len: usize) -> Option<usize> {
    let mut n = 0;
    while basis_len(n) < len {
        n += 1;
    }
    (basis_len(n) == len).then_some(n)
}

/// A polynomial `sum_j c_j Z_j` with `j < J_N`.
///
/// Inner products, norms and projections are exact in this representation
/// because the `Z_j` are orthonormal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskPolynomial {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl DiskPolynomial {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![ZERO; basis_len(degree)],
        }
    }

    /// The basis vector `Z_j` viewed as an element of `V_degree`.
    pub fn basis(j: usize, degree: usize) -> Result<Self> {
        let mut p = Self::zeros(degree);
        let len = p.coeffs.len();
        let slot = p.coeffs.get_mut(j).ok_or(Error::InvalidParameter(format!(
            "basis index {j} outside V_{degree} (dimension {len})"
        )))?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(p)
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        let degree = degree_for_len(coeffs.len())
            .ok_or(Error::BadCoefficientLength { len: coeffs.len() })?;
        Ok(Self { degree, coeffs })
    }

    /// Places `block` at single indices `start..start + block.len()` of a
    /// zero polynomial of the given degree.
    pub fn from_block(degree: usize, start: usize, block: &[Complex64]) -> Self {
        let mut p = Self::zeros(degree);
        p.coeffs[start..start + block.len()].copy_from_slice(block);
        p
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient `j`, zero beyond the stored range.
    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs.get(j).copied().unwrap_or(ZERO)
    }

    /// `<self, other> = sum_j self_j conj(other_j)`; the shorter vector is
    /// zero-padded.
    pub fn inner_product(&self, other: &DiskPolynomial) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, point: PolarPoint) -> Result<Complex64> {
        super::radial::check_radius(point.r)?;
        Ok(self.eval_with(&ZernikeTable::new(self.degree), point))
    }

    /// Evaluation using a prebuilt table of degree at least `self.degree()`.
    pub fn eval_with(&self, table: &ZernikeTable, point: PolarPoint) -> Complex64 {
        debug_assert!(table.degree() >= self.degree);
        let row = table.complex_block(point, 0..self.coeffs.len());
        row.iter().zip(&self.coeffs).map(|(z, c)| z * c).sum()
    }

    /// Orthogonal projection onto `V_degree` (truncation), or zero-padded
    /// embedding when `degree` exceeds the current degree.
    pub fn project(&self, degree: usize) -> DiskPolynomial {
        let mut coeffs = vec![ZERO; basis_len(degree)];
        let n = coeffs.len().min(self.coeffs.len());
        coeffs[..n].copy_from_slice(&self.coeffs[..n]);
        DiskPolynomial { degree, coeffs }
    }

    /// Largest `n` carrying a coefficient above `tol` in modulus.
    pub fn effective_degree(&self, tol: f64) -> Option<usize> {
        self.coeffs
            .iter()
            .rposition(|c| c.norm() > tol)
            .map(|j| ZernikeIndex::from_single(j).n() as usize)
    }

    /// Largest `|c_{n,-m} - conj(c_{n,m})|`; zero for real-valued polynomials.
    pub fn conjugate_asymmetry(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mirror = ZernikeIndex::from_single(j).mirrored().single();
                (self.coeffs[mirror] - c.conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.conjugate_asymmetry() <= tol
    }

    pub fn conj_coeffs(&self) -> DiskPolynomial {
        DiskPolynomial {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Product with the complex coordinate `z = r e^{i phi}`, exact in
    /// coefficient space. The result has degree `degree + 1`.
    ///
    /// Uses, for `m >= 0`,
    /// `r R_n^m = [(n+m+2) R_{n+1}^{m+1} + (n-m) R_{n-1}^{m+1}] / (2(n+1))`
    /// and, for `m >= 1`,
    /// `r R_n^m = [(n-m+2) R_{n+1}^{m-1} + (n+m) R_{n-1}^{m-1}] / (2(n+1))`.
    pub fn mul_by_z(&self) -> DiskPolynomial {
        let mut out = DiskPolynomial::zeros(self.degree + 1);
        for (j, &c) in self.coeffs.iter().enumerate() {
            if c == ZERO {
                continue;
            }
            let idx = ZernikeIndex::from_single(j);
            let n = idx.n() as i64;
            let m = idx.m() as i64;
            let mabs = m.abs();
            let (up, down) = if m >= 0 {
                ((n + mabs + 2) as f64, (n - mabs) as f64)
            } else {
                ((n - mabs + 2) as f64, (n + mabs) as f64)
            };
            let scale = complex_norm(idx.n()) / (2.0 * (n as f64 + 1.0));
            for (deg, weight) in [(n + 1, up), (n - 1, down)] {
                if weight == 0.0 || !ZernikeIndex::is_valid(deg, m + 1) {
                    continue;
                }
                let target = ZernikeIndex::new(deg, m + 1).expect("validated");
                out.coeffs[target.single()] += c * (scale * weight / complex_norm(target.n()));
            }
        }
        out
    }

    /// `self * (z - z0)` where `z0 = rho e^{i theta}` is the complex
    /// coordinate of `anchor`.
    pub fn mul_by_coordinate_difference(&self, anchor: PolarPoint) -> DiskPolynomial {
        let z0 = Complex64::from_polar(anchor.r, anchor.phi);
        let shifted = self.project(self.degree + 1) * z0;
        self.mul_by_z() - shifted
    }
}

fn combine(
    a: &DiskPolynomial,
    b: &DiskPolynomial,
    op: impl Fn(Complex64, Complex64) -> Complex64,
) -> DiskPolynomial {
    let degree = a.degree.max(b.degree);
    let coeffs = (0..basis_len(degree))
        .map(|j| op(a.coeff(j), b.coeff(j)))
        .collect();
    DiskPolynomial { degree, coeffs }
}

impl Add for &DiskPolynomial {
    type Output = DiskPolynomial;
    fn add(self, rhs: Self) -> DiskPolynomial {
        combine(self, rhs, |a, b| a + b)
    }
}

impl Sub for &DiskPolynomial {
    type Output = DiskPolynomial;
    fn sub(self, rhs: Self) -> DiskPolynomial {
        combine(self, rhs, |a, b| a - b)
    }
}

impl Add for DiskPolynomial {
    type Output = DiskPolynomial;
    fn add(self, rhs: Self) -> DiskPolynomial {
        &self + &rhs
    }
}

impl Sub for DiskPolynomial {
    type Output = DiskPolynomial;
    fn sub(self, rhs: Self) -> DiskPolynomial {
        &self - &rhs
    }
}

impl Mul<Complex64> for DiskPolynomial {
    type Output = DiskPolynomial;
    fn mul(mut self, rhs: Complex64) -> DiskPolynomial {
        self.coeffs.iter_mut().for_each(|c| *c *= rhs);
        self
    }
}

impl Mul<f64> for DiskPolynomial {
    type Output = DiskPolynomial;
    fn mul(self, rhs: f64) -> DiskPolynomial {
        self * Complex64::new(rhs, 0.0)
    }
}

impl Neg for DiskPolynomial {
    type Output = DiskPolynomial;
    fn neg(self) -> DiskPolynomial {
        self * -1.0
    }
}
