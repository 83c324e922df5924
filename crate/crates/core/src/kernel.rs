//! Reproducing kernels of `V_N`.
//!
//! `K_N(x; y) = sum_{j < J_N} Z_j(x) conj(Z_j(y))`, so the kernel anchored at
//! `y` has coefficients `conj(Z_j(y))` and `<p, K_N(.; y)> = p(y)` for every
//! `p` in `V_N`.

use num_complex::Complex64;

use crate::error::Result;
use crate::point::PolarPoint;
use crate::zernike::{
    basis_len, complex_norm, recurrence_b, zernike_or_zero, DiskPolynomial, RadialPolynomial,
    ZernikeTable,
};

/// Default half-width of the stripe `|r^2 - rho^2| < eps` where the
/// Christoffel-Darboux quotient is replaced by direct summation.
pub const CD_EPSILON: f64 = 1e-6;

/// `K_N(.; anchor)` in coefficient form.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelFunction {
    degree: usize,
    anchor: PolarPoint,
    poly: DiskPolynomial,
}

impl KernelFunction {
    pub fn new(degree: usize, anchor: PolarPoint) -> Result<Self> {
        let anchor = PolarPoint::new(anchor.r, anchor.phi)?;
        Ok(Self::with_table(&ZernikeTable::new(degree), anchor))
    }

    /// Builds from a table whose degree is the kernel degree. The anchor is
    /// assumed validated.
    pub fn with_table(table: &ZernikeTable, anchor: PolarPoint) -> Self {
        let coeffs = table
            .complex_row(anchor)
            .into_iter()
            .map(|z| z.conj())
            .collect();
        Self {
            degree: table.degree(),
            anchor,
            poly: DiskPolynomial::from_coeffs(coeffs).expect("table rows have triangular length"),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn anchor(&self) -> PolarPoint {
        self.anchor
    }

    pub fn polynomial(&self) -> &DiskPolynomial {
        &self.poly
    }

    pub fn into_polynomial(self) -> DiskPolynomial {
        self.poly
    }

    /// `K_N(point; anchor)`; the kernel is real-valued so only the real part
    /// is returned.
    pub fn eval(&self, point: PolarPoint) -> Result<f64> {
        Ok(self.poly.eval(point)?.re)
    }

    /// `K_N(anchor; anchor)`, which is also `||K_N(.; anchor)||^2`.
    pub fn self_value(&self) -> f64 {
        self.poly.norm_sqr()
    }
}

pub fn kernel_build(degree: usize, anchor: PolarPoint) -> Result<KernelFunction> {
    KernelFunction::new(degree, anchor)
}

/// `sum_{n <= N} sum_m (gamma_n R_n^{|m|}(rho))^2`.
pub fn kernel_self_value(degree: usize, anchor: PolarPoint) -> Result<f64> {
    let anchor = PolarPoint::new(anchor.r, anchor.phi)?;
    let mut total = 0.0;
    for n in 0..=degree as u32 {
        let g2 = complex_norm(n).powi(2);
        // each m != 0 occurs twice, as +m and -m
        for m_abs in (n % 2..=n).step_by(2) {
            let r = RadialPolynomial::new(n, m_abs).eval(anchor.r);
            let mult = if m_abs == 0 { 1.0 } else { 2.0 };
            total += mult * g2 * r * r;
        }
    }
    Ok(total)
}

/// Direct double sum `sum_j Z_j(point) conj(Z_j(anchor))`.
pub fn kernel_eval_direct(degree: usize, anchor: PolarPoint, point: PolarPoint) -> Result<f64> {
    let anchor = PolarPoint::new(anchor.r, anchor.phi)?;
    let point = PolarPoint::new(point.r, point.phi)?;
    let table = ZernikeTable::new(degree);
    let a = table.complex_row(anchor);
    let p = table.complex_row(point);
    debug_assert_eq!(a.len(), basis_len(degree));
    Ok(p.iter()
        .zip(&a)
        .map(|(x, y)| x * y.conj())
        .sum::<Complex64>()
        .re)
}

/// Christoffel-Darboux evaluation with the default stripe [`CD_EPSILON`].
pub fn kernel_eval_cd(degree: usize, anchor: PolarPoint, point: PolarPoint) -> Result<f64> {
    kernel_eval_cd_with(degree, anchor, point, CD_EPSILON)
}

/// `K_N(point; anchor)` as
///
/// ```text
/// sum_m b_N^m     [Z_{N+2}^m(x) conj Z_N^m(y)     - Z_N^m(x) conj Z_{N+2}^m(y)]     / (r^2 - rho^2)
/// + sum_m b_{N-1}^m [Z_{N+1}^m(x) conj Z_{N-1}^m(y) - Z_{N-1}^m(x) conj Z_{N+1}^m(y)] / (r^2 - rho^2)
/// ```
///
/// with `m` from `-N` to `N` and invalid index pairs contributing zero.
/// Falls back to [`kernel_eval_direct`] when `|r^2 - rho^2| < eps` or
/// `N = 0`.
pub fn kernel_eval_cd_with(
    degree: usize,
    anchor: PolarPoint,
    point: PolarPoint,
    eps: f64,
) -> Result<f64> {
    let anchor = PolarPoint::new(anchor.r, anchor.phi)?;
    let point = PolarPoint::new(point.r, point.phi)?;
    let denom = point.r * point.r - anchor.r * anchor.r;
    if degree == 0 || denom.abs() < eps {
        return kernel_eval_direct(degree, anchor, point);
    }
    let n = degree as i64;
    let mut total = Complex64::new(0.0, 0.0);
    for top in [n, n - 1] {
        for m in -n..=n {
            let b = recurrence_b(top, m as i32);
            if b == 0.0 || !crate::zernike::ZernikeIndex::is_valid(top, m) {
                continue;
            }
            let x_hi = zernike_or_zero(top + 2, m, point)?;
            let x_lo = zernike_or_zero(top, m, point)?;
            let y_hi = zernike_or_zero(top + 2, m, anchor)?;
            let y_lo = zernike_or_zero(top, m, anchor)?;
            total += (x_hi * y_lo.conj() - x_lo * y_hi.conj()) * b;
        }
    }
    Ok(total.re / denom)
}

/// `1 / sqrt(K_N(anchor; anchor))`: the least norm of any `p` in `V_N` with
/// `p(anchor) = 1`, attained by `K_N(.; anchor) / K_N(anchor; anchor)`.
pub fn localization_ratio(degree: usize, anchor: PolarPoint) -> Result<f64> {
    Ok(1.0 / kernel_self_value(degree, anchor)?.sqrt())
}
