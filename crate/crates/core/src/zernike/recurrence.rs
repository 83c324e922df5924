//! Three-term recurrence in `r^2` for fixed azimuthal frequency:
//!
//! `r^2 Z_n^m = b_{n-2}^m Z_{n-2}^m + a_n^m Z_n^m + b_n^m Z_{n+2}^m`.

use num_complex::Complex64;

use super::eval::zernike_eval;
use super::index::ZernikeIndex;
use crate::error::Result;
use crate::point::PolarPoint;

/// Diagonal coefficient
/// `a_n = [(n+m)^2/n + (n-m+2)^2/(n+2)] / (4(n+1))`, with the first term
/// taken as 0 at `n = 0` (where `m = 0` as well).
pub fn recurrence_a(n: u32, m: i32) -> f64 {
    let n = n as f64;
    let m = m as f64;
    let first = if n == 0.0 { 0.0 } else { (n + m).powi(2) / n };
    (first + (n - m + 2.0).powi(2) / (n + 2.0)) / (4.0 * (n + 1.0))
}

/// Off-diagonal coefficient
/// `b_n^m = ((n+2)^2 - m^2) / (4(n+2)) / sqrt((n+1)(n+3))`.
///
/// Returns 0 for negative `n`, which makes the `Z_{-2}^m = 0` convention
/// explicit at the bottom of each chain.
pub fn recurrence_b(n: i64, m: i32) -> f64 {
    if n < 0 {
        return 0.0;
    }
    let n = n as f64;
    let m = m as f64;
    ((n + 2.0).powi(2) - m * m) / (4.0 * (n + 2.0)) / ((n + 1.0) * (n + 3.0)).sqrt()
}

/// `Z_n^m(point)`, or zero when `(n, m)` is not a valid index.
pub fn zernike_or_zero(n: i64, m: i64, point: PolarPoint) -> Result<Complex64> {
    match ZernikeIndex::new(n, m) {
        Ok(idx) => zernike_eval(idx, point),
        Err(_) => Ok(Complex64::new(0.0, 0.0)),
    }
}

/// Right-hand side of the recurrence at `point`; equals `r^2 Z_n^m(point)`.
pub fn three_term_apply(idx: ZernikeIndex, point: PolarPoint) -> Result<Complex64> {
    let n = idx.n() as i64;
    let m = idx.m();
    let below = zernike_or_zero(n - 2, m as i64, point)? * recurrence_b(n - 2, m);
    let centre = zernike_eval(idx, point)? * recurrence_a(idx.n(), m);
    let above = zernike_or_zero(n + 2, m as i64, point)? * recurrence_b(n, m);
    Ok(below + centre + above)
}
