//! Radial polynomials `R_n^{|m|}`.

use crate::error::{Error, Result};
use crate::point::DISK_TOLERANCE;

/// Power-series coefficients of one radial polynomial.
///
/// `R_n^{|m|}(r) = r^{|m|} * sum_s c_s (r^2)^{k - s}` with `k = (n - |m|)/2`
/// and `c_s = (-1)^s (n-s)! / (s! ((n+|m|)/2 - s)! ((n-|m|)/2 - s)!)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialPolynomial {
    n: u32,
    m_abs: u32,
    coeffs: Vec<f64>,
}

impl RadialPolynomial {
    /// Panics if `(n, m_abs)` is not a valid pair; use [`radial_eval`] for
    /// the zero-extended version.
    pub fn new(n: u32, m_abs: u32) -> Self {
        assert!(
            m_abs <= n && (n - m_abs).is_multiple_of(2),
            "invalid radial pair ({n}, {m_abs})"
        );
        Self {
            n,
            m_abs,
            coeffs: radial_coefficients(n, m_abs),
        }
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn m_abs(&self) -> u32 {
        self.m_abs
    }

    /// `c_0 ... c_k`, highest power first.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates without domain checks.
    pub fn eval(&self, r: f64) -> f64 {
        let u = r * r;
        let acc = self.coeffs.iter().fold(0.0, |acc, &c| acc * u + c);
        acc * r.powi(self.m_abs as i32)
    }
}

/// Integer coefficients by the ratio
/// `c_{s+1} / c_s = -(a - s)(b - s) / ((s + 1)(n - s))`, `a = (n+|m|)/2`,
/// `b = (n-|m|)/2`, starting from `c_0 = C(n, b)`.
///
/// Every `c_s` is an integer so each division is exact; the i128 path is
/// taken while it does not overflow, after which the ratio is applied in
/// floating point.
fn radial_coefficients(n: u32, m_abs: u32) -> Vec<f64> {
    let n = n as i128;
    let a = (n + m_abs as i128) / 2;
    let b = (n - m_abs as i128) / 2;

    let mut out = Vec::with_capacity(b as usize + 1);
    let mut exact = binomial_i128(n, b);
    let mut approx = exact
        .map(|c| c as f64)
        .unwrap_or_else(|| binomial_f64(n, b));
    out.push(approx);
    for s in 0..b {
        let num = -(a - s) * (b - s);
        let den = (s + 1) * (n - s);
        exact = exact.and_then(|c| c.checked_mul(num)).map(|c| c / den);
        approx = match exact {
            Some(c) => c as f64,
            None => approx * num as f64 / den as f64,
        };
        out.push(approx);
    }
    out
}

fn binomial_i128(n: i128, k: i128) -> Option<i128> {
    let k = k.min(n - k);
    let mut c: i128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c.checked_mul(n - i)? / (i + 1);
    }
    Some(c)
}

fn binomial_f64(n: i128, k: i128) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |c, i| c * (n - i) as f64 / (i + 1) as f64)
}

pub(crate) fn check_radius(r: f64) -> Result<f64> {
    if !r.is_finite() || !(-DISK_TOLERANCE..=1.0 + DISK_TOLERANCE).contains(&r) {
        return Err(Error::OutsideDisk { r });
    }
    Ok(r.clamp(0.0, 1.0))
}

/// `R_n^{|m|}(r)`, zero when `(n, m_abs)` is not a valid pair.
pub fn radial_eval(n: i64, m_abs: i64, r: f64) -> Result<f64> {
    let r = check_radius(r)?;
    if n < 0 || m_abs < 0 || m_abs > n || (n - m_abs) % 2 != 0 {
        return Ok(0.0);
    }
    Ok(RadialPolynomial::new(n as u32, m_abs as u32).eval(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct transcription of the factorial sum, used as the oracle.
    fn factorial_sum(n: u32, m: u32, r: f64) -> f64 {
        let fact = |k: u32| (1..=k).fold(1.0f64, |p, i| p * i as f64);
        (0..=(n - m) / 2)
            .map(|s| {
                let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
                sign * fact(n - s) / (fact(s) * fact((n + m) / 2 - s) * fact((n - m) / 2 - s))
                    * r.powi((n - 2 * s) as i32)
            })
            .sum()
    }

    #[test]
    fn spec_values() {
        assert_eq!(radial_eval(0, 0, 0.7).unwrap(), 1.0);
        assert!((radial_eval(2, 0, 0.5).unwrap() + 0.5).abs() < 1e-15);
        assert!((radial_eval(3, 1, 0.5).unwrap() + 0.625).abs() < 1e-15);
    }

    #[test]
    fn value_at_rim_is_one() {
        for n in 0..=12u32 {
            for m in (n % 2..=n).step_by(2) {
                assert!((radial_eval(n as i64, m as i64, 1.0).unwrap() - 1.0).abs() < 1e-9);
                assert!((factorial_sum(n, m, 1.0) - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn matches_factorial_sum() {
        for n in 0..=18u32 {
            for m in (n % 2..=n).step_by(2) {
                for &r in &[0.0, 0.13, 0.5, 0.77, 0.99] {
                    let a = radial_eval(n as i64, m as i64, r).unwrap();
                    let b = factorial_sum(n, m, r);
                    assert!((a - b).abs() < 1e-9, "n={n} m={m} r={r}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn invalid_pairs_are_zero() {
        assert_eq!(radial_eval(3, 0, 0.5).unwrap(), 0.0);
        assert_eq!(radial_eval(2, 4, 0.5).unwrap(), 0.0);
        assert_eq!(radial_eval(-2, 0, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn rejects_radius_outside_disk() {
        assert!(radial_eval(2, 0, 1.0 + 1e-9).is_err());
        assert!(radial_eval(2, 0, -1e-6).is_err());
        assert!(radial_eval(2, 0, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn large_degree_coefficients_stay_exact() {
        // c_0 of R_60^0 is C(60, 30); the i128 path must not have fallen back
        let p = RadialPolynomial::new(60, 0);
        assert_eq!(p.coefficients()[0], 118264581564861424.0);
        assert_eq!(*p.coefficients().last().unwrap(), 1.0);
        let p = RadialPolynomial::new(140, 0);
        assert!((p.coefficients().last().unwrap() - 1.0).abs() < 1e-6);
    }
}
