//! Conversions between complex coefficients and the cosine/sine form.
//!
//! With `c` the coefficients of a real-valued expansion,
//! `c_{nm} = (A_{nm} - i B_{nm}) / 2`, `c_{n,-m} = (A_{nm} + i B_{nm}) / 2`,
//! and conversely `A_{nm} = c_{nm} + c_{n,-m}`, `B_{nm} = i (c_{nm} - c_{n,-m})`.
//! For `m = 0` the same formulas give `A_{n0} = 2 c_{n0}` and `B_{n0} = 0`.
//!
//! `A` and `B` inherit the normalization of `c`: if `c` multiplies the
//! orthonormal `Z_n^m`, then `A_{nm}` multiplies `gamma_n R_n^m cos(m phi)`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::index::{basis_len, ZernikeIndex};
use super::poly::{degree_for_len, DiskPolynomial};
use crate::error::{Error, Result};

/// Tolerance on `|c_{n,-m} - conj(c_{nm})|` accepted as real-valued.
pub const CONJUGATE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealTerm {
    pub n: u32,
    pub m: u32,
    pub a: f64,
    /// Always 0 when `m == 0`.
    pub b: f64,
}

/// `A_{nm}, B_{nm}` for `0 <= m <= n`, `n - m` even, ordered by the single
/// index of `(n, m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealCoeffs {
    degree: usize,
    terms: Vec<RealTerm>,
}

impl RealCoeffs {
    pub fn zeros(degree: usize) -> Self {
        let terms = ZernikeIndex::up_to(degree)
            .filter(|idx| idx.m() >= 0)
            .map(|idx| RealTerm {
                n: idx.n(),
                m: idx.m() as u32,
                a: 0.0,
                b: 0.0,
            })
            .collect();
        Self { degree, terms }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[RealTerm] {
        &self.terms
    }

    pub fn get(&self, n: u32, m: u32) -> Option<&RealTerm> {
        self.terms.iter().find(|t| t.n == n && t.m == m)
    }

    /// Sets `A_{nm}` and `B_{nm}`; `b` is ignored for `m = 0`.
    pub fn set(&mut self, n: u32, m: u32, a: f64, b: f64) -> Result<()> {
        let term =
            self.terms
                .iter_mut()
                .find(|t| t.n == n && t.m == m)
                .ok_or(Error::InvalidIndex {
                    n: n as i64,
                    m: m as i64,
                })?;
        term.a = a;
        term.b = if m == 0 { 0.0 } else { b };
        Ok(())
    }

    /// From coefficients on the orthonormal real basis `G_j` (cosine for
    /// `m >= 0`, sine for `m < 0`), stored in single-index order.
    pub fn from_real_basis(values: &[f64]) -> Result<Self> {
        let p = real_basis_to_complex(values)?;
        complex_to_real_coeffs(&p)
    }

    /// Coefficients on the orthonormal real basis `G_j`.
    pub fn to_real_basis(&self) -> Vec<f64> {
        let mut out = vec![0.0; basis_len(self.degree)];
        for t in &self.terms {
            let j = ZernikeIndex::new(t.n as i64, t.m as i64)
                .expect("valid term")
                .single();
            if t.m == 0 {
                out[j] = t.a / 2.0;
            } else {
                let mirror = ZernikeIndex::new(t.n as i64, -(t.m as i64))
                    .expect("valid term")
                    .single();
                out[j] = t.a / SQRT_2;
                out[mirror] = t.b / SQRT_2;
            }
        }
        out
    }
}

/// Applies `A = c_{nm} + c_{n,-m}`, `B = i(c_{nm} - c_{n,-m})`.
///
/// Fails when the input is not conjugate-symmetric within
/// [`CONJUGATE_TOLERANCE`], since `A` and `B` would not be real.
pub fn complex_to_real_coeffs(p: &DiskPolynomial) -> Result<RealCoeffs> {
    let asymmetry = p.conjugate_asymmetry();
    if asymmetry > CONJUGATE_TOLERANCE {
        return Err(Error::NotConjugateSymmetric { asymmetry });
    }
    let mut out = RealCoeffs::zeros(p.degree());
    let i = Complex64::i();
    for t in &mut out.terms {
        let plus = p.coeff(
            ZernikeIndex::new(t.n as i64, t.m as i64)
                .expect("valid")
                .single(),
        );
        let minus = p.coeff(
            ZernikeIndex::new(t.n as i64, -(t.m as i64))
                .expect("valid")
                .single(),
        );
        t.a = (plus + minus).re;
        t.b = if t.m == 0 {
            0.0
        } else {
            (i * (plus - minus)).re
        };
    }
    Ok(out)
}

/// Applies `c_{nm} = (A - iB)/2`, `c_{n,-m} = (A + iB)/2`.
pub fn real_to_complex_coeffs(real: &RealCoeffs) -> DiskPolynomial {
    let mut p = DiskPolynomial::zeros(real.degree);
    let coeffs = p.coeffs_mut();
    for t in &real.terms {
        let plus = ZernikeIndex::new(t.n as i64, t.m as i64)
            .expect("valid")
            .single();
        let minus = ZernikeIndex::new(t.n as i64, -(t.m as i64))
            .expect("valid")
            .single();
        coeffs[plus] = Complex64::new(t.a, -t.b) / 2.0;
        coeffs[minus] = Complex64::new(t.a, t.b) / 2.0;
    }
    p
}

/// Complex coefficients of `sum_j values_j G_j`.
pub fn real_basis_to_complex(values: &[f64]) -> Result<DiskPolynomial> {
    let degree =
        degree_for_len(values.len()).ok_or(Error::BadCoefficientLength { len: values.len() })?;
    let mut p = DiskPolynomial::zeros(degree);
    let coeffs = p.coeffs_mut();
    for (j, &v) in values.iter().enumerate() {
        let idx = ZernikeIndex::from_single(j);
        if idx.m() == 0 {
            coeffs[j] += Complex64::new(v, 0.0);
        } else if idx.m() > 0 {
            // cos(m phi) = (e^{im phi} + e^{-im phi}) / 2, scaled by sqrt 2
            coeffs[j] += Complex64::new(v / SQRT_2, 0.0);
            coeffs[idx.mirrored().single()] += Complex64::new(v / SQRT_2, 0.0);
        } else {
            // sin(|m| phi) = (e^{i|m| phi} - e^{-i|m| phi}) / (2i)
            let plus = idx.mirrored().single();
            coeffs[plus] += Complex64::new(0.0, -v / SQRT_2);
            coeffs[j] += Complex64::new(0.0, v / SQRT_2);
        }
    }
    Ok(p)
}

/// Inverse of [`real_basis_to_complex`] for conjugate-symmetric input.
pub fn complex_to_real_basis(p: &DiskPolynomial) -> Result<Vec<f64>> {
    complex_to_real_coeffs(p).map(|r| r.to_real_basis())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::PolarPoint;
    use crate::zernike::ZernikeTable;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tilt_example() {
        let mut p = DiskPolynomial::zeros(1);
        p.coeffs_mut()[1] = Complex64::new(0.5, 0.0);
        p.coeffs_mut()[2] = Complex64::new(0.5, 0.0);
        let real = complex_to_real_coeffs(&p).unwrap();
        let t = real.get(1, 1).unwrap();
        assert!((t.a - 1.0).abs() < 1e-15 && t.b.abs() < 1e-15);
    }

    #[test]
    fn m_zero_terms_are_real() {
        let mut real = RealCoeffs::zeros(2);
        real.set(2, 0, 3.0, 7.0).unwrap();
        assert_eq!(real.get(2, 0).unwrap().b, 0.0);
        let p = real_to_complex_coeffs(&real);
        assert_eq!(p.coeff(4), Complex64::new(1.5, 0.0));
    }

    #[test]
    fn asymmetric_input_rejected() {
        let p = DiskPolynomial::basis(2, 1).unwrap();
        assert!(matches!(
            complex_to_real_coeffs(&p),
            Err(Error::NotConjugateSymmetric { .. })
        ));
    }

    #[test]
    fn round_trip_random_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let values: Vec<f64> = (0..basis_len(6))
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        let p = real_basis_to_complex(&values).unwrap();
        let real = complex_to_real_coeffs(&p).unwrap();
        let back = real_to_complex_coeffs(&real);
        assert!((&back - &p).max_abs() < 1e-14);
        let again = real.to_real_basis();
        for (a, b) in values.iter().zip(&again) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn real_basis_expansion_evaluates_identically() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let degree = 5;
        let values: Vec<f64> = (0..basis_len(degree))
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let p = real_basis_to_complex(&values).unwrap();
        let table = ZernikeTable::new(degree);
        for _ in 0..20 {
            let pt = PolarPoint::new(
                rng.random::<f64>(),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
            .unwrap();
            let direct: f64 = table
                .real_row(pt)
                .iter()
                .zip(&values)
                .map(|(g, v)| g * v)
                .sum();
            let via = p.eval_with(&table, pt);
            assert!((via.re - direct).abs() < 1e-12 && via.im.abs() < 1e-12);
        }
    }
}
