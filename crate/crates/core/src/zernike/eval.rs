//! Complex and real Zernike polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::index::{basis_len, ZernikeIndex};
use super::radial::{check_radius, RadialPolynomial};
use crate::error::Result;
use crate::point::PolarPoint;

/// Normalization `sqrt((n+1)/pi)` of the complex polynomials.
pub fn complex_norm(n: u32) -> f64 {
    ((n as f64 + 1.0) / PI).sqrt()
}

/// Normalization of the real (cos/sin) polynomials: `sqrt((n+1)/pi)` for
/// `m = 0`, `sqrt(2(n+1)/pi)` otherwise.
pub fn real_norm(n: u32, m: i32) -> f64 {
    if m == 0 {
        complex_norm(n)
    } else {
        (2.0 * (n as f64 + 1.0) / PI).sqrt()
    }
}

/// `Z_n^m(r, phi) = gamma_n R_n^{|m|}(r) e^{i m phi}`.
pub fn zernike_eval(idx: ZernikeIndex, point: PolarPoint) -> Result<Complex64> {
    let r = check_radius(point.r)?;
    let radial = RadialPolynomial::new(idx.n(), idx.m_abs()).eval(r);
    Ok(Complex64::from_polar(
        complex_norm(idx.n()) * radial,
        idx.m() as f64 * point.phi,
    ))
}

/// Real form `G_n^m`: cosine for `m >= 0`, sine of `|m| phi` for `m < 0`.
pub fn zernike_real_eval(idx: ZernikeIndex, point: PolarPoint) -> Result<f64> {
    let r = check_radius(point.r)?;
    let radial = RadialPolynomial::new(idx.n(), idx.m_abs()).eval(r);
    let angular = if idx.m() >= 0 {
        (idx.m() as f64 * point.phi).cos()
    } else {
        (idx.m_abs() as f64 * point.phi).sin()
    };
    Ok(real_norm(idx.n(), idx.m()) * radial * angular)
}

/// Precomputed radial coefficients for every index up to a fixed degree.
///
/// This is the fast path for evaluating all of `Z_0 ... Z_{J_N - 1}` at many
/// points.
#[derive(Debug, Clone)]
pub struct ZernikeTable {
    degree: usize,
    indices: Vec<ZernikeIndex>,
    // radial[j] is shared by j and its mirror; stored per index for simplicity
    radial: Vec<RadialPolynomial>,
}

impl ZernikeTable {
    pub fn new(degree: usize) -> Self {
        let indices: Vec<_> = ZernikeIndex::up_to(degree).collect();
        let radial = indices
            .iter()
            .map(|idx| RadialPolynomial::new(idx.n(), idx.m_abs()))
            .collect();
        Self {
            degree,
            indices,
            radial,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[ZernikeIndex] {
        &self.indices
    }

    /// `[Z_0(p), ..., Z_{J_N-1}(p)]`. The point is assumed validated.
    pub fn complex_row(&self, point: PolarPoint) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.complex_row_into(point, &mut out);
        out
    }

    pub fn complex_row_into(&self, point: PolarPoint, out: &mut [Complex64]) {
        for ((idx, rad), slot) in self.indices.iter().zip(&self.radial).zip(out.iter_mut()) {
            let amp = complex_norm(idx.n()) * rad.eval(point.r);
            *slot = Complex64::from_polar(amp, idx.m() as f64 * point.phi);
        }
    }

    /// `[G_0(p), ..., G_{J_N-1}(p)]`.
    pub fn real_row_into(&self, point: PolarPoint, out: &mut [f64]) {
        for ((idx, rad), slot) in self.indices.iter().zip(&self.radial).zip(out.iter_mut()) {
            let angular = if idx.m() >= 0 {
                (idx.m() as f64 * point.phi).cos()
            } else {
                (idx.m_abs() as f64 * point.phi).sin()
            };
            *slot = real_norm(idx.n(), idx.m()) * rad.eval(point.r) * angular;
        }
    }

    pub fn real_row(&self, point: PolarPoint) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        self.real_row_into(point, &mut out);
        out
    }

    /// Complex values restricted to the single indices in `range`.
    pub fn complex_block(
        &self,
        point: PolarPoint,
        range: std::ops::Range<usize>,
    ) -> Vec<Complex64> {
        debug_assert!(range.end <= basis_len(self.degree));
        range
            .map(|j| {
                let idx = self.indices[j];
                let amp = complex_norm(idx.n()) * self.radial[j].eval(point.r);
                Complex64::from_polar(amp, idx.m() as f64 * point.phi)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn pt(r: f64, phi: f64) -> PolarPoint {
        PolarPoint::new(r, phi).unwrap()
    }

    #[test]
    fn constant_term() {
        let z = zernike_eval(ZernikeIndex::new(0, 0).unwrap(), pt(0.3, 2.0)).unwrap();
        assert!((z.re - 0.5641895835477563).abs() < 1e-15 && z.im == 0.0);
        let g = zernike_real_eval(ZernikeIndex::new(0, 0).unwrap(), pt(0.9, 1.0)).unwrap();
        assert!((g - (1.0 / PI).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn tilt_at_rim() {
        let z = zernike_eval(ZernikeIndex::new(1, 1).unwrap(), pt(1.0, 0.0)).unwrap();
        assert!((z.re - (2.0 / PI).sqrt()).abs() < 1e-15 && z.im.abs() < 1e-15);
    }

    #[test]
    fn negative_m_is_conjugate() {
        let p = pt(0.41, 2.3);
        let a = zernike_eval(ZernikeIndex::new(2, -2).unwrap(), p).unwrap();
        let b = zernike_eval(ZernikeIndex::new(2, 2).unwrap(), p).unwrap();
        assert!((a - b.conj()).norm() < 1e-15);
    }

    #[test]
    fn real_sine_term() {
        let r = 0.35;
        let g = zernike_real_eval(ZernikeIndex::new(1, -1).unwrap(), pt(r, FRAC_PI_2)).unwrap();
        assert!((g - (4.0 / PI).sqrt() * r).abs() < 1e-15);
    }

    #[test]
    fn table_matches_single_evaluation() {
        let table = ZernikeTable::new(7);
        let p = pt(0.63, 4.1);
        let row = table.complex_row(p);
        let real = table.real_row(p);
        for (j, idx) in table.indices().iter().enumerate() {
            assert!((row[j] - zernike_eval(*idx, p).unwrap()).norm() < 1e-14);
            assert!((real[j] - zernike_real_eval(*idx, p).unwrap()).abs() < 1e-14);
        }
        let block = table.complex_block(p, 10..15);
        assert_eq!(block.as_slice(), &row[10..15]);
    }
}
