//! Self-check suites run up to a maximum degree, reported per suite.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{kernel_build, kernel_eval_cd, kernel_eval_direct};
use crate::mra::{decompose, reconstruct, MultiscaleBasis};
use crate::point::PolarPoint;
use crate::scaling::{lagrange_dual, scaling_build};
use crate::wavelet::{
    dual_build, wavelet_block, wavelet_build, wavelet_coefficients, wavelet_parameters,
    PointStrategy,
};
use crate::zernike::{basis_len, DiskPolynomial, DiskQuadrature, ZernikeTable};

/// Size of the perturbation injected by [`ValidateOptions::corrupt`].
pub const CORRUPTION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateOptions {
    pub max_degree: usize,
    pub seed: u64,
    /// Perturbs one coefficient of every object under test; each suite must
    /// then fail.
    pub corrupt: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            max_degree: 8,
            seed: 0,
            corrupt: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub cases: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub max_degree: usize,
    pub seed: u64,
    pub corrupted: bool,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

struct Suite {
    cases: usize,
    max_error: f64,
}

impl Suite {
    fn new() -> Self {
        Self {
            cases: 0,
            max_error: 0.0,
        }
    }

    fn record(&mut self, error: f64) {
        self.cases += 1;
        // NaN counts as failure
        self.max_error = if error.is_nan() {
            f64::INFINITY
        } else {
            self.max_error.max(error)
        };
    }

    fn finish(self, name: &str, tolerance: f64) -> SuiteReport {
        SuiteReport {
            name: name.into(),
            cases: self.cases,
            max_error: self.max_error,
            tolerance,
            passed: self.max_error <= tolerance,
        }
    }
}

fn random_point(rng: &mut impl Rng) -> PolarPoint {
    PolarPoint {
        r: rng.random::<f64>().sqrt(),
        phi: rng.random_range(0.0..TAU),
    }
}

fn random_poly(rng: &mut impl Rng, degree: usize, range: std::ops::Range<usize>) -> DiskPolynomial {
    let mut p = DiskPolynomial::zeros(degree);
    for j in range {
        p.coeffs_mut()[j] =
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    p
}

fn corrupt(p: &mut DiskPolynomial, enabled: bool) {
    if enabled {
        p.coeffs_mut()[0] += CORRUPTION;
    }
}

/// Runs every suite. Fails only on invalid options; suite failures are
/// reported, not raised.
pub fn run_validation(options: &ValidateOptions) -> Result<ValidationReport> {
    let n = options.max_degree;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "validation needs a maximum degree of at least 1".into(),
        ));
    }
    let bad = options.corrupt;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut suites = Vec::new();

    let mut s = Suite::new();
    let table = ZernikeTable::new(n);
    let nodes = DiskQuadrature::for_degree(n).nodes();
    let mut rows: Vec<Vec<Complex64>> = nodes.iter().map(|&(p, _)| table.complex_row(p)).collect();
    if bad {
        rows.iter_mut().for_each(|row| row[0] *= 1.0 + CORRUPTION);
    }
    for j in 0..table.len() {
        for k in 0..table.len() {
            let g: Complex64 = rows
                .iter()
                .zip(&nodes)
                .map(|(row, (_, w))| row[j] * row[k].conj() * w)
                .sum();
            s.record((g - if j == k { 1.0 } else { 0.0 }).norm());
        }
    }
    suites.push(s.finish("orthonormality", 1e-10));

    let mut s = Suite::new();
    for degree in 1..=n {
        let nodes = DiskQuadrature::for_degree(degree).nodes();
        let table = ZernikeTable::new(degree);
        for _ in 0..20 {
            let p = random_poly(&mut rng, degree, 0..basis_len(degree));
            let anchor = random_point(&mut rng);
            let mut kernel = kernel_build(degree, anchor)?.into_polynomial();
            corrupt(&mut kernel, bad);
            let pairing: Complex64 = nodes
                .iter()
                .map(|&(x, w)| p.eval_with(&table, x) * kernel.eval_with(&table, x).conj() * w)
                .sum();
            s.record((pairing - p.eval_with(&table, anchor)).norm());
        }
    }
    suites.push(s.finish("reproducing property", 1e-10));

    let mut s = Suite::new();
    for degree in 1..=n {
        let mut pairs = 0;
        while pairs < 50 {
            let (x, y) = (random_point(&mut rng), random_point(&mut rng));
            if (x.r * x.r - y.r * y.r).abs() < 1e-3 {
                continue;
            }
            pairs += 1;
            let direct = kernel_eval_direct(degree, y, x)?;
            let mut cd = kernel_eval_cd(degree, y, x)?;
            if bad {
                cd += CORRUPTION * direct.abs().max(1.0);
            }
            s.record((cd - direct).abs() / direct.abs());
        }
    }
    suites.push(s.finish("christoffel-darboux", 1e-8));

    let mut s = Suite::new();
    for degree in 1..=n {
        let basis = scaling_build(degree)?;
        let dual = lagrange_dual(&basis)?;
        for k in 0..basis.len() {
            let mut l = dual.function(k);
            corrupt(&mut l, bad);
            for j in 0..basis.len() {
                let pairing = basis.function(j).inner_product(&l);
                s.record((pairing - if j == k { 1.0 } else { 0.0 }).norm());
            }
        }
    }
    suites.push(s.finish("scaling duality", 1e-9));

    let mut s = Suite::new();
    for level in 1..=(n / 2).max(1) {
        let basis = wavelet_build(level, wavelet_parameters(level, PointStrategy::Fekete)?)?;
        let dual = dual_build(&basis)?;
        for _ in 0..10 {
            let f = random_poly(&mut rng, 2 * level, wavelet_block(level));
            let mut back = dual.reconstruct(&wavelet_coefficients(&f, &basis));
            corrupt(&mut back, bad);
            s.record((&back - &f).max_abs());
        }
    }
    suites.push(s.finish("wavelet duality", 1e-8));

    let mut s = Suite::new();
    let ladder_degree = 1usize << n.ilog2();
    let bases = Arc::new(MultiscaleBasis::build(
        ladder_degree,
        PointStrategy::Fekete,
    )?);
    for _ in 0..10 {
        let f = random_poly(&mut rng, ladder_degree, 0..basis_len(ladder_degree));
        let mut back = reconstruct(&decompose(&f, &bases));
        corrupt(&mut back, bad);
        s.record((&back - &f).max_abs());
    }
    suites.push(s.finish("mra round trip", 1e-8));

    let passed = suites.iter().all(|s| s.passed);
    Ok(ValidationReport {
        max_degree: n,
        seed: options.seed,
        corrupted: bad,
        suites,
        passed,
    })
}
