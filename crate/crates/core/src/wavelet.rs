//! Wavelets `psi_{N,j} = K_{2N}(.; mu_j) - K_N(.; mu_j)` spanning
//! `W_N = V_{2N} (-) V_N`, and their duals.
//!
//! Index blocks are 0-based half-open ranges of single indices:
//! `W_0` owns `1..3` and `W_N` owns `J_N..J_{2N}`.

use std::io::Write;
use std::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::PolarPoint;
use crate::sampling::{
    approximate_fekete, block_vandermonde, random_subset, regular_points, ParameterPointSet,
};
use crate::scaling::{write_function_csv, FunctionRow};
use crate::zernike::{basis_len, DiskPolynomial, ZernikeTable};

/// Bases whose smallest singular value falls below this fraction of the
/// largest fail the independence gate.
pub const GATE_TOLERANCE: f64 = 1e-10;

/// `D_N = 3N(N+1)/2`, and `D_0 = 2`.
pub fn wavelet_dimension(level: usize) -> usize {
    if level == 0 {
        2
    } else {
        3 * level * (level + 1) / 2
    }
}

/// Degree of the space `W_N` sits in: `2N`, or 1 for `W_0`.
pub fn wavelet_top_degree(level: usize) -> usize {
    if level == 0 {
        1
    } else {
        2 * level
    }
}

/// Single indices owned by `W_N`.
pub fn wavelet_block(level: usize) -> Range<usize> {
    if level == 0 {
        1..3
    } else {
        basis_len(level)..basis_len(2 * level)
    }
}

/// How wavelet parameter points are chosen from the regular points of the
/// top degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum PointStrategy {
    #[default]
    Fekete,
    Random {
        seed: u64,
    },
}

/// `D_N` parameter points for level `N`.
pub fn wavelet_parameters(level: usize, strategy: PointStrategy) -> Result<ParameterPointSet> {
    let candidates = regular_points(wavelet_top_degree(level));
    let d = wavelet_dimension(level);
    match strategy {
        PointStrategy::Fekete => approximate_fekete(candidates.points(), wavelet_block(level), d),
        PointStrategy::Random { seed } => random_subset(candidates.points(), d, seed),
    }
}

/// `A[j][l] = Z_{start + l}(mu_j)` over the `W_N` block.
///
/// Distinct from the collocation matrix of the scaling basis, which spans
/// all of `V_N`. Row `j` of `conj(A)` is the coefficient block of `psi_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletVandermonde {
    range: Range<usize>,
    matrix: DMatrix<Complex64>,
}

impl WaveletVandermonde {
    pub fn new(points: &[PolarPoint], range: Range<usize>) -> Self {
        let matrix = block_vandermonde(points, range.clone());
        Self { range, matrix }
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }
}

#[derive(Debug, Clone)]
pub struct WaveletBasis {
    level: usize,
    params: ParameterPointSet,
    vandermonde: WaveletVandermonde,
}

impl WaveletBasis {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dimension(&self) -> usize {
        self.params.len()
    }

    pub fn top_degree(&self) -> usize {
        wavelet_top_degree(self.level)
    }

    pub fn range(&self) -> Range<usize> {
        self.vandermonde.range()
    }

    pub fn parameters(&self) -> &ParameterPointSet {
        &self.params
    }

    pub fn vandermonde(&self) -> &WaveletVandermonde {
        &self.vandermonde
    }

    /// Coefficient block of `psi_j`.
    pub fn block(&self, j: usize) -> Vec<Complex64> {
        self.vandermonde
            .matrix
            .row(j)
            .iter()
            .map(|c| c.conj())
            .collect()
    }

    /// `psi_j` as an element of `V_{top}`.
    pub fn function(&self, j: usize) -> DiskPolynomial {
        DiskPolynomial::from_block(self.top_degree(), self.range().start, &self.block(j))
    }

    pub fn eval(&self, j: usize, point: PolarPoint) -> Result<f64> {
        Ok(self.function(j).eval(point)?.re)
    }

    /// `G[j][k] = <psi_j, psi_k>`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let a = &self.vandermonde.matrix;
        a.map(|c| c.conj()) * a.transpose()
    }

    /// `sum_j weights_j psi_j`.
    pub fn synthesize(&self, weights: &[Complex64]) -> DiskPolynomial {
        let w = DVector::from_column_slice(weights);
        let block = self.vandermonde.matrix.adjoint() * w;
        DiskPolynomial::from_block(self.top_degree(), self.range().start, block.as_slice())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_wavelet_csv(out, self, None)
    }
}

pub fn wavelet_build(level: usize, params: ParameterPointSet) -> Result<WaveletBasis> {
    let expected = wavelet_dimension(level);
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            got: params.len(),
        });
    }
    let vandermonde = WaveletVandermonde::new(params.points(), wavelet_block(level));
    Ok(WaveletBasis {
        level,
        params,
        vandermonde,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateReport {
    pub smallest: f64,
    pub largest: f64,
    pub condition: f64,
}

/// Passes when the smallest singular value of the Vandermonde block exceeds
/// [`GATE_TOLERANCE`] times the largest.
pub fn independence_gate(basis: &WaveletBasis) -> Result<GateReport> {
    let sv = basis.vandermonde.matrix.clone().singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    if !(smallest > GATE_TOLERANCE * largest) {
        return Err(Error::GateFailure {
            level: basis.level,
            condition,
        });
    }
    Ok(GateReport {
        smallest,
        largest,
        condition,
    })
}

/// `<f, psi_j>` for every `j`, i.e. `A f` on the `W_N` block; components of
/// `f` outside the block are ignored.
pub fn wavelet_coefficients(f: &DiskPolynomial, basis: &WaveletBasis) -> Vec<Complex64> {
    let block = DVector::from_iterator(basis.dimension(), basis.range().map(|l| f.coeff(l)));
    (&basis.vandermonde.matrix * block)
        .iter()
        .copied()
        .collect()
}

/// `psi~_j = (A* A)^{-1} psi_j` on the `W_N` block.
#[derive(Debug, Clone)]
pub struct DualWaveletBasis {
    level: usize,
    range: Range<usize>,
    /// Row `j` is the coefficient block of `psi~_j`.
    duals: DMatrix<Complex64>,
}

impl DualWaveletBasis {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn range(&self) -> Range<usize> {
        self.range.clone()
    }

    pub fn dimension(&self) -> usize {
        self.duals.nrows()
    }

    pub fn block(&self, j: usize) -> Vec<Complex64> {
        self.duals.row(j).iter().copied().collect()
    }

    pub fn function(&self, j: usize) -> DiskPolynomial {
        DiskPolynomial::from_block(
            wavelet_top_degree(self.level),
            self.range.start,
            &self.block(j),
        )
    }

    /// `sum_j coeffs_j psi~_j`.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> DiskPolynomial {
        let c = DVector::from_column_slice(coeffs);
        let block = self.duals.transpose() * c;
        DiskPolynomial::from_block(
            wavelet_top_degree(self.level),
            self.range.start,
            block.as_slice(),
        )
    }

    /// `<f, psi~_j>` for every `j`.
    pub fn dual_coefficients(&self, f: &DiskPolynomial) -> Vec<Complex64> {
        let block =
            DVector::from_iterator(self.dimension(), self.range.clone().map(|l| f.coeff(l)));
        (self.duals.map(|c| c.conj()) * block)
            .iter()
            .copied()
            .collect()
    }
}

/// Cholesky factorization of `A* A` applied to the wavelet blocks; the
/// inverse is never formed.
pub fn dual_build(basis: &WaveletBasis) -> Result<DualWaveletBasis> {
    independence_gate(basis)?;
    let a = &basis.vandermonde.matrix;
    let a_star = a.adjoint();
    let gram = &a_star * a;
    let chol = gram.cholesky().ok_or(Error::GateFailure {
        level: basis.level,
        condition: f64::INFINITY,
    })?;
    // columns of (A* A)^{-1} A* are the dual blocks
    let columns = chol.solve(&a_star);
    Ok(DualWaveletBasis {
        level: basis.level,
        range: basis.range(),
        duals: columns.transpose(),
    })
}

/// Writes wavelets (`dual = 0`) followed by duals (`dual = 1`).
pub fn write_wavelet_csv<W: Write>(
    out: W,
    basis: &WaveletBasis,
    dual: Option<&DualWaveletBasis>,
) -> Result<()> {
    let anchors = basis.params.points();
    let primal: Vec<_> = (0..basis.dimension()).map(|j| basis.function(j)).collect();
    let duals: Vec<_> = dual.map_or_else(Vec::new, |d| {
        (0..d.dimension()).map(|j| d.function(j)).collect()
    });
    let rows: Vec<_> = primal
        .iter()
        .map(|p| (false, p))
        .chain(duals.iter().map(|p| (true, p)))
        .enumerate()
        .map(|(i, (flag, poly))| {
            let j = i % anchors.len();
            FunctionRow {
                dual: flag,
                j,
                anchor: anchors[j],
                poly,
            }
        })
        .collect();
    write_function_csv(out, &rows, dual.is_some())
}

/// Sampled analysis/synthesis operators of one wavelet level.
#[derive(Debug, Clone)]
pub struct FrameOps {
    /// `Psi = B A*`: column `j` holds the (weighted) samples of `psi_j`.
    pub synthesis: DMatrix<Complex64>,
    /// Column `j` holds the samples of `(Psi Psi*)^+ psi_j`.
    pub duals: DMatrix<Complex64>,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl FrameOps {
    /// `Psi Psi*`, a `D x D` matrix of rank at most `D_N`.
    pub fn frame_operator(&self) -> DMatrix<Complex64> {
        &self.synthesis * self.synthesis.adjoint()
    }
}

/// Builds `Psi = B A*` from samples `B[i][l] = Z_l(x_i)` over the block and
/// the discretized duals via the pseudo-inverse of `Psi Psi*`.
///
/// With `weights`, row `i` of `B` is scaled by `sqrt(w_i)`; the duals then
/// match the coefficient-space duals when the weights form a rule exact for
/// products in `V_{top}`.
pub fn discretized_frame_ops(
    basis: &WaveletBasis,
    samples: &[PolarPoint],
    weights: Option<&[f64]>,
) -> Result<FrameOps> {
    let d = basis.dimension();
    if samples.len() < d {
        return Err(Error::Underdetermined {
            samples: samples.len(),
            unknowns: d,
        });
    }
    let mut b = block_vandermonde(samples, basis.range());
    if let Some(w) = weights {
        if w.len() != samples.len() {
            return Err(Error::MismatchedSamples);
        }
        for (i, wi) in w.iter().enumerate() {
            b.row_mut(i).scale_mut(wi.sqrt());
        }
    }
    let synthesis = b * basis.vandermonde.matrix.adjoint();
    let svd = synthesis.clone().svd(true, true);
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > GATE_TOLERANCE * largest).count();
    if rank < d {
        return Err(Error::RankDeficient {
            found: rank,
            needed: d,
        });
    }
    // (Psi Psi*)^+ Psi = U S^{-1} V*
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V*");
    let inv = DMatrix::from_diagonal(&DVector::from_iterator(
        d,
        sv.iter().map(|s| Complex64::new(1.0 / s, 0.0)),
    ));
    let duals = u * inv * v_t;
    Ok(FrameOps {
        synthesis,
        duals,
        rank,
        singular_values: sv,
    })
}

/// Samples of every function in `basis` at `points`, one column per function.
pub fn sample_functions(functions: &[DiskPolynomial], points: &[PolarPoint]) -> DMatrix<Complex64> {
    let degree = functions.iter().map(|f| f.degree()).max().unwrap_or(0);
    let table = ZernikeTable::new(degree);
    DMatrix::from_fn(points.len(), functions.len(), |i, j| {
        functions[j].eval_with(&table, points[i])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::kernel_build;
    use crate::sampling::Provenance;
    use crate::scaling::scaling_build;
    use crate::zernike::DiskQuadrature;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn random_point(rng: &mut impl Rng) -> PolarPoint {
        PolarPoint::new(rng.random::<f64>().sqrt(), rng.random_range(0.0..TAU)).unwrap()
    }

    fn random_in_block(rng: &mut impl Rng, level: usize) -> DiskPolynomial {
        let block: Vec<_> = wavelet_block(level)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        DiskPolynomial::from_block(
            wavelet_top_degree(level),
            wavelet_block(level).start,
            &block,
        )
    }

    fn fekete_basis(level: usize) -> WaveletBasis {
        wavelet_build(
            level,
            wavelet_parameters(level, PointStrategy::Fekete).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn dimension_table() {
        assert_eq!(
            (1..=4).map(wavelet_dimension).collect::<Vec<_>>(),
            vec![3, 9, 18, 30]
        );
        assert_eq!(wavelet_dimension(0), 2);
        for n in 1..=50 {
            assert_eq!(basis_len(2 * n) - basis_len(n), wavelet_dimension(n));
            assert_eq!(wavelet_block(n).len(), wavelet_dimension(n));
        }
        assert_eq!(wavelet_block(0).len(), wavelet_dimension(0));
    }

    #[test]
    fn wavelets_are_kernel_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for level in 1..=5 {
            let points: Vec<_> = (0..wavelet_dimension(level))
                .map(|_| random_point(&mut rng))
                .collect();
            let basis = wavelet_build(
                level,
                ParameterPointSet::new(points.clone(), Provenance::Explicit).unwrap(),
            )
            .unwrap();
            for (j, &p) in points.iter().enumerate().take(20) {
                let hi = kernel_build(2 * level, p).unwrap().into_polynomial();
                let lo = kernel_build(level, p).unwrap().into_polynomial();
                let diff = hi - lo.project(2 * level);
                assert!((&basis.function(j) - &diff).max_abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn level_zero_spans_linear_terms() {
        let basis = fekete_basis(0);
        assert_eq!(basis.dimension(), 2);
        assert_eq!(basis.range(), 1..3);
        assert!(independence_gate(&basis).is_ok());
        let p = basis.parameters().points()[0];
        let k1 = kernel_build(1, p).unwrap().into_polynomial();
        let k0 = kernel_build(0, p).unwrap().into_polynomial().project(1);
        assert!((&basis.function(0) - &(k1 - k0)).max_abs() < 1e-14);
    }

    #[test]
    fn wrong_parameter_count_rejected() {
        let params = wavelet_parameters(2, PointStrategy::Fekete).unwrap();
        assert!(matches!(
            wavelet_build(3, params),
            Err(Error::ParameterCount {
                expected: 18,
                got: 9
            })
        ));
    }

    #[test]
    fn gram_reproduces_point_values() {
        for level in 1..=5 {
            let basis = fekete_basis(level);
            let gram = basis.gram();
            let table = ZernikeTable::new(basis.top_degree());
            let mu = basis.parameters().points();
            for j in 0..basis.dimension() {
                for k in 0..basis.dimension() {
                    let value = basis.function(k).eval_with(&table, mu[j]);
                    assert!((gram[(j, k)] - value).norm() <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn gate_outcomes() {
        assert!(independence_gate(&fekete_basis(3)).is_ok());
        let mut points = wavelet_parameters(3, PointStrategy::Fekete)
            .unwrap()
            .points()
            .to_vec();
        points[1] = points[0];
        let dup = wavelet_build(
            3,
            ParameterPointSet::new_unchecked(points, Provenance::Explicit),
        )
        .unwrap();
        assert!(matches!(
            independence_gate(&dup),
            Err(Error::GateFailure { level: 3, .. })
        ));
        let passes = (0..5u64)
            .filter(|&seed| {
                let params = wavelet_parameters(3, PointStrategy::Random { seed }).unwrap();
                independence_gate(&wavelet_build(3, params).unwrap()).is_ok()
            })
            .count();
        assert!(passes >= 1);
    }

    #[test]
    fn coefficients_match_gram_and_quadrature() {
        let basis = fekete_basis(2);
        let gram = basis.gram();
        for k in 0..basis.dimension() {
            let c = wavelet_coefficients(&basis.function(k), &basis);
            for j in 0..basis.dimension() {
                assert!((c[j] - gram[(k, j)]).norm() < 1e-12);
            }
        }
        assert!(wavelet_coefficients(&DiskPolynomial::zeros(4), &basis)
            .iter()
            .all(|c| c.norm() == 0.0));
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let f = random_in_block(&mut rng, 2);
        let quad = DiskQuadrature::for_degree(4);
        let table = ZernikeTable::new(4);
        let c = wavelet_coefficients(&f, &basis);
        for (j, cj) in c.iter().enumerate() {
            let psi = basis.function(j);
            let numeric =
                quad.inner_product(|x| f.eval_with(&table, x), |x| psi.eval_with(&table, x));
            assert!((numeric - cj).norm() <= 1e-9);
        }
    }

    #[test]
    fn dual_reconstruction_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for level in 1..=4 {
            let basis = fekete_basis(level);
            let dual = dual_build(&basis).unwrap();
            for _ in 0..20 {
                let f = random_in_block(&mut rng, level);
                let back = dual.reconstruct(&wavelet_coefficients(&f, &basis));
                assert!((&back - &f).max_abs() <= 1e-8);
                let again = basis.synthesize(&dual.dual_coefficients(&f));
                assert!((&again - &f).max_abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn diagonal_gram_gives_scaled_duals() {
        // for W_0 parameters on a circle 90 degrees apart, A* A is diagonal
        let params = ParameterPointSet::new(
            vec![
                PolarPoint::new(0.8, 0.0).unwrap(),
                PolarPoint::new(0.8, TAU / 4.0).unwrap(),
            ],
            Provenance::Explicit,
        )
        .unwrap();
        let basis = wavelet_build(0, params).unwrap();
        let a = basis.vandermonde().matrix();
        let g = a.adjoint() * a;
        assert!(g[(0, 1)].norm() < 1e-14);
        let dual = dual_build(&basis).unwrap();
        for j in 0..2 {
            let psi = basis.block(j);
            let tilde = dual.block(j);
            let ratio = tilde[0] / psi[0];
            for (t, p) in tilde.iter().zip(&psi) {
                assert!((t - p * ratio).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn wavelets_orthogonal_to_scaling_functions() {
        for level in 1..=4 {
            let basis = fekete_basis(level);
            let scaling = scaling_build(level).unwrap();
            let quad = DiskQuadrature::for_degree(2 * level);
            let table = ZernikeTable::new(2 * level);
            for j in 0..basis.dimension() {
                let psi = basis.function(j);
                for k in 0..scaling.len() {
                    let phi = scaling.function(k);
                    assert_eq!(psi.inner_product(phi), Complex64::new(0.0, 0.0));
                    let numeric = quad
                        .inner_product(|x| psi.eval_with(&table, x), |x| phi.eval_with(&table, x));
                    assert!(numeric.norm() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn discretized_duals_match_coefficient_duals() {
        let level = 2;
        let basis = fekete_basis(level);
        let dual = dual_build(&basis).unwrap();
        let quad = DiskQuadrature::for_degree(2 * level);
        let (points, weights): (Vec<_>, Vec<_>) = quad.nodes().into_iter().unzip();
        let ops = discretized_frame_ops(&basis, &points, Some(&weights)).unwrap();
        assert_eq!(ops.rank, basis.dimension());
        let psi: Vec<_> = (0..basis.dimension()).map(|j| basis.function(j)).collect();
        let sampled = sample_functions(&psi, &points);
        let tilde: Vec<_> = (0..basis.dimension()).map(|j| dual.function(j)).collect();
        let sampled_tilde = sample_functions(&tilde, &points);
        for i in 0..points.len() {
            let s = weights[i].sqrt();
            for j in 0..basis.dimension() {
                assert!((ops.synthesis[(i, j)] - sampled[(i, j)] * s).norm() < 1e-10);
                assert!((ops.duals[(i, j)] - sampled_tilde[(i, j)] * s).norm() <= 1e-6);
            }
        }
        let frame = ops.frame_operator();
        assert_eq!(frame.nrows(), points.len());
    }

    #[test]
    fn too_few_samples_rejected() {
        let basis = fekete_basis(2);
        let pts = regular_points(1).points().to_vec();
        assert!(matches!(
            discretized_frame_ops(&basis, &pts, None),
            Err(Error::Underdetermined { .. })
        ));
    }

    #[test]
    fn csv_flags_duals() {
        let basis = fekete_basis(1);
        let dual = dual_build(&basis).unwrap();
        let mut buf = Vec::new();
        write_wavelet_csv(&mut buf, &basis, Some(&dual)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("dual,j,rho,theta,re_0"));
        assert_eq!(lines.len(), 1 + 2 * 3);
        assert!(lines[1].starts_with("0,0,"));
        assert!(lines[4].starts_with("1,0,"));
    }
}
