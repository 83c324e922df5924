//! Scaling functions `phi_{N,j} = K_N(.; P_j)` anchored at regular points.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{kernel_eval_cd, KernelFunction};
use crate::point::PolarPoint;
use crate::sampling::{block_vandermonde, condition_number, regular_points, RegularPointSet};
use crate::zernike::{basis_len, DiskPolynomial, ZernikeTable};

/// Collocation matrices with a larger condition number are rejected.
pub const COLLOCATION_CONDITION_LIMIT: f64 = 1e12;

/// `A[i][j] = Z_j(P_i)` over the regular points of degree `N`.
///
/// Square and nonsingular exactly when the points are unisolvent for `V_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollocationMatrix {
    matrix: DMatrix<Complex64>,
    condition: f64,
}

impl CollocationMatrix {
    pub fn new(points: &[PolarPoint], degree: usize) -> Self {
        let matrix = block_vandermonde(points, 0..basis_len(degree));
        let condition = condition_number(&matrix);
        Self { matrix, condition }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }
}

#[derive(Debug, Clone)]
pub struct ScalingBasis {
    degree: usize,
    points: RegularPointSet,
    functions: Vec<KernelFunction>,
    collocation: CollocationMatrix,
}

impl ScalingBasis {
    pub fn new(points: RegularPointSet) -> Result<Self> {
        let degree = points.degree();
        let collocation = CollocationMatrix::new(points.points(), degree);
        if !(collocation.condition() <= COLLOCATION_CONDITION_LIMIT) {
            return Err(Error::IllConditioned {
                condition: collocation.condition(),
                limit: COLLOCATION_CONDITION_LIMIT,
            });
        }
        let table = ZernikeTable::new(degree);
        let functions = points
            .points()
            .iter()
            .map(|&p| KernelFunction::with_table(&table, p))
            .collect();
        Ok(Self {
            degree,
            points,
            functions,
            collocation,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn points(&self) -> &RegularPointSet {
        &self.points
    }

    pub fn functions(&self) -> &[KernelFunction] {
        &self.functions
    }

    pub fn function(&self, j: usize) -> &DiskPolynomial {
        self.functions[j].polynomial()
    }

    pub fn collocation(&self) -> &CollocationMatrix {
        &self.collocation
    }

    /// Coefficient rows: row `j` holds `conj(Z_l(P_j))`, i.e. `conj(A)`.
    pub fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        self.collocation.matrix.map(|c| c.conj())
    }

    /// `G[i][k] = <phi_i, phi_k>`, computed in coefficient space.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let c = self.coefficient_matrix();
        &c * c.adjoint()
    }

    /// `E[i][k] = phi_i(P_k)`, by pointwise evaluation.
    pub fn point_values(&self) -> DMatrix<Complex64> {
        let table = ZernikeTable::new(self.degree);
        let anchors = self.points.points();
        DMatrix::from_fn(self.len(), self.len(), |i, k| {
            self.function(i).eval_with(&table, anchors[k])
        })
    }

    /// `sum_j c_j phi_j`.
    pub fn combine(&self, weights: &[Complex64]) -> DiskPolynomial {
        let mut out = DiskPolynomial::zeros(self.degree);
        for (w, f) in weights.iter().zip(&self.functions) {
            for (o, c) in out.coeffs_mut().iter_mut().zip(f.polynomial().coeffs()) {
                *o += w * c;
            }
        }
        out
    }

    /// Anchors and coefficient rows as `j,rho,theta,re_0,im_0,...`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let rows: Vec<_> = self
            .points
            .points()
            .iter()
            .zip(&self.functions)
            .enumerate()
            .map(|(j, (&anchor, f))| FunctionRow {
                dual: false,
                j,
                anchor,
                poly: f.polynomial(),
            })
            .collect();
        write_function_csv(out, &rows, false)
    }
}

pub fn scaling_build(degree: usize) -> Result<ScalingBasis> {
    ScalingBasis::new(regular_points(degree))
}

/// Fundamental Lagrange polynomials of the regular points: row `i` holds the
/// coefficients of `l_i`, with `l_i(P_k) = delta_ik`.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangeDual {
    coeffs: DMatrix<Complex64>,
}

impl LagrangeDual {
    pub fn coeffs(&self) -> &DMatrix<Complex64> {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.nrows() == 0
    }

    pub fn function(&self, i: usize) -> DiskPolynomial {
        DiskPolynomial::from_coeffs(self.coeffs.row(i).iter().copied().collect())
            .expect("square in J_N")
    }

    /// `sum_i values_i l_i`, the interpolant of `values` at the regular points.
    pub fn interpolate(&self, values: &[Complex64]) -> DiskPolynomial {
        let v = DMatrix::from_row_slice(1, values.len(), values);
        DiskPolynomial::from_coeffs((v * &self.coeffs).iter().copied().collect())
            .expect("square in J_N")
    }
}

/// Solves `A C^T = I` by LU with partial pivoting.
pub fn lagrange_dual(basis: &ScalingBasis) -> Result<LagrangeDual> {
    let n = basis.len();
    let ct = basis
        .collocation
        .matrix
        .clone()
        .lu()
        .solve(&DMatrix::identity(n, n))
        .ok_or(Error::Singular)?;
    Ok(LagrangeDual {
        coeffs: ct.transpose(),
    })
}

/// `<phi_{N,j}, q (z - z_j)>` with `z_j` the complex coordinate of `P_j`.
///
/// Vanishes whenever `deg q <= N - 1`.
pub fn modified_orthogonality_check(
    basis: &ScalingBasis,
    q: &DiskPolynomial,
    j: usize,
) -> Complex64 {
    let anchor = basis.points.points()[j];
    let product = q.mul_by_coordinate_difference(anchor);
    basis.function(j).inner_product(&product)
}

/// `phi_{N,j}(point)` through the Christoffel-Darboux formula.
pub fn scaling_cd_eval(basis: &ScalingBasis, j: usize, point: PolarPoint) -> Result<f64> {
    kernel_eval_cd(basis.degree, basis.points.points()[j], point)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalityReport {
    /// Gram matrix diagonal within tolerance.
    pub gram_diagonal: bool,
    /// `phi_k(P_l) = d_k delta_kl` within tolerance.
    pub pointwise_delta: bool,
    pub max_off_diagonal: f64,
    /// Largest `|<phi_k, phi_l> - phi_k(P_l)|`.
    pub identity_error: f64,
    /// `d_k = ||phi_k||^2`.
    pub diagonal: Vec<f64>,
}

impl OrthogonalityReport {
    /// Both sides of the equivalence agree.
    pub fn consistent(&self) -> bool {
        self.gram_diagonal == self.pointwise_delta
    }

    pub fn orthogonal(&self) -> bool {
        self.gram_diagonal && self.pointwise_delta
    }
}

/// Off-diagonal magnitudes at or below this count as zero.
pub const ORTHOGONALITY_TOLERANCE: f64 = 1e-10;

pub fn orthogonality_equivalence_check(basis: &ScalingBasis) -> OrthogonalityReport {
    let gram = basis.gram();
    let values = basis.point_values();
    let n = basis.len();
    let mut max_gram_off: f64 = 0.0;
    let mut max_value_off: f64 = 0.0;
    let mut identity_error: f64 = 0.0;
    for k in 0..n {
        for l in 0..n {
            // <phi_k, phi_l> = phi_k(P_l)
            identity_error = identity_error.max((gram[(k, l)] - values[(k, l)]).norm());
            if k != l {
                max_gram_off = max_gram_off.max(gram[(k, l)].norm());
                max_value_off = max_value_off.max(values[(k, l)].norm());
            }
        }
    }
    OrthogonalityReport {
        gram_diagonal: max_gram_off <= ORTHOGONALITY_TOLERANCE,
        pointwise_delta: max_value_off <= ORTHOGONALITY_TOLERANCE,
        max_off_diagonal: max_gram_off,
        identity_error,
        diagonal: (0..n).map(|k| gram[(k, k)].re).collect(),
    }
}

/// One exported function: anchor, coefficients and whether it is a dual.
pub(crate) struct FunctionRow<'a> {
    pub dual: bool,
    pub j: usize,
    pub anchor: PolarPoint,
    pub poly: &'a DiskPolynomial,
}

/// Shared CSV layout for function families: optional `dual` flag column,
/// then `j,rho,theta` and one `re_l,im_l` pair per coefficient.
pub(crate) fn write_function_csv<W: Write>(
    mut out: W,
    rows: &[FunctionRow<'_>],
    flagged: bool,
) -> Result<()> {
    let width = rows.first().map_or(0, |r| r.poly.coeffs().len());
    let mut header = String::from(if flagged {
        "dual,j,rho,theta"
    } else {
        "j,rho,theta"
    });
    for l in 0..width {
        header.push_str(&format!(",re_{l},im_{l}"));
    }
    writeln!(out, "{header}")?;
    for row in rows {
        let mut line = String::new();
        if flagged {
            line.push_str(if row.dual { "1," } else { "0," });
        }
        line.push_str(&format!(
            "{},{:.16e},{:.16e}",
            row.j, row.anchor.r, row.anchor.phi
        ));
        for c in row.poly.coeffs() {
            line.push_str(&format!(",{:.16e},{:.16e}", c.re, c.im));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}
