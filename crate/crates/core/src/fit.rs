//! Least-squares fitting of scattered elevation data onto `V_N`, best-fit
//! spheres and synthetic corneal-like surfaces.

use std::collections::hash_map::DefaultHasher;
use std::f64::consts::TAU;
use std::fs::File;
use std::hash::{Hash, Hasher};
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mra::{decompose, Decomposition, MultiscaleBasis};
use crate::point::{PolarPoint, DISK_TOLERANCE};
use crate::zernike::{
    basis_len, complex_to_real_coeffs, real_basis_to_complex, DiskPolynomial, RealCoeffs,
    ZernikeIndex, ZernikeTable,
};

/// Fits whose design matrix exceeds this condition number are rejected.
pub const DESIGN_CONDITION_LIMIT: f64 = 1e12;

/// Elevation samples `z_i` at points `(r_i, theta_i)` of the closed disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiskSamples {
    points: Vec<PolarPoint>,
    values: Vec<f64>,
}

impl DiskSamples {
    pub fn new(points: Vec<PolarPoint>, values: Vec<f64>) -> Result<Self> {
        if points.len() != values.len() {
            return Err(Error::MismatchedSamples);
        }
        if points.is_empty() {
            return Err(Error::Degenerate("no samples".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite sample value {v}"
            )));
        }
        let points = points
            .into_iter()
            .map(|p| PolarPoint::new(p.r, p.phi))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { points, values })
    }

    pub fn points(&self) -> &[PolarPoint] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Hash of the exact bit patterns of points and values.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for (p, v) in self.points.iter().zip(&self.values) {
            p.r.to_bits().hash(&mut h);
            p.phi.to_bits().hash(&mut h);
            v.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Copy with `z` replaced.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.points.clone(), values)
    }

    /// Parses `x,y,z` or `r,theta,z`. With `normalize`, radii are divided by
    /// the largest radius; otherwise radii beyond `1 + 1e-12` are errors.
    pub fn read_csv<R: Read>(input: R, normalize: bool) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| parse_error(1, e))?
            .iter()
            .map(|h| h.to_ascii_lowercase())
            .collect();
        let cartesian = match headers
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .as_slice()
        {
            ["x", "y", "z"] => true,
            ["r", "theta", "z"] => false,
            other => {
                return Err(Error::Parse {
                    line: 1,
                    message: format!(
                        "expected header x,y,z or r,theta,z, found {}",
                        other.join(",")
                    ),
                })
            }
        };
        let mut raw = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i + 2;
            let record = record.map_err(|e| parse_error(line, e))?;
            if record.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", record.len()),
                });
            }
            let mut fields = [0.0; 3];
            for (slot, text) in fields.iter_mut().zip(record.iter()) {
                *slot = text.parse::<f64>().map_err(|e| parse_error(line, e))?;
                if !slot.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("non-finite value {text}"),
                    });
                }
            }
            let (r, phi) = if cartesian {
                (fields[0].hypot(fields[1]), fields[1].atan2(fields[0]))
            } else {
                (fields[0], fields[1])
            };
            if r < 0.0 {
                return Err(Error::Parse {
                    line,
                    message: format!("negative radius {r}"),
                });
            }
            raw.push((r, phi, fields[2]));
        }
        if raw.is_empty() {
            return Err(Error::Degenerate("no samples".into()));
        }
        let scale = if normalize {
            let max = raw.iter().map(|s| s.0).fold(0.0, f64::max);
            if max == 0.0 {
                return Err(Error::Degenerate("all samples at the origin".into()));
            }
            max
        } else {
            1.0
        };
        let mut points = Vec::with_capacity(raw.len());
        let mut values = Vec::with_capacity(raw.len());
        for (i, (r, phi, z)) in raw.into_iter().enumerate() {
            let r = r / scale;
            if r > 1.0 + DISK_TOLERANCE {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("radius {r} outside the unit disk (use normalization)"),
                });
            }
            points.push(PolarPoint::new(r, phi)?);
            values.push(z);
        }
        Self::new(points, values)
    }

    pub fn ingest(path: &Path, normalize: bool) -> Result<Self> {
        Self::read_csv(File::open(path)?, normalize)
    }

    /// `r,theta,z` with 17 significant digits; reads back bit-identically.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,theta,z")?;
        for (p, z) in self.points.iter().zip(&self.values) {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", p.r, p.phi, z)?;
        }
        Ok(())
    }
}

fn parse_error(line: usize, e: impl std::fmt::Display) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BasisKind {
    /// Cosine/sine polynomials `G_j`.
    #[default]
    Real,
    Complex,
}

fn check_determined(samples: &DiskSamples, degree: usize) -> Result<()> {
    let unknowns = basis_len(degree);
    if samples.len() < unknowns {
        return Err(Error::Underdetermined {
            samples: samples.len(),
            unknowns,
        });
    }
    Ok(())
}

/// `B[i][j] = G_j(x_i)`.
pub fn design_matrix_real(samples: &DiskSamples, degree: usize) -> Result<DMatrix<f64>> {
    check_determined(samples, degree)?;
    let table = ZernikeTable::new(degree);
    let cols = table.len();
    let mut data = vec![0.0; samples.len() * cols];
    data.par_chunks_mut(cols)
        .zip(samples.points.par_iter())
        .for_each(|(row, &p)| table.real_row_into(p, row));
    Ok(DMatrix::from_row_slice(samples.len(), cols, &data))
}

/// `B[i][j] = Z_j(x_i)`.
pub fn design_matrix_complex(samples: &DiskSamples, degree: usize) -> Result<DMatrix<Complex64>> {
    check_determined(samples, degree)?;
    let table = ZernikeTable::new(degree);
    let cols = table.len();
    let mut data = vec![Complex64::new(0.0, 0.0); samples.len() * cols];
    data.par_chunks_mut(cols)
        .zip(samples.points.par_iter())
        .for_each(|(row, &p)| table.complex_row_into(p, row));
    Ok(DMatrix::from_row_slice(samples.len(), cols, &data))
}

/// Euclidean and root-mean-square norms of a residual vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualNorms {
    pub l2: f64,
    pub rms: f64,
}

impl ResidualNorms {
    pub fn of(residual: impl Iterator<Item = f64>) -> Self {
        let (sum, count) = residual.fold((0.0, 0usize), |(s, c), r| (s + r * r, c + 1));
        Self {
            l2: sum.sqrt(),
            rms: if count == 0 {
                0.0
            } else {
                (sum / count as f64).sqrt()
            },
        }
    }
}

/// Residual of `p` (real part) against the samples.
pub fn residual_norms(samples: &DiskSamples, p: &DiskPolynomial) -> ResidualNorms {
    let table = ZernikeTable::new(p.degree());
    let fitted: Vec<f64> = samples
        .points
        .par_iter()
        .map(|&x| p.eval_with(&table, x).re)
        .collect();
    ResidualNorms::of(samples.values.iter().zip(&fitted).map(|(z, f)| z - f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub degree: usize,
    /// Coefficients on the real basis `G_j`, single-index order.
    pub coeffs: Vec<f64>,
    /// `B a` at the sample points.
    pub fitted: Vec<f64>,
    pub residual: ResidualNorms,
    /// Condition number of `B`.
    pub condition: f64,
    pub samples_fingerprint: u64,
}

impl FitResult {
    /// The fit as a complex-coefficient polynomial.
    pub fn polynomial(&self) -> DiskPolynomial {
        real_basis_to_complex(&self.coeffs).expect("fit length is J_N")
    }

    /// `A_{nm}, B_{nm}` form.
    pub fn real_coeffs(&self) -> RealCoeffs {
        RealCoeffs::from_real_basis(&self.coeffs).expect("fit length is J_N")
    }

    pub fn summary(&self) -> FitSummary {
        FitSummary {
            degree: self.degree,
            basis_len: self.coeffs.len(),
            samples: self.fitted.len(),
            residual_l2: self.residual.l2,
            residual_rms: self.residual.rms,
            condition: self.condition,
        }
    }

    /// `j,n,m,A,B`, one row per single index. Rows with `m >= 0` carry
    /// `A_{n|m|}` and `B = 0`; rows with `m < 0` carry `A = 0` and
    /// `B_{n|m|}`.
    pub fn write_coefficients_csv<W: Write>(&self, mut out: W) -> Result<()> {
        let real = self.real_coeffs();
        writeln!(out, "j,n,m,A,B")?;
        for j in 0..self.coeffs.len() {
            let idx = ZernikeIndex::from_single(j);
            let term = real
                .get(idx.n(), idx.m_abs())
                .expect("every index has a term");
            let (a, b) = if idx.m() >= 0 {
                (term.a, 0.0)
            } else {
                (0.0, term.b)
            };
            writeln!(out, "{j},{},{},{:.16e},{:.16e}", idx.n(), idx.m(), a, b)?;
        }
        Ok(())
    }
}

/// Residual summary exported as JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub degree: usize,
    #[serde(rename = "J")]
    pub basis_len: usize,
    pub samples: usize,
    pub residual_l2: f64,
    pub residual_rms: f64,
    pub condition: f64,
}

/// Least squares by Householder QR of the real design matrix; equivalent
/// to `(B^T B)^{-1} B^T C` without squaring the condition number.
pub fn least_squares_fit(samples: &DiskSamples, degree: usize) -> Result<FitResult> {
    let b = design_matrix_real(samples, degree)?;
    let cols = b.ncols();
    let qr = b.clone().qr();
    let r = qr.r();
    let sv = r.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    if !(condition <= DESIGN_CONDITION_LIMIT) {
        return Err(Error::IllConditioned {
            condition,
            limit: DESIGN_CONDITION_LIMIT,
        });
    }
    let mut rhs = DVector::from_column_slice(&samples.values);
    qr.q_tr_mul(&mut rhs);
    let head = DVector::from_iterator(cols, rhs.iter().take(cols).copied());
    let coeffs = r.solve_upper_triangular(&head).ok_or(Error::Singular)?;
    let fitted = &b * &coeffs;
    let residual = ResidualNorms::of(samples.values.iter().zip(fitted.iter()).map(|(z, f)| z - f));
    Ok(FitResult {
        degree,
        coeffs: coeffs.iter().copied().collect(),
        fitted: fitted.iter().copied().collect(),
        residual,
        condition,
        samples_fingerprint: samples.fingerprint(),
    })
}

/// `||B^T (C - B a)||`, zero at the least-squares optimum.
pub fn normal_equation_residual(samples: &DiskSamples, fit: &FitResult) -> Result<f64> {
    let b = design_matrix_real(samples, fit.degree)?;
    let r = DVector::from_iterator(
        samples.len(),
        samples.values.iter().zip(&fit.fitted).map(|(z, f)| z - f),
    );
    Ok((b.transpose() * r).norm())
}

/// How the coarse component of a two-level difference is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HierarchyMode {
    /// The coarse fit is its own least-squares problem at `N/2`.
    #[default]
    Independent,
    /// The coarse component is the orthogonal projection of the fine fit;
    /// the difference then lies exactly in `W_{N/2}`.
    Projection,
}

fn check_pair(high: &FitResult, low: &FitResult) -> Result<()> {
    if high.samples_fingerprint != low.samples_fingerprint {
        return Err(Error::MismatchedSamples);
    }
    if high.degree != 2 * low.degree {
        return Err(Error::InvalidParameter(format!(
            "fit degrees {} and {} are not N and N/2",
            high.degree, low.degree
        )));
    }
    Ok(())
}

/// Fine fit minus coarse component, as an element of `V_N`.
pub fn fit_difference(
    high: &FitResult,
    low: &FitResult,
    mode: HierarchyMode,
) -> Result<DiskPolynomial> {
    check_pair(high, low)?;
    let fine = high.polynomial();
    let coarse = match mode {
        HierarchyMode::Independent => low.polynomial(),
        HierarchyMode::Projection => fine.project(low.degree),
    };
    Ok(&fine - &coarse.project(high.degree))
}

/// `||low - P_{N/2} high||`: how far the two hierarchy modes disagree.
pub fn hierarchy_discrepancy(high: &FitResult, low: &FitResult) -> Result<f64> {
    check_pair(high, low)?;
    Ok((&low.polynomial() - &high.polynomial().project(low.degree)).norm())
}

/// Expands the fit over the ladder of `bases`; the fit degree must equal the
/// ladder degree.
pub fn wavelet_analysis(fit: &FitResult, bases: &Arc<MultiscaleBasis>) -> Result<Decomposition> {
    if bases.degree() != fit.degree {
        return Err(Error::InvalidParameter(format!(
            "fit degree {} does not match ladder degree {}",
            fit.degree,
            bases.degree()
        )));
    }
    Ok(decompose(&fit.polynomial(), bases))
}

/// Real `A, B` coefficients of a conjugate-symmetric decomposition result.
pub fn to_real_coeffs(p: &DiskPolynomial) -> Result<RealCoeffs> {
    complex_to_real_coeffs(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereFit {
    pub center: [f64; 3],
    pub radius: f64,
    /// Whether the cap is the upper hemisphere `z0 + sqrt(...)`; chosen on
    /// the side of the mean sample height.
    pub upper: bool,
    /// Sphere height under each sample.
    pub heights: Vec<f64>,
    /// `z - height`.
    pub differences: Vec<f64>,
}

impl SphereFit {
    /// Height of the fitted cap at `(x, y)`; outside the sphere's footprint
    /// the equator height is used.
    pub fn height(&self, x: f64, y: f64) -> f64 {
        let [x0, y0, z0] = self.center;
        let d2 = (x - x0).powi(2) + (y - y0).powi(2);
        let h = (self.radius * self.radius - d2).max(0.0).sqrt();
        if self.upper {
            z0 + h
        } else {
            z0 - h
        }
    }
}

/// Algebraic sphere fit: least squares on
/// `x^2 + y^2 + z^2 = 2 x0 x + 2 y0 y + 2 z0 z + c`.
pub fn best_fit_sphere(samples: &DiskSamples) -> Result<SphereFit> {
    if samples.len() < 4 {
        return Err(Error::Degenerate(format!(
            "{} points cannot determine a sphere",
            samples.len()
        )));
    }
    let xyz: Vec<[f64; 3]> = samples
        .points
        .iter()
        .zip(&samples.values)
        .map(|(p, &z)| {
            let (x, y) = p.to_cartesian();
            [x, y, z]
        })
        .collect();
    let a = DMatrix::from_fn(
        xyz.len(),
        4,
        |i, j| if j < 3 { 2.0 * xyz[i][j] } else { 1.0 },
    );
    let rhs = DVector::from_iterator(
        xyz.len(),
        xyz.iter().map(|p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2]),
    );
    let qr = a.qr();
    let r = qr.r();
    let sv = r.singular_values();
    let largest = sv.iter().copied().fold(0.0, f64::max);
    let smallest = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smallest > 1e-12 * largest) {
        return Err(Error::Degenerate("points are coplanar or collinear".into()));
    }
    let mut qtb = rhs;
    qr.q_tr_mul(&mut qtb);
    let head = DVector::from_iterator(4, qtb.iter().take(4).copied());
    let sol = r.solve_upper_triangular(&head).ok_or(Error::Singular)?;
    let center = [sol[0], sol[1], sol[2]];
    let r2 = sol[3] + center.iter().map(|c| c * c).sum::<f64>();
    if !(r2 > 0.0) {
        return Err(Error::Degenerate("fitted sphere has no real radius".into()));
    }
    let radius = r2.sqrt();
    let mean_z = xyz.iter().map(|p| p[2]).sum::<f64>() / xyz.len() as f64;
    let mut fit = SphereFit {
        center,
        radius,
        upper: mean_z >= center[2],
        heights: Vec::new(),
        differences: Vec::new(),
    };
    fit.heights = xyz.iter().map(|p| fit.height(p[0], p[1])).collect();
    fit.differences = xyz
        .iter()
        .zip(&fit.heights)
        .map(|(p, h)| p[2] - h)
        .collect();
    Ok(fit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SurfaceKind {
    Normal,
    Astigmatism,
    Keratoconus,
}

/// Parameters of the synthetic surfaces, in disk units (rim radius 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthParams {
    pub kind: SurfaceKind,
    /// Radius of curvature of the spherical cap `z = R - sqrt(R^2 - r^2)`.
    pub sphere_radius: f64,
    /// Amplitude `a` of `a r^2 cos(2 theta - 2 theta0)`.
    pub astigmatism: f64,
    pub astigmatism_axis: f64,
    /// Height, centre and width of the Gaussian bump.
    pub bump_height: f64,
    pub bump_center: PolarPoint,
    pub bump_width: f64,
    /// Standard deviation of i.i.d. Gaussian noise on `z`.
    pub noise: f64,
    pub seed: u64,
    /// Sample layout: `rings x meridians` points on a polar grid.
    pub rings: usize,
    pub meridians: usize,
}

impl SynthParams {
    pub fn new(kind: SurfaceKind) -> Self {
        Self {
            kind,
            sphere_radius: 1.73,
            astigmatism: 0.02,
            astigmatism_axis: 0.3,
            bump_height: 0.03,
            bump_center: PolarPoint { r: 0.4, phi: 4.0 },
            bump_width: 0.12,
            noise: 0.0,
            seed: 0,
            rings: 34,
            meridians: 300,
        }
    }

    pub fn sample_count(&self) -> usize {
        self.rings * self.meridians
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.into()));
        if !(self.sphere_radius > 1.0) || !self.sphere_radius.is_finite() {
            return bad("sphere radius must exceed the disk radius 1");
        }
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return bad("noise must be a finite nonnegative number");
        }
        if !(self.bump_width > 0.0) || !self.bump_width.is_finite() {
            return bad("bump width must be positive");
        }
        if ![self.astigmatism, self.astigmatism_axis, self.bump_height]
            .iter()
            .all(|v| v.is_finite())
        {
            return bad("amplitudes must be finite");
        }
        if self.rings == 0 || self.meridians == 0 {
            return bad("layout needs at least one ring and one meridian");
        }
        PolarPoint::new(self.bump_center.r, self.bump_center.phi)?;
        Ok(())
    }

    /// Noise-free height at `point`.
    pub fn height(&self, point: PolarPoint) -> f64 {
        let r = point.r;
        let rr = self.sphere_radius;
        let mut z = rr - (rr * rr - r * r).sqrt();
        match self.kind {
            SurfaceKind::Normal => {}
            SurfaceKind::Astigmatism => {
                z += self.astigmatism
                    * r
                    * r
                    * (2.0 * point.phi - 2.0 * self.astigmatism_axis).cos();
            }
            SurfaceKind::Keratoconus => {
                let d = point.distance(self.bump_center);
                z += self.bump_height * (-d * d / (2.0 * self.bump_width * self.bump_width)).exp();
            }
        }
        z
    }
}

/// Polar sample layout: ring `i` at radius `i / rings` (`i = 1..=rings`),
/// `meridians` equispaced angles per ring.
pub fn polar_layout(rings: usize, meridians: usize) -> Vec<PolarPoint> {
    let mut out = Vec::with_capacity(rings * meridians);
    for i in 1..=rings {
        let r = i as f64 / rings as f64;
        for k in 0..meridians {
            out.push(PolarPoint {
                r,
                phi: TAU * k as f64 / meridians as f64,
            });
        }
    }
    out
}

/// Deterministic for a given seed.
pub fn synth_surface(params: &SynthParams) -> Result<DiskSamples> {
    params.validate()?;
    let points = polar_layout(params.rings, params.meridians);
    let mut values: Vec<f64> = points.iter().map(|&p| params.height(p)).collect();
    if params.noise > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let normal = Normal::new(0.0, params.noise).expect("validated noise level");
        for v in &mut values {
            *v += normal.sample(&mut rng);
        }
    }
    DiskSamples::new(points, values)
}

/// Plotting grid: the origin plus `res` rings at radii `i / res`, each with
/// `4 res` equispaced angles.
pub fn plot_grid(res: usize) -> Vec<PolarPoint> {
    let mut out = vec![PolarPoint { r: 0.0, phi: 0.0 }];
    out.extend(polar_layout(res, 4 * res.max(1)));
    out
}

/// `x,y,value` rows with 17 significant digits.
pub fn write_grid_csv<W: Write>(mut out: W, points: &[PolarPoint], values: &[f64]) -> Result<()> {
    writeln!(out, "x,y,value")?;
    for (p, v) in points.iter().zip(values) {
        let (x, y) = p.to_cartesian();
        writeln!(out, "{x:.16e},{y:.16e},{v:.16e}")?;
    }
    Ok(())
}

/// Real part of `p` at every point, evaluated in parallel.
pub fn evaluate_on(p: &DiskPolynomial, points: &[PolarPoint]) -> Vec<f64> {
    let table = ZernikeTable::new(p.degree());
    points
        .par_iter()
        .map(|&x| p.eval_with(&table, x).re)
        .collect()
}
