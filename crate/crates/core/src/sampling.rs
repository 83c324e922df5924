//! Point sets on the disk: ring-structured regular points, seeded random
//! subsets and approximate Fekete selections.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::PolarPoint;
use crate::zernike::{basis_len, ZernikeTable};

/// Points closer than this are treated as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Supplies the ring radii `lambda_1 > ... > lambda_k` of a regular point set.
pub trait RadiiStrategy: Send + Sync {
    fn radii(&self, ring_count: usize) -> Vec<f64>;
}

/// `lambda_i = cos(pi (2i - 1) / (4k + 2))`, clustering toward the rim.
#[derive(Debug, Clone, Copy, Default)]
pub struct ChebyshevRadii;

impl RadiiStrategy for ChebyshevRadii {
    fn radii(&self, ring_count: usize) -> Vec<f64> {
        let k = ring_count as f64;
        (1..=ring_count)
            .map(|i| (PI * (2.0 * i as f64 - 1.0) / (4.0 * k + 2.0)).cos())
            .collect()
    }
}

impl<F> RadiiStrategy for F
where
    F: Fn(usize) -> Vec<f64> + Send + Sync,
{
    fn radii(&self, ring_count: usize) -> Vec<f64> {
        self(ring_count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub radius: f64,
    pub count: usize,
    pub offset: f64,
}

/// `floor(N/2) + 1` rings with `2N + 5 - 4i` equispaced nodes on ring `i`;
/// `J_N` points in total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularPointSet {
    degree: usize,
    rings: Vec<Ring>,
    points: Vec<PolarPoint>,
}

/// Node count `2N + 5 - 4i` of ring `i` (1-based).
pub fn ring_node_count(degree: usize, ring: usize) -> usize {
    2 * degree + 5 - 4 * ring
}

pub fn ring_count(degree: usize) -> usize {
    degree / 2 + 1
}

impl RegularPointSet {
    pub fn new(degree: usize, radii: &dyn RadiiStrategy) -> Result<Self> {
        let k = ring_count(degree);
        let lambda = radii.radii(k);
        if lambda.len() != k {
            return Err(Error::InvalidParameter(format!(
                "radii strategy returned {} radii for {k} rings",
                lambda.len()
            )));
        }
        if lambda.iter().any(|&r| !(0.0..1.0).contains(&r))
            || lambda.windows(2).any(|w| w[0] <= w[1])
        {
            return Err(Error::InvalidParameter(
                "ring radii must be strictly decreasing inside [0, 1)".into(),
            ));
        }
        let mut rings = Vec::with_capacity(k);
        let mut points = Vec::with_capacity(basis_len(degree));
        for (i, &radius) in (1..=k).zip(&lambda) {
            let count = ring_node_count(degree, i);
            let offset = (i - 1) as f64 * PI / count as f64;
            for l in 0..count {
                points.push(PolarPoint::new(
                    radius,
                    offset + TAU * l as f64 / count as f64,
                )?);
            }
            rings.push(Ring {
                radius,
                count,
                offset,
            });
        }
        debug_assert_eq!(points.len(), basis_len(degree));
        Ok(Self {
            degree,
            rings,
            points,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn points(&self) -> &[PolarPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(out, &self.points)
    }
}

/// Regular points with [`ChebyshevRadii`].
pub fn regular_points(degree: usize) -> RegularPointSet {
    RegularPointSet::new(degree, &ChebyshevRadii)
        .expect("Chebyshev radii are strictly decreasing in (0, 1)")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    RandomSubset { seed: u64 },
    ApproximateFekete,
    Explicit,
}

/// Wavelet parameter points: distinct points of the closed disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPointSet {
    points: Vec<PolarPoint>,
    provenance: Provenance,
}

impl ParameterPointSet {
    /// Validates membership in the disk and pairwise distinctness.
    pub fn new(points: Vec<PolarPoint>, provenance: Provenance) -> Result<Self> {
        let points = points
            .into_iter()
            .map(|p| PolarPoint::new(p.r, p.phi))
            .collect::<Result<Vec<_>>>()?;
        if let Some(index) = first_duplicate(&points) {
            return Err(Error::DuplicatePoint { index });
        }
        Ok(Self { points, provenance })
    }

    /// Skips the duplicate check; used to build deliberately degenerate sets.
    pub fn new_unchecked(points: Vec<PolarPoint>, provenance: Provenance) -> Self {
        Self { points, provenance }
    }

    pub fn points(&self) -> &[PolarPoint] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_points_csv(out, &self.points)
    }
}

fn first_duplicate(points: &[PolarPoint]) -> Option<usize> {
    (1..points.len()).find(|&i| {
        points[..i]
            .iter()
            .any(|q| q.distance(points[i]) <= DUPLICATE_TOLERANCE)
    })
}

/// `j,rho,theta` with 0-based `j` and 17 significant digits.
pub fn write_points_csv<W: Write>(mut out: W, points: &[PolarPoint]) -> Result<()> {
    writeln!(out, "j,rho,theta")?;
    for (j, p) in points.iter().enumerate() {
        writeln!(out, "{j},{:.16e},{:.16e}", p.r, p.phi)?;
    }
    Ok(())
}

/// Uniform sample of `size` points without replacement, in source order.
/// Deterministic for a given seed.
pub fn random_subset(source: &[PolarPoint], size: usize, seed: u64) -> Result<ParameterPointSet> {
    if size > source.len() {
        return Err(Error::SubsetTooLarge {
            requested: size,
            available: source.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, source.len(), size).into_vec();
    chosen.sort_unstable();
    ParameterPointSet::new(
        chosen.into_iter().map(|i| source[i]).collect(),
        Provenance::RandomSubset { seed },
    )
}

/// Rows `Z_l(p_i)` for `l` in `range`, one row per point.
pub fn block_vandermonde(points: &[PolarPoint], range: Range<usize>) -> DMatrix<Complex64> {
    let degree =
        crate::zernike::ZernikeIndex::from_single(range.end.saturating_sub(1)).n() as usize;
    let table = ZernikeTable::new(degree);
    let cols = range.len();
    let mut m = DMatrix::zeros(points.len(), cols);
    for (i, &p) in points.iter().enumerate() {
        for (l, z) in table
            .complex_block(p, range.clone())
            .into_iter()
            .enumerate()
        {
            m[(i, l)] = z;
        }
    }
    m
}

/// Relative threshold below which a residual row counts as dependent.
const PIVOT_TOLERANCE: f64 = 1e-10;

/// Number of `V <- V R^{-1}` sweeps applied before pivoting.
const REFINEMENT_SWEEPS: usize = 2;

/// Greedy selection of `target` candidates nearly maximizing
/// `|det|` of the square Vandermonde block over the basis indices in
/// `range`.
///
/// The Vandermonde columns are first orthonormalized by a few QR sweeps,
/// then rows are chosen by repeatedly taking the largest residual row and
/// projecting it out of the others (column-pivoted QR on the transpose).
pub fn approximate_fekete(
    candidates: &[PolarPoint],
    range: Range<usize>,
    target: usize,
) -> Result<ParameterPointSet> {
    if target > candidates.len() {
        return Err(Error::SubsetTooLarge {
            requested: target,
            available: candidates.len(),
        });
    }
    if target > range.len() {
        return Err(Error::InvalidParameter(format!(
            "cannot pick {target} points for {} basis functions",
            range.len()
        )));
    }
    let mut v = block_vandermonde(candidates, range);
    // refinement needs a tall, full-rank V; otherwise pivot on V as is
    for _ in 0..REFINEMENT_SWEEPS {
        if v.nrows() < v.ncols() {
            break;
        }
        let r = v.clone().qr().r();
        let diag: Vec<f64> = r.diagonal().iter().map(|c| c.norm()).collect();
        let max = diag.iter().copied().fold(0.0, f64::max);
        if diag.iter().any(|&d| d <= PIVOT_TOLERANCE * max) {
            break;
        }
        match r.adjoint().solve_lower_triangular(&v.adjoint()) {
            Some(x) => v = x.adjoint(),
            None => break,
        }
    }
    let mut rows = select_rows(&v, target)?;
    rows.sort_unstable();
    ParameterPointSet::new(
        rows.into_iter().map(|i| candidates[i]).collect(),
        Provenance::ApproximateFekete,
    )
}

fn select_rows(v: &DMatrix<Complex64>, target: usize) -> Result<Vec<usize>> {
    let mut work: Vec<Vec<Complex64>> = v.row_iter().map(|r| r.iter().copied().collect()).collect();
    let mut norms: Vec<f64> = work.iter().map(|r| norm(r)).collect();
    let scale = norms.iter().copied().fold(0.0, f64::max);
    let mut taken = vec![false; work.len()];
    let mut chosen = Vec::with_capacity(target);
    while chosen.len() < target {
        let best = (0..work.len())
            .filter(|&i| !taken[i])
            .max_by(|&a, &b| norms[a].total_cmp(&norms[b]))
            .expect("target does not exceed candidate count");
        if norms[best] <= PIVOT_TOLERANCE * scale {
            return Err(Error::RankDeficient {
                found: chosen.len(),
                needed: target,
            });
        }
        taken[best] = true;
        chosen.push(best);
        let q: Vec<Complex64> = work[best].iter().map(|c| c / norms[best]).collect();
        for i in 0..work.len() {
            if taken[i] {
                continue;
            }
            // two Gram-Schmidt passes keep the residuals orthogonal to q
            for _ in 0..2 {
                let dot: Complex64 = work[i].iter().zip(&q).map(|(a, b)| a * b.conj()).sum();
                for (a, b) in work[i].iter_mut().zip(&q) {
                    *a -= dot * b;
                }
            }
            norms[i] = norm(&work[i]);
        }
    }
    Ok(chosen)
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Singular-value condition number of a matrix; infinite when singular.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wavelet_range(level: usize) -> Range<usize> {
        basis_len(level)..basis_len(2 * level)
    }

    #[test]
    fn ring_layout_examples() {
        let p3 = regular_points(3);
        let counts: Vec<_> = p3.rings().iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![7, 3]);
        assert_eq!(p3.len(), 10);
        let p8 = regular_points(8);
        let counts: Vec<_> = p8.rings().iter().map(|r| r.count).collect();
        assert_eq!(counts, vec![17, 13, 9, 5, 1]);
        assert_eq!(p8.len(), 45);
    }

    #[test]
    fn totals_match_dimension() {
        for n in 0..=100 {
            let total: usize = (1..=ring_count(n)).map(|i| ring_node_count(n, i)).sum();
            assert_eq!(total, basis_len(n));
        }
        for n in 0..=30 {
            assert_eq!(regular_points(n).len(), basis_len(n));
        }
    }

    #[test]
    fn radii_strictly_decreasing() {
        for n in 0..=30 {
            let set = regular_points(n);
            let radii: Vec<_> = set.rings().iter().map(|r| r.radius).collect();
            assert!(radii.iter().all(|&r| (0.0..1.0).contains(&r)));
            assert!(radii.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn custom_radii_strategy() {
        let linear = |k: usize| {
            (0..k)
                .map(|i| 0.9 - 0.8 * i as f64 / k as f64)
                .collect::<Vec<_>>()
        };
        let set = RegularPointSet::new(4, &linear).unwrap();
        assert_eq!(set.rings()[0].radius, 0.9);
        let bad = |k: usize| vec![0.5; k];
        assert!(RegularPointSet::new(4, &bad).is_err());
    }

    #[test]
    fn random_subset_determinism() {
        let source = regular_points(6);
        let a = random_subset(source.points(), 18, 7).unwrap();
        let b = random_subset(source.points(), 18, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 18);
        for seed in 0..5u64 {
            let x = random_subset(source.points(), 18, 2 * seed).unwrap();
            let y = random_subset(source.points(), 18, 2 * seed + 1).unwrap();
            assert_ne!(x.points(), y.points());
        }
        assert!(matches!(
            random_subset(source.points(), 29, 0),
            Err(Error::SubsetTooLarge { .. })
        ));
    }

    #[test]
    fn duplicates_rejected() {
        let p = PolarPoint::new(0.5, 1.0).unwrap();
        let err = ParameterPointSet::new(
            vec![p, PolarPoint::new(0.3, 0.0).unwrap(), p],
            Provenance::Explicit,
        );
        assert!(matches!(err, Err(Error::DuplicatePoint { index: 2 })));
    }

    #[test]
    fn fekete_selection_is_nonsingular_subset() {
        let candidates = regular_points(6);
        let chosen = approximate_fekete(candidates.points(), wavelet_range(3), 18).unwrap();
        assert_eq!(chosen.len(), 18);
        assert!(chosen
            .points()
            .iter()
            .all(|p| candidates.points().contains(p)));
        let block = block_vandermonde(chosen.points(), wavelet_range(3));
        assert!(block.clone().determinant().norm() > 0.0);
        assert!(condition_number(&block).is_finite());
    }

    #[test]
    fn fekete_beats_median_random_subset() {
        for level in 1..=5 {
            let candidates = regular_points(2 * level);
            let d = wavelet_range(level).len();
            let fekete = approximate_fekete(candidates.points(), wavelet_range(level), d).unwrap();
            let fekete_cond =
                condition_number(&block_vandermonde(fekete.points(), wavelet_range(level)));
            let mut conds: Vec<f64> = (0..20)
                .map(|seed| {
                    let s = random_subset(candidates.points(), d, seed).unwrap();
                    condition_number(&block_vandermonde(s.points(), wavelet_range(level)))
                })
                .collect();
            conds.sort_by(f64::total_cmp);
            let median = 0.5 * (conds[9] + conds[10]);
            assert!(
                fekete_cond <= median,
                "level {level}: {fekete_cond} vs {median}"
            );
        }
    }

    #[test]
    fn fekete_full_selection_returns_all() {
        let candidates = regular_points(2);
        let chosen = approximate_fekete(candidates.points(), 0..6, 6).unwrap();
        assert_eq!(chosen.points(), candidates.points());
    }

    #[test]
    fn fekete_reports_rank_deficiency() {
        let p = PolarPoint::new(0.5, 0.0).unwrap();
        let same = [p, PolarPoint::new(0.5, 0.0).unwrap()];
        assert!(matches!(
            approximate_fekete(&same, 0..3, 2),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        regular_points(1).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "j,rho,theta");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("0,"));
    }
}
