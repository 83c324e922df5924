//! Dyadic ladder `V_N = V_0 (+) W_0 (+) W_1 (+) W_2 (+) W_4 (+) ... (+) W_{N/2}`
//! and block-wise wavelet expansions over it.

use std::io::Write;
use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::point::PolarPoint;
use crate::sampling::regular_points;
use crate::wavelet::{
    dual_build, independence_gate, wavelet_block, wavelet_build, wavelet_coefficients,
    wavelet_parameters, DualWaveletBasis, GateReport, PointStrategy, WaveletBasis,
};
use crate::zernike::{
    basis_len, complex_norm, DiskPolynomial, RadialPolynomial, ZernikeIndex, ZernikeTable,
};

/// One slot of the ladder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    /// `V_0`, the constants.
    Scaling,
    /// `W_M`.
    Wavelet(usize),
}

impl Level {
    /// `-1` for `V_0`, `M` for `W_M`.
    pub fn label(self) -> i64 {
        match self {
            Level::Scaling => -1,
            Level::Wavelet(m) => m as i64,
        }
    }

    pub fn range(self) -> Range<usize> {
        match self {
            Level::Scaling => 0..1,
            Level::Wavelet(m) => wavelet_block(m),
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::Scaling => write!(f, "V_0"),
            Level::Wavelet(m) => write!(f, "W_{m}"),
        }
    }
}

/// Levels `[V_0, W_0, W_1, W_2, W_4, ..., W_{N/2}]` for `N` a power of two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MraLadder {
    degree: usize,
    levels: Vec<Level>,
}

impl MraLadder {
    pub fn new(degree: usize) -> Result<Self> {
        if !degree.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(degree));
        }
        let mut levels = vec![Level::Scaling, Level::Wavelet(0)];
        let mut m = 1;
        while m < degree {
            levels.push(Level::Wavelet(m));
            m *= 2;
        }
        Ok(Self { degree, levels })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Wavelet levels `M` in ladder order.
    pub fn wavelet_levels(&self) -> impl Iterator<Item = usize> + '_ {
        self.levels.iter().filter_map(|l| match l {
            Level::Wavelet(m) => Some(*m),
            Level::Scaling => None,
        })
    }

    pub fn ranges(&self) -> Vec<Range<usize>> {
        self.levels.iter().map(|l| l.range()).collect()
    }

    pub fn dimensions(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.range().len()).collect()
    }

    /// The ranges are disjoint, contiguous and cover `0..J_N`.
    pub fn is_partition(&self) -> bool {
        let mut next = 0;
        for r in self.ranges() {
            if r.start != next || r.end <= r.start {
                return false;
            }
            next = r.end;
        }
        next == basis_len(self.degree)
    }
}

/// Wavelet basis, dual and gate outcome of one level.
#[derive(Debug, Clone)]
pub struct LevelBasis {
    pub basis: WaveletBasis,
    pub dual: DualWaveletBasis,
    pub gate: GateReport,
}

/// Wavelet bases for every level of a ladder.
#[derive(Debug, Clone)]
pub struct MultiscaleBasis {
    ladder: MraLadder,
    strategy: PointStrategy,
    levels: Vec<LevelBasis>,
}

impl MultiscaleBasis {
    /// With [`PointStrategy::Random`], each level draws its own seed from a
    /// stream seeded by the given seed, in ladder order.
    pub fn build(degree: usize, strategy: PointStrategy) -> Result<Self> {
        let ladder = MraLadder::new(degree)?;
        let wavelet_levels: Vec<usize> = ladder.wavelet_levels().collect();
        let strategies: Vec<PointStrategy> = match strategy {
            PointStrategy::Fekete => vec![PointStrategy::Fekete; wavelet_levels.len()],
            PointStrategy::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                wavelet_levels
                    .iter()
                    .map(|_| PointStrategy::Random {
                        seed: rng.next_u64(),
                    })
                    .collect()
            }
        };
        let levels = wavelet_levels
            .par_iter()
            .zip(strategies.par_iter())
            .map(|(&m, &s)| {
                let basis = wavelet_build(m, wavelet_parameters(m, s)?)?;
                let gate = independence_gate(&basis)?;
                let dual = dual_build(&basis)?;
                Ok(LevelBasis { basis, dual, gate })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            ladder,
            strategy,
            levels,
        })
    }

    pub fn ladder(&self) -> &MraLadder {
        &self.ladder
    }

    pub fn degree(&self) -> usize {
        self.ladder.degree
    }

    pub fn strategy(&self) -> PointStrategy {
        self.strategy
    }

    /// Per-wavelet-level bases in ladder order.
    pub fn levels(&self) -> &[LevelBasis] {
        &self.levels
    }

    /// Number of functions: the constant plus every wavelet.
    pub fn function_count(&self) -> usize {
        1 + self
            .levels
            .iter()
            .map(|l| l.basis.dimension())
            .sum::<usize>()
    }
}

/// Orthogonal projection onto `V_N`: truncation to `J_N` coefficients.
pub fn project_onto_vn(f: &DiskPolynomial, degree: usize) -> DiskPolynomial {
    f.project(degree)
}

/// Analysis coefficients of one wavelet level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCoefficients {
    pub level: usize,
    /// `<f_M, psi_{M,j}>`.
    pub coeffs: Vec<Complex64>,
}

impl LevelCoefficients {
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `f = c_0 Z_0 + sum_M sum_j <f_M, psi_{M,j}> psi~_{M,j}`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    scaling: Complex64,
    levels: Vec<LevelCoefficients>,
    bases: Arc<MultiscaleBasis>,
}

/// One coefficient with its location, as reported by
/// [`Decomposition::entries`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientEntry {
    pub level: Level,
    pub slot: usize,
    /// Parameter point; `None` for the `V_0` coefficient.
    pub point: Option<PolarPoint>,
    pub value: Complex64,
}

impl Decomposition {
    pub fn zeros(bases: Arc<MultiscaleBasis>) -> Self {
        let levels = bases
            .levels
            .iter()
            .map(|l| LevelCoefficients {
                level: l.basis.level(),
                coeffs: vec![Complex64::new(0.0, 0.0); l.basis.dimension()],
            })
            .collect();
        Self {
            scaling: Complex64::new(0.0, 0.0),
            levels,
            bases,
        }
    }

    pub fn degree(&self) -> usize {
        self.bases.degree()
    }

    pub fn scaling(&self) -> Complex64 {
        self.scaling
    }

    pub fn set_scaling(&mut self, value: Complex64) {
        self.scaling = value;
    }

    pub fn levels(&self) -> &[LevelCoefficients] {
        &self.levels
    }

    pub fn levels_mut(&mut self) -> &mut [LevelCoefficients] {
        &mut self.levels
    }

    pub fn bases(&self) -> &Arc<MultiscaleBasis> {
        &self.bases
    }

    /// Total coefficient count, `J_N`.
    pub fn len(&self) -> usize {
        1 + self.levels.iter().map(|l| l.coeffs.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Every coefficient, `V_0` first, then levels in ladder order.
    pub fn entries(&self) -> Vec<CoefficientEntry> {
        let mut out = vec![CoefficientEntry {
            level: Level::Scaling,
            slot: 0,
            point: None,
            value: self.scaling,
        }];
        for (lc, lb) in self.levels.iter().zip(&self.bases.levels) {
            let points = lb.basis.parameters().points();
            out.extend(
                lc.coeffs
                    .iter()
                    .enumerate()
                    .map(|(slot, &value)| CoefficientEntry {
                        level: Level::Wavelet(lc.level),
                        slot,
                        point: Some(points[slot]),
                        value,
                    }),
            );
        }
        out
    }

    /// The `k` wavelet coefficients of largest modulus, largest first.
    pub fn top_wavelet_coefficients(&self, k: usize) -> Vec<CoefficientEntry> {
        let mut entries: Vec<_> = self
            .entries()
            .into_iter()
            .filter(|e| e.point.is_some())
            .collect();
        entries.sort_by(|a, b| b.value.norm().total_cmp(&a.value.norm()));
        entries.truncate(k);
        entries
    }

    /// `level,slot,mu,omega,re,im`; the `V_0` row has level `-1` and empty
    /// point fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "level,slot,mu,omega,re,im")?;
        for e in self.entries() {
            match e.point {
                Some(p) => writeln!(
                    out,
                    "{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
                    e.level.label(),
                    e.slot,
                    p.r,
                    p.phi,
                    e.value.re,
                    e.value.im
                )?,
                None => writeln!(
                    out,
                    "{},{},,,{:.16e},{:.16e}",
                    e.level.label(),
                    e.slot,
                    e.value.re,
                    e.value.im
                )?,
            }
        }
        Ok(())
    }
}

/// Splits `P_N f` by ladder blocks and expands each wavelet block in its
/// basis.
pub fn decompose(f: &DiskPolynomial, bases: &Arc<MultiscaleBasis>) -> Decomposition {
    let projected = project_onto_vn(f, bases.degree());
    let levels = bases
        .levels
        .par_iter()
        .map(|l| LevelCoefficients {
            level: l.basis.level(),
            coeffs: wavelet_coefficients(&projected, &l.basis),
        })
        .collect();
    Decomposition {
        scaling: projected.coeff(0),
        levels,
        bases: Arc::clone(bases),
    }
}

/// Reassembles `c_0 Z_0 + sum_M sum_j c_{M,j} psi~_{M,j}` in `V_N`.
pub fn reconstruct(d: &Decomposition) -> DiskPolynomial {
    let degree = d.degree();
    let mut out = DiskPolynomial::zeros(degree);
    out.coeffs_mut()[0] = d.scaling;
    for (lc, lb) in d.levels.iter().zip(&d.bases.levels) {
        let part = lb.dual.reconstruct(&lc.coeffs);
        let range = lb.dual.range();
        out.coeffs_mut()[range.clone()].copy_from_slice(&part.coeffs()[range]);
    }
    out
}

/// Dense polynomial in `z` and `zbar`: `coeffs[a][b]` multiplies
/// `z^a zbar^b`.
#[derive(Debug, Clone)]
struct ConjugatePoly {
    coeffs: Vec<Vec<Complex64>>,
}

impl ConjugatePoly {
    fn zeros(degree: usize) -> Self {
        Self {
            coeffs: vec![vec![Complex64::new(0.0, 0.0); degree + 1]; degree + 1],
        }
    }

    fn one(degree: usize) -> Self {
        let mut p = Self::zeros(degree);
        p.coeffs[0][0] = Complex64::new(1.0, 0.0);
        p
    }

    fn capacity(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Product truncated to total degree `capacity`; inputs here never exceed it.
    fn mul(&self, other: &ConjugatePoly) -> ConjugatePoly {
        let cap = self.capacity();
        let mut out = Self::zeros(cap);
        for a in 0..=cap {
            for b in 0..=cap - a {
                let x = self.coeffs[a][b];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..=cap - a - b {
                    for d in 0..=cap - a - b - c {
                        out.coeffs[a + c][b + d] += x * other.coeffs[c][d];
                    }
                }
            }
        }
        out
    }

    fn from_zernike(p: &DiskPolynomial, capacity: usize) -> Self {
        let mut out = Self::zeros(capacity);
        for (j, &c) in p.coeffs().iter().enumerate() {
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let idx = ZernikeIndex::from_single(j);
            let n = idx.n() as i64;
            let m = idx.m() as i64;
            let radial = RadialPolynomial::new(idx.n(), idx.m_abs());
            let scale = c * complex_norm(idx.n());
            // c_s multiplies r^{n-2s} e^{i m phi} = z^{(p+m)/2} zbar^{(p-m)/2}
            for (s, &cs) in radial.coefficients().iter().enumerate() {
                let power = n - 2 * s as i64;
                let a = ((power + m) / 2) as usize;
                let b = ((power - m) / 2) as usize;
                out.coeffs[a][b] += scale * cs;
            }
        }
        out
    }

    fn to_zernike(&self, degree: usize) -> DiskPolynomial {
        let mut out = DiskPolynomial::zeros(degree);
        let cap = self.capacity();
        for a in 0..=cap {
            for b in 0..=cap - a {
                let c = self.coeffs[a][b];
                if c == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let power = (a + b) as u32;
                let m = a as i64 - b as i64;
                for (n, e) in power_in_radial_basis(power, m.unsigned_abs() as u32) {
                    let idx =
                        ZernikeIndex::new(n as i64, m).expect("parity follows from the monomial");
                    out.coeffs_mut()[idx.single()] += c * (e / complex_norm(n));
                }
            }
        }
        out
    }
}

/// `r^p = sum_n e_n R_n^{m}(r)` over `n = m, m+2, ..., p`, by back
/// substitution on leading coefficients.
fn power_in_radial_basis(p: u32, m_abs: u32) -> Vec<(u32, f64)> {
    // residual[k] multiplies r^{m_abs + 2k}
    let top = ((p - m_abs) / 2) as usize;
    let mut residual = vec![0.0; top + 1];
    residual[top] = 1.0;
    let mut out = Vec::with_capacity(top + 1);
    for k in (0..=top).rev() {
        let n = m_abs + 2 * k as u32;
        let radial = RadialPolynomial::new(n, m_abs);
        let coeffs = radial.coefficients();
        let e = residual[k] / coeffs[0];
        for (s, &cs) in coeffs.iter().enumerate() {
            residual[k - s] -= e * cs;
        }
        out.push((n, e));
    }
    out
}

/// `q(x, y) = p(x^2, y^2)` in `V_{2 deg p}`.
pub fn dilate(p: &DiskPolynomial) -> DiskPolynomial {
    let degree = p.degree();
    let target = 2 * degree;
    let source = ConjugatePoly::from_zernike(p, target);
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    // x^2 + i y^2 and x^2 - i y^2 in terms of z and zbar
    let mut u = ConjugatePoly::zeros(target);
    let mut v = ConjugatePoly::zeros(target);
    if target >= 2 {
        u.coeffs[2][0] = (one - i) / 4.0;
        u.coeffs[1][1] = (one + i) / 2.0;
        u.coeffs[0][2] = (one - i) / 4.0;
        v.coeffs[2][0] = (one + i) / 4.0;
        v.coeffs[1][1] = (one - i) / 2.0;
        v.coeffs[0][2] = (one + i) / 4.0;
    }
    let mut u_pow = vec![ConjugatePoly::one(target)];
    let mut v_pow = vec![ConjugatePoly::one(target)];
    for k in 1..=degree {
        u_pow.push(u_pow[k - 1].mul(&u));
        v_pow.push(v_pow[k - 1].mul(&v));
    }
    let mut q = ConjugatePoly::zeros(target);
    for (a, u_a) in u_pow.iter().enumerate() {
        for (b, v_b) in v_pow.iter().enumerate().take(degree - a + 1) {
            let c = source.coeffs[a][b];
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let term = u_a.mul(v_b);
            for (row_q, row_t) in q.coeffs.iter_mut().zip(&term.coeffs) {
                for (x, y) in row_q.iter_mut().zip(row_t) {
                    *x += c * y;
                }
            }
        }
    }
    q.to_zernike(target)
}

/// Relative tolerance used by [`dilation_check`].
pub const DILATION_TOLERANCE: f64 = 1e-9;

/// Whether `p(x^2, y^2)` is represented by an element of `V_{2 deg p}`:
/// the dilated polynomial is compared with direct substitution at the
/// regular points of degree `2 deg p + 2`.
pub fn dilation_check(p: &DiskPolynomial) -> bool {
    let q = dilate(p);
    let table_p = ZernikeTable::new(p.degree());
    let table_q = ZernikeTable::new(q.degree());
    let scale = p.norm().max(f64::MIN_POSITIVE);
    regular_points(q.degree() + 2).points().iter().all(|&pt| {
        let (x, y) = pt.to_cartesian();
        let sub = PolarPoint::from_cartesian(x * x, y * y).expect("x^2 + y^2 <= 1 on the disk");
        let expected = p.eval_with(&table_p, sub);
        (q.eval_with(&table_q, pt) - expected).norm() <= DILATION_TOLERANCE * scale
    })
}
