use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dimension of `V_N`, the polynomials of total degree at most `N`.
pub const fn basis_len(degree: usize) -> usize {
    (degree + 1) * (degree + 2) / 2
}

/// A valid Zernike index `(n, m)`: `|m| <= n` and `n - m` even.
///
/// Indices are totally ordered by the single index `j = (n(n+2) + m) / 2`,
/// which is the ordering used for every coefficient vector and matrix in
/// this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ZernikeIndex {
    n: u32,
    m: i32,
}

impl ZernikeIndex {
    pub fn new(n: i64, m: i64) -> Result<Self> {
        if Self::is_valid(n, m) {
            Ok(Self {
                n: n as u32,
                m: m as i32,
            })
        } else {
            Err(Error::InvalidIndex { n, m })
        }
    }

    pub fn is_valid(n: i64, m: i64) -> bool {
        n >= 0 && m.abs() <= n && (n - m).rem_euclid(2) == 0 && n <= u32::MAX as i64
    }

    pub fn from_single(j: usize) -> Self {
        let j = j as u64;
        let n = ((8 * j + 1).isqrt() - 1) / 2;
        let m = 2 * j as i64 - (n * (n + 2)) as i64;
        Self {
            n: n as u32,
            m: m as i32,
        }
    }

    pub fn single(self) -> usize {
        let n = self.n as i64;
        ((n * (n + 2) + self.m as i64) / 2) as usize
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn m(self) -> i32 {
        self.m
    }

    pub fn m_abs(self) -> u32 {
        self.m.unsigned_abs()
    }

    /// The index with the opposite azimuthal frequency.
    pub fn mirrored(self) -> Self {
        Self {
            n: self.n,
            m: -self.m,
        }
    }

    /// All indices with `n <= degree`, in single-index order.
    pub fn up_to(degree: usize) -> impl Iterator<Item = ZernikeIndex> {
        (0..basis_len(degree)).map(Self::from_single)
    }
}

impl fmt::Display for ZernikeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z({}, {})", self.n, self.m)
    }
}

/// `(n, m) -> j`, rejecting invalid pairs.
pub fn index_pack(n: i64, m: i64) -> Result<usize> {
    ZernikeIndex::new(n, m).map(ZernikeIndex::single)
}

/// `j -> (n, m)`.
pub fn index_unpack(j: usize) -> (u32, i32) {
    let idx = ZernikeIndex::from_single(j);
    (idx.n(), idx.m())
}
