//! Multiresolution analysis on the unit disk built from Zernike polynomials.

// `!(x <= limit)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fit;
pub mod kernel;
pub mod mra;
pub mod point;
pub mod sampling;
pub mod scaling;
pub mod validate;
pub mod wavelet;
pub mod zernike;

pub use error::{Error, Result};
pub use fit::{DiskSamples, FitResult, HierarchyMode, SurfaceKind, SynthParams};
pub use kernel::KernelFunction;
pub use mra::{Decomposition, Level, MraLadder, MultiscaleBasis};
pub use point::PolarPoint;
pub use sampling::{ParameterPointSet, Provenance, RegularPointSet};
pub use scaling::ScalingBasis;
pub use validate::{ValidateOptions, ValidationReport};
pub use wavelet::{DualWaveletBasis, PointStrategy, WaveletBasis};
pub use zernike::{basis_len, DiskPolynomial, RealCoeffs, ZernikeIndex};
