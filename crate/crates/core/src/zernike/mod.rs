//! Zernike polynomials on the unit disk: indexing, evaluation, coefficient
//! arithmetic in `V_N`, and a product quadrature used for cross-checks.

mod eval;
mod index;
mod poly;
mod quadrature;
mod radial;
mod real;
mod recurrence;

pub use eval::{complex_norm, real_norm, zernike_eval, zernike_real_eval, ZernikeTable};
pub use index::{basis_len, index_pack, index_unpack, ZernikeIndex};
pub use poly::{degree_for_len, DiskPolynomial};
pub use quadrature::DiskQuadrature;
pub use radial::{radial_eval, RadialPolynomial};
pub use real::{
    complex_to_real_basis, complex_to_real_coeffs, real_basis_to_complex, real_to_complex_coeffs,
    RealCoeffs, RealTerm, CONJUGATE_TOLERANCE,
};
pub use recurrence::{recurrence_a, recurrence_b, three_term_apply, zernike_or_zero};
