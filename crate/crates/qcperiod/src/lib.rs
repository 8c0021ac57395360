//! Exact-arithmetic toolkit for the period map of the quantum cohomology of
//! the projective plane.
//!
//! The crate computes, over exact coefficient rings, the objects attached to
//! the small and big quantum cohomology of P²:
//!
//! * the genus-0 Gromov–Witten potential and the degree-d plane curve counts
//!   ([`gw`]),
//! * Eisenstein series, quasi-modular polynomials and their Ramanujan
//!   calculus, theta constants, and the modular J-series ([`modular`],
//!   [`qmpoly`]),
//! * the ₃F₂/₂F₁ hypergeometric bases at x = ∞, their symmetric-square
//!   relation, and the connection matrix to the integral structure
//!   ([`hypergeom`]),
//! * the extended reflection group acting on H*(P²) and its identification
//!   with PSL₂(ℤ) × {±1} ([`monodromy`]),
//! * the second structure connection, the associated third-order operator in
//!   Q∂_Q, and its hypergeometric reduction ([`connection`]),
//! * the perturbative inversion of the period map whose Taylor coefficients
//!   are quasi-modular forms ([`inversion`]).
//!
//! Everything downstream of a numeric boundary is exact: rationals, Gaussian
//! rationals, Laurent polynomials in the formal symbol ι (standing for 2πi),
//! truncated series with explicit truncation orders, and sparse polynomials
//! in E₂, E₄, E₆. Floating point appears only in [`bigfloat`], behind
//! explicit-precision big floats used for the numeric cross-checks.

pub mod bigfloat;
pub mod cli;
pub mod connection;
pub mod gw;
pub mod hypergeom;
pub mod inversion;
pub mod mat;
pub mod modular;
pub mod monodromy;
pub mod poly2;
pub mod qmpoly;
pub mod scalar;
pub mod series;

pub use scalar::{IotaScalar, Pi2Poly, QGauss, Rat, Scalar};
pub use series::TruncatedSeries;
