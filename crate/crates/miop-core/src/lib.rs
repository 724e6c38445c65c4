//! Multi-indexed Wilson and Askey-Wilson orthogonal polynomials in arbitrary
//! precision.
//!
//! This crate constructs the classical Wilson (continuous variable, gamma
//! function weight) and Askey-Wilson (trigonometric variable, q-product
//! weight) orthogonal polynomials, and their multi-indexed deformations
//! obtained by deleting finite sets of type-I / type-II virtual states
//! through Casoratian (discrete Wronskian) determinants.
//!
//! Layering, bottom up:
//!
//! - [`num`]: arbitrary-precision scalars, complex gamma function,
//!   Pochhammer and q-Pochhammer symbols.
//! - [`poly`]: dense polynomials in the sinusoidal coordinate eta(x),
//!   interpolation from samples, real-zero counting, and zero counting in
//!   complex rectangles by the argument principle.
//! - [`classical`]: the two base families - potential function, energies,
//!   polynomial series, ground-state weight, shift operators, and the
//!   square-root-free second-order difference operator.
//! - [`virtual_states`]: parameter twists, virtual-state polynomials and
//!   energies, admissible deletion labels, and parameter validation.
//! - [`casoratian`]: determinant machinery - shifted sample grids,
//!   Casoratians, single-row factors, auxiliary phi_M products, and the
//!   polynomial-entry matrices whose determinants define the deformed
//!   polynomials pointwise.
//! - [`multi`]: assembled multi-indexed systems - the denominator polynomial
//!   Xi_D, the polynomials P_{D,n}, deformed potential, norms, shift and
//!   difference operators, and the algebraic-identity checks.
//! - [`verify`]: Gauss-Legendre quadrature on the physical interval, Gram
//!   matrices, oscillation (real-zero) checks, hermiticity scans, and
//!   machine-readable verification reports.
//!
//! All routines are deterministic and pure; precision is explicit
//! everywhere via [`num::Precision`].

pub mod casoratian;
pub mod classical;
pub mod error;
pub mod multi;
pub mod num;
pub mod poly;
pub mod verify;
pub mod virtual_states;

pub use error::{Error, Result};
pub use num::Precision;
