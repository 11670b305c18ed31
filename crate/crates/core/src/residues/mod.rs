//! Exact arithmetic mod `q` and the Dirichlet character group.

pub mod arith;
pub mod character;
pub mod cyclo;
pub mod group;

pub use arith::{gcd, lcm, mod_inv, reduce, Factorization};
pub use character::{AngleTable, DirichletCharacter, ZERO_VALUE};
pub use cyclo::{e, Angle, CycloSum, RootTable};
pub use group::{UnitGroup, MAX_MODULUS};

use num_complex::Complex64;

/// Complex values crossing module boundaries.
pub type ComplexValue = Complex64;

/// Relative rounding budget per summed unimodular term.
pub const TERM_TOLERANCE: f64 = 1e-10;

/// Absolute tolerance for a sum of `terms` values each bounded by `magnitude`.
///
/// Rounding error grows at most linearly in the number of terms, so the
/// budget does too.
pub fn sum_tolerance(terms: f64, magnitude: f64) -> f64 {
    TERM_TOLERANCE * terms.max(1.0) * magnitude.max(1.0)
}

/// `|a - b| ≤ tol`, treating any non-finite input as a mismatch.
pub fn close(a: ComplexValue, b: ComplexValue, tol: f64) -> bool {
    a.is_finite() && b.is_finite() && (a - b).norm() <= tol
}
