//! Exact scalars (ℚ and 𝔽_p) and dense exact linear algebra.
//!
//! Over ℚ elimination is fraction-free on primitive integer rows; over 𝔽_p it is plain
//! Gauss–Jordan. Pivoting is deterministic: columns left to right, the first row (in
//! the given order) with a nonzero entry becomes the pivot.

mod matrix;
mod scalar;

pub use matrix::{kernel_basis, normalize_leading_one, rank_profile, ExactMatrix, Rref, RowEchelon};
pub use scalar::{is_prime_u64, Field, Scalar};
pub use scalar::parse_rational;
