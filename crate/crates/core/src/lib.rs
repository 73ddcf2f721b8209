//! Exact algebra for matrix algebras `M_n(F_q)` under the normalized rank metric.
//!
//! Everything here is finite and exact: scalars live in `GF(p^k)`, distances are
//! rationals `rank(x - y) / n`, and every approximation argument is carried out
//! at a concrete finite stage of a tower `M_{n_0} -> M_{n_1} -> ...` with an
//! explicit certificate.
//!
//! - [`gf`]: finite fields in polynomial basis.
//! - [`matrix`]: dense matrices, the rank metric, Kronecker products, subspaces
//!   and the shift-matrix generators `a`, `b` of `M_n`.
//! - [`embeddings`]: `x -> x (x) 1`, block embeddings with padding, unital
//!   homomorphisms, Skolem-Noether conjugators and amalgamation.
//! - [`stability`]: relation defects of approximate generator pairs and the
//!   repair procedure that turns them into exact block embeddings.
//! - [`fraisse`]: towers, approximate homogeneity and extension, back-and-forth
//!   and inner approximation of automorphisms.
//! - [`ramsey`]: copy counting, the explicit Ramsey dimension bound and
//!   exhaustive oscillation search at small sizes.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod embeddings;
mod error;
pub mod fraisse;
pub mod gf;
pub mod matrix;
pub mod ramsey;
pub mod stability;

pub use error::{Error, Result};
pub use gf::{Field, FieldElement};
pub use matrix::{Matrix, RankDistance, Subspace};

/// Exact rational used for every tolerance, defect and bound.
pub type Rational = num_rational::Ratio<i64>;

/// Convenience constructor for [`Rational`].
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

/// `num/den` rendering, also for integers (`3/1`).
pub fn format_rational(r: &Rational) -> alloc::string::String {
    alloc::format!("{}/{}", r.numer(), r.denom())
}
