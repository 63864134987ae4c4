//! Exact toolkit for streams implicitly defined by polynomial equations.
//!
//! Given a system `E` of `n` polynomials in `x, y_1..y_n` and an initial
//! tuple `r0`, the pipeline verifies that `E(0, r0) = 0` and that the
//! Jacobian of partial stream derivatives is invertible at the origin,
//! derives an equivalent polynomial stream-differential system (adjoining
//! `w` for the inverse of the Jacobian determinant when necessary), and
//! generates the unique solution's coefficients as exact rationals via a
//! memoized convolution recurrence. A parallel classical route solves the
//! ordinary-differential system of the implicit function theorem as a
//! power series and serves as an independent oracle and benchmark
//! baseline.
//!
//! All arithmetic is exact; nothing here floats.

pub mod bench;
pub mod deriv;
pub mod engine;
pub mod gen;
pub mod ift;
pub mod parse;
pub mod poly;
pub mod rat;
pub mod taylor;
pub mod var;

pub use ift::{check_hypotheses, derive_pipeline, HypothesisReport, SdeSystem};
pub use parse::{parse_expr, parse_system, PolySystem};
pub use poly::{Monomial, Polynomial};
pub use rat::Rat;
pub use var::{VarId, VarOrder};
