//! Exact computer algebra for quantized enveloping algebras `U_q(g)`, their
//! type-1 representations, quantum symmetric pair coideal subalgebras,
//! the CQG algebra of matrix coefficients, and Drinfeld double coideals.
//!
//! All core computations are carried out over the exact field of rational
//! functions in `v = q^{1/L}` (see [`exactq`]); floating point only enters
//! for positivity spot-checks and isotypic block decompositions.

pub mod exactq;
pub mod fixtures;
pub mod linalg;
pub mod cqgdual;
pub mod doublecoid;
pub mod qsympair;
pub mod quantalg;
pub mod repnlab;
pub mod rootdata;

pub use exactq::Scalar;
