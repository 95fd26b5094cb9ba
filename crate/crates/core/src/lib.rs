//! Exact computer algebra for quantum-parameter algebras.
//!
//! The crate decides rigidity and cancellation properties for three families
//! of noncommutative algebras presented by generators and relations:
//!
//! * skew polynomial rings `k_{p_ij}[x1..xn]` with `x_j x_i = p_ij x_i x_j`,
//! * quantum Weyl algebras `k<x,y>/(xy - q yx - 1)` at a root of unity `q`,
//! * finite tensor products of the above.
//!
//! All arithmetic is exact: scalars live in cyclotomic fields `Q(zeta_m)`
//! represented in the power basis, exponent bookkeeping runs over
//! arbitrary-precision integer lattices, and polynomial determinants use
//! fraction-free elimination. On top of the kernels sit the analyses:
//! center lattices and module bases ([`center`]), trace-pairing
//! discriminants and effectiveness classification ([`discriminant`]),
//! locally nilpotent higher derivations with verification
//! ([`derivation`]), and the final cancellation verdict ([`verdict`]).
//!
//! [`ringspec`] and [`report`] fix the on-disk interchange formats used by
//! the command-line front end and the Python bindings.

pub mod center;
pub mod derivation;
pub mod discriminant;
pub mod error;
pub mod lattice;
pub mod report;
pub mod ring;
pub mod ringspec;
pub mod scalar;
pub mod verdict;

pub use error::{Error, Result};
