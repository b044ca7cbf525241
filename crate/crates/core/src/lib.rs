//! Exact certificates for the maximum product |F||G| of cross-intersecting
//! families of k- and l-dimensional subspaces of F_q^n.
//!
//! The crate builds a dual semidefinite certificate in the quadratic field
//! Q(sqrt(D)), D = [n-1,k-1]_q [n-1,l-1]_q, verifies its feasibility with
//! exact sign computations, cross-checks every spectral identity it relies on
//! against explicitly enumerated subspace lattices over small prime fields,
//! and certifies tightness against the extremal one-point-star families.

pub mod certificate;
pub mod cli;
pub mod error;
pub mod exactnum;
pub mod families;
pub mod lattice;
pub mod report;
pub mod spectrum;

pub use error::{Error, Result};
