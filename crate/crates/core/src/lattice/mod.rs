//! Explicit subspace-lattice engine: enumeration over prime fields,
//! incidence matrices, and exact verification of the spectral identities the
//! certificate construction relies on.

pub mod fp;
pub mod matrix;
pub mod subspace;
pub mod verify;

/// Default cap on dense matrix entries for lattice computations.
pub const DEFAULT_MAX_ENTRIES: u128 = 50_000_000;

pub use fp::{is_prime, PrimeFieldElement};
pub use matrix::{build, export_triplets, IncidenceMatrix, MatrixKind, RationalMatrix, Scope};
pub use subspace::{enumerate, intersect_dim, FpMatrix, Subspace, SubspaceLattice};
pub use verify::{
    harmonic_basis, spectrum_crosscheck, verify_identities, verify_lemmas, HarmonicBasis,
    LatticeReport, SpectrumReport,
};
