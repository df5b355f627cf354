//! Complex linear-algebra kernel used by every estimator in the crate.
//!
//! Everything here works on `Complex64` slices. The inner product is
//! conjugate-linear in its first argument, `⟨a, z⟩ = aᴴz`, and that
//! convention is used throughout the crate.

mod cg;
mod dense_eigen;
mod eigen;
mod operator;
mod seed;
mod vector;

pub use cg::{solve_cg, CgError, CgOptions, CgSolution};
pub use dense_eigen::{hermitian_eigen, HermitianEigen};
pub use eigen::{power_iterate_extremal, EigenError, EigenMode, EigenOptions, EigenResult, EigenStrategy};
pub use operator::{DenseHermitian, HermitianOperator, ScaledIdentity};
pub use seed::{derive_trial_seed, seeded_rng, splitmix64, Stream};
pub use vector::{axpy, canonicalize_phase, dot, norm, normalize, random_unit_vector, ComplexVector, VectorError, C64};
