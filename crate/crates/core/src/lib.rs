//! gltkit: constructions and exact/empirical checks for multilevel block
//! Toeplitz matrices, diagonal sampling matrices and generalized locally
//! Toeplitz (GLT) sequences under tensor (Kronecker) products.
//!
//! The crate is organised bottom-up:
//!
//! * [`multiindex`] fixes the lexicographic layout of every multilevel matrix;
//! * [`densela`] is the dense complex kernel (Kronecker products, spectra);
//! * [`shuffle`] builds the perfect shuffle `P`, the recursive `Γ(σ)` and the
//!   interleaving `Π` permutations and applies them by pure reindexing;
//! * [`symbols`] represents trigonometric polynomials, coefficient functions
//!   and separable GLT symbols;
//! * [`toeplitz`], [`sampling`] and [`glt`] build the structured matrices and
//!   check the tensor-product identities;
//! * [`asymptotics`] and [`acs`] provide finite-n surrogates for singular
//!   value / eigenvalue distributions, sparse unboundedness and approximating
//!   classes of sequences;
//! * [`fem`] assembles B-spline Galerkin matrices for the Poisson problem;
//! * [`batteries`] and [`experiment`] drive randomized verification runs.
//!
//! Multi-indices and permutations use 1-based indices in their public API.
//! Matrix entries are addressed 0-based.

pub mod acs;
pub mod asymptotics;
pub mod batteries;
pub mod densela;
mod error;
pub mod experiment;
pub mod fem;
pub mod glt;
pub mod multiindex;
pub mod parallel;
pub mod rng;
pub mod sampling;
pub mod shuffle;
pub mod symbols;
pub mod toeplitz;

pub use error::{Error, ParseError, Result};
pub use num_complex::Complex64;

pub use asymptotics::{MatrixFamily, Mode, TestBattery, TestFn};
pub use densela::ComplexMatrix;
pub use multiindex::MultiIndex;
pub use shuffle::Permutation;
pub use symbols::{CoeffFn, GltSymbol, Symbol, TrigPoly};
