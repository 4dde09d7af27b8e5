//! Fixtures shared by the criterion benches in `benches/`.

use gltkit::batteries::random_matrix;
use gltkit::rng::SplitMix64;
use gltkit::toeplitz::toeplitz;
use gltkit::{ComplexMatrix, MultiIndex, TrigPoly};

/// Random complex `n×n` matrix, fixed per seed.
pub fn random_square(n: usize, seed: u64) -> ComplexMatrix {
    random_matrix(&mut SplitMix64::new(seed), n, n)
}

/// `T_n(2 - 2cos θ)`, real symmetric tridiagonal.
pub fn laplacian(n: usize) -> ComplexMatrix {
    toeplitz(&MultiIndex::sizes(&[n]), &TrigPoly::laplacian()).expect("within size limits")
}

/// Hermitian `A + A*` of a random matrix.
pub fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
    let a = random_square(n, seed);
    a.add(&a.adjoint()).expect("square")
}
