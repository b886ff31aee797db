//! Dense and matrix-free linear algebra kernels.
//!
//! Everything here works on complex Hermitian problems. Large operators are
//! only ever touched through [`HermitianOperator::apply`], so callers may
//! implement them without materializing a matrix.

mod cg;
mod dense;
mod lanczos;
mod ode;
mod operator;
mod pfaffian;
mod sum;
mod tracemin;

pub use cg::{projected_cg, CgOutcome, OrthogonalProjector};
pub use dense::{
    dense_hermitian_eig, hermitian_deviation, matrix_exp_unitary, SpectralDecomposition,
};
pub use lanczos::{
    krylov_exp_step, lanczos_lowest, lanczos_lowest_with, KrylovStep, LanczosOptions,
    LanczosOutcome,
};
pub use ode::{
    integrate_evolution, integrate_state, polar_unitarize, IntegrationOutcome, OdeOptions,
};
pub use operator::{
    materialize, DenseOperator, DiagonalOperator, HermitianOperator, IdentityOperator, Shifted,
};
pub use pfaffian::{pfaffian, AntisymmetricMatrix};
pub use sum::{CompensatedSum, ComplexCompensatedSum};
pub use tracemin::{tracemin, tracemin_with, TraceminOptions, TraceminOutcome};

pub type C64 = num_complex::Complex64;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Euclidean inner product `<x, y>` (conjugate-linear in `x`).
pub fn dot(x: &[C64], y: &[C64]) -> C64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: C64, x: &mut [C64]) {
    for xi in x.iter_mut() {
        *xi *= alpha;
    }
}

/// Largest entry of `|U^H U - I|`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let g = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

pub(crate) fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn random_vector(rng: &mut impl rand::Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}
