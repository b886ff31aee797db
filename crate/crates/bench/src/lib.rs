//! Shared inputs for the kernel benchmarks.

use entadyn::numerics::AntisymmetricMatrix;
use entadyn::{CMatrix, C64};

/// Deterministic dense block with entries in `[-1, 1]`.
pub fn filled_block(rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |i, j| {
        let x = (i * 31 + j * 17) as f64;
        C64::new((0.37 * x).sin(), (0.11 * x).cos())
    })
}

pub fn filled_antisymmetric(order: usize) -> AntisymmetricMatrix {
    AntisymmetricMatrix::from_fn(order, |i, j| {
        C64::new(((i * 7 + j * 3) as f64 * 0.29).sin(), 0.1 * (i + j) as f64)
    })
    .expect("even order")
}
