use nalgebra::SymmetricEigen;

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// as columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i).iter().copied().collect()
    }

    /// Rebuild `f(A) = V diag(f(λ)) V^H`.
    pub fn function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let v = &self.vectors;
        let mut scaled = v.clone();
        for (j, lam) in self.values.iter().enumerate() {
            let fj = f(*lam);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= fj);
        }
        scaled * v.adjoint()
    }
}

/// Largest entry of `|A - A^H|`.
pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.norm()))
}

/// Full spectrum of a small Hermitian matrix.
///
/// Input is accepted when `|A - A^H|` is below `1e-12 * max(1, max|A_ij|)`;
/// the Hermitian part is what gets diagonalized.
pub fn dense_hermitian_eig(a: &CMatrix) -> Result<SpectralDecomposition> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    let dev = hermitian_deviation(a);
    if dev > 1e-12 * max_abs(a).max(1.0) {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            values: vec![],
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let sym = (a + a.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition { values, vectors })
}

/// `exp(-i s A)` for Hermitian `A`.
pub fn matrix_exp_unitary(a: &CMatrix, s: f64) -> Result<CMatrix> {
    let eig = dense_hermitian_eig(a)?;
    Ok(eig.function(|lam| C64::from_polar(1.0, -s * lam)))
}
