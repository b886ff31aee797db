use super::{CMatrix, C64};

/// A Hermitian linear operator known only through its action on vectors.
///
/// Implementations must be deterministic and safe to call concurrently.
pub trait HermitianOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x` for a single vector.
    fn apply_into(&self, x: &[C64], y: &mut [C64]);

    /// Operator applied to every column of `x`.
    fn apply(&self, x: &CMatrix) -> CMatrix {
        let n = self.dim();
        assert_eq!(x.nrows(), n, "operator dimension mismatch");
        let mut y = CMatrix::zeros(n, x.ncols());
        for (xc, yc) in x.as_slice().chunks(n).zip(y.as_mut_slice().chunks_mut(n)) {
            self.apply_into(xc, yc);
        }
        y
    }

    fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim()];
        self.apply_into(x, &mut y);
        y
    }
}

impl<T: HermitianOperator + ?Sized> HermitianOperator for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        (**self).apply_into(x, y)
    }
}

/// Build the dense matrix of an operator by applying it to the unit vectors.
pub fn materialize(op: &dyn HermitianOperator) -> CMatrix {
    let n = op.dim();
    op.apply(&CMatrix::identity(n, n))
}

#[derive(Clone, Debug)]
pub struct DenseOperator(pub CMatrix);

impl HermitianOperator for DenseOperator {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        let n = self.dim();
        y.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        for (j, xj) in x.iter().enumerate() {
            if *xj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = &self.0.as_slice()[j * n..(j + 1) * n];
            for (yi, a) in y.iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
    }

    fn apply(&self, x: &CMatrix) -> CMatrix {
        &self.0 * x
    }
}

#[derive(Clone, Debug)]
pub struct DiagonalOperator(pub Vec<f64>);

impl HermitianOperator for DiagonalOperator {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        for ((yi, xi), d) in y.iter_mut().zip(x).zip(&self.0) {
            *yi = xi * d;
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityOperator(pub usize);

impl HermitianOperator for IdentityOperator {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        y.copy_from_slice(x);
    }
}

/// `A + shift * I`
#[derive(Clone, Debug)]
pub struct Shifted<A> {
    pub inner: A,
    pub shift: f64,
}

impl<A: HermitianOperator> HermitianOperator for Shifted<A> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        self.inner.apply_into(x, y);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += xi * self.shift;
        }
    }
}
