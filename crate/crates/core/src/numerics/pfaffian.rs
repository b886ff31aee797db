use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Complex antisymmetric matrix of even order. Only the strict upper
/// triangle is stored, so `M = -M^T` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct AntisymmetricMatrix {
    order: usize,
    upper: Vec<C64>,
}

impl AntisymmetricMatrix {
    pub fn zeros(order: usize) -> Result<Self> {
        if order % 2 == 1 {
            return Err(Error::OddOrder(order));
        }
        Ok(Self {
            order,
            upper: vec![C64::new(0.0, 0.0); order * order.saturating_sub(1) / 2],
        })
    }

    /// Build from a closure giving entry `(i, j)` for `i < j`.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(order)?;
        for i in 0..order {
            for j in i + 1..order {
                m.set(i, j, f(i, j));
            }
        }
        Ok(m)
    }

    /// Take the upper triangle of a square matrix; the lower triangle and
    /// diagonal are ignored.
    pub fn from_upper(a: &CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        Self::from_fn(a.nrows(), |i, j| a[(i, j)])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.order);
        i * (2 * self.order - i - 1) / 2 + (j - i - 1)
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.upper[self.offset(i, j)],
            Greater => -self.upper[self.offset(j, i)],
            Equal => C64::new(0.0, 0.0),
        }
    }

    /// Set `M[i][j] = value` (and implicitly `M[j][i] = -value`).
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        assert_ne!(i, j, "diagonal of an antisymmetric matrix is fixed at zero");
        if i < j {
            let o = self.offset(i, j);
            self.upper[o] = value;
        } else {
            let o = self.offset(j, i);
            self.upper[o] = -value;
        }
    }

    pub fn to_dense(&self) -> CMatrix {
        CMatrix::from_fn(self.order, self.order, |i, j| self.get(i, j))
    }

    /// Principal submatrix on the given (ordered) index list.
    pub fn submatrix(&self, idx: &[usize]) -> Result<Self> {
        Self::from_fn(idx.len(), |a, b| self.get(idx[a], idx[b]))
    }
}

/// Pfaffian via Parlett–Reid `L T L^T` elimination with partial pivoting.
pub fn pfaffian(m: &AntisymmetricMatrix) -> C64 {
    let n = m.order();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut a = m.to_dense();
    let mut pf = C64::new(1.0, 0.0);
    for k in (0..n - 1).step_by(2) {
        let mut kp = k + 1;
        let mut best = a[(k + 1, k)].norm();
        for r in k + 2..n {
            let v = a[(r, k)].norm();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let pivot = a[(k, k + 1)];
        if pivot == C64::new(0.0, 0.0) {
            return C64::new(0.0, 0.0);
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|j| a[(k, j)] / pivot).collect();
            let col: Vec<C64> = (k + 2..n).map(|r| a[(r, k + 1)]).collect();
            for (ri, r) in (k + 2..n).enumerate() {
                for (ci, c) in (k + 2..n).enumerate() {
                    a[(r, c)] += tau[ri] * col[ci] - col[ri] * tau[ci];
                }
            }
        }
    }
    pf
}
