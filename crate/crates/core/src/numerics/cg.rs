use super::{axpy, dot, norm, random_vector, seeded_rng, CMatrix, HermitianOperator, C64};
use crate::error::{Error, Result};

/// Orthogonal projector `P = Q Q^H` onto the span of orthonormal columns `Q`.
#[derive(Clone, Debug)]
pub struct OrthogonalProjector {
    basis: CMatrix,
}

impl OrthogonalProjector {
    /// The zero projector on an `n`-dimensional space.
    pub fn zero(n: usize) -> Self {
        Self {
            basis: CMatrix::zeros(n, 0),
        }
    }

    /// Projector onto the column span of `a` (orthonormalized by QR).
    pub fn onto_span(a: &CMatrix) -> Self {
        if a.ncols() == 0 {
            return Self::zero(a.nrows());
        }
        let q = a.clone().qr().q();
        Self { basis: q }
    }

    /// Use `q` as given; columns must already be orthonormal.
    pub fn from_orthonormal(q: CMatrix) -> Self {
        Self { basis: q }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `P x`
    pub fn project(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for q in self.basis.column_iter() {
            let q = q.as_slice();
            axpy(dot(q, x), q, &mut out);
        }
        out
    }

    /// `x <- (I - P) x`, returning `||P x||` measured before removal.
    pub fn remove_from(&self, x: &mut [C64]) -> f64 {
        let mut removed = 0.0;
        for q in self.basis.column_iter() {
            let q = q.as_slice();
            let c = dot(q, x);
            removed += c.norm_sqr();
            axpy(-c, q, x);
        }
        removed.sqrt()
    }

    /// `(I - P) X` for a block.
    pub fn complement(&self, x: &CMatrix) -> CMatrix {
        let mut out = x.clone();
        let n = x.nrows();
        for col in out.as_mut_slice().chunks_mut(n) {
            self.remove_from(col);
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct CgOutcome {
    pub solution: CMatrix,
    /// Iterations spent on each right-hand side.
    pub iterations: Vec<usize>,
    /// Final relative residual of each column.
    pub residuals: Vec<f64>,
    /// Largest `||P r||` seen before any re-projection.
    pub max_projected_residual: f64,
    pub restarted: bool,
    pub converged: bool,
}

struct ColumnResult {
    x: Vec<C64>,
    iterations: usize,
    residual: f64,
    max_leak: f64,
    restarted: bool,
    converged: bool,
}

fn projected_apply(a: &dyn HermitianOperator, p: &OrthogonalProjector, x: &[C64], y: &mut [C64]) {
    let mut px = x.to_vec();
    p.remove_from(&mut px);
    a.apply_into(&px, y);
    p.remove_from(y);
}

fn solve_column(
    a: &dyn HermitianOperator,
    proj: &OrthogonalProjector,
    b: &[C64],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> ColumnResult {
    let n = b.len();
    let bnorm = norm(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    if bnorm == 0.0 {
        return ColumnResult {
            x,
            iterations: 0,
            residual: 0.0,
            max_leak: 0.0,
            restarted: false,
            converged: true,
        };
    }
    let mut r = b.to_vec();
    let mut max_leak = proj.remove_from(&mut r);
    let mut d = r.clone();
    let mut q = vec![C64::new(0.0, 0.0); n];
    let mut rr = dot(&r, &r).re;
    let mut restarted = false;
    let mut restarts = 0;
    let mut rng = seeded_rng(seed);
    let mut it = 0;
    while it < max_iter {
        if rr.sqrt() <= tol * bnorm {
            return ColumnResult {
                x,
                iterations: it,
                residual: rr.sqrt() / bnorm,
                max_leak,
                restarted,
                converged: true,
            };
        }
        projected_apply(a, proj, &d, &mut q);
        let curv = dot(&d, &q).re;
        if !(curv > 1e-300 * dot(&d, &d).re) {
            // zero or negative curvature: perturb the iterate and start over
            restarted = true;
            restarts += 1;
            if restarts > 5 {
                break;
            }
            let mut pert = random_vector(&mut rng, n);
            proj.remove_from(&mut pert);
            let s = 1e-8 * bnorm / norm(&pert).max(1e-300);
            axpy(C64::new(s, 0.0), &pert, &mut x);
            projected_apply(a, proj, &x, &mut q);
            r = b.to_vec();
            axpy(C64::new(-1.0, 0.0), &q, &mut r);
            max_leak = max_leak.max(proj.remove_from(&mut r));
            d = r.clone();
            rr = dot(&r, &r).re;
            it += 1;
            continue;
        }
        let alpha = rr / curv;
        axpy(C64::new(alpha, 0.0), &d, &mut x);
        axpy(C64::new(-alpha, 0.0), &q, &mut r);
        max_leak = max_leak.max(proj.remove_from(&mut r));
        let rr_new = dot(&r, &r).re;
        let beta = rr_new / rr;
        for (di, ri) in d.iter_mut().zip(&r) {
            *di = ri + *di * beta;
        }
        proj.remove_from(&mut d);
        rr = rr_new;
        it += 1;
    }
    proj.remove_from(&mut x);
    let converged = rr.sqrt() <= tol * bnorm;
    ColumnResult {
        x,
        iterations: it,
        residual: rr.sqrt() / bnorm,
        max_leak,
        restarted,
        converged,
    }
}

/// Solve `(I-P) A (I-P) D = rhs` column by column with conjugate gradients
/// restricted to `Range(P)^⊥`.
///
/// `rhs` must already lie in the complement of `P`. The iteration count is
/// capped at `2·dim`; an unconverged column is reported through
/// [`CgOutcome::converged`] rather than as an error.
pub fn projected_cg(
    a: &dyn HermitianOperator,
    p: &OrthogonalProjector,
    rhs: &CMatrix,
    tol: f64,
) -> Result<CgOutcome> {
    let n = a.dim();
    if rhs.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: rhs.nrows(),
        });
    }
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.dim(),
        });
    }
    let mut solution = CMatrix::zeros(n, rhs.ncols());
    let mut out = CgOutcome {
        solution: CMatrix::zeros(0, 0),
        iterations: vec![],
        residuals: vec![],
        max_projected_residual: 0.0,
        restarted: false,
        converged: true,
    };
    for (k, b) in rhs
        .as_slice()
        .chunks(n.max(1))
        .enumerate()
        .take(rhs.ncols())
    {
        let res = solve_column(a, p, b, tol, 2 * n + 10, k as u64);
        solution.column_mut(k).copy_from_slice(&res.x);
        out.iterations.push(res.iterations);
        out.residuals.push(res.residual);
        out.max_projected_residual = out.max_projected_residual.max(res.max_leak);
        out.restarted |= res.restarted;
        out.converged &= res.converged;
    }
    out.solution = solution;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseOperator, IdentityOperator};
    use rand::Rng;

    fn random_spd(n: usize, seed: u64) -> CMatrix {
        let mut rng = seeded_rng(seed);
        let m = CMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        m.adjoint() * &m + CMatrix::identity(n, n) * C64::new(n as f64 * 0.1, 0.0)
    }

    fn random_block(n: usize, k: usize, seed: u64) -> CMatrix {
        let mut rng = seeded_rng(seed);
        CMatrix::from_fn(n, k, |_, _| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    #[test]
    fn unconstrained_is_plain_cg() {
        let a = random_spd(20, 1);
        let b = random_block(20, 2, 2);
        let out = projected_cg(
            &DenseOperator(a.clone()),
            &OrthogonalProjector::zero(20),
            &b,
            1e-12,
        )
        .unwrap();
        assert!(out.converged);
        let exact = a.lu().solve(&b).unwrap();
        assert!((out.solution - exact).norm() < 1e-9);
    }

    #[test]
    fn identity_with_first_axis_removed() {
        let mut e1 = CMatrix::zeros(5, 1);
        e1[(0, 0)] = C64::new(1.0, 0.0);
        let p = OrthogonalProjector::from_orthonormal(e1);
        let mut b = random_block(5, 1, 3);
        b[(0, 0)] = C64::new(0.0, 0.0);
        let out = projected_cg(&IdentityOperator(5), &p, &b, 1e-14).unwrap();
        assert!((&out.solution - &b).norm() < 1e-14);
        assert_eq!(out.solution[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn matches_null_space_solve() {
        let n = 64;
        let a = random_spd(n, 7);
        let p = OrthogonalProjector::onto_span(&random_block(n, 4, 8));
        let rhs = p.complement(&random_block(n, 3, 9));
        let out = projected_cg(&DenseOperator(a.clone()), &p, &rhs, 1e-12).unwrap();
        assert!(out.converged);
        assert!(out.max_projected_residual <= 1e-10);

        // orthonormal basis Z of Range(P)^⊥ from the full QR of [Q | random]
        let full = p
            .basis()
            .clone()
            .insert_columns(4, n - 4, C64::new(0.0, 0.0));
        let mut m = full;
        let fill = random_block(n, n - 4, 10);
        m.view_mut((0, 4), (n, n - 4)).copy_from(&fill);
        let q = m.qr().q();
        let z = q.columns(4, n - 4).into_owned();
        let reduced = z.adjoint() * &a * &z;
        let y = reduced.lu().solve(&(z.adjoint() * &rhs)).unwrap();
        let oracle = &z * y;
        assert!((out.solution - oracle).norm() < 1e-9);
    }
}
