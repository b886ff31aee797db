use super::{
    dense_hermitian_eig, projected_cg, random_vector, seeded_rng, CMatrix, HermitianOperator,
    OrthogonalProjector, SpectralDecomposition, C64,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TraceminOptions {
    pub p: usize,
    pub tol: f64,
    /// Working block width; `None` means `2p`.
    pub block: Option<usize>,
    pub max_iter: usize,
    /// Relative precision of each inner projected-CG solve.
    pub inner_tol: f64,
    pub seed: u64,
}

impl TraceminOptions {
    pub fn new(p: usize, tol: f64) -> Self {
        Self {
            p,
            tol,
            block: None,
            max_iter: 2000,
            inner_tol: 1e-2,
            seed: 0x7ace,
        }
    }
}

#[derive(Clone, Debug)]
pub struct TraceminOutcome {
    pub pairs: SpectralDecomposition,
    pub residuals: Vec<f64>,
    /// `Tr(X_k^H A X_k)` over the whole working block, one entry per iteration.
    pub trace_history: Vec<f64>,
    pub iterations: usize,
    /// Set when an inner solve missed its tolerance and was relaxed.
    pub inner_relaxed: bool,
    /// Largest `|X^H B X - I|` seen after B-orthonormalization.
    pub max_b_orthogonality_defect: f64,
}

/// `p` smallest eigenpairs of `A U = B U Σ` by trace minimization.
///
/// Both operators must be Hermitian with `B` positive definite; `A` should be
/// positive definite too (shift it first if needed).
pub fn tracemin(
    a: &dyn HermitianOperator,
    b: &dyn HermitianOperator,
    p: usize,
    tol: f64,
) -> Result<TraceminOutcome> {
    tracemin_with(a, b, &TraceminOptions::new(p, tol))
}

pub fn tracemin_with(
    a: &dyn HermitianOperator,
    b: &dyn HermitianOperator,
    opts: &TraceminOptions,
) -> Result<TraceminOutcome> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.dim(),
        });
    }
    let p = opts.p;
    if p == 0 || p > n {
        return Err(Error::invalid(format!(
            "requested {p} eigenpairs of a {n}-dimensional pencil"
        )));
    }
    let s = opts.block.unwrap_or(2 * p).clamp(p, n);
    let mut rng = seeded_rng(opts.seed);
    let mut x = CMatrix::zeros(n, s);
    for c in 0..s {
        x.column_mut(c).copy_from_slice(&random_vector(&mut rng, n));
    }
    let mut history = Vec::new();
    let mut inner_tol = opts.inner_tol;
    let mut relaxed = false;
    let mut max_defect = 0.0f64;
    let mut best = vec![f64::INFINITY; p];

    for iter in 0..opts.max_iter {
        // B-orthonormalize: G = X^H B X = V Ω V^H, Q = X V Ω^{-1/2}
        let bx = b.apply(&x);
        let g = hermitian_part(&(x.adjoint() * &bx));
        let geig = dense_hermitian_eig(&g)?;
        let gmax = geig.values.last().copied().unwrap_or(1.0).abs().max(1e-300);
        if geig.values[0] <= 1e-13 * gmax {
            if geig.values[0] <= 0.0 {
                return Err(Error::NotPositiveDefinite {
                    min_eigenvalue: geig.values[0],
                });
            }
            // X lost rank; refresh with random directions
            for c in 0..s {
                x.column_mut(c).copy_from_slice(&random_vector(&mut rng, n));
            }
            continue;
        }
        let mut q = &x * &geig.vectors;
        for (c, om) in geig.values.iter().enumerate() {
            let f = C64::new(1.0 / om.sqrt(), 0.0);
            q.column_mut(c).iter_mut().for_each(|z| *z *= f);
        }
        // Rayleigh–Ritz: H = Q^H A Q = W Λ W^H, X̄ = Q W
        let aq = a.apply(&q);
        let hm = hermitian_part(&(q.adjoint() * &aq));
        let heig = dense_hermitian_eig(&hm)?;
        let xbar = &q * &heig.vectors;
        let axbar = &aq * &heig.vectors;
        let bxbar = b.apply(&xbar);
        let defect = orthogonality_defect(&(xbar.adjoint() * &bxbar));
        max_defect = max_defect.max(defect);
        history.push(heig.values.iter().sum());

        let scale = heig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let residuals: Vec<f64> = (0..p)
            .map(|i| (axbar.column(i) - bxbar.column(i) * C64::new(heig.values[i], 0.0)).norm())
            .collect();
        for (bst, r) in best.iter_mut().zip(&residuals) {
            *bst = bst.min(*r);
        }
        if residuals.iter().all(|r| *r <= opts.tol * scale) {
            let pairs = SpectralDecomposition {
                values: heig.values[..p].to_vec(),
                vectors: xbar.columns(0, p).into_owned(),
            };
            return Ok(TraceminOutcome {
                pairs,
                residuals,
                trace_history: history,
                iterations: iter + 1,
                inner_relaxed: relaxed,
                max_b_orthogonality_defect: max_defect,
            });
        }

        // correction: (I-P) A (I-P) D̄ = (I-P) A X̄ with P onto span(B X̄)
        let proj = OrthogonalProjector::onto_span(&bxbar);
        let rhs = proj.complement(&axbar);
        let cg = projected_cg(a, &proj, &rhs, inner_tol)?;
        if !cg.converged {
            relaxed = true;
            inner_tol = (inner_tol * 10.0).min(0.5);
        }
        let d = proj.complement(&cg.solution);
        x = xbar - d;
    }
    Err(Error::NoConvergence {
        solver: "tracemin",
        iterations: opts.max_iter,
        residuals: best,
    })
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

fn orthogonality_defect(g: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let t = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(t, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseOperator, DiagonalOperator, IdentityOperator};

    #[test]
    fn diagonal_pencil() {
        let out = tracemin(
            &DiagonalOperator(vec![1.0, 2.0, 3.0, 4.0]),
            &IdentityOperator(4),
            2,
            1e-10,
        )
        .unwrap();
        assert!((out.pairs.values[0] - 1.0).abs() < 1e-10);
        assert!((out.pairs.values[1] - 2.0).abs() < 1e-10);
    }

    #[test]
    fn identical_pencil_gives_ones() {
        let d: Vec<f64> = (0..30).map(|i| 1.0 + i as f64).collect();
        let out = tracemin(&DiagonalOperator(d.clone()), &DiagonalOperator(d), 3, 1e-10).unwrap();
        for v in &out.pairs.values {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn trace_is_monotone_and_matches_dense() {
        let n = 120;
        let h = crate::numerics::dense::tests::random_hermitian(n, 9);
        let a = &h + CMatrix::identity(n, n) * C64::new(10.0, 0.0);
        let out = tracemin(&DenseOperator(a.clone()), &IdentityOperator(n), 3, 1e-9).unwrap();
        let full = dense_hermitian_eig(&a).unwrap();
        for i in 0..3 {
            assert!((out.pairs.values[i] - full.values[i]).abs() < 1e-8);
        }
        for w in out.trace_history.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].abs());
        }
        assert!(out.max_b_orthogonality_defect < 1e-10);
    }

    #[test]
    fn indefinite_b_rejected() {
        let b = DiagonalOperator(vec![-1.0, -2.0, -1.0, -3.0]);
        let a = DiagonalOperator(vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            tracemin(&a, &b, 1, 1e-10),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
