use super::{
    axpy, dense_hermitian_eig, dot, norm, random_vector, seeded_rng, CMatrix, HermitianOperator,
    SpectralDecomposition, C64,
};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    /// Number of lowest eigenpairs wanted.
    pub k: usize,
    /// Residual tolerance relative to `max(1, |θ|max)`.
    pub tol: f64,
    /// Block size; `None` means `k`.
    pub block: Option<usize>,
    /// Largest Krylov basis before a thick restart.
    pub max_basis: usize,
    pub max_restarts: usize,
    pub seed: u64,
    /// Starting directions; the block is filled up with random vectors.
    pub start: Vec<Vec<C64>>,
}

impl LanczosOptions {
    pub fn new(k: usize, tol: f64) -> Self {
        Self {
            k,
            tol,
            block: None,
            max_basis: 80,
            max_restarts: 200,
            seed: 0x5eed,
            start: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LanczosOutcome {
    pub pairs: SpectralDecomposition,
    /// Absolute residual norms `||A v - θ v||`.
    pub residuals: Vec<f64>,
    pub matvecs: usize,
    pub restarts: usize,
}

const CHUNK: usize = 2048;

/// `V^H w` with `w` streamed through cache in chunks.
fn block_dots(basis: &[Vec<C64>], w: &[C64]) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); basis.len()];
    for start in (0..w.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(w.len());
        let wc = &w[start..end];
        for (ci, v) in c.iter_mut().zip(basis) {
            *ci += dot(&v[start..end], wc);
        }
    }
    c
}

/// `w -= V c`, chunked like [`block_dots`].
fn block_subtract(basis: &[Vec<C64>], c: &[C64], w: &mut [C64]) {
    for start in (0..w.len()).step_by(CHUNK) {
        let end = (start + CHUNK).min(w.len());
        let wc = &mut w[start..end];
        for (ci, v) in c.iter().zip(basis) {
            axpy(-ci, &v[start..end], wc);
        }
    }
}

/// Orthogonalize `w` against every basis vector, returning the accumulated
/// coefficients. Classical Gram–Schmidt, repeated while a pass cancels most
/// of `w` (DGKS criterion).
fn orthogonalize(basis: &[Vec<C64>], w: &mut [C64]) -> Vec<C64> {
    let mut h = vec![C64::new(0.0, 0.0); basis.len()];
    if basis.is_empty() {
        return h;
    }
    let mut before = norm(w);
    for _ in 0..3 {
        let c = block_dots(basis, w);
        block_subtract(basis, &c, w);
        h.iter_mut().zip(&c).for_each(|(hi, ci)| *hi += ci);
        let after = norm(w);
        if after > std::f64::consts::FRAC_1_SQRT_2 * before {
            break;
        }
        before = after;
    }
    h
}

/// Append `w` normalized, or a fresh random direction if `w` has collapsed.
/// Returns the coupling coefficient (zero for a replacement vector).
fn append(basis: &mut Vec<Vec<C64>>, mut w: Vec<C64>, scale: f64, rng: &mut impl rand::Rng) -> f64 {
    let beta = norm(&w);
    if beta > 1e-10 * scale.max(1e-300) {
        w.iter_mut().for_each(|x| *x /= beta);
        basis.push(w);
        return beta;
    }
    for _ in 0..10 {
        let mut r = random_vector(rng, w.len());
        orthogonalize(basis, &mut r);
        let nr = norm(&r);
        if nr > 1e-8 {
            r.iter_mut().for_each(|x| *x /= nr);
            basis.push(r);
            return 0.0;
        }
    }
    basis.push(vec![C64::new(0.0, 0.0); w.len()]);
    0.0
}

/// `k` lowest eigenpairs of a Hermitian operator by thick-restart block
/// Lanczos with full reorthogonalization.
pub fn lanczos_lowest(a: &dyn HermitianOperator, k: usize, tol: f64) -> Result<LanczosOutcome> {
    lanczos_lowest_with(a, &LanczosOptions::new(k, tol))
}

pub fn lanczos_lowest_with(
    a: &dyn HermitianOperator,
    opts: &LanczosOptions,
) -> Result<LanczosOutcome> {
    let n = a.dim();
    let k = opts.k;
    if k == 0 || k > n {
        return Err(Error::invalid(format!(
            "requested {k} eigenpairs of a {n}-dimensional operator"
        )));
    }
    let p = opts.block.unwrap_or(k).max(1).min(n);
    let max_basis = opts.max_basis.max(k + 2 * p).min(n);

    // small problems: the Krylov space would be the whole space
    if max_basis >= n || n <= 2 * (k + p) {
        let m = super::materialize(a);
        let full = dense_hermitian_eig(&m)?;
        let vectors = full.vectors.columns(0, k).into_owned();
        let values: Vec<f64> = full.values[..k].to_vec();
        let residuals = residuals_of(a, &values, &vectors);
        return Ok(LanczosOutcome {
            pairs: SpectralDecomposition { values, vectors },
            residuals,
            matvecs: n,
            restarts: 0,
        });
    }

    let mut rng = seeded_rng(opts.seed);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(max_basis + p);
    for i in 0..p {
        let mut v = match opts.start.get(i) {
            Some(s) if s.len() == n => s.clone(),
            _ => random_vector(&mut rng, n),
        };
        orthogonalize(&basis, &mut v);
        append(&mut basis, v, 1.0, &mut rng);
    }
    // h[j] holds column j of the projected matrix: A v_j = Σ_i h[j][i] v_i
    let mut h: Vec<Vec<C64>> = Vec::new();
    let mut matvecs = 0usize;
    let mut restarts = 0usize;
    let mut best: Vec<f64> = vec![f64::INFINITY; k];
    let mut w = vec![C64::new(0.0, 0.0); n];

    loop {
        // expand the oldest unexpanded vector
        let j = h.len();
        a.apply_into(&basis[j], &mut w);
        matvecs += 1;
        let anorm = norm(&w);
        let mut col = orthogonalize(&basis, &mut w);
        let beta = append(&mut basis, w.clone(), anorm, &mut rng);
        col.push(C64::new(beta, 0.0));
        h.push(col);

        let active = h.len();
        let at_capacity = basis.len() >= max_basis;
        if active < k || (active % p != 0 && !at_capacity) {
            continue;
        }

        let (theta, y) = rayleigh_ritz(&h, active)?;
        let scale = theta.iter().fold(1.0f64, |m, t| m.max(t.abs()));
        let res: Vec<f64> = (0..k)
            .map(|i| coupling_residual(&h, active, basis.len(), &y, i))
            .collect();
        for (b, r) in best.iter_mut().zip(&res) {
            *b = b.min(*r);
        }
        if res.iter().all(|r| *r <= opts.tol * scale) {
            let vectors = ritz_vectors(&basis[..active], &y, k);
            let values = theta[..k].to_vec();
            let residuals = residuals_of(a, &values, &vectors);
            return Ok(LanczosOutcome {
                pairs: SpectralDecomposition { values, vectors },
                residuals,
                matvecs,
                restarts,
            });
        }
        if !at_capacity {
            continue;
        }
        if restarts >= opts.max_restarts {
            return Err(Error::NoConvergence {
                solver: "lanczos",
                iterations: matvecs,
                residuals: best,
            });
        }
        restarts += 1;

        // thick restart: keep the lowest Ritz vectors plus the unexpanded tail
        let keep = (active / 2).max(k + p).min(active - 1);
        let kept = ritz_vectors(&basis[..active], &y, keep);
        let tail: Vec<Vec<C64>> = basis.drain(active..).collect();
        basis.clear();
        for c in 0..keep {
            basis.push(kept.column(c).iter().copied().collect());
        }
        basis.extend(tail);
        let total = basis.len();
        let mut new_h = Vec::with_capacity(keep);
        for c in 0..keep {
            let mut col = vec![C64::new(0.0, 0.0); total];
            col[c] = C64::new(theta[c], 0.0);
            for (t, row) in (active..active + (total - keep)).enumerate() {
                let mut s = C64::new(0.0, 0.0);
                for (jj, hj) in h.iter().enumerate() {
                    if row < hj.len() {
                        s += hj[row] * y[(jj, c)];
                    }
                }
                col[keep + t] = s;
            }
            new_h.push(col);
        }
        h = new_h;
    }
}

/// Eigen-decompose the Hermitian part of the leading `active × active` block.
fn rayleigh_ritz(h: &[Vec<C64>], active: usize) -> Result<(Vec<f64>, CMatrix)> {
    let t = CMatrix::from_fn(active, active, |i, j| {
        let hij = if i < h[j].len() {
            h[j][i]
        } else {
            C64::new(0.0, 0.0)
        };
        let hji = if j < h[i].len() {
            h[i][j]
        } else {
            C64::new(0.0, 0.0)
        };
        (hij + hji.conj()) * 0.5
    });
    let eig = dense_hermitian_eig(&t)?;
    Ok((eig.values, eig.vectors))
}

/// `||H[tail, :] y_i||`: the residual of Ritz pair `i` without forming it.
fn coupling_residual(h: &[Vec<C64>], active: usize, total: usize, y: &CMatrix, i: usize) -> f64 {
    let mut acc = 0.0;
    for row in active..total {
        let mut s = C64::new(0.0, 0.0);
        for (j, hj) in h.iter().enumerate() {
            if row < hj.len() {
                s += hj[row] * y[(j, i)];
            }
        }
        acc += s.norm_sqr();
    }
    acc.sqrt()
}

fn ritz_vectors(basis: &[Vec<C64>], y: &CMatrix, count: usize) -> CMatrix {
    let n = basis[0].len();
    let mut out = CMatrix::zeros(n, count);
    for c in 0..count {
        let mut col = vec![C64::new(0.0, 0.0); n];
        let coef: Vec<C64> = (0..basis.len()).map(|j| -y[(j, c)]).collect();
        block_subtract(basis, &coef, &mut col);
        let nc = norm(&col);
        col.iter_mut().for_each(|x| *x /= nc);
        out.column_mut(c).copy_from_slice(&col);
    }
    out
}

fn residuals_of(a: &dyn HermitianOperator, values: &[f64], vectors: &CMatrix) -> Vec<f64> {
    let av = a.apply(vectors);
    values
        .iter()
        .enumerate()
        .map(|(i, lam)| (av.column(i) - vectors.column(i) * C64::new(*lam, 0.0)).norm())
        .collect()
}

/// Result of one Krylov exponential step.
#[derive(Clone, Debug)]
pub struct KrylovStep {
    pub state: Vec<C64>,
    /// A-posteriori error estimate of the step.
    pub error: f64,
    pub subspace: usize,
}

/// `exp(-i dt A) ψ` from a Lanczos basis grown until the error estimate
/// drops below `tol` relative to `||ψ||` or `max_m` vectors are used.
pub fn krylov_exp_step(
    a: &dyn HermitianOperator,
    psi: &[C64],
    dt: f64,
    tol: f64,
    max_m: usize,
) -> Result<KrylovStep> {
    let n = a.dim();
    if psi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: psi.len(),
        });
    }
    let beta0 = norm(psi);
    if beta0 == 0.0 || dt == 0.0 {
        return Ok(KrylovStep {
            state: psi.to_vec(),
            error: 0.0,
            subspace: 0,
        });
    }
    let max_m = max_m.min(n).max(1);
    let mut basis: Vec<Vec<C64>> = vec![psi.iter().map(|x| x / beta0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    loop {
        let j = basis.len() - 1;
        a.apply_into(&basis[j], &mut w);
        let coeffs = orthogonalize(&basis, &mut w);
        alpha.push(coeffs[j].re);
        let b = norm(&w);
        let m = alpha.len();
        // exp of the tridiagonal matrix; error from the coupling to the next vector
        let t = CMatrix::from_fn(m, m, |r, c| {
            if r == c {
                C64::new(alpha[r], 0.0)
            } else if r + 1 == c || c + 1 == r {
                C64::new(beta[r.min(c)], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let e = super::matrix_exp_unitary(&t, dt)?;
        let coef: Vec<C64> = (0..m).map(|r| e[(r, 0)]).collect();
        let err = b * coef[m - 1].norm() * beta0;
        let exhausted = b <= 1e-14 * (alpha.iter().fold(1.0f64, |s, x| s.max(x.abs())));
        if err <= tol * beta0 || exhausted || m >= max_m {
            let mut state = vec![C64::new(0.0, 0.0); n];
            for (cv, v) in coef.iter().zip(&basis) {
                axpy(cv * beta0, v, &mut state);
            }
            let error = if exhausted { 0.0 } else { err };
            return Ok(KrylovStep {
                state,
                error,
                subspace: m,
            });
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{DenseOperator, DiagonalOperator};

    #[test]
    fn diagonal_lowest_three() {
        let op = DiagonalOperator((1..=100).map(|x| x as f64).collect());
        let out = lanczos_lowest(&op, 3, 1e-10).unwrap();
        for (v, e) in out.pairs.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-9);
        }
        assert!(out.residuals.iter().all(|r| *r < 1e-8));
    }

    #[test]
    fn enforced_degeneracy_found() {
        let mut d: Vec<f64> = (0..200).map(|x| 1.0 + x as f64 * 0.05).collect();
        d[0] = 0.0;
        d[1] = 0.0;
        let out = lanczos_lowest(&DiagonalOperator(d), 2, 1e-10).unwrap();
        assert!(out.pairs.values[0].abs() < 1e-9 && out.pairs.values[1].abs() < 1e-9);
    }

    #[test]
    fn restart_path_matches_dense() {
        let a = crate::numerics::dense::tests::random_hermitian(300, 4);
        let mut opts = LanczosOptions::new(4, 1e-10);
        opts.max_basis = 30;
        let out = lanczos_lowest_with(&DenseOperator(a.clone()), &opts).unwrap();
        let full = dense_hermitian_eig(&a).unwrap();
        for i in 0..4 {
            assert!((out.pairs.values[i] - full.values[i]).abs() < 1e-9);
        }
        assert!(out.restarts > 0);
    }

    #[test]
    fn krylov_step_matches_dense_exponential() {
        let a = crate::numerics::dense::tests::random_hermitian(40, 2);
        let psi: Vec<C64> = (0..40).map(|i| C64::new((i as f64).sin(), 0.1)).collect();
        let step = krylov_exp_step(&DenseOperator(a.clone()), &psi, 0.3, 1e-13, 40).unwrap();
        let u = crate::numerics::matrix_exp_unitary(&a, 0.3).unwrap();
        let exact = &u * nalgebra::DVector::from_vec(psi);
        let diff: f64 = step
            .state
            .iter()
            .zip(exact.iter())
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        assert!(diff.sqrt() < 1e-11);
    }
}
