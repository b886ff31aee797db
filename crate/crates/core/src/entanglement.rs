//! Two-qubit entanglement measures and pure-state bipartite tools.
//!
//! Entropies are in bits.

use crate::error::{Error, Result};
use crate::numerics::{dense_hermitian_eig, hermitian_deviation, CMatrix, C64};

/// Reduced density matrix of a spin pair in the basis `↑↑, ↑↓, ↓↑, ↓↓`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSiteDensity(CMatrix);

impl TwoSiteDensity {
    /// Validate and wrap a 4×4 matrix.
    ///
    /// Accepts Hermitian input (to 1e-10) whose trace is within 1e-8 of one,
    /// after which it is renormalized, and whose smallest eigenvalue is at
    /// least −1e-10.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != 4 || m.ncols() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: m.nrows().max(m.ncols()),
            });
        }
        let dev = hermitian_deviation(&m);
        if dev > 1e-10 {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
        let tr = m.trace().re;
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::invalid(format!(
                "density matrix trace {tr} differs from 1"
            )));
        }
        let m = m / C64::new(tr, 0.0);
        let min = dense_hermitian_eig(&m)?.values[0];
        if min < -1e-10 {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self(m))
    }

    /// Projector onto a normalized two-qubit pure state.
    pub fn pure(psi: [C64; 4]) -> Result<Self> {
        let v = nalgebra::DVector::from_row_slice(&psi);
        Self::new(&v * v.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        dense_hermitian_eig(&self.0)
            .map(|e| e.values[0])
            .unwrap_or(f64::NAN)
    }

    /// Exchange the two spins.
    pub fn swapped(&self) -> Self {
        let perm = [0usize, 2, 1, 3];
        Self(CMatrix::from_fn(4, 4, |r, c| self.0[(perm[r], perm[c])]))
    }
}

fn sigma_yy() -> CMatrix {
    // σʸ⊗σʸ is real: anti-diagonal (-1, 1, 1, -1)
    let mut m = CMatrix::zeros(4, 4);
    m[(0, 3)] = C64::new(-1.0, 0.0);
    m[(1, 2)] = C64::new(1.0, 0.0);
    m[(2, 1)] = C64::new(1.0, 0.0);
    m[(3, 0)] = C64::new(-1.0, 0.0);
    m
}

/// Wootters concurrence, in `[0, 1]`.
///
/// With `ρ = A A†`, the `λᵢ` are the singular values of `Aᵀ (σʸ⊗σʸ) A`,
/// which keeps near-pure states accurate to rounding.
pub fn concurrence(rho: &TwoSiteDensity) -> f64 {
    let Ok(eig) = dense_hermitian_eig(rho.matrix()) else {
        return 0.0;
    };
    let mut a = eig.vectors.clone();
    for (k, mu) in eig.values.iter().enumerate() {
        a.column_mut(k).scale_mut(mu.max(0.0).sqrt());
    }
    let tau = a.transpose() * sigma_yy() * &a;
    let mut s: Vec<f64> = tau.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    (s[0] - s[1] - s[2] - s[3]).clamp(0.0, 1.0)
}

fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Entanglement of formation from the concurrence (Hill–Wootters).
pub fn eof(c: f64) -> f64 {
    let c = c.clamp(0.0, 1.0);
    binary_entropy(0.5 * (1.0 + (1.0 - c * c).max(0.0).sqrt()))
}

/// Entropy of a probability vector in bits, with `0 log 0 = 0`.
pub fn shannon_bits(p: &[f64]) -> f64 {
    p.iter().filter(|x| **x > 0.0).map(|x| -x * x.log2()).sum()
}

/// `-Tr ρ log₂ ρ`
pub fn von_neumann_entropy(rho: &CMatrix) -> Result<f64> {
    let eig = dense_hermitian_eig(rho)?;
    let min = eig.values.first().copied().unwrap_or(0.0);
    if min < -1e-10 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: min,
        });
    }
    let clipped: Vec<f64> = eig.values.iter().map(|x| x.max(0.0)).collect();
    Ok(shannon_bits(&clipped))
}

/// `ψ = Σ_i λ_i |a_i⟩|b_i⟩`
#[derive(Clone, Debug)]
pub struct SchmidtForm {
    /// Descending, non-negative.
    pub coefficients: Vec<f64>,
    /// Columns are the `|a_i⟩`.
    pub basis_a: CMatrix,
    /// Columns are the `|b_i⟩`.
    pub basis_b: CMatrix,
}

impl SchmidtForm {
    /// Entanglement entropy `-Σ λ² log₂ λ²`.
    pub fn entropy(&self) -> f64 {
        let p: Vec<f64> = self.coefficients.iter().map(|l| l * l).collect();
        shannon_bits(&p)
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.coefficients.iter().filter(|l| **l > cutoff).count()
    }
}

fn amplitude_matrix(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<CMatrix> {
    if psi.len() != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: psi.len(),
        });
    }
    Ok(CMatrix::from_fn(dim_a, dim_b, |a, b| psi[a * dim_b + b]))
}

/// Schmidt decomposition of `ψ` with amplitude index `a·dim_b + b`.
pub fn schmidt_decompose(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<SchmidtForm> {
    let m = amplitude_matrix(psi, dim_a, dim_b)?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V^H");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let coefficients = order.iter().map(|&i| svd.singular_values[i]).collect();
    let basis_a = CMatrix::from_fn(dim_a, order.len(), |r, c| u[(r, order[c])]);
    // ψ = U Σ V^H, so |b_i⟩ has components V^H[i, b]
    let basis_b = CMatrix::from_fn(dim_b, order.len(), |r, c| vt[(order[c], r)]);
    Ok(SchmidtForm {
        coefficients,
        basis_a,
        basis_b,
    })
}

/// `(ρ_A, ρ_B)` of a pure bipartite state.
pub fn reduced_states(psi: &[C64], dim_a: usize, dim_b: usize) -> Result<(CMatrix, CMatrix)> {
    let m = amplitude_matrix(psi, dim_a, dim_b)?;
    let rho_a = &m * m.adjoint();
    let rho_b = m.transpose() * m.map(|z| z.conj());
    Ok((rho_a, rho_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn bell() -> [C64; 4] {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [c(s), c(0.0), c(0.0), c(s)]
    }

    #[test]
    fn bell_is_maximal() {
        let rho = TwoSiteDensity::pure(bell()).unwrap();
        assert!((concurrence(&rho) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn product_is_zero() {
        let rho = TwoSiteDensity::pure([c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(concurrence(&rho), 0.0);
    }

    #[test]
    fn werner_state() {
        let werner = |p: f64| {
            let b = bell();
            let v = nalgebra::DVector::from_row_slice(&b);
            let m = (&v * v.adjoint()) * c(p) + CMatrix::identity(4, 4) * c((1.0 - p) / 4.0);
            TwoSiteDensity::new(m).unwrap()
        };
        let closed = |p: f64| ((3.0 * p - 1.0) / 2.0).max(0.0);
        for p in [0.2, 0.5, 0.8, 1.0] {
            assert!((concurrence(&werner(p)) - closed(p)).abs() < 1e-10);
        }
        assert!((concurrence(&werner(0.5)) - 0.25).abs() < 1e-10);
    }

    #[test]
    fn rejects_negative_matrix() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.6),
            c(0.6),
            c(0.1),
            c(-0.3),
        ]));
        assert!(matches!(
            TwoSiteDensity::new(m),
            Err(Error::NotPositiveSemidefinite { .. })
        ));
    }

    #[test]
    fn formation_values() {
        assert_eq!(eof(0.0), 0.0);
        assert!((eof(1.0) - 1.0).abs() < 1e-15);
        assert!((eof(0.5) - 0.35457).abs() < 1e-5);
    }

    /// Minimize the average pure-state entanglement over two-element
    /// decompositions of a rank-2 state; compare with eof(C).
    #[test]
    fn formation_matches_decomposition_search() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = [c(s), c(0.0), c(0.0), c(s)];
        let b = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let p = 0.7;
        let mut rho = CMatrix::zeros(4, 4);
        for (w, v) in [(p, a), (1.0 - p, b)] {
            let v = nalgebra::DVector::from_row_slice(&v);
            rho += (&v * v.adjoint()) * c(w);
        }
        let rho = TwoSiteDensity::new(rho).unwrap();
        let target = eof(concurrence(&rho));

        // decompositions ψ_k = Σ_j U_kj √p_j |e_j⟩ over 2×2 unitaries U
        let pure_entropy = |v: &[C64]| {
            let f = schmidt_decompose(v, 2, 2).unwrap();
            f.entropy()
        };
        let mut best = f64::INFINITY;
        let steps = 120;
        for it in 0..=steps {
            let theta = std::f64::consts::FRAC_PI_2 * it as f64 / steps as f64;
            for ip in 0..=steps {
                let phi = 2.0 * std::f64::consts::PI * ip as f64 / steps as f64;
                let u = [
                    [c(theta.cos()), C64::from_polar(theta.sin(), phi)],
                    [-C64::from_polar(theta.sin(), -phi), c(theta.cos())],
                ];
                let mut avg = 0.0;
                for row in u {
                    let v: Vec<C64> = (0..4)
                        .map(|q| row[0] * p.sqrt() * a[q] + row[1] * (1.0 - p).sqrt() * b[q])
                        .collect();
                    let w: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                    if w > 1e-14 {
                        let nv: Vec<C64> = v.iter().map(|z| z / w.sqrt()).collect();
                        avg += w * pure_entropy(&nv);
                    }
                }
                best = best.min(avg);
            }
        }
        assert!(best >= target - 1e-9);
        assert!(
            best - target < 2e-3,
            "search {best} vs closed form {target}"
        );
    }

    #[test]
    fn entropy_examples() {
        assert!(
            (von_neumann_entropy(&(CMatrix::identity(4, 4) * c(0.25))).unwrap() - 2.0).abs()
                < 1e-14
        );
        let pure = TwoSiteDensity::pure(bell()).unwrap();
        assert!(von_neumann_entropy(pure.matrix()).unwrap().abs() < 1e-12);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.5),
            c(0.25),
            c(0.25),
            c(0.0),
        ]));
        assert!((von_neumann_entropy(&d).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn schmidt_examples() {
        let prod = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let f = schmidt_decompose(&prod, 2, 2).unwrap();
        assert!((f.coefficients[0] - 1.0).abs() < 1e-14 && f.coefficients[1].abs() < 1e-14);
        let f = schmidt_decompose(&bell(), 2, 2).unwrap();
        for l in &f.coefficients {
            assert!((l - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
        }
        // reconstruction
        let mut back = [c(0.0); 4];
        for i in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    back[a * 2 + b] += f.basis_a[(a, i)] * f.basis_b[(b, i)] * f.coefficients[i];
                }
            }
        }
        for (x, y) in back.iter().zip(bell()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
