use crate::error::{Error, Result};
use crate::numerics::{dense_hermitian_eig, CMatrix, SpectralDecomposition, C64};

/// Open XY chain of odd length whose two bonds at the central site carry
/// coupling `j_impurity`; every other bond has `J = 1`.
///
/// The state is thermal (or ground) at field `h_initial`; at `t = 0` the
/// field switches to `h_final` and the chain evolves.
#[derive(Clone, Debug, PartialEq)]
pub struct ImpurityChain {
    pub n: usize,
    pub j_impurity: f64,
    pub gamma: f64,
    pub h_initial: f64,
    pub h_final: f64,
    pub beta: f64,
}

impl ImpurityChain {
    pub fn new(n: usize, j_impurity: f64, gamma: f64, h_initial: f64, beta: f64) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::invalid(format!(
                "impurity chain needs an odd length of at least 3, got {n}"
            )));
        }
        if !(beta >= 0.0) {
            return Err(Error::invalid(format!(
                "inverse temperature must be non-negative, got {beta}"
            )));
        }
        Ok(Self {
            n,
            j_impurity,
            gamma,
            h_initial,
            h_final: 0.0,
            beta,
        })
    }

    pub fn with_final_field(mut self, h: f64) -> Self {
        self.h_final = h;
        self
    }

    /// 0-based index of the central site.
    pub fn center(&self) -> usize {
        (self.n - 1) / 2
    }

    pub fn bond(&self, i: usize) -> f64 {
        let c = self.center();
        if i + 1 == c || i == c {
            self.j_impurity
        } else {
            1.0
        }
    }

    /// `K = i h` for `H = ¼ wᵀ K w` with `w_{2j} = c_j + c_j†`,
    /// `w_{2j+1} = i(c_j - c_j†)`.
    pub fn majorana_hamiltonian(&self, field: f64) -> CMatrix {
        let dim = 2 * self.n;
        let mut h = vec![0.0; dim * dim];
        let mut add = |a: usize, b: usize, coef: f64| {
            h[a * dim + b] += 2.0 * coef;
            h[b * dim + a] -= 2.0 * coef;
        };
        for j in 0..self.n {
            add(2 * j, 2 * j + 1, field);
        }
        for i in 0..self.n - 1 {
            let jb = self.bond(i);
            add(2 * i + 1, 2 * i + 2, -jb * (1.0 + self.gamma) / 2.0);
            add(2 * i, 2 * i + 3, jb * (1.0 - self.gamma) / 2.0);
        }
        CMatrix::from_fn(dim, dim, |a, b| C64::new(0.0, h[a * dim + b]))
    }

    /// `⟨w_a w_b⟩` of the initial state: `I + tanh(βK/2)`.
    pub fn initial_correlations(&self) -> Result<CMatrix> {
        let eig = dense_hermitian_eig(&self.majorana_hamiltonian(self.h_initial))?;
        let beta = self.beta;
        let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        let f = eig.function(|e| {
            let v = if beta.is_infinite() {
                if e.abs() <= 1e-12 * scale {
                    0.0
                } else {
                    e.signum()
                }
            } else {
                (0.5 * beta * e).tanh()
            };
            C64::new(v, 0.0)
        });
        let dim = 2 * self.n;
        Ok(CMatrix::identity(dim, dim) + f)
    }

    /// Evolution engine for repeated time queries.
    pub fn evolution(&self) -> Result<ImpurityEvolution> {
        let initial = self.initial_correlations()?;
        let generator = dense_hermitian_eig(&self.majorana_hamiltonian(self.h_final))?;
        let rotated = generator.vectors.adjoint() * &initial * generator.vectors.conjugate();
        Ok(ImpurityEvolution {
            initial,
            generator,
            rotated,
        })
    }
}

pub struct ImpurityEvolution {
    initial: CMatrix,
    generator: SpectralDecomposition,
    /// `V† M(0) V̄` for `R = V e^{-iEt} V†`.
    rotated: CMatrix,
}

impl ImpurityEvolution {
    /// `M(t) = R M(0) Rᵀ` with `R = e^{ht} = e^{-iKt}`.
    pub fn correlations(&self, t: f64) -> CMatrix {
        let r = self.generator.function(|e| C64::from_polar(1.0, -e * t));
        &r * &self.initial * r.transpose()
    }

    /// `⟨σᶻ_j⟩(t)` for every site.
    pub fn sigma_z(&self, t: f64) -> Vec<f64> {
        let m = self.correlations(t);
        (0..m.nrows() / 2)
            .map(|j| (C64::new(0.0, -1.0) * m[(2 * j, 2 * j + 1)]).re)
            .collect()
    }

    /// `⟨σᶻ_j⟩(t)` for one site in `O(n²)`.
    pub fn sigma_z_at(&self, j: usize, t: f64) -> f64 {
        let v = &self.generator.vectors;
        let phase: Vec<C64> = self
            .generator
            .values
            .iter()
            .map(|e| C64::from_polar(1.0, -e * t))
            .collect();
        let u: Vec<C64> = (0..v.ncols()).map(|k| v[(2 * j, k)] * phase[k]).collect();
        let w: Vec<C64> = (0..v.ncols())
            .map(|l| v[(2 * j + 1, l)] * phase[l])
            .collect();
        let mut m = C64::new(0.0, 0.0);
        for (l, wl) in w.iter().enumerate() {
            let col = self.rotated.column(l);
            let s: C64 = u.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            m += s * wl;
        }
        (C64::new(0.0, -1.0) * m).re
    }
}

/// `C_j(t) = ⟨σᶻ_j⟩(t) - ⟨σᶻ_j⟩(0)` for 0-based site `j`.
pub fn impurity_chain_correlator(chain: &ImpurityChain, site: usize, t: f64) -> Result<f64> {
    if site >= chain.n {
        return Err(Error::invalid(format!(
            "site {site} outside a chain of {}",
            chain.n
        )));
    }
    let ev = chain.evolution()?;
    Ok(ev.sigma_z_at(site, t) - ev.sigma_z_at(site, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vanishes_at_zero_time() {
        let chain = ImpurityChain::new(9, 0.3, 0.8, 0.7, f64::INFINITY).unwrap();
        for j in 0..9 {
            assert!(impurity_chain_correlator(&chain, j, 0.0).unwrap().abs() < 1e-13);
        }
    }

    #[test]
    fn single_spin_polarization() {
        let chain = ImpurityChain::new(3, 0.0, 1.0, 0.5, 2.0).unwrap();
        // both bonds touch the center, so every spin is thermal in the bare field
        let ev = ImpurityChain {
            j_impurity: 0.0,
            ..chain
        }
        .evolution()
        .unwrap();
        let z = ev.sigma_z(0.0);
        assert!((z[1] - (2.0f64 * 0.5).tanh()).abs() < 1e-12);
    }

    #[test]
    fn single_site_matches_full_matrix() {
        let ev = ImpurityChain::new(11, 1.5, 0.7, 0.5, f64::INFINITY)
            .unwrap()
            .evolution()
            .unwrap();
        for t in [0.0, 0.8, 3.1] {
            let all = ev.sigma_z(t);
            for j in [0, 5, 9] {
                assert!((ev.sigma_z_at(j, t) - all[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_even_length() {
        assert!(ImpurityChain::new(8, 1.0, 1.0, 0.5, 1.0).is_err());
    }
}
