//! Brute-force reference implementations on the full Hilbert space.
//!
//! Everything here is built from explicit Kronecker products and dense
//! matrices, independent of the mode-space and matrix-free code paths.
//! Basis index bit `s` is site `s`; bit 0 is spin up.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::lattice2d::{FieldSchedule, LatticeSpec};
use crate::numerics::{dense_hermitian_eig, integrate_state, CMatrix, OdeOptions, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let (o, l, i) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0));
        let m = match self {
            Pauli::I => [l, o, o, l],
            Pauli::X => [o, l, l, o],
            Pauli::Y => [o, -i, i, o],
            Pauli::Z => [l, o, o, -l],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }
}

/// `⊗_s ops[s]` with site `n−1` as the most significant factor.
pub fn kron_sites(ops: &[CMatrix]) -> CMatrix {
    let mut acc = CMatrix::identity(1, 1);
    for op in ops.iter().rev() {
        acc = acc.kronecker(op);
    }
    acc
}

/// Product of single-site operators placed on the given sites.
pub fn site_product(n: usize, placed: &[(usize, CMatrix)]) -> CMatrix {
    let mut ops = vec![Pauli::I.matrix(); n];
    for (s, op) in placed {
        ops[*s] = &ops[*s] * op;
    }
    kron_sites(&ops)
}

pub fn pauli_on(n: usize, placed: &[(usize, Pauli)]) -> CMatrix {
    let v: Vec<(usize, CMatrix)> = placed.iter().map(|(s, p)| (*s, p.matrix())).collect();
    site_product(n, &v)
}

/// `−Σ J_ij[(1+γ)/2 σˣσˣ + (1−γ)/2 σʸσʸ] − h Σ σᶻ` on explicit bonds.
pub fn dense_xy_hamiltonian(
    n: usize,
    bonds: &[(usize, usize, f64)],
    gamma: f64,
    h: f64,
) -> CMatrix {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    for &(i, j, c) in bonds {
        m -= pauli_on(n, &[(i, Pauli::X), (j, Pauli::X)]) * C64::new(c * (1.0 + gamma) / 2.0, 0.0);
        m -= pauli_on(n, &[(i, Pauli::Y), (j, Pauli::Y)]) * C64::new(c * (1.0 - gamma) / 2.0, 0.0);
    }
    for s in 0..n {
        m -= pauli_on(n, &[(s, Pauli::Z)]) * C64::new(h, 0.0);
    }
    m
}

pub fn dense_lattice_hamiltonian(spec: &LatticeSpec, h: f64) -> CMatrix {
    let bonds: Vec<(usize, usize, f64)> = spec
        .edges()
        .iter()
        .map(|e| (e.i, e.j, e.coupling))
        .collect();
    dense_xy_hamiltonian(spec.sites(), &bonds, spec.gamma(), h)
}

/// Periodic XY chain of `n` sites.
pub fn dense_chain_hamiltonian(n: usize, j: f64, h: f64, gamma: f64) -> CMatrix {
    let bonds: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, j)).collect();
    dense_xy_hamiltonian(n, &bonds, gamma, h)
}

/// `(A, B)` with `H(j, h) = j·A + h·B` for the periodic chain.
pub fn dense_chain_parts(n: usize, gamma: f64) -> (CMatrix, CMatrix) {
    (
        dense_chain_hamiltonian(n, 1.0, 0.0, gamma),
        dense_chain_hamiltonian(n, 0.0, 1.0, gamma),
    )
}

/// Basis states with an even number of down spins.
pub fn even_sector(n: usize) -> Vec<usize> {
    (0..1usize << n)
        .filter(|r| r.count_ones() % 2 == 0)
        .collect()
}

/// Block of `m` on the basis states `idx`.
pub fn restrict(m: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |a, b| m[(idx[a], idx[b])])
}

/// Inverse of restricting a vector to `idx`.
pub fn embed(v: &[C64], idx: &[usize], dim: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (x, &r) in v.iter().zip(idx) {
        out[r] = *x;
    }
    out
}

/// Lowest state of `h` among states with an even number of down spins.
pub fn even_parity_ground_state(h: &CMatrix) -> Result<Vec<C64>> {
    let dim = h.nrows();
    let even = even_sector(dim.trailing_zeros() as usize);
    let eig = dense_hermitian_eig(&restrict(h, &even))?;
    if eig.values.len() > 1 && eig.values[1] - eig.values[0] < 1e-9 * eig.values[0].abs().max(1.0) {
        return Err(Error::invalid("even-parity ground state is degenerate"));
    }
    Ok(embed(&eig.vector(0), &even, dim))
}

pub fn expectation(psi: &[C64], op: &CMatrix) -> C64 {
    let v = CMatrix::from_column_slice(psi.len(), 1, psi);
    (v.adjoint() * op * &v)[(0, 0)]
}

/// `ρ_ij` from expectation values `ρ[x, y] = ⟨ψ| (|y⟩⟨x|)_ij |ψ⟩`, `x = 2·bit_i + bit_j`.
pub fn partial_trace_rdm(psi: &[C64], n: usize, i: usize, j: usize) -> CMatrix {
    let ket_bra = |to: usize, from: usize| {
        let mut m = CMatrix::zeros(2, 2);
        m[(to, from)] = C64::new(1.0, 0.0);
        m
    };
    CMatrix::from_fn(4, 4, |x, y| {
        let op = site_product(
            n,
            &[(i, ket_bra(y >> 1, x >> 1)), (j, ket_bra(y & 1, x & 1))],
        );
        expectation(psi, &op)
    })
}

/// `e^A` by scaling and squaring with a Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let norm = a.iter().map(|x| x.norm()).fold(0.0, f64::max) * a.nrows() as f64;
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let s = a / C64::new(2f64.powi(squarings), 0.0);
    let n = a.nrows();
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &s / C64::new(k as f64, 0.0);
        sum += &term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn apply(m: &CMatrix, psi: &[C64]) -> Vec<C64> {
    (m * CMatrix::from_column_slice(psi.len(), 1, psi))
        .iter()
        .copied()
        .collect()
}

/// Lattice state after `schedule`, one dense exponential per distinct field.
pub fn dense_lattice_evolution(
    spec: &LatticeSpec,
    psi0: &[C64],
    schedule: &FieldSchedule,
) -> Vec<C64> {
    let mut cache: HashMap<u64, CMatrix> = HashMap::new();
    let mut psi = psi0.to_vec();
    for &h in &schedule.fields {
        let u = cache.entry(h.to_bits()).or_insert_with(|| {
            expm(&(dense_lattice_hamiltonian(spec, h) * C64::new(0.0, -schedule.dt)))
        });
        psi = apply(u, &psi);
    }
    psi
}

/// States of `iψ̇ = H(t)ψ` at sorted `times` by adaptive integration.
pub fn dense_ode_trajectory(
    h: &dyn Fn(f64) -> CMatrix,
    psi0: &[C64],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<C64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut psi = psi0.to_vec();
    let mut t0 = 0.0;
    for &t in times {
        if t < t0 {
            return Err(Error::invalid("times must be sorted"));
        }
        if t > t0 {
            let shifted = |s: f64| h(s + t0);
            let mut o = opts.clone();
            o.breakpoints = opts
                .breakpoints
                .iter()
                .map(|b| b - t0)
                .filter(|b| *b > 0.0)
                .collect();
            psi = integrate_state(&shifted, &psi, t - t0, &o)?;
            t0 = t;
        }
        out.push(psi.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_z_is_diagonal_with_bit_sign() {
        let z = pauli_on(3, &[(1, Pauli::Z)]);
        for r in 0..8 {
            let s = if (r >> 1) & 1 == 0 { 1.0 } else { -1.0 };
            assert_eq!(z[(r, r)], C64::new(s, 0.0));
        }
    }

    #[test]
    fn expm_of_pauli_rotation() {
        let t = 0.7;
        let u = expm(&(Pauli::X.matrix() * C64::new(0.0, -t)));
        assert!((u[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-14);
        assert!((u[(0, 1)] - C64::new(0.0, -t.sin())).norm() < 1e-14);
    }

    #[test]
    fn product_state_rdm() {
        let mut psi = vec![C64::new(0.0, 0.0); 8];
        psi[0b010] = C64::new(1.0, 0.0);
        let r = partial_trace_rdm(&psi, 3, 1, 0);
        assert_eq!(r[(2, 2)], C64::new(1.0, 0.0));
        assert!((r.norm() - 1.0).abs() < 1e-15);
    }
}
