use super::StateVector;
use crate::entanglement::TwoSiteDensity;
use crate::error::{Error, Result};
use crate::numerics::{CMatrix, C64};

/// Reduced density matrix of sites `i`, `j` (basis `↑↑, ↑↓, ↓↑, ↓↓`, site
/// `i` first) by summing over the `2^{N-2}` environment patterns.
pub fn two_site_rdm_direct(psi: &StateVector, i: usize, j: usize) -> Result<TwoSiteDensity> {
    let n = psi.sites();
    if psi.0.len() != 1 << n {
        return Err(Error::invalid("state length is not a power of two"));
    }
    if i == j || i >= n || j >= n {
        return Err(Error::invalid(format!(
            "bad site pair ({i}, {j}) for {n} sites"
        )));
    }
    TwoSiteDensity::new(rdm_matrix(&psi.0, n, i, j))
}

pub(crate) fn rdm_matrix(psi: &[C64], n: usize, i: usize, j: usize) -> CMatrix {
    let (lo, hi) = (i.min(j), i.max(j));
    let mut acc = [[C64::new(0.0, 0.0); 4]; 4];
    let mut amps = [C64::new(0.0, 0.0); 4];
    for env in 0..1usize << (n - 2) {
        // spread env bits around the two held-out positions
        let low = env & ((1 << lo) - 1);
        let rest = env >> lo;
        let mid = rest & ((1 << (hi - lo - 1)) - 1);
        let top = rest >> (hi - lo - 1);
        let base = low | (mid << (lo + 1)) | (top << (hi + 1));
        for (x, a) in amps.iter_mut().enumerate() {
            let (bi, bj) = (x >> 1, x & 1);
            *a = psi[base | (bi << i) | (bj << j)];
        }
        for (x, ax) in amps.iter().enumerate() {
            if *ax == C64::new(0.0, 0.0) {
                continue;
            }
            for (y, ay) in amps.iter().enumerate() {
                acc[x][y] += ax * ay.conj();
            }
        }
    }
    CMatrix::from_fn(4, 4, |r, c| acc[r][c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::concurrence;

    #[test]
    fn all_up_is_pure_up_up() {
        let psi = StateVector::basis(5, 0);
        let rho = two_site_rdm_direct(&psi, 1, 3).unwrap();
        assert_eq!(rho.matrix()[(0, 0)], C64::new(1.0, 0.0));
        assert_eq!(rho.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn bell_pair_times_anything() {
        // (|↑↑⟩ + |↓↓⟩)/√2 on sites 1, 3 with site 0 down, sites 2, 4 up
        let mut v = vec![C64::new(0.0, 0.0); 32];
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[0b00001] = C64::new(s, 0.0);
        v[0b01011] = C64::new(s, 0.0);
        let rho = two_site_rdm_direct(&StateVector(v), 1, 3).unwrap();
        assert!((concurrence(&rho) - 1.0).abs() < 1e-12);
        assert!((rho.matrix()[(0, 3)].re - 0.5).abs() < 1e-15);
    }
}
