use super::LatticeSpec;
use crate::error::{Error, Result};

/// Diagonal of `Σ_s σᶻ_s`, grown by the recursion `v ← (v; v - 2)` from `(N)`.
pub fn sigma_z_diagonal(n: usize) -> Vec<i32> {
    let mut v = vec![n as i32];
    for _ in 0..n {
        let shifted: Vec<i32> = v.iter().map(|x| x - 2).collect();
        v.extend(shifted);
    }
    v
}

fn check_pair(n: usize, i: usize, j: usize) -> Result<()> {
    if i == j {
        return Err(Error::invalid(format!(
            "σˣσˣ needs two distinct sites, got {i} twice"
        )));
    }
    if i >= n || j >= n {
        return Err(Error::invalid(format!(
            "sites ({i}, {j}) outside an {n}-site lattice"
        )));
    }
    Ok(())
}

/// Column of the single nonzero entry in each row of `σˣ_iσˣ_j`.
pub fn xx_pair_columns(n: usize, i: usize, j: usize) -> Result<Vec<usize>> {
    check_pair(n, i, j)?;
    let mask = (1usize << i) | (1usize << j);
    Ok((0..1usize << n).map(|r| r ^ mask).collect())
}

/// `σʸ_iσʸ_j` entry at `(r, r ^ mask)`: `-1` when bits `i`, `j` of `r`
/// agree, `+1` otherwise.
pub fn yy_pair_signs(n: usize, i: usize, j: usize) -> Result<Vec<i8>> {
    check_pair(n, i, j)?;
    Ok((0..1usize << n)
        .map(|r| if (r >> i) & 1 == (r >> j) & 1 { -1 } else { 1 })
        .collect())
}

/// Runs of consecutive ones in `σˣ_iσˣ_j` (`i > j`) over the rows whose bit
/// `j` is clear, as 1-based `(first row, first column, length)`. There are
/// `2^{N-j-1}` runs of length `2^j`; the remaining ones are their mirror
/// images across the diagonal.
pub fn xx_strings(n: usize, i: usize, j: usize) -> Result<Vec<(usize, usize, usize)>> {
    check_pair(n, i, j)?;
    let (i, j) = (i.max(j), i.min(j));
    let len = 1usize << j;
    let mut out = Vec::with_capacity(1 << (n - j - 1));
    for s in 0..1usize << (n - j - 1) {
        let row = s << (j + 1);
        let col = if (row >> i) & 1 == 0 {
            row + (1 << i) + (1 << j)
        } else {
            row - (1 << i) + (1 << j)
        };
        out.push((row + 1, col + 1, len));
    }
    Ok(out)
}

/// Diagonal and per-edge index tables of a lattice Hamiltonian.
#[derive(Clone, Debug)]
pub struct PauliTermTable {
    pub v: Vec<i32>,
    pub columns: Vec<Vec<usize>>,
    pub signs: Vec<Vec<i8>>,
}

impl PauliTermTable {
    pub fn build(spec: &LatticeSpec) -> Result<Self> {
        let n = spec.sites();
        let mut columns = Vec::with_capacity(spec.edges().len());
        let mut signs = Vec::with_capacity(spec.edges().len());
        for e in spec.edges() {
            columns.push(xx_pair_columns(n, e.j, e.i)?);
            signs.push(yy_pair_signs(n, e.j, e.i)?);
        }
        Ok(Self {
            v: sigma_z_diagonal(n),
            columns,
            signs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_examples() {
        assert_eq!(sigma_z_diagonal(1), vec![1, -1]);
        assert_eq!(sigma_z_diagonal(2), vec![2, 0, 0, -2]);
        let v = sigma_z_diagonal(19);
        assert_eq!(v[0], 19);
        assert_eq!(v[(1 << 19) - 1], -19);
        for (b, x) in sigma_z_diagonal(8).iter().enumerate() {
            assert_eq!(*x, 8 - 2 * b.count_ones() as i32);
        }
    }

    #[test]
    fn two_site_anti_diagonal() {
        let c: Vec<usize> = xx_pair_columns(2, 1, 0)
            .unwrap()
            .iter()
            .map(|x| x + 1)
            .collect();
        assert_eq!(c, vec![4, 3, 2, 1]);
        assert!(xx_pair_columns(3, 1, 1).is_err());
    }

    #[test]
    fn five_site_strings() {
        let s = xx_strings(5, 3, 2).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0], (1, 13, 4));
        let cols = xx_pair_columns(5, 3, 2).unwrap();
        for (row, col, len) in s {
            for k in 0..len {
                assert_eq!(cols[row - 1 + k], col - 1 + k);
            }
        }
    }
}
