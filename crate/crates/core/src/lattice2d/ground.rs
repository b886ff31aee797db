use super::{rdm::rdm_matrix, LatticeSpec, StateVector};
use crate::entanglement::{concurrence, TwoSiteDensity};
use crate::error::{Error, Result};
use crate::harness::{finite_diff, uniform_spacing};
use crate::numerics::{
    lanczos_lowest_with, tracemin_with, CMatrix, IdentityOperator, LanczosOptions, Shifted,
    TraceminOptions, C64,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GroundMethod {
    #[default]
    Lanczos,
    /// Trace minimization on `H + σI`, `σ = 1 + |Gershgorin lower bound|`.
    Tracemin,
}

/// Relative splitting below which the two lowest levels count as one
/// degenerate ground space.
const DEGENERACY: f64 = 1e-9;
/// Largest lattice for which scans resolve the first excited level by default.
const TWO_LEVEL_MAX_SITES: usize = 14;

#[derive(Clone, Debug)]
pub struct GroundOptions {
    pub method: GroundMethod,
    /// 1 for the ground state only, 2 to also resolve the first excited level
    /// (needed for gaps and degeneracy detection).
    pub levels: usize,
    pub tol: f64,
    pub max_basis: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        Self {
            method: GroundMethod::Lanczos,
            levels: 2,
            tol: 1e-10,
            max_basis: 30,
        }
    }
}

impl GroundOptions {
    /// Default levels for scanning `spec`: one level beyond 14 sites.
    pub fn for_scan(spec: &LatticeSpec) -> Self {
        let levels = if spec.sites() > TWO_LEVEL_MAX_SITES {
            1
        } else {
            2
        };
        Self {
            levels,
            ..Self::default()
        }
    }
}

/// Lowest level(s) and the ground space at one field value.
#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub first_excited: Option<f64>,
    /// One vector, or both when the two lowest levels are degenerate.
    pub states: Vec<StateVector>,
    pub residuals: Vec<f64>,
}

impl GroundState {
    pub fn degenerate(&self) -> bool {
        self.states.len() > 1
    }

    pub fn gap(&self) -> Option<f64> {
        self.first_excited.map(|e| e - self.energy)
    }

    pub fn vector(&self) -> &StateVector {
        &self.states[0]
    }

    /// Two-site state of the ground space (equal mixture when degenerate).
    pub fn rdm(&self, i: usize, j: usize) -> Result<TwoSiteDensity> {
        let n = self.states[0].sites();
        if i == j || i >= n || j >= n {
            return Err(Error::invalid(format!(
                "bad site pair ({i}, {j}) for {n} sites"
            )));
        }
        let mut m = CMatrix::zeros(4, 4);
        for s in &self.states {
            m += rdm_matrix(&s.0, n, i, j);
        }
        TwoSiteDensity::new(m / C64::new(self.states.len() as f64, 0.0))
    }

    /// `C(i, j)`, evaluated on the ordered pair so that `C(i, j) == C(j, i)`.
    pub fn concurrence(&self, i: usize, j: usize) -> Result<f64> {
        Ok(concurrence(&self.rdm(i.min(j), i.max(j))?))
    }
}

/// Ground state with the field frozen at `h(t_frozen)`.
pub fn ground_state(
    spec: &LatticeSpec,
    t_frozen: f64,
    method: GroundMethod,
) -> Result<GroundState> {
    let opts = GroundOptions {
        method,
        ..GroundOptions::default()
    };
    ground_state_at_field(spec, spec.field().eval(t_frozen), &opts, &[])
}

/// Ground state of the initial field, the usual starting point for dynamics.
pub fn initial_ground_state(spec: &LatticeSpec, method: GroundMethod) -> Result<GroundState> {
    let opts = GroundOptions {
        method,
        ..GroundOptions::default()
    };
    ground_state_at_field(spec, spec.initial_field(), &opts, &[])
}

/// Ground state at field `h`, optionally warm-started from `start`.
pub fn ground_state_at_field(
    spec: &LatticeSpec,
    h: f64,
    opts: &GroundOptions,
    start: &[Vec<C64>],
) -> Result<GroundState> {
    let op = spec.hamiltonian(h);
    let levels = opts.levels.clamp(1, 2);
    let (values, vectors, residuals) = match opts.method {
        GroundMethod::Lanczos => {
            let lo = LanczosOptions {
                max_basis: opts.max_basis,
                start: start.to_vec(),
                ..LanczosOptions::new(levels, opts.tol)
            };
            let out = lanczos_lowest_with(&op, &lo)?;
            (out.pairs.values, out.pairs.vectors, out.residuals)
        }
        GroundMethod::Tracemin => {
            let shift = 1.0 + op.gershgorin_lower_bound().abs();
            let shifted = Shifted { inner: &op, shift };
            let out = tracemin_with(
                &shifted,
                &IdentityOperator(spec.dim()),
                &TraceminOptions::new(levels, opts.tol),
            )?;
            let values = out.pairs.values.iter().map(|v| v - shift).collect();
            (values, out.pairs.vectors, out.residuals)
        }
    };
    let first_excited = values.get(1).copied();
    let count = match first_excited {
        Some(e1) if e1 - values[0] <= DEGENERACY * values[0].abs().max(1.0) => 2,
        _ => 1,
    };
    let states = (0..count)
        .map(|c| StateVector(vectors.column(c).iter().copied().collect()))
        .collect();
    Ok(GroundState {
        energy: values[0],
        first_excited,
        states,
        residuals,
    })
}

/// `ΔE(λ)` with its first and second derivatives on a uniform `λ_lat = h/J` grid.
#[derive(Clone, Debug)]
pub struct GapScan {
    pub lambda: Vec<f64>,
    pub gap: Vec<f64>,
    pub d_gap: Vec<f64>,
    pub d2_gap: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct QptScan {
    pub lambda: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub d_concurrence: Vec<f64>,
    /// Grid points whose ground space was degenerate (equal mixture used).
    /// Only detected when the scan resolved two levels.
    pub degenerate: Vec<bool>,
    pub levels: usize,
}

fn scan<T>(
    spec: &LatticeSpec,
    grid: &[f64],
    opts: &GroundOptions,
    mut f: impl FnMut(&GroundState) -> Result<T>,
) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(grid.len());
    let mut warm: Vec<Vec<C64>> = Vec::new();
    for &lambda in grid {
        let g = ground_state_at_field(spec, lambda * spec.coupling(), opts, &warm)?;
        warm = vec![g.states[0].0.clone()];
        out.push(f(&g)?);
    }
    Ok(out)
}

pub fn energy_gap(spec: &LatticeSpec, grid: &[f64]) -> Result<GapScan> {
    let h = uniform_spacing(grid)?;
    let opts = GroundOptions {
        levels: 2,
        ..GroundOptions::default()
    };
    let gap = scan(spec, grid, &opts, |g| Ok(g.gap().unwrap_or(f64::NAN)))?;
    Ok(GapScan {
        lambda: grid.to_vec(),
        d_gap: finite_diff(&gap, h, 1)?,
        d2_gap: finite_diff(&gap, h, 2)?,
        gap,
    })
}

pub fn qpt_scan(spec: &LatticeSpec, pair: (usize, usize), grid: &[f64]) -> Result<QptScan> {
    qpt_scan_with(spec, pair, grid, &GroundOptions::for_scan(spec))
}

pub fn qpt_scan_with(
    spec: &LatticeSpec,
    pair: (usize, usize),
    grid: &[f64],
    opts: &GroundOptions,
) -> Result<QptScan> {
    let h = uniform_spacing(grid)?;
    let rows = scan(spec, grid, opts, |g| {
        Ok((g.concurrence(pair.0, pair.1)?, g.degenerate()))
    })?;
    let concurrence: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(QptScan {
        lambda: grid.to_vec(),
        d_concurrence: finite_diff(&concurrence, h, 1)?,
        degenerate: rows.iter().map(|r| r.1).collect(),
        levels: opts.levels.clamp(1, 2),
        concurrence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::Waveform;
    use crate::lattice2d::Impurity;

    fn ising7(h: f64) -> LatticeSpec {
        LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, Waveform::constant(h)).unwrap()
    }

    #[test]
    fn strong_field_polarizes() {
        let g = ground_state(&ising7(1e4), 0.0, GroundMethod::Lanczos).unwrap();
        assert!((g.energy + 7e4).abs() / 7e4 < 1e-6);
        assert!(g.vector().0[0].norm() > 1.0 - 1e-6);
    }

    #[test]
    fn zero_field_is_degenerate() {
        let g = ground_state(&ising7(0.0), 0.0, GroundMethod::Lanczos).unwrap();
        assert!(g.degenerate());
        assert!(g.gap().unwrap().abs() < 1e-10);
    }

    #[test]
    fn tracemin_agrees_with_lanczos() {
        let spec = ising7(2.61);
        let a = ground_state(&spec, 0.0, GroundMethod::Lanczos).unwrap();
        let b = ground_state(&spec, 0.0, GroundMethod::Tracemin).unwrap();
        assert!((a.energy - b.energy).abs() < 1e-9);
        assert!((a.concurrence(3, 4).unwrap() - b.concurrence(3, 4).unwrap()).abs() < 1e-8);
    }
}
