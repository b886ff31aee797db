//! Transverse-field XY model on finite triangular patches.
//!
//! `H(t) = -Σ_⟨ij⟩ J_ij [(1+γ)/2 σˣ_iσˣ_j + (1-γ)/2 σʸ_iσʸ_j] - h(t) Σ_i σᶻ_i`,
//! with `λ_lat = h/J`. Site `s` is bit `s` of a basis index; a clear bit is
//! spin up (`σᶻ = +1`). Sites are 0-based in this API; the 7-site figures
//! "site 4" is index 3.

mod evolve;
mod ground;
mod hamiltonian;
mod rdm;
mod terms;

pub use evolve::{
    evolve_krylov, evolve_projection, FieldSchedule, KrylovOptions, ProjectionEvolver, Trajectory,
    PROJECTION_MAX_SITES,
};
pub use ground::{
    energy_gap, ground_state, ground_state_at_field, initial_ground_state, qpt_scan, qpt_scan_with,
    GapScan, GroundMethod, GroundOptions, GroundState, QptScan,
};
pub use hamiltonian::{apply_hamiltonian, LatticeHamiltonian};
pub use rdm::two_site_rdm_direct;
pub use terms::{sigma_z_diagonal, xx_pair_columns, xx_strings, yy_pair_signs, PauliTermTable};

use crate::drive::Waveform;
use crate::error::{Error, Result};
use crate::numerics::{norm, C64};
use serde::{Deserialize, Serialize};

/// Amplitudes over the `2^N` σᶻ product states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(pub Vec<C64>);

impl StateVector {
    pub fn sites(&self) -> usize {
        self.0.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }

    /// Product state with the given spins; `true` is down.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut v = vec![C64::new(0.0, 0.0); 1 << n];
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub coupling: f64,
}

/// Modified bonds. `alpha > -1` scales couplings by `1 + alpha`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Impurity {
    #[default]
    None,
    /// Every bond at `site` carries `(1+α)J`.
    Single { site: usize, alpha: f64 },
    /// The bond joining the two impurities carries `(1+α₁)J`; bonds from an
    /// impurity to a regular site carry `(1+α₂)J`.
    Double {
        sites: (usize, usize),
        alpha1: f64,
        alpha2: f64,
    },
}

/// The 12 bonds of the 7-site patch, 0-based: center 3, ring 0-1-2-4-6-5.
pub fn seven_site_edges() -> Vec<(usize, usize)> {
    let ring = [0usize, 1, 2, 4, 6, 5];
    let mut e: Vec<(usize, usize)> = ring.iter().map(|&s| (3.min(s), 3.max(s))).collect();
    for k in 0..6 {
        let (a, b) = (ring[k], ring[(k + 1) % 6]);
        e.push((a.min(b), a.max(b)));
    }
    e.sort();
    e
}

/// Axial coordinates of the radius-`r` hexagonal patch, row by row.
pub fn hexagon_coordinates(radius: i32) -> Vec<(i32, i32)> {
    let mut pts = Vec::new();
    for r in -radius..=radius {
        for q in (-radius).max(-r - radius)..=radius.min(-r + radius) {
            pts.push((q, r));
        }
    }
    pts
}

/// Nearest-neighbour bonds of a triangular-lattice point set.
pub fn triangular_edges(points: &[(i32, i32)]) -> Vec<(usize, usize)> {
    const STEPS: [(i32, i32); 3] = [(1, 0), (0, 1), (-1, 1)];
    let mut e = Vec::new();
    for (a, &(q, r)) in points.iter().enumerate() {
        for (dq, dr) in STEPS {
            if let Some(b) = points.iter().position(|&p| p == (q + dq, r + dr)) {
                e.push((a.min(b), a.max(b)));
            }
        }
    }
    e.sort();
    e
}

/// Bond list of the 7- or 19-site patch.
///
/// The 19-site patch is the radius-2 hexagon numbered row by row over rows
/// of 3, 4, 5, 4, 3 sites, so its center is index 9.
pub fn build_topology(sites: usize) -> Result<Vec<(usize, usize)>> {
    match sites {
        7 => Ok(seven_site_edges()),
        19 => Ok(triangular_edges(&hexagon_coordinates(2))),
        _ => Err(Error::invalid(format!(
            "no built-in patch with {sites} sites (use 7 or 19)"
        ))),
    }
}

pub fn center_site(sites: usize) -> Result<usize> {
    match sites {
        7 => Ok(3),
        19 => Ok(9),
        _ => Err(Error::invalid(format!(
            "no built-in patch with {sites} sites"
        ))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeSpec {
    sites: usize,
    coupling: f64,
    edges: Vec<Edge>,
    gamma: f64,
    field: Waveform,
    initial_field: Option<f64>,
}

impl LatticeSpec {
    /// Built-in patch with uniform coupling `j` and the given impurities.
    pub fn patch(
        sites: usize,
        j: f64,
        gamma: f64,
        impurity: &Impurity,
        field: Waveform,
    ) -> Result<Self> {
        let bonds = build_topology(sites)?;
        Self::from_bonds(sites, &bonds, j, gamma, impurity, field)
    }

    pub fn from_bonds(
        sites: usize,
        bonds: &[(usize, usize)],
        j: f64,
        gamma: f64,
        impurity: &Impurity,
        field: Waveform,
    ) -> Result<Self> {
        if sites == 0 || sites > 24 {
            return Err(Error::invalid(format!(
                "lattice size must be in 1..=24, got {sites}"
            )));
        }
        let has_bond = |a: usize, b: usize| {
            bonds
                .iter()
                .any(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a))
        };
        let check_alpha = |a: f64| {
            if a > -1.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "impurity strength α = {a} must exceed -1"
                )))
            }
        };
        let scale: Box<dyn Fn(usize, usize) -> f64> = match *impurity {
            Impurity::None => Box::new(|_, _| 1.0),
            Impurity::Single { site, alpha } => {
                check_alpha(alpha)?;
                if site >= sites {
                    return Err(Error::invalid(format!(
                        "impurity site {site} outside the lattice"
                    )));
                }
                Box::new(move |a, b| {
                    if a == site || b == site {
                        1.0 + alpha
                    } else {
                        1.0
                    }
                })
            }
            Impurity::Double {
                sites: (p, q),
                alpha1,
                alpha2,
            } => {
                check_alpha(alpha1)?;
                check_alpha(alpha2)?;
                if p >= sites || q >= sites || p == q {
                    return Err(Error::invalid(format!("impurity sites ({p}, {q}) invalid")));
                }
                if !has_bond(p, q) {
                    return Err(Error::invalid(format!(
                        "impurity sites ({p}, {q}) are not bonded"
                    )));
                }
                Box::new(move |a, b| {
                    let ia = a == p || a == q;
                    let ib = b == p || b == q;
                    match (ia, ib) {
                        (true, true) => 1.0 + alpha1,
                        (true, false) | (false, true) => 1.0 + alpha2,
                        _ => 1.0,
                    }
                })
            }
        };
        let mut edges = Vec::with_capacity(bonds.len());
        for &(a, b) in bonds {
            if a == b || a >= sites || b >= sites {
                return Err(Error::invalid(format!("bad bond ({a}, {b})")));
            }
            edges.push(Edge {
                i: a.min(b),
                j: a.max(b),
                coupling: j * scale(a, b),
            });
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!(
                "anisotropy must lie in [0, 1], got {gamma}"
            )));
        }
        Ok(Self {
            sites,
            coupling: j,
            edges,
            gamma,
            field,
            initial_field: None,
        })
    }

    /// Field used for the initial ground state instead of `h(0)`; covers
    /// drives that jump right after `t = 0`.
    pub fn with_initial_field(mut self, h: f64) -> Self {
        self.initial_field = Some(h);
        self
    }

    pub fn with_field(mut self, field: Waveform) -> Self {
        self.field = field;
        self
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    /// Regular (non-impurity) coupling `J`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn field(&self) -> &Waveform {
        &self.field
    }

    pub fn initial_field(&self) -> f64 {
        self.initial_field.unwrap_or_else(|| self.field.eval(0.0))
    }

    pub fn degree(&self, site: usize) -> usize {
        self.edges
            .iter()
            .filter(|e| e.i == site || e.j == site)
            .count()
    }

    /// Hamiltonian with the field frozen at `h`.
    pub fn hamiltonian(&self, h: f64) -> LatticeHamiltonian {
        LatticeHamiltonian::new(self, h)
    }

    /// Hamiltonian at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> LatticeHamiltonian {
        self.hamiltonian(self.field.eval(t))
    }
}
