//! Periodic XY chain in its fermionic mode picture.
//!
//! After Jordan–Wigner and Fourier transformation the chain Hamiltonian
//! splits into independent 4×4 blocks, one per momentum pair `(k, -k)`,
//! in the basis `|0⟩, c_k†c_{-k}†|0⟩, c_k†|0⟩, c_{-k}†|0⟩`. Spin
//! observables are rebuilt from the per-block states through Wick's theorem.
//!
//! Sign conventions: `H = -Σ J[(1+γ)/2 σˣσˣ + (1-γ)/2 σʸσʸ] - h Σ σᶻ`,
//! `λ_chain = J/h`, and `σᶻ = 2c†c - 1`.

mod asymptotic;
mod correlation;
mod impurity;
mod modes;

pub use asymptotic::{asymptotic_concurrence, AsymptoticConcurrence, AsymptoticOptions};
pub use correlation::{
    two_site_rdm, ContractionSet, Correlators, Majorana, DEFAULT_MAX_SEPARATION,
};
pub use impurity::{impurity_chain_correlator, ImpurityChain};
pub use modes::{
    evolve_numeric, evolve_proportional, evolve_step, mode_hamiltonian, thermal_initial,
    ChainDynamics, Propagation,
};

use crate::drive::Waveform;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which momentum set the mode decomposition uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sector {
    /// `φ_p = (2p-1)π/N`: the even-fermion-parity sector, which holds the
    /// ground state and is exact against full-Hilbert evolution.
    #[default]
    Antiperiodic,
    /// `φ_p = 2πp/N`.
    Periodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec {
    n: usize,
    gamma: f64,
    j: Waveform,
    h: Waveform,
    beta: f64,
    sector: Sector,
}

impl ChainSpec {
    /// `beta` is the inverse temperature; `f64::INFINITY` gives the ground state.
    pub fn new(n: usize, gamma: f64, j: Waveform, h: Waveform, beta: f64) -> Result<Self> {
        if n < 4 || n % 2 == 1 {
            return Err(Error::invalid(format!(
                "chain length must be even and at least 4, got {n}"
            )));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::invalid(format!(
                "anisotropy must lie in [0, 1], got {gamma}"
            )));
        }
        if !(beta >= 0.0) {
            return Err(Error::invalid(format!(
                "inverse temperature must be non-negative, got {beta}"
            )));
        }
        Ok(Self {
            n,
            gamma,
            j,
            h,
            beta,
            sector: Sector::default(),
        })
    }

    pub fn with_sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn coupling(&self) -> &Waveform {
        &self.j
    }

    pub fn field(&self) -> &Waveform {
        &self.h
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn mode_count(&self) -> usize {
        self.n / 2
    }

    /// Block `p` in `1..=N/2`.
    pub fn mode(&self, p: usize) -> Result<ModeBlock> {
        if p == 0 || p > self.mode_count() {
            return Err(Error::invalid(format!(
                "mode index {p} outside 1..={}",
                self.mode_count()
            )));
        }
        let phi = match self.sector {
            Sector::Antiperiodic => (2 * p - 1) as f64 * std::f64::consts::PI / self.n as f64,
            Sector::Periodic => 2.0 * std::f64::consts::PI * p as f64 / self.n as f64,
        };
        Ok(ModeBlock {
            p,
            phi,
            delta: 2.0 * self.gamma * phi.sin(),
        })
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeBlock> + '_ {
        (1..=self.mode_count()).map(|p| self.mode(p).expect("index in range"))
    }

    /// Breakpoints of both drives.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        let mut b = self.j.breakpoints();
        b.extend(self.h.breakpoints());
        b
    }
}

/// Momentum data of one block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeBlock {
    pub p: usize,
    pub phi: f64,
    /// `2γ sin φ`
    pub delta: f64,
}

impl ModeBlock {
    /// `α = -2J cos φ - 2h`
    pub fn alpha(&self, j: f64, h: f64) -> f64 {
        -2.0 * j * self.phi.cos() - 2.0 * h
    }
}
