//! Entanglement dynamics of quantum spin systems.
//!
//! Two engines share one set of numerical kernels:
//!
//! * [`chain1d`]: the periodic XY chain solved exactly in its fermionic mode
//!   picture, with time-dependent couplings and fields, plus an inhomogeneous
//!   open chain treated through its Majorana (Bogoliubov–de Gennes) form.
//! * [`lattice2d`]: finite triangular patches (7 and 19 sites) of the
//!   transverse-field XY model, handled by exact diagonalization with a
//!   matrix-free Hamiltonian.
//!
//! [`entanglement`] turns two-site reduced density matrices into Wootters
//! concurrence and entanglement of formation, and [`harness`] drives scans
//! and time series from configuration files.

// `!(x > 0.0)` style guards deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chain1d;
pub mod drive;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod lattice2d;
pub mod numerics;
pub mod oracle;

pub use drive::Waveform;
pub use entanglement::{concurrence, TwoSiteDensity};
pub use error::{Error, Result};
pub use lattice2d::StateVector;
pub use numerics::{AntisymmetricMatrix, CMatrix, HermitianOperator, SpectralDecomposition, C64};
