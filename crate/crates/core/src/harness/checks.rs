use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chain1d::{ChainDynamics, ChainSpec, Propagation};
use crate::drive::Waveform;
use crate::entanglement::{concurrence, TwoSiteDensity};
use crate::error::{Error, Result};
use crate::lattice2d::{
    apply_hamiltonian, evolve_krylov, evolve_projection, initial_ground_state, two_site_rdm_direct,
    FieldSchedule, GroundMethod, Impurity, KrylovOptions, LatticeSpec,
};
use crate::numerics::{CMatrix, OdeOptions, C64};
use crate::oracle::*;

/// Outcome of one brute-force comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

impl std::fmt::Display for OracleReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} {}: max error {:.3e} (tolerance {:.0e})",
            self.name, self.max_error, self.tolerance
        )
    }
}

pub const ORACLE_CHECKS: &[&str] = &["chain", "lattice", "hamiltonian", "rdm", "all"];

/// Run the named cross-check.
pub fn run_oracle(name: &str) -> Result<Vec<OracleReport>> {
    match name {
        "chain" => chain_check(),
        "lattice" => lattice_check(),
        "hamiltonian" => hamiltonian_check(),
        "rdm" => rdm_check(),
        "all" => {
            let mut all = hamiltonian_check()?;
            all.extend(rdm_check()?);
            all.extend(lattice_check()?);
            all.extend(chain_check()?);
            Ok(all)
        }
        _ => Err(Error::Config(vec![format!(
            "unknown oracle test `{name}`; available: {}",
            ORACLE_CHECKS.join(", ")
        )])),
    }
}

fn report(name: impl Into<String>, max_error: f64, tolerance: f64) -> OracleReport {
    OracleReport {
        name: name.into(),
        max_error,
        tolerance,
    }
}

fn random_block(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Ring plus random chords.
fn random_bonds(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..n)
        .map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))
        .collect();
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b {
            bonds.push((a.min(b), a.max(b)));
        }
    }
    bonds.sort();
    bonds.dedup();
    bonds
}

fn hamiltonian_check() -> Result<Vec<OracleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut out = Vec::new();
    for n in 3..=10 {
        let mut worst = 0.0f64;
        for gamma in [0.0, 0.5, 1.0] {
            let bonds = random_bonds(&mut rng, n);
            let impurities = [
                Impurity::None,
                Impurity::Single {
                    site: rng.random_range(0..n),
                    alpha: rng.random_range(-0.9..2.0),
                },
                Impurity::Double {
                    sites: bonds[0],
                    alpha1: rng.random_range(-0.9..2.0),
                    alpha2: rng.random_range(-0.9..2.0),
                },
            ];
            for imp in &impurities {
                let h = rng.random_range(-2.0..3.0);
                let spec =
                    LatticeSpec::from_bonds(n, &bonds, 1.0, gamma, imp, Waveform::constant(h))?;
                let y = random_block(&mut rng, 1 << n, 2);
                let got = apply_hamiltonian(&spec, 0.0, &y)?;
                worst = worst.max((&got - dense_lattice_hamiltonian(&spec, h) * &y).camax());
            }
        }
        out.push(report(
            format!("hamiltonian N={n} vs Kronecker"),
            worst,
            1e-12,
        ));
    }
    Ok(out)
}

fn rdm_check() -> Result<Vec<OracleReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = random_block(&mut rng, 128, 1);
    let psi = crate::StateVector(
        (v.clone() / C64::new(v.norm(), 0.0))
            .iter()
            .copied()
            .collect(),
    );
    let mut worst = 0.0f64;
    for i in 0..7 {
        for j in 0..7 {
            if i != j {
                let direct = two_site_rdm_direct(&psi, i, j)?;
                worst = worst.max((direct.matrix() - partial_trace_rdm(&psi.0, 7, i, j)).camax());
            }
        }
    }
    Ok(vec![report(
        "two-site RDM vs partial trace, 7 sites, all pairs",
        worst,
        1e-12,
    )])
}

fn lattice_check() -> Result<Vec<OracleReport>> {
    let forms = [
        ("step", Waveform::step(0.5, 1.5, 0.0), 0.5),
        (
            "exponential",
            Waveform::Exponential {
                initial: 1.0,
                r#final: 3.5,
                rate: 0.5,
            },
            1.0,
        ),
        (
            "hyperbolic",
            Waveform::Tanh {
                initial: 1.0,
                r#final: 2.0,
                rate: 0.5,
                center: 0.0,
            },
            1.0,
        ),
        (
            "periodic",
            Waveform::OffsetSine {
                a: 1.0,
                omega: 0.5,
                phase: 0.0,
            },
            1.0,
        ),
    ];
    let mut out = Vec::new();
    for (name, field, h0) in forms {
        let spec =
            LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, field.clone())?.with_initial_field(h0);
        let g = initial_ground_state(&spec, GroundMethod::Lanczos)?;
        let schedule = FieldSchedule::from_waveform(&field, 10.0, 0.05)?;
        let p = evolve_projection(&spec, g.vector(), &schedule, 50)?;
        let k = evolve_krylov(
            &spec,
            g.vector(),
            &schedule,
            &KrylovOptions {
                record_every: 50,
                ..Default::default()
            },
        )?;
        let dense = dense_lattice_evolution(&spec, &g.vector().0, &schedule);
        let (pl, kl) = (p.last().expect("recorded"), k.last().expect("recorded"));
        let err = distance(&pl.0, &kl.0)
            .max(distance(&pl.0, &dense))
            .max(distance(&kl.0, &dense));
        out.push(report(
            format!("7-site evolution, {name} field: projection/Krylov/dense"),
            err,
            1e-8,
        ));
    }
    Ok(out)
}

fn chain_check() -> Result<Vec<OracleReport>> {
    const N: usize = 8;
    let cases = [
        (
            "step",
            1.0,
            Waveform::constant(1.0),
            Waveform::step(0.5, 2.0, 0.5),
        ),
        (
            "exponential",
            0.6,
            Waveform::constant(1.0),
            Waveform::Exponential {
                initial: 1.0,
                r#final: 3.5,
                rate: 0.1,
            },
        ),
        (
            "cosine",
            0.5,
            Waveform::Cosine {
                amplitude: 1.0,
                rate: 0.4,
            },
            Waveform::constant(1.1),
        ),
    ];
    let times: Vec<f64> = (0..=20).map(f64::from).collect();
    let mut out = Vec::new();
    for (name, gamma, j, h) in cases {
        let (a, b) = dense_chain_parts(N, gamma);
        let at = |t: f64| &a * C64::new(j.eval(t), 0.0) + &b * C64::new(h.eval(t), 0.0);
        let psi0 = even_parity_ground_state(&at(0.0))?;
        let even = even_sector(N);
        let (ae, be) = (restrict(&a, &even), restrict(&b, &even));
        let ham = |t: f64| &ae * C64::new(j.eval(t), 0.0) + &be * C64::new(h.eval(t), 0.0);
        let start: Vec<C64> = even.iter().map(|&r| psi0[r]).collect();
        let mut opts = OdeOptions::with_tol(1e-11);
        opts.breakpoints = [j.breakpoints(), h.breakpoints()].concat();
        let states = dense_ode_trajectory(&ham, &start, &times, &opts)?;
        let dynamics = ChainDynamics::new(
            ChainSpec::new(N, gamma, j.clone(), h.clone(), f64::INFINITY)?,
            Propagation::Auto,
        )?
        .with_ode_options(OdeOptions::with_tol(1e-11));
        let sets = dynamics.contractions_at(&times)?;
        let z0 = pauli_on(N, &[(0, Pauli::Z)]);
        let xx = pauli_on(N, &[(0, Pauli::X), (1, Pauli::X)]);
        let mut worst = 0.0f64;
        for (v, set) in states.iter().zip(&sets) {
            let psi = embed(v, &even, 1 << N);
            let c = concurrence(&TwoSiteDensity::new(partial_trace_rdm(&psi, N, 0, 1))?);
            worst = worst
                .max((expectation(&psi, &z0).re - set.sigma_z()).abs())
                .max((expectation(&psi, &xx).re - set.correlators(0, 1)?.xx).abs())
                .max((c - set.concurrence(0, 1)?).abs());
        }
        out.push(report(
            format!("8-site chain, {name} drive: mode space vs full Hilbert space"),
            worst,
            1e-7,
        ));
    }
    Ok(out)
}
