//! Matrix-free lattice code against dense Kronecker-product references.

use entadyn::lattice2d::{
    apply_hamiltonian, evolve_krylov, evolve_projection, ground_state, initial_ground_state,
    two_site_rdm_direct, FieldSchedule, GroundMethod, Impurity, KrylovOptions, LatticeSpec,
};
use entadyn::numerics::dense_hermitian_eig;
use entadyn::oracle::{dense_lattice_evolution, dense_lattice_hamiltonian, partial_trace_rdm};
use entadyn::{CMatrix, StateVector, Waveform, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_block(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

fn random_bonds(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut bonds: Vec<(usize, usize)> = (0..n)
        .map(|i| (i, (i + 1) % n))
        .filter(|(a, b)| a != b)
        .collect();
    for _ in 0..n {
        let (a, b) = (rng.random_range(0..n), rng.random_range(0..n));
        if a != b && !bonds.contains(&(a, b)) && !bonds.contains(&(b, a)) {
            bonds.push((a, b));
        }
    }
    bonds.sort();
    bonds.dedup();
    bonds
}

#[test]
fn hamiltonian_matches_kronecker_oracle_up_to_ten_sites() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 3..=10 {
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
                    LatticeSpec::from_bonds(n, &bonds, 1.0, gamma, imp, Waveform::constant(h))
                        .unwrap();
                let dense = dense_lattice_hamiltonian(&spec, h);
                let y = random_block(&mut rng, 1 << n, 3);
                let got = apply_hamiltonian(&spec, 0.0, &y).unwrap();
                let err = (&got - &dense * &y).camax();
                assert!(err < 1e-12, "n = {n}, γ = {gamma}, {imp:?}: {err:e}");
            }
        }
    }
}

#[test]
fn seven_site_patch_hamiltonian_with_impurities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for imp in [
        Impurity::Single {
            site: 0,
            alpha: -0.5,
        },
        Impurity::Single {
            site: 3,
            alpha: 1.0,
        },
        Impurity::Double {
            sites: (0, 1),
            alpha1: 0.7,
            alpha2: -0.3,
        },
    ] {
        let spec = LatticeSpec::patch(7, 1.3, 0.4, &imp, Waveform::constant(0.9)).unwrap();
        let y = random_block(&mut rng, 128, 2);
        let err = (apply_hamiltonian(&spec, 0.0, &y).unwrap()
            - dense_lattice_hamiltonian(&spec, 0.9) * &y)
            .camax();
        assert!(err < 1e-12);
    }
}

#[test]
fn ground_energy_matches_dense_diagonalization() {
    let spec = LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, Waveform::constant(2.61)).unwrap();
    let dense = dense_hermitian_eig(&dense_lattice_hamiltonian(&spec, 2.61)).unwrap();
    for method in [GroundMethod::Lanczos, GroundMethod::Tracemin] {
        let g = ground_state(&spec, 0.0, method).unwrap();
        assert!((g.energy - dense.values[0]).abs() < 1e-10, "{method:?}");
    }
}

#[test]
fn direct_rdm_matches_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let v = random_block(&mut rng, 128, 1);
    let psi = StateVector(
        (v.clone() / C64::new(v.norm(), 0.0))
            .iter()
            .copied()
            .collect(),
    );
    for (i, j) in [(0, 1), (3, 4), (6, 2), (5, 0)] {
        let direct = two_site_rdm_direct(&psi, i, j).unwrap();
        let reference = partial_trace_rdm(&psi.0, 7, i, j);
        assert!((direct.matrix() - reference).camax() < 1e-12, "({i}, {j})");
    }
}

/// The 2-D field forms: step, exponential, hyperbolic and periodic, all with a = 1.
fn field_forms() -> Vec<(&'static str, Waveform)> {
    vec![
        ("step", Waveform::step(0.5, 1.5, 0.0)),
        (
            "exponential",
            Waveform::Exponential {
                initial: 1.0,
                r#final: 3.5,
                rate: 0.5,
            },
        ),
        (
            "hyperbolic",
            Waveform::Tanh {
                initial: 1.0,
                r#final: 2.0,
                rate: 0.5,
                center: 0.0,
            },
        ),
        (
            "periodic",
            Waveform::OffsetSine {
                a: 1.0,
                omega: 0.5,
                phase: 0.0,
            },
        ),
    ]
}

fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[test]
fn three_evolvers_agree_for_all_field_forms() {
    for (name, field) in field_forms() {
        let initial = match field {
            Waveform::Step { before, .. } => before,
            _ => 1.0,
        };
        let spec = LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, field.clone())
            .unwrap()
            .with_initial_field(initial);
        let g = initial_ground_state(&spec, GroundMethod::Lanczos).unwrap();
        let schedule = FieldSchedule::from_waveform(&field, 10.0, 0.05).unwrap();
        let projection = evolve_projection(&spec, g.vector(), &schedule, 50).unwrap();
        let krylov = evolve_krylov(
            &spec,
            g.vector(),
            &schedule,
            &KrylovOptions {
                record_every: 50,
                ..Default::default()
            },
        )
        .unwrap();
        let dense = dense_lattice_evolution(&spec, &g.vector().0, &schedule);
        let (p, k) = (projection.last().unwrap(), krylov.last().unwrap());
        assert!(distance(&p.0, &k.0) < 1e-8, "{name}: projection vs krylov");
        assert!(distance(&p.0, &dense) < 1e-8, "{name}: projection vs dense");
        assert!(distance(&k.0, &dense) < 1e-8, "{name}: krylov vs dense");
        for (a, b) in projection.states.iter().zip(&krylov.states) {
            assert!(distance(&a.0, &b.0) < 1e-8, "{name}: intermediate states");
        }
        assert!((p.norm() - 1.0).abs() < 1e-10);
    }
}
