//! Invariants of the chain engines: scaling, isotropic constancy, block
//! order, large-N convergence and the impurity chain against references.

use entadyn::chain1d::{
    asymptotic_concurrence, impurity_chain_correlator, AsymptoticOptions, ChainDynamics, ChainSpec,
    ContractionSet, ImpurityChain, Propagation,
};
use entadyn::lattice2d::{
    evolve_krylov, ground_state_at_field, FieldSchedule, GroundOptions, Impurity, KrylovOptions,
    LatticeSpec,
};
use entadyn::{StateVector, Waveform, C64};
use proptest::prelude::*;

fn spec(n: usize, gamma: f64, j: Waveform, h: Waveform, beta: f64) -> ChainSpec {
    ChainSpec::new(n, gamma, j, h, beta).unwrap()
}

fn nn(spec: ChainSpec, times: &[f64]) -> Vec<f64> {
    ChainDynamics::new(spec, Propagation::Auto)
        .unwrap()
        .contractions_at(times)
        .unwrap()
        .iter()
        .map(|c| c.concurrence(0, 1).unwrap())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ground_state_depends_on_ratio_only(lambda in 0.05..4.0f64, h in 0.2..3.0f64, gamma in 0.0..=1.0f64) {
        let c = |scale: f64| {
            let s = spec(400, gamma, Waveform::constant(scale * lambda * h), Waveform::constant(scale * h), f64::INFINITY);
            ChainDynamics::new(s, Propagation::Step).unwrap().contractions(0.0).unwrap().concurrence(0, 1).unwrap()
        };
        prop_assert!((c(1.0) - c(2.0)).abs() < 1e-8);
    }

    #[test]
    fn isotropic_concurrence_ignores_coupling_drive(j0 in 0.2..3.0f64, j1 in 0.2..3.0f64, rate in 0.05..2.0f64, h in 0.2..2.0f64) {
        let times = [0.0, 1.5, 4.0, 9.0];
        let step = nn(spec(200, 0.0, Waveform::step(j0, j1, 0.0), Waveform::constant(h), f64::INFINITY), &times);
        let exp = nn(spec(200, 0.0, Waveform::Exponential { initial: j0, r#final: j1, rate }, Waveform::constant(h), 2.0), &times);
        for s in [step, exp] {
            for c in &s {
                prop_assert!((c - s[0]).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn block_order_does_not_matter(seed in any::<u64>(), t in 0.0..20.0f64) {
        let s = spec(300, 0.7, Waveform::constant(1.0), Waveform::step(0.4, 1.8, 0.0), 3.0);
        let dynamics = ChainDynamics::new(s.clone(), Propagation::Step).unwrap();
        let states = &dynamics.densities_at(&[t]).unwrap()[0];
        let phi: Vec<f64> = s.modes().map(|m| m.phi).collect();
        let mut order: Vec<usize> = (0..phi.len()).collect();
        let mut x = seed;
        for i in (1..order.len()).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (x >> 33) as usize % (i + 1));
        }
        let a = ContractionSet::from_states(&s, &phi, states).unwrap();
        let pphi: Vec<f64> = order.iter().map(|&i| phi[i]).collect();
        let pstates: Vec<_> = order.iter().map(|&i| states[i].clone()).collect();
        let b = ContractionSet::from_states(&s, &pphi, &pstates).unwrap();
        for r in 1..=3 {
            prop_assert!((a.concurrence(0, r).unwrap() - b.concurrence(0, r).unwrap()).abs() < 1e-15);
        }
        prop_assert!((a.sigma_z() - b.sigma_z()).abs() < 1e-15);
    }
}

#[test]
fn doubling_the_chain_changes_concurrence_by_less_than_1e_4() {
    let times = [0.0, 10.0, 40.0, 120.0];
    for (gamma, field) in [
        (1.0, Waveform::step(0.5, 2.0, 0.0)),
        (0.5, Waveform::step(1.37, 1.0, 0.0)),
    ] {
        let small = nn(
            spec(
                2000,
                gamma,
                Waveform::constant(1.0),
                field.clone(),
                f64::INFINITY,
            ),
            &times,
        );
        let large = nn(
            spec(4000, gamma, Waveform::constant(1.0), field, f64::INFINITY),
            &times,
        );
        for (a, b) in small.iter().zip(&large) {
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
    let opts = AsymptoticOptions::default();
    let field = Waveform::step(1.37, 1.37, 0.0);
    let a = asymptotic_concurrence(
        &spec(
            2000,
            1.0,
            Waveform::constant(1.0),
            field.clone(),
            f64::INFINITY,
        ),
        1,
        &opts,
    )
    .unwrap();
    let b = asymptotic_concurrence(
        &spec(4000, 1.0, Waveform::constant(1.0), field, f64::INFINITY),
        1,
        &opts,
    )
    .unwrap();
    assert!((a.value - b.value).abs() < 1e-4);
}

#[test]
fn zero_coupling_is_a_product_state() {
    let c = nn(
        spec(
            200,
            1.0,
            Waveform::constant(0.0),
            Waveform::constant(1.0),
            f64::INFINITY,
        ),
        &[0.0],
    );
    assert!(c[0].abs() < 1e-14);
}

#[test]
fn uniform_impurity_chain_matches_periodic_chain_in_the_bulk() {
    // J' = J: the centre of an open 101-site chain sees no boundary before
    // the light cone (speed 2J) arrives
    let chain = ImpurityChain::new(101, 1.0, 1.0, 0.5, f64::INFINITY).unwrap();
    let ev = chain.evolution().unwrap();
    let times: Vec<f64> = (0..=16).map(|k| 0.5 * k as f64).collect();
    let periodic = ChainDynamics::new(
        spec(
            400,
            1.0,
            Waveform::constant(1.0),
            Waveform::step(0.5, 0.0, 0.0),
            f64::INFINITY,
        ),
        Propagation::Step,
    )
    .unwrap()
    .contractions_at(&times)
    .unwrap();
    for (t, set) in times.iter().zip(&periodic) {
        let open = ev.sigma_z_at(50, *t);
        assert!(
            (open - set.sigma_z()).abs() < 1e-7,
            "t = {t}: open {open} vs periodic {}",
            set.sigma_z()
        );
    }
}

#[test]
fn impurity_correlator_matches_full_hilbert_space_at_15_sites() {
    const N: usize = 15;
    let center = 7;
    for j_imp in [0.5, 1.5] {
        let chain = ImpurityChain::new(N, j_imp, 1.0, 0.5, f64::INFINITY).unwrap();
        let bonds: Vec<(usize, usize)> = (0..N - 1).map(|i| (i, i + 1)).collect();
        let imp = Impurity::Single {
            site: center,
            alpha: j_imp - 1.0,
        };
        let lattice =
            LatticeSpec::from_bonds(N, &bonds, 1.0, 1.0, &imp, Waveform::constant(0.0)).unwrap();
        // start in the even-parity sector, where the open-chain ground state lives
        let dim = 1usize << N;
        let start: Vec<C64> = (0..dim)
            .map(|r| {
                if r.count_ones() % 2 == 0 {
                    C64::new(1.0 + ((r * 7919) % 97) as f64 / 97.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let opts = GroundOptions {
            levels: 1,
            tol: 1e-12,
            max_basis: 60,
            ..GroundOptions::default()
        };
        let g = ground_state_at_field(&lattice, 0.5, &opts, &[start]).unwrap();
        let schedule = FieldSchedule::constant(0.0, 40, 0.25);
        let traj = evolve_krylov(
            &lattice,
            g.vector(),
            &schedule,
            &KrylovOptions {
                record_every: 4,
                tol: 1e-12,
                ..Default::default()
            },
        )
        .unwrap();
        let sz = |psi: &StateVector| -> f64 {
            psi.0
                .iter()
                .enumerate()
                .map(|(r, a)| {
                    if (r >> center) & 1 == 0 {
                        a.norm_sqr()
                    } else {
                        -a.norm_sqr()
                    }
                })
                .sum()
        };
        let z0 = sz(&traj.states[0]);
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            let want = sz(psi) - z0;
            let got = impurity_chain_correlator(&chain, center, *t).unwrap();
            assert!(
                (got - want).abs() < 1e-7,
                "J' = {j_imp}, t = {t}: BdG {got} vs full {want}"
            );
        }
    }
}
