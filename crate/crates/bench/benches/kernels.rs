use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use entadyn::chain1d::{ChainDynamics, ChainSpec, Propagation};
use entadyn::lattice2d::{
    apply_hamiltonian, evolve_krylov, evolve_projection, ground_state, initial_ground_state,
    FieldSchedule, GroundMethod, Impurity, KrylovOptions, LatticeSpec,
};
use entadyn::numerics::pfaffian;
use entadyn::Waveform;
use entadyn_bench::{filled_antisymmetric, filled_block};

fn matvec(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_matvec");
    g.sample_size(10);
    for sites in [7, 19] {
        let spec =
            LatticeSpec::patch(sites, 1.0, 1.0, &Impurity::None, Waveform::constant(2.0)).unwrap();
        let y = filled_block(1 << sites, 1);
        g.bench_with_input(BenchmarkId::from_parameter(sites), &sites, |b, _| {
            b.iter(|| apply_hamiltonian(&spec, 0.0, &y).unwrap())
        });
    }
    g.finish();
}

fn pfaffians(c: &mut Criterion) {
    let mut g = c.benchmark_group("pfaffian");
    for order in [8, 32, 128] {
        let m = filled_antisymmetric(order);
        g.bench_with_input(BenchmarkId::from_parameter(order), &order, |b, _| {
            b.iter(|| pfaffian(&m))
        });
    }
    g.finish();
}

fn mode_evolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("chain_contractions");
    g.sample_size(10);
    let step = ChainSpec::new(
        2000,
        1.0,
        Waveform::constant(1.0),
        Waveform::step(1.37, 1.37 * 1.5, 0.0),
        f64::INFINITY,
    )
    .unwrap();
    let dynamics = ChainDynamics::new(step, Propagation::Step).unwrap();
    g.bench_function("step_n2000", |b| {
        b.iter(|| dynamics.contractions(50.0).unwrap())
    });
    let exp = ChainSpec::new(
        200,
        1.0,
        Waveform::Exponential {
            initial: 0.5,
            r#final: 2.0,
            rate: 0.1,
        },
        Waveform::constant(1.0),
        f64::INFINITY,
    )
    .unwrap();
    let dynamics = ChainDynamics::new(exp, Propagation::Numeric).unwrap();
    g.bench_function("numeric_exp_n200", |b| {
        b.iter(|| dynamics.contractions(10.0).unwrap())
    });
    g.finish();
}

fn ground(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_ground");
    g.sample_size(10);
    let spec = LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, Waveform::constant(2.61)).unwrap();
    for method in [GroundMethod::Lanczos, GroundMethod::Tracemin] {
        g.bench_function(format!("{method:?}_7"), |b| {
            b.iter(|| ground_state(&spec, 0.0, method).unwrap())
        });
    }
    g.finish();
}

fn evolution(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice_evolution");
    g.sample_size(10);
    let field = Waveform::step(0.5, 3.0, 0.0);
    let spec = LatticeSpec::patch(7, 1.0, 1.0, &Impurity::None, field.clone()).unwrap();
    let psi = initial_ground_state(&spec, GroundMethod::Lanczos)
        .unwrap()
        .states
        .remove(0);
    let schedule = FieldSchedule::from_waveform(&field, 20.0, 0.01).unwrap();
    g.bench_function("projection_7_step", |b| {
        b.iter(|| evolve_projection(&spec, &psi, &schedule, 100).unwrap())
    });
    let opts = KrylovOptions {
        record_every: 100,
        ..KrylovOptions::default()
    };
    g.bench_function("krylov_7_step", |b| {
        b.iter(|| evolve_krylov(&spec, &psi, &schedule, &opts).unwrap())
    });
    g.finish();
}

criterion_group!(
    benches,
    matvec,
    pfaffians,
    mode_evolution,
    ground,
    evolution
);
criterion_main!(benches);
