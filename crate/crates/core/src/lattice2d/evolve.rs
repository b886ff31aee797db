use std::collections::HashMap;
use std::sync::Arc;

use super::{LatticeSpec, StateVector};
use crate::drive::Waveform;
use crate::error::{Error, Result};
use crate::numerics::{
    dense_hermitian_eig, krylov_exp_step, materialize, SpectralDecomposition, C64,
};

/// Largest lattice the full-basis projection evolver accepts.
pub const PROJECTION_MAX_SITES: usize = 14;
const FIELD_QUANTUM: f64 = 1e-12;
const MAX_HALVINGS: u32 = 24;

/// Piecewise-constant field: interval `k` spans `[k·dt, (k+1)·dt]` with field `fields[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSchedule {
    pub dt: f64,
    pub fields: Vec<f64>,
}

impl FieldSchedule {
    /// Sample `w` at interval midpoints up to `t_end`.
    pub fn from_waveform(w: &Waveform, t_end: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !(t_end >= 0.0) || !dt.is_finite() || !t_end.is_finite() {
            return Err(Error::invalid(format!(
                "bad schedule: t_end = {t_end}, dt = {dt}"
            )));
        }
        let steps = (t_end / dt - 1e-9).ceil().max(0.0) as usize;
        let fields = (0..steps).map(|k| w.eval((k as f64 + 0.5) * dt)).collect();
        Ok(Self { dt, fields })
    }

    pub fn constant(h: f64, steps: usize, dt: f64) -> Self {
        Self {
            dt,
            fields: vec![h; steps],
        }
    }

    pub fn steps(&self) -> usize {
        self.fields.len()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.fields.len() as f64
    }
}

/// Recorded states. `flags[k]` marks intervals where the Krylov step had to be subdivided.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub flags: Vec<bool>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&StateVector> {
        self.states.last()
    }

    pub fn subdivided(&self) -> usize {
        self.flags.iter().filter(|f| **f).count()
    }
}

fn recorder(record_every: usize) -> impl FnMut(&mut Trajectory, usize, f64, &[C64], bool) {
    let every = record_every.max(1);
    move |traj, k, t, psi, flag| {
        if flag {
            traj.flags[k.saturating_sub(1)] = true;
        }
        if k % every == 0 {
            traj.times.push(t);
            traj.states.push(StateVector(psi.to_vec()));
        }
    }
}

fn check_state(spec: &LatticeSpec, psi: &StateVector) -> Result<()> {
    if psi.0.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: psi.0.len(),
        });
    }
    Ok(())
}

/// Full-basis evolver with eigenbases cached per quantized field value.
pub struct ProjectionEvolver {
    spec: LatticeSpec,
    cache: HashMap<i64, Arc<SpectralDecomposition>>,
}

impl ProjectionEvolver {
    pub fn new(spec: &LatticeSpec) -> Result<Self> {
        if spec.sites() > PROJECTION_MAX_SITES {
            return Err(Error::invalid(format!(
                "projection evolution needs N <= {PROJECTION_MAX_SITES}, got {}",
                spec.sites()
            )));
        }
        Ok(Self {
            spec: spec.clone(),
            cache: HashMap::new(),
        })
    }

    pub fn cached_bases(&self) -> usize {
        self.cache.len()
    }

    pub fn basis(&mut self, h: f64) -> Result<Arc<SpectralDecomposition>> {
        let key = (h / FIELD_QUANTUM).round() as i64;
        if let Some(b) = self.cache.get(&key) {
            return Ok(b.clone());
        }
        let dense = materialize(&self.spec.hamiltonian(key as f64 * FIELD_QUANTUM));
        let b = Arc::new(dense_hermitian_eig(&dense)?);
        self.cache.insert(key, b.clone());
        Ok(b)
    }

    /// Record every `record_every`-th state, including the initial one.
    pub fn evolve(
        &mut self,
        psi0: &StateVector,
        schedule: &FieldSchedule,
        record_every: usize,
    ) -> Result<Trajectory> {
        check_state(&self.spec, psi0)?;
        let mut traj = Trajectory {
            flags: vec![false; schedule.steps()],
            ..Default::default()
        };
        let mut record = recorder(record_every);
        let mut psi = nalgebra::DVector::from_vec(psi0.0.clone());
        record(&mut traj, 0, 0.0, psi.as_slice(), false);
        for (k, &h) in schedule.fields.iter().enumerate() {
            let b = self.basis(h)?;
            let mut c = b.vectors.ad_mul(&psi);
            for (ci, e) in c.iter_mut().zip(&b.values) {
                *ci *= C64::from_polar(1.0, -e * schedule.dt);
            }
            psi = &b.vectors * c;
            record(
                &mut traj,
                k + 1,
                (k + 1) as f64 * schedule.dt,
                psi.as_slice(),
                false,
            );
        }
        Ok(traj)
    }
}

pub fn evolve_projection(
    spec: &LatticeSpec,
    psi0: &StateVector,
    schedule: &FieldSchedule,
    record_every: usize,
) -> Result<Trajectory> {
    ProjectionEvolver::new(spec)?.evolve(psi0, schedule, record_every)
}

#[derive(Clone, Debug)]
pub struct KrylovOptions {
    /// Per-step error bound relative to the state norm.
    pub tol: f64,
    pub max_subspace: usize,
    pub record_every: usize,
}

impl Default for KrylovOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_subspace: 40,
            record_every: 1,
        }
    }
}

/// Krylov step over `dt`, halving until every piece meets the tolerance.
fn krylov_interval(
    op: &dyn crate::numerics::HermitianOperator,
    psi: Vec<C64>,
    dt: f64,
    opts: &KrylovOptions,
    depth: u32,
) -> Result<(Vec<C64>, bool)> {
    let step = krylov_exp_step(op, &psi, dt, opts.tol, opts.max_subspace)?;
    if step.error <= opts.tol {
        return Ok((step.state, false));
    }
    if depth >= MAX_HALVINGS {
        return Err(Error::NoConvergence {
            solver: "krylov_exp_step",
            iterations: depth as usize,
            residuals: vec![step.error],
        });
    }
    let (half, _) = krylov_interval(op, psi, dt / 2.0, opts, depth + 1)?;
    let (full, _) = krylov_interval(op, half, dt / 2.0, opts, depth + 1)?;
    Ok((full, true))
}

pub fn evolve_krylov(
    spec: &LatticeSpec,
    psi0: &StateVector,
    schedule: &FieldSchedule,
    opts: &KrylovOptions,
) -> Result<Trajectory> {
    check_state(spec, psi0)?;
    let mut traj = Trajectory {
        flags: vec![false; schedule.steps()],
        ..Default::default()
    };
    let mut record = recorder(opts.record_every);
    let mut psi = psi0.0.clone();
    record(&mut traj, 0, 0.0, &psi, false);
    let mut op = spec.hamiltonian(schedule.fields.first().copied().unwrap_or(0.0));
    for (k, &h) in schedule.fields.iter().enumerate() {
        if h != op.field() {
            op = op.with_field(h);
        }
        let (next, flag) = krylov_interval(&op, psi, schedule.dt, opts, 0)?;
        psi = next;
        record(&mut traj, k + 1, (k + 1) as f64 * schedule.dt, &psi, flag);
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice2d::{ground_state, GroundMethod, Impurity};

    fn spec(field: Waveform) -> LatticeSpec {
        LatticeSpec::patch(7, 1.0, 0.6, &Impurity::None, field).unwrap()
    }

    #[test]
    fn midpoint_schedule() {
        let s = FieldSchedule::from_waveform(&Waveform::step(0.5, 1.5, 1.0), 2.0, 0.5).unwrap();
        assert_eq!(s.fields, vec![0.5, 0.5, 1.5, 1.5]);
        assert!((s.duration() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn stationary_ground_state() {
        let sp = spec(Waveform::constant(1.3));
        let g = ground_state(&sp, 0.0, GroundMethod::Lanczos).unwrap();
        let sched = FieldSchedule::constant(1.3, 20, 0.25);
        let t = evolve_krylov(&sp, g.vector(), &sched, &KrylovOptions::default()).unwrap();
        let c0 = super::super::two_site_rdm_direct(g.vector(), 3, 4).unwrap();
        let c1 = super::super::two_site_rdm_direct(t.last().unwrap(), 3, 4).unwrap();
        assert!((c0.matrix() - c1.matrix()).norm() < 1e-9);
    }

    #[test]
    fn projection_matches_krylov_after_quench() {
        let sp = spec(Waveform::step(0.5, 1.5, 0.0)).with_initial_field(0.5);
        let g = ground_state(&sp, 0.0, GroundMethod::Lanczos).unwrap();
        let sched = FieldSchedule::constant(1.5, 40, 0.25);
        let a = evolve_projection(&sp, g.vector(), &sched, 40).unwrap();
        let b = evolve_krylov(
            &sp,
            g.vector(),
            &sched,
            &KrylovOptions {
                record_every: 40,
                ..Default::default()
            },
        )
        .unwrap();
        let d: f64 = a
            .last()
            .unwrap()
            .0
            .iter()
            .zip(&b.last().unwrap().0)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum();
        assert!(d.sqrt() < 1e-8, "{}", d.sqrt());
        assert!((a.last().unwrap().norm() - 1.0).abs() < 1e-10);
        assert_eq!(a.states.len(), 2);
    }

    #[test]
    fn projection_size_limit() {
        let sp =
            LatticeSpec::patch(19, 1.0, 1.0, &Impurity::None, Waveform::constant(1.0)).unwrap();
        assert!(ProjectionEvolver::new(&sp).is_err());
    }
}
