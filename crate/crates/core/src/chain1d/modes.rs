use rayon::prelude::*;

use super::{ChainSpec, ContractionSet, ModeBlock};
use crate::error::{Error, Result};
use crate::numerics::{
    dense_hermitian_eig, integrate_evolution, CMatrix, OdeOptions, SpectralDecomposition, C64,
};

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// 4×4 block Hamiltonian for instantaneous coupling `j` and field `h`.
pub(crate) fn block_hamiltonian(m: &ModeBlock, j: f64, h: f64) -> CMatrix {
    let cos = m.phi.cos();
    let mut a = CMatrix::zeros(4, 4);
    a[(0, 0)] = c(2.0 * h);
    a[(0, 1)] = C64::new(0.0, -j * m.delta);
    a[(1, 0)] = C64::new(0.0, j * m.delta);
    a[(1, 1)] = c(-4.0 * j * cos - 2.0 * h);
    a[(2, 2)] = c(-2.0 * j * cos);
    a[(3, 3)] = c(-2.0 * j * cos);
    a
}

fn upper_block(m: &ModeBlock, j: f64, h: f64) -> CMatrix {
    let full = block_hamiltonian(m, j, h);
    full.view((0, 0), (2, 2)).into_owned()
}

/// Block `p` of the mode Hamiltonian at time `t`.
pub fn mode_hamiltonian(spec: &ChainSpec, p: usize, t: f64) -> Result<CMatrix> {
    let m = spec.mode(p)?;
    Ok(block_hamiltonian(
        &m,
        spec.coupling().eval(t),
        spec.field().eval(t),
    ))
}

/// Gibbs state `e^{-βH}/Z` of a Hermitian matrix; at `β = ∞` the equal
/// mixture over the ground space.
pub(crate) fn gibbs(h: &CMatrix, beta: f64) -> Result<CMatrix> {
    let eig = dense_hermitian_eig(h)?;
    Ok(gibbs_from(&eig, beta))
}

pub(crate) fn gibbs_from(eig: &SpectralDecomposition, beta: f64) -> CMatrix {
    let e0 = eig.values[0];
    let scale = eig.values.iter().fold(1.0f64, |s, v| s.max(v.abs()));
    let weights: Vec<f64> = if beta.is_infinite() {
        eig.values
            .iter()
            .map(|v| if v - e0 <= 1e-12 * scale { 1.0 } else { 0.0 })
            .collect()
    } else {
        eig.values
            .iter()
            .map(|v| (-beta * (v - e0)).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let mut rho = CMatrix::zeros(eig.len(), eig.len());
    for (i, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let v = eig.vectors.column(i);
        rho += v * v.adjoint() * c(w / z);
    }
    rho
}

/// `ρ_p(0) = e^{-βH̃_p(0)}/Z`.
pub fn thermal_initial(spec: &ChainSpec, p: usize) -> Result<CMatrix> {
    gibbs(&mode_hamiltonian(spec, p, 0.0)?, spec.beta())
}

/// Piecewise-constant intervals `(start, end)` covering `[0, t]`.
fn constant_intervals(spec: &ChainSpec, t: f64) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = spec
        .breakpoints()
        .into_iter()
        .filter(|b| *b > 0.0 && *b < t)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() + 1);
    let mut start = 0.0;
    for cut in cuts {
        out.push((start, cut));
        start = cut;
    }
    out.push((start, t));
    out
}

fn require_piecewise(spec: &ChainSpec) -> Result<()> {
    for w in [spec.coupling(), spec.field()] {
        if !w.is_piecewise_constant() {
            return Err(Error::UnsupportedWaveform(format!(
                "{} drive needs numeric evolution, not the step propagator",
                w.name()
            )));
        }
    }
    Ok(())
}

/// Exact propagator for step (or constant) coupling and field.
pub fn evolve_step(spec: &ChainSpec, p: usize, t: f64) -> Result<CMatrix> {
    require_piecewise(spec)?;
    let m = spec.mode(p)?;
    let mut u = CMatrix::identity(4, 4);
    for (a, b) in constant_intervals(spec, t) {
        let mid = 0.5 * (a + b);
        let hm = block_hamiltonian(&m, spec.coupling().eval(mid), spec.field().eval(mid));
        u = crate::numerics::matrix_exp_unitary(&hm, b - a)? * u;
    }
    Ok(u)
}

/// Closed-form propagator when `J(t) = λ h(t)`, with `λ = J/h`.
///
/// The reduced block is `J(t)·K` with constant `K`, so the propagator only
/// depends on `Θ(t) = ∫₀ᵗ J`.
pub fn evolve_proportional(spec: &ChainSpec, lambda: f64, p: usize, t: f64) -> Result<CMatrix> {
    if lambda == 0.0 || !lambda.is_finite() {
        return Err(Error::invalid(
            "proportional drive needs a finite nonzero ratio J/h",
        ));
    }
    for s in [0.0, t] {
        let (j, h) = (spec.coupling().eval(s), spec.field().eval(s));
        if (j - lambda * h).abs() > 1e-12 * (1.0 + j.abs()) {
            return Err(Error::invalid(format!(
                "J({s}) = {j} is not {lambda} × h({s}) = {}",
                lambda * h
            )));
        }
    }
    let m = spec.mode(p)?;
    Ok(proportional_unitary(
        &m,
        lambda,
        spec.coupling().integral(t),
    ))
}

fn proportional_unitary(m: &ModeBlock, lambda: f64, theta_j: f64) -> CMatrix {
    let cos = m.phi.cos();
    let mean = -2.0 * cos;
    let d = 2.0 / lambda + 2.0 * cos;
    let r = (d * d + m.delta * m.delta).sqrt();
    let (s, co) = if r == 0.0 {
        (0.0, 1.0)
    } else {
        let s = ((r - d) / (2.0 * r)).max(0.0).sqrt() * m.delta.signum();
        (s, ((r + d) / (2.0 * r)).max(0.0).sqrt())
    };
    let e1 = C64::from_polar(1.0, -(mean + r) * theta_j);
    let e2 = C64::from_polar(1.0, -(mean - r) * theta_j);
    let sc = C64::new(0.0, s * co);
    let mut u = CMatrix::zeros(4, 4);
    u[(0, 0)] = e1 * co * co + e2 * s * s;
    u[(0, 1)] = sc * (e2 - e1);
    u[(1, 0)] = sc * (e1 - e2);
    u[(1, 1)] = e1 * s * s + e2 * co * co;
    let phase = C64::from_polar(1.0, 2.0 * cos * theta_j);
    u[(2, 2)] = phase;
    u[(3, 3)] = phase;
    u
}

fn assemble(upper: &CMatrix, lower_phase: C64) -> CMatrix {
    let mut u = CMatrix::zeros(4, 4);
    u.view_mut((0, 0), (2, 2)).copy_from(upper);
    u[(2, 2)] = lower_phase;
    u[(3, 3)] = lower_phase;
    u
}

/// Upper-block propagator from `t_a` to `t_b` by ODE integration.
fn numeric_segment(
    spec: &ChainSpec,
    m: &ModeBlock,
    t_a: f64,
    t_b: f64,
    opts: &OdeOptions,
) -> Result<CMatrix> {
    let mut o = opts.clone();
    o.breakpoints = spec.breakpoints().into_iter().map(|b| b - t_a).collect();
    let out = integrate_evolution(
        &|s| upper_block(m, spec.coupling().eval(t_a + s), spec.field().eval(t_a + s)),
        t_b - t_a,
        &o,
    )?;
    Ok(out.unitary)
}

fn lower_phase(spec: &ChainSpec, m: &ModeBlock, t: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * m.phi.cos() * spec.coupling().integral(t))
}

/// Propagator by adaptive integration of the reduced 2×2 block; the
/// singly occupied states only pick up the phase `e^{2i cos φ ∫J}`.
pub fn evolve_numeric(spec: &ChainSpec, p: usize, t: f64, opts: &OdeOptions) -> Result<CMatrix> {
    let m = spec.mode(p)?;
    let upper = numeric_segment(spec, &m, 0.0, t, opts)?;
    Ok(assemble(&upper, lower_phase(spec, &m, t)))
}

/// How block propagators are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum Propagation {
    /// Step propagator for piecewise-constant drives, otherwise numeric.
    Auto,
    Step,
    Proportional {
        lambda: f64,
    },
    Numeric,
}

/// Evolves every block of a chain and assembles contraction sets.
#[derive(Clone, Debug)]
pub struct ChainDynamics {
    spec: ChainSpec,
    propagation: Propagation,
    ode: OdeOptions,
    initial: Vec<CMatrix>,
}

impl ChainDynamics {
    pub fn new(spec: ChainSpec, propagation: Propagation) -> Result<Self> {
        let propagation = match propagation {
            Propagation::Auto
                if spec.coupling().is_piecewise_constant()
                    && spec.field().is_piecewise_constant() =>
            {
                Propagation::Step
            }
            Propagation::Auto => Propagation::Numeric,
            other => other,
        };
        if propagation == Propagation::Step {
            require_piecewise(&spec)?;
        }
        let initial = (1..=spec.mode_count())
            .into_par_iter()
            .map(|p| thermal_initial(&spec, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            spec,
            propagation,
            ode: OdeOptions::default(),
            initial,
        })
    }

    pub fn with_ode_options(mut self, ode: OdeOptions) -> Self {
        self.ode = ode;
        self
    }

    pub fn spec(&self) -> &ChainSpec {
        &self.spec
    }

    pub fn propagation(&self) -> &Propagation {
        &self.propagation
    }

    pub fn initial_state(&self, p: usize) -> &CMatrix {
        &self.initial[p - 1]
    }

    /// Block propagators of mode `p` at each of `times` (any order).
    fn propagators(&self, p: usize, times: &[f64]) -> Result<Vec<CMatrix>> {
        let m = self.spec.mode(p)?;
        match &self.propagation {
            Propagation::Step | Propagation::Auto => {
                // eigenbases per constant interval, reused across times
                let mut cache: Vec<((f64, f64), SpectralDecomposition)> = Vec::new();
                let mut out = Vec::with_capacity(times.len());
                for &t in times {
                    let mut u = CMatrix::identity(4, 4);
                    for (a, b) in constant_intervals(&self.spec, t) {
                        let mid = 0.5 * (a + b);
                        let key = (self.spec.coupling().eval(mid), self.spec.field().eval(mid));
                        let idx = match cache.iter().position(|(k, _)| *k == key) {
                            Some(i) => i,
                            None => {
                                cache.push((
                                    key,
                                    dense_hermitian_eig(&block_hamiltonian(&m, key.0, key.1))?,
                                ));
                                cache.len() - 1
                            }
                        };
                        let step = cache[idx]
                            .1
                            .function(|e| C64::from_polar(1.0, -e * (b - a)));
                        u = step * u;
                    }
                    out.push(u);
                }
                Ok(out)
            }
            Propagation::Proportional { lambda } => times
                .iter()
                .map(|&t| evolve_proportional(&self.spec, *lambda, p, t))
                .collect(),
            Propagation::Numeric => {
                let mut order: Vec<usize> = (0..times.len()).collect();
                order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
                let mut out = vec![CMatrix::zeros(0, 0); times.len()];
                let mut upper = CMatrix::identity(2, 2);
                let mut now = 0.0;
                for i in order {
                    let t = times[i];
                    if t < 0.0 {
                        return Err(Error::invalid(format!("negative time {t}")));
                    }
                    if t > now {
                        upper = numeric_segment(&self.spec, &m, now, t, &self.ode)? * upper;
                        now = t;
                    }
                    out[i] = assemble(&upper, lower_phase(&self.spec, &m, t));
                }
                Ok(out)
            }
        }
    }

    /// `ρ_p(t)` for every block, indexed `[time][p-1]`.
    pub fn densities_at(&self, times: &[f64]) -> Result<Vec<Vec<CMatrix>>> {
        let per_mode = (1..=self.spec.mode_count())
            .into_par_iter()
            .map(|p| {
                let rho0 = &self.initial[p - 1];
                self.propagators(p, times).map(|us| {
                    us.into_iter()
                        .map(|u| &u * rho0 * u.adjoint())
                        .collect::<Vec<_>>()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((0..times.len())
            .map(|ti| per_mode.iter().map(|m| m[ti].clone()).collect())
            .collect())
    }

    pub fn contractions_at(&self, times: &[f64]) -> Result<Vec<ContractionSet>> {
        let phis: Vec<f64> = self.spec.modes().map(|m| m.phi).collect();
        self.densities_at(times)?
            .iter()
            .map(|states| ContractionSet::from_states(&self.spec, &phis, states))
            .collect()
    }

    pub fn contractions(&self, t: f64) -> Result<ContractionSet> {
        Ok(self.contractions_at(&[t])?.remove(0))
    }
}
