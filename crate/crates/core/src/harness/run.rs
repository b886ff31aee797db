use std::time::Instant;

use rayon::prelude::*;

use super::config::*;
use super::diff::finite_diff;
use super::table::ResultTable;
use crate::chain1d::{asymptotic_concurrence, ChainDynamics, ChainSpec, Propagation};
use crate::drive::Waveform;
use crate::error::{Error, Result};
use crate::lattice2d::{
    evolve_krylov, ground_state_at_field, initial_ground_state, FieldSchedule, GroundMethod,
    GroundOptions, GroundState, KrylovOptions, ProjectionEvolver, Trajectory,
};
use crate::numerics::C64;

const AUTO_PROJECTION_MAX_SITES: usize = 10;
const AUTO_PROJECTION_MAX_FIELDS: usize = 64;
const TWO_LEVEL_MAX_SITES: usize = 14;

/// Data rows of one scan point and the metadata it contributes.
type RowsAndMeta = (Vec<Vec<f64>>, Vec<(String, String)>);

/// Run an experiment and collect its table, metadata included.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let started = Instant::now();
    let mut table = match config {
        ExperimentConfig::ChainScan(c) => chain_scan(config, c)?,
        ExperimentConfig::ChainDynamics(c) => chain_dynamics(config, c)?,
        ExperimentConfig::LatticeGround(c) => lattice_ground(config, c)?,
        ExperimentConfig::LatticeDynamics(c) => lattice_dynamics(config, c)?,
        ExperimentConfig::QptScan(c) => qpt_scan(c)?,
    };
    let mut head = ResultTable::default();
    head.meta("experiment", config.name());
    head.meta("entadyn", env!("CARGO_PKG_VERSION"));
    head.meta("config", config.to_toml().trim_end());
    head.metadata.append(&mut table.metadata);
    table.metadata = head.metadata;
    table.meta("unconverged_points", table.unconverged());
    table.meta(
        "runtime_seconds",
        format!("{:.3}", started.elapsed().as_secs_f64()),
    );
    Ok(table)
}

/// Cartesian product of the axes, first axis outermost.
fn points(axes: &[Axis]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![vec![]], |acc, axis| {
        let values = axis.values.values();
        acc.iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push(*v);
                    q
                })
            })
            .collect()
    })
}

/// Config with every axis except `skip` applied at `point`.
fn configure(
    base: &ExperimentConfig,
    axes: &[Axis],
    point: &[f64],
    skip: Option<&str>,
) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    for (axis, v) in axes.iter().zip(point) {
        if Some(axis.param.as_str()) != skip {
            cfg = cfg.with_param(&axis.param, *v)?;
        }
    }
    Ok(cfg)
}

/// Non-convergence becomes a flagged row; anything else aborts.
fn flagged<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NoConvergence { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn bool_value(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

fn pair_label(prefix: &str, (a, b): SitePair) -> String {
    format!("{prefix}({a},{b})")
}

fn chain_scan(base: &ExperimentConfig, c: &ChainScanConfig) -> Result<ResultTable> {
    let mut columns: Vec<String> = c.axes.iter().map(|a| a.param.clone()).collect();
    if c.observables.is_empty() {
        let mut t = ResultTable::new(vec![]);
        t.meta("note", "no observables requested");
        return Ok(t);
    }
    for o in &c.observables {
        match o {
            ChainScanObservable::Asymptotic => columns.extend(
                [
                    "C_asym",
                    "C_first_half",
                    "C_second_half",
                    "horizon",
                    "stable",
                ]
                .map(String::from),
            ),
            ChainScanObservable::Equilibrium => columns.push("C_eq".into()),
            ChainScanObservable::Initial => columns.push("C_init".into()),
        }
    }
    columns.push("converged".into());
    let opts = c.asymptotic.options();
    let rows = points(&c.axes)
        .into_par_iter()
        .map(|p| -> Result<Vec<f64>> {
            let ExperimentConfig::ChainScan(cfg) = configure(base, &c.axes, &p, None)? else {
                unreachable!()
            };
            let spec = cfg.chain.spec()?;
            let mut row = p.clone();
            let mut converged = true;
            for o in &cfg.observables {
                match o {
                    ChainScanObservable::Asymptotic => {
                        match flagged(asymptotic_concurrence(&spec, cfg.separation, &opts))? {
                            Some(a) => row.extend([
                                a.value,
                                a.first_half,
                                a.second_half,
                                a.horizon,
                                bool_value(a.stable),
                            ]),
                            None => {
                                converged = false;
                                row.extend([f64::NAN; 4]);
                                row.push(0.0);
                            }
                        }
                    }
                    ChainScanObservable::Equilibrium => {
                        let eq = ChainSpec::new(
                            spec.n(),
                            spec.gamma(),
                            Waveform::constant(cfg.chain.coupling.limit().unwrap_or(f64::NAN)),
                            Waveform::constant(cfg.chain.field.limit().unwrap_or(f64::NAN)),
                            spec.beta(),
                        )?;
                        let set = ChainDynamics::new(eq, Propagation::Step)?.contractions(0.0)?;
                        row.push(set.concurrence(0, cfg.separation)?);
                    }
                    ChainScanObservable::Initial => {
                        let set = ChainDynamics::new(spec.clone(), Propagation::Auto)?
                            .contractions(0.0)?;
                        row.push(set.concurrence(0, cfg.separation)?);
                    }
                }
            }
            row.push(bool_value(converged));
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(columns);
    for r in rows {
        t.push(r)?;
    }
    t.meta(
        "asymptotic_window",
        format!(
            "[T/2, T], T from {} doubling up to {}",
            opts.horizon, opts.max_horizon
        ),
    );
    Ok(t)
}

fn propagation(p: &PropagationSetting) -> Propagation {
    match p {
        PropagationSetting::Auto => Propagation::Auto,
        PropagationSetting::Step => Propagation::Step,
        PropagationSetting::Numeric => Propagation::Numeric,
        PropagationSetting::Proportional { lambda } => {
            Propagation::Proportional { lambda: *lambda }
        }
    }
}

fn chain_dynamics(base: &ExperimentConfig, c: &ChainDynamicsConfig) -> Result<ResultTable> {
    if c.observables.is_empty() {
        let mut t = ResultTable::new(vec![]);
        t.meta("note", "no observables requested");
        return Ok(t);
    }
    let times = c.times.values();
    let mut columns: Vec<String> = c.axes.iter().map(|a| a.param.clone()).collect();
    columns.push("t".into());
    if let Some(m) = &c.impurity {
        for o in &c.observables {
            columns.push(match o {
                ChainObservable::Magnetization => "sigma_z".into(),
                _ => "decoherence".into(),
            });
        }
        let _ = m;
    } else {
        columns.extend(["J", "h"].map(String::from));
        for o in &c.observables {
            match o {
                ChainObservable::Concurrence => {
                    columns.extend(c.separations.iter().map(|r| format!("C(i,i+{r})")))
                }
                ChainObservable::Magnetization => columns.push("M".into()),
                ChainObservable::Correlators => {
                    for r in &c.separations {
                        columns.extend(["xx", "yy", "zz"].map(|k| format!("{k}(i,i+{r})")));
                    }
                }
                ChainObservable::Decoherence => {}
            }
        }
    }
    columns.push("converged".into());
    let blocks = points(&c.axes)
        .into_par_iter()
        .map(|p| -> Result<Vec<Vec<f64>>> {
            let ExperimentConfig::ChainDynamics(cfg) = configure(base, &c.axes, &p, None)? else {
                unreachable!()
            };
            let mut rows = Vec::with_capacity(times.len());
            if let Some(m) = &cfg.impurity {
                let ev = m.chain()?.evolution()?;
                let site = m.observed();
                let z0 = ev.sigma_z_at(site, 0.0);
                for &t in &times {
                    let z = ev.sigma_z_at(site, t);
                    let mut row = p.clone();
                    row.push(t);
                    for o in &cfg.observables {
                        row.push(if *o == ChainObservable::Magnetization {
                            z
                        } else {
                            z - z0
                        });
                    }
                    row.push(1.0);
                    rows.push(row);
                }
                return Ok(rows);
            }
            let model = cfg.chain.as_ref().expect("validated");
            let dynamics = ChainDynamics::new(model.spec()?, propagation(&cfg.propagation))?;
            let sets = match flagged(dynamics.contractions_at(&times))? {
                Some(s) => s,
                None => {
                    for &t in &times {
                        let mut row = p.clone();
                        row.push(t);
                        row.resize(p.len() + 1 + (columns_len(&cfg) - 1), f64::NAN);
                        row.push(0.0);
                        rows.push(row);
                    }
                    return Ok(rows);
                }
            };
            for (&t, set) in times.iter().zip(&sets) {
                let mut row = p.clone();
                row.extend([t, model.coupling.eval(t), model.field.eval(t)]);
                for o in &cfg.observables {
                    match o {
                        ChainObservable::Concurrence => {
                            for &r in &cfg.separations {
                                row.push(set.concurrence(0, r)?);
                            }
                        }
                        ChainObservable::Magnetization => row.push(set.magnetization()),
                        ChainObservable::Correlators => {
                            for &r in &cfg.separations {
                                let k = set.correlators(0, r)?;
                                row.extend([k.xx, k.yy, k.zz]);
                            }
                        }
                        ChainObservable::Decoherence => {}
                    }
                }
                row.push(1.0);
                rows.push(row);
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(columns);
    for r in blocks.into_iter().flatten() {
        t.push(r)?;
    }
    if c.impurity.is_some() {
        t.meta(
            "note",
            "open chain, impurity bonds at the central site, field switched at t = 0",
        );
    }
    Ok(t)
}

/// Observable columns of a homogeneous chain-dynamics row after `t`.
fn columns_len(c: &ChainDynamicsConfig) -> usize {
    let per: usize = c
        .observables
        .iter()
        .map(|o| match o {
            ChainObservable::Concurrence => c.separations.len(),
            ChainObservable::Magnetization => 1,
            ChainObservable::Correlators => 3 * c.separations.len(),
            ChainObservable::Decoherence => 0,
        })
        .sum();
    2 + per + 1
}

fn ground_method(s: GroundSolver) -> GroundMethod {
    match s {
        GroundSolver::Lanczos => GroundMethod::Lanczos,
        GroundSolver::Tracemin => GroundMethod::Tracemin,
    }
}

fn lattice_ground(base: &ExperimentConfig, c: &LatticeGroundConfig) -> Result<ResultTable> {
    if c.observables.is_empty() {
        let mut t = ResultTable::new(vec![]);
        t.meta("note", "no observables requested");
        return Ok(t);
    }
    let mut columns: Vec<String> = c.axes.iter().map(|a| a.param.clone()).collect();
    columns.push("h".into());
    for o in &c.observables {
        match o {
            LatticeObservable::Concurrence => {
                columns.extend(c.pairs.iter().map(|p| pair_label("C", *p)))
            }
            LatticeObservable::Energy => columns.push("E0".into()),
            LatticeObservable::Gap => columns.push("gap".into()),
        }
    }
    columns.extend(["degenerate", "converged"].map(String::from));
    let wants_gap = c.observables.contains(&LatticeObservable::Gap);
    let rows = points(&c.axes)
        .into_par_iter()
        .map(|p| -> Result<Vec<f64>> {
            let ExperimentConfig::LatticeGround(cfg) =
                configure(base, &c.axes, &p, Some("lambda"))?
            else {
                unreachable!()
            };
            let spec = cfg.lattice.spec()?;
            let h = match c.axes.iter().position(|a| a.param == "lambda") {
                Some(i) => p[i] * spec.coupling(),
                None => spec.field().eval(0.0),
            };
            let levels = if wants_gap || spec.sites() <= TWO_LEVEL_MAX_SITES {
                2
            } else {
                1
            };
            let opts = GroundOptions {
                method: ground_method(cfg.solver),
                levels,
                ..GroundOptions::default()
            };
            let mut row = p.clone();
            row.push(h);
            match flagged(ground_state_at_field(&spec, h, &opts, &[]))? {
                Some(g) => {
                    for o in &cfg.observables {
                        match o {
                            LatticeObservable::Concurrence => {
                                for &(a, b) in &cfg.pairs {
                                    row.push(g.concurrence(a - 1, b - 1)?);
                                }
                            }
                            LatticeObservable::Energy => row.push(g.energy),
                            LatticeObservable::Gap => row.push(g.gap().unwrap_or(f64::NAN)),
                        }
                    }
                    row.extend([bool_value(g.degenerate()), 1.0]);
                }
                None => {
                    while row.len() < columns_count(c) - 1 {
                        row.push(f64::NAN);
                    }
                    row.push(0.0);
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(columns);
    for r in rows {
        t.push(r)?;
    }
    t.meta(
        "convention",
        "sites are 1-based; lambda = h/J; degenerate ground spaces use the equal mixture",
    );
    Ok(t)
}

fn columns_count(c: &LatticeGroundConfig) -> usize {
    let per: usize = c
        .observables
        .iter()
        .map(|o| {
            if *o == LatticeObservable::Concurrence {
                c.pairs.len()
            } else {
                1
            }
        })
        .sum();
    c.axes.len() + 1 + per + 2
}

fn evolve(
    spec: &crate::lattice2d::LatticeSpec,
    g: &GroundState,
    c: &LatticeDynamicsConfig,
) -> Result<Trajectory> {
    let schedule = FieldSchedule::from_waveform(spec.field(), c.t_end, c.dt)?;
    let projection = match c.method {
        EvolutionMethod::Projection => true,
        EvolutionMethod::Krylov => false,
        EvolutionMethod::Auto => {
            let mut fields: Vec<u64> = schedule.fields.iter().map(|h| h.to_bits()).collect();
            fields.sort_unstable();
            fields.dedup();
            spec.sites() <= AUTO_PROJECTION_MAX_SITES && fields.len() <= AUTO_PROJECTION_MAX_FIELDS
        }
    };
    if projection {
        ProjectionEvolver::new(spec)?.evolve(g.vector(), &schedule, c.record_every)
    } else {
        let opts = KrylovOptions {
            record_every: c.record_every,
            ..KrylovOptions::default()
        };
        evolve_krylov(spec, g.vector(), &schedule, &opts)
    }
}

fn lattice_dynamics(base: &ExperimentConfig, c: &LatticeDynamicsConfig) -> Result<ResultTable> {
    let mut columns: Vec<String> = c.axes.iter().map(|a| a.param.clone()).collect();
    columns.extend(["t", "h"].map(String::from));
    columns.extend(c.pairs.iter().map(|p| pair_label("C", *p)));
    columns.extend(["norm", "subdivided", "converged"].map(String::from));
    let blocks = points(&c.axes)
        .into_par_iter()
        .map(|p| -> Result<RowsAndMeta> {
            let ExperimentConfig::LatticeDynamics(cfg) = configure(base, &c.axes, &p, None)? else {
                unreachable!()
            };
            let spec = cfg.lattice.spec()?;
            let g = initial_ground_state(&spec, GroundMethod::Lanczos)?;
            let traj = evolve(&spec, &g, &cfg)?;
            let mut rows = Vec::with_capacity(traj.states.len());
            for (k, (t, psi)) in traj.times.iter().zip(&traj.states).enumerate() {
                let step = k * cfg.record_every.max(1);
                let sub = step.checked_sub(1).is_some_and(|i| traj.flags[i]);
                let h = if *t == 0.0 {
                    spec.initial_field()
                } else {
                    spec.field().eval(*t)
                };
                let mut row = p.clone();
                row.extend([*t, h]);
                for &(a, b) in &cfg.pairs {
                    row.push(crate::entanglement::concurrence(
                        &crate::lattice2d::two_site_rdm_direct(psi, a - 1, b - 1)?,
                    ));
                }
                row.extend([psi.norm(), bool_value(sub), 1.0]);
                rows.push(row);
            }
            let mut notes = Vec::new();
            for &h in &cfg.reference_fields {
                let r = ground_state_at_field(&spec, h, &GroundOptions::default(), &[])?;
                for &(a, b) in &cfg.pairs {
                    let label = format!(
                        "reference {} at h={h}{}",
                        pair_label("C", (a, b)),
                        axis_suffix(&c.axes, &p)
                    );
                    notes.push((label, format!("{:.10}", r.concurrence(a - 1, b - 1)?)));
                }
            }
            Ok((rows, notes))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = ResultTable::new(columns);
    for (rows, notes) in blocks {
        for r in rows {
            t.push(r)?;
        }
        t.metadata.extend(notes);
    }
    t.meta(
        "convention",
        "sites are 1-based; field piecewise constant at interval midpoints",
    );
    Ok(t)
}

fn axis_suffix(axes: &[Axis], p: &[f64]) -> String {
    axes.iter()
        .zip(p)
        .map(|(a, v)| format!(", {}={v}", a.param))
        .collect()
}

fn qpt_scan(c: &QptScanConfig) -> Result<ResultTable> {
    let sizes = if c.sizes.is_empty() {
        vec![c.lattice.sites]
    } else {
        c.sizes.clone()
    };
    let grid = c.lambda.values();
    let spacing = super::uniform_spacing(&grid)?;
    let (cl, dcl) = match c.pair {
        Some(p) => (pair_label("C", p), pair_label("dC", p)),
        None => ("C(center,nn)".to_string(), "dC(center,nn)".to_string()),
    };
    let columns: Vec<String> = ["sites", "lambda"]
        .iter()
        .map(|s| s.to_string())
        .chain([cl.clone(), dcl])
        .chain(["degenerate", "gap", "dgap", "d2gap", "converged"].map(String::from))
        .collect();
    let mut t = ResultTable::new(columns);
    for n in sizes {
        let pair = match c.pair {
            Some(p) => p,
            None => LatticeModel::center_pair(n)?,
        };
        let (a, b) = pair;
        if c.pair.is_none() {
            t.meta(format!("pair for {n} sites"), pair_label("C", pair));
        }
        let model = LatticeModel {
            sites: n,
            ..c.lattice.clone()
        };
        let spec = model.spec()?;
        let levels = if c.gap.unwrap_or(n <= TWO_LEVEL_MAX_SITES) {
            2
        } else {
            1
        };
        let opts = GroundOptions {
            levels,
            ..GroundOptions::default()
        };
        let mut warm: Vec<Vec<C64>> = Vec::new();
        let mut conc = Vec::with_capacity(grid.len());
        let mut gap = Vec::with_capacity(grid.len());
        let mut degenerate = Vec::with_capacity(grid.len());
        let mut converged = Vec::with_capacity(grid.len());
        for &lambda in &grid {
            match flagged(ground_state_at_field(
                &spec,
                lambda * spec.coupling(),
                &opts,
                &warm,
            ))? {
                Some(g) => {
                    warm = vec![g.vector().0.clone()];
                    conc.push(g.concurrence(a - 1, b - 1)?);
                    gap.push(g.gap().unwrap_or(f64::NAN));
                    degenerate.push(g.degenerate());
                    converged.push(true);
                }
                None => {
                    conc.push(f64::NAN);
                    gap.push(f64::NAN);
                    degenerate.push(false);
                    converged.push(false);
                }
            }
        }
        let dc = finite_diff(&conc, spacing, 1)?;
        let dg = finite_diff(&gap, spacing, 1)?;
        let d2g = finite_diff(&gap, spacing, 2)?;
        for i in 0..grid.len() {
            t.push(vec![
                n as f64,
                grid[i],
                conc[i],
                dc[i],
                bool_value(degenerate[i]),
                gap[i],
                dg[i],
                d2g[i],
                bool_value(converged[i]),
            ])?;
        }
        if let Some((i, cmax)) = conc
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .max_by(|x, y| x.1.total_cmp(y.1))
        {
            t.meta(
                format!("max {} for {n} sites", pair_label("C", pair)),
                format!("{cmax:.6} at lambda = {}", grid[i]),
            );
        }
        if levels == 1 {
            t.meta(
                format!("levels for {n} sites"),
                "ground state only; gap columns are NaN and degeneracy is not detected",
            );
        }
    }
    t.meta(
        "convention",
        "sites are 1-based; lambda = h/J; central differences, one-sided at the ends",
    );
    t.meta("stencil_spacing", spacing);
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_order() {
        let axes = vec![
            Axis {
                param: "a".into(),
                values: Grid::Values(vec![1.0, 2.0]),
            },
            Axis {
                param: "b".into(),
                values: Grid::Values(vec![3.0, 4.0, 5.0]),
            },
        ];
        let p = points(&axes);
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![1.0, 4.0]);
        assert_eq!(p[3], vec![2.0, 3.0]);
    }
}
