use serde::{Deserialize, Serialize};

use crate::chain1d::{AsymptoticOptions, ChainSpec, ImpurityChain};
use crate::drive::Waveform;
use crate::error::{Error, Result};
use crate::lattice2d::{build_topology, center_site, Impurity, LatticeSpec};

/// One experiment, selected by the `experiment` key.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    ChainScan(ChainScanConfig),
    ChainDynamics(ChainDynamicsConfig),
    LatticeGround(LatticeGroundConfig),
    LatticeDynamics(LatticeDynamicsConfig),
    QptScan(QptScanConfig),
}

/// Explicit values or an inclusive `start..=stop` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range(Range),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn range(start: f64, stop: f64, step: f64) -> Self {
        Grid::Range(Range { start, stop, step })
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Grid::Values(v) => v.clone(),
            Grid::Range(r) => {
                if !(r.step > 0.0) || !(r.stop >= r.start) {
                    return Vec::new();
                }
                let n = ((r.stop - r.start) / r.step + 1e-9).floor() as usize + 1;
                (0..n).map(|k| r.start + k as f64 * r.step).collect()
            }
        }
    }

    fn check(&self, name: &str, errors: &mut Vec<String>) {
        let v = self.values();
        if v.is_empty() {
            errors.push(format!("{name}: grid is empty"));
        } else if v.windows(2).any(|w| !(w[1] > w[0])) {
            errors.push(format!("{name}: grid must be strictly increasing"));
        } else if v.iter().any(|x| !x.is_finite()) {
            errors.push(format!("{name}: grid values must be finite"));
        }
    }
}

/// A scan axis: `param` is a dotted key path into the experiment config
/// (`chain.field.before`, `lattice.impurity.alpha`, ...).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: String,
    pub values: Grid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainModel {
    pub sites: usize,
    pub gamma: f64,
    /// Temperature `kT` in units of `J₁`; 0 is the ground state.
    #[serde(default)]
    pub kt: f64,
    pub coupling: Waveform,
    pub field: Waveform,
}

impl ChainModel {
    pub fn beta(&self) -> f64 {
        if self.kt == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.kt
        }
    }

    pub fn spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(
            self.sites,
            self.gamma,
            self.coupling.clone(),
            self.field.clone(),
            self.beta(),
        )
    }

    fn check(&self, errors: &mut Vec<String>) {
        if let Err(e) = self.spec() {
            errors.push(format!("chain: {e}"));
        }
        if !(self.kt >= 0.0) {
            errors.push(format!("chain.kt: must be non-negative, got {}", self.kt));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainScanObservable {
    /// Long-time average of `C(i, i+r)` over `[T/2, T]`.
    Asymptotic,
    /// `C(i, i+r)` of the thermal state of the long-time Hamiltonian.
    Equilibrium,
    /// `C(i, i+r)` at `t = 0`.
    Initial,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymptoticSettings {
    pub horizon: f64,
    pub max_horizon: f64,
    pub samples: usize,
    pub tolerance: f64,
}

impl Default for AsymptoticSettings {
    fn default() -> Self {
        let d = AsymptoticOptions::default();
        Self {
            horizon: d.horizon,
            max_horizon: d.max_horizon,
            samples: d.samples,
            tolerance: d.tolerance,
        }
    }
}

impl AsymptoticSettings {
    pub fn options(&self) -> AsymptoticOptions {
        AsymptoticOptions {
            horizon: self.horizon,
            max_horizon: self.max_horizon,
            samples: self.samples,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainScanConfig {
    pub chain: ChainModel,
    pub axes: Vec<Axis>,
    #[serde(default = "default_chain_observables")]
    pub observables: Vec<ChainScanObservable>,
    #[serde(default = "one")]
    pub separation: usize,
    #[serde(default)]
    pub asymptotic: AsymptoticSettings,
}

fn default_chain_observables() -> Vec<ChainScanObservable> {
    vec![ChainScanObservable::Asymptotic]
}

fn one() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainObservable {
    /// `C(i, i+r)` for every separation.
    Concurrence,
    /// `M = ⟨Sᶻ⟩`.
    Magnetization,
    /// `⟨σˣσˣ⟩`, `⟨σʸσʸ⟩`, `⟨σᶻσᶻ⟩` for every separation.
    Correlators,
    /// Impurity chains: `⟨σᶻ⟩(t) − ⟨σᶻ⟩(0)` at the observed site.
    Decoherence,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PropagationSetting {
    #[default]
    Auto,
    Step,
    Numeric,
    /// Closed form for `J(t) = λ h(t)`.
    Proportional {
        lambda: f64,
    },
}

/// Open chain with an impurity at its center (BdG treatment).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImpurityModel {
    pub sites: usize,
    pub j_impurity: f64,
    pub gamma: f64,
    pub h_initial: f64,
    #[serde(default)]
    pub h_final: f64,
    #[serde(default)]
    pub kt: f64,
    /// 1-based observed site; the center by default.
    #[serde(default)]
    pub site: Option<usize>,
}

impl ImpurityModel {
    pub fn chain(&self) -> Result<ImpurityChain> {
        let beta = if self.kt == 0.0 {
            f64::INFINITY
        } else {
            1.0 / self.kt
        };
        Ok(ImpurityChain::new(
            self.sites,
            self.j_impurity,
            self.gamma,
            self.h_initial,
            beta,
        )?
        .with_final_field(self.h_final))
    }

    /// 0-based observed site.
    pub fn observed(&self) -> usize {
        self.site
            .map(|s| s.saturating_sub(1))
            .unwrap_or((self.sites.saturating_sub(1)) / 2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDynamicsConfig {
    #[serde(default)]
    pub chain: Option<ChainModel>,
    #[serde(default)]
    pub impurity: Option<ImpurityModel>,
    pub times: Grid,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "default_dynamics_observables")]
    pub observables: Vec<ChainObservable>,
    #[serde(default = "default_separations")]
    pub separations: Vec<usize>,
    #[serde(default)]
    pub propagation: PropagationSetting,
}

fn default_dynamics_observables() -> Vec<ChainObservable> {
    vec![ChainObservable::Concurrence]
}

fn default_separations() -> Vec<usize> {
    vec![1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeModel {
    pub sites: usize,
    #[serde(default = "unit")]
    pub coupling: f64,
    pub gamma: f64,
    #[serde(default)]
    pub impurity: Impurity,
    pub field: Waveform,
    #[serde(default)]
    pub initial_field: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

impl LatticeModel {
    /// Impurity sites in configs are 1-based.
    fn zero_based_impurity(&self) -> Impurity {
        match self.impurity {
            Impurity::None => Impurity::None,
            Impurity::Single { site, alpha } => Impurity::Single {
                site: site.wrapping_sub(1),
                alpha,
            },
            Impurity::Double {
                sites: (p, q),
                alpha1,
                alpha2,
            } => Impurity::Double {
                sites: (p.wrapping_sub(1), q.wrapping_sub(1)),
                alpha1,
                alpha2,
            },
        }
    }

    pub fn spec(&self) -> Result<LatticeSpec> {
        let spec = LatticeSpec::patch(
            self.sites,
            self.coupling,
            self.gamma,
            &self.zero_based_impurity(),
            self.field.clone(),
        )?;
        Ok(match self.initial_field {
            Some(h) => spec.with_initial_field(h),
            None => spec,
        })
    }

    /// The center and its lowest-numbered neighbour, 1-based.
    pub fn center_pair(sites: usize) -> Result<SitePair> {
        let c = center_site(sites)?;
        let nb = build_topology(sites)?
            .into_iter()
            .filter_map(|(i, j)| {
                if i == c {
                    Some(j)
                } else if j == c {
                    Some(i)
                } else {
                    None
                }
            })
            .min()
            .ok_or_else(|| Error::invalid("center has no neighbours"))?;
        Ok((nb.min(c) + 1, nb.max(c) + 1))
    }

    fn check(&self, errors: &mut Vec<String>) {
        if let Err(e) = build_topology(self.sites) {
            errors.push(format!("lattice.sites: {e}"));
        } else if let Err(e) = self.spec() {
            errors.push(format!("lattice: {e}"));
        }
    }
}

/// 1-based site pair.
pub type SitePair = (usize, usize);

fn check_pairs(pairs: &[SitePair], sites: usize, errors: &mut Vec<String>) {
    for &(a, b) in pairs {
        if a == 0 || b == 0 || a > sites || b > sites || a == b {
            errors.push(format!(
                "pair ({a}, {b}) is not a pair of distinct sites in 1..={sites}"
            ));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GroundSolver {
    #[default]
    Lanczos,
    Tracemin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeObservable {
    Concurrence,
    Energy,
    Gap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeGroundConfig {
    pub lattice: LatticeModel,
    /// The special axis `lambda` sets a constant field `h = λ·J`.
    pub axes: Vec<Axis>,
    pub pairs: Vec<SitePair>,
    #[serde(default = "default_lattice_observables")]
    pub observables: Vec<LatticeObservable>,
    #[serde(default)]
    pub solver: GroundSolver,
}

fn default_lattice_observables() -> Vec<LatticeObservable> {
    vec![LatticeObservable::Concurrence]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum EvolutionMethod {
    /// Projection up to 10 sites when the schedule has at most 64 distinct
    /// fields, Krylov otherwise.
    #[default]
    Auto,
    Projection,
    Krylov,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeDynamicsConfig {
    pub lattice: LatticeModel,
    pub t_end: f64,
    pub dt: f64,
    #[serde(default = "one")]
    pub record_every: usize,
    pub pairs: Vec<SitePair>,
    #[serde(default)]
    pub method: EvolutionMethod,
    #[serde(default)]
    pub axes: Vec<Axis>,
    /// Fields whose ground-state concurrences are reported as references.
    #[serde(default)]
    pub reference_fields: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QptScanConfig {
    pub lattice: LatticeModel,
    /// Lattice sizes scanned in turn; `lattice.sites` when absent.
    #[serde(default)]
    pub sizes: Vec<usize>,
    pub lambda: Grid,
    /// The center and its lowest-numbered neighbour on each size when absent.
    #[serde(default)]
    pub pair: Option<SitePair>,
    /// Resolve the first excited level (gap columns, degeneracy flags).
    /// Defaults to true up to 14 sites.
    #[serde(default)]
    pub gap: Option<bool>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parse a file given to the `kind` subcommand; a missing `experiment`
    /// key defaults to `kind`.
    pub fn from_toml_as(text: &str, kind: &str) -> Result<Self> {
        let mut table: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(vec![e.message().to_string()]))?;
        match table.get("experiment").map(|v| v.as_str()) {
            None => {
                table.insert("experiment".into(), kind.into());
            }
            Some(Some(k)) if k == kind => {}
            Some(other) => {
                let found = other.map_or_else(|| "a non-string".to_string(), |k| format!("`{k}`"));
                return Err(Error::Config(vec![format!(
                    "experiment is {found} but the subcommand is `{kind}`"
                )]));
            }
        }
        let cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(vec![e.message().to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs always serialize")
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentConfig::ChainScan(_) => "chain-scan",
            ExperimentConfig::ChainDynamics(_) => "chain-dynamics",
            ExperimentConfig::LatticeGround(_) => "lattice-ground",
            ExperimentConfig::LatticeDynamics(_) => "lattice-dynamics",
            ExperimentConfig::QptScan(_) => "qpt-scan",
        }
    }

    fn axes(&self) -> &[Axis] {
        match self {
            ExperimentConfig::ChainScan(c) => &c.axes,
            ExperimentConfig::ChainDynamics(c) => &c.axes,
            ExperimentConfig::LatticeGround(c) => &c.axes,
            ExperimentConfig::LatticeDynamics(c) => &c.axes,
            ExperimentConfig::QptScan(_) => &[],
        }
    }

    /// Every problem found, not just the first.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        for axis in self.axes() {
            axis.values
                .check(&format!("axis {}", axis.param), &mut errors);
            if axis.param != "lambda" || !matches!(self, ExperimentConfig::LatticeGround(_)) {
                if let Some(v) = axis.values.values().first() {
                    if let Err(e) = self.with_param(&axis.param, *v) {
                        errors.push(e.to_string());
                    }
                }
            }
        }
        match self {
            ExperimentConfig::ChainScan(c) => {
                c.chain.check(&mut errors);
                if c.axes.is_empty() || c.axes.len() > 2 {
                    errors.push(format!(
                        "chain-scan needs one or two axes, got {}",
                        c.axes.len()
                    ));
                }
                if c.separation == 0 || c.separation >= c.chain.sites {
                    errors.push(format!(
                        "separation {} outside 1..{}",
                        c.separation, c.chain.sites
                    ));
                }
                if c.observables.contains(&ChainScanObservable::Equilibrium)
                    && (c.chain.coupling.limit().is_none() || c.chain.field.limit().is_none())
                {
                    errors.push("equilibrium needs drives with a long-time limit".into());
                }
            }
            ExperimentConfig::ChainDynamics(c) => {
                c.times.check("times", &mut errors);
                if c.times.values().first().is_some_and(|t| *t < 0.0) {
                    errors.push("times must be non-negative".into());
                }
                match (&c.chain, &c.impurity) {
                    (Some(m), None) => {
                        m.check(&mut errors);
                        for &r in &c.separations {
                            if r == 0 || r >= m.sites {
                                errors.push(format!("separation {r} outside 1..{}", m.sites));
                            }
                        }
                        if c.observables.contains(&ChainObservable::Decoherence) {
                            errors
                                .push("the decoherence observable needs an impurity chain".into());
                        }
                    }
                    (None, Some(m)) => {
                        if let Err(e) = m.chain() {
                            errors.push(format!("impurity: {e}"));
                        }
                        if m.site.is_some_and(|s| s == 0 || s > m.sites) {
                            errors.push(format!("impurity.site must lie in 1..={}", m.sites));
                        }
                        if c.observables.iter().any(|o| {
                            *o != ChainObservable::Decoherence
                                && *o != ChainObservable::Magnetization
                        }) {
                            errors.push("impurity chains support the decoherence and magnetization observables".into());
                        }
                    }
                    _ => errors
                        .push("chain-dynamics needs exactly one of [chain] or [impurity]".into()),
                }
            }
            ExperimentConfig::LatticeGround(c) => {
                c.lattice.check(&mut errors);
                check_pairs(&c.pairs, c.lattice.sites, &mut errors);
                if c.axes.is_empty() {
                    errors.push("lattice-ground needs at least one axis".into());
                }
            }
            ExperimentConfig::LatticeDynamics(c) => {
                c.lattice.check(&mut errors);
                check_pairs(&c.pairs, c.lattice.sites, &mut errors);
                if !(c.dt > 0.0) || !(c.t_end > 0.0) {
                    errors.push(format!(
                        "need dt > 0 and t_end > 0, got dt = {}, t_end = {}",
                        c.dt, c.t_end
                    ));
                }
                if c.method == EvolutionMethod::Projection
                    && c.lattice.sites > crate::lattice2d::PROJECTION_MAX_SITES
                {
                    errors.push("projection evolution is limited to 14 sites".into());
                }
            }
            ExperimentConfig::QptScan(c) => {
                c.lattice.check(&mut errors);
                c.lambda.check("lambda", &mut errors);
                if c.lambda.values().len() < 4 {
                    errors.push("lambda grid needs at least 4 points for derivatives".into());
                }
                for &n in &c.sizes {
                    if build_topology(n).is_err() {
                        errors.push(format!("sizes: no built-in patch with {n} sites"));
                    }
                }
                let smallest = c
                    .sizes
                    .iter()
                    .copied()
                    .chain([c.lattice.sites])
                    .min()
                    .unwrap_or(0);
                if let Some(p) = c.pair {
                    check_pairs(&[p], smallest, &mut errors);
                }
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errors))
        }
    }

    /// Copy with the dotted key `path` set to `value`.
    pub fn with_param(&self, path: &str, value: f64) -> Result<Self> {
        let mut root =
            toml::Value::try_from(self).map_err(|e| Error::Config(vec![e.to_string()]))?;
        let mut node = &mut root;
        let keys: Vec<&str> = path.split('.').collect();
        for key in &keys[..keys.len() - 1] {
            node = node
                .get_mut(*key)
                .filter(|n| n.is_table())
                .ok_or_else(|| Error::Config(vec![format!("axis {path}: no table `{key}`")]))?;
        }
        let last = keys[keys.len() - 1];
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(vec![format!("axis {path}: not a table")]))?;
        let slot = table
            .get_mut(last)
            .ok_or_else(|| Error::Config(vec![format!("axis {path}: unknown key `{last}`")]))?;
        *slot = match slot {
            toml::Value::Integer(_) if value.fract() == 0.0 => toml::Value::Integer(value as i64),
            toml::Value::Integer(_) => {
                return Err(Error::Config(vec![format!(
                    "axis {path}: {value} is not an integer"
                )]));
            }
            toml::Value::Float(_) => toml::Value::Float(value),
            _ => {
                return Err(Error::Config(vec![format!(
                    "axis {path}: `{last}` is not numeric"
                )]))
            }
        };
        root.try_into().map_err(|e: toml::de::Error| {
            Error::Config(vec![format!("axis {path}: {}", e.message())])
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCAN: &str = r#"
experiment = "chain-scan"
separation = 1
[chain]
sites = 200
gamma = 1.0
coupling = { type = "constant", value = 1.0 }
field = { type = "step", before = 1.0, after = 1.0, t0 = 0.0 }
[[axes]]
param = "chain.field.before"
values = { start = 0.5, stop = 1.5, step = 0.5 }
"#;

    #[test]
    fn parses_and_echoes() {
        let cfg = ExperimentConfig::from_toml(SCAN).unwrap();
        let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        let ExperimentConfig::ChainScan(c) = &cfg else {
            panic!()
        };
        assert_eq!(c.axes[0].values.values(), vec![0.5, 1.0, 1.5]);
    }

    #[test]
    fn unknown_key_is_named() {
        let bad = SCAN.replace("separation = 1", "separation = 1\nseperation = 2");
        let Err(Error::Config(msgs)) = ExperimentConfig::from_toml(&bad) else {
            panic!()
        };
        assert!(msgs[0].contains("seperation"), "{msgs:?}");
    }

    #[test]
    fn all_semantic_errors_reported() {
        let bad = SCAN
            .replace("sites = 200", "sites = 7")
            .replace("step = 0.5", "step = -0.5");
        let Err(Error::Config(msgs)) = ExperimentConfig::from_toml(&bad) else {
            panic!()
        };
        assert!(msgs.len() >= 2, "{msgs:?}");
    }

    #[test]
    fn subcommand_supplies_kind() {
        let body = SCAN.replace("experiment = \"chain-scan\"", "");
        assert!(ExperimentConfig::from_toml_as(&body, "chain-scan").is_ok());
        assert!(matches!(
            ExperimentConfig::from_toml_as(SCAN, "qpt-scan"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn param_paths() {
        let cfg = ExperimentConfig::from_toml(SCAN).unwrap();
        let ExperimentConfig::ChainScan(c) = cfg.with_param("chain.field.after", 3.0).unwrap()
        else {
            panic!()
        };
        assert_eq!(c.chain.field, Waveform::step(1.0, 3.0, 0.0));
        assert!(cfg.with_param("chain.sites", 2.5).is_err());
        assert!(cfg.with_param("chain.nothing", 1.0).is_err());
    }
}
