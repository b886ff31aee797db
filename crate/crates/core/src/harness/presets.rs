use super::config::ExperimentConfig;
use super::run::run;
use super::table::ResultTable;
use crate::error::{Error, Result};

/// A named figure reproduction.
#[derive(Clone, Copy, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub figure: &'static str,
    /// Parameters the figure does not state, with the values chosen here.
    pub chosen: &'static str,
    toml: &'static str,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        ExperimentConfig::from_toml(self.toml).expect("built-in presets are valid")
    }

    /// Run and stamp the preset provenance on the table.
    pub fn run(&self) -> Result<ResultTable> {
        let mut t = run(&self.config())?;
        let mut head = ResultTable::default();
        head.meta("preset", self.name);
        head.meta("figure", self.figure);
        head.meta("chosen", self.chosen);
        head.metadata.append(&mut t.metadata);
        t.metadata = head.metadata;
        Ok(t)
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "fig8",
        figure: "asymptotic C(i,i+1) after a step field a -> b, gamma = 1, T = 0",
        chosen: "N = 2000; a, b on 0.07..2.97 step 0.1 (contains 1.37); J = 1; step at t0 = 0",
        toml: r#"
experiment = "chain-scan"
[chain]
sites = 2000
gamma = 1.0
coupling = { type = "constant", value = 1.0 }
field = { type = "step", before = 1.0, after = 1.0, t0 = 0.0 }
[[axes]]
param = "chain.field.before"
values = { start = 0.07, stop = 2.97, step = 0.1 }
[[axes]]
param = "chain.field.after"
values = { start = 0.07, stop = 2.97, step = 0.1 }
"#,
    },
    Preset {
        name: "fig9",
        figure: "C(i,i+1)(t) under h_III = a - a cos(Kt), K = 0.05",
        chosen: "N = 1000; gamma = 1; J = 1; a in {0.5, 1, 1.5, 2}; t in 0..300 step 0.5",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 300.0, step = 0.5 }
observables = ["concurrence", "magnetization"]
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "constant", value = 1.0 }
field = { type = "cosine", amplitude = 1.0, rate = 0.05 }
[[axes]]
param = "chain.field.amplitude"
values = [0.5, 1.0, 1.5, 2.0]
"#,
    },
    Preset {
        name: "pra1-lambda",
        figure: "C(i,i+1) versus lambda = J/h for constant J and h at kT = 0, 1, 3, gamma = 1",
        chosen: "N = 1000; h = 1; J on 0.05..8 step 0.05; set chain.gamma = 0.5 for the anisotropic panels",
        toml: r#"
experiment = "chain-scan"
observables = ["initial"]
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "constant", value = 1.0 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.kt"
values = [0.0, 1.0, 3.0]
[[axes]]
param = "chain.coupling.value"
values = { start = 0.05, stop = 8.0, step = 0.05 }
"#,
    },
    Preset {
        name: "pra1-lambda1",
        figure: "asymptotic C(i,i+1) versus lambda1 = J1/h after a coupling step from J0 = 1, h = 1, gamma = 1",
        chosen: "N = 1000; kT in {0, 0.5, 1}; J1 on 0.05..4 step 0.05; step at t0 = 0",
        toml: r#"
experiment = "chain-scan"
observables = ["asymptotic", "equilibrium"]
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "step", before = 1.0, after = 1.0, t0 = 0.0 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.kt"
values = [0.0, 0.5, 1.0]
[[axes]]
param = "chain.coupling.after"
values = { start = 0.05, stop = 4.0, step = 0.05 }
"#,
    },
    Preset {
        name: "fig-ks",
        figure: "C(i,i+1)(t) for J_exp, J0 = 0.5, J1 = 2, h = 1, N = 1000, K = 0.1 and 10",
        chosen: "gamma = 1; t in 0..50 step 0.1",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 50.0, step = 0.1 }
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "exponential", initial = 0.5, final = 2.0, rate = 0.1 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.coupling.rate"
values = [0.1, 10.0]
"#,
    },
    Preset {
        name: "fig-ks-tanh",
        figure: "C(i,i+1)(t) for J_tanh centred at t = 5/2, J0 = 0.5, J1 = 2, h = 1, N = 1000, K = 0.1 and 10",
        chosen: "gamma = 1; t in 0..50 step 0.1",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 50.0, step = 0.1 }
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "tanh", initial = 0.5, final = 2.0, rate = 0.1, center = 2.5 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.coupling.rate"
values = [0.1, 10.0]
"#,
    },
    Preset {
        name: "fig-ns",
        figure: "C(i,i+1)(t) for J_exp, J0 = 0.5, J1 = 2, h = 1, K = 1000, N from 100 to 300",
        chosen: "gamma = 1; N in {100, 150, 200, 250, 300}; t in 0..200 step 0.25",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 200.0, step = 0.25 }
[chain]
sites = 100
gamma = 1.0
coupling = { type = "exponential", initial = 0.5, final = 2.0, rate = 1000.0 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.sites"
values = [100.0, 150.0, 200.0, 250.0, 300.0]
"#,
    },
    Preset {
        name: "fig-jcos",
        figure: "C(i,i+1)(t) for J_cos, J0 = 0.5, h = 1, gamma = 1, K = 0.1 and 0.5",
        chosen: "N = 1000; t in 0..200 step 0.1",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 200.0, step = 0.1 }
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "cosine", amplitude = 0.5, rate = 0.1 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "chain.coupling.rate"
values = [0.1, 0.5]
"#,
    },
    Preset {
        name: "fig-both-cos",
        figure: "C(i,i+1)(t) for J = h = J_cos, J0 = h0 = 0.5, K = 1, gamma = 1",
        chosen: "N = 1000; closed-form propagation with lambda = 1; t in 0..60 step 0.05",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 60.0, step = 0.05 }
propagation = { kind = "proportional", lambda = 1.0 }
[chain]
sites = 1000
gamma = 1.0
coupling = { type = "cosine", amplitude = 0.5, rate = 1.0 }
field = { type = "cosine", amplitude = 0.5, rate = 1.0 }
"#,
    },
    Preset {
        name: "impurity-dynamics",
        figure: "centre-spin <sigma_z>(t) on an open chain with impurity coupling J', N = 501, h = 0.5, gamma = 1, T = 0",
        chosen: "J' in {0.25, 0.5, 1, 1.5, 2}; field switched 0.5 -> 0 at t = 0; t in 0..60 step 0.25",
        toml: r#"
experiment = "chain-dynamics"
times = { start = 0.0, stop = 60.0, step = 0.25 }
observables = ["magnetization", "decoherence"]
[impurity]
sites = 501
j_impurity = 1.0
gamma = 1.0
h_initial = 0.5
h_final = 0.0
[[axes]]
param = "impurity.j_impurity"
values = [0.25, 0.5, 1.0, 1.5, 2.0]
"#,
    },
    Preset {
        name: "2d-step",
        figure: "7-site C(1,4)(t) for step fields 0.5 -> 1.5, 2 -> 3 and 0.5 -> 3, gamma = 1",
        chosen: "a in {0.5, 2}, b in {1.5, 3} (the grid adds 2 -> 1.5); dt = 0.01; t_end = 30",
        toml: r#"
experiment = "lattice-dynamics"
t_end = 30.0
dt = 0.01
record_every = 5
pairs = [[1, 4], [1, 2]]
reference_fields = [0.5, 1.5, 2.0, 3.0]
[lattice]
sites = 7
gamma = 1.0
field = { type = "step", before = 0.5, after = 1.5, t0 = 0.0 }
[[axes]]
param = "lattice.field.before"
values = [0.5, 2.0]
[[axes]]
param = "lattice.field.after"
values = [1.5, 3.0]
"#,
    },
    Preset {
        name: "2d-exp",
        figure: "7-site C(1,2)(t), C(1,4)(t) under h = b + (a - b) e^(-omega t), a = 1, b = 2, omega = 0.1, 0.5, 1",
        chosen: "gamma = 1; dt = 0.01; t_end = 60",
        toml: r#"
experiment = "lattice-dynamics"
t_end = 60.0
dt = 0.01
record_every = 5
pairs = [[1, 2], [1, 4]]
reference_fields = [1.0, 2.0]
[lattice]
sites = 7
gamma = 1.0
field = { type = "exponential", initial = 1.0, final = 2.0, rate = 0.1 }
[[axes]]
param = "lattice.field.rate"
values = [0.1, 0.5, 1.0]
"#,
    },
    Preset {
        name: "2d-tanh",
        figure: "7-site C(1,2)(t), C(1,4)(t) under a hyperbolic field from a = 1 to b = 2, omega = 0.1, 0.5, 1",
        chosen: "gamma = 1; h = a + (b - a)/2 [tanh(omega t) + 1] for t > 0 with the ground state at h = a; dt = 0.01; t_end = 60",
        toml: r#"
experiment = "lattice-dynamics"
t_end = 60.0
dt = 0.01
record_every = 5
pairs = [[1, 2], [1, 4]]
reference_fields = [1.0, 2.0]
[lattice]
sites = 7
gamma = 1.0
field = { type = "tanh", initial = 1.0, final = 2.0, rate = 0.1, center = 0.0 }
initial_field = 1.0
[[axes]]
param = "lattice.field.rate"
values = [0.1, 0.5, 1.0]
"#,
    },
    Preset {
        name: "2d-sine",
        figure: "7-site C(1,2)(t), C(1,4)(t) under h = a - a sin(omega t) for (omega, a) = (0.1, 1), (0.5, 1), (0.5, 5)",
        chosen: "gamma = 1; the grid adds (0.1, 5); dt = 0.01; t_end = 100",
        toml: r#"
experiment = "lattice-dynamics"
t_end = 100.0
dt = 0.01
record_every = 5
pairs = [[1, 2], [1, 4]]
[lattice]
sites = 7
gamma = 1.0
field = { type = "offset-sine", a = 1.0, omega = 0.1 }
[[axes]]
param = "lattice.field.omega"
values = [0.1, 0.5]
[[axes]]
param = "lattice.field.a"
values = [1.0, 5.0]
"#,
    },
    Preset {
        name: "impurity-border",
        figure: "7-site C(1,2) versus lambda with a single impurity at border site 1, alpha = -0.5, 0, 0.5, 1, gamma = 1, 0.5, 0",
        chosen: "lambda on 0..4 step 0.02",
        toml: r#"
experiment = "lattice-ground"
pairs = [[1, 2]]
[lattice]
sites = 7
gamma = 1.0
impurity = { kind = "single", site = 1, alpha = 0.0 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "lattice.gamma"
values = [0.0, 0.5, 1.0]
[[axes]]
param = "lattice.impurity.alpha"
values = [-0.5, 0.0, 0.5, 1.0]
[[axes]]
param = "lambda"
values = { start = 0.0, stop = 4.0, step = 0.02 }
"#,
    },
    Preset {
        name: "impurity-center",
        figure: "7-site C(1,2) versus lambda with a single impurity at central site 4, alpha = -0.5, 0, 0.5, 1, gamma = 1, 0.5, 0",
        chosen: "lambda on 0..4 step 0.02",
        toml: r#"
experiment = "lattice-ground"
pairs = [[1, 2]]
[lattice]
sites = 7
gamma = 1.0
impurity = { kind = "single", site = 4, alpha = 0.0 }
field = { type = "constant", value = 1.0 }
[[axes]]
param = "lattice.gamma"
values = [0.0, 0.5, 1.0]
[[axes]]
param = "lattice.impurity.alpha"
values = [-0.5, 0.0, 0.5, 1.0]
[[axes]]
param = "lambda"
values = { start = 0.0, stop = 4.0, step = 0.02 }
"#,
    },
    Preset {
        name: "impurity-lattice-dynamics",
        figure: "7-site C(1,2), C(1,4), C(2,4) with an impurity at site 1, alpha = -0.5, 0, 1, 2, exponential field a = 1, b = 3.5, omega = 0.1, gamma = 1 and 0.5",
        chosen: "dt = 0.01; t_end = 80; equilibrium references at h = 3.5 in metadata",
        toml: r#"
experiment = "lattice-dynamics"
t_end = 80.0
dt = 0.01
record_every = 10
pairs = [[1, 2], [1, 4], [2, 4]]
reference_fields = [3.5]
[lattice]
sites = 7
gamma = 1.0
impurity = { kind = "single", site = 1, alpha = 0.0 }
field = { type = "exponential", initial = 1.0, final = 3.5, rate = 0.1 }
[[axes]]
param = "lattice.gamma"
values = [0.5, 1.0]
[[axes]]
param = "lattice.impurity.alpha"
values = [-0.5, 0.0, 1.0, 2.0]
"#,
    },
    Preset {
        name: "double-impurity",
        figure: "7-site C(1,2), C(1,4), C(4,5) versus alpha1, alpha2 with impurities at sites 1 and 2, h = 2, gamma = 1 and 0.5",
        chosen: "alpha1, alpha2 on -0.5..2 step 0.1",
        toml: r#"
experiment = "lattice-ground"
pairs = [[1, 2], [1, 4], [4, 5]]
[lattice]
sites = 7
gamma = 1.0
impurity = { kind = "double", sites = [1, 2], alpha1 = 0.0, alpha2 = 0.0 }
field = { type = "constant", value = 2.0 }
[[axes]]
param = "lattice.gamma"
values = [0.5, 1.0]
[[axes]]
param = "lattice.impurity.alpha1"
values = { start = -0.5, stop = 2.0, step = 0.1 }
[[axes]]
param = "lattice.impurity.alpha2"
values = { start = -0.5, stop = 2.0, step = 0.1 }
"#,
    },
    Preset {
        name: "qpt-ising",
        figure: "7-site C_14, dC_14/dlambda, energy gap and its derivatives for the pure Ising system (gamma = 1, alpha = 0)",
        chosen: "lambda on 0..4 step 0.01",
        toml: r#"
experiment = "qpt-scan"
pair = [1, 4]
lambda = { start = 0.0, stop = 4.0, step = 0.01 }
[lattice]
sites = 7
gamma = 1.0
field = { type = "constant", value = 0.0 }
"#,
    },
    Preset {
        name: "qpt-anisotropic",
        figure: "7-site C_14, dC_14/dlambda, energy gap and its derivatives for gamma = 0.5, alpha = 0",
        chosen: "lambda on 0..4 step 0.01",
        toml: r#"
experiment = "qpt-scan"
pair = [1, 4]
lambda = { start = 0.0, stop = 4.0, step = 0.01 }
[lattice]
sites = 7
gamma = 0.5
field = { type = "constant", value = 0.0 }
"#,
    },
    Preset {
        name: "qpt-isotropic",
        figure: "7-site C_14, dC_14/dlambda, energy gap and its derivatives for gamma = 0, alpha = 0",
        chosen: "lambda on 0..4 step 0.01",
        toml: r#"
experiment = "qpt-scan"
pair = [1, 4]
lambda = { start = 0.0, stop = 4.0, step = 0.01 }
[lattice]
sites = 7
gamma = 0.0
field = { type = "constant", value = 0.0 }
"#,
    },
    Preset {
        name: "fig1-2d",
        figure: "C(center, nearest neighbour) versus lambda for the 7- and 19-site Ising patches",
        chosen: "lambda on 0..8 step 0.01; 19 sites resolve the ground state only",
        toml: r#"
experiment = "qpt-scan"
sizes = [7, 19]
lambda = { start = 0.0, stop = 8.0, step = 0.01 }
[lattice]
sites = 7
gamma = 1.0
field = { type = "constant", value = 0.0 }
"#,
    },
];

pub fn find_preset(name: &str) -> Result<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name).ok_or_else(|| {
        let names: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
        Error::Config(vec![format!(
            "unknown preset `{name}`; available: {}",
            names.join(", ")
        )])
    })
}

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    find_preset(name).map(Preset::config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::Waveform;
    use crate::harness::config::*;

    #[test]
    fn every_preset_parses() {
        for p in PRESETS {
            if let Err(e) = ExperimentConfig::from_toml(p.toml) {
                panic!("{}: {e}", p.name);
            }
        }
    }

    #[test]
    fn unknown_lists_catalog() {
        let Err(Error::Config(msg)) = preset("fig99") else {
            panic!()
        };
        assert!(msg[0].contains("fig8") && msg[0].contains("qpt-ising"));
    }

    #[test]
    fn fig9_uses_k_005() {
        let ExperimentConfig::ChainDynamics(c) = preset("fig9").unwrap() else {
            panic!()
        };
        let Some(Waveform::Cosine { rate, .. }) = c.chain.map(|m| m.field) else {
            panic!()
        };
        assert_eq!(rate, 0.05);
        assert_eq!(c.axes[0].values.values(), vec![0.5, 1.0, 1.5, 2.0]);
    }

    #[test]
    fn fig1_grid() {
        let ExperimentConfig::QptScan(c) = preset("fig1-2d").unwrap() else {
            panic!()
        };
        let g = c.lambda.values();
        assert_eq!(g.len(), 801);
        assert!((g[800] - 8.0).abs() < 1e-12);
        assert_eq!(c.sizes, vec![7, 19]);
    }

    #[test]
    fn qpt_ising_is_pure() {
        let ExperimentConfig::QptScan(c) = preset("qpt-ising").unwrap() else {
            panic!()
        };
        assert_eq!(c.lattice.gamma, 1.0);
        assert_eq!(c.lattice.impurity, crate::lattice2d::Impurity::None);
    }
}
