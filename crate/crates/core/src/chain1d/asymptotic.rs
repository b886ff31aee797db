use super::{ChainDynamics, ChainSpec, Propagation};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct AsymptoticOptions {
    /// First horizon `T`; the window is `[T/2, T]`.
    pub horizon: f64,
    /// Largest horizon tried while doubling.
    pub max_horizon: f64,
    /// Samples per window.
    pub samples: usize,
    /// Half-window agreement that counts as stable.
    pub tolerance: f64,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        Self {
            horizon: 50.0,
            max_horizon: 400.0,
            samples: 200,
            tolerance: 2e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticConcurrence {
    pub value: f64,
    pub first_half: f64,
    pub second_half: f64,
    pub horizon: f64,
    pub stable: bool,
}

/// Long-time average of `C(i, i+offset)` over `[T/2, T]`.
///
/// `T` starts at `opts.horizon` and doubles until the averages over the two
/// halves of the window agree within `opts.tolerance` or `opts.max_horizon`
/// is passed; an unstable result is returned with `stable = false`.
pub fn asymptotic_concurrence(
    spec: &ChainSpec,
    offset: usize,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticConcurrence> {
    let dynamics = ChainDynamics::new(spec.clone(), Propagation::Auto)?;
    asymptotic_concurrence_of(&dynamics, offset, opts)
}

pub(crate) fn asymptotic_concurrence_of(
    dynamics: &ChainDynamics,
    offset: usize,
    opts: &AsymptoticOptions,
) -> Result<AsymptoticConcurrence> {
    let mut horizon = opts.horizon;
    loop {
        let n = opts.samples.max(4);
        let times: Vec<f64> = (0..n)
            .map(|i| horizon * (0.5 + 0.5 * i as f64 / (n - 1) as f64))
            .collect();
        let series: Vec<f64> = dynamics
            .contractions_at(&times)?
            .iter()
            .map(|c| c.concurrence(0, offset))
            .collect::<Result<_>>()?;
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let (a, b) = series.split_at(n / 2);
        let result = AsymptoticConcurrence {
            value: mean(&series),
            first_half: mean(a),
            second_half: mean(b),
            horizon,
            stable: (mean(a) - mean(b)).abs() <= opts.tolerance,
        };
        if result.stable || horizon * 2.0 > opts.max_horizon {
            return Ok(result);
        }
        horizon *= 2.0;
    }
}
