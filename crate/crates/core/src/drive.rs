//! Time-dependent scalar drives for couplings and fields.
//!
//! Every [`Waveform`] has a closed-form value and a closed-form running
//! integral `∫₀ᵗ w(t′) dt′`.

use serde::{Deserialize, Serialize};

/// A scalar function of time. Amplitudes carry energy units, rates and
/// angular frequencies inverse time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Waveform {
    Constant {
        value: f64,
    },
    /// `before` for `t <= t0`, `after` for `t > t0`.
    Step {
        before: f64,
        after: f64,
        t0: f64,
    },
    /// `final + (initial - final) e^{-rate t}`
    Exponential {
        initial: f64,
        r#final: f64,
        rate: f64,
    },
    /// `amplitude - amplitude sin(rate t)`
    Sine {
        amplitude: f64,
        rate: f64,
    },
    /// `a - a sin(omega t + phase)`
    OffsetSine {
        a: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amplitude - amplitude cos(rate t)`
    Cosine {
        amplitude: f64,
        rate: f64,
    },
    /// `initial + (final - initial)/2 [tanh(rate (t - center)) + 1]`
    Tanh {
        initial: f64,
        r#final: f64,
        rate: f64,
        center: f64,
    },
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

impl Waveform {
    pub fn constant(value: f64) -> Self {
        Waveform::Constant { value }
    }

    pub fn step(before: f64, after: f64, t0: f64) -> Self {
        Waveform::Step { before, after, t0 }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Waveform::Constant { value } => value,
            Waveform::Step { before, after, t0 } => {
                if t <= t0 {
                    before
                } else {
                    after
                }
            }
            Waveform::Exponential {
                initial,
                r#final,
                rate,
            } => r#final + (initial - r#final) * (-rate * t).exp(),
            Waveform::Sine { amplitude, rate } => amplitude - amplitude * (rate * t).sin(),
            Waveform::OffsetSine { a, omega, phase } => a - a * (omega * t + phase).sin(),
            Waveform::Cosine { amplitude, rate } => amplitude - amplitude * (rate * t).cos(),
            Waveform::Tanh {
                initial,
                r#final,
                rate,
                center,
            } => initial + 0.5 * (r#final - initial) * ((rate * (t - center)).tanh() + 1.0),
        }
    }

    /// `∫₀ᵗ w(t′) dt′`
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            Waveform::Constant { value } => value * t,
            Waveform::Step { before, after, t0 } => {
                if t <= t0 {
                    before * t
                } else if t0 >= 0.0 {
                    before * t0 + after * (t - t0)
                } else {
                    after * t
                }
            }
            Waveform::Exponential {
                initial,
                r#final,
                rate,
            } => {
                let decay = if rate == 0.0 {
                    t
                } else {
                    -(-rate * t).exp_m1() / rate
                };
                r#final * t + (initial - r#final) * decay
            }
            Waveform::Sine { amplitude, rate } => {
                if rate == 0.0 {
                    amplitude * t
                } else {
                    amplitude * t - amplitude * (1.0 - (rate * t).cos()) / rate
                }
            }
            Waveform::OffsetSine { a, omega, phase } => {
                if omega == 0.0 {
                    (a - a * phase.sin()) * t
                } else {
                    a * t + a / omega * ((omega * t + phase).cos() - phase.cos())
                }
            }
            Waveform::Cosine { amplitude, rate } => {
                if rate == 0.0 {
                    0.0
                } else {
                    amplitude * t - amplitude / rate * (rate * t).sin()
                }
            }
            Waveform::Tanh {
                initial,
                r#final,
                rate,
                center,
            } => {
                let half = 0.5 * (r#final - initial);
                let tanh_part = if rate == 0.0 {
                    0.0
                } else {
                    (ln_cosh(rate * (t - center)) - ln_cosh(-rate * center)) / rate
                };
                initial * t + half * (t + tanh_part)
            }
        }
    }

    /// Times in `(0, ∞)` where the waveform is discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Waveform::Step { t0, .. } if t0 > 0.0 => vec![t0],
            _ => vec![],
        }
    }

    /// True for piecewise-constant waveforms.
    pub fn is_piecewise_constant(&self) -> bool {
        matches!(self, Waveform::Constant { .. } | Waveform::Step { .. })
    }

    /// `(t0, before, after)` for piecewise-constant waveforms.
    pub fn step_parts(&self) -> Option<(f64, f64, f64)> {
        match *self {
            Waveform::Constant { value } => Some((0.0, value, value)),
            Waveform::Step { before, after, t0 } => Some((t0, before, after)),
            _ => None,
        }
    }

    /// `lim_{t→∞} w(t)` when it exists.
    pub fn limit(&self) -> Option<f64> {
        match *self {
            Waveform::Constant { value } => Some(value),
            Waveform::Step { after, .. } => Some(after),
            Waveform::Exponential { r#final, rate, .. } if rate > 0.0 => Some(r#final),
            Waveform::Tanh { r#final, rate, .. } if rate > 0.0 => Some(r#final),
            _ => None,
        }
    }

    /// The same waveform with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut w = self.clone();
        match &mut w {
            Waveform::Constant { value } => *value *= factor,
            Waveform::Step { before, after, .. } => {
                *before *= factor;
                *after *= factor;
            }
            Waveform::Exponential {
                initial, r#final, ..
            }
            | Waveform::Tanh {
                initial, r#final, ..
            } => {
                *initial *= factor;
                *r#final *= factor;
            }
            Waveform::Sine { amplitude, .. } | Waveform::Cosine { amplitude, .. } => {
                *amplitude *= factor
            }
            Waveform::OffsetSine { a, .. } => *a *= factor,
        }
        w
    }

    pub fn name(&self) -> &'static str {
        match self {
            Waveform::Constant { .. } => "constant",
            Waveform::Step { .. } => "step",
            Waveform::Exponential { .. } => "exponential",
            Waveform::Sine { .. } => "sine",
            Waveform::OffsetSine { .. } => "offset-sine",
            Waveform::Cosine { .. } => "cosine",
            Waveform::Tanh { .. } => "tanh",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cosine_field_starts_at_zero() {
        assert_eq!(
            Waveform::Cosine {
                amplitude: 1.3,
                rate: 0.05
            }
            .eval(0.0),
            0.0
        );
    }

    #[test]
    fn exponential_limits() {
        let w = Waveform::Exponential {
            initial: 0.5,
            r#final: 2.0,
            rate: 1.0,
        };
        assert_eq!(w.eval(0.0), 0.5);
        assert!((w.eval(100.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tanh_midpoint() {
        let w = Waveform::Tanh {
            initial: 0.5,
            r#final: 2.0,
            rate: 3.0,
            center: 2.5,
        };
        assert!((w.eval(2.5) - 1.25).abs() < 1e-15);
    }

    #[test]
    fn step_is_left_continuous() {
        let w = Waveform::step(1.0, 3.0, 2.0);
        assert_eq!(w.eval(2.0), 1.0);
        assert_eq!(w.eval(2.0 + 1e-12), 3.0);
        assert_eq!(w.integral(5.0), 2.0 + 9.0);
    }

    #[test]
    fn elementary_integrals() {
        assert_eq!(Waveform::constant(1.5).integral(4.0), 6.0);
        let w = Waveform::Cosine {
            amplitude: 0.5,
            rate: 0.1,
        };
        let t = 7.0;
        assert!((w.integral(t) - (0.5 * t - 5.0 * (0.1f64 * t).sin())).abs() < 1e-15);
    }

    #[test]
    fn ln_cosh_is_stable() {
        assert!((ln_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((ln_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn toml_round_trip() {
        let w = Waveform::Tanh {
            initial: 1.0,
            r#final: 3.5,
            rate: 0.1,
            center: 0.0,
        };
        let s = toml::to_string(&w).unwrap();
        assert!(s.contains("type = \"tanh\""));
        assert_eq!(toml::from_str::<Waveform>(&s).unwrap(), w);
        assert!(toml::from_str::<Waveform>("type = \"constant\"\nvalue = 1.0\nextra = 2").is_err());
    }
}
