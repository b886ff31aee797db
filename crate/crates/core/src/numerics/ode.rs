use super::{dense_hermitian_eig, unitarity_defect, CMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Polar re-unitarization period in accepted steps.
    pub renormalize_every: usize,
    /// Times where `H(t)` may jump; integration restarts at each.
    pub breakpoints: Vec<f64>,
    pub initial_step: Option<f64>,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            renormalize_every: 100,
            breakpoints: vec![],
            initial_step: None,
            max_step: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol * 1e-3,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegrationOutcome {
    pub unitary: CMatrix,
    pub accepted: usize,
    pub rejected: usize,
    /// `|U^H U - I|` at the end, after the final polar correction.
    pub unitarity_defect: f64,
}

/// Nearest unitary matrix `U (U^H U)^{-1/2}`.
pub fn polar_unitarize(u: &CMatrix) -> Result<CMatrix> {
    let g = u.adjoint() * u;
    let g = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let eig = dense_hermitian_eig(&g)?;
    let inv_sqrt = eig.function(|x| C64::new(1.0 / x.max(1e-300).sqrt(), 0.0));
    Ok(u * inv_sqrt)
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Solve `i dU/dt = H(t) U`, `U(0) = I`, up to `t_end`.
///
/// A [`StepUnderflow`](Error::StepUnderflow) error carries the time at which
/// the step size collapsed.
pub fn integrate_evolution(
    h: &dyn Fn(f64) -> CMatrix,
    t_end: f64,
    opts: &OdeOptions,
) -> Result<IntegrationOutcome> {
    let n = h(0.0).nrows();
    let (u, accepted, rejected) =
        dormand_prince(h, CMatrix::identity(n, n), t_end, opts, &polar_unitarize)?;
    let u = polar_unitarize(&u)?;
    let defect = unitarity_defect(&u);
    Ok(IntegrationOutcome {
        unitary: u,
        accepted,
        rejected,
        unitarity_defect: defect,
    })
}

/// Solve `i dψ/dt = H(t) ψ` for a state vector, renormalizing periodically.
pub fn integrate_state(
    h: &dyn Fn(f64) -> CMatrix,
    psi: &[C64],
    t_end: f64,
    opts: &OdeOptions,
) -> Result<Vec<C64>> {
    let y0 = CMatrix::from_column_slice(psi.len(), 1, psi);
    let norm0 = y0.norm();
    let renorm = |y: &CMatrix| -> Result<CMatrix> { Ok(y * C64::new(norm0 / y.norm(), 0.0)) };
    let (y, _, _) = dormand_prince(h, y0, t_end, opts, &renorm)?;
    Ok(renorm(&y)?.iter().copied().collect())
}

fn dormand_prince(
    h: &dyn Fn(f64) -> CMatrix,
    y0: CMatrix,
    t_end: f64,
    opts: &OdeOptions,
    renormalize: &dyn Fn(&CMatrix) -> Result<CMatrix>,
) -> Result<(CMatrix, usize, usize)> {
    if !(t_end >= 0.0) {
        return Err(Error::invalid(format!(
            "t_end must be non-negative, got {t_end}"
        )));
    }
    let mut u = y0;
    let mut stops: Vec<f64> = opts
        .breakpoints
        .iter()
        .copied()
        .filter(|b| *b > 0.0 && *b < t_end)
        .collect();
    stops.sort_by(f64::total_cmp);
    stops.dedup();
    stops.push(t_end);

    let rhs = |t: f64, y: &CMatrix| h(t) * y * C64::new(0.0, -1.0);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let mut since_renorm = 0usize;
    let mut seg_start: f64 = 0.0;
    let mut step = opts
        .initial_step
        .unwrap_or_else(|| (t_end / 100.0).max(1e-6))
        .min(opts.max_step);

    for &seg_end in &stops {
        let mut t = seg_start;
        let floor = seg_start + 1e-13 * (1.0 + seg_start.abs());
        let at = |tau: f64| if seg_start > 0.0 { tau.max(floor) } else { tau };
        let mut k1 = rhs(at(t), &u);
        while t < seg_end {
            let mut hs = step.min(seg_end - t).min(opts.max_step);
            let last = t + hs >= seg_end;
            if last {
                hs = seg_end - t;
            }
            if hs < 1e-14 * (1.0 + t.abs()) && !last {
                return Err(Error::StepUnderflow { time: t });
            }
            let mut k: Vec<CMatrix> = Vec::with_capacity(7);
            k.push(k1.clone());
            for s in 1..7 {
                let mut y = u.clone();
                for (j, kj) in k.iter().enumerate() {
                    if A[s][j] != 0.0 {
                        y += kj * C64::new(A[s][j] * hs, 0.0);
                    }
                }
                let tau = t + C[s] * hs;
                k.push(rhs(at(tau), &y));
            }
            let mut y5 = u.clone();
            let mut err = CMatrix::zeros(u.nrows(), u.ncols());
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5 += &k[s] * C64::new(B5[s] * hs, 0.0);
                }
                let e = B5[s] - B4[s];
                if e != 0.0 {
                    err += &k[s] * C64::new(e * hs, 0.0);
                }
            }
            let mut en = 0.0f64;
            for ((e, a), b) in err.iter().zip(u.iter()).zip(y5.iter()) {
                let sc = opts.atol + opts.rtol * a.norm().max(b.norm());
                en = en.max(e.norm() / sc);
            }
            if en <= 1.0 {
                t = if last { seg_end } else { t + hs };
                u = y5;
                accepted += 1;
                since_renorm += 1;
                if since_renorm >= opts.renormalize_every {
                    u = renormalize(&u)?;
                    since_renorm = 0;
                    k1 = rhs(at(t), &u);
                } else {
                    k1 = k.swap_remove(6);
                }
                if accepted + rejected > opts.max_steps {
                    return Err(Error::NoConvergence {
                        solver: "dormand-prince",
                        iterations: accepted + rejected,
                        residuals: vec![en],
                    });
                }
                let fac = if en == 0.0 {
                    5.0
                } else {
                    (0.9 * en.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    step = hs * fac;
                }
            } else {
                rejected += 1;
                step = hs * (0.9 * en.powf(-0.2)).clamp(0.1, 0.9);
                if step < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::StepUnderflow { time: t });
                }
            }
        }
        seg_start = seg_end;
    }
    Ok((u, accepted, rejected))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix_exp_unitary;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn random_h(n: usize, seed: u64) -> CMatrix {
        crate::numerics::dense::tests::random_hermitian(n, seed)
    }

    #[test]
    fn constant_hamiltonian() {
        let h0 = random_h(4, 1);
        let out = integrate_evolution(&|_| h0.clone(), 3.0, &OdeOptions::default()).unwrap();
        let exact = matrix_exp_unitary(&h0, 3.0).unwrap();
        assert!((out.unitary - exact).norm() < 1e-8);
    }

    #[test]
    fn commuting_family() {
        let h0 = random_h(3, 2);
        let f = |t: f64| 1.0 + 0.5 * (2.0 * t).sin();
        let big_f = |t: f64| t + 0.25 * (1.0 - (2.0 * t).cos());
        let out = integrate_evolution(&|t| &h0 * c(f(t)), 5.0, &OdeOptions::default()).unwrap();
        let exact = matrix_exp_unitary(&h0, big_f(5.0)).unwrap();
        assert!((out.unitary - exact).norm() < 1e-8);
    }

    #[test]
    fn jump_at_breakpoint() {
        let h0 = random_h(2, 3);
        let h1 = random_h(2, 4);
        let opts = OdeOptions {
            breakpoints: vec![1.0],
            ..OdeOptions::default()
        };
        let (a, b) = (h0.clone(), h1.clone());
        let out = integrate_evolution(
            &move |t| if t <= 1.0 { a.clone() } else { b.clone() },
            2.5,
            &opts,
        )
        .unwrap();
        let exact = matrix_exp_unitary(&h1, 1.5).unwrap() * matrix_exp_unitary(&h0, 1.0).unwrap();
        assert!((out.unitary - exact).norm() < 1e-8);
    }

    #[test]
    fn unitarity_over_many_steps() {
        let h0 = random_h(4, 5);
        let opts = OdeOptions {
            max_step: 1e-3,
            ..OdeOptions::default()
        };
        let out = integrate_evolution(&|t| &h0 * c(t.cos()), 10.0, &opts).unwrap();
        assert!(out.accepted >= 10_000);
        assert!(out.unitarity_defect < 1e-9);
    }

    #[test]
    fn polar_fixes_drift() {
        let u = matrix_exp_unitary(&random_h(3, 6), 0.7).unwrap() * c(1.0 + 1e-6);
        let v = polar_unitarize(&u).unwrap();
        assert!(unitarity_defect(&v) < 1e-13);
    }
}
