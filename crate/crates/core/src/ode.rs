//! Adaptive Dormand–Prince 5(4) integrator for small dense systems.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps: usize,
    /// Initial step; `None` picks one from the span.
    pub first_step: Option<f64>,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            rel_tol: 1e-11,
            max_steps: 1_000_000,
            first_step: None,
        }
    }
}

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
// fifth-order minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Advances `y` from `t0` to `t1` in place under `dy/dt = rhs(t, y)`.
///
/// Returns the number of accepted steps. The FSAL property is used, so each
/// accepted step costs six right-hand-side evaluations.
pub fn integrate<F>(rhs: F, t0: f64, t1: f64, y: &mut [f64], opts: &OdeOptions) -> Result<usize>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = y.len();
    if t1 == t0 {
        return Ok(0);
    }
    if t1 < t0 {
        return Err(Error::Ode {
            at: t0,
            reason: format!("backward integration to {t1} is not supported"),
        });
    }
    let span = t1 - t0;
    let mut h = opts.first_step.unwrap_or(span * 1e-3).min(span);
    let mut t = t0;
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    rhs(t, y, &mut k[0]);

    let mut accepted = 0;
    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(accepted);
        }
        let last = t + h >= t1;
        if last {
            h = t1 - t;
        }
        for s in 1..7 {
            let (prev, rest) = k.split_at_mut(s);
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in prev.iter().enumerate() {
                    acc += h * A[s][j] * kj[i];
                }
                stage[i] = acc;
            }
            rhs(t + C[s] * h, &stage, &mut rest[0]);
        }
        // stage 7 was evaluated at the fifth-order solution
        y_new.copy_from_slice(&stage);

        let mut err_norm: f64 = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_norm = err_norm.max((h * e).abs() / scale);
        }
        if !err_norm.is_finite() {
            return Err(Error::Ode {
                at: t,
                reason: "non-finite state or error estimate".into(),
            });
        }

        if err_norm <= 1.0 {
            t = if last { t1 } else { t + h };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            accepted += 1;
        }
        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < f64::EPSILON * t.abs().max(1.0) {
            return Err(Error::Ode {
                at: t,
                reason: format!("step size underflow (error ratio {err_norm:e})"),
            });
        }
    }
    if t >= t1 {
        return Ok(accepted);
    }
    Err(Error::Ode {
        at: t,
        reason: format!("exceeded {} steps", opts.max_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_decay() {
        let mut y = [1.0];
        integrate(
            |_, y, dy| dy[0] = -2.0 * y[0],
            0.0,
            3.0,
            &mut y,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn harmonic_oscillator_full_period() {
        let mut y = [1.0, 0.0];
        let rhs = |_: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        integrate(
            rhs,
            0.0,
            2.0 * std::f64::consts::PI,
            &mut y,
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-9);
        assert!(y[1].abs() < 1e-9);
    }

    #[test]
    fn step_limit_is_reported() {
        let mut y = [1.0];
        let opts = OdeOptions {
            max_steps: 3,
            ..OdeOptions::default()
        };
        let err = integrate(|_, y, dy| dy[0] = -y[0], 0.0, 100.0, &mut y, &opts).unwrap_err();
        assert!(matches!(err, Error::Ode { .. }));
    }
}
