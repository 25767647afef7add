//! Dormand-Prince 5(4) embedded Runge-Kutta pair with adaptive step size.
//!
//! Coefficients from Dormand & Prince, "A family of embedded Runge-Kutta
//! formulae", J. Comp. Appl. Math. 6 (1980). The 5th-order solution is
//! propagated (local extrapolation); the step controller is the usual
//! I-controller with exponent 1/5.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimal vector-space surface the integrator needs.
pub trait OdeState:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    /// Max-component magnitude used by the error norm.
    fn magnitude(&self) -> f64;
}

impl OdeState for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl OdeState for Complex64 {
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Clone, Copy, Debug)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rtol: 1e-10,
            atol: 1e-14,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct Dopri5 {
    pub tol: Tolerance,
    pub safety: f64,
    pub min_factor: f64,
    pub max_factor: f64,
    pub max_steps: usize,
    /// Largest step allowed (infinite by default).
    pub h_max: f64,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            tol: Tolerance::default(),
            safety: 0.9,
            min_factor: 0.2,
            max_factor: 5.0,
            max_steps: 10_000_000,
            h_max: f64::INFINITY,
        }
    }
}

impl Dopri5 {
    pub fn with_tolerance(rtol: f64, atol: f64) -> Self {
        Dopri5 {
            tol: Tolerance { rtol, atol },
            ..Dopri5::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` through the increasing
    /// `stops`, returning the state at each stop. `observe` sees every
    /// accepted step `(t, y)` (stops included).
    pub fn solve<S, F, O>(
        &self,
        f: F,
        t0: f64,
        y0: S,
        stops: &[f64],
        mut observe: O,
    ) -> Result<(Vec<S>, Stats)>
    where
        S: OdeState,
        F: Fn(f64, S) -> S,
        O: FnMut(f64, S),
    {
        let mut stats = Stats::default();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, y);
        stats.evaluations += 1;
        let t_end = stops.last().copied().unwrap_or(t0);
        let mut h = self.initial_step(t0, y0, k1, t_end - t0);
        let mut out = Vec::with_capacity(stops.len());
        observe(t, y);

        for &stop in stops {
            if stop < t {
                return Err(Error::Usage(format!(
                    "integration stops must be nondecreasing (got {stop} after {t})"
                )));
            }
            while t < stop {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step budget of {} exhausted", self.max_steps),
                    });
                }
                let remaining = stop - t;
                let hit_stop = h >= remaining;
                let step = if hit_stop { remaining } else { h };
                if step <= 1e-14 * t.abs().max(1.0) && !hit_stop {
                    return Err(Error::Integration {
                        t,
                        reason: format!("step size underflow (h = {step:e})"),
                    });
                }

                let k2 = f(t + C2 * step, y + k1 * (step * A21));
                let k3 = f(t + C3 * step, y + (k1 * A31 + k2 * A32) * step);
                let k4 = f(t + C4 * step, y + (k1 * A41 + k2 * A42 + k3 * A43) * step);
                let k5 = f(
                    t + C5 * step,
                    y + (k1 * A51 + k2 * A52 + k3 * A53 + k4 * A54) * step,
                );
                let k6 = f(
                    t + step,
                    y + (k1 * A61 + k2 * A62 + k3 * A63 + k4 * A64 + k5 * A65) * step,
                );
                let y_new = y + (k1 * B1 + k3 * B3 + k4 * B4 + k5 * B5 + k6 * B6) * step;
                let k7 = f(t + step, y_new);
                stats.evaluations += 6;

                let err_vec = (k1 * E1 + k3 * E3 + k4 * E4 + k5 * E5 + k6 * E6 + k7 * E7) * step;
                let scale = self.tol.atol + self.tol.rtol * y.magnitude().max(y_new.magnitude());
                let err = err_vec.magnitude() / scale;

                if !err.is_finite() || !y_new.magnitude().is_finite() {
                    stats.rejected += 1;
                    h = step * self.min_factor;
                    continue;
                }

                if err <= 1.0 {
                    stats.accepted += 1;
                    t = if hit_stop { stop } else { t + step };
                    y = y_new;
                    k1 = k7;
                    observe(t, y);
                    let factor = if err == 0.0 {
                        self.max_factor
                    } else {
                        (self.safety * err.powf(-0.2)).clamp(self.min_factor, self.max_factor)
                    };
                    // a truncated final step says nothing about the natural step size
                    if !hit_stop || factor < 1.0 {
                        h = (step * factor).min(self.h_max);
                    }
                } else {
                    stats.rejected += 1;
                    let factor = (self.safety * err.powf(-0.2)).clamp(self.min_factor, 1.0);
                    h = step * factor;
                }
            }
            out.push(y);
        }
        Ok((out, stats))
    }

    fn initial_step<S: OdeState>(&self, _t0: f64, y0: S, f0: S, span: f64) -> f64 {
        let scale = self.tol.atol + self.tol.rtol * y0.magnitude();
        let d0 = y0.magnitude() / scale;
        let d1 = f0.magnitude() / scale;
        let h = if d0 < 1e-5 || d1 < 1e-5 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h.min(span.abs().max(1e-12)).min(self.h_max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let solver = Dopri5::with_tolerance(1e-12, 1e-16);
        let stops: Vec<f64> = (1..=10).map(|k| k as f64 * 0.5).collect();
        let (ys, stats) = solver
            .solve(|_, y: f64| -y, 0.0, 1.0, &stops, |_, _| {})
            .unwrap();
        for (t, y) in stops.iter().zip(ys) {
            assert!((y - (-t).exp()).abs() < 1e-11);
        }
        assert!(stats.accepted > 0);
    }

    #[test]
    fn complex_rotation() {
        let solver = Dopri5::with_tolerance(1e-12, 1e-16);
        let i = Complex64::new(0.0, 1.0);
        let (ys, _) = solver
            .solve(
                |_, y: Complex64| i * y,
                0.0,
                Complex64::new(1.0, 0.0),
                &[3.0],
                |_, _| {},
            )
            .unwrap();
        assert!((ys[0] - Complex64::from_polar(1.0, 3.0)).norm() < 1e-10);
    }

    #[test]
    fn blowup_reports_failure() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let solver = Dopri5::default();
        let r = solver.solve(|_, y: f64| y * y, 0.0, 1.0, &[2.0], |_, _| {});
        assert!(matches!(r, Err(Error::Integration { .. })));
    }
}
