//! Free flow, gauge factor and the pointwise power nonlinearity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{apply_fft_ordered, ComplexField, Space};

/// Coefficient and exponent of `N(u) = lambda |u|^{2 theta / d} u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonlinearityParams {
    pub lambda: Complex64,
    pub theta: f64,
    pub dim: usize,
}

impl NonlinearityParams {
    pub fn new(lambda: Complex64, theta: f64, dim: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Config(format!(
                "theta must be positive (got {theta})"
            )));
        }
        if dim == 0 {
            return Err(Error::Config("dimension must be positive".into()));
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::Config("lambda must be finite".into()));
        }
        Ok(NonlinearityParams { lambda, theta, dim })
    }

    /// Power exponent `p = 1 + 2 theta / d`.
    pub fn p(&self) -> f64 {
        1.0 + self.b()
    }

    /// Modulus exponent `b = p - 1 = 2 theta / d`.
    pub fn b(&self) -> f64 {
        2.0 * self.theta / self.dim as f64
    }

    /// `N(z) = lambda G_p(z)`.
    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.lambda * g_p(z, self.p())
    }
}

/// `U(t) f`, the multiplier `exp(-i t |xi|^2 / 2)`. Negative `t` gives
/// `U(t)^{-1} = U(-t)`.
pub fn free_propagate(f: &ComplexField, t: f64) -> Result<ComplexField> {
    f.require(Space::Physical, "free_propagate")?;
    let mut values = f.values().to_vec();
    if t != 0.0 {
        free_propagate_in_place(f.grid(), &mut values, t);
    }
    ComplexField::new(*f.grid(), Space::Physical, values)
}

pub(crate) fn free_propagate_in_place(
    grid: &crate::spectral::Grid,
    values: &mut [Complex64],
    t: f64,
) {
    let xi2 = grid.fft_abs_xi_sq();
    apply_fft_ordered(grid, values, |i| {
        Complex64::from_polar(1.0, -0.5 * t * xi2[i])
    });
}

/// Multiplies by `M(t) = exp(i |x|^2 / 2t)` or, with `inverse`, by its
/// conjugate.
pub fn gauge_multiply(f: &ComplexField, t: f64, inverse: bool) -> Result<ComplexField> {
    f.require(Space::Physical, "gauge_multiply")?;
    if !(t > 0.0) {
        return Err(Error::Usage(format!(
            "gauge time must be positive (got {t})"
        )));
    }
    let grid = *f.grid();
    let sign = if inverse { -1.0 } else { 1.0 };
    let values = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, z)| z * Complex64::from_polar(1.0, sign * grid.abs_x_sq(i) / (2.0 * t)))
        .collect();
    ComplexField::new(grid, Space::Physical, values)
}

/// `G_p(z) = |z|^{p-1} z`, with `G_p(0) = 0`.
pub fn g_p(z: Complex64, p: f64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        z * r.powf(p - 1.0)
    }
}

/// The pointwise nonlinear flow reached its blow-up time before the end of
/// the requested substep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlowUp {
    /// Time after the start of the substep at which `|w|` becomes infinite.
    pub after: f64,
}

/// Pointwise blow-up horizon of `i w' = lambda |w|^b w` from `|w(0)| = r`;
/// infinite unless `Im lambda > 0`.
pub fn pointwise_blowup_time(r: f64, params: &NonlinearityParams) -> f64 {
    let growth = params.b() * params.lambda.im * r.powf(params.b());
    if growth > 0.0 {
        1.0 / growth
    } else {
        f64::INFINITY
    }
}

/// Exact solution of `i w' = lambda |w|^b w`, `w(0) = z`, at time `dt`.
///
/// With `mu = Im lambda`, `|w|^{-b}` decreases linearly:
/// `|w(dt)|^b = |z|^b / (1 - b mu |z|^b dt)`, and the phase advances by
/// `(Re lambda / (b mu)) log(1 - b mu |z|^b dt)`.
pub fn nonlinear_flow_exact(
    z: Complex64,
    dt: f64,
    params: &NonlinearityParams,
) -> std::result::Result<Complex64, BlowUp> {
    let lambda = params.lambda;
    let r = z.norm();
    if r == 0.0 || dt == 0.0 || lambda == Complex64::new(0.0, 0.0) {
        return Ok(z);
    }
    let b = params.b();
    let rb = r.powf(b);
    let mu = lambda.im;
    if mu == 0.0 {
        return Ok(z * Complex64::from_polar(1.0, -lambda.re * rb * dt));
    }
    let x = b * mu * rb * dt;
    if x >= 1.0 {
        return Err(BlowUp {
            after: 1.0 / (b * mu * rb),
        });
    }
    // log of the denominator 1 - x, accurate for small x
    let log_den = (-x).ln_1p();
    let modulus_gain = (-log_den / b).exp();
    let phase = lambda.re / (b * mu) * log_den;
    Ok(z * Complex64::from_polar(modulus_gain, phase))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn params(lambda: Complex64, b: f64) -> NonlinearityParams {
        // d = 2 makes theta = b
        NonlinearityParams::new(lambda, b, 2).unwrap()
    }

    #[test]
    fn g_p_examples() {
        assert_eq!(g_p(Complex64::new(0.0, 0.0), 1.5), Complex64::new(0.0, 0.0));
        let v = g_p(Complex64::new(1.0, 1.0), 3.0);
        assert!((v - Complex64::new(2.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn exact_flow_examples() {
        let p = params(Complex64::new(0.0, 1.0), 1.0);
        let w = nonlinear_flow_exact(Complex64::new(1.0, 0.0), 0.5, &p).unwrap();
        assert!((w.norm() - 2.0).abs() < 1e-14);
        assert!(w.arg().abs() < 1e-15);

        let blow = nonlinear_flow_exact(Complex64::new(1.0, 0.0), 1.0, &p);
        assert_eq!(blow, Err(BlowUp { after: 1.0 }));

        let real = params(Complex64::new(1.0, 0.0), 0.5);
        let z = Complex64::from_polar(0.7, 0.3);
        let w = nonlinear_flow_exact(z, 0.9, &real).unwrap();
        assert!((w.norm() - 0.7).abs() < 1e-15);
        let expected = 0.3 - 0.7f64.powf(0.5) * 0.9;
        assert!((w.arg() - expected).abs() < 1e-14);
    }

    #[test]
    fn gauge_requires_positive_time() {
        let grid = Grid::new(1, 8, 1.0).unwrap();
        let f = ComplexField::zeros(grid, Space::Physical);
        assert!(matches!(
            gauge_multiply(&f, 0.0, false),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            gauge_multiply(&f, -1.0, true),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn free_propagate_zero_time_is_identity() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        let f = ComplexField::from_physical_fn(grid, |x| Complex64::new(x[0].cos(), x[0].sin()));
        assert_eq!(free_propagate(&f, 0.0).unwrap(), f);
    }
}
