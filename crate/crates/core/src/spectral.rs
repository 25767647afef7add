//! Periodic grids, the unitary Fourier transform and weighted norms.
//!
//! The box `[-L, L)^d` carries `n` points per axis at `x_j = -L + j h`,
//! `h = 2L/n`. Its dual lattice is `xi_k = pi k / L` for `k` in
//! `[-n/2, n/2)`. Frequency-space fields are always stored in monotone
//! `xi` order (index `m = k + n/2` per axis); the FFT ordering is kept
//! private to this module.
//!
//! The continuous transform is
//! `F f(xi) = (2 pi)^{-d/2} \int e^{-i x.xi} f(x) dx`, which the grid
//! approximates by a DFT scaled with `h^d / (2 pi)^{d/2}` and the phase
//! `e^{i L xi_k} = (-1)^k` coming from the box offset.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic grid on `[-L, L)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub half_width: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, half_width: f64) -> Result<Self> {
        let grid = Grid { dim, n, half_width };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::Config(format!(
                "grid dimension must be 1, 2 or 3 (got {})",
                self.dim
            )));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(Error::Config(format!(
                "points per axis must be a power of two >= 8 (got {})",
                self.n
            )));
        }
        if !(self.half_width.is_finite() && self.half_width > 0.0) {
            return Err(Error::Config(format!(
                "half-width must be positive and finite (got {})",
                self.half_width
            )));
        }
        Ok(())
    }

    /// Total number of lattice points, `n^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Frequency lattice spacing `pi / L`.
    pub fn dual_spacing(&self) -> f64 {
        PI / self.half_width
    }

    pub fn nyquist(&self) -> f64 {
        PI / self.spacing()
    }

    /// Quadrature weight `h^d` of a physical-space cell.
    pub fn physical_weight(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Quadrature weight `(pi/L)^d` of a frequency-space cell.
    pub fn frequency_weight(&self) -> f64 {
        self.dual_spacing().powi(self.dim as i32)
    }

    /// Physical coordinate of per-axis index `j`.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.spacing()
    }

    /// Frequency of per-axis monotone index `m`.
    pub fn freq(&self, m: usize) -> f64 {
        self.dual_spacing() * (m as f64 - (self.n / 2) as f64)
    }

    /// Signed wavenumber of FFT-ordered index `k`.
    fn fft_wavenumber(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    fn fft_freq(&self, k: usize) -> f64 {
        self.dual_spacing() * self.fft_wavenumber(k) as f64
    }

    /// Per-axis indices of flat row-major index `idx` (unused axes are 0).
    pub fn axis_indices(&self, idx: usize) -> [usize; 3] {
        let mut out = [0usize; 3];
        let mut rem = idx;
        for a in (0..self.dim).rev() {
            out[a] = rem % self.n;
            rem /= self.n;
        }
        out
    }

    /// Physical point of flat index `idx`; trailing unused axes are 0.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ax = self.axis_indices(idx);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(ax[a]);
        }
        x
    }

    /// Frequency point of flat monotone index `idx`.
    pub fn frequency(&self, idx: usize) -> [f64; 3] {
        let ax = self.axis_indices(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.freq(ax[a]);
        }
        xi
    }

    pub(crate) fn fft_frequency(&self, idx: usize) -> [f64; 3] {
        let ax = self.axis_indices(idx);
        let mut xi = [0.0; 3];
        for a in 0..self.dim {
            xi[a] = self.fft_freq(ax[a]);
        }
        xi
    }

    /// `|x|^2` at flat index `idx`.
    pub fn abs_x_sq(&self, idx: usize) -> f64 {
        self.point(idx).iter().map(|x| x * x).sum()
    }

    /// `|xi|^2` for every lattice point in FFT order.
    pub(crate) fn fft_abs_xi_sq(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.fft_frequency(i).iter().map(|k| k * k).sum())
            .collect()
    }

    /// Flat index of the lattice point closest to the origin (exact for
    /// both lattices: `x = 0` and `xi = 0` sit at per-axis index `n/2`).
    pub fn origin_index(&self) -> usize {
        let mut idx = 0;
        for _ in 0..self.dim {
            idx = idx * self.n + self.n / 2;
        }
        idx
    }

    /// Whether the point lies in the outer shell `max_a |x_a| >= (1 - frac) L`.
    pub fn in_outer_shell(&self, idx: usize, frac: f64) -> bool {
        let edge = (1.0 - frac) * self.half_width;
        self.point(idx)[..self.dim].iter().any(|x| x.abs() >= edge)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Physical,
    Frequency,
}

/// Complex samples on a grid, row-major over axes.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid,
    space: Space,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid, space: Space, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Usage(format!(
                "field has {} samples but the grid has {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(ComplexField {
            grid,
            space,
            values,
        })
    }

    pub fn zeros(grid: Grid, space: Space) -> Self {
        ComplexField {
            grid,
            space,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f(x)` on the physical lattice.
    pub fn from_physical_fn(grid: Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| f(&grid.point(i)[..grid.dim]))
            .collect();
        ComplexField {
            grid,
            space: Space::Physical,
            values,
        }
    }

    /// Samples `g(xi)` on the frequency lattice.
    pub fn from_frequency_fn(grid: Grid, g: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|i| g(&grid.frequency(i)[..grid.dim]))
            .collect();
        ComplexField {
            grid,
            space: Space::Frequency,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= c);
        out
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        ComplexField {
            grid: self.grid,
            space: self.space,
            values: self.values.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Discrete `L^2` norm with the quadrature weight of the field's space.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.space {
            Space::Physical => self.grid.physical_weight(),
            Space::Frequency => self.grid.frequency_weight(),
        };
        (w * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Largest modulus over the lattice.
    pub fn sup_modulus(&self) -> f64 {
        sup_modulus(self)
    }

    /// Max-abs difference against another field on the same grid and space.
    pub fn max_abs_diff(&self, other: &ComplexField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        assert_eq!(self.space, other.space, "fields live in different spaces");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn require(&self, space: Space, op: &str) -> Result<()> {
        if self.space != space {
            return Err(Error::Usage(format!(
                "{op} expects a {space:?}-space field, got {:?}",
                self.space
            )));
        }
        Ok(())
    }
}

pub fn sup_modulus(f: &ComplexField) -> f64 {
    f.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

type PlanCache = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new(HashMap::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        cell.borrow_mut()
            .entry((n, inverse))
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                if inverse {
                    planner.plan_fft_inverse(n)
                } else {
                    planner.plan_fft_forward(n)
                }
            })
            .clone()
    })
}

/// Unnormalized in-place DFT over every axis of a row-major `n^d` block.
pub(crate) fn fft_nd(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let fft = plan(n, inverse);
    let total = grid.len();
    // innermost axis is contiguous
    fft.process(data);
    if grid.dim == 1 {
        return;
    }
    let mut lines = vec![Complex64::new(0.0, 0.0); total];
    for axis in 0..grid.dim - 1 {
        let stride = n.pow((grid.dim - 1 - axis) as u32);
        let block = stride * n;
        // gather every line along `axis` into contiguous storage
        let mut line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for j in 0..n {
                    lines[line * n + j] = data[base + j * stride];
                }
                line += 1;
            }
        }
        fft.process(&mut lines);
        let mut line = 0;
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for j in 0..n {
                    data[base + j * stride] = lines[line * n + j];
                }
                line += 1;
            }
        }
    }
}

/// Maps flat FFT-ordered index to flat monotone index.
fn fft_to_monotone(grid: &Grid, idx: usize) -> usize {
    let ax = grid.axis_indices(idx);
    let half = grid.n / 2;
    let mut out = 0;
    for &k in ax.iter().take(grid.dim) {
        out = out * grid.n + (k + half) % grid.n;
    }
    out
}

/// Per-point factor `(-1)^{k_1 + ... + k_d}` for an FFT-ordered index.
fn box_phase_sign(grid: &Grid, idx: usize) -> f64 {
    let ax = grid.axis_indices(idx);
    let parity: i64 = ax[..grid.dim].iter().map(|&k| grid.fft_wavenumber(k)).sum();
    if parity.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Discrete approximation of the unitary transform `F`.
pub fn fourier_forward(f: &ComplexField) -> Result<ComplexField> {
    f.require(Space::Physical, "fourier_forward")?;
    let grid = f.grid;
    let mut work = f.values.clone();
    fft_nd(&grid, &mut work, false);
    let scale = grid.physical_weight() / (2.0 * PI).powf(grid.dim as f64 / 2.0);
    let mut out = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, z) in work.into_iter().enumerate() {
        out[fft_to_monotone(&grid, i)] = z * (scale * box_phase_sign(&grid, i));
    }
    Ok(ComplexField {
        grid,
        space: Space::Frequency,
        values: out,
    })
}

/// Inverse of [`fourier_forward`].
pub fn fourier_inverse(g: &ComplexField) -> Result<ComplexField> {
    g.require(Space::Frequency, "fourier_inverse")?;
    let grid = g.grid;
    let mut work = vec![Complex64::new(0.0, 0.0); grid.len()];
    for (i, slot) in work.iter_mut().enumerate() {
        *slot = g.values[fft_to_monotone(&grid, i)] * box_phase_sign(&grid, i);
    }
    fft_nd(&grid, &mut work, true);
    // h^d (pi/L)^d / (2 pi)^d = n^{-d}; the forward scale already took h^d/(2pi)^{d/2}
    let scale = grid.frequency_weight() / (2.0 * PI).powf(grid.dim as f64 / 2.0);
    work.iter_mut().for_each(|z| *z *= scale);
    Ok(ComplexField {
        grid,
        space: Space::Physical,
        values: work,
    })
}

/// Applies a diagonal multiplier given per FFT-ordered lattice point to a
/// physical-space field, without the monotone reordering round-trip.
pub(crate) fn apply_fft_ordered(
    grid: &Grid,
    values: &mut [Complex64],
    multiplier: impl Fn(usize) -> Complex64,
) {
    fft_nd(grid, values, false);
    let inv_n = 1.0 / grid.len() as f64;
    for (i, z) in values.iter_mut().enumerate() {
        *z *= multiplier(i) * inv_n;
    }
    fft_nd(grid, values, true);
}

/// `F^{-1}[m(xi) F f]`. A physical input returns a physical field; a
/// frequency input is multiplied in place and stays in frequency space.
pub fn apply_multiplier(f: &ComplexField, m: impl Fn(&[f64]) -> Complex64) -> Result<ComplexField> {
    let grid = f.grid;
    let d = grid.dim;
    match f.space {
        Space::Frequency => {
            let mut out = f.clone();
            for (i, z) in out.values.iter_mut().enumerate() {
                let mi = m(&grid.frequency(i)[..d]);
                check_finite_multiplier(mi, &grid.frequency(i)[..d])?;
                *z *= mi;
            }
            Ok(out)
        }
        Space::Physical => {
            let symbols = (0..grid.len())
                .map(|i| {
                    let xi = grid.fft_frequency(i);
                    let mi = m(&xi[..d]);
                    check_finite_multiplier(mi, &xi[..d]).map(|_| mi)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut values = f.values.clone();
            apply_fft_ordered(&grid, &mut values, |i| symbols[i]);
            Ok(ComplexField {
                grid,
                space: Space::Physical,
                values,
            })
        }
    }
}

fn check_finite_multiplier(m: Complex64, xi: &[f64]) -> Result<()> {
    if m.re.is_finite() && m.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericalDomain(format!(
            "multiplier is not finite at xi = {xi:?}"
        )))
    }
}

/// Norms of a field at time `t`: `H^{s,0}` directly and `H^{0,s}` after
/// free back-propagation, i.e. `||U(t)^{-1} f||_{H^{0,s}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub l2: f64,
    pub l_inf: f64,
    pub h_s0: f64,
    pub h_0s: f64,
    pub sigma_s: f64,
}

impl NormReport {
    pub fn infinite() -> Self {
        NormReport {
            l2: f64::INFINITY,
            l_inf: f64::INFINITY,
            h_s0: f64::INFINITY,
            h_0s: f64::INFINITY,
            sigma_s: f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.sigma_s.is_finite() && self.l_inf.is_finite()
    }
}

/// `||(1 + |xi|^2)^{s/2} F f||` on the lattice.
pub fn sobolev_norm(f: &ComplexField, s: f64) -> Result<f64> {
    let spectrum = match f.space {
        Space::Physical => fourier_forward(f)?,
        Space::Frequency => f.clone(),
    };
    let grid = spectrum.grid;
    let sum: f64 = spectrum
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let xi2: f64 = grid.frequency(i).iter().map(|k| k * k).sum();
            (1.0 + xi2).powf(s) * z.norm_sqr()
        })
        .sum();
    Ok((grid.frequency_weight() * sum).sqrt())
}

/// `||(1 + |x|^2)^{s/2} f||` on the physical lattice.
pub fn weighted_norm(f: &ComplexField, s: f64) -> Result<f64> {
    f.require(Space::Physical, "weighted_norm")?;
    let grid = f.grid;
    let sum: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(i, z)| (1.0 + grid.abs_x_sq(i)).powf(s) * z.norm_sqr())
        .sum();
    Ok((grid.physical_weight() * sum).sqrt())
}

pub fn norms(f: &ComplexField, t: f64, s: f64) -> Result<NormReport> {
    f.require(Space::Physical, "norms")?;
    if !(s >= 0.0) {
        return Err(Error::Usage(format!(
            "Sobolev index must be >= 0 (got {s})"
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::Usage(format!("norm time must be >= 0 (got {t})")));
    }
    if !f.is_finite() {
        return Ok(NormReport::infinite());
    }
    let h_s0 = sobolev_norm(f, s)?;
    let back = crate::propagators::free_propagate(f, -t)?;
    let h_0s = weighted_norm(&back, s)?;
    Ok(NormReport {
        l2: f.l2_norm(),
        l_inf: f.sup_modulus(),
        h_s0,
        h_0s,
        sigma_s: h_s0 + h_0s,
    })
}

/// Fraction of `L^2` mass carried by frequencies with some component above
/// `frac` times the Nyquist frequency.
pub fn spectral_tail_fraction(f: &ComplexField, frac: f64) -> Result<f64> {
    let spectrum = match f.space {
        Space::Physical => fourier_forward(f)?,
        Space::Frequency => f.clone(),
    };
    let grid = spectrum.grid;
    let cut = frac * grid.nyquist();
    let mut tail = 0.0;
    let mut total = 0.0;
    for (i, z) in spectrum.values.iter().enumerate() {
        let m = z.norm_sqr();
        total += m;
        if grid.frequency(i)[..grid.dim].iter().any(|k| k.abs() > cut) {
            tail += m;
        }
    }
    Ok(if total > 0.0 { tail / total } else { 0.0 })
}

/// Fraction of `L^2` mass in the outer shell `max_a |x_a| >= (1 - frac) L`.
pub fn boundary_mass_fraction(f: &ComplexField, frac: f64) -> f64 {
    let grid = f.grid;
    let mut shell = 0.0;
    let mut total = 0.0;
    for (i, z) in f.values.iter().enumerate() {
        let m = z.norm_sqr();
        total += m;
        if grid.in_outer_shell(i, frac) {
            shell += m;
        }
    }
    if total > 0.0 {
        shell / total
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(grid: Grid) -> ComplexField {
        ComplexField::from_physical_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            Complex64::new((-r2 / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn grid_invariants() {
        let g = Grid::new(2, 16, 4.0).unwrap();
        assert_eq!(g.len(), 256);
        assert!((g.nyquist() - g.freq(0).abs()).abs() < 1e-14);
        assert_eq!(g.point(g.origin_index()), [0.0, 0.0, 0.0]);
        assert_eq!(g.frequency(g.origin_index()), [0.0, 0.0, 0.0]);
        assert!(Grid::new(1, 12, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(4, 8, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
    }

    #[test]
    fn gaussian_is_self_reciprocal() {
        for (d, n) in [(1, 256), (2, 128)] {
            let grid = Grid::new(d, n, 12.0).unwrap();
            let fh = fourier_forward(&gaussian(grid)).unwrap();
            let exact = ComplexField::from_frequency_fn(grid, |xi| {
                let r2: f64 = xi.iter().map(|v| v * v).sum();
                Complex64::new((-r2 / 2.0).exp(), 0.0)
            });
            assert!(fh.max_abs_diff(&exact) < 1e-10, "d = {d}");
        }
    }

    #[test]
    fn shift_theorem() {
        let grid = Grid::new(1, 256, 12.0).unwrap();
        let a = 1.5;
        let shifted = ComplexField::from_physical_fn(grid, |x| {
            Complex64::new((-(x[0] - a).powi(2) / 2.0).exp(), 0.0)
        });
        let lhs = fourier_forward(&shifted).unwrap();
        let base = fourier_forward(&gaussian(grid)).unwrap();
        for (i, (l, b)) in lhs.values().iter().zip(base.values()).enumerate() {
            let xi = grid.frequency(i)[0];
            let expect = b * Complex64::from_polar(1.0, -a * xi);
            assert!((l - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn wrong_space_is_usage_error() {
        let grid = Grid::new(1, 8, 1.0).unwrap();
        let f = ComplexField::zeros(grid, Space::Frequency);
        assert!(matches!(fourier_forward(&f), Err(Error::Usage(_))));
        assert!(matches!(
            fourier_inverse(&gaussian(grid)),
            Err(Error::Usage(_))
        ));
        assert!(matches!(norms(&f, 0.0, 1.0), Err(Error::Usage(_))));
    }

    #[test]
    fn multiplier_identity_and_inverse_pair() {
        let grid = Grid::new(1, 128, 10.0).unwrap();
        let f = ComplexField::from_physical_fn(grid, |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.3 * (-(x[0] - 1.0).powi(2)).exp())
        });
        let same = apply_multiplier(&f, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-14);

        let s = 1.3;
        let up = apply_multiplier(&f, |xi| {
            Complex64::new((1.0 + xi[0] * xi[0]).powf(s / 2.0), 0.0)
        })
        .unwrap();
        let back = apply_multiplier(&up, |xi| {
            Complex64::new((1.0 + xi[0] * xi[0]).powf(-s / 2.0), 0.0)
        })
        .unwrap();
        assert!(back.max_abs_diff(&f) / f.sup_modulus() < 1e-10);
    }

    #[test]
    fn multiplier_derivative_of_sine() {
        let l = 5.0;
        let grid = Grid::new(2, 32, l).unwrap();
        let k = PI / l;
        let f = ComplexField::from_physical_fn(grid, |x| Complex64::new((k * x[0]).sin(), 0.0));
        let df = apply_multiplier(&f, |xi| Complex64::new(0.0, xi[0])).unwrap();
        let exact =
            ComplexField::from_physical_fn(grid, |x| Complex64::new(k * (k * x[0]).cos(), 0.0));
        assert!(df.max_abs_diff(&exact) < 1e-10);
    }

    #[test]
    fn non_finite_multiplier_rejected() {
        let grid = Grid::new(1, 8, 1.0).unwrap();
        let f = gaussian(grid);
        let r = apply_multiplier(&f, |xi| Complex64::new(1.0 / xi[0], 0.0));
        assert!(matches!(r, Err(Error::NumericalDomain(_))));
    }

    #[test]
    fn sup_modulus_examples() {
        let grid = Grid::new(1, 64, 8.0).unwrap();
        let g = ComplexField::from_frequency_fn(grid, |xi| {
            Complex64::new((-xi[0] * xi[0] / 2.0).exp(), 0.0)
        });
        assert_eq!(sup_modulus(&g), 1.0);
        let c = Complex64::new(-3.0, 4.0);
        assert!((sup_modulus(&g.scaled(c)) - 5.0).abs() < 1e-14);
        let xi0 = grid.freq(40);
        let moved = ComplexField::from_frequency_fn(grid, |xi| {
            Complex64::new((-(xi[0] - xi0).powi(2)).exp(), 0.0)
        });
        assert_eq!(sup_modulus(&moved), 1.0);
    }

    #[test]
    fn norms_at_s_zero_collapse_to_l2() {
        let grid = Grid::new(1, 128, 10.0).unwrap();
        let f = gaussian(grid);
        let r = norms(&f, 0.0, 0.0).unwrap();
        assert!((r.h_s0 - r.l2).abs() / r.l2 < 1e-12);
        assert!((r.h_0s - r.l2).abs() / r.l2 < 1e-12);
        assert_eq!(r.sigma_s, r.h_s0 + r.h_0s);
    }

    #[test]
    fn blown_up_field_reports_infinite() {
        let grid = Grid::new(1, 8, 1.0).unwrap();
        let mut f = gaussian(grid);
        f.values_mut()[3] = Complex64::new(f64::NAN, 0.0);
        assert!(!norms(&f, 0.0, 1.0).unwrap().is_finite());
    }

    #[test]
    fn boundary_shell_and_tail_of_centered_gaussian() {
        let grid = Grid::new(1, 256, 20.0).unwrap();
        let f = gaussian(grid);
        assert!(boundary_mass_fraction(&f, 0.1) < 1e-30);
        assert!(spectral_tail_fraction(&f, 2.0 / 3.0).unwrap() < 1e-30);
    }
}
