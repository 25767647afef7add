use nls_lifespan::integrator::Dopri5;
use nls_lifespan::propagators::{
    free_propagate, g_p, gauge_multiply, nonlinear_flow_exact, NonlinearityParams,
};
use nls_lifespan::spectral::{apply_multiplier, fourier_forward, ComplexField, Grid, Space};
use nls_lifespan::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn gaussian(grid: Grid) -> ComplexField {
    ComplexField::from_physical_fn(grid, |x| {
        Complex64::new((-x.iter().map(|v| v * v).sum::<f64>() / 2.0).exp(), 0.0)
    })
}

fn random_field(grid: Grid, seed: u64) -> ComplexField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ComplexField::new(grid, Space::Physical, values).unwrap()
}

fn params(lambda: Complex64, b: f64) -> NonlinearityParams {
    // b = 2 theta / d with d = 1
    NonlinearityParams::new(lambda, b / 2.0, 1).unwrap()
}

#[test]
fn free_gaussian_matches_analytic_spreading() {
    let grid = Grid::new(1, 1024, 40.0).unwrap();
    let phi = gaussian(grid);
    for k in 0..=10 {
        let t = 0.5 * k as f64;
        let u = free_propagate(&phi, t).unwrap();
        let z = Complex64::new(1.0, t);
        let exact = ComplexField::from_physical_fn(grid, |x| {
            z.powf(-0.5) * (-(x[0] * x[0]) / (2.0 * z)).exp()
        });
        assert!(u.max_abs_diff(&exact) < 1e-8, "t = {t}");
    }
}

#[test]
fn unitarity_on_random_field() {
    for (d, n) in [(1, 256), (2, 32), (3, 16)] {
        let grid = Grid::new(d, n, 7.0).unwrap();
        let f = random_field(grid, d as u64);
        let u = free_propagate(&f, 3.7).unwrap();
        assert!((u.l2_norm() - f.l2_norm()).abs() / f.l2_norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn group_law(t1 in -5.0f64..5.0, t2 in -5.0f64..5.0, seed in 0u64..1000) {
        let grid = Grid::new(1, 128, 10.0).unwrap();
        let f = random_field(grid, seed);
        let a = free_propagate(&free_propagate(&f, t2).unwrap(), t1).unwrap();
        let b = free_propagate(&f, t1 + t2).unwrap();
        prop_assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn propagation_commutes_with_transform(t in -4.0f64..4.0, seed in 0u64..1000) {
        let grid = Grid::new(2, 32, 6.0).unwrap();
        let f = random_field(grid, seed);
        let via_physical = fourier_forward(&free_propagate(&f, t).unwrap()).unwrap();
        let f_hat = fourier_forward(&f).unwrap();
        let via_frequency = ComplexField::new(
            grid,
            Space::Frequency,
            f_hat
                .values()
                .iter()
                .enumerate()
                .map(|(i, z)| {
                    let xi = grid.frequency(i);
                    let xi2: f64 = xi.iter().take(grid.dim).map(|v| v * v).sum();
                    z * Complex64::from_polar(1.0, -0.5 * t * xi2)
                })
                .collect(),
        )
        .unwrap();
        prop_assert!(via_physical.max_abs_diff(&via_frequency) < 1e-12);
    }

    #[test]
    fn gauge_is_unimodular_and_invertible(t in 0.05f64..10.0, seed in 0u64..1000) {
        let grid = Grid::new(1, 64, 5.0).unwrap();
        let f = random_field(grid, seed);
        let g = gauge_multiply(&f, t, false).unwrap();
        for (a, b) in g.values().iter().zip(f.values()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-15);
        }
        let back = gauge_multiply(&g, t, true).unwrap();
        prop_assert!(back.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn flow_semigroup(re in -2.0f64..2.0, im in -2.0f64..2.0, b in 0.2f64..3.0,
                      r in 0.01f64..2.0, arg in 0.0f64..std::f64::consts::TAU, f1 in 0.0f64..0.45, f2 in 0.0f64..0.45) {
        let p = params(Complex64::new(re, im), b);
        let z = Complex64::from_polar(r, arg);
        // keep both substeps well inside the pointwise blow-up horizon
        let horizon = if im > 0.0 { 1.0 / (b * im * r.powf(b)) } else { 1.0 };
        let (dt1, dt2) = (f1 * horizon, f2 * horizon);
        let two = nonlinear_flow_exact(nonlinear_flow_exact(z, dt2, &p).unwrap(), dt1, &p).unwrap();
        let one = nonlinear_flow_exact(z, dt1 + dt2, &p).unwrap();
        prop_assert!((two - one).norm() <= 1e-12 * one.norm());
    }

    #[test]
    fn flow_modulus_monotone_in_time(im in -2.0f64..2.0, b in 0.2f64..3.0, r in 0.05f64..2.0,
                                     f1 in 0.01f64..0.4, f2 in 0.01f64..0.4) {
        let p = params(Complex64::new(0.3, im), b);
        let z = Complex64::new(r, 0.0);
        let horizon = if im > 0.0 { 1.0 / (b * im * r.powf(b)) } else { 1.0 };
        let (short, long) = (f1 * horizon, (f1 + f2) * horizon);
        let a = nonlinear_flow_exact(z, short, &p).unwrap().norm();
        let c = nonlinear_flow_exact(z, long, &p).unwrap().norm();
        if im > 1e-9 {
            prop_assert!(r < a && a < c);
        } else if im < -1e-9 {
            prop_assert!(r > a && a > c);
        }
    }
}

#[test]
fn flow_is_constant_modulus_for_real_coupling() {
    let p = params(Complex64::new(1.0, 0.0), 1.0);
    let z = Complex64::from_polar(0.7, 0.3);
    let w = nonlinear_flow_exact(z, 2.0, &p).unwrap();
    assert!((w.norm() - 0.7).abs() < 1e-15);
    assert!((w.arg() - (0.3 - 0.7 * 2.0)).abs() < 1e-14);
}

#[test]
fn flow_agrees_with_adaptive_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let solver = Dopri5::with_tolerance(1e-13, 1e-300);
    for _ in 0..200 {
        let lambda = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let b = rng.gen_range(0.2..3.0);
        let r: f64 = rng.gen_range(0.05..2.0);
        let z = Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU));
        let horizon = if lambda.im > 0.0 {
            1.0 / (b * lambda.im * r.powf(b))
        } else {
            2.0
        };
        let dt = (rng.gen_range(0.0..0.8) * horizon).min(rng.gen_range(0.0..5.0));
        let p = params(lambda, b);
        let exact = nonlinear_flow_exact(z, dt, &p).unwrap();
        let rhs = |_t: f64, w: Complex64| -Complex64::new(0.0, 1.0) * lambda * w * w.norm().powf(b);
        let (ys, _) = solver.solve(rhs, 0.0, z, &[dt], |_, _| {}).unwrap();
        assert!(
            (ys[0] - exact).norm() <= 1e-10 * exact.norm(),
            "lambda={lambda} b={b} z={z} dt={dt}: {} vs {}",
            ys[0],
            exact
        );
    }
}

#[test]
fn elementary_lipschitz_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for p in [1.5, 2.0, 2.5, 3.0] {
        for _ in 0..25_000 {
            let mut draw = || {
                let scale = 10f64.powf(rng.gen_range(-3.0..1.0));
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
            };
            let (z, w) = (draw(), draw());
            let lhs = (g_p(z, p) - g_p(w, p)).norm();
            let rhs = p * (z.norm() + w.norm()).powf(p - 1.0) * (z - w).norm();
            assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "p={p} z={z} w={w}");
        }
    }
}

/// `U(t) |x|^s U(t)^{-1} f = M(t) (-t^2 Lap)^{s/2} M(t)^{-1} f`, both sides
/// assembled from the module primitives. The test field is the free
/// evolution of a bump away from the origin, so `|x|^s U(t)^{-1} f` stays
/// smooth for fractional `s`.
fn gauge_factorization_error(t: f64, s: f64) -> f64 {
    let grid = Grid::new(1, 2048, 40.0).unwrap();
    let bump = ComplexField::from_physical_fn(grid, |x| {
        Complex64::from_polar((-(x[0] - 6.0) * (x[0] - 6.0) / 2.0).exp(), 0.5 * x[0])
    });
    let f = free_propagate(&bump, t).unwrap();
    let back = free_propagate(&f, -t).unwrap();
    let weighted = ComplexField::new(
        grid,
        Space::Physical,
        back.values()
            .iter()
            .enumerate()
            .map(|(i, z)| z * grid.abs_x_sq(i).powf(s / 2.0))
            .collect(),
    )
    .unwrap();
    let lhs = free_propagate(&weighted, t).unwrap();

    let demod = gauge_multiply(&f, t, true).unwrap();
    let lifted = apply_multiplier(&demod, |xi| {
        Complex64::new(
            (t * t * xi.iter().map(|v| v * v).sum::<f64>()).powf(s / 2.0),
            0.0,
        )
    })
    .unwrap();
    let rhs = gauge_multiply(&lifted, t, false).unwrap();
    lhs.max_abs_diff(&rhs) / rhs.sup_modulus()
}

#[test]
fn gauge_factorization_identity() {
    for t in [0.5, 1.0, 2.0] {
        for s in [0.75, 1.0, 1.5, 2.0] {
            let err = gauge_factorization_error(t, s);
            assert!(err < 1e-6, "t = {t}, s = {s}: {err:e}");
        }
    }
}
