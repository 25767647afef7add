//! The profile ODE `i eta' = lambda t^{-a} |eta|^b eta (+ rho)`.
//!
//! The unperturbed equation has a closed form: `|eta_0|^{-b}` is affine in
//! `t^{1-a}`, and the phase is a logarithm of the same denominator. The
//! perturbed equation is integrated per frequency sample with the
//! adaptive [`Dopri5`] pair and audited against the a priori bound
//! `|eta| <= C0 eps + M eps^{1+delta}`.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Dopri5;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeParams {
    pub a: f64,
    pub b: f64,
    pub lambda: Complex64,
    pub eps: f64,
    pub t_star: f64,
    /// `Psi_0 = sup |psi_0|`.
    pub psi0_sup: f64,
    pub sigma: f64,
}

impl OdeParams {
    pub fn new(
        a: f64,
        b: f64,
        lambda: Complex64,
        eps: f64,
        t_star: f64,
        psi0_sup: f64,
        sigma: f64,
    ) -> Result<Self> {
        let p = OdeParams {
            a,
            b,
            lambda,
            eps,
            t_star,
            psi0_sup,
            sigma,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(Error::Domain(format!(
                "a must lie in (0,1) (got {})",
                self.a
            )));
        }
        if !(self.b > 0.0) {
            return Err(Error::Domain(format!(
                "b must be positive (got {})",
                self.b
            )));
        }
        if !(self.lambda.im > 0.0) {
            return Err(Error::Domain(format!(
                "Im lambda must be positive (got {})",
                self.lambda.im
            )));
        }
        if !(self.eps > 0.0) || !(self.t_star > 0.0) || !(self.psi0_sup >= 0.0) {
            return Err(Error::Domain(
                "eps and t_star must be positive, Psi_0 nonnegative".into(),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma < self.tau1()) {
            return Err(Error::Domain(format!(
                "sigma must lie in (0, tau1) = (0, {}) (got {})",
                self.tau1(),
                self.sigma
            )));
        }
        Ok(())
    }

    /// `q = b / (2 (1 - a))`.
    pub fn q(&self) -> f64 {
        self.b / (2.0 * (1.0 - self.a))
    }

    /// `tau_1` from `1/tau_1 = (2 q Im(lambda) Psi_0^b)^{1/(1-a)}`.
    pub fn tau1(&self) -> f64 {
        let rate = 2.0 * self.q() * self.lambda.im * self.psi0_sup.powf(self.b);
        rate.powf(-1.0 / (1.0 - self.a))
    }

    /// End of the bound window, `sigma eps^{-2q}`.
    pub fn horizon(&self) -> f64 {
        self.sigma * self.eps.powf(-2.0 * self.q())
    }

    /// `1 - 2 q Im(lambda) (eps |psi_0|)^b (t^{1-a} - t_*^{1-a})`.
    fn denominator(&self, t: f64, psi0_abs: f64) -> f64 {
        1.0 - self.growth_coefficient(psi0_abs)
            * (t.powf(1.0 - self.a) - self.t_star.powf(1.0 - self.a))
    }

    fn growth_coefficient(&self, psi0_abs: f64) -> f64 {
        2.0 * self.q() * self.lambda.im * (self.eps * psi0_abs).powf(self.b)
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= self.t_star) {
            return Err(Error::Usage(format!(
                "profile time {t} precedes t_* = {}",
                self.t_star
            )));
        }
        Ok(())
    }
}

/// `|eta_0(t)|` for `|psi_0(xi)| = psi0_abs`; [`Error::BlowUp`] once the
/// denominator is no longer positive.
pub fn eta0_modulus_closed_form(t: f64, psi0_abs: f64, params: &OdeParams) -> Result<f64> {
    params.check_time(t)?;
    let den = params.denominator(t, psi0_abs);
    if den <= 0.0 {
        return Err(Error::BlowUp {
            time: eta0_blowup_time(psi0_abs, params),
        });
    }
    Ok(params.eps * psi0_abs * den.powf(-1.0 / params.b))
}

/// Complex `eta_0(t)` including its phase
/// `(Re lambda / (b Im lambda)) log(denominator)`.
pub fn eta0_closed_form(t: f64, psi0: Complex64, params: &OdeParams) -> Result<Complex64> {
    params.check_time(t)?;
    let r = psi0.norm();
    if r == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let x = params.growth_coefficient(r)
        * (t.powf(1.0 - params.a) - params.t_star.powf(1.0 - params.a));
    if x >= 1.0 {
        return Err(Error::BlowUp {
            time: eta0_blowup_time(r, params),
        });
    }
    let log_den = (-x).ln_1p();
    let gain = (-log_den / params.b).exp();
    let phase = params.lambda.re / (params.b * params.lambda.im) * log_den;
    Ok(psi0 * params.eps * Complex64::from_polar(gain, phase))
}

/// Time at which the closed-form denominator vanishes.
pub fn eta0_blowup_time(psi0_abs: f64, params: &OdeParams) -> f64 {
    let g = params.growth_coefficient(psi0_abs);
    if g <= 0.0 {
        return f64::INFINITY;
    }
    (params.t_star.powf(1.0 - params.a) + 1.0 / g).powf(1.0 / (1.0 - params.a))
}

/// Adaptive integration of `i eta' = lambda t^{-a} |eta|^b eta` from
/// `eta(t_*) = eps psi_0`, reported at the increasing `stops`.
pub fn integrate_unperturbed(
    params: &OdeParams,
    psi0: Complex64,
    stops: &[f64],
    rtol: f64,
    atol: f64,
) -> Result<Vec<Complex64>> {
    params.validate()?;
    let (a, b) = (params.a, params.b);
    let rhs = |t: f64, eta: Complex64| -I * params.lambda * eta * eta.norm().powf(b) / t.powf(a);
    let solver = Dopri5::with_tolerance(rtol, atol);
    let (values, _) = solver.solve(rhs, params.t_star, psi0 * params.eps, stops, |_, _| {})?;
    Ok(values)
}

/// Explicit constants of the perturbed-profile bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaConstants {
    pub c0: f64,
    pub c3: f64,
    pub m: f64,
}

impl LemmaConstants {
    pub fn new(params: &OdeParams, c1: f64, c2: f64) -> Self {
        let (a, b) = (params.a, params.b);
        let ratio = (params.sigma / params.tau1()).powf(1.0 - a);
        let c0 = params.psi0_sup / (1.0 - ratio).powf(1.0 / b);
        let c3 = 2.0 * params.lambda.norm() * (b + 1.0) * (2.0 * c0 + 1.0).powf(b) + 0.5;
        let m = 2.0
            * (c1 * c1 + c2 * c2 / (2.0 * c3)).sqrt()
            * (c3 * params.sigma.powf(1.0 - a) / (2.0 * (1.0 - a))).exp();
        LemmaConstants { c0, c3, m }
    }
}

/// Largest `|eta_0| / eps` over `[t_*, sigma eps^{-2q}]` for the given
/// `|psi_0|` samples, on `n_times` uniformly spaced times.
pub fn sup_bound_check(params: &OdeParams, psi0_abs: &[f64], n_times: usize) -> Result<f64> {
    let t_end = params.horizon().max(params.t_star);
    let n = n_times.max(2);
    let mut sup: f64 = 0.0;
    for k in 0..n {
        let t = params.t_star + (t_end - params.t_star) * k as f64 / (n - 1) as f64;
        for &r in psi0_abs {
            sup = sup.max(eta0_modulus_closed_form(t, r, params)? / params.eps);
        }
    }
    Ok(sup)
}

pub type Psi1Fn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;
pub type RhoFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;

/// Initial-data perturbation `psi_1(xi)`.
#[derive(Clone)]
pub enum Psi1 {
    Zero,
    Constant(Complex64),
    Custom(Psi1Fn),
}

impl Psi1 {
    fn eval(&self, xi: f64) -> Complex64 {
        match self {
            Psi1::Zero => Complex64::new(0.0, 0.0),
            Psi1::Constant(c) => *c,
            Psi1::Custom(f) => f(xi),
        }
    }
}

/// Forcing term `rho`. Amplitudes are fractions of the envelope
/// `C2 eps^{1+b+delta} t^{-a}`.
#[derive(Clone)]
pub enum Rho {
    Zero,
    /// `amplitude * envelope * e^{i (frequency t + phase)}`.
    Oscillatory {
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `amplitude * envelope * i eta/|eta|`: pushes `|eta|` outward.
    WorstSign {
        amplitude: f64,
    },
    Custom(RhoFn),
}

#[derive(Clone)]
pub struct PerturbationSpec {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub psi1: Psi1,
    pub rho: Rho,
}

impl PerturbationSpec {
    pub fn unperturbed(c1: f64, c2: f64, delta: f64) -> Self {
        PerturbationSpec {
            c1,
            c2,
            delta,
            psi1: Psi1::Zero,
            rho: Rho::Zero,
        }
    }

    fn rho_envelope(&self, t: f64, params: &OdeParams) -> f64 {
        self.c2 * params.eps.powf(1.0 + params.b + self.delta) / t.powf(params.a)
    }

    fn psi1_envelope(&self, params: &OdeParams) -> f64 {
        self.c1 * params.eps.powf(1.0 + self.delta)
    }

    fn rho(&self, t: f64, xi: f64, eta: Complex64, params: &OdeParams) -> Complex64 {
        match &self.rho {
            Rho::Zero => Complex64::new(0.0, 0.0),
            Rho::Oscillatory {
                amplitude,
                frequency,
                phase,
            } => Complex64::from_polar(
                amplitude * self.rho_envelope(t, params),
                frequency * t + phase,
            ),
            Rho::WorstSign { amplitude } => {
                let r = eta.norm();
                if r == 0.0 {
                    I * (amplitude * self.rho_envelope(t, params))
                } else {
                    I * eta * (amplitude * self.rho_envelope(t, params) / r)
                }
            }
            Rho::Custom(f) => f(t, xi),
        }
    }
}

/// Largest `eps` the bound admits: `min{1, sigma^{-1/q}, M^{-1/delta}}`.
pub fn admissible_eps(params: &OdeParams, c1: f64, c2: f64, delta: f64) -> f64 {
    let m = LemmaConstants::new(params, c1, c2).m;
    1f64.min(params.sigma.powf(-1.0 / params.q()))
        .min(m.powf(-1.0 / delta))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub t: f64,
    pub xi: f64,
    pub eta: Complex64,
    pub eta0: Complex64,
    pub w_abs: f64,
    /// `|w|^2 + (C2^2 / 2 C3) eps^{2 + 2 delta}`.
    pub f: f64,
    /// `f(t_*) exp(C3 eps^b (t^{1-a} - t_*^{1-a}) / (1-a))`.
    pub gronwall_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProfileTrajectory {
    pub params: OdeParams,
    pub constants: LemmaConstants,
    pub delta: f64,
    pub t_end: f64,
    pub samples: Vec<ProfileSample>,
    /// Suprema over every accepted integration step, all samples.
    pub sup_eta: f64,
    pub sup_w: f64,
    pub max_gronwall_ratio: f64,
    pub accepted_steps: usize,
}

impl ProfileTrajectory {
    /// `C0 eps + M eps^{1+delta}`.
    pub fn lemma_bound(&self) -> f64 {
        self.constants.c0 * self.params.eps
            + self.constants.m * self.params.eps.powf(1.0 + self.delta)
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let io = |e| Error::io(path, e);
        writeln!(w, "t,xi,re_eta,im_eta,abs_eta0,abs_w,f").map_err(io)?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                s.t,
                s.xi,
                s.eta.re,
                s.eta.im,
                s.eta0.norm(),
                s.w_abs,
                s.f
            )
            .map_err(io)?;
        }
        w.flush().map_err(io)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IntegrationOptions {
    /// Optional cap on the integration window (the lemma's upper time).
    pub t_bar: Option<f64>,
    /// Number of recorded times per frequency sample.
    pub n_records: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions {
            t_bar: None,
            n_records: 100,
            rtol: 1e-10,
            atol: 1e-16,
        }
    }
}

struct SampleRun {
    samples: Vec<ProfileSample>,
    sup_eta: f64,
    sup_w: f64,
    max_ratio: f64,
    accepted: usize,
}

/// Integrates the perturbed profile ODE for each `xi` on
/// `[t_*, min(t_bar, sigma eps^{-2q})]`.
pub fn integrate_perturbed(
    params: &OdeParams,
    psi0: &(dyn Fn(f64) -> Complex64 + Sync),
    pert: &PerturbationSpec,
    xi_samples: &[f64],
    opts: &IntegrationOptions,
) -> Result<ProfileTrajectory> {
    params.validate()?;
    let eps_max = admissible_eps(params, pert.c1, pert.c2, pert.delta);
    if params.eps > eps_max {
        return Err(Error::Domain(format!(
            "eps = {} exceeds min{{1, sigma^(-1/q), M^(-1/delta)}} = {eps_max}",
            params.eps
        )));
    }
    for &xi in xi_samples {
        if psi0(xi).norm() > params.psi0_sup * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "|psi_0({xi})| exceeds Psi_0 = {}",
                params.psi0_sup
            )));
        }
    }
    let constants = LemmaConstants::new(params, pert.c1, pert.c2);
    let t_end = opts
        .t_bar
        .map_or(params.horizon(), |tb| tb.min(params.horizon()));
    if !(t_end > params.t_star) {
        return Err(Error::Usage(format!(
            "empty integration window [{}, {t_end})",
            params.t_star
        )));
    }

    let runs = xi_samples
        .par_iter()
        .map(|&xi| integrate_one(params, psi0(xi), xi, pert, &constants, t_end, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut traj = ProfileTrajectory {
        params: *params,
        constants,
        delta: pert.delta,
        t_end,
        samples: Vec::new(),
        sup_eta: 0.0,
        sup_w: 0.0,
        max_gronwall_ratio: 0.0,
        accepted_steps: 0,
    };
    for run in runs {
        traj.samples.extend(run.samples);
        traj.sup_eta = traj.sup_eta.max(run.sup_eta);
        traj.sup_w = traj.sup_w.max(run.sup_w);
        traj.max_gronwall_ratio = traj.max_gronwall_ratio.max(run.max_ratio);
        traj.accepted_steps += run.accepted;
    }
    Ok(traj)
}

fn integrate_one(
    params: &OdeParams,
    psi0: Complex64,
    xi: f64,
    pert: &PerturbationSpec,
    constants: &LemmaConstants,
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<SampleRun> {
    let (a, b) = (params.a, params.b);
    let psi1 = pert.psi1.eval(xi);
    if psi1.norm() > pert.psi1_envelope(params) * (1.0 + 1e-12) {
        return Err(Error::Envelope(format!(
            "|psi_1({xi})| = {} > C1 eps^(1+delta) = {}",
            psi1.norm(),
            pert.psi1_envelope(params)
        )));
    }
    let eta_start = psi0 * params.eps + psi1;
    let floor = pert.c2 * pert.c2 / (2.0 * constants.c3) * params.eps.powf(2.0 + 2.0 * pert.delta);
    let f_start = psi1.norm_sqr() + floor;
    let gronwall = |t: f64| {
        f_start
            * (constants.c3 * params.eps.powf(b) * (t.powf(1.0 - a) - params.t_star.powf(1.0 - a))
                / (1.0 - a))
                .exp()
    };

    let rhs = |t: f64, eta: Complex64| {
        let forcing =
            params.lambda * eta * eta.norm().powf(b) / t.powf(a) + pert.rho(t, xi, eta, params);
        -I * forcing
    };

    let n = opts.n_records.max(2);
    let stops: Vec<f64> = (1..n)
        .map(|k| params.t_star + (t_end - params.t_star) * k as f64 / (n - 1) as f64)
        .collect();

    let mut run = SampleRun {
        samples: Vec::with_capacity(n),
        sup_eta: 0.0,
        sup_w: 0.0,
        max_ratio: 0.0,
        accepted: 0,
    };
    let mut failure: Option<Error> = None;
    let envelope_tol = 1.0 + 1e-12;

    let solver = Dopri5::with_tolerance(opts.rtol, opts.atol);
    let observe = |t: f64, eta: Complex64| {
        if failure.is_some() {
            return;
        }
        let rho = pert.rho(t, xi, eta, params);
        if rho.norm() > pert.rho_envelope(t, params) * envelope_tol {
            failure = Some(Error::Envelope(format!(
                "|rho({t}, {xi})| = {} exceeds C2 eps^(1+b+delta) t^-a",
                rho.norm()
            )));
            return;
        }
        match eta0_closed_form(t, psi0, params) {
            Ok(eta0) => {
                let w = (eta - eta0).norm();
                let f = w * w + floor;
                run.sup_eta = run.sup_eta.max(eta.norm());
                run.sup_w = run.sup_w.max(w);
                run.max_ratio = run.max_ratio.max(f / gronwall(t));
                run.accepted += 1;
            }
            Err(e) => failure = Some(e),
        }
    };
    let (values, _) = solver.solve(rhs, params.t_star, eta_start, &stops, observe)?;
    if let Some(e) = failure {
        return Err(e);
    }

    let mut record = |t: f64, eta: Complex64| -> Result<()> {
        let eta0 = eta0_closed_form(t, psi0, params)?;
        let w_abs = (eta - eta0).norm();
        run.samples.push(ProfileSample {
            t,
            xi,
            eta,
            eta0,
            w_abs,
            f: w_abs * w_abs + floor,
            gronwall_bound: gronwall(t),
        });
        Ok(())
    };
    record(params.t_star, eta_start)?;
    for (&t, &eta) in stops.iter().zip(&values) {
        record(t, eta)?;
    }
    Ok(run)
}

/// A randomly drawn admissible configuration of the perturbed problem.
#[derive(Clone)]
pub struct AdmissibleCase {
    pub params: OdeParams,
    pub pert: PerturbationSpec,
    /// `psi_0(xi) = Psi_0 exp(-xi^2/2 + i kappa xi)`.
    pub kappa: f64,
    pub xi_samples: Vec<f64>,
}

impl AdmissibleCase {
    pub fn psi0(&self) -> impl Fn(f64) -> Complex64 + Sync + '_ {
        move |xi| {
            Complex64::from_polar(
                self.params.psi0_sup * (-xi * xi / 2.0).exp(),
                self.kappa * xi,
            )
        }
    }
}

/// Draws parameters with `a in (0.1, 0.9)`, `b in (0.2, 2)`,
/// `Im lambda in (0.1, 3)`, `eps` admissible and the bound window no
/// longer than `max_horizon`. Draws outside that window are rejected.
pub fn draw_admissible_case<R: Rng>(rng: &mut R, max_horizon: f64) -> AdmissibleCase {
    loop {
        let a = rng.gen_range(0.1..0.9);
        let b = rng.gen_range(0.2..2.0);
        let lambda = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.1..3.0));
        let psi0_sup = rng.gen_range(0.5..2.0);
        let t_star = rng.gen_range(0.5..1.5);
        let c1 = rng.gen_range(0.05..1.0);
        let c2 = rng.gen_range(0.05..1.0);
        let delta = rng.gen_range(0.5..2.0);
        let ratio: f64 = rng.gen_range(0.05..0.6);

        let mut params = OdeParams {
            a,
            b,
            lambda,
            eps: 1.0,
            t_star,
            psi0_sup,
            sigma: 1.0,
        };
        params.sigma = ratio * params.tau1();
        let eps_max = admissible_eps(&params, c1, c2, delta);
        params.eps = eps_max * rng.gen_range(0.5..1.0);
        let horizon = params.horizon();
        if !(horizon.is_finite() && horizon > 3.0 * t_star && horizon <= max_horizon) {
            continue;
        }

        let envelope = c1 * params.eps.powf(1.0 + delta);
        let psi1 = Psi1::Constant(Complex64::from_polar(
            envelope * rng.gen_range(0.0..1.0),
            rng.gen_range(0.0..std::f64::consts::TAU),
        ));
        let amplitude = rng.gen_range(0.1..1.0);
        let rho = match rng.gen_range(0..3) {
            0 => Rho::Zero,
            1 => Rho::Oscillatory {
                amplitude,
                frequency: rng.gen_range(0.2..2.0),
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            },
            _ => Rho::WorstSign { amplitude },
        };
        return AdmissibleCase {
            params,
            pert: PerturbationSpec {
                c1,
                c2,
                delta,
                psi1,
                rho,
            },
            kappa: rng.gen_range(-1.0..1.0),
            xi_samples: vec![0.0, 0.5, 1.0, 2.0],
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> OdeParams {
        OdeParams::new(0.5, 1.0, I, 0.1, 1.0, 1.0, 0.125).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let p = example();
        assert!((eta0_modulus_closed_form(4.0, 1.0, &p).unwrap() - 0.125).abs() < 1e-15);
        assert!(matches!(
            eta0_modulus_closed_form(36.0, 1.0, &p),
            Err(Error::BlowUp { .. })
        ));
        assert_eq!(eta0_modulus_closed_form(1.0, 1.0, &p).unwrap(), 0.1);
        assert!(matches!(
            eta0_modulus_closed_form(0.5, 1.0, &p),
            Err(Error::Usage(_))
        ));
        assert!((eta0_blowup_time(1.0, &p) - 36.0).abs() < 1e-12);
    }

    #[test]
    fn tau1_and_c0() {
        let p = example();
        assert!((p.q() - 1.0).abs() < 1e-15);
        assert!((p.tau1() - 0.25).abs() < 1e-15);
        let k = LemmaConstants::new(&p, 1.0, 1.0);
        let expected = 1.0 / (1.0 - 0.5f64.sqrt());
        assert!((k.c0 - expected).abs() < 1e-12);
        assert!(k.m >= 2.0 * 1.0);
        let sup = sup_bound_check(&p, &[0.0, 0.5, 1.0], 200).unwrap();
        assert!(sup <= k.c0 + 1e-12, "{sup} > {}", k.c0);
    }

    #[test]
    fn small_sigma_limit() {
        let p = OdeParams::new(0.5, 1.0, I, 0.1, 1.0, 1.0, 1e-9).unwrap();
        let k = LemmaConstants::new(&p, 1.0, 1.0);
        assert!((k.c0 - 1.0).abs() < 1e-3);
        let sup = sup_bound_check(&p, &[1.0], 10).unwrap();
        assert!((sup - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sigma_outside_window_rejected() {
        assert!(OdeParams::new(0.5, 1.0, I, 0.1, 1.0, 1.0, 0.25).is_err());
        assert!(OdeParams::new(0.5, 1.0, Complex64::new(1.0, 0.0), 0.1, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn too_large_eps_rejected() {
        let p = OdeParams::new(0.5, 1.0, I, 0.9, 1.0, 1.0, 0.125).unwrap();
        let pert = PerturbationSpec::unperturbed(1.0, 1.0, 1.0);
        let r = integrate_perturbed(
            &p,
            &|_| Complex64::new(1.0, 0.0),
            &pert,
            &[0.0],
            &Default::default(),
        );
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn envelope_violation_reported() {
        let mut p = example();
        let mut pert = PerturbationSpec::unperturbed(0.1, 0.1, 1.0);
        p.eps = admissible_eps(&p, 0.1, 0.1, 1.0) * 0.9;
        pert.rho = Rho::Oscillatory {
            amplitude: 2.0,
            frequency: 1.0,
            phase: 0.0,
        };
        let r = integrate_perturbed(
            &p,
            &|_| Complex64::new(1.0, 0.0),
            &pert,
            &[0.0],
            &Default::default(),
        );
        assert!(matches!(r, Err(Error::Envelope(_))));
    }
}
