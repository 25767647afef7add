//! End-to-end pipelines driven by an [`ExperimentConfig`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::lifespan::{
    bound_from_sup, critical_blowup_time, critical_bound_from_sup, gamma, lemma_diagnostics,
    measure_run, outside_theorem_hypotheses, remainder_scaled, sweep, BoundReport, RunRecord,
    SweepResult,
};
use crate::profile_ode::{
    admissible_eps, integrate_perturbed, IntegrationOptions, OdeParams, ProfileTrajectory,
};
use crate::solver::{convergence_study, ConvergenceReport, Solver};
use crate::spectral::{fourier_forward, ComplexField};

pub fn simulate(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let phi = cfg.initial_field()?;
    measure_run(&cfg.solver_config()?, &phi, &cfg.fingerprint())
}

/// Relative change of `||u||_2` between the first and last diagnostics.
pub fn l2_drift(record: &RunRecord) -> Option<f64> {
    let first = record.diagnostics.first()?.norms.l2;
    let last = record.diagnostics.last()?.norms.l2;
    (first > 0.0).then(|| (last - first).abs() / first)
}

/// Sweep over the configured ladder; each run is fingerprinted with its
/// own amplitude substituted into the configuration.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.require_bound_hypotheses()?;
    let phi = cfg.initial_field()?;
    let base = cfg.solver_config()?;
    let fp = |sc: &crate::solver::SolverConfig| cfg.with_eps(sc.eps).fingerprint();
    sweep(
        &cfg.sweep.eps_ladder,
        &base,
        &phi,
        cfg.output.jobs,
        cfg.sweep.tolerance,
        &fp,
    )
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundsOutput {
    pub theta: f64,
    pub dim: usize,
    pub sup_phi_hat: f64,
    pub outside_hypotheses: bool,
    /// Subcritical report (`theta < 1`).
    pub report: Option<BoundReport>,
    /// `d/(2 Im(lambda) sup^{2/d})` when `theta = 1`.
    pub critical_bound: Option<f64>,
    /// Pointwise heuristic blow-up time at the peak of `eps |phi_hat|`.
    pub critical_time: Option<f64>,
}

pub fn bounds(cfg: &ExperimentConfig) -> Result<BoundsOutput> {
    cfg.require_bound_hypotheses()?;
    let params = cfg.params()?;
    let phi_hat = fourier_forward(&cfg.initial_field()?)?;
    let sup = phi_hat.sup_modulus();
    let theta = cfg.equation.theta;
    let dim = cfg.grid.dim;
    let mut out = BoundsOutput {
        theta,
        dim,
        sup_phi_hat: sup,
        outside_hypotheses: outside_theorem_hypotheses(theta, dim),
        report: None,
        critical_bound: None,
        critical_time: None,
    };
    if theta < 1.0 {
        out.report =
            Some(bound_from_sup(sup, &params)?.with_run(cfg.solver.s, cfg.solver.eps, &params));
    } else {
        let lambda = cfg.lambda();
        let b = critical_bound_from_sup(sup, dim, lambda)?;
        out.critical_bound = Some(b);
        out.critical_time = Some(critical_blowup_time(cfg.solver.eps * sup, dim, lambda));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub l2: f64,
    pub l_inf: f64,
    pub sigma_s: f64,
    pub e_running: f64,
    pub boundary_fraction: f64,
    pub spectral_tail: f64,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub r3: Option<f64>,
    /// `sup|R| t^{theta+gamma}` for `t >= 1`.
    pub remainder_scaled: Option<f64>,
}

/// Single run sampling the norm monitors, the lemma ratios and the
/// remainder at every diagnostic time.
pub fn diagnostics(cfg: &ExperimentConfig) -> Result<Vec<DiagnosticRow>> {
    let sc = cfg.solver_config()?;
    let params = sc.params;
    let solver = Solver::new(sc.clone())?;
    let phi = cfg.initial_field()?;
    let state = solver.init(&phi)?;
    let g = gamma(sc.s, sc.grid.dim);
    let mut rows = Vec::new();
    solver.run_to_blowup(state, |st| {
        let Some(d) = st.diagnostics.last() else {
            return Ok(());
        };
        if !st.u.is_finite() {
            return Ok(());
        }
        let ratios = if sc.s > sc.grid.dim as f64 / 2.0 {
            Some(lemma_diagnostics(&st.u, st.t, sc.s, &params)?)
        } else {
            None
        };
        let rem = if st.t >= 1.0 {
            Some(remainder_scaled(&st.u, st.t, &params, g)?)
        } else {
            None
        };
        rows.push(DiagnosticRow {
            t: d.t,
            l2: d.norms.l2,
            l_inf: d.norms.l_inf,
            sigma_s: d.norms.sigma_s,
            e_running: d.e_running,
            boundary_fraction: d.boundary_fraction,
            spectral_tail: d.spectral_tail,
            r1: ratios.and_then(|r| r.r1),
            r2: ratios.and_then(|r| r.r2),
            r3: ratios.and_then(|r| r.r3),
            remainder_scaled: rem,
        });
        Ok(())
    })?;
    Ok(rows)
}

pub fn convergence(
    cfg: &ExperimentConfig,
    t_end: f64,
    refinements: usize,
) -> Result<ConvergenceReport> {
    let mut sc = cfg.solver_config()?;
    sc.t_max = t_end;
    let data = cfg.data.clone();
    convergence_study(&sc, &move |x: &[f64]| data.eval(x), refinements)
}

/// Profile ODE run with `a = theta`, `b = 2 theta/d`, `Psi_0 = sup|phi_hat|`,
/// and `psi_0` read off `phi_hat` along the first frequency axis.
pub fn profile_ode(cfg: &ExperimentConfig) -> Result<ProfileTrajectory> {
    cfg.require_bound_hypotheses()?;
    let theta = cfg.equation.theta;
    if theta >= 1.0 {
        return Err(Error::Domain(
            "the profile ODE bound needs theta < 1".into(),
        ));
    }
    let dim = cfg.grid.dim;
    let po = &cfg.profile_ode;
    let phi_hat = fourier_forward(&cfg.initial_field()?)?;
    let psi0_sup = phi_hat.sup_modulus();
    let (xi, values) = axis_support(&phi_hat);

    let b = 2.0 * theta / dim as f64;
    let mut params = OdeParams {
        a: theta,
        b,
        lambda: cfg.lambda(),
        eps: 1.0,
        t_star: 1.0,
        psi0_sup,
        sigma: 1.0,
    };
    params.sigma = po.sigma_fraction * params.tau1();
    let eps = match po.eps {
        Some(e) => e,
        None => 0.9 * admissible_eps(&params, po.c1, po.c2, po.delta),
    };
    params.eps = eps;
    params.t_star = po.t_star;
    params.validate()?;

    let lookup = move |x: f64| -> Complex64 {
        let k = xi
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        values[k]
    };
    let samples: Vec<f64> = sample_points(&phi_hat, po.frequencies);
    let opts = IntegrationOptions {
        t_bar: po.t_bar,
        n_records: po.n_records,
        ..IntegrationOptions::default()
    };
    integrate_perturbed(&params, &lookup, &po.perturbation(eps), &samples, &opts)
}

/// Frequencies along the first axis (other components zero) where
/// `|phi_hat| >= 1e-3 sup|phi_hat|`.
fn axis_support(phi_hat: &ComplexField) -> (Vec<f64>, Vec<Complex64>) {
    let g = phi_hat.grid();
    let sup = phi_hat.sup_modulus();
    let origin = g.origin_index();
    let stride = g.n.pow(g.dim as u32 - 1);
    let origin_ax = g.axis_indices(origin)[0];
    let base = origin - origin_ax * stride;
    let mut xi = Vec::new();
    let mut vals = Vec::new();
    for m in 0..g.n {
        let v = phi_hat.values()[base + m * stride];
        if v.norm() >= 1e-3 * sup {
            xi.push(g.freq(m));
            vals.push(v);
        }
    }
    (xi, vals)
}

fn sample_points(phi_hat: &ComplexField, count: usize) -> Vec<f64> {
    let (xi, _) = axis_support(phi_hat);
    if xi.len() <= count {
        return xi;
    }
    (0..count)
        .map(|k| xi[k * (xi.len() - 1) / (count - 1).max(1)])
        .collect()
}
