//! Lifespan bounds, profile extraction and the epsilon sweep.
//!
//! The lower bound for `eps^{2 theta/d} T_eps^{1-theta}` is
//! `tau_0^{1-theta} = (1-theta) d / (2 theta Im(lambda) sup|phi_hat|^{2 theta/d})`.
//! Runs measure `T_eps`; the sweep compares the measured invariant quantity
//! against that value over a decreasing ladder of amplitudes.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::{free_propagate, NonlinearityParams};
use crate::solver::{
    invariant_quantity, BlowUpCriterion, DiagnosticSample, RunOutcome, Solver, SolverConfig, Status,
};
use crate::spectral::{fourier_forward, norms, sup_modulus, ComplexField, Grid, Space};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub sup_phi_hat: f64,
    pub tau0: f64,
    /// `tau0^{1-theta}`, the lower bound for `eps^{2 theta/d} T_eps^{1-theta}`.
    pub bound_value: f64,
    /// `tau_1` of the profile ODE with `a = theta`, `b = 2 theta/d`,
    /// `Psi_0 = sup|phi_hat|`; coincides with `tau0`.
    pub tau1: f64,
    pub d0_estimate: Option<f64>,
    pub gamma: Option<f64>,
    pub t_star: Option<f64>,
    pub critical_t: Option<f64>,
}

impl BoundReport {
    /// Fills `gamma` and `t_*` for a Sobolev index and amplitude.
    pub fn with_run(mut self, s: f64, eps: f64, params: &NonlinearityParams) -> Self {
        self.gamma = Some(gamma(s, params.dim));
        self.t_star = Some(t_star(eps, params.theta, params.dim));
        self
    }
}

fn require_dissipative_sign(params: &NonlinearityParams) -> Result<()> {
    if !(params.lambda.im > 0.0) {
        return Err(Error::Domain(format!(
            "the lifespan bound needs Im lambda > 0 (got {})",
            params.lambda.im
        )));
    }
    Ok(())
}

/// `(1 - theta) d / (2 theta Im(lambda) sup^{2 theta/d})`, before the outer power.
pub fn bound_value_from_sup(sup_phi_hat: f64, params: &NonlinearityParams) -> Result<f64> {
    require_dissipative_sign(params)?;
    let theta = params.theta;
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::Domain(format!(
            "the subcritical bound needs 0 < theta < 1 (got {theta})"
        )));
    }
    let d = params.dim as f64;
    Ok((1.0 - theta) * d / (2.0 * theta * params.lambda.im * sup_phi_hat.powf(2.0 * theta / d)))
}

pub fn theoretical_bound(
    phi_hat: &ComplexField,
    params: &NonlinearityParams,
) -> Result<BoundReport> {
    phi_hat.require(Space::Frequency, "theoretical_bound")?;
    bound_from_sup(sup_modulus(phi_hat), params)
}

pub fn bound_from_sup(sup_phi_hat: f64, params: &NonlinearityParams) -> Result<BoundReport> {
    let bound_value = bound_value_from_sup(sup_phi_hat, params)?;
    let theta = params.theta;
    let tau0 = bound_value.powf(1.0 / (1.0 - theta));
    let q = params.b() / (2.0 * (1.0 - theta));
    let tau1 =
        (2.0 * q * params.lambda.im * sup_phi_hat.powf(params.b())).powf(-1.0 / (1.0 - theta));
    Ok(BoundReport {
        sup_phi_hat,
        tau0,
        bound_value,
        tau1,
        d0_estimate: None,
        gamma: None,
        t_star: None,
        critical_t: None,
    })
}

/// `gamma = (2s - d)/8`.
pub fn gamma(s: f64, dim: usize) -> f64 {
    (2.0 * s - dim as f64) / 8.0
}

/// `t_* = eps^{-theta/((1-theta) d)}`.
pub fn t_star(eps: f64, theta: f64, dim: usize) -> f64 {
    eps.powf(-theta / ((1.0 - theta) * dim as f64))
}

/// `d / (2 Im(lambda) sup|phi_hat|^{2/d})`, the lower bound for
/// `eps^{2/d} log T_eps` when `theta = 1`.
pub fn critical_bound(phi_hat: &ComplexField, dim: usize, lambda: Complex64) -> Result<f64> {
    phi_hat.require(Space::Frequency, "critical_bound")?;
    critical_bound_from_sup(sup_modulus(phi_hat), dim, lambda)
}

pub fn critical_bound_from_sup(sup_phi_hat: f64, dim: usize, lambda: Complex64) -> Result<f64> {
    if !(lambda.im > 0.0) {
        return Err(Error::Domain(format!(
            "the critical bound needs Im lambda > 0 (got {})",
            lambda.im
        )));
    }
    let d = dim as f64;
    Ok(d / (2.0 * lambda.im * sup_phi_hat.powf(2.0 / d)))
}

/// Time at which `1 - (2/d) Im(lambda) amp^{2/d} log t` vanishes, for the
/// profile amplitude `amp = eps |phi_hat(xi)|`.
pub fn critical_blowup_time(amp: f64, dim: usize, lambda: Complex64) -> f64 {
    let d = dim as f64;
    (d / (2.0 * lambda.im * amp.powf(2.0 / d))).exp()
}

/// `A(t) = F[U(t)^{-1} u(t)]`.
pub fn profile(u: &ComplexField, t: f64) -> Result<ComplexField> {
    fourier_forward(&free_propagate(u, -t)?)
}

/// `A(t)` and `R(t) = F[U(t)^{-1} N(u)] - t^{-theta} N(A)`.
pub fn extract_profile(
    u: &ComplexField,
    t: f64,
    params: &NonlinearityParams,
) -> Result<(ComplexField, ComplexField)> {
    if !(t > 0.0) {
        return Err(Error::Usage(format!("the remainder needs t > 0 (got {t})")));
    }
    let a = profile(u, t)?;
    let nu = u.map(|z| params.apply(z));
    let fnu = profile(&nu, t)?;
    let decay = t.powf(-params.theta);
    let r_values = fnu
        .values()
        .iter()
        .zip(a.values())
        .map(|(f, &z)| f - params.apply(z) * decay)
        .collect();
    let r = ComplexField::new(*u.grid(), Space::Frequency, r_values)?;
    Ok((a, r))
}

/// `sup_xi |R(t, xi)| t^{theta + gamma}`.
pub fn remainder_scaled(
    u: &ComplexField,
    t: f64,
    params: &NonlinearityParams,
    gamma: f64,
) -> Result<f64> {
    let (_, r) = extract_profile(u, t, params)?;
    Ok(r.sup_modulus() * t.powf(params.theta + gamma))
}

/// Scale-invariant ratios whose boundedness the weighted estimates assert.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRatios {
    pub t: f64,
    /// `(1+t)^{d/2} ||u||_inf / ||U(-t)u||_{Sigma^s}`.
    pub r1: Option<f64>,
    /// `(||u||_inf - t^{-d/2} ||A||_inf) t^{d/2+gamma} / ||U(-t)u||_{H^{0,s}}`, `t >= 1`.
    pub r2: Option<f64>,
    /// `(1+t)^{d(p-1)/2} ||U(-t)N(u)||_{Sigma^s} / ||U(-t)u||_{Sigma^s}^p`.
    pub r3: Option<f64>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0 && den.is_finite() && num.is_finite()).then(|| num / den)
}

pub fn lemma_diagnostics(
    u: &ComplexField,
    t: f64,
    s: f64,
    params: &NonlinearityParams,
) -> Result<LemmaRatios> {
    let d = u.grid().dim as f64;
    if !(s > d / 2.0) {
        return Err(Error::Domain(format!(
            "lemma ratios need s > d/2 (got s = {s})"
        )));
    }
    let nu = norms(u, t, s)?;
    let r1 = ratio((1.0 + t).powf(d / 2.0) * nu.l_inf, nu.sigma_s);

    let g = gamma(s, u.grid().dim);
    let r2 = if t >= 1.0 && s > d / 2.0 + 2.0 * g {
        let a_inf = profile(u, t)?.sup_modulus();
        ratio(
            (nu.l_inf - t.powf(-d / 2.0) * a_inf) * t.powf(d / 2.0 + g),
            nu.h_0s,
        )
    } else {
        None
    };

    let p = params.p();
    // theta = d (p-1)/2; the coefficient lambda only rescales N
    let nonlinear = u.map(|z| crate::propagators::g_p(z, p));
    let nn = norms(&nonlinear, t, s)?;
    let r3 = ratio(
        (1.0 + t).powf(d * (p - 1.0) / 2.0) * nn.sigma_s,
        nu.sigma_s.powf(p),
    );
    Ok(LemmaRatios { t, r1, r2, r3 })
}

pub const RUN_SCHEMA_VERSION: u32 = 1;

/// Dimensions and powers for which the lifespan theorem is not claimed:
/// `d >= 4`, or `d = 3` with `theta <= 3/4`.
pub fn outside_theorem_hypotheses(theta: f64, dim: usize) -> bool {
    dim >= 4 || (dim == 3 && theta <= 0.75)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderSample {
    pub t: f64,
    /// `sup_xi |R(t, xi)| t^{theta + gamma}`.
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub eps: f64,
    #[serde(rename = "T_eps")]
    pub t_eps: f64,
    pub censored: bool,
    pub contaminated: bool,
    pub status: Status,
    pub pointwise_blowup_time: Option<f64>,
    pub sup_norm_blowup_time: Option<f64>,
    /// `eps^{2 theta/d} T_eps^{1-theta}`.
    pub invariant_quantity: f64,
    pub bound_value: Option<f64>,
    /// `T_eps eps^{2 theta/((1-theta) d)}`.
    pub rough_ratio: f64,
    pub fingerprint: String,
    pub grid: Grid,
    pub theta: f64,
    /// Set for `d >= 4` or `d = 3, theta <= 3/4`.
    pub outside_hypotheses: bool,
    pub steps: usize,
    pub t_star: f64,
    pub gamma: f64,
    /// Window `[start, end]` over which `max_remainder_scaled` is taken.
    pub remainder_window: Option<(f64, f64)>,
    pub max_remainder_scaled: Option<f64>,
    pub remainder_series: Vec<RemainderSample>,
    pub diagnostics: Vec<DiagnosticSample>,
}

impl RunRecord {
    pub fn status_label(&self) -> &'static str {
        match self.status {
            Status::BlownUp {
                criterion: BlowUpCriterion::PointwiseFlow,
                ..
            } => "blowup-pointwise",
            Status::BlownUp {
                criterion: BlowUpCriterion::SupNorm,
                ..
            } => "blowup-supnorm",
            Status::BoundaryContaminated { .. } => "boundary-contaminated",
            Status::ReachedTMax => "censored",
            Status::Running => "running",
        }
    }

    /// Whether the run counts toward bound verdicts.
    pub fn is_valid_measurement(&self) -> bool {
        !self.censored && !self.contaminated
    }

    /// Largest scaled remainder over `[start, end]`.
    pub fn remainder_max_over(&self, start: f64, end: f64) -> Option<f64> {
        self.remainder_series
            .iter()
            .filter(|r| r.t >= start && r.t <= end)
            .map(|r| r.scaled)
            .fold(None, |acc: Option<f64>, v| {
                Some(acc.map_or(v, |a| a.max(v)))
            })
    }

    /// Remainder window `[t_*, T_eps/2]`; falls back to `[1, T_eps/2]`
    /// when `t_*` already exceeds `T_eps/2`.
    pub fn default_remainder_window(&self) -> Option<(f64, f64)> {
        let end = 0.5 * self.t_eps;
        if self.t_star <= end {
            Some((self.t_star, end))
        } else if end >= 1.0 {
            Some((1.0, end))
        } else {
            None
        }
    }
}

/// Runs one amplitude to blow-up and assembles its record. The remainder
/// is sampled at every diagnostic time `t >= 1`.
pub fn measure_run(
    config: &SolverConfig,
    phi: &ComplexField,
    fingerprint: &str,
) -> Result<RunRecord> {
    let solver = Solver::new(config.clone())?;
    let state = solver.init(phi)?;
    let params = config.params;
    let g = gamma(config.s, config.grid.dim);
    let mut remainder_series = Vec::new();
    let outcome = solver.run_to_blowup(state, |st| {
        if st.t >= 1.0 && st.u.is_finite() {
            remainder_series.push(RemainderSample {
                t: st.t,
                scaled: remainder_scaled(&st.u, st.t, &params, g)?,
            });
        }
        Ok(())
    })?;
    let bound_value = if params.lambda.im > 0.0 && params.theta > 0.0 && params.theta < 1.0 {
        let phi_hat = fourier_forward(phi)?;
        Some(theoretical_bound(&phi_hat, &params)?.bound_value)
    } else {
        None
    };
    Ok(assemble_record(
        config,
        outcome,
        bound_value,
        fingerprint,
        remainder_series,
    ))
}

fn assemble_record(
    config: &SolverConfig,
    outcome: RunOutcome,
    bound_value: Option<f64>,
    fingerprint: &str,
    remainder_series: Vec<RemainderSample>,
) -> RunRecord {
    let theta = config.params.theta;
    let dim = config.grid.dim;
    let ts = if theta < 1.0 {
        t_star(config.eps, theta, dim)
    } else {
        1.0
    };
    let mut record = RunRecord {
        schema_version: RUN_SCHEMA_VERSION,
        eps: config.eps,
        t_eps: outcome.t_eps,
        censored: outcome.censored,
        contaminated: outcome.contaminated,
        status: outcome.state.status,
        pointwise_blowup_time: outcome.pointwise_blowup_time,
        sup_norm_blowup_time: outcome.sup_norm_blowup_time,
        invariant_quantity: outcome.invariant_quantity,
        bound_value,
        rough_ratio: rough_ratio(config.eps, outcome.t_eps, theta, dim),
        fingerprint: fingerprint.to_string(),
        grid: config.grid,
        theta,
        outside_hypotheses: outside_theorem_hypotheses(theta, dim),
        steps: outcome.state.steps,
        t_star: ts,
        gamma: gamma(config.s, dim),
        remainder_window: None,
        max_remainder_scaled: None,
        remainder_series,
        diagnostics: outcome.state.diagnostics,
    };
    record.remainder_window = record.default_remainder_window();
    record.max_remainder_scaled = record
        .remainder_window
        .and_then(|(a, b)| record.remainder_max_over(a, b));
    record
}

/// `T eps^{2 theta/((1-theta) d)}`, the quantity bounded below by `D_0`.
pub fn rough_ratio(eps: f64, t_eps: f64, theta: f64, dim: usize) -> f64 {
    if theta >= 1.0 {
        return f64::NAN;
    }
    t_eps * eps.powf(2.0 * theta / ((1.0 - theta) * dim as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub schema_version: u32,
    pub eps: Vec<f64>,
    /// `q_eps` per rung (censored rungs included, flagged separately).
    pub q: Vec<f64>,
    pub valid: Vec<bool>,
    /// Running minimum of `q_eps` over valid rungs, in ladder order.
    pub running_min: Vec<Option<f64>>,
    /// `q_eps - bound_value` per rung.
    pub gap: Vec<f64>,
    pub bound_value: f64,
    pub tau0: f64,
    pub tolerance: f64,
    pub d0_estimate: Option<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub records: Vec<RunRecord>,
    pub summary: SweepSummary,
}

/// Runs every amplitude of a strictly decreasing ladder (in parallel, up to
/// `jobs` threads) and folds the records into a verdict.
pub fn sweep(
    eps_ladder: &[f64],
    base: &SolverConfig,
    phi: &ComplexField,
    jobs: usize,
    tolerance: f64,
    fingerprint: &(dyn Fn(&SolverConfig) -> String + Sync),
) -> Result<SweepResult> {
    if eps_ladder.is_empty() {
        return Err(Error::Usage("empty amplitude ladder".into()));
    }
    if eps_ladder.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Usage(
            "amplitude ladder must be strictly decreasing".into(),
        ));
    }
    if !(0.0..1.0).contains(&tolerance) {
        return Err(Error::Usage(format!(
            "tolerance must lie in [0,1) (got {tolerance})"
        )));
    }
    let phi_hat = fourier_forward(phi)?;
    let bound = theoretical_bound(&phi_hat, &base.params)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    let records = pool.install(|| {
        eps_ladder
            .par_iter()
            .map(|&eps| {
                let cfg = SolverConfig {
                    eps,
                    ..base.clone()
                };
                measure_run(&cfg, phi, &fingerprint(&cfg))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let summary = summarize(&records, &bound, tolerance);
    Ok(SweepResult { records, summary })
}

pub fn summarize(records: &[RunRecord], bound: &BoundReport, tolerance: f64) -> SweepSummary {
    let mut running: Option<f64> = None;
    let mut running_min = Vec::with_capacity(records.len());
    for r in records {
        if r.is_valid_measurement() {
            running = Some(running.map_or(r.invariant_quantity, |m| m.min(r.invariant_quantity)));
        }
        running_min.push(running);
    }
    let d0_estimate = records
        .iter()
        .filter(|r| r.is_valid_measurement())
        .map(|r| r.rough_ratio)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        });
    let verdict = match running {
        None => Verdict::Inconclusive,
        Some(m) if m >= bound.bound_value * (1.0 - tolerance) => Verdict::Pass,
        Some(_) => Verdict::Fail,
    };
    SweepSummary {
        schema_version: RUN_SCHEMA_VERSION,
        eps: records.iter().map(|r| r.eps).collect(),
        q: records.iter().map(|r| r.invariant_quantity).collect(),
        valid: records.iter().map(|r| r.is_valid_measurement()).collect(),
        running_min,
        gap: records
            .iter()
            .map(|r| r.invariant_quantity - bound.bound_value)
            .collect(),
        bound_value: bound.bound_value,
        tau0: bound.tau0,
        tolerance,
        d0_estimate,
        verdict,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftSample {
    pub t: f64,
    /// `sup |i dA/dt - t^{-theta} N(A)|` with a centered difference in time.
    pub drift_residual: f64,
    /// `sup |R|` from [`extract_profile`].
    pub remainder: f64,
    /// `sup |t^{-theta} N(A)|`, the size of the modelled drift.
    pub model_drift: f64,
    /// `sup |drift residual - R|`: agreement of the two routes.
    pub route_mismatch: f64,
}

/// Checks the reduced profile equation `i A' = t^{-theta} N(A) + R` along
/// a fixed-step run: the time derivative of `A` is taken by centered
/// differences of half-width `half_width_steps * dt` around each sample
/// time (sample times must be multiples of `dt`).
pub fn profile_drift_check(
    config: &SolverConfig,
    phi: &ComplexField,
    dt: f64,
    sample_times: &[f64],
    half_width_steps: usize,
) -> Result<Vec<DriftSample>> {
    let solver = Solver::new(config.clone())?;
    let params = config.params;
    let mut state = solver.init(phi)?;
    let delta = dt * half_width_steps as f64;
    let to_step = |t: f64| (t / dt).round() as usize;

    let mut out = Vec::with_capacity(sample_times.len());
    let mut step = 0usize;
    for &ts in sample_times {
        let k = to_step(ts);
        if k < half_width_steps || k < step + half_width_steps && step != 0 {
            return Err(Error::Usage(format!(
                "sample time {ts} too close to the previous one or to 0"
            )));
        }
        let mut advance_to =
            |target: usize, state: &mut crate::solver::SolverState| -> Result<()> {
                while step < target {
                    solver.step(state, dt)?;
                    if !state.is_running() {
                        return Err(Error::NumericalDomain(format!(
                            "drift run blew up near t = {}",
                            state.t
                        )));
                    }
                    step += 1;
                }
                Ok(())
            };
        advance_to(k - half_width_steps, &mut state)?;
        let before = profile(&state.u, state.t)?;
        advance_to(k, &mut state)?;
        let t = state.t;
        let (a, r) = extract_profile(&state.u, t, &params)?;
        advance_to(k + half_width_steps, &mut state)?;
        let after = profile(&state.u, state.t)?;

        let decay = t.powf(-params.theta);
        let mut sample = DriftSample {
            t,
            drift_residual: 0.0,
            remainder: r.sup_modulus(),
            model_drift: 0.0,
            route_mismatch: 0.0,
        };
        for i in 0..a.values().len() {
            let da = (after.values()[i] - before.values()[i]) / (2.0 * delta);
            let model = params.apply(a.values()[i]) * decay;
            let resid = Complex64::new(0.0, 1.0) * da - model;
            sample.drift_residual = sample.drift_residual.max(resid.norm());
            sample.model_drift = sample.model_drift.max(model.norm());
            sample.route_mismatch = sample.route_mismatch.max((resid - r.values()[i]).norm());
        }
        out.push(sample);
    }
    Ok(out)
}

/// `q_eps = eps^{2 theta/d} T^{1-theta}` recomputed from a record.
pub fn recompute_invariant(record: &RunRecord) -> f64 {
    invariant_quantity(record.eps, record.t_eps, record.theta, record.grid.dim)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(im: f64) -> NonlinearityParams {
        NonlinearityParams::new(Complex64::new(0.0, im), 0.5, 1).unwrap()
    }

    #[test]
    fn bound_example() {
        let r = bound_from_sup(1.0, &params(1.0)).unwrap();
        assert!((r.bound_value - 0.5).abs() < 1e-12);
        assert!((r.tau0 - 0.25).abs() < 1e-12);
        assert!((r.tau1 - r.tau0).abs() < 1e-12);
    }

    #[test]
    fn bound_domain_errors() {
        assert!(matches!(
            bound_from_sup(1.0, &params(0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            bound_from_sup(1.0, &params(-1.0)),
            Err(Error::Domain(_))
        ));
        let crit = NonlinearityParams::new(Complex64::new(0.0, 1.0), 1.0, 1).unwrap();
        assert!(matches!(bound_from_sup(1.0, &crit), Err(Error::Domain(_))));
    }

    #[test]
    fn critical_examples() {
        let i = Complex64::new(0.0, 1.0);
        assert!((critical_bound_from_sup(1.0, 1, i).unwrap() - 0.5).abs() < 1e-12);
        let t = critical_blowup_time(0.1, 1, i);
        assert!((t / 50f64.exp() - 1.0).abs() < 1e-12);
        assert!(critical_bound_from_sup(1e12, 1, i).unwrap() < 1e-12);
        assert!(critical_bound_from_sup(1.0, 1, Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn hypotheses_flag() {
        assert!(outside_theorem_hypotheses(0.5, 4));
        assert!(outside_theorem_hypotheses(0.75, 3));
        assert!(!outside_theorem_hypotheses(0.8, 3));
        assert!(!outside_theorem_hypotheses(0.5, 1));
    }

    #[test]
    fn gamma_and_t_star() {
        assert!((gamma(1.0, 1) - 0.125).abs() < 1e-15);
        assert!((t_star(0.2, 0.5, 1) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn summary_of_single_rung() {
        let rec = RunRecord {
            schema_version: RUN_SCHEMA_VERSION,
            eps: 0.3,
            t_eps: 4.0,
            censored: false,
            contaminated: false,
            status: Status::BlownUp {
                t_blow: 4.0,
                criterion: BlowUpCriterion::SupNorm,
            },
            pointwise_blowup_time: None,
            sup_norm_blowup_time: Some(4.0),
            invariant_quantity: 0.6,
            bound_value: Some(0.5),
            rough_ratio: 0.36,
            fingerprint: String::new(),
            grid: Grid::new(1, 8, 1.0).unwrap(),
            theta: 0.5,
            outside_hypotheses: false,
            steps: 1,
            t_star: 3.33,
            gamma: 0.125,
            remainder_window: None,
            max_remainder_scaled: None,
            remainder_series: vec![],
            diagnostics: vec![],
        };
        let bound = bound_from_sup(1.0, &params(1.0)).unwrap();
        let s = summarize(std::slice::from_ref(&rec), &bound, 0.1);
        assert_eq!(s.q, vec![0.6]);
        assert_eq!(s.running_min, vec![Some(0.6)]);
        assert_eq!(s.verdict, Verdict::Pass);

        let censored = RunRecord {
            censored: true,
            ..rec
        };
        let s = summarize(&[censored], &bound, 0.1);
        assert_eq!(s.verdict, Verdict::Inconclusive);
    }
}
