//! Strang split-step integration of `i u_t + (1/2) Lap u = lambda |u|^{2 theta/d} u`.
//!
//! Each step is half a step of the exact pointwise nonlinear flow, a full
//! step of the free flow (an exact Fourier multiplier), and another half
//! nonlinear step. The pointwise flow doubles as a blow-up detector: when
//! `1 - b Im(lambda) |u|^b dt/2` reaches zero at any grid point the run is
//! stopped with a sub-step accurate blow-up time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagators::{free_propagate_in_place, nonlinear_flow_exact, NonlinearityParams};
use crate::spectral::{
    boundary_mass_fraction, norms, spectral_tail_fraction, ComplexField, Grid, NormReport, Space,
};

/// Fraction of the half-width forming the monitored outer shell.
pub const BOUNDARY_SHELL: f64 = 0.1;
/// Frequencies above this fraction of Nyquist count as spectral tail.
pub const TAIL_CUTOFF: f64 = 2.0 / 3.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub grid: Grid,
    pub params: NonlinearityParams,
    pub eps: f64,
    /// Sobolev index of the tracked `Sigma^s` norms.
    pub s: f64,
    pub dt_init: f64,
    /// Safety factor `c_dt` of the adaptive step law.
    pub dt_safety: f64,
    /// Sup-norm escape level; `None` means `10^3 / eps`.
    pub blowup_norm_threshold: Option<f64>,
    pub boundary_mass_tolerance: f64,
    pub t_max: f64,
    /// Time between recorded diagnostics.
    pub diag_interval: f64,
    pub enforce_hypotheses: bool,
}

impl SolverConfig {
    pub fn new(grid: Grid, params: NonlinearityParams, eps: f64, s: f64, t_max: f64) -> Self {
        SolverConfig {
            grid,
            params,
            eps,
            s,
            dt_init: 0.05,
            dt_safety: 0.1,
            blowup_norm_threshold: None,
            boundary_mass_tolerance: 1e-6,
            t_max,
            diag_interval: 0.05,
            enforce_hypotheses: false,
        }
    }

    pub fn norm_threshold(&self) -> f64 {
        self.blowup_norm_threshold
            .unwrap_or(1e3 / self.eps.max(f64::MIN_POSITIVE))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        if self.params.dim != self.grid.dim {
            return Err(Error::Config(format!(
                "nonlinearity dimension {} differs from grid dimension {}",
                self.params.dim, self.grid.dim
            )));
        }
        let positive = [
            ("dt_init", self.dt_init),
            ("t_max", self.t_max),
            ("diag_interval", self.diag_interval),
            ("boundary_mass_tolerance", self.boundary_mass_tolerance),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive (got {v})")));
            }
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!(
                "eps must be >= 0 (got {})",
                self.eps
            )));
        }
        if !(self.dt_safety > 0.0 && self.dt_safety < 1.0) {
            return Err(Error::Config(format!(
                "dt_safety must lie in (0,1) (got {})",
                self.dt_safety
            )));
        }
        if !(self.s >= 0.0) {
            return Err(Error::Config(format!("s must be >= 0 (got {})", self.s)));
        }
        if let Some(th) = self.blowup_norm_threshold {
            if !(th > 0.0) {
                return Err(Error::Config(format!(
                    "blowup_norm_threshold must be positive (got {th})"
                )));
            }
        }
        if self.enforce_hypotheses {
            check_index(self.s, self.params.theta, self.grid.dim)?;
        }
        Ok(())
    }
}

/// Admissible Sobolev window `d/2 < s < min{2, 1 + 2 theta/d}`.
pub fn check_index(s: f64, theta: f64, dim: usize) -> Result<()> {
    let d = dim as f64;
    let upper = 2f64.min(1.0 + 2.0 * theta / d);
    if !(s > d / 2.0 && s < upper) {
        return Err(Error::Config(format!(
            "Sobolev index s = {s} violates d/2 < s < min{{2, 1+2theta/d}} = ({}, {upper})",
            d / 2.0
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlowUpCriterion {
    /// A pointwise nonlinear substep met its denominator zero.
    PointwiseFlow,
    /// `||u||_inf` crossed the configured threshold.
    SupNorm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Status {
    Running,
    BlownUp {
        t_blow: f64,
        criterion: BlowUpCriterion,
    },
    BoundaryContaminated {
        t: f64,
    },
    ReachedTMax,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticSample {
    pub t: f64,
    pub norms: NormReport,
    /// Running `E(t) = sup_{tau <= t} ||U(tau)^{-1} u(tau)||_{Sigma^s}`.
    pub e_running: f64,
    pub boundary_fraction: f64,
    pub spectral_tail: f64,
}

#[derive(Clone, Debug)]
pub struct SolverState {
    pub t: f64,
    pub u: ComplexField,
    pub status: Status,
    pub diagnostics: Vec<DiagnosticSample>,
    pub steps: usize,
}

impl SolverState {
    pub fn is_running(&self) -> bool {
        matches!(self.status, Status::Running)
    }

    pub fn e_running(&self) -> f64 {
        self.diagnostics.last().map_or(0.0, |d| d.e_running)
    }
}

/// Result of a single split step on raw samples.
enum Advance {
    Done(Vec<Complex64>),
    BlowUp(f64),
}

pub struct Solver {
    config: SolverConfig,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        Ok(Solver { config })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// State `u(0) = eps phi` with its initial diagnostics.
    pub fn init(&self, phi: &ComplexField) -> Result<SolverState> {
        phi.require(Space::Physical, "init")?;
        if *phi.grid() != self.config.grid {
            return Err(Error::Usage(
                "initial data lives on a different grid".into(),
            ));
        }
        if !phi.is_finite() {
            return Err(Error::Usage("initial data is not finite".into()));
        }
        let mut state = SolverState {
            t: 0.0,
            u: phi.scaled(Complex64::new(self.config.eps, 0.0)),
            status: Status::Running,
            diagnostics: Vec::new(),
            steps: 0,
        };
        self.record(&mut state)?;
        Ok(state)
    }

    /// Appends a diagnostic sample for the current state.
    pub fn record(&self, state: &mut SolverState) -> Result<DiagnosticSample> {
        let report = norms(&state.u, state.t, self.config.s)?;
        let e_running = state.e_running().max(report.sigma_s);
        let sample = DiagnosticSample {
            t: state.t,
            norms: report,
            e_running,
            boundary_fraction: boundary_mass_fraction(&state.u, BOUNDARY_SHELL),
            spectral_tail: spectral_tail_fraction(&state.u, TAIL_CUTOFF)?,
        };
        state.diagnostics.push(sample);
        Ok(sample)
    }

    fn advance(&self, u: &[Complex64], t: f64, dt: f64) -> Advance {
        let params = &self.config.params;
        let half = 0.5 * dt;
        let mut work = Vec::with_capacity(u.len());
        let mut earliest = f64::INFINITY;
        for &z in u {
            match nonlinear_flow_exact(z, half, params) {
                Ok(w) => work.push(w),
                Err(b) => {
                    earliest = earliest.min(b.after);
                    work.push(z);
                }
            }
        }
        if earliest.is_finite() {
            return Advance::BlowUp(t + earliest);
        }
        free_propagate_in_place(&self.config.grid, &mut work, dt);
        for z in work.iter_mut() {
            match nonlinear_flow_exact(*z, half, params) {
                Ok(w) => *z = w,
                Err(b) => earliest = earliest.min(b.after),
            }
        }
        if earliest.is_finite() {
            return Advance::BlowUp(t + half + earliest);
        }
        if work.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Advance::BlowUp(t + dt);
        }
        Advance::Done(work)
    }

    /// One Strang step of size `dt`. A non-running state is left untouched.
    pub fn step(&self, state: &mut SolverState, dt: f64) -> Result<()> {
        if !state.is_running() {
            return Ok(());
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Usage(format!(
                "step size must be positive (got {dt})"
            )));
        }
        match self.advance(state.u.values(), state.t, dt) {
            Advance::Done(values) => {
                state.u = ComplexField::new(self.config.grid, Space::Physical, values)?;
                state.t += dt;
                state.steps += 1;
            }
            Advance::BlowUp(t_blow) => {
                state.status = Status::BlownUp {
                    t_blow,
                    criterion: BlowUpCriterion::PointwiseFlow,
                };
            }
        }
        Ok(())
    }

    /// Adaptive step `c_dt min(dt_init, 1/(b Im(lambda) ||u||_inf^b))`.
    pub fn adaptive_dt(&self, u: &ComplexField) -> f64 {
        let p = &self.config.params;
        let horizon = p.b() * p.lambda.im * u.sup_modulus().powf(p.b());
        let cap = if horizon > 0.0 {
            self.config.dt_init.min(1.0 / horizon)
        } else {
            self.config.dt_init
        };
        self.config.dt_safety * cap
    }

    /// Runs adaptively until blow-up, boundary contamination or `t_max`.
    /// `observe` is called after every recorded diagnostic sample.
    pub fn run_to_blowup<O>(&self, mut state: SolverState, mut observe: O) -> Result<RunOutcome>
    where
        O: FnMut(&SolverState) -> Result<()>,
    {
        let cfg = &self.config;
        let threshold = cfg.norm_threshold();
        let mut next_diag = state.t + cfg.diag_interval;
        observe(&state)?;
        let mut blowup = None;

        while state.is_running() {
            if state.t >= cfg.t_max * (1.0 - 1e-14) {
                state.status = Status::ReachedTMax;
                break;
            }
            let dt = self.adaptive_dt(&state.u).min(cfg.t_max - state.t);
            match self.advance(state.u.values(), state.t, dt) {
                Advance::BlowUp(_) => {
                    let t_blow = self.bracket_pointwise(&state, dt);
                    state.status = Status::BlownUp {
                        t_blow,
                        criterion: BlowUpCriterion::PointwiseFlow,
                    };
                    blowup = Some((t_blow, BlowUpCriterion::PointwiseFlow));
                }
                Advance::Done(values) => {
                    let next = ComplexField::new(cfg.grid, Space::Physical, values)?;
                    if next.sup_modulus() > threshold {
                        let t_blow = self.bracket_threshold(&state, dt, threshold);
                        state.status = Status::BlownUp {
                            t_blow,
                            criterion: BlowUpCriterion::SupNorm,
                        };
                        blowup = Some((t_blow, BlowUpCriterion::SupNorm));
                        break;
                    }
                    state.u = next;
                    state.t += dt;
                    state.steps += 1;
                    if boundary_mass_fraction(&state.u, BOUNDARY_SHELL)
                        > cfg.boundary_mass_tolerance
                    {
                        self.record(&mut state)?;
                        observe(&state)?;
                        state.status = Status::BoundaryContaminated { t: state.t };
                        break;
                    }
                    if state.t >= next_diag {
                        self.record(&mut state)?;
                        observe(&state)?;
                        while next_diag <= state.t {
                            next_diag += cfg.diag_interval;
                        }
                    }
                }
            }
        }
        if state.diagnostics.last().is_none_or(|d| d.t < state.t) {
            self.record(&mut state)?;
            observe(&state)?;
        }
        Ok(RunOutcome::from_state(state, blowup, cfg))
    }

    /// Narrows the smallest step size that triggers the pointwise criterion
    /// and returns the blow-up time that step reports.
    fn bracket_pointwise(&self, state: &SolverState, dt: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, dt);
        let mut t_blow = match self.advance(state.u.values(), state.t, dt) {
            Advance::BlowUp(tb) => tb,
            Advance::Done(_) => state.t + dt,
        };
        while hi - lo > 1e-3 * (state.t + hi) {
            let mid = 0.5 * (lo + hi);
            match self.advance(state.u.values(), state.t, mid) {
                Advance::BlowUp(tb) => {
                    hi = mid;
                    t_blow = tb;
                }
                Advance::Done(_) => lo = mid,
            }
        }
        t_blow
    }

    /// Bisects the final step for the sup-norm crossing.
    fn bracket_threshold(&self, state: &SolverState, dt: f64, threshold: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, dt);
        while hi - lo > 1e-3 * dt {
            let mid = 0.5 * (lo + hi);
            let above = match self.advance(state.u.values(), state.t, mid) {
                Advance::BlowUp(_) => true,
                Advance::Done(v) => v.iter().any(|z| z.norm() > threshold),
            };
            if above {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        state.t + 0.5 * (lo + hi)
    }

    /// Fixed-step integration to `t_end`; blow-up is an error here.
    pub fn run_fixed(&self, phi: &ComplexField, dt: f64, t_end: f64) -> Result<ComplexField> {
        let mut state = SolverState {
            t: 0.0,
            u: phi.scaled(Complex64::new(self.config.eps, 0.0)),
            status: Status::Running,
            diagnostics: Vec::new(),
            steps: 0,
        };
        let steps = (t_end / dt).round() as usize;
        if ((steps as f64) * dt - t_end).abs() > 1e-9 * t_end.max(1.0) {
            return Err(Error::Usage(format!(
                "t_end = {t_end} is not a multiple of dt = {dt}"
            )));
        }
        for _ in 0..steps {
            self.step(&mut state, dt)?;
            if let Status::BlownUp { t_blow, .. } = state.status {
                return Err(Error::NumericalDomain(format!(
                    "fixed-step run blew up at t = {t_blow}"
                )));
            }
        }
        Ok(state.u)
    }
}

/// How a run ended, with the measured lifespan when one exists.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: SolverState,
    /// `T_eps`: blow-up time, or the final time for a censored run.
    pub t_eps: f64,
    pub censored: bool,
    pub contaminated: bool,
    pub pointwise_blowup_time: Option<f64>,
    pub sup_norm_blowup_time: Option<f64>,
    /// `eps^{2 theta/d} T_eps^{1 - theta}`.
    pub invariant_quantity: f64,
}

impl RunOutcome {
    fn from_state(
        state: SolverState,
        blowup: Option<(f64, BlowUpCriterion)>,
        cfg: &SolverConfig,
    ) -> Self {
        let (t_eps, censored, contaminated) = match state.status {
            Status::BlownUp { t_blow, .. } => (t_blow, false, false),
            Status::BoundaryContaminated { t } => (t, true, true),
            _ => (state.t, true, false),
        };
        let (pointwise, sup_norm) = match blowup {
            Some((t, BlowUpCriterion::PointwiseFlow)) => (Some(t), None),
            Some((t, BlowUpCriterion::SupNorm)) => (None, Some(t)),
            None => (None, None),
        };
        RunOutcome {
            invariant_quantity: invariant_quantity(cfg.eps, t_eps, cfg.params.theta, cfg.grid.dim),
            state,
            t_eps,
            censored,
            contaminated,
            pointwise_blowup_time: pointwise,
            sup_norm_blowup_time: sup_norm,
        }
    }
}

/// `eps^{2 theta/d} T^{1 - theta}`.
pub fn invariant_quantity(eps: f64, t_eps: f64, theta: f64, dim: usize) -> f64 {
    eps.powf(2.0 * theta / dim as f64) * t_eps.powf(1.0 - theta)
}

/// `||u||_{L^q}^q` on the physical lattice.
pub fn lq_norm_pow(u: &ComplexField, q: f64) -> f64 {
    u.grid().physical_weight() * u.values().iter().map(|z| z.norm().powf(q)).sum::<f64>()
}

/// Residual of `||u(T)||^2 - ||u(0)||^2 - 2 Im(lambda) int_0^T ||u||_{p+1}^{p+1}`
/// along a fixed-step run, with the time integral by the trapezoid rule.
pub fn mass_balance_residual(
    solver: &Solver,
    phi: &ComplexField,
    dt: f64,
    t_end: f64,
) -> Result<f64> {
    let cfg = solver.config();
    let p = cfg.params.p();
    let mut state = solver.init(phi)?;
    let m0 = state.u.l2_norm().powi(2);
    let steps = (t_end / dt).round() as usize;
    let mut integral = 0.0;
    let mut prev = lq_norm_pow(&state.u, p + 1.0);
    for _ in 0..steps {
        solver.step(&mut state, dt)?;
        if !state.is_running() {
            return Err(Error::NumericalDomain("mass-balance run blew up".into()));
        }
        let cur = lq_norm_pow(&state.u, p + 1.0);
        integral += 0.5 * dt * (prev + cur);
        prev = cur;
    }
    let m1 = state.u.l2_norm().powi(2);
    Ok(m1 - m0 - 2.0 * cfg.params.lambda.im * integral)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub t_end: f64,
    /// Step sizes `dt_0 / 2^k`, coarsest first.
    pub dts: Vec<f64>,
    /// `||u_{dt_k} - u_{dt_{k+1}}||_2` for consecutive refinements.
    pub successive_differences: Vec<f64>,
    /// `log2` of consecutive difference ratios.
    pub temporal_orders: Vec<f64>,
    /// `||u_{dt_k} - u_finest||_2`.
    pub errors_vs_finest: Vec<f64>,
    pub spatial_n: Vec<usize>,
    /// Max-abs error of the `n` and `2n` runs against a `4n` reference,
    /// on the coarse lattice.
    pub spatial_errors: Vec<f64>,
    pub spatial_drop: f64,
}

/// Temporal self-convergence over `refinements + 2` halvings of
/// `config.dt_init`, plus a spatial check doubling `n` twice. Runs end at
/// `config.t_max`.
pub fn convergence_study(
    config: &SolverConfig,
    phi: &dyn Fn(&[f64]) -> Complex64,
    refinements: usize,
) -> Result<ConvergenceReport> {
    let solver = Solver::new(config.clone())?;
    let phi_field = ComplexField::from_physical_fn(config.grid, phi);
    let t_end = config.t_max;
    let dts: Vec<f64> = (0..refinements + 2)
        .map(|k| config.dt_init / 2f64.powi(k as i32))
        .collect();
    let finals = dts
        .iter()
        .map(|&dt| solver.run_fixed(&phi_field, dt, t_end))
        .collect::<Result<Vec<_>>>()?;
    let diff = |a: &ComplexField, b: &ComplexField| {
        let d = ComplexField::new(
            *a.grid(),
            Space::Physical,
            a.values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| x - y)
                .collect(),
        )
        .expect("same grid");
        d.l2_norm()
    };
    let successive_differences: Vec<f64> = finals.windows(2).map(|w| diff(&w[0], &w[1])).collect();
    let temporal_orders = successive_differences
        .windows(2)
        .map(|w| (w[0] / w[1]).log2())
        .collect();
    let finest = finals.last().expect("at least two runs");
    let errors_vs_finest = finals.iter().map(|u| diff(u, finest)).collect();

    let dt_space = *dts.last().expect("nonempty");
    let base = config.grid;
    let spatial_n = vec![base.n, 2 * base.n, 4 * base.n];
    let mut spatial_runs = Vec::new();
    for &n in &spatial_n {
        let grid = Grid::new(base.dim, n, base.half_width)?;
        let cfg = SolverConfig {
            grid,
            ..config.clone()
        };
        let s = Solver::new(cfg)?;
        let f = ComplexField::from_physical_fn(grid, phi);
        spatial_runs.push(s.run_fixed(&f, dt_space, t_end)?);
    }
    let reference = restrict(&spatial_runs[2], &base);
    let spatial_errors = vec![
        restrict(&spatial_runs[0], &base).max_abs_diff(&reference),
        restrict(&spatial_runs[1], &base).max_abs_diff(&reference),
    ];
    let spatial_drop = spatial_errors[0] / spatial_errors[1];

    Ok(ConvergenceReport {
        t_end,
        dts,
        successive_differences,
        temporal_orders,
        errors_vs_finest,
        spatial_n,
        spatial_errors,
        spatial_drop,
    })
}

/// Samples a field on a refined grid (same half-width, `n` a multiple of
/// the coarse `n`) at the coarse lattice points.
pub fn restrict(fine: &ComplexField, coarse: &Grid) -> ComplexField {
    let fg = fine.grid();
    assert_eq!(fg.dim, coarse.dim);
    assert_eq!(fg.half_width, coarse.half_width);
    let ratio = fg.n / coarse.n;
    let values = (0..coarse.len())
        .map(|i| {
            let ax = coarse.axis_indices(i);
            let mut idx = 0;
            for &a in ax.iter().take(coarse.dim) {
                idx = idx * fg.n + a * ratio;
            }
            fine.values()[idx]
        })
        .collect();
    ComplexField::new(*coarse, Space::Physical, values).expect("coarse length")
}
