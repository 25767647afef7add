//! Experiment configuration: one TOML file describes the initial data, the
//! lattice, the equation, the solver knobs, the amplitude ladder and where
//! results go.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::profile_ode::{PerturbationSpec, Psi1, Rho};
use crate::propagators::NonlinearityParams;
use crate::solver::SolverConfig;
use crate::spectral::{ComplexField, Grid};

/// Annotated default configuration, as printed by `print-config`.
pub const DEFAULT_CONFIG_TOML: &str = r#"# Initial data phi; the run starts from eps * phi.
[data]
kind = "gaussian"        # gaussian | super-gaussian | bump-sum
width = 1.0              # length units: exp(-|x - center|^2 / (2 width^2))
center = [0.0]           # one entry per dimension
modulation = [0.0]       # wave vector k of the factor exp(i k.x)

# Periodic box [-half_width, half_width)^dim with n points per axis.
[grid]
dim = 1
n = 2048
half_width = 64.0

# i u_t + (1/2) Lap u = lambda |u|^{2 theta/dim} u
[equation]
lambda_re = 0.0
lambda_im = 1.0          # must be > 0 for the lifespan bounds
theta = 0.5              # in (0, 1]; 1 is the critical power

[solver]
eps = 0.2                # amplitude for single runs
s = 0.75                 # Sobolev index of the tracked norms
dt_init = 0.05           # time units; cap on the adaptive step
dt_safety = 0.1          # c_dt in dt = c_dt min(dt_init, 1/(b Im(lambda) |u|_inf^b))
boundary_mass_tolerance = 1e-6   # mass fraction allowed in the outer 10% shell
t_max = 500.0            # runs reaching t_max are censored
diag_interval = 0.1      # time between recorded diagnostics
enforce_hypotheses = false       # require dim/2 < s < min(2, 1 + 2 theta/dim)
# blowup_norm_threshold = 5000.0 # sup-norm escape level; default 1e3/eps

[sweep]
eps_ladder = [0.4, 0.3, 0.2, 0.15]   # strictly decreasing
tolerance = 0.1                      # verdict: min q_eps >= bound (1 - tolerance)

[output]
dir = "out"
jobs = 4

# Profile ODE checks (profile-ode subcommand): a = theta, b = 2 theta/dim,
# Psi_0 = sup|phi_hat|, psi_0 = phi_hat at sampled frequencies.
[profile_ode]
sigma_fraction = 0.5     # sigma / tau_1, in (0, 1)
c1 = 0.5                 # |psi_1| <= c1 eps^{1+delta}
c2 = 0.5                 # |rho| <= c2 eps^{1+b+delta} t^{-a}
delta = 1.0
psi1 = "zero"            # zero | constant
rho = "worst-sign"       # zero | oscillatory | worst-sign
frequencies = 9          # number of sampled frequencies
n_records = 100          # recorded times per frequency
t_bar = 1000.0           # cap on the integration window
t_star = 1.0             # start of the integration window
# eps = 1e-5             # default: 0.9 of the largest admissible amplitude
"#;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialData {
    Gaussian {
        width: f64,
        center: Vec<f64>,
        modulation: Vec<f64>,
    },
    /// `exp(-(|x|^2/(2 width^2))^order)`.
    SuperGaussian { width: f64, order: f64 },
    /// Sum of smooth compactly supported bumps.
    BumpSum { bumps: Vec<Bump> },
}

/// `amplitude * exp(1 - 1/(1 - |x - center|^2/radius^2))` inside the ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub radius: f64,
}

fn check_vec(name: &str, v: &[f64], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::Config(format!(
            "data.{name} has {} entries, grid.dim is {dim}",
            v.len()
        )));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Config(format!("data.{name} must be finite")));
    }
    Ok(())
}

impl InitialData {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            InitialData::Gaussian {
                width,
                center,
                modulation,
            } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!(
                        "data.width must be > 0 (got {width})"
                    )));
                }
                check_vec("center", center, dim)?;
                check_vec("modulation", modulation, dim)
            }
            InitialData::SuperGaussian { width, order } => {
                if !(*width > 0.0) {
                    return Err(Error::Config(format!(
                        "data.width must be > 0 (got {width})"
                    )));
                }
                if !(*order >= 1.0) {
                    return Err(Error::Config(format!(
                        "data.order must be >= 1 (got {order})"
                    )));
                }
                Ok(())
            }
            InitialData::BumpSum { bumps } => {
                if bumps.is_empty() {
                    return Err(Error::Config("data.bumps is empty".into()));
                }
                for b in bumps {
                    check_vec("bumps.center", &b.center, dim)?;
                    if !(b.radius > 0.0) || !b.amplitude.is_finite() {
                        return Err(Error::Config(
                            "each bump needs radius > 0 and a finite amplitude".into(),
                        ));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            InitialData::Gaussian {
                width,
                center,
                modulation,
            } => {
                let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                let phase: f64 = x.iter().zip(modulation).map(|(a, k)| a * k).sum();
                Complex64::from_polar((-r2 / (2.0 * width * width)).exp(), phase)
            }
            InitialData::SuperGaussian { width, order } => {
                let r2: f64 = x.iter().map(|a| a * a).sum();
                Complex64::new((-(r2 / (2.0 * width * width)).powf(*order)).exp(), 0.0)
            }
            InitialData::BumpSum { bumps } => {
                let mut acc = 0.0;
                for b in bumps {
                    let r2: f64 = x
                        .iter()
                        .zip(&b.center)
                        .map(|(a, c)| (a - c) * (a - c))
                        .sum();
                    let u = r2 / (b.radius * b.radius);
                    if u < 1.0 {
                        acc += b.amplitude * (1.0 - 1.0 / (1.0 - u)).exp();
                    }
                }
                Complex64::new(acc, 0.0)
            }
        }
    }

    pub fn field(&self, grid: Grid) -> Result<ComplexField> {
        self.validate(grid.dim)?;
        Ok(ComplexField::from_physical_fn(grid, |x| self.eval(x)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquationConfig {
    pub lambda_re: f64,
    pub lambda_im: f64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub eps: f64,
    pub s: f64,
    pub dt_init: f64,
    pub dt_safety: f64,
    pub boundary_mass_tolerance: f64,
    pub t_max: f64,
    pub diag_interval: f64,
    pub enforce_hypotheses: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_norm_threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub eps_ladder: Vec<f64>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Psi1Kind {
    Zero,
    Constant,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhoKind {
    Zero,
    Oscillatory,
    WorstSign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileOdeSection {
    pub sigma_fraction: f64,
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub psi1: Psi1Kind,
    pub rho: RhoKind,
    pub frequencies: usize,
    pub n_records: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_bar: Option<f64>,
    pub t_star: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
}

impl ProfileOdeSection {
    /// Perturbation at full envelope strength.
    pub fn perturbation(&self, eps: f64) -> PerturbationSpec {
        let psi1 = match self.psi1 {
            Psi1Kind::Zero => Psi1::Zero,
            Psi1Kind::Constant => {
                Psi1::Constant(Complex64::new(self.c1 * eps.powf(1.0 + self.delta), 0.0))
            }
        };
        let rho = match self.rho {
            RhoKind::Zero => Rho::Zero,
            RhoKind::Oscillatory => Rho::Oscillatory {
                amplitude: 1.0,
                frequency: 1.0,
                phase: 0.0,
            },
            RhoKind::WorstSign => Rho::WorstSign { amplitude: 1.0 },
        };
        PerturbationSpec {
            c1: self.c1,
            c2: self.c2,
            delta: self.delta,
            psi1,
            rho,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: InitialData,
    pub grid: Grid,
    pub equation: EquationConfig,
    pub solver: SolverSection,
    pub sweep: SweepSection,
    pub output: OutputSection,
    pub profile_ode: ProfileOdeSection,
}

// Missing sections and keys of a configuration file fall back to these
// values, which the annotated template repeats.

impl Default for EquationConfig {
    fn default() -> Self {
        EquationConfig {
            lambda_re: 0.0,
            lambda_im: 1.0,
            theta: 0.5,
        }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            eps: 0.2,
            s: 0.75,
            dt_init: 0.05,
            dt_safety: 0.1,
            boundary_mass_tolerance: 1e-6,
            t_max: 500.0,
            diag_interval: 0.1,
            enforce_hypotheses: false,
            blowup_norm_threshold: None,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            eps_ladder: vec![0.4, 0.3, 0.2, 0.15],
            tolerance: 0.1,
        }
    }
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: PathBuf::from("out"),
            jobs: 4,
        }
    }
}

impl Default for ProfileOdeSection {
    fn default() -> Self {
        ProfileOdeSection {
            sigma_fraction: 0.5,
            c1: 0.5,
            c2: 0.5,
            delta: 1.0,
            psi1: Psi1Kind::Zero,
            rho: RhoKind::WorstSign,
            frequencies: 9,
            n_records: 100,
            t_bar: Some(1000.0),
            t_star: 1.0,
            eps: None,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            data: InitialData::Gaussian {
                width: 1.0,
                center: vec![0.0],
                modulation: vec![0.0],
            },
            grid: Grid {
                dim: 1,
                n: 2048,
                half_width: 64.0,
            },
            equation: EquationConfig::default(),
            solver: SolverSection::default(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
            profile_ode: ProfileOdeSection::default(),
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates a TOML document. Errors name the line and the
    /// offending key.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        ExperimentConfig::parse(&text).map_err(|e| match e {
            Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        self.data.validate(self.grid.dim)?;
        let t = self.equation.theta;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Config(format!(
                "equation.theta must lie in (0, 1] (got {t})"
            )));
        }
        if self.output.jobs == 0 {
            return Err(Error::Config("output.jobs must be >= 1".into()));
        }
        let sw = &self.sweep;
        if sw.eps_ladder.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("sweep.eps_ladder entries must be > 0".into()));
        }
        if sw.eps_ladder.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::Config(
                "sweep.eps_ladder must be strictly decreasing".into(),
            ));
        }
        if !(0.0..1.0).contains(&sw.tolerance) {
            return Err(Error::Config(format!(
                "sweep.tolerance must lie in [0, 1) (got {})",
                sw.tolerance
            )));
        }
        let po = &self.profile_ode;
        if !(po.sigma_fraction > 0.0 && po.sigma_fraction < 1.0) {
            return Err(Error::Config(format!(
                "profile_ode.sigma_fraction must lie in (0, 1) (got {})",
                po.sigma_fraction
            )));
        }
        if !(po.c1 > 0.0 && po.c2 > 0.0 && po.delta > 0.0) {
            return Err(Error::Config(
                "profile_ode.c1, c2 and delta must be > 0".into(),
            ));
        }
        if !(po.t_star > 0.0) {
            return Err(Error::Config(format!(
                "profile_ode.t_star must be > 0 (got {})",
                po.t_star
            )));
        }
        if po.frequencies == 0 || po.n_records < 2 {
            return Err(Error::Config(
                "profile_ode needs frequencies >= 1 and n_records >= 2".into(),
            ));
        }
        self.solver_config()?.validate()
    }

    pub fn lambda(&self) -> Complex64 {
        Complex64::new(self.equation.lambda_re, self.equation.lambda_im)
    }

    pub fn params(&self) -> Result<NonlinearityParams> {
        NonlinearityParams::new(self.lambda(), self.equation.theta, self.grid.dim)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        Ok(SolverConfig {
            grid: self.grid,
            params: self.params()?,
            eps: s.eps,
            s: s.s,
            dt_init: s.dt_init,
            dt_safety: s.dt_safety,
            blowup_norm_threshold: s.blowup_norm_threshold,
            boundary_mass_tolerance: s.boundary_mass_tolerance,
            t_max: s.t_max,
            diag_interval: s.diag_interval,
            enforce_hypotheses: s.enforce_hypotheses,
        })
    }

    pub fn initial_field(&self) -> Result<ComplexField> {
        self.data.field(self.grid)
    }

    /// Hypotheses of the lifespan lower bound: `Im lambda > 0` and
    /// `0 < theta <= 1`.
    pub fn require_bound_hypotheses(&self) -> Result<()> {
        if !(self.equation.lambda_im > 0.0) {
            return Err(Error::Domain(format!(
                "the lifespan lower bound assumes a dissipative coupling, Im lambda > 0 (got {})",
                self.equation.lambda_im
            )));
        }
        let t = self.equation.theta;
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::Domain(format!(
                "the lifespan lower bound assumes 0 < theta <= 1 (got {t})"
            )));
        }
        Ok(())
    }

    /// Copy with the single-run amplitude replaced.
    pub fn with_eps(&self, eps: f64) -> ExperimentConfig {
        let mut c = self.clone();
        c.solver.eps = eps;
        c
    }

    /// Hex SHA-256 of the canonical JSON serialization.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(ExperimentConfig::parse(&text).unwrap(), cfg);
    }

    #[test]
    fn template_matches_defaults() {
        assert_eq!(
            ExperimentConfig::parse(DEFAULT_CONFIG_TOML).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn missing_keys_fall_back_to_defaults() {
        let cfg =
            ExperimentConfig::parse("[solver]\neps = 0.3\n\n[equation]\ntheta = 0.25\n").unwrap();
        let mut expected = ExperimentConfig::default();
        expected.solver.eps = 0.3;
        expected.equation.theta = 0.25;
        assert_eq!(cfg, expected);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = DEFAULT_CONFIG_TOML.replace("theta = 0.5", "theta = 0.5\nthetta = 1.0");
        let err = ExperimentConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("thetta"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn unknown_data_key_rejected() {
        let text = DEFAULT_CONFIG_TOML.replace("width = 1.0", "width = 1.0\nsharpness = 2.0");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn theta_window_enforced() {
        let text = DEFAULT_CONFIG_TOML.replace("theta = 0.5", "theta = 1.5");
        assert!(matches!(
            ExperimentConfig::parse(&text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn dimension_mismatch_in_data() {
        let text = DEFAULT_CONFIG_TOML.replace("center = [0.0]", "center = [0.0, 1.0]");
        assert!(matches!(
            ExperimentConfig::parse(&text),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn bound_hypotheses() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.require_bound_hypotheses().is_ok());
        cfg.equation.lambda_im = 0.0;
        let err = cfg.require_bound_hypotheses().unwrap_err().to_string();
        assert!(err.contains("Im lambda > 0"));
    }

    #[test]
    fn bump_profile() {
        let data = InitialData::BumpSum {
            bumps: vec![Bump {
                amplitude: 2.0,
                center: vec![1.0],
                radius: 0.5,
            }],
        };
        assert!((data.eval(&[1.0]).re - 2.0).abs() < 1e-15);
        assert_eq!(data.eval(&[1.6]).re, 0.0);
    }
}
