use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use nls_lifespan::config::{ExperimentConfig, DEFAULT_CONFIG_TOML};
use nls_lifespan::experiment;
use nls_lifespan::lifespan::Verdict;
use nls_lifespan::persist;

const EXIT_DOMAIN: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_FAIL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "nls-lab",
    version,
    about = "Lifespan laboratory for small-data dissipative NLS"
)]
struct Cli {
    /// Experiment configuration (TOML). Defaults are used when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides output.dir.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Parallel runs; overrides output.jobs.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Verdict tolerance; overrides sweep.tolerance.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Require the Sobolev index window of the theory.
    #[arg(long, global = true, value_enum)]
    enforce_hypotheses: Option<Switch>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one amplitude to blow-up and persist its record.
    Simulate,
    /// Run the amplitude ladder and compare against the lower bound.
    Sweep,
    /// Integrate the perturbed profile ODE and check its a priori bound.
    ProfileOde,
    /// Print the theoretical lifespan bounds for the configured data.
    Bounds,
    /// Sample norms, lemma ratios and the remainder along one run.
    Diagnostics,
    /// Temporal and spatial self-convergence of the split-step scheme.
    Convergence {
        /// Final time of the fixed-step runs.
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Number of extra step halvings beyond the first pair.
        #[arg(long, default_value_t = 3)]
        refinements: usize,
    },
    /// Print the configuration (annotated defaults when no --config is given).
    PrintConfig,
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    if let Some(j) = cli.jobs {
        cfg.output.jobs = j;
    }
    if let Some(t) = cli.tolerance {
        cfg.sweep.tolerance = t;
    }
    if let Some(s) = cli.enforce_hypotheses {
        cfg.solver.enforce_hypotheses = matches!(s, Switch::On);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.6e}"))
}

/// Persistence failures are reported without discarding the in-memory result.
fn report_io(result: nls_lifespan::Result<PathBuf>) {
    match result {
        Ok(p) => println!("wrote {}", p.display()),
        Err(e) => eprintln!("warning: {e}"),
    }
}

fn simulate(cfg: &ExperimentConfig) -> Result<u8> {
    let record = experiment::simulate(cfg)?;
    let dir = &cfg.output.dir;
    println!("eps            {}", record.eps);
    println!("status         {}", record.status_label());
    println!("T_eps          {:.6}", record.t_eps);
    println!("q_eps          {:.6}", record.invariant_quantity);
    println!("bound_value    {}", fmt_opt(record.bound_value));
    println!("steps          {}", record.steps);
    println!("l2_drift       {}", fmt_opt(experiment::l2_drift(&record)));
    if cfg.equation.lambda_re == 0.0 && cfg.equation.lambda_im == 0.0 {
        println!("unitary run (lambda = 0)");
    }
    if record.outside_hypotheses {
        println!("note: outside theorem hypotheses (d >= 4, or d = 3 with theta <= 3/4)");
    }
    report_io(persist::write_run(dir, &record));
    report_io(persist::upsert_summary_row(dir, &record));
    Ok(0)
}

fn sweep(cfg: &ExperimentConfig) -> Result<u8> {
    let result = experiment::run_sweep(cfg)?;
    println!(
        "{:>10} {:>12} {:>10} {:>10} status",
        "eps", "T_eps", "q_eps", "run_min"
    );
    for (r, m) in result.records.iter().zip(&result.summary.running_min) {
        println!(
            "{:>10.4} {:>12.6} {:>10.6} {:>10} {}",
            r.eps,
            r.t_eps,
            r.invariant_quantity,
            m.map_or_else(|| "-".into(), |v| format!("{v:.6}")),
            r.status_label()
        );
    }
    println!(
        "bound_value {:.6}  tau0 {:.6}",
        result.summary.bound_value, result.summary.tau0
    );
    println!("D0 estimate {}", fmt_opt(result.summary.d0_estimate));
    report_io(persist::write_sweep(
        &cfg.output.dir,
        &result.records,
        &result.summary,
    ));
    println!("{}", persist::verdict_line(&result.summary));
    Ok(match result.summary.verdict {
        Verdict::Pass => 0,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn profile_ode(cfg: &ExperimentConfig) -> Result<u8> {
    let traj = experiment::profile_ode(cfg)?;
    let p = &traj.params;
    println!("a = {}  b = {}  q = {}", p.a, p.b, p.q());
    println!(
        "eps = {:.6e}  t_* = {:.6}  window end = {:.6e}",
        p.eps, p.t_star, traj.t_end
    );
    println!(
        "C0 = {:.6}  C3 = {:.6}  M = {:.6e}",
        traj.constants.c0, traj.constants.c3, traj.constants.m
    );
    println!("sup|eta|/eps      {:.6}", traj.sup_eta / p.eps);
    println!("lemma bound / eps {:.6}", traj.lemma_bound() / p.eps);
    println!("max Gronwall ratio {:.6}", traj.max_gronwall_ratio);
    let path = cfg.output.dir.join("profile_ode.csv");
    std::fs::create_dir_all(&cfg.output.dir)
        .with_context(|| format!("creating {}", cfg.output.dir.display()))?;
    report_io(traj.write_csv(&path).map(|_| path.clone()));
    if traj.sup_eta > traj.lemma_bound() {
        println!("bound violated");
        return Ok(EXIT_FAIL);
    }
    println!("bound holds");
    Ok(0)
}

fn bounds(cfg: &ExperimentConfig) -> Result<u8> {
    let b = experiment::bounds(cfg)?;
    println!("sup|phi_hat|   {:.12}", b.sup_phi_hat);
    if let Some(r) = &b.report {
        println!("bound_value    {:.12}", r.bound_value);
        println!("tau0           {:.12}", r.tau0);
        println!("tau1           {:.12}", r.tau1);
        println!("gamma          {}", fmt_opt(r.gamma));
        println!("t_star         {}", fmt_opt(r.t_star));
    }
    if let Some(c) = b.critical_bound {
        println!("critical_bound {c:.12}");
        println!("critical_T     {}", fmt_opt(b.critical_time));
    }
    if b.outside_hypotheses {
        println!("note: outside theorem hypotheses (d >= 4, or d = 3 with theta <= 3/4)");
    }
    Ok(0)
}

fn diagnostics(cfg: &ExperimentConfig) -> Result<u8> {
    let rows = experiment::diagnostics(cfg)?;
    let path = persist::write_diagnostics(&cfg.output.dir, &rows)?;
    let max = |f: &dyn Fn(&experiment::DiagnosticRow) -> Option<f64>| {
        rows.iter()
            .filter_map(f)
            .fold(None, |a: Option<f64>, v| Some(a.map_or(v, |m| m.max(v))))
    };
    println!("samples        {}", rows.len());
    println!("max r1         {}", fmt_opt(max(&|r| r.r1)));
    println!("max r2         {}", fmt_opt(max(&|r| r.r2)));
    println!("max r3         {}", fmt_opt(max(&|r| r.r3)));
    println!("max R scaled   {}", fmt_opt(max(&|r| r.remainder_scaled)));
    println!("wrote {}", path.display());
    Ok(0)
}

fn convergence(cfg: &ExperimentConfig, t_end: f64, refinements: usize) -> Result<u8> {
    let report = experiment::convergence(cfg, t_end, refinements)?;
    for (dt, d) in report.dts.iter().zip(&report.successive_differences) {
        println!("dt {dt:.6e}  |u_dt - u_dt/2| {d:.6e}");
    }
    for o in &report.temporal_orders {
        println!("order {o:.4}");
    }
    println!(
        "spatial n {:?}  errors {:.3e} {:.3e}",
        report.spatial_n, report.spatial_errors[0], report.spatial_errors[1]
    );
    let path = cfg.output.dir.join("convergence.json");
    report_io(persist::write_json(&path, &report).map(|_| path.clone()));
    Ok(0)
}

fn print_config(cli: &Cli) -> Result<u8> {
    if cli.config.is_none()
        && cli.out.is_none()
        && cli.jobs.is_none()
        && cli.tolerance.is_none()
        && cli.enforce_hypotheses.is_none()
    {
        print!("{DEFAULT_CONFIG_TOML}");
    } else {
        print!("{}", load_config(cli)?.to_toml()?);
    }
    Ok(0)
}

fn run(cli: &Cli) -> Result<u8> {
    if let Command::PrintConfig = cli.command {
        return print_config(cli);
    }
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Simulate => simulate(&cfg),
        Command::Sweep => sweep(&cfg),
        Command::ProfileOde => profile_ode(&cfg),
        Command::Bounds => bounds(&cfg),
        Command::Diagnostics => diagnostics(&cfg),
        Command::Convergence { t_end, refinements } => convergence(&cfg, *t_end, *refinements),
        Command::PrintConfig => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_DOMAIN)
        }
    }
}
