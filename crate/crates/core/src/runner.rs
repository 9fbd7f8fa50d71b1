//! Scenario execution. All results are computed before any file is written,
//! so a failing run leaves the output directory untouched.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::config::{RunConfig, Scenario};
use crate::control::{naive_vs_optimized_report, optimize_pulse, PulseParameter, PulseProblem};
use crate::liouville::Liouvillian;
use crate::output::{check_rows, history_csv, summary_line, trajectory_csv, RowThresholds};
use crate::propagation::{evolve, IntegratorConfig, PulseSpec};
use crate::pumping::{build_pumping_system, dark_state_check};
use crate::verify::{run_checks, CheckOptions};
use crate::{Error, Result};

/// Environment variable that overrides `output.dir`.
pub const OUTPUT_DIR_ENV: &str = "DQC_OUTPUT_DIR";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    /// Lines intended for standard output.
    pub summary: Vec<String>,
    pub artifacts: Vec<Artifact>,
    /// False only for a `check` run with a failing property.
    pub passed: bool,
}

/// Process exit status for a finished run or an error.
pub fn exit_code(outcome: &Result<RunOutcome>) -> i32 {
    match outcome {
        Ok(o) if o.passed => 0,
        Ok(_) => 3,
        Err(e) if e.is_config() => 1,
        Err(_) => 2,
    }
}

/// Computes the scenario without touching the file system.
pub fn execute(cfg: &RunConfig, scenario: Scenario) -> Result<RunOutcome> {
    if let Some(s) = cfg.scenario {
        if s != scenario {
            return Err(Error::Config(format!(
                "scenario: config declares \"{}\" but \"{}\" was requested",
                s.name(),
                scenario.name()
            )));
        }
    }
    match scenario {
        Scenario::Simulate => simulate(cfg),
        Scenario::Optimize => optimize(cfg),
        Scenario::Pump => pump(cfg),
        Scenario::Check => check(cfg),
    }
}

/// Executes and then writes artifacts into `out_dir` (or the configured
/// directory). Returns the outcome and the written paths.
pub fn run(cfg: &RunConfig, scenario: Scenario, out_dir: Option<&Path>) -> Result<(RunOutcome, Vec<PathBuf>)> {
    let outcome = execute(cfg, scenario)?;
    let dir = out_dir.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let written = write_artifacts(&dir, &outcome.artifacts)?;
    Ok((outcome, written))
}

pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    if artifacts.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(dir)?;
    artifacts
        .iter()
        .map(|a| {
            let path = dir.join(&a.name);
            std::fs::write(&path, &a.contents)?;
            Ok(path)
        })
        .collect()
}

struct TwoLevelSetup {
    l: Liouvillian,
    period: f64,
    integrator: IntegratorConfig,
    dt_out: f64,
}

fn two_level_setup(cfg: &RunConfig) -> Result<TwoLevelSetup> {
    let sys = cfg.control_system()?;
    let rates = cfg.rate_model()?;
    let integrator = cfg.integrator()?;
    let period = cfg.period()?;
    let dt_out = cfg.dt_out()?;
    rates.check_complete_positivity()?;
    Ok(TwoLevelSetup { l: Liouvillian::build(&sys, &rates)?, period, integrator, dt_out })
}

fn simulate(cfg: &RunConfig) -> Result<RunOutcome> {
    let setup = two_level_setup(cfg)?;
    let rho0 = cfg.initial_state(2)?;
    let pulses: Vec<PulseSpec> = match cfg.pulse {
        Some(_) => vec![cfg.pulse_spec()?],
        None => Vec::new(),
    };
    let horizon = match (cfg.horizon()?, pulses.first()) {
        (Some(h), _) => h,
        (None, Some(p)) => p.duration,
        (None, None) => return Err(Error::Config("integrator.horizon: required when no pulse is given".into())),
    };
    let prefix = cfg.output_prefix(Scenario::Simulate)?;
    let traj = evolve(&setup.l, &pulses, &rho0, horizon, setup.dt_out, &setup.integrator)?;
    let limits = RowThresholds::default();
    check_rows(&traj, &limits)?;
    Ok(RunOutcome {
        summary: vec![summary_line(&traj, setup.period)],
        artifacts: vec![Artifact {
            name: format!("{prefix}_trajectory.csv"),
            contents: trajectory_csv(&traj, setup.period, &limits),
        }],
        passed: true,
    })
}

fn optimize(cfg: &RunConfig) -> Result<RunOutcome> {
    let setup = two_level_setup(cfg)?;
    let problem = PulseProblem {
        liouvillian: &setup.l,
        rho0: cfg.initial_state(2)?,
        template: cfg.pulse_spec()?,
        integrator: setup.integrator,
        dt_out: setup.dt_out,
    };
    let bounds = cfg.bounds()?;
    let objective = cfg.objective()?;
    let budget = cfg.optimize_section()?.budget;
    let prefix = cfg.output_prefix(Scenario::Optimize)?;

    let result = optimize_pulse(&problem, &bounds, &objective, budget)?;
    let best = problem.pulse_with(&bounds, &result.best_params);
    let horizon = objective.horizon.unwrap_or(best.duration);
    let traj = problem.simulate(best, horizon)?;
    let limits = RowThresholds::default();
    check_rows(&traj, &limits)?;

    let (columns, scales): (Vec<&str>, Vec<f64>) = bounds
        .iter()
        .map(|b| match b.param {
            PulseParameter::Area => ("area_pi", PI),
            PulseParameter::Duration => ("duration_periods", setup.period),
        })
        .unzip();
    let params: Vec<String> = columns
        .iter()
        .zip(result.best_params.iter().zip(&scales))
        .map(|(c, (p, s))| format!("{c}={:.6}", p / s))
        .collect();
    let mut summary = vec![format!(
        "optimum {} objective={:.6e} evaluations={}{}",
        params.join(" "),
        result.best_value,
        result.evaluations,
        if result.budget_exhausted { " (budget exhausted)" } else { "" }
    )];
    let mut report = Vec::new();
    report.push(format!("evaluations = {}", result.evaluations));
    report.push(format!("budget_exhausted = {}", result.budget_exhausted));
    report.push(format!("best_objective = {:.16e}", result.best_value));
    for (c, (p, s)) in columns.iter().zip(result.best_params.iter().zip(&scales)) {
        report.push(format!("best_{c} = {:.16e}", p / s));
    }
    if bounds.iter().all(|b| b.param == PulseParameter::Area) {
        let cmp = naive_vs_optimized_report(&problem, best.effective_area(), objective.horizon)?;
        summary.push(format!(
            "naive area 0.5pi: purity_deficit={:.6}; optimized: purity_deficit={:.6}",
            cmp.naive_purity_deficit, cmp.optimized_purity_deficit
        ));
        report.push(format!("naive_area_pi = {:.16e}", cmp.naive_area / PI));
        report.push(format!("naive_purity_deficit = {:.16e}", cmp.naive_purity_deficit));
        report.push(format!("optimized_purity_deficit = {:.16e}", cmp.optimized_purity_deficit));
    }
    summary.push(summary_line(&traj, setup.period));
    let mut report_text = report.join("\n");
    report_text.push('\n');

    Ok(RunOutcome {
        summary,
        artifacts: vec![
            Artifact { name: format!("{prefix}_history.csv"), contents: history_csv(&result, &columns, &scales) },
            Artifact { name: format!("{prefix}_trajectory.csv"), contents: trajectory_csv(&traj, setup.period, &limits) },
            Artifact { name: format!("{prefix}_summary.txt"), contents: report_text },
        ],
        passed: true,
    })
}

fn pump(cfg: &RunConfig) -> Result<RunOutcome> {
    let scheme = cfg.level_scheme()?;
    let section = cfg.pumping_section();
    let period = cfg.period()?;
    let integrator = cfg.integrator()?;
    let dt_out = cfg.dt_out()?;
    let rho0 = cfg.pumping_state(&scheme)?;
    let prefix = cfg.output_prefix(Scenario::Pump)?;
    if !(section.duration.is_finite() && section.duration > 0.0) {
        return Err(Error::Config("pumping.duration: must be a positive number of periods".into()));
    }
    let duration = section.duration * period;

    let sys = build_pumping_system(&scheme, section.rabi, section.detuning)
        .map_err(|e| Error::Config(format!("pumping: {e}")))?;
    sys.rates.check_complete_positivity()?;
    let l = sys.liouvillian()?;
    let traj = evolve(&l, &vec![sys.drive(duration)], &rho0, duration, dt_out, &integrator)?;
    let limits = RowThresholds::default();
    check_rows(&traj, &limits)?;
    Ok(RunOutcome {
        summary: vec![
            format!("dark ground levels: [{}]", dark_state_check(&scheme).join(", ")),
            summary_line(&traj, period),
        ],
        artifacts: vec![Artifact { name: format!("{prefix}_pumping.csv"), contents: trajectory_csv(&traj, period, &limits) }],
        passed: true,
    })
}

fn check(cfg: &RunConfig) -> Result<RunOutcome> {
    let tl = cfg.two_level()?;
    let rates = cfg.rate_model()?;
    let c = &cfg.check;
    if !(c.horizon.is_finite() && c.horizon > 0.0) {
        return Err(Error::Config("check.horizon: must be positive".into()));
    }
    let period = cfg.period()?;
    // Conservation thresholds are tighter than the default integrator error.
    let integrator = IntegratorConfig {
        atol: 1e-11,
        rtol: 1e-11,
        max_step: Some(period / 40.0),
        ..cfg.integrator()?
    };
    let opts = CheckOptions { trials: c.trials, evolutions: c.evolutions, horizon: c.horizon * period, seed: cfg.seed, integrator };
    let report = run_checks(&tl, &rates, &opts)?;
    Ok(RunOutcome {
        summary: report.results.iter().map(ToString::to_string).collect(),
        artifacts: Vec::new(),
        passed: report.passed(),
    })
}
