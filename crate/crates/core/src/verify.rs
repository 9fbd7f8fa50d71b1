//! Built-in property checks run by the `check` subcommand.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::liouville::{Liouvillian, SUPPORT_TOL};
use crate::model::{RateModel, TwoLevelSystem};
use crate::output::RowThresholds;
use crate::propagation::{evolve, Frame, IntegratorConfig, PulseSpec, PulseStrength};
use crate::states::DensityMatrix;
use crate::{hermiticity_defect, CMatrix, Result, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    /// Human-readable acceptance condition.
    pub condition: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<26} measured={:.3e} ({})", self.name, self.measured, self.condition)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub trials: usize,
    pub evolutions: usize,
    /// Conservation horizon in time units.
    pub horizon: f64,
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

fn random_state(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> DensityMatrix {
    let a = CMatrix::from_fn(n, rank, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = &a * a.adjoint();
    let tr = m.trace();
    DensityMatrix::from_matrix(m.map(|z| z / tr)).expect("square")
}

fn result(name: &'static str, passed: bool, measured: f64, condition: impl Into<String>) -> CheckResult {
    CheckResult { name, passed, measured, condition: condition.into() }
}

/// Runs every suite on the given two-level system and rates. Suites that
/// cannot run because of an earlier failure are reported as failures.
pub fn run_checks(tl: &TwoLevelSystem, rates: &RateModel, opts: &CheckOptions) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sys = tl.control_system();
    let mut report = CheckReport::default();

    let residual = rates.residual_dephasing(0, 1);
    let cp = rates.check_complete_positivity();
    report.results.push(result("complete_positivity", cp.is_ok(), residual, "residual dephasing >= 0"));

    let scale = rates.gamma().iter().chain(rates.dephasing().iter()).fold(1.0f64, |a, &b| a.max(b));
    let limit = 1e-12 * scale;
    match rates.to_lindblad() {
        Ok(channels) => {
            let mut worst = 0.0f64;
            for _ in 0..opts.trials {
                let rho = random_state(&mut rng, 2, 2);
                let a = rates.dissipator(rho.matrix())?;
                let b = channels.dissipator(rho.matrix())?;
                worst = worst.max((a - b).camax());
            }
            report.results.push(result("lindblad_equivalence", worst <= limit, worst, format!("<= {limit:.1e}")));
        }
        Err(e) => report.results.push(result("lindblad_equivalence", false, f64::NAN, e.to_string())),
    }

    let l = Liouvillian::build(&sys, rates)?;
    let support = l.support_disjointness(SUPPORT_TOL);
    report.results.push(result(
        "support_disjointness",
        support.disjoint,
        support.overlapping.len() as f64,
        "no shared superoperator entries",
    ));

    let mut leak = 0.0f64;
    for _ in 0..opts.trials.min(20) {
        let f = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        leak = leak.max(l.trace_leak(&f)?);
    }
    report.results.push(result("trace_preservation", leak <= 1e-12, leak, "generator trace leak <= 1e-12"));

    let rho2 = DensityMatrix::from_statevector(&[C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)])?;
    let cancel = l.cancellation_residual(&rho2)?;
    let gamma = rates.dephasing()[(0, 1)];
    if gamma > 0.0 {
        report.results.push(result(
            "no_cancellation",
            cancel > 0.1 * gamma,
            cancel,
            format!("> 0.1 Gamma = {:.3e}", 0.1 * gamma),
        ));
    }

    let limits = RowThresholds::default();
    let (mut trace, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    let mut failure = None;
    for _ in 0..opts.evolutions {
        let rho0 = random_state(&mut rng, 2, 2);
        let drive = random_drive(&mut rng, tl.omega(), opts.horizon);
        match evolve(&l, &drive, &rho0, opts.horizon, opts.horizon / 40.0, &opts.integrator) {
            Ok(traj) => {
                for s in &traj.states {
                    let r = s.validate(f64::INFINITY);
                    trace = trace.max(r.trace_defect);
                    herm = herm.max(hermiticity_defect(s.matrix()));
                    min_eig = min_eig.min(r.min_eigenvalue);
                }
            }
            Err(e) => failure = Some(e.to_string()),
        }
    }
    let ok = failure.is_none();
    report.results.push(result("trace_conservation", ok && trace < limits.trace, trace, "< 1e-8"));
    report.results.push(result("hermiticity", ok && herm < limits.hermiticity, herm, "< 1e-9"));
    report.results.push(result(
        "positivity",
        ok && min_eig >= limits.min_eigenvalue,
        min_eig,
        failure.unwrap_or_else(|| "min eigenvalue >= -1e-7".into()),
    ));

    let closed = Liouvillian::build(&sys, &RateModel::zero(2))?;
    let mut drift = 0.0f64;
    for _ in 0..opts.evolutions.max(1) {
        let rank = 1 + rng.gen_range(0..2);
        let rho0 = random_state(&mut rng, 2, rank);
        let p0 = rho0.purity();
        let drive = random_drive(&mut rng, tl.omega(), opts.horizon);
        let traj = evolve(&closed, &drive, &rho0, opts.horizon, opts.horizon / 40.0, &opts.integrator)?;
        for s in &traj.states {
            drift = drift.max((s.purity() - p0).abs());
        }
    }
    report.results.push(result("closed_system_purity", drift < 1e-8, drift, "< 1e-8"));

    Ok(report)
}

/// Lab-frame Gaussian pulses on both controls with random areas and carriers
/// near resonance.
fn random_drive(rng: &mut ChaCha8Rng, omega: f64, horizon: f64) -> Vec<PulseSpec> {
    (0..2)
        .map(|k| {
            let area = rng.gen_range(0.0..2.0 * PI);
            let carrier = omega * rng.gen_range(0.9..1.1);
            PulseSpec::gaussian(k, horizon, PulseStrength::Area(area), Frame::Lab).with_carrier(carrier)
        })
        .collect()
}
