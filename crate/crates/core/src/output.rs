//! CSV rendering. Numbers use 17 significant digits in scientific notation,
//! `\n` line endings, and times in vibrational periods.

use std::fmt::Write as _;

use crate::control::OptResult;
use crate::propagation::Trajectory;
use crate::Result;
use crate::Error;

/// Per-row validation thresholds recorded in each trajectory file header.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowThresholds {
    pub trace: f64,
    pub hermiticity: f64,
    pub min_eigenvalue: f64,
}

impl Default for RowThresholds {
    fn default() -> Self {
        Self { trace: 1e-8, hermiticity: 1e-9, min_eigenvalue: -1e-7 }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fails on the first sample outside `limits`.
pub fn check_rows(traj: &Trajectory, limits: &RowThresholds) -> Result<()> {
    for (t, rho) in traj.times.iter().zip(&traj.states) {
        let r = rho.validate(f64::INFINITY);
        if r.min_eigenvalue < limits.min_eigenvalue {
            return Err(Error::Positivity { t: *t, min_eigenvalue: r.min_eigenvalue });
        }
        if r.trace_defect > limits.trace || r.hermiticity_defect > limits.hermiticity {
            return Err(Error::InvalidSystem(format!(
                "state at t = {t} fails validation: trace defect {:.3e}, hermiticity defect {:.3e}",
                r.trace_defect, r.hermiticity_defect
            )));
        }
    }
    Ok(())
}

/// Columns: t, re/im of every ρ_ij row-major (1-based labels), then
/// purity_deficit and renyi_entropy.
pub fn trajectory_csv(traj: &Trajectory, period: f64, limits: &RowThresholds) -> String {
    let n = traj.dim();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# time_unit=2pi/omega trace_defect<={:e} hermiticity_defect<={:e} min_eigenvalue>={:e}",
        limits.trace, limits.hermiticity, limits.min_eigenvalue
    );
    s.push('t');
    for i in 1..=n {
        for j in 1..=n {
            let _ = write!(s, ",re_rho_{i}{j},im_rho_{i}{j}");
        }
    }
    s.push_str(",purity_deficit,renyi_entropy\n");
    for k in 0..traj.len() {
        s.push_str(&num(traj.times[k] / period));
        for z in traj.states[k].matrix().transpose().iter() {
            let _ = write!(s, ",{},{}", num(z.re), num(z.im));
        }
        let _ = writeln!(s, ",{},{}", num(traj.purity_deficit[k]), num(traj.renyi_entropy[k]));
    }
    s
}

/// One row per objective evaluation. `scales` divides each parameter into
/// its reporting unit.
pub fn history_csv(opt: &OptResult, columns: &[&str], scales: &[f64]) -> String {
    let mut s = String::from("evaluation");
    for c in columns {
        let _ = write!(s, ",{c}");
    }
    s.push_str(",objective,best_so_far\n");
    for (k, ((x, v), best)) in opt.history.iter().zip(opt.envelope()).enumerate() {
        let _ = write!(s, "{}", k + 1);
        for (p, sc) in x.iter().zip(scales) {
            let _ = write!(s, ",{}", num(p / sc));
        }
        let _ = writeln!(s, ",{},{}", num(*v), num(best));
    }
    s
}

/// Final purity, entropy and populations of a trajectory.
pub fn summary_line(traj: &Trajectory, period: f64) -> String {
    let Some(rho) = traj.final_state() else {
        return "empty trajectory".into();
    };
    let pops: Vec<String> = rho.populations().iter().map(|p| format!("{p:.6}")).collect();
    format!(
        "t={:.6} purity={:.6} purity_deficit={:.6} renyi_entropy={:.6} populations=[{}]",
        traj.final_time().unwrap_or(0.0) / period,
        rho.purity(),
        rho.purity_deficit(),
        rho.renyi_entropy(),
        pops.join(", ")
    )
}
