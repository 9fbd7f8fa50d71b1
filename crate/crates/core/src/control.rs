//! Derivative-free optimization of pulse parameters against terminal-state
//! objectives.
//!
//! One free parameter uses golden-section search; two or three use a
//! bound-projected Nelder–Mead simplex started at the box midpoint with
//! ±10% span offsets. Both are fully deterministic.

use std::f64::consts::PI;

use crate::liouville::Liouvillian;
use crate::propagation::{evolve, IntegratorConfig, PulseSpec, PulseStrength, Trajectory};
use crate::states::DensityMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// |Tr ρ(T)² − 1/N|.
    MaxEntropyFinal,
    /// ‖ρ(T) − target‖_F.
    TargetStateDistance(DensityMatrix),
    /// 1 − ρ_kk(T), level 0-based.
    TargetPopulation(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    /// Evaluation time; `None` means the end of the pulse.
    pub horizon: Option<f64>,
}

impl Objective {
    pub fn new(kind: ObjectiveKind) -> Self {
        Self { kind, horizon: None }
    }

    pub fn at(mut self, horizon: f64) -> Self {
        self.horizon = Some(horizon);
        self
    }
}

/// Lower is better.
pub fn evaluate_objective(obj: &Objective, traj: &Trajectory, horizon: f64) -> Result<f64> {
    let reached = traj.final_time().unwrap_or(f64::NEG_INFINITY);
    if reached < horizon * (1.0 - 1e-12) {
        return Err(Error::HorizonNotReached { reached, horizon });
    }
    let rho = traj.final_state().expect("nonempty trajectory");
    Ok(match &obj.kind {
        ObjectiveKind::MaxEntropyFinal => (rho.purity() - 1.0 / rho.dim() as f64).abs(),
        ObjectiveKind::TargetStateDistance(target) => rho.distance(target)?,
        ObjectiveKind::TargetPopulation(k) => {
            if *k >= rho.dim() {
                return Err(Error::Dimension { expected: rho.dim(), got: k + 1 });
            }
            1.0 - rho.population(*k)
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseParameter {
    /// Effective pulse area (radians).
    Area,
    /// Pulse length; a Gaussian keeps its relative geometry.
    Duration,
}

impl PulseParameter {
    pub fn name(self) -> &'static str {
        match self {
            PulseParameter::Area => "area",
            PulseParameter::Duration => "duration",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub param: PulseParameter,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub names: Vec<&'static str>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub evaluations: usize,
    /// Every evaluated point in order.
    pub history: Vec<(Vec<f64>, f64)>,
    /// Search stopped on the evaluation budget rather than convergence.
    pub budget_exhausted: bool,
}

impl OptResult {
    /// Running minimum of the history.
    pub fn envelope(&self) -> Vec<f64> {
        self.history
            .iter()
            .scan(f64::INFINITY, |best, (_, v)| {
                *best = best.min(*v);
                Some(*best)
            })
            .collect()
    }
}

/// A single-pulse scenario whose parameters are being tuned.
#[derive(Debug, Clone)]
pub struct PulseProblem<'a> {
    pub liouvillian: &'a Liouvillian,
    pub rho0: DensityMatrix,
    pub template: PulseSpec,
    pub integrator: IntegratorConfig,
    pub dt_out: f64,
}

impl PulseProblem<'_> {
    pub fn pulse_with(&self, bounds: &[Bound], x: &[f64]) -> PulseSpec {
        let mut p = self.template;
        for (b, &v) in bounds.iter().zip(x) {
            match b.param {
                PulseParameter::Area => p.strength = PulseStrength::Area(v),
                PulseParameter::Duration => p = p.with_duration(v),
            }
        }
        p
    }

    pub fn simulate(&self, pulse: PulseSpec, horizon: f64) -> Result<Trajectory> {
        evolve(self.liouvillian, &vec![pulse], &self.rho0, horizon, self.dt_out.min(horizon), &self.integrator)
    }

    fn evaluate(&self, obj: &Objective, bounds: &[Bound], x: &[f64]) -> Result<f64> {
        let pulse = self.pulse_with(bounds, x);
        let horizon = obj.horizon.unwrap_or(pulse.duration);
        let traj = self.simulate(pulse, horizon)?;
        evaluate_objective(obj, &traj, horizon)
    }

    /// Terminal purity deficit for a given effective area.
    pub fn purity_deficit_at_area(&self, area: f64, horizon: Option<f64>) -> Result<f64> {
        let mut pulse = self.template;
        pulse.strength = PulseStrength::Area(area);
        let traj = self.simulate(pulse, horizon.unwrap_or(pulse.duration))?;
        Ok(traj.final_state().expect("nonempty").purity_deficit())
    }
}

pub fn optimize_pulse(problem: &PulseProblem, bounds: &[Bound], obj: &Objective, budget: usize) -> Result<OptResult> {
    let limits: Vec<(f64, f64)> = bounds.iter().map(|b| (b.lower, b.upper)).collect();
    let mut result = minimize_bounded(|x| problem.evaluate(obj, bounds, x), &limits, budget)?;
    result.names = bounds.iter().map(|b| b.param.name()).collect();
    Ok(result)
}

/// Minimize `f` over a box with 1–3 finite bounds.
pub fn minimize_bounded<F>(mut f: F, bounds: &[(f64, f64)], budget: usize) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    if bounds.is_empty() || bounds.len() > 3 {
        return Err(Error::InvalidOptimization(format!("need 1 to 3 free parameters, got {}", bounds.len())));
    }
    for &(lo, hi) in bounds {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidOptimization(format!("infeasible bounds [{lo}, {hi}]")));
        }
    }
    if budget == 0 {
        return Err(Error::InvalidOptimization("evaluation budget must be at least 1".into()));
    }
    let mut rec = Recorder { f: &mut f, history: Vec::new(), budget };
    let converged = if bounds.len() == 1 {
        golden_section(&mut rec, bounds[0])?
    } else {
        nelder_mead(&mut rec, bounds)?
    };
    let (best_params, best_value) = rec
        .history
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(x, v)| (x.clone(), *v))
        .expect("at least one evaluation");
    Ok(OptResult {
        names: Vec::new(),
        best_params,
        best_value,
        evaluations: rec.history.len(),
        history: rec.history,
        budget_exhausted: !converged,
    })
}

struct Recorder<'f, F> {
    f: &'f mut F,
    history: Vec<(Vec<f64>, f64)>,
    budget: usize,
}

impl<F: FnMut(&[f64]) -> Result<f64>> Recorder<'_, F> {
    fn exhausted(&self) -> bool {
        self.history.len() >= self.budget
    }

    /// `None` once the budget is spent.
    fn eval(&mut self, x: &[f64]) -> Result<Option<f64>> {
        if self.exhausted() {
            return Ok(None);
        }
        let v = (self.f)(x)?;
        self.history.push((x.to_vec(), v));
        Ok(Some(v))
    }
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Returns whether the bracket converged within the budget.
fn golden_section<F: FnMut(&[f64]) -> Result<f64>>(rec: &mut Recorder<F>, (lo, hi): (f64, f64)) -> Result<bool> {
    let xtol = 1e-6 * (hi - lo).max(1e-300);
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let Some(mut f1) = rec.eval(&[x1])? else { return Ok(false) };
    let Some(mut f2) = rec.eval(&[x2])? else { return Ok(false) };
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            match rec.eval(&[x1])? {
                Some(v) => f1 = v,
                None => return Ok(false),
            }
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            match rec.eval(&[x2])? {
                Some(v) => f2 = v,
                None => return Ok(false),
            }
        }
    }
    // A bracket collapsed onto a bound may hide a boundary optimum.
    for edge in [lo, hi] {
        if ((a - edge).abs() <= xtol || (b - edge).abs() <= xtol) && rec.eval(&[edge])?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn clamp_into(x: &mut [f64], bounds: &[(f64, f64)]) {
    for (v, &(lo, hi)) in x.iter_mut().zip(bounds) {
        *v = v.clamp(lo, hi);
    }
}

fn nelder_mead<F: FnMut(&[f64]) -> Result<f64>>(rec: &mut Recorder<F>, bounds: &[(f64, f64)]) -> Result<bool> {
    let n = bounds.len();
    let spans: Vec<f64> = bounds.iter().map(|(lo, hi)| hi - lo).collect();
    let xtol = 1e-7 * spans.iter().cloned().fold(0.0, f64::max).max(1e-300);
    let ftol = 1e-12;

    let mid: Vec<f64> = bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut x = mid.clone();
        if k > 0 {
            x[k - 1] += 0.1 * spans[k - 1];
        }
        clamp_into(&mut x, bounds);
        let Some(v) = rec.eval(&x)? else { return Ok(false) };
        simplex.push((x, v));
    }

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex
            .iter()
            .skip(1)
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread.abs() <= ftol && size <= xtol || size <= xtol * 1e-3 {
            return Ok(true);
        }

        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64).collect();
        let toward = |coef: f64, worst: &[f64]| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(worst).map(|(c, w)| c + coef * (c - w)).collect();
            clamp_into(&mut p, bounds);
            p
        };
        let worst = simplex[n].0.clone();

        let xr = toward(1.0, &worst);
        let Some(fr) = rec.eval(&xr)? else { return Ok(false) };
        if fr < simplex[0].1 {
            let xe = toward(2.0, &worst);
            let Some(fe) = rec.eval(&xe)? else { return Ok(false) };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = toward(0.5, &worst);
            let Some(fc) = rec.eval(&xc)? else { return Ok(false) };
            (xc, fc)
        } else {
            let xc = toward(-0.5, &worst);
            let Some(fc) = rec.eval(&xc)? else { return Ok(false) };
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // Shrink toward the best vertex.
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let mut x: Vec<f64> = vertex.0.iter().zip(&best).map(|(v, b)| b + 0.5 * (v - b)).collect();
            clamp_into(&mut x, bounds);
            let Some(v) = rec.eval(&x)? else { return Ok(false) };
            *vertex = (x, v);
        }
    }
}

/// Terminal purity deficits of the naive π/2 pulse and an optimized one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub naive_area: f64,
    pub naive_purity_deficit: f64,
    pub optimized_area: f64,
    pub optimized_purity_deficit: f64,
}

impl Comparison {
    pub fn optimized_not_worse(&self, tol: f64) -> bool {
        self.optimized_purity_deficit >= self.naive_purity_deficit - tol
    }
}

pub fn naive_vs_optimized_report(problem: &PulseProblem, optimized_area: f64, horizon: Option<f64>) -> Result<Comparison> {
    let naive_area = PI / 2.0;
    Ok(Comparison {
        naive_area,
        naive_purity_deficit: problem.purity_deficit_at_area(naive_area, horizon)?,
        optimized_area,
        optimized_purity_deficit: problem.purity_deficit_at_area(optimized_area, horizon)?,
    })
}
