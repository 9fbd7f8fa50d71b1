use super::pulse::{Drive, Window};
use super::{sample_times, Trajectory};
use crate::liouville::{unvec, vec_of, Liouvillian};
use crate::states::DensityMatrix;
use crate::{CMatrix, CVector, Error, Result, C64, I};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub atol: f64,
    pub rtol: f64,
    /// Upper bound on the step; required to resolve a lab-frame carrier.
    pub max_step: Option<f64>,
    /// Steps below this (or below round-off at the current time) abort.
    pub min_step: f64,
    /// Allowed negativity of ρ at output samples.
    pub positivity_tol: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { atol: 1e-9, rtol: 1e-9, max_step: None, min_step: 0.0, positivity_tol: 1e-7 }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
// B − B̂ (embedded fourth-order weights).
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Rhs<'a, D: Drive + ?Sized> {
    free: CMatrix,
    controls: Vec<CMatrix>,
    drive: &'a D,
    fields: Vec<f64>,
}

impl<D: Drive + ?Sized> Rhs<'_, D> {
    fn eval(&mut self, t: f64, window: Window, y: &CVector, out: &mut CVector) {
        self.drive.fields(t, window, &mut self.fields);
        out.gemv(C64::new(1.0, 0.0), &self.free, y, C64::new(0.0, 0.0));
        for (f, g) in self.fields.iter().zip(&self.controls) {
            if *f != 0.0 {
                out.gemv(C64::new(*f, 0.0), g, y, C64::new(1.0, 0.0));
            }
        }
    }
}

/// Integrate d|ρ⟩/dt = −i[L₀ + Σ f_m(t) L_m + iL_D]|ρ⟩ from t = 0 to
/// `horizon`, sampling every `dt_out`.
pub fn evolve<D: Drive + ?Sized>(
    l: &Liouvillian,
    drive: &D,
    rho0: &DensityMatrix,
    horizon: f64,
    dt_out: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let n = l.dim();
    if rho0.dim() != n {
        return Err(Error::Dimension { expected: n, got: rho0.dim() });
    }
    if !(horizon.is_finite() && horizon >= 0.0 && dt_out.is_finite() && dt_out > 0.0) {
        return Err(Error::InvalidSystem("horizon and output step must be positive".into()));
    }
    drive.validate(l.num_controls())?;

    let mut rhs = Rhs {
        free: l.drift().map(|z| -I * z) + l.dissipative(),
        controls: l.controls().iter().map(|m| m.map(|z| -I * z)).collect(),
        drive,
        fields: vec![0.0; l.num_controls()],
    };

    let outputs = sample_times(horizon, dt_out);
    let mut stops: Vec<f64> = outputs.clone();
    stops.extend(drive.breakpoints().into_iter().filter(|&b| b > 0.0 && b < horizon));
    stops.sort_by(f64::total_cmp);
    stops.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));

    let mut y = vec_of(rho0.matrix());
    let mut traj = Trajectory::default();
    traj.push(0.0, rho0.clone());

    let scale = rhs.free.camax().max(1e-300);
    let mut h = (0.05 / scale).min(cfg.max_step.unwrap_or(f64::INFINITY));
    let mut t = 0.0;
    let mut out_iter = outputs.iter().skip(1).peekable();

    let dim2 = n * n;
    let mut k: Vec<CVector> = (0..7).map(|_| CVector::zeros(dim2)).collect();
    let mut stage = CVector::zeros(dim2);

    for &stop in stops.iter().skip(1) {
        let window = Window { start: t, end: stop };
        while t < stop {
            let remaining = stop - t;
            let mut step = h.min(remaining);
            if let Some(m) = cfg.max_step {
                step = step.min(m);
            }
            // Avoid a sliver step right before the stop.
            if remaining - step < 1e-10 * remaining.max(1.0) {
                step = remaining;
            }
            let floor = cfg.min_step.max(16.0 * f64::EPSILON * t.abs().max(1.0));
            if step < floor {
                return Err(Error::StepUnderflow { t, h: step });
            }

            for s in 0..7 {
                stage.copy_from(&y);
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        stage.axpy(C64::new(step * A[s][j], 0.0), kj, C64::new(1.0, 0.0));
                    }
                }
                let ts = if s == 6 || C[s] == 1.0 { t + step } else { t + C[s] * step };
                let mut ks = std::mem::replace(&mut k[s], CVector::zeros(0));
                rhs.eval(ts.min(stop), window, &stage, &mut ks);
                k[s] = ks;
            }

            let mut y_new = y.clone();
            let mut err_sq = 0.0;
            for i in 0..dim2 {
                let mut dy = C64::new(0.0, 0.0);
                let mut e = C64::new(0.0, 0.0);
                for s in 0..7 {
                    dy += k[s][i] * B[s];
                    e += k[s][i] * E[s];
                }
                y_new[i] += dy * step;
                let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
                err_sq += ((e * step).norm() / sc).powi(2);
            }
            let err = (err_sq / dim2 as f64).sqrt();
            if !err.is_finite() {
                return Err(Error::StepUnderflow { t, h: step });
            }

            if err <= 1.0 {
                t = if step == remaining { stop } else { t + step };
                y = y_new;
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // Do not let a short final step to a stop shrink h.
                h = (step * grow).max(h.min(step * 5.0));
            } else {
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }

        if out_iter.peek().is_some_and(|&&o| (o - stop).abs() <= 1e-12 * stop.abs().max(1.0)) {
            let o = *out_iter.next().expect("peeked");
            let rho = DensityMatrix::from_matrix(unvec(&y, n)).expect("square");
            let report = rho.validate(cfg.positivity_tol);
            if report.min_eigenvalue < -cfg.positivity_tol {
                return Err(Error::Positivity { t: o, min_eigenvalue: report.min_eigenvalue });
            }
            traj.push(o, rho);
        }
    }
    Ok(traj)
}
