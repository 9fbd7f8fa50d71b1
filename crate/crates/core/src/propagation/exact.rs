use nalgebra::SymmetricEigen;

use super::pulse::{Drive, PiecewiseConstant, Window};
use super::{sample_times, Trajectory};
use crate::liouville::{unvec, vec_of, Liouvillian};
use crate::model::ControlSystem;
use crate::states::DensityMatrix;
use crate::{CMatrix, Error, Result, C64};

/// Stops = output samples ∪ segment boundaries, in order.
fn stops(drive: &PiecewiseConstant, horizon: f64, dt_out: f64) -> (Vec<f64>, Vec<f64>) {
    let outputs = sample_times(horizon, dt_out);
    let mut all = outputs.clone();
    all.extend(drive.breakpoints().into_iter().filter(|&b| b > 0.0 && b < horizon));
    all.sort_by(f64::total_cmp);
    all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    (outputs, all)
}

fn is_output(outputs: &[f64], t: f64) -> bool {
    outputs.iter().any(|&o| (o - t).abs() <= 1e-12 * t.abs().max(1.0))
}

/// Closed-system evolution ρ(t) = U ρ₀ U† with U = exp(−iHτ) per segment,
/// computed from the Hermitian eigendecomposition of each segment's H.
/// Sampled every `dt_out` over the drive's total duration.
pub fn evolve_unitary(
    sys: &ControlSystem,
    drive: &PiecewiseConstant,
    rho0: &DensityMatrix,
    dt_out: f64,
) -> Result<Trajectory> {
    if rho0.dim() != sys.dim() {
        return Err(Error::Dimension { expected: sys.dim(), got: rho0.dim() });
    }
    drive.validate(sys.num_controls())?;
    let horizon = drive.total_duration();
    let (outputs, all) = stops(drive, horizon, dt_out);

    let mut fields = vec![0.0; sys.num_controls()];
    let mut rho = rho0.matrix().clone();
    let mut traj = Trajectory::default();
    traj.push(0.0, rho0.clone());
    let mut t = 0.0;
    for &stop in all.iter().skip(1) {
        drive.fields(t, Window { start: t, end: stop }, &mut fields);
        let eig = SymmetricEigen::new(sys.total_hamiltonian(&fields)?);
        let phases = eig.eigenvalues.map(|e| C64::from_polar(1.0, -e * (stop - t)));
        let u: CMatrix = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
        rho = &u * rho * u.adjoint();
        t = stop;
        if is_output(&outputs, t) {
            traj.push(t, DensityMatrix::from_matrix(rho.clone())?);
        }
    }
    Ok(traj)
}

/// Open-system evolution by exact Liouville-space exponentials exp(G τ) of
/// the generator over each constant piece.
pub fn evolve_expm(
    l: &Liouvillian,
    drive: &PiecewiseConstant,
    rho0: &DensityMatrix,
    horizon: f64,
    dt_out: f64,
) -> Result<Trajectory> {
    if rho0.dim() != l.dim() {
        return Err(Error::Dimension { expected: l.dim(), got: rho0.dim() });
    }
    drive.validate(l.num_controls())?;
    let (outputs, all) = stops(drive, horizon, dt_out);

    let mut fields = vec![0.0; l.num_controls()];
    let mut v = vec_of(rho0.matrix());
    let mut traj = Trajectory::default();
    traj.push(0.0, rho0.clone());
    let mut t = 0.0;
    for &stop in all.iter().skip(1) {
        drive.fields(t, Window { start: t, end: stop }, &mut fields);
        let g = l.generator(&fields)?.map(|z| z * (stop - t));
        v = g.exp() * v;
        t = stop;
        if is_output(&outputs, t) {
            traj.push(t, DensityMatrix::from_matrix(unvec(&v, l.dim()))?);
        }
    }
    Ok(traj)
}
