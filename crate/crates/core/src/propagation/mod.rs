//! Time evolution of the dissipative Liouville equation.
//!
//! Two independent routes are provided: an adaptive embedded Runge–Kutta
//! 5(4) integrator in Liouville space ([`evolve`]) and exact matrix
//! exponentials for piecewise-constant drives ([`evolve_unitary`],
//! [`evolve_expm`]).

mod exact;
mod integrator;
mod pulse;
mod trajectory;

pub use exact::{evolve_expm, evolve_unitary};
pub use integrator::{evolve, IntegratorConfig};
pub use pulse::{Drive, Frame, PiecewiseConstant, PulseShape, PulseSpec, PulseStrength, Segment, Window};
pub use trajectory::Trajectory;

/// Output grid 0, dt, 2dt, … ending exactly at `horizon`.
pub fn sample_times(horizon: f64, dt_out: f64) -> Vec<f64> {
    let mut times = vec![0.0];
    if horizon <= 0.0 {
        return times;
    }
    let mut k = 1usize;
    loop {
        let t = k as f64 * dt_out;
        if t >= horizon - 1e-9 * dt_out {
            break;
        }
        times.push(t);
        k += 1;
    }
    times.push(horizon);
    times
}
