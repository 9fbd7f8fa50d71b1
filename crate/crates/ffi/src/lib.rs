//! C ABI over `dqc-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns a [`DqStatus`];
//! on failure a message is available from [`dq_last_error`] on the same
//! thread until the next failing call.
//!
//! States cross the boundary as row-major interleaved (re, im) doubles,
//! `2 * dim * dim` values long.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use dqc_core::config::{RunConfig, Scenario};
use dqc_core::liouville::Liouvillian;
use dqc_core::model::{RateModel, TwoLevelSystem};
use dqc_core::propagation::{evolve, Frame, IntegratorConfig, PulseSpec, PulseStrength, Trajectory};
use dqc_core::runner::run;
use dqc_core::states::DensityMatrix;
use dqc_core::{CMatrix, Error, C64};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ConfigError = 3,
    PhysicsError = 4,
    CheckFailed = 5,
    Panic = 6,
}

/// Two-level model with its Liouvillian, in the lab or rotating frame.
pub struct DqModel {
    system: TwoLevelSystem,
    liouvillian: Liouvillian,
    frame: Frame,
}

/// Sampled trajectory.
pub struct DqTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: DqStatus, msg: impl Into<String>) -> DqStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> DqStatus {
    let status = if e.is_config() { DqStatus::ConfigError } else { DqStatus::PhysicsError };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> DqStatus) -> DqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(DqStatus::Panic, "internal panic"),
    }
}

/// Message of the last failure on this thread, or NULL. Valid until the next
/// failing call on this thread.
#[no_mangle]
pub extern "C" fn dq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dq_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a two-level model. `rwa != 0` selects the frame rotating at the
/// transition frequency; otherwise the lab frame. Rates are angular
/// frequencies: `decay` is |2⟩→|1⟩, `excitation` |1⟩→|2⟩, `dephasing` the
/// total coherence damping.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn dq_two_level_new(
    e1: f64,
    e2: f64,
    d1: f64,
    d2: f64,
    decay: f64,
    excitation: f64,
    dephasing: f64,
    rwa: i32,
    out: *mut *mut DqModel,
) -> DqStatus {
    guard(|| {
        if out.is_null() {
            return fail(DqStatus::NullPointer, "out is null");
        }
        let build = || -> dqc_core::Result<DqModel> {
            let system = TwoLevelSystem::new(e1, e2, d1, d2)?;
            let rates = RateModel::two_level(decay, excitation, dephasing)?;
            rates.check_complete_positivity()?;
            let (sys, frame) = if rwa != 0 {
                (system.rotating_frame(system.omega()), Frame::Rwa)
            } else {
                (system.control_system(), Frame::Lab)
            };
            Ok(DqModel { system, liouvillian: Liouvillian::build(&sys, &rates)?, frame })
        };
        match build() {
            Ok(m) => {
                *out = Box::into_raw(Box::new(m));
                DqStatus::Ok
            }
            Err(e) => fail(DqStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `model` must be NULL or a handle from [`dq_two_level_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dq_model_free(model: *mut DqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn read_state(dim: usize, rho0: *const f64) -> Result<DensityMatrix, DqStatus> {
    if rho0.is_null() {
        return Err(fail(DqStatus::NullPointer, "rho0 is null"));
    }
    let raw = std::slice::from_raw_parts(rho0, 2 * dim * dim);
    let m = CMatrix::from_row_iterator(dim, dim, raw.chunks_exact(2).map(|p| C64::new(p[0], p[1])));
    DensityMatrix::new(m).map_err(|e| fail(DqStatus::InvalidArgument, e.to_string()))
}

/// Evolves `rho0` under a resonant Gaussian pulse on the x control with
/// effective area `area` (radians) lasting `duration`, sampled every
/// `dt_out` up to `horizon`. A `max_step` ≤ 0 leaves the step unbounded.
///
/// # Safety
/// `model` must be a live handle, `rho0` must point to 8 doubles and `out`
/// to writable storage for one handle.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn dq_evolve_gaussian(
    model: *const DqModel,
    rho0: *const f64,
    area: f64,
    duration: f64,
    horizon: f64,
    dt_out: f64,
    max_step: f64,
    out: *mut *mut DqTrajectory,
) -> DqStatus {
    guard(|| {
        if model.is_null() || out.is_null() {
            return fail(DqStatus::NullPointer, "model or out is null");
        }
        let model = &*model;
        let rho = match read_state(2, rho0) {
            Ok(r) => r,
            Err(s) => return s,
        };
        let pulse = PulseSpec::gaussian(0, duration, PulseStrength::Area(area), model.frame)
            .with_carrier(model.system.omega())
            .with_coupling(model.system.d1.abs());
        let cfg = IntegratorConfig { max_step: (max_step > 0.0).then_some(max_step), ..Default::default() };
        match evolve(&model.liouvillian, &vec![pulse], &rho, horizon, dt_out, &cfg) {
            Ok(inner) => {
                *out = Box::into_raw(Box::new(DqTrajectory { inner }));
                DqStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// # Safety
/// `traj` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn dq_trajectory_free(traj: *mut DqTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn dq_trajectory_len(traj: *const DqTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.len())
}

/// Hilbert-space dimension; 0 for NULL.
///
/// # Safety
/// `traj` must be NULL or a live trajectory handle.
#[no_mangle]
pub unsafe extern "C" fn dq_trajectory_dim(traj: *const DqTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.inner.dim())
}

unsafe fn sample<'a>(traj: *const DqTrajectory, k: usize) -> Result<(&'a Trajectory, usize), DqStatus> {
    let t = traj.as_ref().ok_or_else(|| fail(DqStatus::NullPointer, "trajectory is null"))?;
    if k >= t.inner.len() {
        return Err(fail(DqStatus::InvalidArgument, format!("sample {k} out of range ({})", t.inner.len())));
    }
    Ok((&t.inner, k))
}

/// Time, purity deficit and Rényi entropy of sample `k`. Any output pointer
/// may be NULL.
///
/// # Safety
/// `traj` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn dq_trajectory_sample(
    traj: *const DqTrajectory,
    k: usize,
    time: *mut f64,
    purity_deficit: *mut f64,
    renyi_entropy: *mut f64,
) -> DqStatus {
    guard(|| {
        let (t, k) = match sample(traj, k) {
            Ok(x) => x,
            Err(s) => return s,
        };
        for (p, v) in [(time, t.times[k]), (purity_deficit, t.purity_deficit[k]), (renyi_entropy, t.renyi_entropy[k])] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        DqStatus::Ok
    })
}

/// Copies ρ at sample `k` into `buf` (`2 * dim * dim` doubles, row-major
/// interleaved re/im). `len` is the buffer length in doubles.
///
/// # Safety
/// `traj` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn dq_trajectory_state(traj: *const DqTrajectory, k: usize, buf: *mut f64, len: usize) -> DqStatus {
    guard(|| {
        let (t, k) = match sample(traj, k) {
            Ok(x) => x,
            Err(s) => return s,
        };
        if buf.is_null() {
            return fail(DqStatus::NullPointer, "buf is null");
        }
        let n = t.dim();
        if len < 2 * n * n {
            return fail(DqStatus::InvalidArgument, format!("buffer holds {len} doubles, need {}", 2 * n * n));
        }
        let out = std::slice::from_raw_parts_mut(buf, 2 * n * n);
        let m = t.states[k].matrix();
        for i in 0..n {
            for j in 0..n {
                out[2 * (i * n + j)] = m[(i, j)].re;
                out[2 * (i * n + j) + 1] = m[(i, j)].im;
            }
        }
        DqStatus::Ok
    })
}

/// 1 − Tr ρ² of a state given as `2 * dim * dim` interleaved doubles.
///
/// # Safety
/// `rho` must point to `2 * dim * dim` doubles and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn dq_purity_deficit(rho: *const f64, dim: usize, out: *mut f64) -> DqStatus {
    guard(|| {
        if out.is_null() {
            return fail(DqStatus::NullPointer, "out is null");
        }
        if dim == 0 {
            return fail(DqStatus::InvalidArgument, "dim must be positive");
        }
        match read_state(dim, rho) {
            Ok(r) => {
                *out = r.purity_deficit();
                DqStatus::Ok
            }
            Err(s) => s,
        }
    })
}

/// Runs a config file as the CLI would. `scenario` is one of "simulate",
/// "optimize", "pump", "check". `out_dir` may be NULL to use the config's
/// directory. A failing check returns `CheckFailed`.
///
/// # Safety
/// `path` and `scenario` must be NUL-terminated strings; `out_dir` NULL or
/// NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dq_run_config(path: *const c_char, scenario: *const c_char, out_dir: *const c_char) -> DqStatus {
    guard(|| {
        if path.is_null() || scenario.is_null() {
            return fail(DqStatus::NullPointer, "path or scenario is null");
        }
        let (Ok(path), Ok(name)) = (CStr::from_ptr(path).to_str(), CStr::from_ptr(scenario).to_str()) else {
            return fail(DqStatus::InvalidArgument, "arguments must be UTF-8");
        };
        let scenario = match name {
            "simulate" => Scenario::Simulate,
            "optimize" => Scenario::Optimize,
            "pump" => Scenario::Pump,
            "check" => Scenario::Check,
            other => return fail(DqStatus::InvalidArgument, format!("unknown scenario {other:?}")),
        };
        let dir = if out_dir.is_null() {
            None
        } else {
            match CStr::from_ptr(out_dir).to_str() {
                Ok(d) => Some(Path::new(d)),
                Err(_) => return fail(DqStatus::InvalidArgument, "out_dir must be UTF-8"),
            }
        };
        let result = RunConfig::load(Path::new(path)).and_then(|cfg| run(&cfg, scenario, dir));
        match result {
            Ok((outcome, _)) if outcome.passed => DqStatus::Ok,
            Ok((outcome, _)) => fail(DqStatus::CheckFailed, outcome.summary.join("\n")),
            Err(e) => from_core(e),
        }
    })
}
