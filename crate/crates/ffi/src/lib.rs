//! C ABI over `fbo2d`.
//!
//! Fields and reports cross the boundary as opaque handles owned by the
//! caller and released with the matching `*_free`. Every entry point returns
//! an [`Fbo2dStatus`]; on failure the message is kept per thread and can be
//! copied out with [`fbo2d_last_error`]. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use fbo2d::cli::{run_experiment, ExperimentConfig, Kind};
use fbo2d::evolution::{solve_ivp, SolverConfig};
use fbo2d::estimates::oscillatory_j;
use fbo2d::propagator::propagate;
use fbo2d::report::NormReport;
use fbo2d::spectral::{forward_transform, GridSpec, SpectralField};
use fbo2d::Error;

/// Result code of every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fbo2dStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    GridMismatch = 3,
    NonHermitian = 4,
    NumericalFailure = 5,
    Io = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Spectral field on a periodic grid.
pub struct Fbo2dField {
    inner: SpectralField,
}

/// Experiment report: table, fitted constants and verdicts.
pub struct Fbo2dReport {
    inner: NormReport,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(e: &Error) -> Fbo2dStatus {
    match e {
        Error::InvalidGrid(_) | Error::DimensionMismatch { .. } | Error::InvalidParameter { .. } => {
            Fbo2dStatus::InvalidArgument
        }
        Error::Precondition(_) | Error::Json(_) => Fbo2dStatus::InvalidArgument,
        Error::GridMismatch { .. } => Fbo2dStatus::GridMismatch,
        Error::NonHermitian { .. } => Fbo2dStatus::NonHermitian,
        Error::Io(_) | Error::Csv(_) | Error::Snapshot(_) => Fbo2dStatus::Io,
        _ => Fbo2dStatus::NumericalFailure,
    }
}

/// Runs `f`, recording errors and converting panics.
fn guard(f: impl FnOnce() -> Result<(), (Fbo2dStatus, String)>) -> Fbo2dStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => Fbo2dStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            Fbo2dStatus::Panic
        }
    }
}

fn lift<T>(r: fbo2d::Result<T>) -> Result<T, (Fbo2dStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (Fbo2dStatus, String) {
    (Fbo2dStatus::NullPointer, format!("{what} is null"))
}

unsafe fn field_ref<'a>(p: *const Fbo2dField) -> Result<&'a SpectralField, (Fbo2dStatus, String)> {
    p.as_ref().map(|f| &f.inner).ok_or_else(|| null("field"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (Fbo2dStatus, String)> {
    if out.is_null() {
        return Err(null("output handle"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (Fbo2dStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (Fbo2dStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copies `bytes` plus a NUL into `buf`. `needed` (if non-null) receives
/// the full length including the NUL.
unsafe fn copy_out(bytes: &[u8], buf: *mut c_char, cap: usize, needed: *mut usize) -> Result<(), (Fbo2dStatus, String)> {
    if !needed.is_null() {
        *needed = bytes.len() + 1;
    }
    if buf.is_null() || cap < bytes.len() + 1 {
        return Err((Fbo2dStatus::BufferTooSmall, format!("need {} bytes", bytes.len() + 1)));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), bytes.len());
    *buf.add(bytes.len()) = 0;
    Ok(())
}

/// Copies the calling thread's last error message (NUL-terminated) into
/// `buf`. Returns the message length without the NUL; nothing is written
/// when `cap` is too small.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && cap > msg.len() {
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), msg.len());
            *buf.add(msg.len()) = 0;
        }
        msg.len()
    })
}

/// Builds a field from `nx * ny` real samples in row-major `iy * nx + ix`
/// order on the box `[0, lx) x [0, ly)`.
///
/// # Safety
/// `samples` must be valid for `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_field_from_samples(
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    samples: *const f64,
    len: usize,
    out: *mut *mut Fbo2dField,
) -> Fbo2dStatus {
    guard(|| {
        if samples.is_null() {
            return Err(null("samples"));
        }
        let grid = lift(GridSpec::new(nx, ny, lx, ly))?;
        let data = std::slice::from_raw_parts(samples, len);
        let inner = lift(forward_transform(&grid, data))?;
        put(out, Fbo2dField { inner })
    })
}

/// Releases a field; null is ignored.
///
/// # Safety
/// `field` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_field_free(field: *mut Fbo2dField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Grid size of a field.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_field_shape(field: *const Fbo2dField, nx: *mut usize, ny: *mut usize) -> Fbo2dStatus {
    guard(|| {
        let f = field_ref(field)?;
        if nx.is_null() || ny.is_null() {
            return Err(null("shape output"));
        }
        *nx = f.grid.nx;
        *ny = f.grid.ny;
        Ok(())
    })
}

/// Writes the real samples of `field` into `out` (`len` must equal
/// `nx * ny`). Fails with `NonHermitian` if the field is not real.
///
/// # Safety
/// `out` must be valid for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_field_samples(field: *const Fbo2dField, out: *mut f64, len: usize) -> Fbo2dStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("samples output"));
        }
        if len != f.grid.len() {
            return Err((
                Fbo2dStatus::InvalidArgument,
                format!("buffer holds {len} values, field has {}", f.grid.len()),
            ));
        }
        let real = lift(f.to_real())?;
        ptr::copy_nonoverlapping(real.samples.as_ptr(), out, len);
        Ok(())
    })
}

/// `‖u‖_{L²}` of the field.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_field_l2(field: *const Fbo2dField, out: *mut f64) -> Fbo2dStatus {
    guard(|| {
        let f = field_ref(field)?;
        if out.is_null() {
            return Err(null("l2 output"));
        }
        *out = f.l2();
        Ok(())
    })
}

/// Free linear flow `U(t)` of order `alpha` applied to `field`.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_propagate(
    field: *const Fbo2dField,
    t: f64,
    alpha: f64,
    out: *mut *mut Fbo2dField,
) -> Fbo2dStatus {
    guard(|| {
        let f = field_ref(field)?;
        if !(alpha > 0.0 && alpha <= 1.0) || !t.is_finite() {
            return Err((Fbo2dStatus::InvalidArgument, format!("need finite t and alpha in (0, 1], got t = {t}, alpha = {alpha}")));
        }
        put(out, Fbo2dField { inner: propagate(f, t, alpha) })
    })
}

/// Integrates the full (or, with `nonlinear == 0`, the linear) equation from
/// `field` to `t_end` with step `dt` and returns the final field.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_solve(
    field: *const Fbo2dField,
    alpha: f64,
    t_end: f64,
    dt: f64,
    nonlinear: i32,
    out: *mut *mut Fbo2dField,
) -> Fbo2dStatus {
    guard(|| {
        let f = field_ref(field)?;
        let cfg = SolverConfig {
            nonlinear: nonlinear != 0,
            ..SolverConfig::default()
        };
        let traj = lift(solve_ivp(f, alpha, t_end, dt, &cfg))?;
        put(out, Fbo2dField { inner: traj.final_field().clone() })
    })
}

/// `J(λ)` for order `alpha`, with its extrapolation residual.
///
/// # Safety
/// Output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_oscillatory_j(
    lambda: f64,
    alpha: f64,
    re: *mut f64,
    im: *mut f64,
    residual: *mut f64,
) -> Fbo2dStatus {
    guard(|| {
        if re.is_null() || im.is_null() || residual.is_null() {
            return Err(null("J output"));
        }
        let j = lift(oscillatory_j(lambda, alpha))?;
        *re = j.value.re;
        *im = j.value.im;
        *residual = j.residual;
        Ok(())
    })
}

/// Runs experiment `kind` (e.g. `"illposed"`) with a flat JSON config and
/// returns its report. No files are written.
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_run_experiment(
    kind: *const c_char,
    config_json: *const c_char,
    out: *mut *mut Fbo2dReport,
) -> Fbo2dStatus {
    guard(|| {
        let name = str_arg(kind, "kind")?;
        let k = Kind::from_name(name)
            .ok_or_else(|| (Fbo2dStatus::InvalidArgument, format!("unknown experiment `{name}`")))?;
        let cfg = lift(ExperimentConfig::parse(str_arg(config_json, "config")?, k))?;
        let outcome = lift(run_experiment(k, &cfg))?;
        put(out, Fbo2dReport { inner: outcome.report })
    })
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `report` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_report_free(report: *mut Fbo2dReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// 1 if every verdict passed, else 0.
///
/// # Safety
/// Pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_report_all_pass(report: *const Fbo2dReport, out: *mut i32) -> Fbo2dStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("pass output"));
        }
        *out = i32::from(r.inner.all_pass());
        Ok(())
    })
}

/// Fitted constant `key` of the report.
///
/// # Safety
/// `key` must be NUL-terminated; pointers must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_report_fitted(report: *const Fbo2dReport, key: *const c_char, out: *mut f64) -> Fbo2dStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let k = str_arg(key, "key")?;
        if out.is_null() {
            return Err(null("value output"));
        }
        *out = *r
            .inner
            .fitted
            .get(k)
            .ok_or_else(|| (Fbo2dStatus::InvalidArgument, format!("report has no fitted value `{k}`")))?;
        Ok(())
    })
}

/// CSV body of the report. With a null or short `buf`, returns
/// `BufferTooSmall` and stores the required size in `needed`.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn fbo2d_report_csv(
    report: *const Fbo2dReport,
    buf: *mut c_char,
    cap: usize,
    needed: *mut usize,
) -> Fbo2dStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let csv = lift(r.inner.to_csv())?;
        copy_out(csv.as_bytes(), buf, cap, needed)
    })
}
