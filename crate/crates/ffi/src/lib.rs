//! C ABI over `ibfem`.
//!
//! Objects cross the boundary as opaque pointers created by `*_new` /
//! `*_parse` / `*_run` functions and released by the matching `*_free`.
//! Every fallible function returns an [`IbfemStatus`]; the message of the
//! most recent failure on the calling thread is available from
//! [`ibfem_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ibfem::config::{parse_config, StudyConfig};
use ibfem::kernel::{DeltaKernel, ProfileKind};
use ibfem::report::{emit_report, ReportFormat};
use ibfem::study::{run_jump, run_study, StudyResult};
use ibfem::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbfemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ConfigError = 3,
    BoundaryTooClose = 4,
    SolverBreakdown = 5,
    NumericError = 6,
    IoError = 7,
    OutOfRange = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbfemProfile {
    Cosine = 0,
    Hat = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IbfemFormat {
    Csv = 0,
    Markdown = 1,
}

/// One row of a rate table. `rates` is meaningful only when `has_rates` is
/// nonzero (it is zero on the coarsest level).
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IbfemRateRow {
    pub h: f64,
    pub errors: [f64; 3],
    pub rates: [f64; 3],
    pub has_rates: i32,
}

pub struct IbfemConfig(StudyConfig);
pub struct IbfemStudy(StudyResult);
pub struct IbfemKernel(DeltaKernel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> IbfemStatus {
    match err {
        Error::Config { .. } | Error::BoundaryData { .. } | Error::NonHalvingLevels { .. } => IbfemStatus::ConfigError,
        Error::BoundaryTooClose { .. } => IbfemStatus::BoundaryTooClose,
        Error::SolverBreakdown { .. } => IbfemStatus::SolverBreakdown,
        Error::Io(_) => IbfemStatus::IoError,
        Error::IndexOutOfRange { .. } | Error::PointOutsideDomain { .. } => IbfemStatus::OutOfRange,
        Error::DegenerateParametrization { .. } | Error::InvalidArgument(_) => IbfemStatus::NumericError,
    }
}

/// Runs `f`, recording errors and converting panics into `Panic`.
fn guard(f: impl FnOnce() -> Result<(), (IbfemStatus, String)>) -> IbfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IbfemStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside ibfem".into());
            IbfemStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (IbfemStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (IbfemStatus, String) {
    (IbfemStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (IbfemStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (IbfemStatus::InvalidUtf8, format!("`{what}` is not valid UTF-8")))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ibfem_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ibfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses a TOML study configuration; an empty string gives the defaults.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_config_parse(text: *const c_char, out: *mut *mut IbfemConfig) -> IbfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = str_arg(text, "text")?;
        let cfg = parse_config(text).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(IbfemConfig(cfg)));
        Ok(())
    })
}

/// Replaces the mesh ladder, e.g. `{10, 20, 40}`.
///
/// # Safety
/// `cfg` must come from [`ibfem_config_parse`]; `levels` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn ibfem_config_set_levels(cfg: *mut IbfemConfig, levels: *const usize, len: usize) -> IbfemStatus {
    guard(|| {
        let cfg = cfg.as_mut().ok_or_else(|| null("cfg"))?;
        if levels.is_null() {
            return Err(null("levels"));
        }
        let mut next = cfg.0.clone();
        next.levels = std::slice::from_raw_parts(levels, len).to_vec();
        next.validate().map_err(lib_err)?;
        cfg.0 = next;
        Ok(())
    })
}

/// # Safety
/// `cfg` must be NULL or a pointer from [`ibfem_config_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ibfem_config_free(cfg: *mut IbfemConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Runs the convergence study described by `cfg`.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_run(cfg: *const IbfemConfig, out: *mut *mut IbfemStudy) -> IbfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let res = run_study(&cfg.0).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(IbfemStudy(res)));
        Ok(())
    })
}

/// Number of norm orders (tables) in a study.
///
/// # Safety
/// `study` must be NULL or a live study handle.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_num_tables(study: *const IbfemStudy) -> usize {
    study.as_ref().map_or(0, |s| s.0.reports.len())
}

/// Number of levels (rows per table).
///
/// # Safety
/// `study` must be NULL or a live study handle.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_num_rows(study: *const IbfemStudy) -> usize {
    study.as_ref().map_or(0, |s| s.0.levels.len())
}

/// Norm order `r` of table `table`.
///
/// # Safety
/// `study` must be a live study handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_norm_order(study: *const IbfemStudy, table: usize, out: *mut f64) -> IbfemStatus {
    guard(|| {
        let s = study.as_ref().ok_or_else(|| null("study"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rep = s.0.reports.get(table).ok_or_else(|| range("table", table))?;
        *out = rep.r;
        Ok(())
    })
}

fn range(what: &str, i: usize) -> (IbfemStatus, String) {
    (IbfemStatus::OutOfRange, format!("{what} index {i} out of range"))
}

/// # Safety
/// `study` must be a live study handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_row(
    study: *const IbfemStudy,
    table: usize,
    row: usize,
    out: *mut IbfemRateRow,
) -> IbfemStatus {
    guard(|| {
        let s = study.as_ref().ok_or_else(|| null("study"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let rep = s.0.reports.get(table).ok_or_else(|| range("table", table))?;
        let r = rep.rows.get(row).ok_or_else(|| range("row", row))?;
        *out = IbfemRateRow {
            h: r.h,
            errors: r.errors,
            rates: r.rates.unwrap_or([0.0; 3]),
            has_rates: i32::from(r.rates.is_some()),
        };
        Ok(())
    })
}

/// Renders the study as CSV or markdown into a new string that the caller
/// releases with [`ibfem_string_free`].
///
/// # Safety
/// `study` must be a live study handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_report(
    study: *const IbfemStudy,
    format: IbfemFormat,
    out: *mut *mut c_char,
) -> IbfemStatus {
    guard(|| {
        let s = study.as_ref().ok_or_else(|| null("study"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let fmt = match format {
            IbfemFormat::Csv => ReportFormat::Csv,
            IbfemFormat::Markdown => ReportFormat::Markdown,
        };
        let text = CString::new(emit_report(&s.0, fmt)).map_err(|e| (IbfemStatus::InvalidUtf8, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `study` must be NULL or a live study handle.
#[no_mangle]
pub unsafe extern "C" fn ibfem_study_free(study: *mut IbfemStudy) {
    if !study.is_null() {
        drop(Box::from_raw(study));
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ibfem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves level `n` of `cfg` and probes the pressure jump across the circle.
///
/// # Safety
/// `cfg` must be a live config handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_pressure_jump(cfg: *const IbfemConfig, n: usize, out: *mut f64) -> IbfemStatus {
    guard(|| {
        let cfg = cfg.as_ref().ok_or_else(|| null("cfg"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let (_, jump) = run_jump(&cfg.0, n).map_err(lib_err)?;
        *out = jump;
        Ok(())
    })
}

/// Regularized delta kernel of width `epsilon` in dimension `dim`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ibfem_kernel_new(
    profile: IbfemProfile,
    epsilon: f64,
    dim: usize,
    out: *mut *mut IbfemKernel,
) -> IbfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match profile {
            IbfemProfile::Cosine => ProfileKind::Cosine,
            IbfemProfile::Hat => ProfileKind::Hat,
        };
        let k = DeltaKernel::new(kind, epsilon, dim).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(IbfemKernel(k)));
        Ok(())
    })
}

/// Evaluates the kernel at `y[0..len]`; `len` must equal the kernel dimension.
///
/// # Safety
/// `kernel` must be live, `y` must point to `len` values and `out` be valid.
#[no_mangle]
pub unsafe extern "C" fn ibfem_kernel_eval(
    kernel: *const IbfemKernel,
    y: *const f64,
    len: usize,
    out: *mut f64,
) -> IbfemStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        if y.is_null() {
            return Err(null("y"));
        }
        if len != k.0.dim {
            return Err((
                IbfemStatus::OutOfRange,
                format!("expected {} coordinates, got {len}", k.0.dim),
            ));
        }
        *out = k.0.evaluate(std::slice::from_raw_parts(y, len));
        Ok(())
    })
}

/// Zeroth moment of the kernel (one up to quadrature error).
///
/// # Safety
/// `kernel` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn ibfem_kernel_moment(kernel: *const IbfemKernel, out: *mut f64) -> IbfemStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| null("kernel"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = k.0.moment_zero();
        Ok(())
    })
}

/// # Safety
/// `kernel` must be NULL or a live kernel handle.
#[no_mangle]
pub unsafe extern "C" fn ibfem_kernel_free(kernel: *mut IbfemKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}
