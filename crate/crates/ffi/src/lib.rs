//! C ABI over `qepot`.
//!
//! Every entry point returns a [`QepotStatus`]. On failure the message is kept
//! per thread and read with [`qepot_last_error`]. Handles come from the
//! constructors and are released with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qepot::effective::{evaluate_method, CurvaturePolicy, FhConvention, Method, MethodOptions};
use qepot::model::{oh_spectroscopy, units::UnitTable, Grid, Potential, ThermoState};
use qepot::oracle::{converge_on, ConvergeOptions};
use qepot::scenario::{parse_config, run_all, write_outputs};
use qepot::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QepotStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Config = 4,
    Io = 5,
    BufferTooSmall = 6,
    ThresholdFailed = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QepotMethod {
    Classical = 0,
    FeynmanHibbs = 1,
    FeynmanKleinert = 2,
    LhBare = 3,
    LhRenormalized = 4,
    LhMapped = 5,
}

impl From<QepotMethod> for Method {
    fn from(m: QepotMethod) -> Self {
        match m {
            QepotMethod::Classical => Method::Classical,
            QepotMethod::FeynmanHibbs => Method::FeynmanHibbs,
            QepotMethod::FeynmanKleinert => Method::FeynmanKleinert,
            QepotMethod::LhBare => Method::LhBare,
            QepotMethod::LhRenormalized => Method::LhRenormalized,
            QepotMethod::LhMapped => Method::LhMapped,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QepotFhConvention {
    /// a^2 = beta hbar^2 / 12m
    Twelfth = 0,
    /// a^2 = beta hbar^2 / 3m
    Third = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QepotPolicy {
    Clamp = 0,
    Continuation = 1,
}

/// Method options. `cap` is read only under `Continuation`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QepotOptions {
    pub fh_convention: QepotFhConvention,
    pub policy: QepotPolicy,
    pub cap: f64,
}

impl QepotOptions {
    fn to_core(self) -> MethodOptions {
        MethodOptions {
            fh_convention: match self.fh_convention {
                QepotFhConvention::Twelfth => FhConvention::Twelfth,
                QepotFhConvention::Third => FhConvention::Third,
            },
            policy: match self.policy {
                QepotPolicy::Clamp => CurvaturePolicy::ClampToZero,
                QepotPolicy::Continuation => CurvaturePolicy::ContinuationCapped { cap: self.cap },
            },
        }
    }
}

/// Opaque potential.
pub struct QepotPotential(Potential);

/// Opaque table: grid, density, effective potential and ln Z.
pub struct QepotTable {
    grid: Grid,
    density: Vec<f64>,
    v_eff: Vec<f64>,
    ln_z: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn status_of(e: &Error) -> QepotStatus {
    match e {
        Error::InvalidParameter(_) | Error::GridMismatch(_) | Error::ModeMismatch(_) => QepotStatus::InvalidArgument,
        Error::Config { .. } | Error::ConfigKey { .. } => QepotStatus::Config,
        Error::Io(_) => QepotStatus::Io,
        Error::Context { source, .. } => status_of(source),
        _ => QepotStatus::Numerical,
    }
}

fn guard(body: impl FnOnce() -> Result<(), QepotStatus>) -> QepotStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            QepotStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            QepotStatus::Panic
        }
    }
}

fn fail(e: Error) -> QepotStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> QepotStatus {
    set_error(format!("{what} is null"));
    QepotStatus::NullPointer
}

unsafe fn out_handle<T>(out: *mut *mut T, make: impl FnOnce() -> qepot::Result<T>) -> Result<(), QepotStatus> {
    if out.is_null() {
        return Err(null("out"));
    }
    let value = make().map_err(fail)?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, what: &str) -> Result<&'a str, QepotStatus> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        QepotStatus::InvalidArgument
    })
}

/// Message for the last failed call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn qepot_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qepot_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[no_mangle]
pub extern "C" fn qepot_options_default() -> QepotOptions {
    QepotOptions {
        fh_convention: QepotFhConvention::Twelfth,
        policy: QepotPolicy::Clamp,
        cap: qepot::scenario::config::DEFAULT_CONTINUATION_CAP,
    }
}

/// `m w^2 x^2 / 2 + g x^4 / 4`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_harmonic_quartic(
    mass: f64,
    omega: f64,
    g: f64,
    out: *mut *mut QepotPotential,
) -> QepotStatus {
    guard(|| out_handle(out, || Potential::harmonic_quartic(mass, omega, g).map(QepotPotential)))
}

/// Symmetric double well `-m w^2 x^2 / 2 + g x^4 / 4 + m w^4 / (16 g)`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_double_well(
    mass: f64,
    omega: f64,
    g: f64,
    out: *mut *mut QepotPotential,
) -> QepotStatus {
    guard(|| out_handle(out, || Potential::double_well(mass, omega, g).map(QepotPotential)))
}

/// `D (1 - exp(-alpha (x - x_e)))^2` in Hartree and bohr.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_morse(
    d: f64,
    alpha: f64,
    x_e: f64,
    out: *mut *mut QepotPotential,
) -> QepotStatus {
    guard(|| out_handle(out, || Potential::morse(d, alpha, x_e).map(QepotPotential)))
}

/// OH stretch Morse potential; writes the reduced mass (electron masses) to
/// `mass` when it is not null.
///
/// # Safety
/// `out` must be valid for a write; `mass` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_morse_oh(out: *mut *mut QepotPotential, mass: *mut f64) -> QepotStatus {
    guard(|| {
        let spec = oh_spectroscopy();
        out_handle(out, || Potential::morse_from_spectroscopy(spec).map(QepotPotential))?;
        if !mass.is_null() {
            *mass = UnitTable::ATOMIC.amu_to_me(spec.reduced_mass_amu);
        }
        Ok(())
    })
}

/// `sum_k c[k] x^k` for `k < len`.
///
/// # Safety
/// `coefficients` must point to `len` readable doubles; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_monomial_sum(
    coefficients: *const f64,
    len: usize,
    out: *mut *mut QepotPotential,
) -> QepotStatus {
    guard(|| {
        if coefficients.is_null() {
            return Err(null("coefficients"));
        }
        let c = std::slice::from_raw_parts(coefficients, len).to_vec();
        out_handle(out, || Potential::monomial_sum(c).map(QepotPotential))
    })
}

/// # Safety
/// `potential` must come from a constructor above and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_free(potential: *mut QepotPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

/// # Safety
/// `potential` must be a live handle; `value` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_potential_value(
    potential: *const QepotPotential,
    x: f64,
    value: *mut f64,
) -> QepotStatus {
    guard(|| {
        let p = potential.as_ref().ok_or_else(|| null("potential"))?;
        if value.is_null() {
            return Err(null("value"));
        }
        *value = p.0.value(x);
        Ok(())
    })
}

fn setup(beta: f64, mass: f64, x_min: f64, x_max: f64, n_points: usize) -> qepot::Result<(ThermoState, Grid)> {
    Ok((ThermoState::new(beta, mass)?, Grid::new(x_min, x_max, n_points)?))
}

/// Tabulate one effective-potential method on `n_points` nodes of
/// `[x_min, x_max]`. `options` may be null for the defaults.
///
/// # Safety
/// `potential` must be a live handle, `options` null or readable, `out` valid
/// for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_evaluate(
    potential: *const QepotPotential,
    method: QepotMethod,
    beta: f64,
    mass: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    options: *const QepotOptions,
    out: *mut *mut QepotTable,
) -> QepotStatus {
    guard(|| {
        let p = potential.as_ref().ok_or_else(|| null("potential"))?;
        let opts = options
            .as_ref()
            .copied()
            .unwrap_or_else(|| qepot_options_default())
            .to_core();
        out_handle(out, || {
            let (thermo, grid) = setup(beta, mass, x_min, x_max, n_points)?;
            let t = evaluate_method(method.into(), &p.0, &thermo, &grid, &opts)?;
            Ok(QepotTable {
                grid,
                density: t.profile.values().to_vec(),
                v_eff: t.v_eff,
                ln_z: t.ln_z,
            })
        })
    })
}

/// Converged finite-difference thermal density. The grid may be widened when
/// density reaches its edges; read the result length with `qepot_table_len`.
///
/// # Safety
/// `potential` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_exact(
    potential: *const QepotPotential,
    beta: f64,
    mass: f64,
    x_min: f64,
    x_max: f64,
    n_points: usize,
    out: *mut *mut QepotTable,
) -> QepotStatus {
    guard(|| {
        let p = potential.as_ref().ok_or_else(|| null("potential"))?;
        out_handle(out, || {
            let (thermo, grid) = setup(beta, mass, x_min, x_max, n_points)?;
            let oracle = converge_on(&p.0, &thermo, &grid, &ConvergeOptions::default())?;
            Ok(QepotTable {
                grid: *oracle.grid(),
                density: oracle.density.profile.values().to_vec(),
                v_eff: oracle.density.effective_potential(&thermo),
                ln_z: oracle.density.ln_z,
            })
        })
    })
}

/// # Safety
/// `table` must come from `qepot_evaluate`/`qepot_exact` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_free(table: *mut QepotTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of grid nodes, 0 for a null table.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_len(table: *const QepotTable) -> usize {
    table.as_ref().map_or(0, |t| t.grid.len())
}

/// # Safety
/// `table` must be a live handle; `ln_z` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_ln_z(table: *const QepotTable, ln_z: *mut f64) -> QepotStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if ln_z.is_null() {
            return Err(null("ln_z"));
        }
        *ln_z = t.ln_z;
        Ok(())
    })
}

unsafe fn copy_out(
    table: *const QepotTable,
    buf: *mut f64,
    len: usize,
    pick: fn(&QepotTable) -> Vec<f64>,
) -> QepotStatus {
    guard(|| {
        let t = table.as_ref().ok_or_else(|| null("table"))?;
        if buf.is_null() {
            return Err(null("buffer"));
        }
        let values = pick(t);
        if len < values.len() {
            set_error(format!("buffer holds {len} values, table has {}", values.len()));
            return Err(QepotStatus::BufferTooSmall);
        }
        ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// Copy the grid nodes into `buf` (at least `qepot_table_len` doubles).
///
/// # Safety
/// `table` must be a live handle; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_x(table: *const QepotTable, buf: *mut f64, len: usize) -> QepotStatus {
    copy_out(table, buf, len, |t| t.grid.points())
}

/// Copy the normalized density into `buf`.
///
/// # Safety
/// `table` must be a live handle; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_density(table: *const QepotTable, buf: *mut f64, len: usize) -> QepotStatus {
    copy_out(table, buf, len, |t| t.density.clone())
}

/// Copy the effective potential into `buf`.
///
/// # Safety
/// `table` must be a live handle; `buf` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn qepot_table_v_eff(table: *const QepotTable, buf: *mut f64, len: usize) -> QepotStatus {
    copy_out(table, buf, len, |t| t.v_eff.clone())
}

/// Run a scenario given as config text and write its files to `out_dir`,
/// Metropolis-sampling too when `sample` is set. Returns `ThresholdFailed` when the run completed but a declared threshold
/// or a method failed.
///
/// # Safety
/// `config` and `out_dir` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn qepot_run_config(config: *const c_char, out_dir: *const c_char, sample: bool) -> QepotStatus {
    guard(|| {
        let cfg = parse_config(text(config, "config")?).map_err(fail)?;
        let dir = Path::new(text(out_dir, "out_dir")?);
        if sample && cfg.sampler.is_none() {
            set_error("no sampler.* keys");
            return Err(QepotStatus::Config);
        }
        let results = run_all(std::slice::from_ref(&cfg), sample).map_err(fail)?;
        write_outputs(dir, &results, None).map_err(fail)?;
        if results.iter().all(|r| r.passed()) {
            Ok(())
        } else {
            let n: usize = results.iter().map(|r| r.failure_count()).sum();
            set_error(format!("{n} checks or methods failed"));
            Err(QepotStatus::ThresholdFailed)
        }
    })
}
