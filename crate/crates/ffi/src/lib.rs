//! C interface to the fsl-rt engine.
//!
//! Every entry point returns an `int` status; `FSLRT_OK` is zero. On failure
//! the message is kept per thread and can be read with
//! [`fslrt_last_error`]. Handles are opaque and owned by the caller, who
//! releases them with the matching `_free`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use fsl_rt::fsl::{rt_cop, rt_fsl, ChangeOfPairSpec, FslPresentation, GridOptions};
use fsl_rt::geom::{solve_critical, PotentialSpec};
use fsl_rt::qdilog::PhiTable;
use fsl_rt::sixj::{sixj_direct, sixj_via_phir, SixTuple};
use fsl_rt::{Error, LogComplex, Precision, RootContext};

pub const FSLRT_OK: c_int = 0;
pub const FSLRT_ERR_NULL: c_int = 1;
pub const FSLRT_ERR_LEVEL: c_int = 2;
pub const FSLRT_ERR_COLOR: c_int = 3;
pub const FSLRT_ERR_ARITY: c_int = 4;
pub const FSLRT_ERR_PRESENTATION: c_int = 5;
pub const FSLRT_ERR_DOMAIN: c_int = 6;
pub const FSLRT_ERR_CONVERGENCE: c_int = 7;
pub const FSLRT_ERR_COMPUTE: c_int = 8;
pub const FSLRT_ERR_PANIC: c_int = 9;

pub const FSLRT_PRECISION_STANDARD: c_int = 0;
pub const FSLRT_PRECISION_EXTENDED: c_int = 1;

/// A level r with its root-of-unity tables.
pub struct FslrtContext {
    ctx: RootContext,
    table: PhiTable,
}

/// A link presentation with an optional change of pair.
pub struct FslrtPresentation {
    pres: FslPresentation,
    cop: Option<ChangeOfPairSpec>,
}

/// A complex number stored as `exp(logmag + i·phase)`, also given in
/// Cartesian form (which may overflow to infinity for large values).
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FslrtValue {
    pub logmag: f64,
    pub phase: f64,
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct FslrtCritical {
    pub value_re: f64,
    pub value_im: f64,
    pub volume: f64,
    pub cs: f64,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn code_of(err: &Error) -> c_int {
    match err {
        Error::InvalidLevel(_) => FSLRT_ERR_LEVEL,
        Error::InvalidColor { .. } | Error::Inadmissible(..) | Error::NotHyperideal(_) => FSLRT_ERR_COLOR,
        Error::Arity { .. } => FSLRT_ERR_ARITY,
        Error::Presentation(_) | Error::AxisMismatch(_) => FSLRT_ERR_PRESENTATION,
        Error::Domain(_) | Error::OutsideStrip(_) | Error::NearPole { .. } => FSLRT_ERR_DOMAIN,
        Error::NoConvergence(_) | Error::SingularHessian => FSLRT_ERR_CONVERGENCE,
        _ => FSLRT_ERR_COMPUTE,
    }
}

enum Fail {
    Null(&'static str),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            FSLRT_OK
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            FSLRT_ERR_NULL
        }
        Ok(Err(Fail::Core(e))) => {
            set_error(e.to_string());
            code_of(&e)
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal panic: {msg}"));
            FSLRT_ERR_PANIC
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn as_slice<'a, T>(p: *const T, len: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn write<T>(out: *mut T, v: T, what: &'static str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail::Null(what));
    }
    out.write(v);
    Ok(())
}

fn value_of(z: LogComplex) -> FslrtValue {
    let c = z.to_complex();
    FslrtValue { logmag: z.logmag, phase: z.phase, re: c.re, im: c.im }
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fslrt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Build the tables for odd level `r ≥ 3`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fslrt_context_new(r: i64, precision: c_int, out: *mut *mut FslrtContext) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let precision = match precision {
            FSLRT_PRECISION_STANDARD => Precision::Standard,
            FSLRT_PRECISION_EXTENDED => Precision::Extended,
            other => return Err(Error::Domain(format!("unknown precision code {other}")).into()),
        };
        let ctx = RootContext::new(r, precision)?;
        let table = PhiTable::new(&ctx)?;
        let handle = Box::into_raw(Box::new(FslrtContext { ctx, table }));
        write(out, handle, "out")
    })
}

/// # Safety
/// `ctx` must come from [`fslrt_context_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fslrt_context_free(ctx: *mut FslrtContext) {
    if !ctx.is_null() {
        drop(Box::from_raw(ctx));
    }
}

/// The normalization constant μ_r, or NaN for a null handle.
///
/// # Safety
/// `ctx` must be null or a live context.
#[no_mangle]
pub unsafe extern "C" fn fslrt_mu_r(ctx: *const FslrtContext) -> f64 {
    ctx.as_ref().map_or(f64::NAN, |c| c.ctx.mu_r())
}

/// The 6j-symbol at six colors by the alternating sum. With `via_dilog`
/// nonzero the quantum dilogarithm route is used instead, which needs a
/// tuple of hyperideal type.
///
/// # Safety
/// `colors` must point to six integers and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fslrt_sixj(
    ctx: *const FslrtContext,
    colors: *const i64,
    via_dilog: c_int,
    out: *mut FslrtValue,
) -> c_int {
    guard(|| {
        let c = as_ref(ctx, "ctx")?;
        let m: [i64; 6] = as_slice(colors, 6, "colors")?.try_into().expect("six colors");
        let six = SixTuple::new(&c.ctx, m)?;
        let v = if via_dilog != 0 {
            sixj_via_phir(&c.ctx, &c.table, &six)?
        } else {
            sixj_direct(&c.ctx, &six)?
        };
        write(out, value_of(v), "out")
    })
}

/// The built-in presentation of the single-tetrahedron link.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fslrt_presentation_tetra1(out: *mut *mut FslrtPresentation) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        let handle = Box::into_raw(Box::new(FslrtPresentation { pres: FslPresentation::tetra1(), cop: None }));
        write(out, handle, "out")
    })
}

/// Parse a presentation from its JSON form. A change of pair in the
/// document is kept with the handle.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn fslrt_presentation_from_json(
    json: *const c_char,
    out: *mut *mut FslrtPresentation,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(Fail::Null("out"));
        }
        if json.is_null() {
            return Err(Fail::Null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| Error::Presentation(format!("not UTF-8: {e}")))?;
        let (pres, cop) = FslPresentation::from_json(text)?;
        let handle = Box::into_raw(Box::new(FslrtPresentation { pres, cop }));
        write(out, handle, "out")
    })
}

/// # Safety
/// `pres` must come from a presentation constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fslrt_presentation_free(pres: *mut FslrtPresentation) {
    if !pres.is_null() {
        drop(Box::from_raw(pres));
    }
}

/// Number of link components, or 0 for a null handle.
///
/// # Safety
/// `pres` must be null or a live presentation.
#[no_mangle]
pub unsafe extern "C" fn fslrt_presentation_components(pres: *const FslrtPresentation) -> usize {
    pres.as_ref().map_or(0, |p| p.pres.n())
}

/// Set a plain change of pair on the 1-based component ids. An empty list
/// clears it.
///
/// # Safety
/// `ids` must point to `n_ids` values.
#[no_mangle]
pub unsafe extern "C" fn fslrt_presentation_set_change_of_pair(
    pres: *mut FslrtPresentation,
    ids: *const usize,
    n_ids: usize,
) -> c_int {
    guard(|| {
        let p = pres.as_mut().ok_or(Fail::Null("pres"))?;
        let ids = as_slice(ids, n_ids, "ids")?;
        p.cop = if ids.is_empty() { None } else { Some(ChangeOfPairSpec::plain(&p.pres, ids)?) };
        Ok(())
    })
}

/// The invariant of the link at one coloring, one color per component.
///
/// # Safety
/// `colors` must point to `n` values and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fslrt_rt(
    ctx: *const FslrtContext,
    pres: *const FslrtPresentation,
    colors: *const i64,
    n: usize,
    out: *mut FslrtValue,
) -> c_int {
    guard(|| {
        let c = as_ref(ctx, "ctx")?;
        let p = as_ref(pres, "pres")?;
        let v = rt_fsl(&c.ctx, &p.pres, as_slice(colors, n, "colors")?)?;
        write(out, value_of(v), "out")
    })
}

/// The invariant after the change of pair stored on `pres`: `n_i` colors the
/// components in I (ascending), `m_j` the rest (ascending).
///
/// # Safety
/// Array arguments must point to the stated number of values.
#[no_mangle]
pub unsafe extern "C" fn fslrt_rt_change_of_pair(
    ctx: *const FslrtContext,
    pres: *const FslrtPresentation,
    n_i: *const i64,
    n_i_len: usize,
    m_j: *const i64,
    m_j_len: usize,
    out: *mut FslrtValue,
) -> c_int {
    guard(|| {
        let c = as_ref(ctx, "ctx")?;
        let p = as_ref(pres, "pres")?;
        let cop = p
            .cop
            .as_ref()
            .ok_or_else(|| Error::Presentation("no change of pair set".into()))?;
        let n_i = as_slice(n_i, n_i_len, "n_i")?;
        let m_j = as_slice(m_j, m_j_len, "m_j")?;
        let s = rt_cop(&c.ctx, &p.pres, cop, n_i, m_j, GridOptions::default())?;
        write(out, value_of(s.value), "out")
    })
}

/// Critical point of the potential at cone angles `theta` (one per
/// component, below branch), using the change of pair stored on `pres`.
///
/// # Safety
/// `theta` must point to `n` values and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn fslrt_critical(
    pres: *const FslrtPresentation,
    theta: *const f64,
    n: usize,
    out: *mut FslrtCritical,
) -> c_int {
    guard(|| {
        let p = as_ref(pres, "pres")?;
        let spec = PotentialSpec::from_cone_angles(&p.pres, p.cop.as_ref(), as_slice(theta, n, "theta")?)?;
        let res = solve_critical(&spec)?;
        let crit = FslrtCritical {
            value_re: res.value[0],
            value_im: res.value[1],
            volume: res.vol,
            cs: res.cs,
            residual: res.residual,
        };
        write(out, crit, "out")
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fslrt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
