//! C interface to `spectral_cesaro`.
//!
//! Every function returns an [`ScStatus`]. On failure the message is kept per
//! thread and can be read with [`sc_last_error_message`]. Measures and test
//! functions are opaque handles owned by the caller and released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use spectral_cesaro::kernels::{self, Case, KernelKind, Method};
use spectral_cesaro::summability::{self, SpectralMeasure};
use spectral_cesaro::testfn::{self, TestFunction};
use spectral_cesaro::{spectral, Error};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    Parameter = 1,
    Domain = 2,
    Singularity = 3,
    Boundary = 4,
    Unsupported = 5,
    /// The output holds the best estimate available.
    Accuracy = 6,
    Data = 7,
    Parse = 8,
    Io = 9,
    NullPointer = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScKernelKind {
    Heat = 0,
    Schrodinger = 1,
    Cylinder = 2,
    Wightman = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScCase {
    Line = 0,
    Interval = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScMethod {
    SpectralSum = 0,
    ClosedForm = 1,
    ImageSum = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ScComplex {
    fn from(z: Complex64) -> Self {
        ScComplex { re: z.re, im: z.im }
    }
}

/// Opaque spectral measure.
pub struct ScMeasure(SpectralMeasure);

/// Opaque test function.
pub struct ScTestFunction(TestFunction);

enum Fail {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ScStatus {
    match e {
        Error::Parameter(_) => ScStatus::Parameter,
        Error::Domain(_) => ScStatus::Domain,
        Error::Singularity(_) => ScStatus::Singularity,
        Error::Boundary(_) => ScStatus::Boundary,
        Error::UnsupportedOrder { .. } | Error::Unsupported(_) => ScStatus::Unsupported,
        Error::Accuracy { .. } => ScStatus::Accuracy,
        Error::Data(_) => ScStatus::Data,
        Error::Parse(_) => ScStatus::Parse,
        Error::Io(_) => ScStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ScStatus::Ok,
        Ok(Err(Fail::Core(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Fail::Null(name))) => {
            set_last_error(format!("null pointer: {name}"));
            ScStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown".into());
            set_last_error(format!("panic: {msg}"));
            ScStatus::Panic
        }
    }
}

fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: the caller passes either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or(Fail::Null(name))
}

fn in_ref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Fail> {
    // SAFETY: the caller passes either null or a live handle.
    unsafe { p.as_ref() }.ok_or(Fail::Null(name))
}

fn in_slice<'a>(p: *const f64, n: usize, name: &'static str) -> Result<&'a [f64], Fail> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Fail::Null(name));
    }
    // SAFETY: the caller guarantees `n` readable elements at `p`.
    Ok(unsafe { std::slice::from_raw_parts(p, n) })
}

/// Writes the value, or the best estimate of an accuracy failure, and passes
/// the error on.
fn write_complex(out: &mut ScComplex, r: spectral_cesaro::Result<Complex64>) -> Result<(), Fail> {
    match r {
        Ok(z) => {
            *out = z.into();
            Ok(())
        }
        Err(e) => {
            if let Error::Accuracy { best, .. } = &e {
                *out = (*best).into();
            }
            Err(e.into())
        }
    }
}

fn write_real(out: &mut f64, r: spectral_cesaro::Result<f64>) -> Result<(), Fail> {
    match r {
        Ok(v) => {
            *out = v;
            Ok(())
        }
        Err(e) => {
            if let Error::Accuracy { best, .. } = &e {
                *out = best.re;
            }
            Err(e.into())
        }
    }
}

fn kind_of(k: ScKernelKind) -> KernelKind {
    match k {
        ScKernelKind::Heat => KernelKind::Heat,
        ScKernelKind::Schrodinger => KernelKind::Schrodinger,
        ScKernelKind::Cylinder => KernelKind::Cylinder,
        ScKernelKind::Wightman => KernelKind::Wightman,
    }
}

fn decode<T: Copy>(v: i32, table: &[T], what: &str) -> Result<T, Fail> {
    usize::try_from(v)
        .ok()
        .and_then(|i| table.get(i).copied())
        .ok_or_else(|| Fail::Core(Error::Parameter(format!("unknown {what} {v}"))))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a measure from `n` atoms at strictly increasing `positions`.
/// `weights_im` may be null for real weights.
///
/// # Safety
/// `positions` and `weights_re` (and `weights_im` unless null) must point to
/// `n` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_measure_from_atoms(
    positions: *const f64,
    weights_re: *const f64,
    weights_im: *const f64,
    n: usize,
    support_lower_bound: f64,
    out: *mut *mut ScMeasure,
) -> ScStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let p = in_slice(positions, n, "positions")?;
        let re = in_slice(weights_re, n, "weights_re")?;
        let im = if weights_im.is_null() { None } else { Some(in_slice(weights_im, n, "weights_im")?) };
        let atoms = (0..n)
            .map(|i| (p[i], Complex64::new(re[i], im.map_or(0.0, |v| v[i]))))
            .collect();
        let m = SpectralMeasure::from_atoms(atoms, support_lower_bound)?;
        *out = Box::into_raw(Box::new(ScMeasure(m)));
        Ok(())
    })
}

/// Releases a measure. Null is ignored.
///
/// # Safety
/// `m` must come from `sc_measure_from_atoms` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn sc_measure_free(m: *mut ScMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Riesz mean of order `k` at `lambda`.
///
/// # Safety
/// `m` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_riesz_mean(m: *const ScMeasure, k: usize, lambda: f64, out: *mut ScComplex) -> ScStatus {
    guard(|| {
        let m = in_ref(m, "measure")?;
        write_complex(out_ref(out, "out")?, summability::riesz_mean(&m.0, k, lambda))
    })
}

/// Pairing of the measure with `phi(eps·)`.
///
/// # Safety
/// `m` and `phi` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_smear_measure(
    m: *const ScMeasure,
    phi: *const ScTestFunction,
    eps: f64,
    out: *mut ScComplex,
) -> ScStatus {
    guard(|| {
        let m = in_ref(m, "measure")?;
        let phi = in_ref(phi, "phi")?;
        write_complex(out_ref(out, "out")?, summability::smear_measure(&m.0, &phi.0, eps))
    })
}

fn new_test_function(out: *mut *mut ScTestFunction, f: spectral_cesaro::Result<TestFunction>) -> ScStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = Box::into_raw(Box::new(ScTestFunction(f?)));
        Ok(())
    })
}

/// `exp(−((x − center)/width)²)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_test_function_gaussian(center: f64, width: f64, out: *mut *mut ScTestFunction) -> ScStatus {
    new_test_function(out, TestFunction::gaussian(center, width))
}

/// Smooth bump supported on `[a, b]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_test_function_bump(a: f64, b: f64, out: *mut *mut ScTestFunction) -> ScStatus {
    new_test_function(out, TestFunction::bump(a, b))
}

/// `exp(−rate·x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_test_function_exponential(rate: f64, out: *mut *mut ScTestFunction) -> ScStatus {
    new_test_function(out, TestFunction::exponential(rate))
}

/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_test_function_eval(phi: *const ScTestFunction, x: f64, out: *mut f64) -> ScStatus {
    guard(|| {
        let phi = in_ref(phi, "phi")?;
        *out_ref(out, "out")? = phi.0.eval(x);
        Ok(())
    })
}

/// Releases a test function. Null is ignored.
///
/// # Safety
/// `phi` must come from an `sc_test_function_*` constructor and not be freed
/// twice.
#[no_mangle]
pub unsafe extern "C" fn sc_test_function_free(phi: *mut ScTestFunction) {
    if !phi.is_null() {
        drop(Box::from_raw(phi));
    }
}

/// Evaluates a Green kernel. `kind`, `kase` and `method` take the values of
/// `ScKernelKind`, `ScCase` and `ScMethod`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_kernel(
    kind: i32,
    kase: i32,
    method: i32,
    t: f64,
    x: f64,
    y: f64,
    out: *mut ScComplex,
) -> ScStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let kind = kind_of(decode(
            kind,
            &[ScKernelKind::Heat, ScKernelKind::Schrodinger, ScKernelKind::Cylinder, ScKernelKind::Wightman],
            "kernel kind",
        )?);
        let case = decode(kase, &[Case::Line, Case::Interval], "case")?;
        let method = decode(method, &[Method::SpectralSum, Method::ClosedForm, Method::ImageSum], "method")?;
        write_complex(out, kernels::kernel(kind, case, t, x, y, method).map(|k| k.value))
    })
}

/// Sign pattern `P(t, x, y) ∈ {−1, 0, 1}` of the interval Wightman function.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_wightman_p(t: f64, x: f64, y: f64, out: *mut i32) -> ScStatus {
    guard(|| {
        *out_ref(out, "out")? = kernels::wightman_p(t, x, y)?;
        Ok(())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_density_free_line(x: f64, y: f64, lambda: f64, out: *mut f64) -> ScStatus {
    guard(|| write_real(out_ref(out, "out")?, spectral::density_free_line(x, y, lambda)))
}

/// Free-space spectral density for points of dimension `d`.
///
/// # Safety
/// `x` and `y` must point to `d` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_density_free_space(
    x: *const f64,
    y: *const f64,
    d: usize,
    lambda: f64,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let (x, y) = (in_slice(x, d, "x")?, in_slice(y, d, "y")?);
        write_real(out, spectral::density_free_space(x, y, lambda))
    })
}

/// Dirichlet interval staircase; `terms` (nullable) receives the number of
/// eigenvalues below `lambda`.
///
/// # Safety
/// `out` must be writable; `terms` null or writable.
#[no_mangle]
pub unsafe extern "C" fn sc_staircase_interval(x: f64, y: f64, lambda: f64, out: *mut f64, terms: *mut usize) -> ScStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let d = spectral::staircase_interval(x, y, lambda)?;
        *out = d.value;
        if let Some(t) = terms.as_mut() {
            *t = d.truncation.unwrap_or(0);
        }
        Ok(())
    })
}

/// Interval spectral density paired with `phi(eps·)`.
///
/// # Safety
/// `phi` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_density_smear_interval(
    x: f64,
    y: f64,
    phi: *const ScTestFunction,
    eps: f64,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        let phi = in_ref(phi, "phi")?;
        write_real(out_ref(out, "out")?, spectral::density_smear_interval(x, y, &phi.0, eps).map(|d| d.value))
    })
}

/// Bessel `J_order(z)` for integer or half-integer order.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sc_bessel_j(order: f64, z: f64, out: *mut f64) -> ScStatus {
    guard(|| write_real(out_ref(out, "out")?, testfn::bessel_j(order, z)))
}
