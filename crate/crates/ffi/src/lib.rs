//! C ABI over the rainham toolkit.
//!
//! Families and transversals are opaque heap handles released with their `_free`
//! function. Every call returns an [`RhStatus`]; on failure the message is kept in a
//! thread-local slot readable through [`rh_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rainham::exact::{count_transversals, find_transversal, SearchOutcome};
use rainham::extremal::{compute_r, AnalysisOptions, Mode};
use rainham::family::{generate, FamilyGenerator};
use rainham::pipeline::{sample_transversal, PipelineParams};
use rainham::{validate_transversal, ColoredFamily, Error, Graph, Transversal};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Malformed = 3,
    Precondition = 4,
    CapExceeded = 5,
    NotFound = 6,
    BudgetExhausted = 7,
    Failed = 8,
    Panic = 9,
}

/// Opaque colored family.
pub struct RhFamily(ColoredFamily);

/// Opaque transversal (Hamilton cycle with one color per edge).
pub struct RhTransversal(Transversal);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn status_of(e: &Error) -> RhStatus {
    match e {
        Error::SelfLoop | Error::VertexOutOfRange | Error::Malformed(_) | Error::Inconsistent(_) => RhStatus::Malformed,
        Error::Precondition(_) | Error::InvalidWitness(_) | Error::InfeasibleParams(_) => RhStatus::Precondition,
        Error::CapExceeded { .. } => RhStatus::CapExceeded,
        Error::Obstruction(_) => RhStatus::NotFound,
        _ => RhStatus::Failed,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (RhStatus, String)>) -> RhStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RhStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("panic inside the library");
            RhStatus::Panic
        }
    }
}

fn lib(e: Error) -> (RhStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (RhStatus, String) {
    (RhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, (RhStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (RhStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn family_arg<'a>(p: *const RhFamily) -> Result<&'a ColoredFamily, (RhStatus, String)> {
    p.as_ref().map(|f| &f.0).ok_or_else(|| null("family"))
}

unsafe fn put<T>(out: *mut *mut T, v: T) {
    *out = Box::into_raw(Box::new(v));
}

/// Message of the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn rh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a family from its canonical JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_family_from_json(json: *const c_char, out: *mut *mut RhFamily) -> RhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let f = ColoredFamily::from_json(str_arg(json, "json")?).map_err(lib)?;
        put(out, RhFamily(f));
        Ok(())
    })
}

/// Builds a family from a generator spec such as `{"kind":"all-clique","n":8}`.
///
/// # Safety
/// `spec` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_family_generate(spec: *const c_char, out: *mut *mut RhFamily) -> RhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let gen: FamilyGenerator = serde_json::from_str(str_arg(spec, "spec")?).map_err(|e| lib(e.into()))?;
        put(out, RhFamily(generate(&gen).map_err(lib)?));
        Ok(())
    })
}

/// Family of `m` edgeless graphs on `n` vertices; fill it with [`rh_family_add_edge`].
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_family_new(n: usize, m: usize, out: *mut *mut RhFamily) -> RhStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if m == 0 {
            return Err((RhStatus::InvalidArgument, "need at least one color".into()));
        }
        let f = ColoredFamily::new(n, vec![Graph::new(n); m]).map_err(lib)?;
        put(out, RhFamily(f));
        Ok(())
    })
}

/// Adds edge `u`–`v` to color `c`.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rh_family_add_edge(f: *mut RhFamily, c: usize, u: usize, v: usize) -> RhStatus {
    guard(|| {
        let fam = f.as_mut().ok_or_else(|| null("family"))?;
        let (n, m) = (fam.0.n(), fam.0.m());
        if c >= m {
            return Err((RhStatus::InvalidArgument, format!("color {c} out of range")));
        }
        if u >= n || v >= n {
            return Err(lib(Error::VertexOutOfRange));
        }
        if u == v {
            return Err(lib(Error::SelfLoop));
        }
        let colors: Vec<Graph> = fam
            .0
            .colors()
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let mut g = g.clone();
                if i == c {
                    g.add_edge(u, v);
                }
                g
            })
            .collect();
        fam.0 = ColoredFamily::new(n, colors).map_err(lib)?;
        Ok(())
    })
}

/// Vertex count, or 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rh_family_n(f: *const RhFamily) -> usize {
    f.as_ref().map_or(0, |f| f.0.n())
}

/// Color count, or 0 for NULL.
///
/// # Safety
/// `f` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rh_family_m(f: *const RhFamily) -> usize {
    f.as_ref().map_or(0, |f| f.0.m())
}

/// # Safety
/// `f` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rh_family_free(f: *mut RhFamily) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Exact search. `RH_STATUS_NOT_FOUND` certifies that none exists;
/// `RH_STATUS_BUDGET_EXHAUSTED` means the node budget ran out first.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_find_transversal(f: *const RhFamily, budget: u64, out: *mut *mut RhTransversal) -> RhStatus {
    guard(|| {
        let fam = family_arg(f)?;
        if out.is_null() {
            return Err(null("out"));
        }
        match find_transversal(fam, budget).map_err(lib)?.outcome {
            SearchOutcome::Found(t) => {
                put(out, RhTransversal(t));
                Ok(())
            }
            SearchOutcome::NoneExists => Err((RhStatus::NotFound, "no transversal exists".into())),
            SearchOutcome::BudgetExhausted => Err((RhStatus::BudgetExhausted, format!("budget {budget} exhausted"))),
        }
    })
}

/// Randomized transversal along the structural route for the family (desk preset).
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_sample_transversal(f: *const RhFamily, seed: u64, out: *mut *mut RhTransversal) -> RhStatus {
    guard(|| {
        let fam = family_arg(f)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = sample_transversal(fam, &PipelineParams::default(), seed).map_err(lib)?;
        put(out, RhTransversal(s.transversal));
        Ok(())
    })
}

/// Exact transversal count for `n <= cap`; saturates at `UINT64_MAX`.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_count_transversals(f: *const RhFamily, cap: usize, out: *mut u64) -> RhStatus {
    guard(|| {
        let fam = family_arg(f)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let c = count_transversals(fam, cap).map_err(lib)?;
        *out = u64::try_from(c).unwrap_or(u64::MAX);
        Ok(())
    })
}

/// `r(G)` by exhaustive half-set search.
///
/// # Safety
/// `f` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rh_compute_r(f: *const RhFamily, out: *mut u64) -> RhStatus {
    guard(|| {
        let fam = family_arg(f)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = compute_r(fam, Mode::Exact, &AnalysisOptions::default()).map_err(lib)?.value;
        Ok(())
    })
}

/// Number of edges (equal to the number of vertices for a cycle), or 0 for NULL.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rh_transversal_len(t: *const RhTransversal) -> usize {
    t.as_ref().map_or(0, |t| t.0.colors.len())
}

/// Copies vertices and colors into caller buffers of length at least `len`.
///
/// # Safety
/// `t` must be a live handle; `vertices` and `colors` must hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn rh_transversal_copy(
    t: *const RhTransversal,
    vertices: *mut usize,
    colors: *mut usize,
    len: usize,
) -> RhStatus {
    guard(|| {
        let t = &t.as_ref().ok_or_else(|| null("transversal"))?.0;
        if vertices.is_null() || colors.is_null() {
            return Err(null("buffer"));
        }
        if len < t.vertices.len() || len < t.colors.len() {
            return Err((RhStatus::InvalidArgument, format!("buffers hold {len}, need {}", t.vertices.len())));
        }
        ptr::copy_nonoverlapping(t.vertices.as_ptr(), vertices, t.vertices.len());
        ptr::copy_nonoverlapping(t.colors.as_ptr(), colors, t.colors.len());
        Ok(())
    })
}

/// Checks Hamiltonicity, the color bijection and edge membership.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn rh_transversal_validate(f: *const RhFamily, t: *const RhTransversal) -> RhStatus {
    guard(|| {
        let fam = family_arg(f)?;
        let t = &t.as_ref().ok_or_else(|| null("transversal"))?.0;
        validate_transversal(fam, t).map_err(|e| (RhStatus::Failed, e.to_string()))
    })
}

/// JSON text of the transversal; release with [`rh_string_free`]. NULL on failure.
///
/// # Safety
/// `t` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rh_transversal_to_json(t: *const RhTransversal) -> *mut c_char {
    match t.as_ref() {
        Some(t) => CString::new(t.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => {
            set_error("transversal is null");
            ptr::null_mut()
        }
    }
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rh_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `t` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rh_transversal_free(t: *mut RhTransversal) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}
