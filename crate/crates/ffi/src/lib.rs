//! C ABI over `popaug`.
//!
//! Instances and matchings cross the boundary as opaque handles created by
//! the `*_parse` functions and released by the matching `*_free` function.
//! Every fallible call returns a [`PopaugStatus`]; on failure the message is
//! available from [`popaug_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`popaug_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use popaug::augment::{augment_length2, exact_augmentation, AugmentError, SearchLimits};
use popaug::instance::{parse_instance, parse_matching, Instance, Matching, MatchingError};
use popaug::popmatch::{self, PopError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopaugStatus {
    Ok = 0,
    /// The instance admits no popular matching, or no augmentation plan.
    NotFound = 1,
    NullPointer = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    InvalidArgument = 5,
    LimitExceeded = 6,
    Internal = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopaugAugmentMode {
    /// Strict lists of length at most two.
    Length2 = 0,
    /// Exhaustive search over copy vectors.
    Exact = 1,
}

/// A validated instance with a last-resort item for every person.
pub struct PopaugInstance {
    inner: Instance,
}

/// A matching of the instance it was parsed against or solved for.
pub struct PopaugMatching {
    inner: Matching,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(PopaugStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(PopaugStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<MatchingError> for Failure {
    fn from(e: MatchingError) -> Self {
        let status = match e {
            MatchingError::Syntax { .. } => PopaugStatus::ParseError,
            _ => PopaugStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<PopError> for Failure {
    fn from(e: PopError) -> Self {
        match e {
            PopError::InvalidMatching(m) => m.into(),
            other => Failure(PopaugStatus::InvalidArgument, other.to_string()),
        }
    }
}

impl From<AugmentError> for Failure {
    fn from(e: AugmentError) -> Self {
        let status = match e {
            AugmentError::LimitExceeded(_) => PopaugStatus::LimitExceeded,
            AugmentError::Stuck => PopaugStatus::Internal,
            _ => PopaugStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    // Interior NULs cannot be represented; they are replaced.
    let message = CString::new(message.replace('\0', "?")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

/// Runs `body`, converting errors and panics into a status and last error.
fn guarded(body: impl FnOnce() -> Result<PopaugStatus, Failure>) -> PopaugStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => status,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".to_string());
            PopaugStatus::Internal
        }
    }
}

unsafe fn read_text<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if ptr.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|e| Failure(PopaugStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn handle<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::null(what));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).expect("generated text has no NUL").into_raw()
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn popaug_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn popaug_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from NUL-terminated UTF-8 text. Last-resort items are
/// added when the text does not enable them.
///
/// # Safety
/// `text` must be null or NUL-terminated; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_instance_parse(text: *const c_char, out: *mut *mut PopaugInstance) -> PopaugStatus {
    guarded(|| {
        let source = read_text(text, "text")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let inner = parse_instance(source)
            .map_err(|e| Failure(PopaugStatus::ParseError, e.to_string()))?
            .with_last_resorts();
        write_out(out, Box::into_raw(Box::new(PopaugInstance { inner })), "out")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Releases an instance. Null is ignored.
///
/// # Safety
/// `inst` must be null or a handle from [`popaug_instance_parse`], not yet freed.
#[no_mangle]
pub unsafe extern "C" fn popaug_instance_free(inst: *mut PopaugInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of people, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live instance handle.
#[no_mangle]
pub unsafe extern "C" fn popaug_instance_num_people(inst: *const PopaugInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.inner.num_people())
}

/// Serializes an instance in the text format.
///
/// # Safety
/// `inst` must be null or a live instance handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_instance_to_string(inst: *const PopaugInstance, out: *mut *mut c_char) -> PopaugStatus {
    guarded(|| {
        let inst = handle(inst, "inst")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        write_out(out, owned_string(inst.inner.to_text()), "out")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Parses a matching of `inst` from `<person> -> <item>` lines.
///
/// # Safety
/// Pointers must be null or valid as for [`popaug_instance_parse`].
#[no_mangle]
pub unsafe extern "C" fn popaug_matching_parse(
    inst: *const PopaugInstance,
    text: *const c_char,
    out: *mut *mut PopaugMatching,
) -> PopaugStatus {
    guarded(|| {
        let inst = handle(inst, "inst")?;
        let source = read_text(text, "text")?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let inner = parse_matching(&inst.inner, source)?;
        write_out(out, Box::into_raw(Box::new(PopaugMatching { inner })), "out")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Releases a matching. Null is ignored.
///
/// # Safety
/// `m` must be null or a matching handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn popaug_matching_free(m: *mut PopaugMatching) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Serializes `m` as a matching file of `inst`.
///
/// # Safety
/// Handles must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_matching_to_string(
    inst: *const PopaugInstance,
    m: *const PopaugMatching,
    out: *mut *mut c_char,
) -> PopaugStatus {
    guarded(|| {
        let (inst, m) = (handle(inst, "inst")?, handle(m, "m")?);
        m.inner.check_shape(&inst.inner)?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        write_out(out, owned_string(m.inner.to_text(&inst.inner)), "out")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Computes a min-cost popular matching, of maximum cardinality among popular
/// matchings when `max_card` is set. Returns `NotFound` when none exists.
///
/// # Safety
/// `inst` must be null or live; `out_matching` and `out_cost` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_min_cost_popular(
    inst: *const PopaugInstance,
    max_card: bool,
    out_matching: *mut *mut PopaugMatching,
    out_cost: *mut u64,
) -> PopaugStatus {
    guarded(|| {
        let inst = handle(inst, "inst")?;
        if out_matching.is_null() || out_cost.is_null() {
            return Err(Failure::null("output pointer"));
        }
        let found = if max_card {
            popmatch::min_cost_max_card_popular(&inst.inner)?
        } else {
            popmatch::min_cost_popular(&inst.inner)?
        };
        let Some(sol) = found else {
            return Ok(PopaugStatus::NotFound);
        };
        write_out(out_cost, sol.cost, "out_cost")?;
        let boxed = Box::into_raw(Box::new(PopaugMatching { inner: sol.matching }));
        write_out(out_matching, boxed, "out_matching")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Decides whether `m` is popular in `inst`.
///
/// # Safety
/// Handles must be null or live; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_is_popular(
    inst: *const PopaugInstance,
    m: *const PopaugMatching,
    out: *mut bool,
) -> PopaugStatus {
    guarded(|| {
        let (inst, m) = (handle(inst, "inst")?, handle(m, "m")?);
        let popular = popmatch::is_popular(&inst.inner, &m.inner)?;
        write_out(out, popular, "out")?;
        Ok(PopaugStatus::Ok)
    })
}

/// Computes a min-cost augmentation plan. The plan text has one
/// `<item> +<count>` line per item receiving copies, then `total <cost>`.
/// `max_states` bounds the exact search and is ignored in length-2 mode;
/// `perfect` requires exact mode. Returns `NotFound` when no plan exists.
///
/// # Safety
/// `inst` must be null or live; `out_plan` and `out_cost` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn popaug_augment(
    inst: *const PopaugInstance,
    mode: PopaugAugmentMode,
    perfect: bool,
    max_states: usize,
    out_plan: *mut *mut c_char,
    out_cost: *mut u64,
) -> PopaugStatus {
    guarded(|| {
        let inst = handle(inst, "inst")?;
        if out_plan.is_null() || out_cost.is_null() {
            return Err(Failure::null("output pointer"));
        }
        let plan = match mode {
            PopaugAugmentMode::Length2 if perfect => {
                return Err(Failure(
                    PopaugStatus::InvalidArgument,
                    "perfect augmentation requires exact mode".to_string(),
                ))
            }
            PopaugAugmentMode::Length2 => Some(augment_length2(&inst.inner)?),
            PopaugAugmentMode::Exact => exact_augmentation(&inst.inner, perfect, &SearchLimits { max_states })?,
        };
        let Some(plan) = plan else {
            return Ok(PopaugStatus::NotFound);
        };
        write_out(out_cost, plan.total_cost, "out_cost")?;
        write_out(out_plan, owned_string(plan.to_text(&inst.inner)), "out_plan")?;
        Ok(PopaugStatus::Ok)
    })
}
