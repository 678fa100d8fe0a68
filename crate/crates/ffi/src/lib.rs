//! C ABI over the packing engine.
//!
//! Instances and packings are opaque handles owned by the caller and released
//! with the matching `_free` function. Every fallible call returns an
//! [`SfStatus`]; the message of the last failure on the calling thread is
//! available from [`sf_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use strip_forge::cli::io::{emit_packing, parse_instance};
use strip_forge::cli::{run_algo, Algo, RunOptions};
use strip_forge::{lower_bound, validate_packing, Instance, Item, Packing};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SfAlgo {
    Nfdh = 0,
    Ffdh = 1,
    Steinberg = 2,
    Structured = 3,
    Exact = 4,
}

impl From<SfAlgo> for Algo {
    fn from(a: SfAlgo) -> Self {
        match a {
            SfAlgo::Nfdh => Algo::Nfdh,
            SfAlgo::Ffdh => Algo::Ffdh,
            SfAlgo::Steinberg => Algo::Steinberg,
            SfAlgo::Structured => Algo::Structured,
            SfAlgo::Exact => Algo::Exact,
        }
    }
}

/// A placed item; `item` is the index of the item in its instance.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SfPlacement {
    pub item: usize,
    pub x: i64,
    pub y: i64,
    pub rotated: bool,
}

pub struct SfInstance {
    inner: Instance,
}

pub struct SfPacking {
    inner: Packing,
    /// Item index per placement.
    index: Vec<usize>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn fail(status: SfStatus, msg: impl Into<String>) -> SfStatus {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
    status
}

fn guard(f: impl FnOnce() -> SfStatus) -> SfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(SfStatus::Panic, "internal panic"),
    }
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn sf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// A new empty instance, or null if `strip_width < 1`.
#[no_mangle]
pub extern "C" fn sf_instance_new(strip_width: i64) -> *mut SfInstance {
    if strip_width < 1 {
        fail(SfStatus::InvalidArgument, "strip width must be positive");
        return ptr::null_mut();
    }
    Box::into_raw(Box::new(SfInstance { inner: Instance::new(strip_width, Vec::new()) }))
}

/// Appends an item; its id is its index.
///
/// # Safety
/// `inst` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_add_item(inst: *mut SfInstance, width: i64, height: i64) -> SfStatus {
    guard(|| {
        // SAFETY: the caller passes null or a live, exclusively used handle.
        let Some(inst) = (unsafe { inst.as_mut() }) else {
            return fail(SfStatus::NullPointer, "null instance");
        };
        if width < 1 || height < 1 || width > inst.inner.strip_width {
            return fail(SfStatus::InvalidArgument, format!("item {width}x{height} does not fit the strip"));
        }
        let id = inst.inner.items.len().to_string();
        inst.inner.items.push(Item::new(id, width, height));
        SfStatus::Ok
    })
}

/// Parses a `strip-v1` document into `*out`.
///
/// # Safety
/// `json` must be null or a NUL-terminated string; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_from_json(json: *const c_char, out: *mut *mut SfInstance) -> SfStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return fail(SfStatus::NullPointer, "null argument");
        }
        // SAFETY: checked non-null; the caller guarantees NUL termination.
        let text = match unsafe { CStr::from_ptr(json) }.to_str() {
            Ok(t) => t,
            Err(_) => return fail(SfStatus::Parse, "input is not UTF-8"),
        };
        match parse_instance(text) {
            Ok(inner) => {
                // SAFETY: checked non-null and writable by contract.
                unsafe { *out = Box::into_raw(Box::new(SfInstance { inner })) };
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::Parse, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_free(inst: *mut SfInstance) {
    if !inst.is_null() {
        // SAFETY: created by Box::into_raw in this library and not freed before.
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Number of items; 0 for null.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_instance_len(inst: *const SfInstance) -> usize {
    // SAFETY: null or live by contract.
    unsafe { inst.as_ref() }.map_or(0, |i| i.inner.items.len())
}

/// `max(⌈area/W⌉, h_max)`; 0 for null or empty instances.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_lower_bound(inst: *const SfInstance) -> i64 {
    // SAFETY: null or live by contract.
    unsafe { inst.as_ref() }.map_or(0, |i| lower_bound(&i.inner))
}

/// Packs the instance into `*out`.
///
/// # Safety
/// `inst` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sf_pack(inst: *const SfInstance, algo: SfAlgo, out: *mut *mut SfPacking) -> SfStatus {
    guard(|| {
        // SAFETY: null or live by contract.
        let Some(inst) = (unsafe { inst.as_ref() }) else {
            return fail(SfStatus::NullPointer, "null instance");
        };
        if out.is_null() {
            return fail(SfStatus::NullPointer, "null output");
        }
        if inst.inner.items.is_empty() {
            return fail(SfStatus::InvalidArgument, "instance has no items");
        }
        match run_algo(&inst.inner, algo.into(), &RunOptions::default()) {
            Ok(r) => {
                let ids: HashMap<&str, usize> =
                    inst.inner.items.iter().enumerate().map(|(k, it)| (it.id.as_str(), k)).collect();
                let index = r.packing.placements.iter().map(|p| ids[p.item_id.as_str()]).collect();
                // SAFETY: checked non-null and writable by contract.
                unsafe { *out = Box::into_raw(Box::new(SfPacking { inner: r.packing, index })) };
                SfStatus::Ok
            }
            Err(e) => fail(SfStatus::Infeasible, e),
        }
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_packing_free(p: *mut SfPacking) {
    if !p.is_null() {
        // SAFETY: created by Box::into_raw in this library and not freed before.
        drop(unsafe { Box::from_raw(p) });
    }
}

/// Packing height; 0 for null.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_packing_height(p: *const SfPacking) -> i64 {
    // SAFETY: null or live by contract.
    unsafe { p.as_ref() }.map_or(0, |p| p.inner.height)
}

/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_packing_len(p: *const SfPacking) -> usize {
    // SAFETY: null or live by contract.
    unsafe { p.as_ref() }.map_or(0, |p| p.inner.placements.len())
}

/// Copies placement `k` into `*out`.
///
/// # Safety
/// `p` must be null or a live handle; `out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sf_packing_get(p: *const SfPacking, k: usize, out: *mut SfPlacement) -> SfStatus {
    guard(|| {
        // SAFETY: null or live by contract.
        let Some(p) = (unsafe { p.as_ref() }) else {
            return fail(SfStatus::NullPointer, "null packing");
        };
        if out.is_null() {
            return fail(SfStatus::NullPointer, "null output");
        }
        let Some(pl) = p.inner.placements.get(k) else {
            return fail(SfStatus::InvalidArgument, format!("index {k} out of range"));
        };
        let v = SfPlacement { item: p.index[k], x: pl.x, y: pl.y, rotated: pl.rotated };
        // SAFETY: checked non-null and writable by contract.
        unsafe { *out = v };
        SfStatus::Ok
    })
}

/// Counts violations of `p` against `inst` into `*violations`.
///
/// # Safety
/// Handles must be null or live; `violations` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn sf_validate(
    inst: *const SfInstance,
    p: *const SfPacking,
    allow_rotation: bool,
    violations: *mut usize,
) -> SfStatus {
    guard(|| {
        // SAFETY: null or live by contract.
        let (Some(inst), Some(p)) = (unsafe { inst.as_ref() }, unsafe { p.as_ref() }) else {
            return fail(SfStatus::NullPointer, "null handle");
        };
        if violations.is_null() {
            return fail(SfStatus::NullPointer, "null output");
        }
        let n = validate_packing(&inst.inner, &p.inner, allow_rotation).violations.len();
        // SAFETY: checked non-null and writable by contract.
        unsafe { *violations = n };
        SfStatus::Ok
    })
}

/// The packing as a `pack-v1` document; release it with [`sf_string_free`].
/// Null on failure.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sf_packing_to_json(p: *const SfPacking) -> *mut c_char {
    // SAFETY: null or live by contract.
    let Some(p) = (unsafe { p.as_ref() }) else {
        fail(SfStatus::NullPointer, "null packing");
        return ptr::null_mut();
    };
    CString::new(emit_packing(&p.inner)).map_or(ptr::null_mut(), CString::into_raw)
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn sf_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: produced by CString::into_raw in this library.
        drop(unsafe { CString::from_raw(s) });
    }
}
