//! C ABI over the debfresh core: version comparison, classification, PVAC,
//! libyear deltas and dependency closures of parsed snapshots.
//!
//! Every function returns a [`DfStatus`]. On failure a message is kept per
//! thread and can be read with [`df_last_error`]. Handles are opaque and must
//! be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use debfresh::activity::{pvac, ActivityLevel, ExclusionReason};
use debfresh::classify::{classify, RuleSet, SemVersion, VersionClass, VersionFields};
use debfresh::freshness::{version_delta_libyear, UpstreamRelease};
use debfresh::ingest::{build_snapshot, decode_index, dependency_closure, parse_stanzas, ReleaseSnapshot};
use debfresh::version::{compare_deb_versions, DebVersion};
use debfresh::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    UnknownPackage = 4,
    ContractViolation = 5,
    IndexOutOfRange = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfVersionClass {
    Semantic = 0,
    ExtSemantic = 1,
    SemiSemantic = 2,
    DistNative = 3,
    ManualMap = 4,
    Unknown = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfActivity {
    MajorChange = 0,
    ModeratelyActive = 1,
    LightlyActive = 2,
    Sedentary = 3,
    ExcludedEpochMismatch = 4,
}

/// Classified version. The numeric fields are zero and meaningless when
/// `version_class` is `DF_VERSION_CLASS_UNKNOWN`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DfSemVersion {
    pub version_class: DfVersionClass,
    pub epoch: u64,
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
}

/// Opaque parsed release snapshot.
pub struct DfSnapshot {
    inner: ReleaseSnapshot,
}

/// Opaque list of NUL-terminated strings.
pub struct DfStringList {
    items: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).expect("NULs removed"));
}

struct Failure(DfStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::UnknownPackage(_) => DfStatus::UnknownPackage,
            Error::Contract(_) => DfStatus::ContractViolation,
            _ => DfStatus::ParseError,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body`, turning errors and panics into a status plus last-error text.
fn guarded(body: impl FnOnce() -> Result<(), Failure>) -> DfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DfStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic");
            DfStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DfStatus::NullArgument, format!("{what} is NULL"))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DfStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn class_to_c(class: VersionClass) -> DfVersionClass {
    match class {
        VersionClass::Semantic => DfVersionClass::Semantic,
        VersionClass::ExtSemantic => DfVersionClass::ExtSemantic,
        VersionClass::SemiSemantic => DfVersionClass::SemiSemantic,
        VersionClass::DistNative => DfVersionClass::DistNative,
        VersionClass::ManualMap => DfVersionClass::ManualMap,
        VersionClass::Unknown => DfVersionClass::Unknown,
    }
}

fn class_from_c(class: DfVersionClass) -> VersionClass {
    match class {
        DfVersionClass::Semantic => VersionClass::Semantic,
        DfVersionClass::ExtSemantic => VersionClass::ExtSemantic,
        DfVersionClass::SemiSemantic => VersionClass::SemiSemantic,
        DfVersionClass::DistNative => VersionClass::DistNative,
        DfVersionClass::ManualMap => VersionClass::ManualMap,
        DfVersionClass::Unknown => VersionClass::Unknown,
    }
}

fn sem_from_c(v: &DfSemVersion) -> SemVersion {
    match class_from_c(v.version_class) {
        VersionClass::Unknown => SemVersion::unknown(""),
        class => SemVersion::known(
            "",
            class,
            VersionFields {
                epoch: v.epoch,
                major: v.major,
                minor: v.minor,
                patch: v.patch,
            },
        ),
    }
}

/// Message of the last failed call on this thread; empty if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn df_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// dpkg ordering of two version strings: `*out` is -1, 0 or 1.
///
/// # Safety
/// `a` and `b` must be NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_version_compare(a: *const c_char, b: *const c_char, out: *mut c_int) -> DfStatus {
    guarded(|| {
        let parse = |s: &str| DebVersion::parse(s).map_err(Failure::from);
        let (va, vb) = (parse(text(a, "a")?)?, parse(text(b, "b")?)?);
        *out_ref(out, "out")? = compare_deb_versions(&va, &vb) as c_int;
        Ok(())
    })
}

/// Classifies `version` of `package` with the bundled manual rules.
///
/// # Safety
/// `package` and `version` must be NUL-terminated strings, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_classify(
    package: *const c_char,
    version: *const c_char,
    out: *mut DfSemVersion,
) -> DfStatus {
    guarded(|| {
        let v = classify(text(package, "package")?, text(version, "version")?, &RuleSet::bundled());
        let f = v.fields().copied().unwrap_or(VersionFields {
            epoch: 0,
            major: 0,
            minor: 0,
            patch: 0,
        });
        *out_ref(out, "out")? = DfSemVersion {
            version_class: class_to_c(v.class()),
            epoch: f.epoch,
            major: f.major,
            minor: f.minor,
            patch: f.patch,
        };
        Ok(())
    })
}

/// Activity label between two classified versions. Either side being
/// Unknown is `DF_STATUS_CONTRACT_VIOLATION`.
///
/// # Safety
/// All pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn df_pvac(a: *const DfSemVersion, b: *const DfSemVersion, out: *mut DfActivity) -> DfStatus {
    guarded(|| {
        let a = a.as_ref().ok_or_else(|| null("a"))?;
        let b = b.as_ref().ok_or_else(|| null("b"))?;
        let level = pvac(&sem_from_c(a), &sem_from_c(b))?;
        *out_ref(out, "out")? = match level {
            ActivityLevel::MajorChange => DfActivity::MajorChange,
            ActivityLevel::ModeratelyActive => DfActivity::ModeratelyActive,
            ActivityLevel::LightlyActive => DfActivity::LightlyActive,
            ActivityLevel::Sedentary => DfActivity::Sedentary,
            ActivityLevel::Excluded(ExclusionReason::EpochMismatch) => DfActivity::ExcludedEpochMismatch,
            ActivityLevel::Excluded(r) => {
                return Err(Failure(DfStatus::ContractViolation, format!("unexpected exclusion {}", r.as_str())))
            }
        };
        Ok(())
    })
}

/// Weighted version delta from `packaged` to upstream `major.minor.patch`.
///
/// # Safety
/// `packaged` must be valid and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_libyear_delta(
    packaged: *const DfSemVersion,
    major: u64,
    minor: u64,
    patch: u64,
    out: *mut f64,
) -> DfStatus {
    guarded(|| {
        let packaged = packaged.as_ref().ok_or_else(|| null("packaged"))?;
        let upstream = UpstreamRelease {
            package: String::new(),
            class: String::new(),
            major,
            minor,
            patch,
            release_date: Default::default(),
        };
        *out_ref(out, "out")? = version_delta_libyear(&sem_from_c(packaged), &upstream)?;
        Ok(())
    })
}

/// Parses a `Packages` index (plain or gzip) into a snapshot handle.
///
/// # Safety
/// `data` must point to `len` readable bytes, `release_id` must be a
/// NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_snapshot_parse(
    data: *const u8,
    len: usize,
    release_id: *const c_char,
    out: *mut *mut DfSnapshot,
) -> DfStatus {
    guarded(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let bytes: &[u8] = match (data.is_null(), len) {
            (_, 0) => &[],
            (true, _) => return Err(null("data")),
            (false, n) => std::slice::from_raw_parts(data, n),
        };
        let release_id = text(release_id, "release_id")?;
        let index = decode_index(bytes)?;
        let (inner, _) = build_snapshot(parse_stanzas(&index).records, release_id);
        *out = Box::into_raw(Box::new(DfSnapshot { inner }));
        Ok(())
    })
}

/// Number of packages with a stanza; 0 for NULL.
///
/// # Safety
/// `snapshot` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_snapshot_len(snapshot: *const DfSnapshot) -> usize {
    snapshot.as_ref().map_or(0, |s| s.inner.len())
}

/// Sorted dependency closure of `seed`, seed excluded.
///
/// # Safety
/// `snapshot` must be a live handle, `seed` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_snapshot_closure(
    snapshot: *const DfSnapshot,
    seed: *const c_char,
    out: *mut *mut DfStringList,
) -> DfStatus {
    guarded(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let snapshot = snapshot.as_ref().ok_or_else(|| null("snapshot"))?;
        let closure = dependency_closure(&snapshot.inner, text(seed, "seed")?)?;
        let items = closure
            .into_iter()
            .map(|n| CString::new(n).expect("package names have no NUL"))
            .collect();
        *out = Box::into_raw(Box::new(DfStringList { items }));
        Ok(())
    })
}

/// # Safety
/// `snapshot` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_snapshot_free(snapshot: *mut DfSnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// # Safety
/// `list` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn df_string_list_len(list: *const DfStringList) -> usize {
    list.as_ref().map_or(0, |l| l.items.len())
}

/// Borrowed item `index`; valid until the list is freed.
///
/// # Safety
/// `list` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn df_string_list_get(
    list: *const DfStringList,
    index: usize,
    out: *mut *const c_char,
) -> DfStatus {
    guarded(|| {
        let out = out_ref(out, "out")?;
        let list = list.as_ref().ok_or_else(|| null("list"))?;
        let item = list.items.get(index).ok_or_else(|| {
            Failure(
                DfStatus::IndexOutOfRange,
                format!("index {index} out of range for {} items", list.items.len()),
            )
        })?;
        *out = item.as_ptr();
        Ok(())
    })
}

/// # Safety
/// `list` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn df_string_list_free(list: *mut DfStringList) {
    if !list.is_null() {
        drop(Box::from_raw(list));
    }
}
