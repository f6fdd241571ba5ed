//! C ABI over the `dedupe-kb` engine.
//!
//! Objects cross the boundary as opaque handles created by the `dkb_*_load`
//! functions, `dkb_config_default` or `dkb_deduplicate`, and released with the
//! matching `dkb_*_free`. Every
//! fallible call returns a [`DkbStatus`]; on failure a message is available
//! from [`dkb_last_error_message`] on the same thread.
//!
//! The header `include/dedupe_kb.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use dedupe_kb::cleaning::clean_record;
use dedupe_kb::comparators;
use dedupe_kb::ingest::{self, IngestError};
use dedupe_kb::matcher::{self, MatchError};
use dedupe_kb::{ComparatorKind, Error, KnowledgeBase, LinkSet, MatchConfig};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Io = 3,
    InvalidInput = 4,
    InvalidConfig = 5,
    UnknownRecord = 6,
    OutOfRange = 7,
    Internal = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DkbComparator {
    Levenshtein = 0,
    JaroWinkler = 1,
    Exact = 2,
    Numeric = 3,
    Geoposition = 4,
}

impl From<DkbComparator> for ComparatorKind {
    fn from(c: DkbComparator) -> Self {
        match c {
            DkbComparator::Levenshtein => ComparatorKind::Levenshtein,
            DkbComparator::JaroWinkler => ComparatorKind::JaroWinkler,
            DkbComparator::Exact => ComparatorKind::Exact,
            DkbComparator::Numeric => ComparatorKind::Numeric,
            DkbComparator::Geoposition => ComparatorKind::Geoposition,
        }
    }
}

/// Opaque match configuration.
pub struct DkbConfig(MatchConfig);

/// Opaque knowledge base.
pub struct DkbKnowledgeBase(KnowledgeBase);

/// Opaque link set. Strings handed out by [`dkb_links_get`] live as long as
/// the handle.
pub struct DkbLinkSet {
    links: LinkSet,
    rows: Vec<(CString, CString, f64)>,
}

impl DkbLinkSet {
    fn new(links: LinkSet) -> Self {
        // ids come from Rust strings that were valid C input or CSV text;
        // an interior NUL is replaced rather than failing the whole set
        let c = |s: String| CString::new(s.replace('\0', "\u{fffd}")).expect("no interior nul");
        let rows = links
            .iter()
            .map(|l| (c(l.a), c(l.b), l.probability))
            .collect();
        DkbLinkSet { links, rows }
    }
}

/// One link as seen from C. Pointers are borrowed from the owning set.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct DkbLink {
    pub a: *const c_char,
    pub b: *const c_char,
    pub probability: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DkbReport {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).expect("nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(DkbStatus, String);

impl Failure {
    fn null(what: &str) -> Self {
        Failure(DkbStatus::NullPointer, format!("{what} is null"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Ingest(IngestError::Io { .. }) => DkbStatus::Io,
            Error::Ingest(IngestError::Config(_)) | Error::Config(_) => DkbStatus::InvalidConfig,
            Error::Ingest(_) | Error::GroundTruth(_) => DkbStatus::InvalidInput,
            Error::Match(MatchError::SchemaMismatch { .. } | MatchError::Record(_)) => {
                DkbStatus::InvalidInput
            }
            Error::Match(_) => DkbStatus::Internal,
            Error::UnknownRecord(_) => DkbStatus::UnknownRecord,
        };
        Failure(status, e.to_string())
    }
}

macro_rules! from_engine {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Error::from(e).into()
            }
        }
    )*};
}
from_engine!(IngestError, MatchError, dedupe_kb::record::ConfigError);

/// Runs `body`, converting errors and panics into a status code.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DkbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => DkbStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("panic inside dedupe-kb".to_string());
            DkbStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(DkbStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure::null(what))
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next `dkb_*` call on the same thread.
#[no_mangle]
pub extern "C" fn dkb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn dkb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The bundled default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_default(out: *mut *mut DkbConfig) -> DkbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(DkbConfig(ingest::default_config())));
        Ok(())
    })
}

/// Loads a JSON configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_load(
    path: *const c_char,
    out: *mut *mut DkbConfig,
) -> DkbStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        let out = out_arg(out, "out")?;
        let config = ingest::load_config(&path)?;
        *out = Box::into_raw(Box::new(DkbConfig(config)));
        Ok(())
    })
}

/// Parses a JSON configuration from memory.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_parse(
    json: *const c_char,
    out: *mut *mut DkbConfig,
) -> DkbStatus {
    guard(|| {
        let json = str_arg(json, "json")?;
        let out = out_arg(out, "out")?;
        *out = Box::into_raw(Box::new(DkbConfig(ingest::parse_config(json)?)));
        Ok(())
    })
}

/// Replaces the match threshold; must lie in `[0.5, 1]`.
///
/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_set_threshold(
    config: *mut DkbConfig,
    threshold: f64,
) -> DkbStatus {
    guard(|| {
        let config = out_arg(config, "config")?;
        config.0 = config.0.clone().with_threshold(threshold)?;
        Ok(())
    })
}

/// # Safety
/// `config` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_threshold(config: *const DkbConfig) -> f64 {
    config.as_ref().map_or(f64::NAN, |c| c.0.threshold)
}

/// # Safety
/// `config` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkb_config_free(config: *mut DkbConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Loads a CSV knowledge base validated against `config`.
///
/// # Safety
/// `path` must be NUL-terminated, `config` live, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_kb_load(
    path: *const c_char,
    config: *const DkbConfig,
    out: *mut *mut DkbKnowledgeBase,
) -> DkbStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        let config = ref_arg(config, "config")?;
        let out = out_arg(out, "out")?;
        let kb = ingest::load_kb(&path, &config.0)?;
        *out = Box::into_raw(Box::new(DkbKnowledgeBase(kb)));
        Ok(())
    })
}

/// Number of records, or 0 for NULL.
///
/// # Safety
/// `kb` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkb_kb_len(kb: *const DkbKnowledgeBase) -> usize {
    kb.as_ref().map_or(0, |kb| kb.0.len())
}

/// # Safety
/// `kb` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkb_kb_free(kb: *mut DkbKnowledgeBase) {
    if !kb.is_null() {
        drop(Box::from_raw(kb));
    }
}

/// Runs deduplication with `jobs` worker threads (0 is treated as 1).
/// `candidate_pairs` may be NULL.
///
/// # Safety
/// `kb` and `config` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_deduplicate(
    kb: *const DkbKnowledgeBase,
    config: *const DkbConfig,
    jobs: usize,
    out: *mut *mut DkbLinkSet,
    candidate_pairs: *mut usize,
) -> DkbStatus {
    guard(|| {
        let kb = ref_arg(kb, "kb")?;
        let config = ref_arg(config, "config")?;
        let out = out_arg(out, "out")?;
        let run = matcher::deduplicate_with(&kb.0, &config.0, jobs)?;
        if let Some(n) = candidate_pairs.as_mut() {
            *n = run.candidate_pairs;
        }
        *out = Box::into_raw(Box::new(DkbLinkSet::new(run.links)));
        Ok(())
    })
}

/// Scores a single pair of records by id.
///
/// # Safety
/// Handles must be live, ids NUL-terminated, outputs writable (`is_match`
/// may be NULL).
#[no_mangle]
pub unsafe extern "C" fn dkb_compare_pair(
    kb: *const DkbKnowledgeBase,
    config: *const DkbConfig,
    id_a: *const c_char,
    id_b: *const c_char,
    probability: *mut f64,
    is_match: *mut bool,
) -> DkbStatus {
    guard(|| {
        let kb = ref_arg(kb, "kb")?;
        let config = ref_arg(config, "config")?;
        let id_a = str_arg(id_a, "id_a")?;
        let id_b = str_arg(id_b, "id_b")?;
        let probability = out_arg(probability, "probability")?;
        let lookup = |id: &str| {
            kb.0.get(id)
                .map(|r| clean_record(r, &config.0))
                .ok_or_else(|| Failure::from(Error::UnknownRecord(id.to_string())))
        };
        let verdict = matcher::compare_records(&lookup(id_a)?, &lookup(id_b)?, &config.0)?;
        *probability = verdict.probability;
        if let Some(m) = is_match.as_mut() {
            *m = verdict.is_match;
        }
        Ok(())
    })
}

/// Reads a TSV links file.
///
/// # Safety
/// `path` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_links_load(
    path: *const c_char,
    out: *mut *mut DkbLinkSet,
) -> DkbStatus {
    guard(|| {
        let path = PathBuf::from(str_arg(path, "path")?);
        let out = out_arg(out, "out")?;
        let links = ingest::load_links(&path)?;
        *out = Box::into_raw(Box::new(DkbLinkSet::new(links)));
        Ok(())
    })
}

/// Writes a TSV links file, sorted, six decimals.
///
/// # Safety
/// `links` must be live; `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn dkb_links_write(
    links: *const DkbLinkSet,
    path: *const c_char,
) -> DkbStatus {
    guard(|| {
        let links = ref_arg(links, "links")?;
        let path = PathBuf::from(str_arg(path, "path")?);
        ingest::write_links(&links.links, &path)?;
        Ok(())
    })
}

/// # Safety
/// `links` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dkb_links_len(links: *const DkbLinkSet) -> usize {
    links.as_ref().map_or(0, |l| l.rows.len())
}

/// Link at `index` in `(a, b)` order. The strings stay valid until the set
/// is freed.
///
/// # Safety
/// `links` must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_links_get(
    links: *const DkbLinkSet,
    index: usize,
    out: *mut DkbLink,
) -> DkbStatus {
    guard(|| {
        let links = ref_arg(links, "links")?;
        let out = out_arg(out, "out")?;
        let (a, b, p) = links.rows.get(index).ok_or_else(|| {
            Failure(
                DkbStatus::OutOfRange,
                format!("index {index} out of range for {} links", links.rows.len()),
            )
        })?;
        *out = DkbLink {
            a: a.as_ptr(),
            b: b.as_ptr(),
            probability: *p,
        };
        Ok(())
    })
}

/// # Safety
/// `links` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dkb_links_free(links: *mut DkbLinkSet) {
    if !links.is_null() {
        drop(Box::from_raw(links));
    }
}

/// Precision, recall and F-measure of `found` against `truth`.
///
/// # Safety
/// Both sets must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_evaluate(
    found: *const DkbLinkSet,
    truth: *const DkbLinkSet,
    out: *mut DkbReport,
) -> DkbStatus {
    guard(|| {
        let found = ref_arg(found, "found")?;
        let truth = ref_arg(truth, "truth")?;
        let out = out_arg(out, "out")?;
        let r = dedupe_kb::evaluate(&found.links, &truth.links);
        *out = DkbReport {
            tp: r.counts.tp,
            fp: r.counts.fp,
            fn_: r.counts.fn_,
            precision: r.precision,
            recall: r.recall,
            f_measure: r.f_measure,
        };
        Ok(())
    })
}

/// Similarity of two cleaned values. Unparseable numeric or coordinate input
/// returns `DKB_STATUS_INVALID_INPUT`.
///
/// # Safety
/// `a` and `b` must be NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_similarity(
    comparator: DkbComparator,
    a: *const c_char,
    b: *const c_char,
    out: *mut f64,
) -> DkbStatus {
    guard(|| {
        let a = str_arg(a, "a")?;
        let b = str_arg(b, "b")?;
        let out = out_arg(out, "out")?;
        let sim = comparators::compare(comparator.into(), a, b)
            .map_err(|e| Failure(DkbStatus::InvalidInput, e.to_string()))?;
        *out = sim.value();
        Ok(())
    })
}

/// Bayes combination of two probabilities.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dkb_combine_bayes(p: f64, q: f64, out: *mut f64) -> DkbStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) {
            return Err(Failure(
                DkbStatus::InvalidInput,
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        *out = matcher::combine_bayes(p, q)
            .map_err(|e| Failure(DkbStatus::InvalidInput, e.to_string()))?;
        Ok(())
    })
}
