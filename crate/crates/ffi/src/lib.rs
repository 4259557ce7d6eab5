//! C ABI over the `tracesample` core.
//!
//! Objects cross the boundary as opaque handles ([`TsDataset`], [`TsSample`])
//! that the caller releases with the matching `*_free` function. Every
//! fallible call returns a [`TsStatus`]; on failure a description is available
//! from [`ts_last_error_message`] on the same thread. Strings returned through
//! `char **out` are owned by the caller and released with [`ts_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tracesample::dataset::{
    histogram, parse_histogram_spec, parse_records, synthesize, Arrangement, ClassHistogram,
    InputFormat, TraceDataset,
};
use tracesample::metrics::{class_report, identity_report, miss_probability, miss_probability_analytic};
use tracesample::report::{render_table, RenderFormat};
use tracesample::samplers::{Family, SampleResult, SampleSpec};
use tracesample::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    ParseError = 4,
    EmptyDataset = 5,
    OutOfRange = 6,
    UnknownLabel = 7,
    Io = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsInputFormat {
    Csv = 0,
    Ndjson = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsArrangement {
    Shuffled = 0,
    Grouped = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsFamily {
    /// `parameter` is n; honours `with_replacement`.
    Random = 0,
    /// `parameter` is the interval I.
    Systematic = 1,
    /// `parameter` is n; interval floor(P / n).
    SystematicByCount = 2,
    /// `parameter` is the interval I applied within each class.
    Stratified = 3,
    /// `parameter` is the per-class quota k.
    UnderOver = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TsFormat {
    Markdown = 0,
    Csv = 1,
    Json = 2,
}

/// A labeled record population and its class histogram.
pub struct TsDataset {
    dataset: TraceDataset,
    histogram: ClassHistogram,
}

/// The outcome of one sampler run.
pub struct TsSample {
    result: SampleResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> TsStatus {
    match err {
        Error::MissingLabelColumn(_)
        | Error::EmptyLabel { .. }
        | Error::MalformedRow { .. }
        | Error::HistogramSpec { .. }
        | Error::RunMatrix { .. }
        | Error::Json(_)
        | Error::Csv(_) => TsStatus::ParseError,
        Error::EmptyDataset | Error::ZeroTotal | Error::ZeroPopulation | Error::EmptySeries => {
            TsStatus::EmptyDataset
        }
        Error::TargetExceedsPopulation { .. } | Error::CountExceedsPopulation { .. } => {
            TsStatus::OutOfRange
        }
        Error::UnknownLabelInSample(_) => TsStatus::UnknownLabel,
        Error::Io(_) => TsStatus::Io,
        Error::InvalidParameter(_) | Error::NonMonotonicAxis { .. } | Error::EmptyComparison => {
            TsStatus::InvalidArgument
        }
    }
}

struct Failure(TsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            TsStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(TsStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(TsStatus::NullPointer, format!("{what} is null")))
}

fn out_arg<T>(p: *mut T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure(TsStatus::NullPointer, "output pointer is null".into()));
    }
    Ok(())
}

fn string_out(text: String, out: *mut *mut c_char) -> Result<(), Failure> {
    let c = CString::new(text)
        .map_err(|_| Failure(TsStatus::InvalidArgument, "output contains NUL".into()))?;
    unsafe { *out = c.into_raw() };
    Ok(())
}

fn render_format(f: TsFormat) -> RenderFormat {
    match f {
        TsFormat::Markdown => RenderFormat::Markdown,
        TsFormat::Csv => RenderFormat::Csv,
        TsFormat::Json => RenderFormat::Json,
    }
}

/// Message for the last failed call on this thread, or NULL after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn ts_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ts_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses `len` bytes of CSV or NDJSON records.
///
/// # Safety
/// `data` must point to `len` readable bytes; `label_column` must be a
/// NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_parse(
    data: *const u8,
    len: usize,
    format: TsInputFormat,
    label_column: *const c_char,
    out: *mut *mut TsDataset,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        if data.is_null() && len > 0 {
            return Err(Failure(TsStatus::NullPointer, "data is null".into()));
        }
        let bytes = if len == 0 { &[][..] } else { std::slice::from_raw_parts(data, len) };
        let label = str_arg(label_column, "label_column")?;
        let format = match format {
            TsInputFormat::Csv => InputFormat::Csv,
            TsInputFormat::Ndjson => InputFormat::Ndjson,
        };
        let dataset = parse_records(bytes, format, label)?;
        let histogram = histogram(&dataset)?;
        *out = Box::into_raw(Box::new(TsDataset { dataset, histogram }));
        Ok(())
    })
}

/// Synthesizes a dataset from `label,count` lines.
///
/// # Safety
/// `histogram_spec` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_synthesize(
    histogram_spec: *const c_char,
    seed: u64,
    arrangement: TsArrangement,
    out: *mut *mut TsDataset,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let spec = parse_histogram_spec(str_arg(histogram_spec, "histogram_spec")?)?;
        let arrangement = match arrangement {
            TsArrangement::Shuffled => Arrangement::Shuffled,
            TsArrangement::Grouped => Arrangement::Grouped,
        };
        let dataset = synthesize(&spec, seed, arrangement)?;
        *out = Box::into_raw(Box::new(TsDataset { dataset, histogram: spec }));
        Ok(())
    })
}

/// # Safety
/// `ds` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_free(ds: *mut TsDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Record count P, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_population(ds: *const TsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.dataset.population())
}

/// Number of classes L, or 0 for NULL.
///
/// # Safety
/// `ds` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_class_count(ds: *const TsDataset) -> usize {
    ds.as_ref().map_or(0, |d| d.histogram.class_count())
}

/// Copies the label of the record at 1-based `position`.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_label(
    ds: *const TsDataset,
    position: usize,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        let rec = ds.dataset.get(position).ok_or_else(|| {
            Failure(TsStatus::OutOfRange, format!("position {position} outside 1..={}", ds.dataset.population()))
        })?;
        string_out(rec.label.clone(), out)
    })
}

/// Renders the whole-dataset class report.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_dataset_report(
    ds: *const TsDataset,
    format: TsFormat,
    decimals: usize,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        let report = identity_report(&ds.histogram, decimals)?;
        string_out(render_table(&report, render_format(format), decimals)?, out)
    })
}

/// Runs one sampler over `ds`.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_run(
    ds: *const TsDataset,
    family: TsFamily,
    parameter: usize,
    with_replacement: bool,
    seed: u64,
    out: *mut *mut TsSample,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        let family = match family {
            TsFamily::Random => Family::Random { n: parameter, with_replacement },
            TsFamily::Systematic => Family::Systematic { interval: parameter },
            TsFamily::SystematicByCount => Family::SystematicByCount { n: parameter },
            TsFamily::Stratified => Family::Stratified { interval: parameter },
            TsFamily::UnderOver => Family::UnderOver { k: parameter },
        };
        let result = SampleSpec::new(family, seed).run(&ds.dataset)?;
        *out = Box::into_raw(Box::new(TsSample { result }));
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_free(s: *mut TsSample) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of sampled entries, or 0 for NULL.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_len(s: *const TsSample) -> usize {
    s.as_ref().map_or(0, |s| s.result.len())
}

/// Source position and synthetic flag of entry `index` (0-based).
///
/// # Safety
/// `s` must be a live handle; `source_position` and `synthetic` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_entry(
    s: *const TsSample,
    index: usize,
    source_position: *mut usize,
    synthetic: *mut bool,
) -> TsStatus {
    guard(|| {
        out_arg(source_position)?;
        out_arg(synthetic)?;
        let s = ref_arg(s, "sample")?;
        let e = s.result.entries.get(index).ok_or_else(|| {
            Failure(TsStatus::OutOfRange, format!("index {index} outside 0..{}", s.result.len()))
        })?;
        *source_position = e.source_position;
        *synthetic = e.synthetic;
        Ok(())
    })
}

/// The sample as CSV (`source_position,label,synthetic`).
///
/// # Safety
/// `s` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_to_csv(s: *const TsSample, out: *mut *mut c_char) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let s = ref_arg(s, "sample")?;
        let mut buf = Vec::new();
        s.result.write_csv(&mut buf)?;
        string_out(String::from_utf8(buf).expect("labels are UTF-8"), out)
    })
}

/// Per-class report of `s` against the histogram of `ds`.
///
/// # Safety
/// `ds` and `s` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_report(
    ds: *const TsDataset,
    s: *const TsSample,
    format: TsFormat,
    decimals: usize,
    out: *mut *mut c_char,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        let s = ref_arg(s, "sample")?;
        let report = class_report(&ds.histogram, &s.result, decimals)?;
        string_out(render_table(&report, render_format(format), decimals)?, out)
    })
}

/// Missing-class count of `s` against the histogram of `ds`.
///
/// # Safety
/// `ds` and `s` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_sample_missing_classes(
    ds: *const TsDataset,
    s: *const TsSample,
    out: *mut usize,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        let s = ref_arg(s, "sample")?;
        *out = class_report(&ds.histogram, &s.result, 3)?.missing_count;
        Ok(())
    })
}

/// Expected number of classes absent from a uniform random sample of size `n`.
///
/// # Safety
/// `ds` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_expected_missing(
    ds: *const TsDataset,
    n: u64,
    with_replacement: bool,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        let ds = ref_arg(ds, "dataset")?;
        *out = miss_probability_analytic(&ds.histogram, n, with_replacement)?.expected_missing;
        Ok(())
    })
}

/// Probability that a class of `count` records out of `population` is absent
/// from a uniform random sample of size `n`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ts_miss_probability(
    population: u64,
    count: u64,
    n: u64,
    with_replacement: bool,
    out: *mut f64,
) -> TsStatus {
    guard(|| {
        out_arg(out)?;
        *out = miss_probability(population, count, n, with_replacement)?;
        Ok(())
    })
}
