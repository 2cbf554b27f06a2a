//! C ABI over the scan pipeline.
//!
//! Every entry point returns an [`ApkfeatStatus`]. On failure the message is
//! available from [`apkfeat_last_error_message`] on the same thread until the
//! next failing call. Handles are immutable after load except through
//! [`apkfeat_model_quantize`], so one handle may be shared by concurrent
//! `apkfeat_scan` calls as long as no thread quantizes or frees it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use apkfeat::dex::DexOptions;
use apkfeat::dictionary::{DictError, FeatureDictionary};
use apkfeat::pipeline::{extract_features, vectorize_features};
use apkfeat::vector::{FeatureVector, VectorError};
use apkfeat::{AnyModel, Error, Inference, ModelError, Prediction, QuantizedModel, Scanner};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApkfeatStatus {
    Ok = 0,
    NullArg = 1,
    InvalidArg = 2,
    Io = 3,
    Apk = 4,
    Dex = 5,
    Axml = 6,
    Dict = 7,
    Model = 8,
    Dimension = 9,
    BufferTooSmall = 10,
    Utf8 = 11,
    Panic = 12,
    Internal = 13,
}

/// Opaque feature dictionary.
pub struct ApkfeatDictionary {
    inner: FeatureDictionary,
}

/// Opaque float or int8 model.
pub struct ApkfeatModel {
    inner: AnyModel,
}

/// Verdict of one prediction.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ApkfeatScanResult {
    pub class_index: u32,
    /// Probability of `class_index`.
    pub confidence: f64,
    pub is_benign: bool,
    /// Set bits in the feature vector.
    pub features_present: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(ApkfeatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Model(ModelError::DimensionMismatch { .. }) | Error::Vector(VectorError::DimensionMismatch { .. }) => {
                ApkfeatStatus::Dimension
            }
            Error::Io(_) => ApkfeatStatus::Io,
            Error::Apk(apkfeat::apk::ApkError::Io(_)) | Error::Dict(DictError::Io(_)) | Error::Model(ModelError::Io(_)) => {
                ApkfeatStatus::Io
            }
            Error::Apk(_) => ApkfeatStatus::Apk,
            Error::Dex(_) => ApkfeatStatus::Dex,
            Error::Axml(_) | Error::Manifest(_) => ApkfeatStatus::Axml,
            Error::Dict(_) => ApkfeatStatus::Dict,
            Error::Model(_) => ApkfeatStatus::Model,
            Error::Vector(_) | Error::Synth(_) | Error::Report(_) => ApkfeatStatus::Internal,
        };
        Failure(status, format!("{}: {e}", e.kind()))
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Error::from(e).into()
    }
}

impl From<DictError> for Failure {
    fn from(e: DictError) -> Self {
        Error::from(e).into()
    }
}

fn null(name: &str) -> Failure {
    Failure(ApkfeatStatus::NullArg, format!("{name} is null"))
}

/// Runs `f`, recording any failure or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ApkfeatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ApkfeatStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| (*s).to_owned()))
                .unwrap_or_default();
            set_last_error(format!("panic: {msg}"));
            ApkfeatStatus::Panic
        }
    }
}

/// # Safety
/// `p` is null or a NUL-terminated string valid for reads.
unsafe fn path_arg(p: *const c_char, name: &str) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    let s = unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|e| Failure(ApkfeatStatus::Utf8, format!("{name} is not UTF-8: {e}")))?;
    Ok(PathBuf::from(s))
}

/// # Safety
/// `p` is null or points to a live object of type `T`.
unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(name))
}

fn to_result(p: &Prediction, features_present: usize) -> ApkfeatScanResult {
    ApkfeatScanResult {
        class_index: p.class_index as u32,
        confidence: p.confidence,
        is_benign: p.is_benign(),
        features_present,
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn apkfeat_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the calling thread's last failure, or null if none. The
/// pointer stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn apkfeat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Loads a dictionary file into `*out`.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_dictionary_load(path: *const c_char, out: *mut *mut ApkfeatDictionary) -> ApkfeatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = unsafe { path_arg(path, "path") }?;
        let inner = FeatureDictionary::load(path)?;
        unsafe { *out = Box::into_raw(Box::new(ApkfeatDictionary { inner })) };
        Ok(())
    })
}

/// Number of features, or 0 for a null handle.
///
/// # Safety
/// `dict` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_dictionary_len(dict: *const ApkfeatDictionary) -> usize {
    unsafe { dict.as_ref() }.map_or(0, |d| d.inner.len())
}

/// # Safety
/// `dict` is null or a handle from `apkfeat_dictionary_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_dictionary_free(dict: *mut ApkfeatDictionary) {
    if !dict.is_null() {
        drop(unsafe { Box::from_raw(dict) });
    }
}

/// Loads a float or int8 model file into `*out`.
///
/// # Safety
/// `path` is a NUL-terminated string; `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_load(path: *const c_char, out: *mut *mut ApkfeatModel) -> ApkfeatStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = unsafe { path_arg(path, "path") }?;
        let inner = AnyModel::load(path)?;
        unsafe { *out = Box::into_raw(Box::new(ApkfeatModel { inner })) };
        Ok(())
    })
}

/// Converts a float model to int8 in place. A no-op for int8 models.
///
/// # Safety
/// `model` is a live handle not used by any other thread during the call.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_quantize(model: *mut ApkfeatModel) -> ApkfeatStatus {
    guard(|| {
        let m = unsafe { model.as_mut() }.ok_or_else(|| null("model"))?;
        if let AnyModel::Float(f) = &m.inner {
            m.inner = AnyModel::Int8(QuantizedModel::quantize(f));
        }
        Ok(())
    })
}

/// Input width, or 0 for a null handle.
///
/// # Safety
/// `model` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_input_dim(model: *const ApkfeatModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.spec().input_dim)
}

/// Number of classes, or 0 for a null handle.
///
/// # Safety
/// `model` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_num_classes(model: *const ApkfeatModel) -> usize {
    unsafe { model.as_ref() }.map_or(0, |m| m.inner.spec().num_classes)
}

/// True if the model runs int8 weights; false for a null handle.
///
/// # Safety
/// `model` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_is_quantized(model: *const ApkfeatModel) -> bool {
    unsafe { model.as_ref() }.is_some_and(|m| m.inner.is_quantized())
}

/// Copies the NUL-terminated label of class `index` into `buf`. `*needed`
/// receives the required size including the terminator; with a short
/// buffer nothing is written and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `model` is a live handle, `buf` is writable for `buf_len` bytes or null
/// when `buf_len` is 0, and `needed` is null or writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_label(
    model: *const ApkfeatModel,
    index: usize,
    buf: *mut c_char,
    buf_len: usize,
    needed: *mut usize,
) -> ApkfeatStatus {
    guard(|| {
        let m = unsafe { ref_arg(model, "model") }?;
        let labels = &m.inner.spec().labels;
        let label = labels.get(index).ok_or_else(|| {
            Failure(ApkfeatStatus::InvalidArg, format!("class {index} out of range for {} classes", labels.len()))
        })?;
        let n = label.len() + 1;
        if let Some(needed) = unsafe { needed.as_mut() } {
            *needed = n;
        }
        if buf_len < n {
            return Err(Failure(ApkfeatStatus::BufferTooSmall, format!("label needs {n} bytes, buffer has {buf_len}")));
        }
        if buf.is_null() {
            return Err(null("buf"));
        }
        let dst = unsafe { std::slice::from_raw_parts_mut(buf.cast::<u8>(), n) };
        dst[..n - 1].copy_from_slice(label.as_bytes());
        dst[n - 1] = 0;
        Ok(())
    })
}

/// # Safety
/// `model` is null or a handle from `apkfeat_model_load` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_model_free(model: *mut ApkfeatModel) {
    if !model.is_null() {
        drop(unsafe { Box::from_raw(model) });
    }
}

/// Extracts, vectorizes and classifies the APK at `path`.
///
/// # Safety
/// `model` and `dict` are live handles, `path` is a NUL-terminated string
/// and `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_scan(
    model: *const ApkfeatModel,
    dict: *const ApkfeatDictionary,
    path: *const c_char,
    out: *mut ApkfeatScanResult,
) -> ApkfeatStatus {
    guard(|| {
        let (m, d) = unsafe { (ref_arg(model, "model")?, ref_arg(dict, "dict")?) };
        let path = unsafe { path_arg(path, "path") }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let r = Scanner::new(&m.inner, &d.inner)?.scan(&path)?;
        *out = ApkfeatScanResult {
            class_index: r.class_index as u32,
            confidence: r.confidence,
            is_benign: r.is_benign(),
            features_present: r.features_present,
        };
        Ok(())
    })
}

/// Writes the APK's presence vector over `dict` as one byte (0 or 1) per
/// feature. `*written` receives the dictionary size; with a short buffer
/// nothing is written and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `dict` is a live handle, `path` is a NUL-terminated string, `buf` is
/// writable for `buf_len` bytes or null when `buf_len` is 0, and `written`
/// is null or writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_extract_vector(
    dict: *const ApkfeatDictionary,
    path: *const c_char,
    buf: *mut u8,
    buf_len: usize,
    written: *mut usize,
) -> ApkfeatStatus {
    guard(|| {
        let d = unsafe { ref_arg(dict, "dict") }?;
        let path = unsafe { path_arg(path, "path") }?;
        let n = d.inner.len();
        if let Some(w) = unsafe { written.as_mut() } {
            *w = n;
        }
        if buf_len < n {
            return Err(Failure(ApkfeatStatus::BufferTooSmall, format!("vector needs {n} bytes, buffer has {buf_len}")));
        }
        if buf.is_null() && n > 0 {
            return Err(null("buf"));
        }
        let features = extract_features(&path, DexOptions::default())?;
        let v = vectorize_features(&features, &d.inner);
        if n > 0 {
            let dst = unsafe { std::slice::from_raw_parts_mut(buf, n) };
            for (o, &b) in dst.iter_mut().zip(v.bits()) {
                *o = u8::from(b);
            }
        }
        Ok(())
    })
}

/// Classifies a presence vector of `len` bytes, each 0 or 1.
///
/// # Safety
/// `model` is a live handle, `bits` is readable for `len` bytes and `out`
/// is writable.
#[no_mangle]
pub unsafe extern "C" fn apkfeat_predict_vector(
    model: *const ApkfeatModel,
    bits: *const u8,
    len: usize,
    out: *mut ApkfeatScanResult,
) -> ApkfeatStatus {
    guard(|| {
        let m = unsafe { ref_arg(model, "model") }?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        if bits.is_null() && len > 0 {
            return Err(null("bits"));
        }
        let raw: &[u8] = if len == 0 { &[] } else { unsafe { std::slice::from_raw_parts(bits, len) } };
        if let Some(i) = raw.iter().position(|&b| b > 1) {
            return Err(Failure(ApkfeatStatus::InvalidArg, format!("byte {i} is {}, expected 0 or 1", raw[i])));
        }
        let v = FeatureVector::new("", raw.iter().map(|&b| b == 1).collect());
        let p = m.inner.predict(&v)?;
        *out = to_result(&p, v.popcount());
        Ok(())
    })
}
