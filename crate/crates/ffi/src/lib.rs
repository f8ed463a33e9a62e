//! C ABI over `qkset`.
//!
//! Objects are opaque handles created by `*_new`/`*_parse` functions and
//! released by the matching `*_free`. Fallible functions return a status
//! code (`QK_OK` on success) and write results through out-pointers.
//! Strings returned to the caller are owned by the caller and must be
//! released with `qk_string_free`. After a failure, `qk_last_error`
//! describes it.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qkset::classify::{find_good_k, profile, Classifier};
use qkset::groups::{group_order, is_member, sample_uniform, GroupSpec};
use qkset::harness::{scan, KChoice, ScanConfig, ScanMode};
use qkset::matrix::Matrix;
use qkset::proportions::{b_exact, rational_to_string};
use qkset::Error;

pub const QK_OK: i32 = 0;
pub const QK_ERR_NULL: i32 = 1;
pub const QK_ERR_INVALID: i32 = 2;
pub const QK_ERR_PARSE: i32 = 3;
pub const QK_ERR_NOT_MEMBER: i32 = 4;
pub const QK_ERR_STRUCTURAL: i32 = 5;
pub const QK_ERR_CAP: i32 = 6;
pub const QK_ERR_PANIC: i32 = 7;

/// A classical group with its fixed form.
pub struct QkGroup(GroupSpec);

/// A square matrix over the entry field of some group.
pub struct QkMatrix(Matrix);

/// A seeded random source.
pub struct QkRng(ChaCha8Rng);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn code_of(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidSpec(_) => QK_ERR_PARSE,
        Error::CapExceeded { .. } => QK_ERR_CAP,
        Error::Structural(_) => QK_ERR_STRUCTURAL,
        _ => QK_ERR_INVALID,
    }
}

struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(code_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QK_OK,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic".into());
            QK_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(QK_ERR_NULL, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QK_ERR_PARSE, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(QK_ERR_NULL, format!("{what} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(QK_ERR_NULL, format!("{what} is null")))
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message for the most recent failure on this thread, or null. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a group such as `"SL:8:2"`, `"SU:7:2"`, `"Sp:6:3"`, `"SO:odd:6:3"`,
/// `"SO:+:4:5"` or `"SO:-:4:5"`.
///
/// # Safety
/// `spec` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_group_new(spec: *const c_char, out: *mut *mut QkGroup) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let g: GroupSpec = str_arg(spec, "spec")?.parse()?;
        *out = Box::into_raw(Box::new(QkGroup(g)));
        Ok(())
    })
}

/// # Safety
/// `g` must come from `qk_group_new` and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_group_free(g: *mut QkGroup) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Dimension of the natural module.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_group_dimension(g: *const QkGroup, out: *mut usize) -> i32 {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(g, "group")?.0.d();
        Ok(())
    })
}

/// Group order as a decimal string.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_group_order(g: *const QkGroup, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(group_order(&ref_arg(g, "group")?.0).to_string());
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qk_rng_new(seed: u64) -> *mut QkRng {
    Box::into_raw(Box::new(QkRng(ChaCha8Rng::seed_from_u64(seed))))
}

/// # Safety
/// `r` must come from `qk_rng_new` and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_rng_free(r: *mut QkRng) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// A uniformly random element of the group.
///
/// # Safety
/// Pointers must be valid; `rng` must not be used concurrently.
#[no_mangle]
pub unsafe extern "C" fn qk_group_sample(g: *const QkGroup, rng: *mut QkRng, out: *mut *mut QkMatrix) -> i32 {
    guard(|| {
        let g = ref_arg(g, "group")?;
        let rng = out_arg(rng, "rng")?;
        let out = out_arg(out, "out")?;
        let m = sample_uniform(&g.0, &mut rng.0);
        *out = Box::into_raw(Box::new(QkMatrix(m)));
        Ok(())
    })
}

/// Parses a matrix in text form (header `d p e`, then `d` rows) over the
/// entry field of `g`.
///
/// # Safety
/// Pointers must be valid; `text` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn qk_matrix_parse(g: *const QkGroup, text: *const c_char, out: *mut *mut QkMatrix) -> i32 {
    guard(|| {
        let g = ref_arg(g, "group")?;
        let text = str_arg(text, "text")?;
        let out = out_arg(out, "out")?;
        let m = Matrix::parse_in(g.0.field(), text)?;
        *out = Box::into_raw(Box::new(QkMatrix(m)));
        Ok(())
    })
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_matrix_to_text(m: *const QkMatrix, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(ref_arg(m, "matrix")?.0.to_text());
        Ok(())
    })
}

/// # Safety
/// `m` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn qk_matrix_free(m: *mut QkMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_is_member(g: *const QkGroup, m: *const QkMatrix, out: *mut bool) -> i32 {
    guard(|| {
        let g = ref_arg(g, "group")?;
        let m = ref_arg(m, "matrix")?;
        *out_arg(out, "out")? = is_member(&g.0, &m.0)?;
        Ok(())
    })
}

/// Classifies `m` at level `k` (0 picks `k` automatically) and writes the
/// classification as a JSON object.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_classify(g: *const QkGroup, m: *const QkMatrix, k: usize, out_json: *mut *mut c_char) -> i32 {
    guard(|| {
        let g = ref_arg(g, "group")?;
        let m = ref_arg(m, "matrix")?;
        let out = out_arg(out_json, "out_json")?;
        if !is_member(&g.0, &m.0)? {
            return Err(Fail(QK_ERR_NOT_MEMBER, format!("matrix is not in {}", g.0)));
        }
        let prof = profile(&g.0, &m.0)?;
        let k = if k == 0 { find_good_k(&g.0, &prof) } else { Some(k) };
        let v = match k {
            None => serde_json::json!({"k": null, "tier": "none"}),
            Some(k) => Classifier::new(&g.0).classify_profile(&m.0, &prof, k)?.to_json_value(),
        };
        *out = into_c_string(v.to_string());
        Ok(())
    })
}

/// Runs a scan at level `k` (0 for automatic choice) and writes the JSON
/// report. With `exhaustive`, `samples` is ignored and the whole group is
/// enumerated.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn qk_scan(
    g: *const QkGroup,
    k: usize,
    samples: u64,
    seed: u64,
    workers: usize,
    exhaustive: bool,
    out_json: *mut *mut c_char,
) -> i32 {
    guard(|| {
        let g = ref_arg(g, "group")?;
        let out = out_arg(out_json, "out_json")?;
        let kc = if k == 0 { KChoice::Auto } else { KChoice::Fixed(k) };
        let mut cfg = ScanConfig::new(g.0.clone(), kc);
        cfg.samples = samples;
        cfg.seed = seed;
        cfg.workers = workers;
        cfg.mode = if exhaustive {
            ScanMode::Exhaustive
        } else {
            ScanMode::MonteCarlo
        };
        let report = scan(&cfg)?;
        *out = into_c_string(report.to_json());
        Ok(())
    })
}

/// Exact proportion of permutations of `n` points with exactly one
/// `m`-cycle and no other cycle length divisible by `m`, as `"num/den"`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_b_exact(n: usize, m: usize, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = into_c_string(rational_to_string(&b_exact(n, m)?));
        Ok(())
    })
}

/// Primitive prime divisors of `q^m - 1` as a JSON array of decimal strings.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_ppd_primes(q: u64, m: u64, out: *mut *mut c_char) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        if qkset::arith::prime_power(q).is_none() || m == 0 {
            return Err(Fail(QK_ERR_INVALID, "need a prime power q and m >= 1".into()));
        }
        let primes: Vec<String> = qkset::arith::ppd_primes(q, m).iter().map(|r| r.to_string()).collect();
        *out = into_c_string(serde_json::to_string(&primes).expect("serializable"));
        Ok(())
    })
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn qk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
