//! C ABI over `rlwe-core`.
//!
//! Every fallible call returns an [`RlweStatus`]; on failure a message is
//! stored per thread and can be read with [`rlwe_last_error`]. Sample sets
//! cross the boundary as opaque [`RlweSampleSet`] handles owned by the caller
//! and released with [`rlwe_sample_set_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use rlwe_core::attack::{self, AttackConfig, Verdict};
use rlwe_core::estimator;
use rlwe_core::oracle::{draw_rlwe, draw_uniform, ErrorSpec, RlweInstance, SampleSet};
use rlwe_core::sampler::GaussianSpec;
use rlwe_core::{Error, FamilyRing, Ring};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlweStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidFamily = 3,
    Io = 4,
    Parse = 5,
    TooLarge = 6,
    NotEnoughSamples = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlweVerdict {
    Guess = 0,
    NotRlwe = 1,
    InsufficientSamples = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RlweAttackKind {
    Coset = 0,
    TwoBin = 1,
}

/// Opaque sample set.
pub struct RlweSampleSet(SampleSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RlweAttackResult {
    pub verdict: u32,
    /// Non-zero when `candidate_u`, `candidate_v` hold `ρ(s) = u + v√d`.
    pub has_candidate: u8,
    pub candidate_u: u64,
    pub candidate_v: u64,
    pub candidate_count: usize,
    pub samples_used: usize,
    pub guess_loop_iterations: u64,
    pub threshold: f64,
    pub elapsed_ms: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RlweEstimate {
    pub log2_eps: f64,
    pub neg_floor_log2_eps: i64,
    /// NaN when the Gauss-sum bound does not apply (`q ≥ m²`).
    pub log2_bound: f64,
    pub beta: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(err: &Error) -> RlweStatus {
    match err {
        Error::InvalidFamily(_) | Error::NotNonresidue { .. } | Error::Undecided(_) => RlweStatus::InvalidFamily,
        Error::Io { .. } => RlweStatus::Io,
        Error::Parse { .. } => RlweStatus::Parse,
        Error::TooLarge(_) => RlweStatus::TooLarge,
        Error::NotEnoughSamples { .. } => RlweStatus::NotEnoughSamples,
        _ => RlweStatus::InvalidArgument,
    }
}

fn guard<F: FnOnce() -> Result<(), (RlweStatus, String)>>(f: F) -> RlweStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RlweStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RlweStatus::Panic
        }
    }
}

fn core<T>(r: rlwe_core::Result<T>) -> Result<T, (RlweStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (RlweStatus, String) {
    (RlweStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, (RlweStatus, String)> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path).to_str().map_err(|_| (RlweStatus::InvalidArgument, "path is not UTF-8".to_string()))?;
    Ok(PathBuf::from(s))
}

/// Message for the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rlwe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Checks `(p, d, q)` against the family conditions.
#[no_mangle]
pub extern "C" fn rlwe_validate_family(p: u64, d: u64, q: u64) -> RlweStatus {
    guard(|| core(FamilyRing::new(p, d, q)).map(|_| ()))
}

/// Draws `count` samples for the family ring `(p, d, q)` with Gaussian width
/// `r`. With `uniform` non-zero the `b` components are uniform instead.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_generate(
    p: u64,
    d: u64,
    q: u64,
    r: f64,
    count: usize,
    seed: u64,
    uniform: u8,
    out: *mut *mut RlweSampleSet,
) -> RlweStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let ring = Ring::Family(core(FamilyRing::new(p, d, q))?);
        let inst = core(RlweInstance::new(ring, ErrorSpec::Gaussian(core(GaussianSpec::new(r))?), seed))?;
        let set = core(if uniform != 0 { draw_uniform(&inst, count) } else { draw_rlwe(&inst, count) })?;
        *out = Box::into_raw(Box::new(RlweSampleSet(set)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_load(path: *const c_char, out: *mut *mut RlweSampleSet) -> RlweStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let set = core(SampleSet::load(&path_arg(path)?))?;
        *out = Box::into_raw(Box::new(RlweSampleSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_save(set: *const RlweSampleSet, path: *const c_char) -> RlweStatus {
    guard(|| {
        let set = set.as_ref().ok_or_else(|| null("set"))?;
        core(set.0.save(&path_arg(path)?))
    })
}

/// Number of records, 0 for a null handle.
///
/// # Safety
/// `set` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_len(set: *const RlweSampleSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// Modulus of the set, 0 for a null handle.
///
/// # Safety
/// `set` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_modulus(set: *const RlweSampleSet) -> u64 {
    set.as_ref().map_or(0, |s| s.0.header.q)
}

/// # Safety
/// `set` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rlwe_sample_set_free(set: *mut RlweSampleSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Runs an attack. A `threshold` of zero or below selects the default
/// critical value; `workers` of 0 uses every core.
///
/// # Safety
/// `set` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn rlwe_attack(
    set: *const RlweSampleSet,
    kind: RlweAttackKind,
    threshold: f64,
    workers: usize,
    out: *mut RlweAttackResult,
) -> RlweStatus {
    guard(|| {
        let set = &set.as_ref().ok_or_else(|| null("set"))?.0;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let q = set.header.q;
        let mut config = match kind {
            RlweAttackKind::Coset => AttackConfig::coset_default(q),
            RlweAttackKind::TwoBin => AttackConfig::two_bin_default(q, set.len()),
        };
        if threshold > 0.0 {
            config.threshold = threshold;
        }
        let config = config.with_workers(workers);
        let outcome = core(match kind {
            RlweAttackKind::Coset => attack::coset_attack(set, &config),
            RlweAttackKind::TwoBin => attack::two_bin_attack(set, &config),
        })?;
        *out = RlweAttackResult {
            verdict: match outcome.verdict {
                Verdict::Guess => RlweVerdict::Guess,
                Verdict::NotRlwe => RlweVerdict::NotRlwe,
                Verdict::InsufficientSamples => RlweVerdict::InsufficientSamples,
            } as u32,
            has_candidate: outcome.candidate.is_some() as u8,
            candidate_u: outcome.candidate.map_or(0, |c| c.u),
            candidate_v: outcome.candidate.map_or(0, |c| c.v),
            candidate_count: outcome.candidates.len(),
            samples_used: outcome.samples_used,
            guess_loop_iterations: outcome.guess_loop_iterations,
            threshold: outcome.threshold,
            elapsed_ms: outcome.elapsed_ms,
        };
        Ok(())
    })
}

/// `ε(m, q, k)` for residue degree 1 or 2.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rlwe_estimate(m: u64, q: u64, k: u32, degree: u32, out: *mut RlweEstimate) -> RlweStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let report = core(match degree {
            1 => estimator::epsilon(m, q, k),
            2 => estimator::epsilon_deg2(m, q, k),
            _ => Err(Error::InvalidParameter(format!("degree must be 1 or 2, got {degree}"))),
        })?;
        *out = RlweEstimate {
            log2_eps: report.log2_eps,
            neg_floor_log2_eps: report.neg_floor_log2_eps,
            log2_bound: report.log2_bound.unwrap_or(f64::NAN),
            beta: report.beta,
        };
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_mapping() {
        assert_eq!(status_of(&Error::InvalidFamily(vec![])), RlweStatus::InvalidFamily);
        assert_eq!(status_of(&Error::TooLarge("x".into())), RlweStatus::TooLarge);
        assert_eq!(status_of(&Error::NotOddPrime(4)), RlweStatus::InvalidArgument);
        assert_eq!(status_of(&Error::NotEnoughSamples { got: 1, need: 2 }), RlweStatus::NotEnoughSamples);
    }

    #[test]
    fn panics_become_status() {
        assert_eq!(guard(|| panic!("boom")), RlweStatus::Panic);
        assert_eq!(unsafe { CStr::from_ptr(rlwe_last_error()) }.to_str().unwrap(), "internal panic");
    }

    #[test]
    fn interior_nul_is_escaped() {
        set_error("a\0b".into());
        assert_eq!(unsafe { CStr::from_ptr(rlwe_last_error()) }.to_str().unwrap(), "a b");
    }
}
