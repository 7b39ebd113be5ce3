//! C ABI over the clustered-hetnet engine.
//!
//! A network is loaded from TOML text into an opaque `ChnNetwork` handle and
//! released with `chn_network_free`. Every fallible call returns a
//! `ChnStatus`; on failure `chn_last_error_message` describes the most recent
//! error on the calling thread. Thresholds cross the boundary in dB.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use clustered_hetnet::config::Experiment;
use clustered_hetnet::experiment::db_to_linear;
use clustered_hetnet::sim::{estimate, SimSettings};
use clustered_hetnet::special::{closed_access_factor_h, interference_factor_g};
use clustered_hetnet::{Analyzer, Error};

/// Result codes shared by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// The configuration failed to parse or validate.
    Config = 3,
    /// An argument is outside the domain of the operation.
    Domain = 4,
    NonConvergence = 5,
    /// The output buffer is shorter than required.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Coverage at one threshold.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChnCoverage {
    pub tau_db: f64,
    pub total: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Valid only when `has_ppp_limit` is true.
    pub ppp_limit: f64,
    pub has_ppp_limit: bool,
}

/// Monte Carlo coverage estimate with its Wilson half-width.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChnSimEstimate {
    pub mean: f64,
    pub half_width: f64,
    pub trials: u64,
    pub seed: u64,
}

/// Opaque network handle.
pub struct ChnNetwork {
    experiment: Experiment,
    analyzer: Analyzer,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let text = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = text);
}

fn status_of(err: &Error) -> ChnStatus {
    match err {
        Error::Config(_) | Error::Validation(_) => ChnStatus::Config,
        Error::NonConvergence { .. } => ChnStatus::NonConvergence,
        Error::Domain(_)
        | Error::ModelMismatch { .. }
        | Error::DegenerateConditioning(_)
        | Error::DegenerateWeights(_) => ChnStatus::Domain,
    }
}

/// Runs `f`, recording errors and catching panics.
fn guard<F: FnOnce() -> Result<(), (ChnStatus, String)>>(f: F) -> ChnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            ChnStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside clustered-hetnet");
            ChnStatus::Panic
        }
    }
}

fn lib_err(err: Error) -> (ChnStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (ChnStatus, String) {
    (ChnStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a>(net: *const ChnNetwork) -> Result<&'a ChnNetwork, (ChnStatus, String)> {
    net.as_ref().ok_or_else(|| null("network handle"))
}

unsafe fn out_ref<'a, T>(out: *mut T) -> Result<&'a mut T, (ChnStatus, String)> {
    out.as_mut().ok_or_else(|| null("output pointer"))
}

/// Parses TOML configuration text into a new handle stored in `*out`.
///
/// # Safety
/// `toml_text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chn_network_from_toml(toml_text: *const c_char, out: *mut *mut ChnNetwork) -> ChnStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = ptr::null_mut();
        if toml_text.is_null() {
            return Err(null("configuration text"));
        }
        let text = CStr::from_ptr(toml_text)
            .to_str()
            .map_err(|e| (ChnStatus::InvalidUtf8, e.to_string()))?;
        let experiment = Experiment::from_toml_str(text).map_err(lib_err)?;
        let analyzer = Analyzer::new(experiment.network.clone(), experiment.quadrature).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(ChnNetwork { experiment, analyzer }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `net` must come from `chn_network_from_toml` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn chn_network_free(net: *mut ChnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Number of Poisson tiers `K`; association arrays hold `K + 1` entries. Returns 0 for null.
///
/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn chn_network_num_tiers(net: *const ChnNetwork) -> usize {
    net.as_ref().map_or(0, |n| n.experiment.network.num_tiers())
}

/// Coverage, bounds and independent-user limit at `tau_db`.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chn_coverage(net: *const ChnNetwork, tau_db: f64, out: *mut ChnCoverage) -> ChnStatus {
    guard(|| {
        let net = handle(net)?;
        let out = out_ref(out)?;
        let r = net.analyzer.coverage(db_to_linear(tau_db)).map_err(lib_err)?;
        *out = ChnCoverage {
            tau_db,
            total: r.total,
            lower_bound: r.lower_bound,
            upper_bound: r.upper_bound,
            ppp_limit: r.ppp_limit.unwrap_or(f64::NAN),
            has_ppp_limit: r.ppp_limit.is_some(),
        };
        Ok(())
    })
}

/// Writes association probabilities of tiers `0..=K` into `out[0..=K]`.
///
/// # Safety
/// `out` must point to at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn chn_association(net: *const ChnNetwork, out: *mut f64, len: usize) -> ChnStatus {
    guard(|| {
        let net = handle(net)?;
        if out.is_null() {
            return Err(null("output buffer"));
        }
        let need = net.experiment.network.num_tiers() + 1;
        if len < need {
            return Err((ChnStatus::BufferTooSmall, format!("need {need} entries, got {len}")));
        }
        // association does not depend on the threshold
        let r = net.analyzer.coverage(0.0).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(out, need).copy_from_slice(&r.assoc);
        Ok(())
    })
}

/// Monte Carlo estimate at `tau_db` using the handle's simulation settings
/// with `trials` and `seed` substituted.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chn_simulate(
    net: *const ChnNetwork,
    tau_db: f64,
    trials: u64,
    seed: u64,
    out: *mut ChnSimEstimate,
) -> ChnStatus {
    guard(|| {
        let net = handle(net)?;
        let out = out_ref(out)?;
        let settings = SimSettings {
            trials,
            master_seed: seed,
            ..net.experiment.sim.clone()
        };
        let e = estimate(&net.experiment.network, db_to_linear(tau_db), &settings).map_err(lib_err)?;
        *out = ChnSimEstimate {
            mean: e.mean,
            half_width: e.half_width,
            trials: e.trials,
            seed: e.seed,
        };
        Ok(())
    })
}

/// Open-access interference factor `G(alpha, tau)` with `tau` linear.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chn_interference_factor_g(alpha: f64, tau: f64, out: *mut f64) -> ChnStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = interference_factor_g(alpha, tau, &Default::default()).map_err(lib_err)?;
        Ok(())
    })
}

/// Closed-access interference factor `H(alpha, tau)` with `tau` linear.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn chn_closed_access_factor_h(alpha: f64, tau: f64, out: *mut f64) -> ChnStatus {
    guard(|| {
        let out = out_ref(out)?;
        *out = closed_access_factor_h(alpha, tau).map_err(lib_err)?;
        Ok(())
    })
}

/// Message of the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn chn_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn chn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
