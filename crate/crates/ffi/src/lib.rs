//! C ABI over `omas-core`.
//!
//! Objects are exposed as opaque handles created by `*_new` functions and
//! released with the matching `*_free`. Every fallible function returns an
//! [`OmasStatus`]; on failure a description is available from
//! [`omas_last_error_message`] on the same thread. Output pointers are only
//! written on success.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use omas_core::age::AgeDistribution;
use omas_core::infection::{
    infection_age_cdf, infection_bound_algebraic, infection_bound_matrix, solve_pk, InfectionAge,
    InfectionChain,
};
use omas_core::params::{SystemParams, ValueDistribution};
use omas_core::sim::{steady_state_mse_paired, RunConfig};
use omas_core::{ping_bound, relaxed_bound, Error};

/// Result codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmasStatus {
    Ok = 0,
    InvalidParams = 1,
    RatioUndefined = 2,
    Indeterminate = 3,
    ResolventUndefined = 4,
    QuadratureFailed = 5,
    OdeFailed = 6,
    NoDynamics = 7,
    InvalidSpec = 8,
    Io = 9,
    NullPointer = 10,
    InvalidArgument = 11,
    Panic = 12,
}

impl OmasBoundMethod {
    fn from_raw(raw: c_int) -> Option<Self> {
        [
            Self::Ping,
            Self::InfectionMatrix,
            Self::InfectionAlgebraic,
            Self::Relaxed,
        ]
        .into_iter()
        .find(|m| *m as c_int == raw)
    }
}

impl OmasValueDist {
    fn from_raw(raw: c_int) -> Option<Self> {
        [Self::Normal, Self::TwoPoint, Self::Uniform]
            .into_iter()
            .find(|d| *d as c_int == raw)
    }
}

impl From<&Error> for OmasStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParams(_) => Self::InvalidParams,
            Error::RatioUndefined => Self::RatioUndefined,
            Error::Indeterminate => Self::Indeterminate,
            Error::ResolventUndefined { .. } => Self::ResolventUndefined,
            Error::Quadrature { .. } => Self::QuadratureFailed,
            Error::Ode { .. } => Self::OdeFailed,
            Error::NoDynamics => Self::NoDynamics,
            Error::InvalidSpec(_) => Self::InvalidSpec,
            Error::Io(_) => Self::Io,
        }
    }
}

/// Closed-form lower bounds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmasBoundMethod {
    Ping = 0,
    InfectionMatrix = 1,
    InfectionAlgebraic = 2,
    Relaxed = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmasValueDist {
    Normal = 0,
    TwoPoint = 1,
    Uniform = 2,
}

/// Opaque system parameters.
pub struct OmasParams(SystemParams);

/// Opaque infection age distribution, reusable across CDF queries.
pub struct OmasInfectionAge(InfectionAge);

/// Mean-square error estimates from one simulation call.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct OmasMseEstimate {
    pub gossip_mean: f64,
    pub gossip_std_error: f64,
    pub optimal_mean: f64,
    pub optimal_std_error: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: OmasStatus, msg: impl Into<String>) -> OmasStatus {
    set_last_error(msg.into());
    status
}

fn guard(f: impl FnOnce() -> Result<(), OmasStatus>) -> OmasStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OmasStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(OmasStatus::Panic, format!("panic: {msg}"))
        }
    }
}

fn core_err(e: Error) -> OmasStatus {
    fail(OmasStatus::from(&e), e.to_string())
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, OmasStatus> {
    p.as_ref()
        .ok_or_else(|| fail(OmasStatus::NullPointer, format!("{name} is NULL")))
}

fn check_out<T>(p: *mut T, name: &str) -> Result<(), OmasStatus> {
    if p.is_null() {
        Err(fail(OmasStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

/// Creates system parameters. `*out` receives a handle to release with
/// [`omas_params_free`].
///
/// # Safety
/// `out` must be NULL or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn omas_params_new(
    n_agents: usize,
    lambda_r: f64,
    lambda_c: f64,
    sigma_sq: f64,
    out: *mut *mut OmasParams,
) -> OmasStatus {
    guard(|| {
        check_out(out, "out")?;
        let params = SystemParams::new(n_agents, lambda_r, lambda_c, sigma_sq).map_err(core_err)?;
        *out = Box::into_raw(Box::new(OmasParams(params)));
        Ok(())
    })
}

/// Releases parameters created by [`omas_params_new`]. NULL is ignored.
///
/// # Safety
/// `params` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omas_params_free(params: *mut OmasParams) {
    if !params.is_null() {
        drop(Box::from_raw(params));
    }
}

/// Selects the distribution of fresh agent values used by simulations.
/// `dist` is an `OmasValueDist`.
///
/// # Safety
/// `params` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn omas_params_set_value_dist(
    params: *mut OmasParams,
    dist: c_int,
) -> OmasStatus {
    guard(|| {
        let p = params
            .as_mut()
            .ok_or_else(|| fail(OmasStatus::NullPointer, "params is NULL"))?;
        let dist = OmasValueDist::from_raw(dist).ok_or_else(|| {
            fail(
                OmasStatus::InvalidArgument,
                format!("unknown value distribution {dist}"),
            )
        })?;
        let dist = match dist {
            OmasValueDist::Normal => ValueDistribution::Normal,
            OmasValueDist::TwoPoint => ValueDistribution::TwoPoint,
            OmasValueDist::Uniform => ValueDistribution::Uniform,
        };
        p.0 = p.0.with_value_dist(dist);
        Ok(())
    })
}

/// Evaluates a lower bound on the steady-state mean-square error.
/// `method` is an `OmasBoundMethod`.
///
/// # Safety
/// `params` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn omas_bound(
    params: *const OmasParams,
    method: c_int,
    out: *mut f64,
) -> OmasStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        check_out(out, "out")?;
        let method = OmasBoundMethod::from_raw(method).ok_or_else(|| {
            fail(
                OmasStatus::InvalidArgument,
                format!("unknown bound method {method}"),
            )
        })?;
        let bound = match method {
            OmasBoundMethod::Ping => ping_bound(p),
            OmasBoundMethod::InfectionMatrix => infection_bound_matrix(p),
            OmasBoundMethod::InfectionAlgebraic => infection_bound_algebraic(p),
            OmasBoundMethod::Relaxed => relaxed_bound(p),
        }
        .map_err(core_err)?;
        *out = bound.value;
        Ok(())
    })
}

/// Writes the infected-count distribution `P(s)` into `out[0..len]`, where
/// `out[k]` is the probability of `k + 1` informed agents. `len` must equal
/// the number of agents.
///
/// # Safety
/// `params` must be NULL or a live handle; `out` must be NULL or valid for
/// `len` writes.
#[no_mangle]
pub unsafe extern "C" fn omas_infection_pk(
    params: *const OmasParams,
    s: f64,
    out: *mut f64,
    len: usize,
) -> OmasStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        check_out(out, "out")?;
        if len != p.n_agents() {
            return Err(fail(
                OmasStatus::InvalidArgument,
                format!("buffer length {len} does not match {} agents", p.n_agents()),
            ));
        }
        let chain = InfectionChain::from_params(p);
        let pk = solve_pk(&chain, s).map_err(core_err)?;
        std::slice::from_raw_parts_mut(out, len).copy_from_slice(&pk);
        Ok(())
    })
}

/// Builds the infection age distribution for the communication rate and
/// agent count of `params`.
///
/// # Safety
/// `params` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn omas_infection_age_new(
    params: *const OmasParams,
    out: *mut *mut OmasInfectionAge,
) -> OmasStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        check_out(out, "out")?;
        let age = infection_age_cdf(&InfectionChain::from_params(p)).map_err(core_err)?;
        *out = Box::into_raw(Box::new(OmasInfectionAge(age)));
        Ok(())
    })
}

/// `F(s)` of the infection age distribution.
///
/// # Safety
/// `age` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn omas_infection_age_cdf(
    age: *const OmasInfectionAge,
    s: f64,
    out: *mut f64,
) -> OmasStatus {
    guard(|| {
        let a = &deref(age, "age")?.0;
        check_out(out, "out")?;
        let v = a.cdf(s);
        if v.is_nan() {
            return Err(fail(
                OmasStatus::OdeFailed,
                format!("solver failed at s = {s}"),
            ));
        }
        *out = v;
        Ok(())
    })
}

/// Releases a handle from [`omas_infection_age_new`]. NULL is ignored.
///
/// # Safety
/// `age` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn omas_infection_age_free(age: *mut OmasInfectionAge) {
    if !age.is_null() {
        drop(Box::from_raw(age));
    }
}

/// Simulates `replications` independent runs of `events` events each and
/// reports the error of gossip and of the optimal estimator on the same runs.
/// Results depend only on the arguments, not on the thread count.
///
/// # Safety
/// `params` must be NULL or a live handle; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn omas_simulate_mse(
    params: *const OmasParams,
    replications: usize,
    events: usize,
    seed: u64,
    out: *mut OmasMseEstimate,
) -> OmasStatus {
    guard(|| {
        let p = &deref(params, "params")?.0;
        check_out(out, "out")?;
        if replications == 0 || events == 0 {
            return Err(fail(
                OmasStatus::InvalidArgument,
                "replications and events must be positive",
            ));
        }
        let est = steady_state_mse_paired(p, &RunConfig::new(replications, events, seed))
            .map_err(core_err)?;
        *out = OmasMseEstimate {
            gossip_mean: est.gossip.mean,
            gossip_std_error: est.gossip.std_error,
            optimal_mean: est.optimal.mean,
            optimal_std_error: est.optimal.std_error,
        };
        Ok(())
    })
}

/// Message for the last failure on this thread, or NULL after a success.
/// The string stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn omas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn omas_status_str(status: OmasStatus) -> *const c_char {
    let s: &'static CStr = match status {
        OmasStatus::Ok => c"ok",
        OmasStatus::InvalidParams => c"invalid parameters",
        OmasStatus::RatioUndefined => c"rate ratio undefined",
        OmasStatus::Indeterminate => c"indeterminate limit",
        OmasStatus::ResolventUndefined => c"resolvent undefined",
        OmasStatus::QuadratureFailed => c"quadrature failed",
        OmasStatus::OdeFailed => c"ODE solver failed",
        OmasStatus::NoDynamics => c"no dynamics",
        OmasStatus::InvalidSpec => c"invalid specification",
        OmasStatus::Io => c"i/o error",
        OmasStatus::NullPointer => c"null pointer",
        OmasStatus::InvalidArgument => c"invalid argument",
        OmasStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Library version, e.g. `"0.1.0"`.
#[no_mangle]
pub extern "C" fn omas_version() -> *const c_char {
    static VERSION: &CStr =
        match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
            Ok(v) => v,
            Err(_) => panic!("version has no interior NUL"),
        };
    VERSION.as_ptr()
}
