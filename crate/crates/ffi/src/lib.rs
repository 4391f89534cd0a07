//! C ABI over the `trapdiff` solvers.
//!
//! Every fallible function returns a [`TrapdiffStatus`] and writes results
//! through out-pointers. On failure the message is available from
//! [`trapdiff_last_error`] on the same thread. Panics are caught at the
//! boundary and reported as `TRAPDIFF_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use trapdiff::fde::{self, FdeParams};
use trapdiff::ilt::{self, BromwichNodes, InversionConfig};
use trapdiff::specfun;
use trapdiff::transport::{RteSolver, TransportParams};
use trapdiff::waiting::{WaitingFamily, WaitingTimeModel};
use trapdiff::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrapdiffStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Input outside the domain of the function.
    Domain = 3,
    /// Quadrature, eigen-solve or inversion failure.
    Numeric = 4,
    /// The user callback returned nonzero.
    Callback = 5,
    Panic = 6,
}

pub const TRAPDIFF_FAMILY_PARETO: u32 = 0;
pub const TRAPDIFF_FAMILY_LOG_LOGISTIC: u32 = 1;
pub const TRAPDIFF_FAMILY_FRECHET: u32 = 2;

/// Cross sections in 1/cm, speed in cm/min, waiting-time scale in min.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TrapdiffParams {
    pub sigma_a: f64,
    pub sigma_s: f64,
    pub sigma_trap: f64,
    pub speed: f64,
    /// One of the `TRAPDIFF_FAMILY_*` constants.
    pub family: u32,
    pub alpha: f64,
    pub gamma: f64,
}

/// Double-exponential Bromwich inversion settings.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct TrapdiffInversion {
    pub sigma: f64,
    pub m: f64,
    pub j: u32,
    pub k: f64,
}

/// Transform callback: writes `F(s)` to `out_re`/`out_im` and returns 0, or
/// returns nonzero to abort the inversion.
pub type TrapdiffTransform =
    Option<unsafe extern "C" fn(s_re: f64, s_im: f64, user_data: *mut c_void, out_re: *mut f64, out_im: *mut f64) -> i32>;

/// Opaque discrete-ordinates solver with its spectrum cache.
pub struct TrapdiffRteSolver {
    inner: RteSolver,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum Fail {
    Status(TrapdiffStatus, String),
    Core(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Core(e)
    }
}

fn status_of(e: &Error) -> TrapdiffStatus {
    match e {
        _ if e.is_numeric() => TrapdiffStatus::Numeric,
        Error::Domain(_) | Error::UndefinedAtSource(_) => TrapdiffStatus::Domain,
        Error::Profile { source, .. } => status_of(source),
        _ => TrapdiffStatus::InvalidArgument,
    }
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NULs removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TrapdiffStatus {
    let (status, msg) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => return TrapdiffStatus::Ok,
        Ok(Err(Fail::Status(s, m))) => (s, m),
        Ok(Err(Fail::Core(e))) => (status_of(&e), e.to_string()),
        Err(payload) => {
            let m = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            (TrapdiffStatus::Panic, format!("panic: {m}"))
        }
    };
    set_last_error(msg);
    status
}

fn null(name: &str) -> Fail {
    Fail::Status(TrapdiffStatus::NullPointer, format!("{name} is null"))
}

unsafe fn put<T>(out: *mut T, name: &str, v: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(name));
    }
    out.write(v);
    Ok(())
}

unsafe fn read<'a, T>(p: *const T, name: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(name))
}

fn transport_params(p: &TrapdiffParams) -> Result<TransportParams, Fail> {
    let family = match p.family {
        TRAPDIFF_FAMILY_PARETO => WaitingFamily::ParetoType,
        TRAPDIFF_FAMILY_LOG_LOGISTIC => WaitingFamily::LogLogisticType,
        TRAPDIFF_FAMILY_FRECHET => WaitingFamily::FrechetType,
        other => {
            return Err(Fail::Status(TrapdiffStatus::InvalidArgument, format!("unknown waiting-time family {other}")))
        }
    };
    let waiting = WaitingTimeModel::new(family, p.alpha, p.gamma)?;
    Ok(TransportParams::new(p.sigma_a, p.sigma_s, p.sigma_trap, p.speed, waiting)?)
}

unsafe fn inversion(cfg: *const TrapdiffInversion) -> Result<InversionConfig, Fail> {
    let c = match cfg.as_ref() {
        None => InversionConfig::default(),
        Some(c) => InversionConfig { sigma: c.sigma, m: c.m, j: c.j, k: c.k },
    };
    c.validate()?;
    Ok(c)
}

/// Message of the last failed call on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn trapdiff_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn trapdiff_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

#[no_mangle]
pub extern "C" fn trapdiff_inversion_default() -> TrapdiffInversion {
    let d = InversionConfig::default();
    TrapdiffInversion { sigma: d.sigma, m: d.m, j: d.j, k: d.k }
}

/// Gauss–Legendre rule of order `n` on (0, 1); `nodes` and `weights` must
/// hold `n` values each.
///
/// # Safety
/// The output arrays must be valid for `n` writes.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_gauss_legendre(n: usize, nodes: *mut f64, weights: *mut f64) -> TrapdiffStatus {
    guard(|| {
        if nodes.is_null() || weights.is_null() {
            return Err(null("nodes/weights"));
        }
        let q = specfun::gauss_legendre(n)?;
        ptr::copy_nonoverlapping(q.nodes().as_ptr(), nodes, n);
        ptr::copy_nonoverlapping(q.weights().as_ptr(), weights, n);
        Ok(())
    })
}

/// Mainardi function `M_α(z)`, `z ≥ 0`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_mainardi(alpha: f64, z: f64, out: *mut f64) -> TrapdiffStatus {
    guard(|| put(out, "out", specfun::mainardi(alpha, z)?))
}

/// One-sided α-stable density with Laplace transform `exp(-s^α)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_stable_density(alpha: f64, t: f64, out: *mut f64) -> TrapdiffStatus {
    guard(|| put(out, "out", specfun::stable_density_g(alpha, t)?))
}

/// Inverts a user transform at `t`. `cfg` may be null for the defaults.
///
/// # Safety
/// `out` must be valid for one write; `f` must be safe to call with
/// `user_data`.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_invert(
    f: TrapdiffTransform,
    user_data: *mut c_void,
    t: f64,
    cfg: *const TrapdiffInversion,
    out: *mut f64,
) -> TrapdiffStatus {
    guard(|| {
        let f = f.ok_or_else(|| null("transform"))?;
        let cfg = inversion(cfg)?;
        let mut rejected = None;
        let result = ilt::invert(
            |s| {
                let (mut re, mut im) = (f64::NAN, f64::NAN);
                let rc = f(s.re, s.im, user_data, &mut re, &mut im);
                if rc != 0 {
                    rejected = Some(rc);
                    return Err(Error::InvalidArgument(format!("callback returned {rc} at s = {s}")));
                }
                Ok(Complex64::new(re, im))
            },
            t,
            &cfg,
        );
        match (result, rejected) {
            (Ok(v), _) => put(out, "out", v),
            (Err(e), Some(_)) => Err(Fail::Status(TrapdiffStatus::Callback, e.to_string())),
            (Err(e), None) => Err(e.into()),
        }
    })
}

/// Creates a solver with `ordinates` positive directions. Free it with
/// [`trapdiff_rte_free`].
///
/// # Safety
/// `params` must point to a valid struct and `out` be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_rte_new(
    params: *const TrapdiffParams,
    ordinates: usize,
    out: *mut *mut TrapdiffRteSolver,
) -> TrapdiffStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = transport_params(read(params, "params")?)?;
        let inner = RteSolver::new(p, specfun::gauss_legendre(ordinates)?)?;
        out.write(Box::into_raw(Box::new(TrapdiffRteSolver { inner })));
        Ok(())
    })
}

/// # Safety
/// `solver` must come from [`trapdiff_rte_new`] and not be used afterwards.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_rte_free(solver: *mut TrapdiffRteSolver) {
    if !solver.is_null() {
        drop(Box::from_raw(solver));
    }
}

/// Laplace-domain density `ū(x, s)`.
///
/// # Safety
/// `solver` must be a live handle; the outputs must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_rte_laplace_density(
    solver: *const TrapdiffRteSolver,
    s_re: f64,
    s_im: f64,
    x: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TrapdiffStatus {
    guard(|| {
        let solver = read(solver, "solver")?;
        if out_re.is_null() || out_im.is_null() {
            return Err(null("out_re/out_im"));
        }
        let v = solver.inner.laplace_density(Complex64::new(s_re, s_im), x)?;
        out_re.write(v.re);
        out_im.write(v.im);
        Ok(())
    })
}

/// Density `u(x_i, t)` at `n` points. Spectra are computed once per node and
/// shared across the points. `cfg` may be null for the defaults.
///
/// # Safety
/// `solver` must be a live handle; `xs` and `out` must be valid for `n`
/// reads and writes.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_rte_profile(
    solver: *const TrapdiffRteSolver,
    xs: *const f64,
    n: usize,
    t: f64,
    cfg: *const TrapdiffInversion,
    out: *mut f64,
) -> TrapdiffStatus {
    guard(|| {
        let solver = &read(solver, "solver")?.inner;
        if n == 0 {
            return Ok(());
        }
        if xs.is_null() || out.is_null() {
            return Err(null("xs/out"));
        }
        let xs = std::slice::from_raw_parts(xs, n);
        let nodes = BromwichNodes::new(t, &inversion(cfg)?)?;
        let spectra = nodes
            .nodes()
            .iter()
            .map(|node| if node.weight == 0.0 { Ok(None) } else { solver.spectrum(node.s).map(Some) })
            .collect::<Result<Vec<_>, Error>>()?;
        let mut values = vec![Complex64::new(0.0, 0.0); spectra.len()];
        for (i, &x) in xs.iter().enumerate() {
            for (v, sp) in values.iter_mut().zip(&spectra) {
                *v = sp.as_ref().map_or(Complex64::new(0.0, 0.0), |sp| sp.density(x));
            }
            out.add(i).write(nodes.combine(&values)?);
        }
        Ok(())
    })
}

/// Time-fractional diffusion density with the same parameters; `tol` is the
/// quadrature target (e.g. 1e-8).
///
/// # Safety
/// `params` must point to a valid struct and `out` be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_u_de(
    params: *const TrapdiffParams,
    x: f64,
    t: f64,
    tol: f64,
    out: *mut f64,
) -> TrapdiffStatus {
    guard(|| {
        let p = FdeParams::from_transport(&transport_params(read(params, "params")?)?);
        let u = if p.alpha == 0.5 { fde::u_de_half(&p, x, t, tol)? } else { fde::u_de_general(&p, x, t, tol)? };
        put(out, "out", u)
    })
}

/// Normal-diffusion limit of the same parameters.
///
/// # Safety
/// `params` must point to a valid struct and `out` be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn trapdiff_normal_diffusion(
    params: *const TrapdiffParams,
    x: f64,
    t: f64,
    out: *mut f64,
) -> TrapdiffStatus {
    guard(|| {
        let p = FdeParams::from_transport(&transport_params(read(params, "params")?)?);
        put(out, "out", fde::normal_diffusion(&p, x, t)?)
    })
}
