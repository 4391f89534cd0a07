use std::ffi::{c_void, CStr};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use num_complex::Complex64;
use trapdiff::fde::{self, FdeParams};
use trapdiff::harness::builtin;
use trapdiff::ilt::{self, InversionConfig};
use trapdiff::specfun;
use trapdiff::transport::RteSolver;
use trapdiff_ffi::*;

fn fig1a() -> TrapdiffParams {
    let tp = builtin("fig1a").unwrap().transport;
    TrapdiffParams {
        sigma_a: tp.sigma_a,
        sigma_s: tp.sigma_s,
        sigma_trap: tp.sigma_trap,
        speed: tp.speed,
        family: TRAPDIFF_FAMILY_PARETO,
        alpha: tp.waiting.alpha(),
        gamma: tp.waiting.gamma(),
    }
}

fn last_error() -> String {
    let p = trapdiff_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn scalar_functions_match_the_core_crate() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(trapdiff_mainardi(0.3, 2.0, &mut v), TrapdiffStatus::Ok);
        assert_eq!(v, specfun::mainardi(0.3, 2.0).unwrap());
        assert_eq!(trapdiff_stable_density(0.7, 3.0, &mut v), TrapdiffStatus::Ok);
        assert_eq!(v, specfun::stable_density_g(0.7, 3.0).unwrap());

        let p = fig1a();
        let core = FdeParams::from_transport(&builtin("fig1a").unwrap().transport);
        assert_eq!(trapdiff_u_de(&p, 2.0, 10.0, 1e-8, &mut v), TrapdiffStatus::Ok);
        assert_eq!(v, fde::u_de_half(&core, 2.0, 10.0, 1e-8).unwrap());
        assert_eq!(trapdiff_normal_diffusion(&p, 2.0, 10.0, &mut v), TrapdiffStatus::Ok);
        assert_eq!(v, fde::normal_diffusion(&core, 2.0, 10.0).unwrap());

        let mut nodes = [0.0; 6];
        let mut weights = [0.0; 6];
        assert_eq!(trapdiff_gauss_legendre(6, nodes.as_mut_ptr(), weights.as_mut_ptr()), TrapdiffStatus::Ok);
        let q = specfun::gauss_legendre(6).unwrap();
        assert_eq!(&nodes[..], q.nodes());
        assert_eq!(&weights[..], q.weights());
    }
}

#[test]
fn errors_set_status_and_message() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(trapdiff_mainardi(0.5, -1.0, &mut v), TrapdiffStatus::Domain);
        assert!(last_error().contains("Mainardi"));
        assert_eq!(trapdiff_mainardi(1.5, 1.0, &mut v), TrapdiffStatus::InvalidArgument);
        assert_eq!(trapdiff_mainardi(0.5, 1.0, ptr::null_mut()), TrapdiffStatus::NullPointer);
        assert_eq!(trapdiff_u_de(&fig1a(), 1.0, 10.0, 1e-300, &mut v), TrapdiffStatus::Numeric);

        let mut bad = fig1a();
        bad.family = 9;
        let mut h = ptr::null_mut();
        assert_eq!(trapdiff_rte_new(&bad, 8, &mut h), TrapdiffStatus::InvalidArgument);
        assert!(last_error().contains("family"));
        assert!(h.is_null());
        bad = fig1a();
        bad.sigma_trap = -1.0;
        assert_eq!(trapdiff_rte_new(&bad, 8, &mut h), TrapdiffStatus::InvalidArgument);
        assert_eq!(trapdiff_rte_new(ptr::null(), 8, &mut h), TrapdiffStatus::NullPointer);
        trapdiff_rte_free(ptr::null_mut());
    }
}

#[test]
fn solver_handle_reproduces_the_core_inversion() {
    let core = RteSolver::new(builtin("fig1a").unwrap().transport, specfun::gauss_legendre(12).unwrap()).unwrap();
    let xs = [0.5, 1.0, 3.0];
    let mut out = [0.0; 3];
    unsafe {
        let mut h = ptr::null_mut();
        assert_eq!(trapdiff_rte_new(&fig1a(), 12, &mut h), TrapdiffStatus::Ok);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(trapdiff_rte_laplace_density(h, 0.3, 1.1, 1.0, &mut re, &mut im), TrapdiffStatus::Ok);
        assert_eq!(Complex64::new(re, im), core.laplace_density(Complex64::new(0.3, 1.1), 1.0).unwrap());
        assert_eq!(trapdiff_rte_profile(h, xs.as_ptr(), 3, 100.0, ptr::null(), out.as_mut_ptr()), TrapdiffStatus::Ok);
        trapdiff_rte_free(h);
    }
    for (x, u) in xs.iter().zip(out) {
        let want = ilt::invert(|s| core.laplace_density(s, *x), 100.0, &InversionConfig::default()).unwrap();
        assert!((u - want).abs() <= 1e-13 * want.abs(), "{x}: {u} vs {want}");
    }
}

unsafe extern "C" fn shifted(re: f64, im: f64, user: *mut c_void, out_re: *mut f64, out_im: *mut f64) -> i32 {
    let a = *(user as *const f64);
    let v = Complex64::new(1.0, 0.0) / Complex64::new(re + a, im);
    *out_re = v.re;
    *out_im = v.im;
    0
}

unsafe extern "C" fn refuse(_: f64, _: f64, _: *mut c_void, _: *mut f64, _: *mut f64) -> i32 {
    7
}

#[test]
fn callback_inversion() {
    let mut a = 1.0f64;
    let mut v = 0.0;
    unsafe {
        let cfg = trapdiff_inversion_default();
        assert_eq!(cfg.j, InversionConfig::default().j);
        let st = trapdiff_invert(Some(shifted), &mut a as *mut f64 as *mut c_void, 2.0, &cfg, &mut v);
        assert_eq!(st, TrapdiffStatus::Ok);
        assert!((v - (-2.0f64).exp()).abs() < 1e-5 * (-2.0f64).exp());
        assert_eq!(trapdiff_invert(Some(refuse), ptr::null_mut(), 2.0, ptr::null(), &mut v), TrapdiffStatus::Callback);
        assert!(last_error().contains("callback returned 7"));
        assert_eq!(trapdiff_invert(None, ptr::null_mut(), 2.0, ptr::null(), &mut v), TrapdiffStatus::NullPointer);
        let broken = TrapdiffInversion { j: 0, ..cfg };
        assert_eq!(trapdiff_invert(Some(refuse), ptr::null_mut(), 2.0, &broken, &mut v), TrapdiffStatus::InvalidArgument);
    }
}

#[test]
fn version_is_the_package_version() {
    let v = unsafe { CStr::from_ptr(trapdiff_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

// Builds a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libtrapdiff_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let tmp = tempfile::tempdir().unwrap();
    let bin = tmp.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("cc runs");
    assert!(status.success());
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    let fields: Vec<f64> = String::from_utf8(run.stdout).unwrap().split_whitespace().map(|s| s.parse().unwrap()).collect();
    assert_eq!(fields.len(), 3);
    assert!(fields[0] > fields[1] && fields[1] > 0.0);
    assert!((fields[2] - 10.0).abs() < 1e-4);
}
