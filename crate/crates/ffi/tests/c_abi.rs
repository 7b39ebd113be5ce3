use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use clustered_hetnet_ffi::*;

const CONFIG: &str = r#"
alpha = 4.0
cluster_tier = 2

[cluster]
model = "thomas"
sigma = 20.0

[[tiers]]
power_w = 1000.0
lambda_open = { count = 1, disc_radius = 500.0 }

[[tiers]]
power_w = 1.0
lambda_open = { count = 100, disc_radius = 500.0 }
lambda_closed = { count = 100, disc_radius = 500.0 }
"#;

fn load(text: &str) -> (ChnStatus, *mut ChnNetwork) {
    let c = CString::new(text).unwrap();
    let mut net = ptr::null_mut();
    let status = unsafe { chn_network_from_toml(c.as_ptr(), &mut net) };
    (status, net)
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(chn_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn handle_lifecycle_and_queries() {
    let (status, net) = load(CONFIG);
    assert_eq!(status, ChnStatus::Ok);
    assert!(!net.is_null());
    unsafe {
        assert_eq!(chn_network_num_tiers(net), 2);
        let mut assoc = [0.0; 3];
        assert_eq!(chn_association(net, assoc.as_mut_ptr(), 3), ChnStatus::Ok);
        assert!((assoc.iter().sum::<f64>() - 1.0).abs() < 1e-6);

        let mut short = [0.0; 2];
        assert_eq!(chn_association(net, short.as_mut_ptr(), 2), ChnStatus::BufferTooSmall);
        assert!(last_error().contains("need 3"));

        let mut cov = ChnCoverage::default();
        assert_eq!(chn_coverage(net, 0.0, &mut cov), ChnStatus::Ok);
        assert!(cov.lower_bound <= cov.total && cov.total <= cov.upper_bound);
        assert!(cov.has_ppp_limit);
        assert_eq!(last_error(), "");

        let mut est = ChnSimEstimate::default();
        assert_eq!(chn_simulate(net, 0.0, 2000, 7, &mut est), ChnStatus::Ok);
        assert_eq!(est.trials, 2000);
        assert_eq!(est.seed, 7);
        assert!((est.mean - cov.total).abs() <= 0.05);
        let mut again = ChnSimEstimate::default();
        chn_simulate(net, 0.0, 2000, 7, &mut again);
        assert_eq!(est, again);

        chn_network_free(net);
        chn_network_free(ptr::null_mut());
    }
}

#[test]
fn error_codes() {
    let (status, net) = load(&CONFIG.replace("alpha = 4.0", "alpha = 2.0"));
    assert_eq!(status, ChnStatus::Config);
    assert!(net.is_null());
    assert!(last_error().contains("alpha must exceed 2"));

    let (status, _) = load("alpha = ");
    assert_eq!(status, ChnStatus::Config);

    unsafe {
        let mut net = ptr::null_mut();
        assert_eq!(chn_network_from_toml(ptr::null(), &mut net), ChnStatus::NullPointer);
        let bad = [0xffu8, 0xfe, 0];
        assert_eq!(chn_network_from_toml(bad.as_ptr().cast(), &mut net), ChnStatus::InvalidUtf8);

        let mut cov = ChnCoverage::default();
        assert_eq!(chn_coverage(ptr::null(), 0.0, &mut cov), ChnStatus::NullPointer);
        assert_eq!(chn_network_num_tiers(ptr::null()), 0);

        let mut v = 0.0;
        assert_eq!(chn_interference_factor_g(4.0, 1.0, &mut v), ChnStatus::Ok);
        assert!((v - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
        assert_eq!(chn_closed_access_factor_h(4.0, 1.0, &mut v), ChnStatus::Ok);
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-14);
        assert_eq!(chn_closed_access_factor_h(1.5, 1.0, &mut v), ChnStatus::Domain);
        assert_eq!(chn_interference_factor_g(4.0, 1.0, ptr::null_mut()), ChnStatus::NullPointer);
    }
    let version = unsafe { CStr::from_ptr(chn_version()) };
    assert_eq!(version.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn cc_available() -> bool {
    Command::new("cc").arg("--version").output().is_ok()
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !cc_available() {
        eprintln!("no C compiler; skipping header check");
        return;
    }
    let header = crate_dir().join("include/clustered_hetnet.h");
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let status = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .status()
            .unwrap();
        assert!(status.success(), "{compiler} rejected the header");
    }
}

#[test]
fn c_program_links_against_static_library() {
    if !cc_available() {
        eprintln!("no C compiler; skipping link check");
        return;
    }
    // the test executable lives in <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libclustered_hetnet_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; skipping link check", lib.display());
        return;
    }
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "linking the C smoke test failed");
    let output = Command::new(&bin).output().unwrap();
    assert!(output.status.success(), "C smoke test exited with {:?}", output.status);
    let values: Vec<f64> = String::from_utf8(output.stdout)
        .unwrap()
        .split_whitespace()
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 3);
    assert!(values[1] <= values[0] && values[0] <= values[2]);
}
