use std::ffi::{CStr, CString};
use std::ptr;

use qlock_ffi::*;

fn werner(alpha: f64) -> *mut QlockState {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { qlock_state_werner(alpha, &mut s) }, QlockStatus::Ok);
    s
}

fn gaps(eps1: f64, eps2: f64) -> *mut QlockObservable {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { qlock_observable_from_gaps(eps1, eps2, &mut h) }, QlockStatus::Ok);
    h
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(qlock_last_error_message()) }.to_str().unwrap().to_owned()
}

#[test]
fn locking_methods_agree_on_werner_half() {
    let (w, h) = (werner(0.5), gaps(1.0, 2.0));
    for method in [QlockMethod::Theorem3Grid, QlockMethod::Corollary1ClosedForm, QlockMethod::BruteforceSu2] {
        let mut v = f64::NAN;
        assert_eq!(unsafe { qlock_observable_locking(w, h, method, 0, 0, &mut v) }, QlockStatus::Ok);
        assert!((v - 0.25).abs() < 1e-8, "{method:?}: {v}");
    }
    unsafe {
        qlock_observable_free(h);
        qlock_state_free(w);
    }
}

#[test]
fn scalar_quantifiers() {
    let w = werner(1.0);
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(qlock_mutual_information(w, &mut v), QlockStatus::Ok);
        assert!((v - 2.0).abs() < 1e-10);
        assert_eq!(qlock_discord(w, 0, &mut v), QlockStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        assert_eq!(qlock_purity_locking(w, 0, &mut v), QlockStatus::Ok);
        assert!((v - 1.0).abs() < 1e-9);
        let mut cq = true;
        assert_eq!(qlock_is_cq(w, 0.0, &mut cq), QlockStatus::Ok);
        assert!(!cq);
        qlock_state_free(w);
    }
}

#[test]
fn matrix_and_json_constructors() {
    let re = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(qlock_state_from_matrix(re.as_ptr(), ptr::null(), 2, 2, &mut s), QlockStatus::Ok);
        let (mut d1, mut d2) = (0, 0);
        assert_eq!(qlock_state_dims(s, &mut d1, &mut d2), QlockStatus::Ok);
        assert_eq!((d1, d2), (2, 2));
        let mut cq = false;
        assert_eq!(qlock_is_cq(s, 0.0, &mut cq), QlockStatus::Ok);
        assert!(cq);

        let mut text = ptr::null_mut();
        assert_eq!(qlock_state_to_json(s, &mut text), QlockStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(qlock_state_from_json(text, &mut back), QlockStatus::Ok);
        let mut v = f64::NAN;
        let h = gaps(1.0, 2.0);
        assert_eq!(qlock_observable_locking(back, h, QlockMethod::Theorem3Grid, 0, 1024, &mut v), QlockStatus::Ok);
        assert!(v.abs() <= 1e-8);
        qlock_string_free(text);
        qlock_observable_free(h);
        qlock_state_free(back);
        qlock_state_free(s);
    }
}

#[test]
fn status_codes() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(qlock_state_werner(1.5, &mut s), QlockStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("1.5"));

        let bad = CString::new("{\"dims\": [2, 2]}").unwrap();
        assert_eq!(qlock_state_from_json(bad.as_ptr(), &mut s), QlockStatus::Parse);
        assert_eq!(qlock_state_from_json(ptr::null(), &mut s), QlockStatus::NullPointer);

        let w = werner(0.5);
        let mut v = 0.0;
        assert_eq!(qlock_observable_locking(w, ptr::null(), QlockMethod::Theorem3Grid, 0, 0, &mut v), QlockStatus::NullPointer);
        assert_eq!(qlock_mutual_information(w, ptr::null_mut()), QlockStatus::NullPointer);

        let levels = [0.0, 2.0, 2.0, 4.0];
        let mut h = ptr::null_mut();
        assert_eq!(qlock_observable_from_levels(levels.as_ptr(), &mut h), QlockStatus::Ok);
        assert_eq!(qlock_observable_locking(w, h, QlockMethod::Theorem3Grid, 0, 0, &mut v), QlockStatus::Precondition);
        assert_eq!(qlock_observable_locking(w, h, QlockMethod::Corollary1ClosedForm, 0, 0, &mut v), QlockStatus::Ok);
        assert!((v - 0.5).abs() < 1e-9);

        let entangled_levels = [0.0, 1.0, 1.0, 5.0];
        let mut bad_h = ptr::null_mut();
        assert_eq!(qlock_observable_from_levels(entangled_levels.as_ptr(), &mut bad_h), QlockStatus::Parse);

        let cq = [0.7, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.3];
        let mut c = ptr::null_mut();
        assert_eq!(qlock_state_from_matrix(cq.as_ptr(), ptr::null(), 2, 2, &mut c), QlockStatus::Ok);
        assert_eq!(qlock_purity_locking(c, 0, &mut v), QlockStatus::Precondition);

        qlock_state_free(c);
        qlock_observable_free(h);
        qlock_state_free(w);
        qlock_state_free(ptr::null_mut());
        qlock_observable_free(ptr::null_mut());
        qlock_string_free(ptr::null_mut());
    }
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(qlock_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/qlock.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 15);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

/// Compiles the C smoke program against the header and the static library.
#[test]
fn c_program_links_and_runs() {
    let Some(profile_dir) = std::env::current_exe().unwrap().parent().and_then(|d| d.parent()).map(|d| d.to_path_buf()) else {
        panic!("no target directory");
    };
    let lib = profile_dir.join("libqlock_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let dir = tempfile::TempDir::new().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = std::process::Command::new(cc)
        .arg(format!("{manifest}/tests/c_smoke.c"))
        .arg(format!("-I{manifest}/include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status();
    match status {
        Ok(s) if s.success() => {}
        Ok(s) => panic!("C compile failed: {s}"),
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    }
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
