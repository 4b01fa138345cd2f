use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rainham_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn family(spec: &str) -> *mut RhFamily {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { rh_family_generate(cstr(spec).as_ptr(), &mut f) }, RhStatus::Ok);
    f
}

#[test]
fn count_find_validate_roundtrip() {
    let f = family(r#"{"kind":"all-clique","n":5}"#);
    unsafe {
        assert_eq!((rh_family_n(f), rh_family_m(f)), (5, 5));
        let mut c = 0u64;
        assert_eq!(rh_count_transversals(f, 10, &mut c), RhStatus::Ok);
        assert_eq!(c, 1440);
        let mut t = ptr::null_mut();
        assert_eq!(rh_find_transversal(f, 1_000_000, &mut t), RhStatus::Ok);
        let n = rh_transversal_len(t);
        let (mut vs, mut cs) = (vec![0usize; n], vec![0usize; n]);
        assert_eq!(rh_transversal_copy(t, vs.as_mut_ptr(), cs.as_mut_ptr(), n), RhStatus::Ok);
        let mut sorted = cs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
        assert_eq!(rh_transversal_validate(f, t), RhStatus::Ok);
        let js = rh_transversal_to_json(t);
        assert!(CStr::from_ptr(js).to_str().unwrap().contains("cycle"));
        rh_string_free(js);
        rh_transversal_free(t);
        rh_family_free(f);
    }
}

#[test]
fn r_of_the_construction() {
    let f = family(r#"{"kind":"extremal-construction","n":8}"#);
    let mut r = 0;
    assert_eq!(unsafe { rh_compute_r(f, &mut r) }, RhStatus::Ok);
    assert_eq!(r, 4);
    unsafe { rh_family_free(f) };
}

#[test]
fn built_family_without_transversal() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(rh_family_new(3, 3, &mut f), RhStatus::Ok);
        // three colors, only two carry the triangle
        for c in 0..2 {
            for (u, v) in [(0, 1), (1, 2), (0, 2)] {
                assert_eq!(rh_family_add_edge(f, c, u, v), RhStatus::Ok);
            }
        }
        assert_eq!(rh_family_add_edge(f, 2, 1, 1), RhStatus::Malformed);
        assert_eq!(rh_family_add_edge(f, 7, 0, 1), RhStatus::InvalidArgument);
        let mut t = ptr::null_mut();
        assert_eq!(rh_find_transversal(f, 1000, &mut t), RhStatus::NotFound);
        assert!(t.is_null());
        rh_family_free(f);
    }
}

#[test]
fn errors_and_null_handles() {
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(rh_family_from_json(cstr("{\"n\":3").as_ptr(), &mut f), RhStatus::Malformed);
        assert!(!rh_last_error().is_null());
        assert_eq!(rh_family_from_json(ptr::null(), &mut f), RhStatus::NullPointer);
        let msg = CStr::from_ptr(rh_last_error()).to_str().unwrap();
        assert!(msg.contains("null"));
        let mut c = 0;
        assert_eq!(rh_count_transversals(ptr::null(), 10, &mut c), RhStatus::NullPointer);
        assert_eq!(rh_family_n(ptr::null()), 0);
        rh_family_free(ptr::null_mut());
        rh_transversal_free(ptr::null_mut());
        let big = family(r#"{"kind":"all-clique","n":12}"#);
        assert_eq!(rh_count_transversals(big, 10, &mut c), RhStatus::CapExceeded);
        rh_family_free(big);
    }
}

#[test]
fn sampled_transversal_validates() {
    let f = family(r#"{"kind":"random-bipartite-near-complete","n":40,"noise":6,"clique_colors":2}"#);
    unsafe {
        let mut t = ptr::null_mut();
        assert_eq!(rh_sample_transversal(f, 3, &mut t), RhStatus::Ok);
        assert_eq!(rh_transversal_len(t), 40);
        assert_eq!(rh_transversal_validate(f, t), RhStatus::Ok);
        rh_transversal_free(t);
        rh_family_free(f);
    }
}

#[test]
fn header_compiles_and_links_from_c() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = root.join("include/rainham.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in ["rh_family_generate", "rh_find_transversal", "RH_STATUS_NOT_FOUND", "typedef struct RhFamily RhFamily"] {
        assert!(text.contains(sym), "{sym} missing from header");
    }
    // the static library sits next to the deps directory holding this test binary
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let lib = lib_dir.join("librainham_ffi.a");
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let bin = tmp.join("rainham_smoke");
    let mut cc = Command::new("cc");
    cc.arg(root.join("tests/c/smoke.c")).arg("-I").arg(root.join("include")).arg("-o").arg(&bin);
    if lib.exists() {
        cc.arg(&lib).args(["-lpthread", "-ldl", "-lm"]);
    } else {
        // compile only
        cc.arg("-c");
    }
    let st = cc.status().expect("a C compiler");
    assert!(st.success());
    if lib.exists() {
        let out = Command::new(&bin).output().unwrap();
        assert!(out.status.success(), "smoke exit {:?}", out.status.code());
        assert!(String::from_utf8_lossy(&out.stdout).contains("\"phi\""));
    }
}
