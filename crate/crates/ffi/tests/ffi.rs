use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use rational_legendrian_ffi::*;

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { rl_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rl_last_error()) }.to_str().unwrap().to_owned()
}

fn parse(text: &str) -> *mut RlExpr {
    let c = CString::new(text).unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { rl_expr_parse(c.as_ptr(), &mut e) }, RlStatus::Ok);
    e
}

#[test]
fn gamma_and_oracle_agree() {
    let e = parse("(2,2,4,1,2)");
    let (mut m, mut p) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { rl_gamma(e, &mut m, &mut p) }, RlStatus::Ok);
    let closed = (take(m), take(p));
    assert_eq!(closed.0, "λ^-3 + 2λ^-1 + 1");
    assert_eq!(unsafe { rl_oracle(e, 0, 0.0, &mut m, &mut p) }, RlStatus::Ok);
    assert_eq!((take(m), take(p)), closed);
    unsafe { rl_expr_free(e) };
}

#[test]
fn handles_swap_format_and_rational() {
    let e = parse("(4,3,2)");
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rl_expr_swap(e, &mut s) }, RlStatus::Ok);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { rl_expr_format(s, &mut text) }, RlStatus::Ok);
    assert_eq!(take(text), "~(4,3,2)");
    assert_eq!(unsafe { rl_rational(e, &mut text) }, RlStatus::Ok);
    assert_eq!(take(text), "30/13");
    assert_eq!(unsafe { rl_rational(s, &mut text) }, RlStatus::Unsupported);
    assert!(!last_error().is_empty());

    let f = parse("(2,1,2^2)");
    let mut n = ptr::null_mut();
    assert_eq!(unsafe { rl_expr_normalize(f, &mut n) }, RlStatus::Ok);
    assert_eq!(unsafe { rl_expr_format(n, &mut text) }, RlStatus::Ok);
    assert_eq!(take(text), "(2,1,2)");
    for h in [e, s, f, n] {
        unsafe { rl_expr_free(h) };
    }
}

#[test]
fn orderedness_codes() {
    let cases = [("(0)", RlOrder::Ordered), ("(2)", RlOrder::Unordered), ("(2,2,2^1,1,2^1)", RlOrder::Unknown)];
    for (text, want) in cases {
        let e = parse(text);
        let mut status = RlOrder::Ordered;
        let mut reason = ptr::null_mut();
        assert_eq!(unsafe { rl_orderedness(e, &mut status, &mut reason) }, RlStatus::Ok);
        assert_eq!(status, want, "{text}");
        assert!(!take(reason).is_empty());
        assert_eq!(unsafe { rl_orderedness(e, &mut status, ptr::null_mut()) }, RlStatus::Ok);
        unsafe { rl_expr_free(e) };
    }
}

#[test]
fn error_codes() {
    let mut e = ptr::null_mut();
    let bad = CString::new("(2,,1)").unwrap();
    assert_eq!(unsafe { rl_expr_parse(bad.as_ptr(), &mut e) }, RlStatus::Parse);
    assert!(last_error().contains("byte 3"), "{}", last_error());
    assert!(e.is_null());
    assert_eq!(unsafe { rl_expr_parse(ptr::null(), &mut e) }, RlStatus::NullArgument);
    let raw = [0xffu8, 0];
    assert_eq!(unsafe { rl_expr_parse(raw.as_ptr().cast(), &mut e) }, RlStatus::InvalidUtf8);
    let (mut m, mut p) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { rl_gamma(ptr::null(), &mut m, &mut p) }, RlStatus::NullArgument);
    let good = parse("(2)");
    assert_eq!(unsafe { rl_gamma(good, ptr::null_mut(), &mut p) }, RlStatus::NullArgument);
    assert_eq!(unsafe { rl_gamma(good, &mut m, &mut p) }, RlStatus::Ok);
    assert_eq!(last_error(), "");
    take(m);
    take(p);
    unsafe {
        rl_expr_free(good);
        rl_expr_free(ptr::null_mut());
        rl_string_free(ptr::null_mut());
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "rational_legendrian.h"

int main(void) {
    RlExpr *e = NULL;
    char *minus = NULL, *plus = NULL;
    if (rl_expr_parse("(2,2,2^1,1,2^1)", &e) != RL_STATUS_OK) return 1;
    if (rl_gamma(e, &minus, &plus) != RL_STATUS_OK) return 2;
    printf("%s|%s\n", minus, plus);
    rl_string_free(minus);
    rl_string_free(plus);
    rl_expr_free(e);
    if (rl_expr_parse("(", &e) != RL_STATUS_PARSE) return 3;
    return strlen(rl_last_error()) > 0 ? 0 : 4;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    assert!(include.join("rational_legendrian.h").exists());
    // target/<profile>/deps/<test binary>
    let profile_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("librational_legendrian_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let work = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let src = work.join("ffi_smoke.c");
    let exe = work.join("ffi_smoke");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("run the C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "λ^-1 + 1 + λ|1 + λ + λ^2\n");
}
