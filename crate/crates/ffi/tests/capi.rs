use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use rlwe_ffi::*;

fn last_error() -> String {
    let p = rlwe_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn generate(r: f64, uniform: u8) -> *mut RlweSampleSet {
    let mut set = ptr::null_mut();
    let st = unsafe { rlwe_sample_set_generate(43, 4871, 173, r, 1730, 5, uniform, &mut set) };
    assert_eq!(st, RlweStatus::Ok);
    assert!(!set.is_null());
    set
}

#[test]
fn validate_family_codes() {
    assert_eq!(rlwe_validate_family(43, 4871, 173), RlweStatus::Ok);
    assert_eq!(rlwe_validate_family(3, 4, 13), RlweStatus::InvalidFamily);
    assert!(last_error().contains("squarefree"));
    assert_eq!(rlwe_validate_family(4, 2, 13), RlweStatus::InvalidFamily);
}

#[test]
fn coset_attack_recovers_secret() {
    let set = generate(60.0, 0);
    assert_eq!(unsafe { rlwe_sample_set_len(set) }, 1730);
    assert_eq!(unsafe { rlwe_sample_set_modulus(set) }, 173);
    let mut coset = RlweAttackResult::default();
    assert_eq!(unsafe { rlwe_attack(set, RlweAttackKind::Coset, 0.0, 2, &mut coset) }, RlweStatus::Ok);
    assert_eq!(coset.verdict, RlweVerdict::Guess as u32);
    assert_eq!(coset.has_candidate, 1);
    assert_eq!(coset.candidate_count, 1);
    assert_eq!(coset.guess_loop_iterations, 173);

    let mut two = RlweAttackResult::default();
    assert_eq!(unsafe { rlwe_attack(set, RlweAttackKind::TwoBin, 0.0, 0, &mut two) }, RlweStatus::Ok);
    assert_eq!((two.candidate_u, two.candidate_v), (coset.candidate_u, coset.candidate_v));
    assert_eq!(two.guess_loop_iterations, 173 * 173);
    unsafe { rlwe_sample_set_free(set) };
}

#[test]
fn uniform_decoy_rejected() {
    let set = generate(694.94, 1);
    let mut res = RlweAttackResult::default();
    assert_eq!(unsafe { rlwe_attack(set, RlweAttackKind::Coset, 0.0, 0, &mut res) }, RlweStatus::Ok);
    assert_eq!(res.verdict, RlweVerdict::NotRlwe as u32);
    assert_eq!(res.has_candidate, 0);
    unsafe { rlwe_sample_set_free(set) };
}

#[test]
fn save_and_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("s.jsonl").to_str().unwrap()).unwrap();
    let set = generate(10.0, 0);
    assert_eq!(unsafe { rlwe_sample_set_save(set, path.as_ptr()) }, RlweStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { rlwe_sample_set_load(path.as_ptr(), &mut back) }, RlweStatus::Ok);
    assert_eq!(unsafe { rlwe_sample_set_len(back) }, 1730);
    unsafe {
        rlwe_sample_set_free(set);
        rlwe_sample_set_free(back);
    }

    let missing = CString::new("/nonexistent/s.jsonl").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { rlwe_sample_set_load(missing.as_ptr(), &mut out) }, RlweStatus::Io);
    assert!(out.is_null());

    let bad = dir.path().join("bad.jsonl");
    std::fs::write(&bad, "not json\n").unwrap();
    let bad = CString::new(bad.to_str().unwrap()).unwrap();
    assert_eq!(unsafe { rlwe_sample_set_load(bad.as_ptr(), &mut out) }, RlweStatus::Parse);
    assert!(last_error().contains("line 1"));
}

#[test]
fn null_pointers_are_reported() {
    let mut res = RlweAttackResult::default();
    assert_eq!(unsafe { rlwe_attack(ptr::null(), RlweAttackKind::Coset, 0.0, 0, &mut res) }, RlweStatus::NullPointer);
    assert_eq!(unsafe { rlwe_sample_set_load(ptr::null(), ptr::null_mut()) }, RlweStatus::NullPointer);
    assert_eq!(unsafe { rlwe_sample_set_len(ptr::null()) }, 0);
    unsafe { rlwe_sample_set_free(ptr::null_mut()) };
    let st = unsafe { rlwe_sample_set_generate(43, 4871, 173, -1.0, 10, 0, 0, &mut ptr::null_mut()) };
    assert_eq!(st, RlweStatus::InvalidArgument);
}

#[test]
fn estimate_values() {
    let mut est = RlweEstimate::default();
    assert_eq!(unsafe { rlwe_estimate(4, 5, 2, 1, &mut est) }, RlweStatus::Ok);
    assert!((est.log2_eps + 3.0).abs() < 1e-12);
    assert_eq!(est.neg_floor_log2_eps, 3);
    assert!(est.log2_eps <= est.log2_bound);

    assert_eq!(unsafe { rlwe_estimate(4, 17, 2, 1, &mut est) }, RlweStatus::Ok);
    assert!(est.log2_bound.is_nan());

    assert_eq!(unsafe { rlwe_estimate(64, 193, 2, 1, &mut est) }, RlweStatus::Ok);
    assert_eq!(est.neg_floor_log2_eps, 42);
    assert!(est.log2_eps <= est.log2_bound);

    assert_eq!(unsafe { rlwe_estimate(64, 193, 2, 3, &mut est) }, RlweStatus::InvalidArgument);
    assert_eq!(unsafe { rlwe_estimate(64, 193, 2, 1, ptr::null_mut()) }, RlweStatus::NullPointer);
}

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok()) else {
        eprintln!("no C compiler found, skipping");
        return;
    };
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"#include <stdio.h>
#include "rlwe.h"
int main(void) {
    RlweEstimate est;
    if (rlwe_estimate(4, 5, 2, 1, &est) != RLWE_STATUS_OK || est.neg_floor_log2_eps != 3) return 1;
    if (rlwe_validate_family(3, 4, 13) != RLWE_STATUS_INVALID_FAMILY) return 2;
    RlweSampleSet *set = NULL;
    if (rlwe_sample_set_generate(5, 2, 11, 2.0, 50, 1, 0, &set) != RLWE_STATUS_OK) return 3;
    size_t n = rlwe_sample_set_len(set);
    rlwe_sample_set_free(set);
    printf("%zu\n", n);
    return n == 50 ? 0 : 4;
}
"#,
    )
    .unwrap();
    let include = manifest.join("include");
    let out = Command::new(cc).arg("-fsyntax-only").arg("-Wall").arg("-I").arg(&include).arg(&src).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Link only when the cdylib from this build is available next to the test binary.
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join(format!("{}rlwe_ffi{}", std::env::consts::DLL_PREFIX, std::env::consts::DLL_SUFFIX));
    if !lib.exists() {
        eprintln!("{} not built, skipping link step", lib.display());
        return;
    }
    let bin = dir.path().join("main");
    let out = Command::new(cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg("-L")
        .arg(profile_dir)
        .arg("-lrlwe_ffi")
        .arg(format!("-Wl,-rpath,{}", profile_dir.display()))
        .arg("-o")
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "50");
}
