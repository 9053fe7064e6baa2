use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use hyperion_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hyperion_last_error()) }.to_string_lossy().into_owned()
}

fn prover() -> *mut HyperionProver {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { hyperion_prover_new(ptr::null(), ptr::null(), &mut p) }, HyperionStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn prove_p1p2_through_the_c_abi() {
    let p = prover();
    let id = CString::new("p1p2").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hyperion_prove_theorem(p, id.as_ptr(), &mut r) }, HyperionStatus::Ok);
    assert_eq!(unsafe { hyperion_report_proved(r) }, 1);
    assert_eq!(unsafe { hyperion_report_certificate_count(r) }, 4);
    let js = unsafe { hyperion_report_json(r) };
    let text = unsafe { CStr::from_ptr(js) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"verdict\": \"proved\""));
    unsafe {
        hyperion_string_free(js);
        hyperion_report_free(r);
        hyperion_prover_free(p);
    }
}

#[test]
fn errors_are_codes_with_messages() {
    let mut p = ptr::null_mut();
    let bad = CString::new("1.5").unwrap();
    assert_eq!(
        unsafe { hyperion_prover_new(bad.as_ptr(), ptr::null(), &mut p) },
        HyperionStatus::InvalidArgument
    );
    assert!(p.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { hyperion_prover_new(ptr::null(), ptr::null(), ptr::null_mut()) },
        HyperionStatus::NullPointer
    );

    let p = prover();
    assert!(last_error().is_empty());
    let id = CString::new("p9p9").unwrap();
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { hyperion_prove_theorem(p, id.as_ptr(), &mut r) }, HyperionStatus::UnknownTheorem);
    assert!(last_error().contains("p9p9"));
    assert_eq!(unsafe { hyperion_report_proved(ptr::null()) }, -1);
    assert!(unsafe { hyperion_report_json(ptr::null()) }.is_null());
    let mut out = [0.0; 4];
    assert_eq!(
        unsafe { hyperion_poincare_map(p, 2.0, 1.0, 1.0, 1.0, 1, out.as_mut_ptr()) },
        HyperionStatus::InvalidArgument
    );
    assert_eq!(
        unsafe { hyperion_poincare_map(p, 1.0, 1.0, 1.0, 1.0, 0, out.as_mut_ptr()) },
        HyperionStatus::InvalidArgument
    );
    unsafe {
        hyperion_prover_free(p);
        hyperion_prover_free(ptr::null_mut());
        hyperion_report_free(ptr::null_mut());
        hyperion_string_free(ptr::null_mut());
    }
}

#[test]
fn poincare_map_encloses_fixed_point() {
    let p = prover();
    let phi = 1.098956671156722;
    let mut out = [0.0; 4];
    let h = std::f64::consts::FRAC_PI_2;
    assert_eq!(unsafe { hyperion_poincare_map(p, h, h, phi, phi, 1, out.as_mut_ptr()) }, HyperionStatus::Ok);
    // theta advances by 2 pi at P1.
    let th = h + 2.0 * std::f64::consts::PI;
    assert!(out[0] <= th + 1e-10 && th - 1e-10 <= out[1], "{out:?}");
    assert!(out[2] <= phi + 1e-10 && phi - 1e-10 <= out[3], "{out:?}");
    assert!(out[1] - out[0] < 1e-9);

    let mut js = ptr::null_mut();
    let mut proved = -1;
    assert_eq!(unsafe { hyperion_prove_fixed_points(p, &mut js, &mut proved) }, HyperionStatus::Ok);
    assert_eq!(proved, 1);
    unsafe {
        hyperion_string_free(js);
        hyperion_prover_free(p);
    }
}

#[test]
fn header_and_example_compile_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/hyperion.h")).unwrap();
    for f in [
        "hyperion_prover_new",
        "hyperion_prove_theorem",
        "hyperion_report_json",
        "hyperion_poincare_map",
        "HYPERION_STATUS_UNKNOWN_THEOREM",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("examples/demo.c"))
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
}
