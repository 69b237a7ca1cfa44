use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use qepot_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qepot_last_error()) }
        .to_string_lossy()
        .into_owned()
}

fn harmonic() -> *mut QepotPotential {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { qepot_potential_harmonic_quartic(1.0, 1.0, 0.0, &mut p) },
        QepotStatus::Ok
    );
    p
}

fn read(
    table: *const QepotTable,
    f: unsafe extern "C" fn(*const QepotTable, *mut f64, usize) -> QepotStatus,
) -> Vec<f64> {
    let n = unsafe { qepot_table_len(table) };
    let mut buf = vec![0.0; n];
    assert_eq!(unsafe { f(table, buf.as_mut_ptr(), n) }, QepotStatus::Ok);
    buf
}

#[test]
fn harmonic_lh_bare_partition_function() {
    let p = harmonic();
    let mut t = ptr::null_mut();
    let s = unsafe { qepot_evaluate(p, QepotMethod::LhBare, 2.0, 1.0, -8.0, 8.0, 801, ptr::null(), &mut t) };
    assert_eq!(s, QepotStatus::Ok, "{}", last_error());
    let mut ln_z = 0.0;
    assert_eq!(unsafe { qepot_table_ln_z(t, &mut ln_z) }, QepotStatus::Ok);
    assert!((ln_z.exp() - 1.0 / (2.0 * 1f64.sinh())).abs() < 1e-8);
    let x = read(t, qepot_table_x);
    assert_eq!(x.len(), 801);
    assert_eq!((x[0], x[800]), (-8.0, 8.0));
    assert_eq!(read(t, qepot_table_v_eff).len(), 801);
    unsafe {
        qepot_table_free(t);
        qepot_potential_free(p);
    }
}

#[test]
fn exact_matches_mapped_on_harmonic() {
    let p = harmonic();
    let (mut exact, mut mapped) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(
            qepot_exact(p, 1.0, 1.0, -7.0, 7.0, 141, &mut exact),
            QepotStatus::Ok,
            "{}",
            last_error()
        );
        let n = qepot_table_len(exact);
        let x = read(exact, qepot_table_x);
        let opts = qepot_options_default();
        let s = qepot_evaluate(
            p,
            QepotMethod::LhMapped,
            1.0,
            1.0,
            x[0],
            x[n - 1],
            n,
            &opts,
            &mut mapped,
        );
        assert_eq!(s, QepotStatus::Ok);
        let (a, b) = (read(exact, qepot_table_density), read(mapped, qepot_table_density));
        let worst = a.iter().zip(&b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
        qepot_table_free(exact);
        qepot_table_free(mapped);
        qepot_potential_free(p);
    }
}

#[test]
fn status_codes_and_messages() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(
            qepot_potential_harmonic_quartic(-1.0, 1.0, 0.0, &mut p),
            QepotStatus::InvalidArgument
        );
        assert!(p.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            qepot_potential_double_well(1.0, 1.0, 0.1, ptr::null_mut()),
            QepotStatus::NullPointer
        );
        assert_eq!(last_error(), "out is null");
        assert_eq!(qepot_table_len(ptr::null()), 0);
        let mut v = 0.0;
        assert_eq!(
            qepot_potential_value(ptr::null(), 0.0, &mut v),
            QepotStatus::NullPointer
        );

        let p = harmonic();
        assert!(last_error().is_empty());
        assert_eq!(qepot_potential_value(p, 2.0, &mut v), QepotStatus::Ok);
        assert_eq!(v, 2.0);
        let mut t = ptr::null_mut();
        let s = qepot_evaluate(p, QepotMethod::Classical, 1.0, 1.0, 1.0, -1.0, 11, ptr::null(), &mut t);
        assert_eq!(s, QepotStatus::InvalidArgument);
        assert!(t.is_null());
        assert_eq!(
            qepot_evaluate(p, QepotMethod::Classical, 1.0, 1.0, -5.0, 5.0, 11, ptr::null(), &mut t),
            QepotStatus::Ok
        );
        let mut small = [0.0; 4];
        assert_eq!(
            qepot_table_density(t, small.as_mut_ptr(), 4),
            QepotStatus::BufferTooSmall
        );
        assert!(last_error().contains("11"));
        qepot_table_free(t);
        qepot_potential_free(p);
        qepot_potential_free(ptr::null_mut());
    }
}

#[test]
fn morse_oh_and_monomials() {
    let (mut morse, mut poly) = (ptr::null_mut(), ptr::null_mut());
    let mut mass = 0.0;
    let mut v = 0.0;
    unsafe {
        assert_eq!(qepot_potential_morse_oh(&mut morse, &mut mass), QepotStatus::Ok);
        assert!((mass - 1728.0).abs() < 5.0);
        assert_eq!(qepot_potential_value(morse, 1.832, &mut v), QepotStatus::Ok);
        assert!(v.abs() < 1e-5);
        let c = [0.0, 0.0, 0.5, 0.0, 0.25];
        assert_eq!(
            qepot_potential_monomial_sum(c.as_ptr(), c.len(), &mut poly),
            QepotStatus::Ok
        );
        assert_eq!(qepot_potential_value(poly, 2.0, &mut v), QepotStatus::Ok);
        assert_eq!(v, 6.0);
        assert_eq!(
            qepot_potential_monomial_sum(ptr::null(), 3, &mut poly),
            QepotStatus::NullPointer
        );
        qepot_potential_free(morse);
        qepot_potential_free(poly);
    }
}

#[test]
fn run_config_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = CString::new(
        "name = h\npotential.variant = harmonic_quartic\npotential.mass = 1\npotential.omega = 1\npotential.g = 0\n\
         temperature.beta = 1\nmethods = classical, lh_mapped\n",
    )
    .unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    unsafe {
        assert_eq!(
            qepot_run_config(cfg.as_ptr(), out.as_ptr(), false),
            QepotStatus::Ok,
            "{}",
            last_error()
        );
        assert!(dir.path().join("h_beta1.csv").exists());
        assert_eq!(qepot_run_config(cfg.as_ptr(), out.as_ptr(), true), QepotStatus::Config);
        let bad = CString::new(format!("{}bogus = 1\n", cfg.to_str().unwrap())).unwrap();
        assert_eq!(qepot_run_config(bad.as_ptr(), out.as_ptr(), false), QepotStatus::Config);
        assert!(last_error().contains("bogus"));
        assert_eq!(
            qepot_run_config(ptr::null(), out.as_ptr(), false),
            QepotStatus::NullPointer
        );
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qepot_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(crate_dir().join("include/qepot.h")).unwrap();
    for name in [
        "qepot_last_error",
        "qepot_potential_harmonic_quartic",
        "qepot_evaluate",
        "qepot_exact",
        "qepot_table_density",
        "qepot_run_config",
        "typedef struct QepotPotential QepotPotential",
        "QEPOT_STATUS_BUFFER_TOO_SMALL = 6",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// The C smoke program always compiles against the header; it is linked and
/// run when a static library from `cargo build` sits next to the test binary.
#[test]
fn c_program_against_header() {
    if !have_cc() {
        eprintln!("cc not found; C check skipped");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = crate_dir().join("tests/c/smoke.c");
    let include = crate_dir().join("include");
    let obj = dir.path().join("smoke.o");
    let o = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Wextra", "-Werror", "-pedantic", "-c"])
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg("-o")
        .arg(&obj)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let exe_dir = std::env::current_exe().unwrap();
    let profile_dir: &Path = exe_dir.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libqepot_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built; link step skipped", lib.display());
        return;
    }
    let exe = dir.path().join("smoke");
    let o = Command::new("cc")
        .arg(&obj)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
