use std::ffi::{CStr, CString};
use std::ptr;

use kloostat_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(kls_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn context(p: u64) -> *mut KlsContext {
    let mut ctx = ptr::null_mut();
    assert_eq!(kls_context_new(p, 0, &mut ctx), KlsStatus::Ok);
    assert!(!ctx.is_null());
    ctx
}

fn table(p: u64, method: KlsMethod) -> *mut KlsTable {
    let ctx = context(p);
    let mut t = ptr::null_mut();
    assert_eq!(kls_table_compute(ctx, method as u32, &mut t), KlsStatus::Ok);
    kls_context_free(ctx);
    t
}

#[test]
fn version_and_primality() {
    let v = unsafe { CStr::from_ptr(kls_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    assert_eq!(kls_is_prime(10007), 1);
    assert_eq!(kls_is_prime(10005), 0);
}

#[test]
fn p5_values_through_handles() {
    let want = [0.381966, -3.236068, 1.236068, 2.618034];
    for method in [KlsMethod::Naive, KlsMethod::Batch, KlsMethod::Rader] {
        let t = table(5, method);
        assert_eq!(kls_table_prime(t), 5);
        assert_eq!(kls_table_len(t), 4);
        let values = unsafe { std::slice::from_raw_parts(kls_table_values(t), 4) };
        for (v, w) in values.iter().zip(want) {
            assert!((v - w).abs() < 1e-6);
        }
        let mut k = 0.0;
        assert_eq!(kls_table_value(t, 2, &mut k), KlsStatus::Ok);
        assert!((k + 3.236068).abs() < 1e-6);
        let angles = unsafe { std::slice::from_raw_parts(kls_table_angles(t), 4) };
        assert!((angles[3] - 0.94542).abs() < 1e-5);
        let mut count = 0;
        assert_eq!(
            kls_window_count(t, 0.0, std::f64::consts::FRAC_PI_2, &mut count),
            KlsStatus::Ok
        );
        assert_eq!(count, 3);
        let (mut nl, mut n) = (0, 0);
        assert_eq!(kls_nonlinearity(t, &mut nl, &mut n), KlsStatus::Ok);
        assert_eq!((nl, n), (1, 2));
        kls_table_free(t);
    }
}

#[test]
fn statistics() {
    let t = table(1009, KlsMethod::Batch);
    let mut r = 0.0;
    assert_eq!(kls_weil_ratio(t, &mut r), KlsStatus::Ok);
    assert!(r > 0.9 && r <= 1.0);
    let mut d = 0.0;
    assert_eq!(kls_niederreiter_deviation(t, &mut d), KlsStatus::Ok);
    assert!(d > 0.0 && d < 10.0 * 1009f64.powf(0.75));
    let mut mu = 0.0;
    assert_eq!(
        kls_sato_tate_measure(0.0, std::f64::consts::PI, &mut mu),
        KlsStatus::Ok
    );
    assert!((mu - 1.0).abs() < 1e-15);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        kls_exp_sum(t, 3, 0.0, std::f64::consts::PI, &mut re, &mut im),
        KlsStatus::Ok
    );
    // the full window sums e_p(3a) over all a != 0
    assert!((re + 1.0).abs() < 1e-9 && im.abs() < 1e-9);
    let u: Vec<u64> = (1..=100).collect();
    let v: Vec<u64> = (1..=50).map(|x| x * 7).collect();
    let mut c = 0;
    assert_eq!(
        kls_sumset_count(
            t,
            u.as_ptr(),
            u.len(),
            v.as_ptr(),
            v.len(),
            0.0,
            std::f64::consts::PI,
            &mut c
        ),
        KlsStatus::Ok
    );
    // every u + v is in 2..=450, nonzero mod 1009
    assert_eq!(c, 5000);
    kls_table_free(t);
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("t.klst").to_str().unwrap()).unwrap();
    let t = table(101, KlsMethod::Batch);
    assert_eq!(kls_table_write(t, path.as_ptr()), KlsStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(kls_table_read(path.as_ptr(), 101, &mut back), KlsStatus::Ok);
    let a = unsafe { std::slice::from_raw_parts(kls_table_values(t), 100) };
    let b = unsafe { std::slice::from_raw_parts(kls_table_values(back), 100) };
    assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    kls_table_free(back);

    let mut other = ptr::null_mut();
    assert_eq!(
        kls_table_read(path.as_ptr(), 103, &mut other),
        KlsStatus::Format
    );
    assert!(other.is_null());
    assert!(last_error().contains("103"));

    let missing = CString::new(dir.path().join("nope").to_str().unwrap()).unwrap();
    assert_eq!(
        kls_table_read(missing.as_ptr(), 0, &mut other),
        KlsStatus::Io
    );
    kls_table_free(t);
}

#[test]
fn error_codes() {
    let mut ctx = ptr::null_mut();
    assert_eq!(kls_context_new(91, 0, &mut ctx), KlsStatus::NotPrime);
    assert!(ctx.is_null());
    assert!(last_error().contains("91"));
    assert_eq!(kls_context_new(2, 0, &mut ctx), KlsStatus::NotPrime);
    assert_eq!(
        kls_context_new(101, 0, ptr::null_mut()),
        KlsStatus::NullPointer
    );

    let ctx = context(101);
    let mut t = ptr::null_mut();
    assert_eq!(
        kls_table_compute(ctx, 7, &mut t),
        KlsStatus::InvalidArgument
    );
    assert!(last_error().contains('7'));
    assert_eq!(
        kls_table_compute(ptr::null(), 1, &mut t),
        KlsStatus::NullPointer
    );
    kls_context_free(ctx);

    let t = table(101, KlsMethod::Batch);
    let mut x = 0.0;
    assert_eq!(kls_table_value(t, 0, &mut x), KlsStatus::OutOfRange);
    assert_eq!(kls_table_value(t, 101, &mut x), KlsStatus::OutOfRange);
    let mut c = 0;
    assert_eq!(kls_window_count(t, 2.0, 1.0, &mut c), KlsStatus::OutOfRange);
    assert_eq!(
        kls_window_count(t, 0.0, 1.0, ptr::null_mut()),
        KlsStatus::NullPointer
    );
    let u = [101u64];
    assert_eq!(
        kls_sumset_count(t, u.as_ptr(), 1, u.as_ptr(), 1, 0.0, 1.0, &mut c),
        KlsStatus::EmptySet
    );
    assert_eq!(
        kls_sumset_count(t, ptr::null(), 0, u.as_ptr(), 1, 0.0, 1.0, &mut c),
        KlsStatus::EmptySet
    );
    kls_table_free(t);

    assert_eq!(kls_table_len(ptr::null()), 0);
    assert!(kls_table_values(ptr::null()).is_null());
    kls_table_free(ptr::null_mut());
    kls_context_free(ptr::null_mut());
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/kloostat.h");
    let source = include_str!("../src/lib.rs");
    let exports: Vec<&str> = source
        .lines()
        .filter_map(|l| l.trim_start().strip_prefix("pub extern \"C\" fn "))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20);
    for name in exports {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for item in [
        "typedef struct KlsContext KlsContext;",
        "typedef struct KlsTable KlsTable;",
        "KLS_STATUS_PANIC = 9",
        "KLS_METHOD_RADER = 2",
    ] {
        assert!(header.contains(item), "{item}");
    }
}
