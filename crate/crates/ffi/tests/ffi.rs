use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use tracesample_ffi::*;

const HIST: &str = "TCP,60\nUDP,30\nDNS,9\nARP,1\n";

fn take_string(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { ts_string_free(p) };
    s
}

fn last_error() -> Option<String> {
    let p = ts_last_error_message();
    (!p.is_null()).then(|| unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned())
}

fn synth(spec: &str, seed: u64) -> *mut TsDataset {
    let spec = CString::new(spec).unwrap();
    let mut ds = ptr::null_mut();
    let st = unsafe { ts_dataset_synthesize(spec.as_ptr(), seed, TsArrangement::Shuffled, &mut ds) };
    assert_eq!(st, TsStatus::Ok, "{:?}", last_error());
    ds
}

#[test]
fn synthesize_and_inspect() {
    let ds = synth(HIST, 3);
    unsafe {
        assert_eq!(ts_dataset_population(ds), 100);
        assert_eq!(ts_dataset_class_count(ds), 4);
        let mut label = ptr::null_mut();
        assert_eq!(ts_dataset_label(ds, 1, &mut label), TsStatus::Ok);
        let label = take_string(label);
        assert!(["TCP", "UDP", "DNS", "ARP"].contains(&label.as_str()));
        let mut out = ptr::null_mut();
        assert_eq!(ts_dataset_label(ds, 101, &mut out), TsStatus::OutOfRange);
        assert!(last_error().unwrap().contains("101"));
        ts_dataset_free(ds);
    }
}

#[test]
fn parse_csv_bytes() {
    let csv = b"No.,Protocol,Length\n1,TCP,60\n2,DNS,80\n3,TCP,60\n";
    let col = CString::new("Protocol").unwrap();
    let mut ds = ptr::null_mut();
    unsafe {
        let st = ts_dataset_parse(csv.as_ptr(), csv.len(), TsInputFormat::Csv, col.as_ptr(), &mut ds);
        assert_eq!(st, TsStatus::Ok);
        assert_eq!(ts_dataset_population(ds), 3);
        assert_eq!(ts_dataset_class_count(ds), 2);
        ts_dataset_free(ds);

        let missing = CString::new("Info").unwrap();
        let st = ts_dataset_parse(csv.as_ptr(), csv.len(), TsInputFormat::Csv, missing.as_ptr(), &mut ds);
        assert_eq!(st, TsStatus::ParseError);
        assert!(last_error().is_some());
    }
}

#[test]
fn sample_entries_match_csv() {
    let ds = synth(HIST, 11);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ts_sample_run(ds, TsFamily::Random, 20, false, 5, &mut s), TsStatus::Ok);
        assert_eq!(ts_sample_len(s), 20);
        let mut csv = ptr::null_mut();
        assert_eq!(ts_sample_to_csv(s, &mut csv), TsStatus::Ok);
        let csv = take_string(csv);
        let lines: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(lines.len(), 20);
        for (i, line) in lines.iter().enumerate() {
            let (mut pos, mut syn) = (0usize, true);
            assert_eq!(ts_sample_entry(s, i, &mut pos, &mut syn), TsStatus::Ok);
            assert!(!syn);
            assert!(line.starts_with(&format!("{pos},")), "{line} vs {pos}");
        }
        let (mut pos, mut syn) = (0usize, false);
        assert_eq!(ts_sample_entry(s, 20, &mut pos, &mut syn), TsStatus::OutOfRange);
        ts_sample_free(s);
        ts_dataset_free(ds);
    }
}

#[test]
fn same_seed_same_sample() {
    let a = synth(HIST, 1);
    let b = synth(HIST, 1);
    unsafe {
        let (mut sa, mut sb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ts_sample_run(a, TsFamily::UnderOver, 15, false, 9, &mut sa), TsStatus::Ok);
        assert_eq!(ts_sample_run(b, TsFamily::UnderOver, 15, false, 9, &mut sb), TsStatus::Ok);
        let (mut ca, mut cb) = (ptr::null_mut(), ptr::null_mut());
        ts_sample_to_csv(sa, &mut ca);
        ts_sample_to_csv(sb, &mut cb);
        assert_eq!(take_string(ca), take_string(cb));
        assert_eq!(ts_sample_len(sa), 60);
        for s in [sa, sb] {
            ts_sample_free(s);
        }
        ts_dataset_free(a);
        ts_dataset_free(b);
    }
}

#[test]
fn reports_and_missing_classes() {
    let ds = synth(HIST, 2);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(ts_sample_run(ds, TsFamily::Stratified, 10, false, 0, &mut s), TsStatus::Ok);
        let mut missing = usize::MAX;
        assert_eq!(ts_sample_missing_classes(ds, s, &mut missing), TsStatus::Ok);
        assert_eq!(missing, 0);

        let mut json = ptr::null_mut();
        assert_eq!(ts_sample_report(ds, s, TsFormat::Json, 3, &mut json), TsStatus::Ok);
        let json = take_string(json);
        assert!(json.contains("tracesample.report/1"));

        let mut md = ptr::null_mut();
        assert_eq!(ts_dataset_report(ds, TsFormat::Markdown, 2, &mut md), TsStatus::Ok);
        assert!(take_string(md).contains("| ARP"));
        ts_sample_free(s);
        ts_dataset_free(ds);
    }
}

#[test]
fn probabilities() {
    let mut p = f64::NAN;
    unsafe {
        assert_eq!(ts_miss_probability(10, 1, 1, true, &mut p), TsStatus::Ok);
        assert!((p - 0.9).abs() < 1e-15);
        assert_eq!(ts_miss_probability(10, 2, 9, false, &mut p), TsStatus::Ok);
        assert_eq!(p, 0.0);
        assert_eq!(ts_miss_probability(10, 11, 1, false, &mut p), TsStatus::OutOfRange);

        let ds = synth(HIST, 0);
        let mut e = f64::NAN;
        assert_eq!(ts_expected_missing(ds, 100, false, &mut e), TsStatus::Ok);
        assert_eq!(e, 0.0);
        assert_eq!(ts_expected_missing(ds, 1, true, &mut e), TsStatus::Ok);
        assert!((e - 3.0).abs() < 1e-12);
        ts_dataset_free(ds);
    }
}

#[test]
fn null_and_bad_arguments() {
    unsafe {
        let mut ds = ptr::null_mut();
        assert_eq!(ts_dataset_synthesize(ptr::null(), 0, TsArrangement::Grouped, &mut ds), TsStatus::NullPointer);
        let bad = CString::new("TCP,abc\n").unwrap();
        assert_eq!(ts_dataset_synthesize(bad.as_ptr(), 0, TsArrangement::Grouped, &mut ds), TsStatus::ParseError);
        assert!(ds.is_null());
        assert_eq!(ts_dataset_population(ptr::null()), 0);
        assert_eq!(ts_sample_len(ptr::null()), 0);
        ts_dataset_free(ptr::null_mut());
        ts_sample_free(ptr::null_mut());
        ts_string_free(ptr::null_mut());

        let ds = synth(HIST, 0);
        let mut s = ptr::null_mut();
        assert_eq!(ts_sample_run(ds, TsFamily::Systematic, 0, false, 0, &mut s), TsStatus::InvalidArgument);
        assert_eq!(ts_sample_run(ds, TsFamily::Systematic, 7, false, 0, ptr::null_mut()), TsStatus::NullPointer);
        assert_eq!(ts_sample_run(ds, TsFamily::Systematic, 7, false, 0, &mut s), TsStatus::Ok);
        assert!(last_error().is_none());
        assert_eq!(ts_sample_len(s), 15);
        ts_sample_free(s);
        ts_dataset_free(ds);
    }
}

fn target_dir() -> PathBuf {
    // <target>/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join(if cfg!(windows) { "tracesample_ffi.lib" } else { "libtracesample_ffi.a" });
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if cfg!(windows) || !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C toolchain or static library at {}", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let mut build = Command::new(&cc);
    build
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .arg("-o")
        .arg(&exe);
    if cfg!(target_os = "linux") {
        build.args(["-lpthread", "-ldl", "-lm"]);
    }
    let out = build.output().unwrap();
    assert!(out.status.success(), "cc failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited {:?}: {}", run.status, String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
