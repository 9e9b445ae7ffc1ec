//! Exercises the C interface end to end from Rust, including the committed
//! header staying in sync with the crate's signatures.

use std::ffi::{c_char, CStr, CString};
use std::ptr;

use hpc_capi::{
    hpc_decide_json, hpc_enumerate_json, hpc_grammar_text, hpc_growth_json, hpc_instance_free,
    hpc_instance_notes_json, hpc_instance_parse_json, hpc_instance_render_json, hpc_last_error,
    hpc_membership, hpc_string_free, HpcInstance, HpcStatus,
};

const GOLDEN: &str = include_str!("../../hpc/tests/data/golden.json");

/// Takes ownership of a returned C string and frees it.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    hpc_string_free(p);
    s
}

unsafe fn parse(json: &str) -> *mut HpcInstance {
    let src = CString::new(json).unwrap();
    let mut handle: *mut HpcInstance = ptr::null_mut();
    let status = hpc_instance_parse_json(src.as_ptr(), &mut handle);
    assert_eq!(status, HpcStatus::Ok);
    assert!(!handle.is_null());
    handle
}

unsafe fn last_error() -> String {
    let mut msg: *mut c_char = ptr::null_mut();
    assert_eq!(hpc_last_error(&mut msg), HpcStatus::Ok);
    take(msg)
}

#[test]
fn reports_for_golden_instance() {
    unsafe {
        let inst = parse(GOLDEN);

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_decide_json(inst, true, &mut out), HpcStatus::Ok);
        let verdict = take(out);
        assert!(verdict.contains("\"not_regular\""), "verdict: {verdict}");
        assert!(verdict.contains("\"test3\""), "verdict: {verdict}");

        let mut direct: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_decide_json(inst, false, &mut direct), HpcStatus::Ok);
        assert_eq!(take(direct), verdict, "fast and direct routes agree");

        let mut gt: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_grammar_text(inst, &mut gt), HpcStatus::Ok);
        let grammar = take(gt);
        assert!(grammar.starts_with("axioms: "), "grammar: {grammar}");
        assert!(grammar.contains(" -> "), "grammar: {grammar}");

        let mut en: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_enumerate_json(inst, 3, &mut en), HpcStatus::Ok);
        let words: Vec<String> = serde_json::from_str(&take(en)).unwrap();
        assert_eq!(words, ["abA", "aBA"]);

        let mut gr: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_growth_json(inst, 1e-6, &mut gr), HpcStatus::Ok);
        let growth: serde_json::Value = serde_json::from_str(&take(gr)).unwrap();
        assert_eq!(growth["bounds_ok"], serde_json::Value::Bool(true));
        assert!(growth["series"]["hairpin"]["numerator"].is_array());

        for (word, expect) in [("abA", true), ("aabAA", true), ("aA", false), ("ba", false)] {
            let w = CString::new(word).unwrap();
            let mut m = false;
            assert_eq!(hpc_membership(inst, w.as_ptr(), &mut m), HpcStatus::Ok);
            assert_eq!(m, expect, "membership of {word}");
        }

        hpc_instance_free(inst);
    }
}

#[test]
fn canonical_rendering_round_trips() {
    unsafe {
        let inst = parse(GOLDEN);
        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_instance_render_json(inst, &mut out), HpcStatus::Ok);
        let rendered = take(out);

        let again = parse(&rendered);
        let mut second: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_instance_render_json(again, &mut second), HpcStatus::Ok);
        assert_eq!(take(second), rendered, "rendering is a fixed point");

        let mut notes: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_instance_notes_json(again, &mut notes), HpcStatus::Ok);
        let notes: Vec<String> = serde_json::from_str(&take(notes)).unwrap();
        assert!(notes.is_empty(), "canonical input needs no normalization");

        hpc_instance_free(again);
        hpc_instance_free(inst);
    }
}

#[test]
fn error_paths_set_status_and_message() {
    unsafe {
        let mut handle: *mut HpcInstance = ptr::null_mut();
        assert_eq!(
            hpc_instance_parse_json(ptr::null(), &mut handle),
            HpcStatus::NullArgument
        );

        let src = CString::new("{").unwrap();
        assert_eq!(
            hpc_instance_parse_json(src.as_ptr(), &mut handle),
            HpcStatus::InvalidInstance
        );
        assert!(last_error().contains("malformed"), "message: {}", last_error());

        let bytes = CString::new([0xFFu8, 0xFE].as_slice()).unwrap();
        assert_eq!(
            hpc_instance_parse_json(bytes.as_ptr(), &mut handle),
            HpcStatus::InvalidUtf8
        );

        let inst = parse(GOLDEN);

        let w = CString::new("xyz").unwrap();
        let mut m = false;
        assert_eq!(hpc_membership(inst, w.as_ptr(), &mut m), HpcStatus::InvalidWord);

        let mut out: *mut c_char = ptr::null_mut();
        assert_eq!(hpc_enumerate_json(inst, 99, &mut out), HpcStatus::Unsupported);
        assert!(last_error().contains("cap"), "message: {}", last_error());

        assert_eq!(hpc_decide_json(inst, true, ptr::null_mut()), HpcStatus::NullArgument);
        assert_eq!(hpc_decide_json(ptr::null(), true, &mut out), HpcStatus::NullArgument);

        hpc_string_free(ptr::null_mut());
        hpc_instance_free(ptr::null_mut());
        hpc_instance_free(inst);
    }
}

#[test]
fn committed_header_is_current() {
    let committed = include_str!("../include/hpc.h");
    let generated = std::fs::read_to_string(env!("HPC_GENERATED_HEADER")).unwrap();
    assert_eq!(committed, generated, "regenerate include/hpc.h from the build output");
}
