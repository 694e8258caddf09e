use std::ffi::{CStr, CString};
use std::ptr;

use popaug_ffi::*;

const INTRO: &str = "item b1 copies=1 cost=3\nitem b2 copies=1 cost=2\nitem b3 copies=1 cost=1\n\
    person a1 : b1 > b2 > b3\nperson a2 : b1 > b2 > b3\nperson a3 : b1 > b2 > b3\n";

fn parse(text: &str) -> *mut PopaugInstance {
    let c = CString::new(text).unwrap();
    let mut inst = ptr::null_mut();
    assert_eq!(
        unsafe { popaug_instance_parse(c.as_ptr(), &mut inst) },
        PopaugStatus::Ok
    );
    inst
}

unsafe fn take_string(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    popaug_string_free(s);
    out
}

unsafe fn last_error() -> String {
    CStr::from_ptr(popaug_last_error()).to_str().unwrap().to_string()
}

#[test]
fn intro_has_no_popular_matching_until_augmented() {
    let inst = parse(INTRO);
    unsafe {
        assert_eq!(popaug_instance_num_people(inst), 3);
        let (mut m, mut cost) = (ptr::null_mut(), 0u64);
        assert_eq!(
            popaug_min_cost_popular(inst, false, &mut m, &mut cost),
            PopaugStatus::NotFound
        );
        assert!(m.is_null());

        let (mut plan, mut total) = (ptr::null_mut(), 0u64);
        let status = popaug_augment(inst, PopaugAugmentMode::Exact, false, 1_000_000, &mut plan, &mut total);
        assert_eq!(status, PopaugStatus::Ok);
        assert_eq!(total, 2);
        assert_eq!(take_string(plan), "b2 +1\ntotal 2\n");
        popaug_instance_free(inst);
    }
}

#[test]
fn solved_matching_round_trips_and_is_popular() {
    let inst = parse(&INTRO.replace("b2 copies=1", "b2 copies=2"));
    unsafe {
        let (mut m, mut cost) = (ptr::null_mut(), 0u64);
        assert_eq!(popaug_min_cost_popular(inst, true, &mut m, &mut cost), PopaugStatus::Ok);
        assert_eq!(cost, 7);
        let mut popular = false;
        assert_eq!(popaug_is_popular(inst, m, &mut popular), PopaugStatus::Ok);
        assert!(popular);

        let mut text = ptr::null_mut();
        assert_eq!(popaug_matching_to_string(inst, m, &mut text), PopaugStatus::Ok);
        let text = CString::new(take_string(text)).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(popaug_matching_parse(inst, text.as_ptr(), &mut again), PopaugStatus::Ok);
        let mut popular = false;
        assert_eq!(popaug_is_popular(inst, again, &mut popular), PopaugStatus::Ok);
        assert!(popular);
        popaug_matching_free(again);
        popaug_matching_free(m);
        popaug_instance_free(inst);
    }
}

#[test]
fn unpopular_matching_is_reported() {
    let inst = parse(INTRO);
    let text = CString::new("a1 -> b1\na2 -> b2\na3 -> b3\n").unwrap();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(popaug_matching_parse(inst, text.as_ptr(), &mut m), PopaugStatus::Ok);
        let mut popular = true;
        assert_eq!(popaug_is_popular(inst, m, &mut popular), PopaugStatus::Ok);
        assert!(!popular);
        popaug_matching_free(m);
        popaug_instance_free(inst);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(popaug_instance_parse(ptr::null(), &mut inst), PopaugStatus::NullPointer);
        let bad = CString::new("person a : nowhere\n").unwrap();
        assert_eq!(popaug_instance_parse(bad.as_ptr(), &mut inst), PopaugStatus::ParseError);
        assert!(last_error().contains("nowhere"));
        assert!(inst.is_null());

        let invalid = [0xffu8, 0];
        assert_eq!(
            popaug_instance_parse(invalid.as_ptr().cast(), &mut inst),
            PopaugStatus::InvalidUtf8
        );

        let inst = parse(INTRO);
        let unknown = CString::new("a1 -> zz\n").unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(
            popaug_matching_parse(inst, unknown.as_ptr(), &mut m),
            PopaugStatus::InvalidArgument
        );

        let (mut plan, mut total) = (ptr::null_mut(), 0u64);
        assert_eq!(
            popaug_augment(inst, PopaugAugmentMode::Length2, true, 0, &mut plan, &mut total),
            PopaugStatus::InvalidArgument
        );
        assert_eq!(
            popaug_augment(inst, PopaugAugmentMode::Length2, false, 0, &mut plan, &mut total),
            PopaugStatus::InvalidArgument,
            "lists of length three are rejected in length-2 mode"
        );
        assert_eq!(
            popaug_augment(inst, PopaugAugmentMode::Exact, false, 1, &mut plan, &mut total),
            PopaugStatus::LimitExceeded
        );
        assert_eq!(
            popaug_augment(inst, PopaugAugmentMode::Exact, false, 10, ptr::null_mut(), &mut total),
            PopaugStatus::NullPointer
        );
        popaug_instance_free(inst);
        popaug_instance_free(ptr::null_mut());
        popaug_string_free(ptr::null_mut());
    }
}

#[test]
fn instance_text_survives_the_boundary() {
    let inst = parse(INTRO);
    unsafe {
        let mut text = ptr::null_mut();
        assert_eq!(popaug_instance_to_string(inst, &mut text), PopaugStatus::Ok);
        let text = take_string(text);
        assert!(
            text.starts_with("option last-resorts\nitem b1 copies=1 cost=3\n"),
            "{text}"
        );
        let again = parse(&text);
        assert_eq!(popaug_instance_num_people(again), 3);
        popaug_instance_free(again);
        popaug_instance_free(inst);
    }
}

#[test]
fn header_declares_every_entry_point() {
    let header = include_str!("../include/popaug.h");
    for name in [
        "popaug_instance_parse",
        "popaug_instance_free",
        "popaug_instance_to_string",
        "popaug_matching_parse",
        "popaug_matching_to_string",
        "popaug_matching_free",
        "popaug_min_cost_popular",
        "popaug_is_popular",
        "popaug_augment",
        "popaug_last_error",
        "popaug_string_free",
        "POPAUG_STATUS_NOT_FOUND",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
