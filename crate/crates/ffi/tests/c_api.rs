use std::ffi::{CStr, CString};
use std::ptr;

use strip_forge_ffi::*;

#[test]
fn build_pack_and_read_back() {
    let inst = sf_instance_new(10);
    assert!(!inst.is_null());
    unsafe {
        for (w, h) in [(5, 4), (5, 4), (6, 2), (4, 2)] {
            assert_eq!(sf_instance_add_item(inst, w, h), SfStatus::Ok);
        }
        assert_eq!(sf_instance_len(inst), 4);
        assert_eq!(sf_lower_bound(inst), 6);
        let mut p = ptr::null_mut();
        assert_eq!(sf_pack(inst, SfAlgo::Nfdh, &mut p), SfStatus::Ok);
        assert!(sf_packing_height(p) >= 6);
        assert_eq!(sf_packing_len(p), 4);
        let mut seen = [false; 4];
        for k in 0..4 {
            let mut pl = SfPlacement::default();
            assert_eq!(sf_packing_get(p, k, &mut pl), SfStatus::Ok);
            seen[pl.item] = true;
        }
        assert!(seen.iter().all(|&s| s));
        let mut v = 99;
        assert_eq!(sf_validate(inst, p, false, &mut v), SfStatus::Ok);
        assert_eq!(v, 0);
        let json = sf_packing_to_json(p);
        assert!(CStr::from_ptr(json).to_str().unwrap().contains("pack-v1"));
        sf_string_free(json);
        sf_packing_free(p);
        sf_instance_free(inst);
    }
}

#[test]
fn errors_are_codes() {
    assert!(sf_instance_new(0).is_null());
    unsafe {
        assert_eq!(sf_instance_add_item(ptr::null_mut(), 1, 1), SfStatus::NullPointer);
        let inst = sf_instance_new(4);
        assert_eq!(sf_instance_add_item(inst, 5, 1), SfStatus::InvalidArgument);
        assert!(!sf_last_error().is_null());
        let mut p = ptr::null_mut();
        assert_eq!(sf_pack(inst, SfAlgo::Nfdh, &mut p), SfStatus::InvalidArgument);
        sf_instance_add_item(inst, 4, 4);
        assert_eq!(sf_pack(inst, SfAlgo::Nfdh, ptr::null_mut()), SfStatus::NullPointer);
        let mut out = SfPlacement::default();
        assert_eq!(sf_packing_get(ptr::null(), 0, &mut out), SfStatus::NullPointer);
        sf_instance_free(inst);

        let bad = CString::new("{\"schema\":\"strip-v1\"}").unwrap();
        let mut parsed = ptr::null_mut();
        assert_eq!(sf_instance_from_json(bad.as_ptr(), &mut parsed), SfStatus::Parse);
        assert!(parsed.is_null());
        let msg = CStr::from_ptr(sf_last_error()).to_str().unwrap();
        assert!(msg.contains("JSON"), "{msg}");
    }
}

#[test]
fn json_instance_and_exact() {
    let text = CString::new(r#"{"schema":"strip-v1","width":2,"items":[{"id":"a","width":2,"height":1},{"id":"b","width":1,"height":2},{"id":"c","width":1,"height":2}]}"#).unwrap();
    unsafe {
        let mut inst = ptr::null_mut();
        assert_eq!(sf_instance_from_json(text.as_ptr(), &mut inst), SfStatus::Ok);
        let mut p = ptr::null_mut();
        assert_eq!(sf_pack(inst, SfAlgo::Exact, &mut p), SfStatus::Ok);
        assert_eq!(sf_packing_height(p), 3);
        sf_packing_free(p);
        sf_instance_free(inst);
    }
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/strip_forge.h")).unwrap();
    for name in ["sf_instance_new", "sf_pack", "sf_packing_get", "sf_validate", "sf_last_error", "SfStatus_Ok", "SfPlacement"] {
        assert!(h.contains(name), "header lacks {name}");
    }
    assert!(h.contains("typedef struct SfInstance SfInstance"));
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        "#include \"strip_forge.h\"\nint main(void) { SfInstance *i = sf_instance_new(4); SfPlacement p; (void)p; sf_instance_free(i); return SfStatus_Ok; }\n",
    )
    .unwrap();
    let st = std::process::Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(concat!(env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&src)
        .status()
        .unwrap();
    assert!(st.success());
}

fn which_cc() -> Result<&'static str, ()> {
    let ok = std::process::Command::new("cc").arg("--version").output().is_ok_and(|o| o.status.success());
    if ok { Ok("cc") } else { Err(()) }
}
