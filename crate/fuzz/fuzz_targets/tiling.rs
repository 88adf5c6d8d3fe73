#![no_main]
use libfuzzer_sys::fuzz_target;
use quadratura::geometry::{parse_tiling, read_tiling, validate, write_tiling};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = parse_tiling(text) else {
        assert!(read_tiling(text).is_err());
        return;
    };
    let report = validate(&t);
    assert_eq!(report.ok(), read_tiling(text).is_ok());
    if report.ok() {
        let written = write_tiling(&t).unwrap();
        assert_eq!(read_tiling(&written).unwrap(), t.sorted());
        assert_eq!(t.multiset().unwrap().area(), t.n() * t.n());
        if t.n() <= 64 {
            t.render_ascii().unwrap();
            t.canonical_form().unwrap();
        }
    }
});
