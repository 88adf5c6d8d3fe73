#![no_main]
use libfuzzer_sys::fuzz_target;
use quadratura::model::parse_assignment;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(a) = parse_assignment(text) {
        // Re-serialising and parsing again must give the same map.
        let dump: String = a.iter().map(|(v, x)| format!("{v} {x}\n")).collect();
        assert_eq!(parse_assignment(&dump).unwrap(), a);
    }
});
