#![no_main]
use libfuzzer_sys::fuzz_target;
use quadratura::geometry::read_tiling;
use quadratura::network::{extract_network, recover_and_check, solve_sizes};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = read_tiling(text) else { return };
    if t.len() > 48 {
        return;
    }
    let net = extract_network(&t).unwrap();
    assert_eq!(net.edges.len(), t.len());
    assert_eq!(solve_sizes(&net).unwrap().scale_dimension, 1);
    assert!(recover_and_check(&t).unwrap());
});
