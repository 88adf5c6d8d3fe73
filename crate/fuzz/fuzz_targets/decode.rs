#![no_main]
use std::sync::OnceLock;

use libfuzzer_sys::fuzz_target;
use quadratura::geometry::validate;
use quadratura::model::{assignment_from_tiling, build_base_model, decode_solution, parse_assignment, IlpModel};

fn model() -> &'static IlpModel {
    static MODEL: OnceLock<IlpModel> = OnceLock::new();
    MODEL.get_or_init(|| build_base_model(4).unwrap().add_y_link().unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(a) = parse_assignment(text) else { return };
    if let Ok(t) = decode_solution(model(), &a) {
        assert!(validate(&t).ok());
        let back = assignment_from_tiling(model(), &t).unwrap();
        assert_eq!(decode_solution(model(), &back).unwrap().sorted(), t.sorted());
    }
});
