#![no_main]

use libfuzzer_sys::fuzz_target;
use lukmv::formula::Signature;
use lukmv::parser::parse_formula;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for sig in [Signature::Ab, Signature::PAb, Signature::Mv, Signature::MvHalf] {
        let _ = parse_formula(text, sig);
    }
});
