#![no_main]

use libfuzzer_sys::fuzz_target;
use lukmv::parser::parse_formula_file;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = parse_formula_file(text);
});
