#![no_main]

use libfuzzer_sys::fuzz_target;
use lukmv::formula::Signature;
use lukmv::parser::{parse_formula, print_formula};

// Whatever parses must print back to something that parses to the same
// formula; the printer output is the parser's fixed point.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for sig in [Signature::Ab, Signature::PAb, Signature::Mv, Signature::MvHalf] {
        if let Ok(f) = parse_formula(text, sig) {
            let printed = print_formula(&f);
            let again = parse_formula(&printed, sig).expect("printed formula parses");
            assert_eq!(again, f, "print/parse round trip diverged");
        }
    }
});
