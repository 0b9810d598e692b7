//! Printer/parser round-trip properties over randomly generated terms and
//! formulas in all four languages.

use lukmv::formula::Signature;
use lukmv::generate::{random_formula, random_term, rng_for, var_names};
use lukmv::parser::{
    format_formula_file, parse_formula, parse_formula_file, parse_term, print_formula, print_term,
};
use proptest::prelude::*;

const SIGS: [Signature; 4] = [
    Signature::Ab,
    Signature::PAb,
    Signature::Mv,
    Signature::MvHalf,
];

proptest! {
    #[test]
    fn parse_print_formula_identity(seed in 0u64..1 << 32, nvars in 1usize..4, sig in 0usize..4) {
        let sig = SIGS[sig];
        let mut rng = rng_for(seed, 0);
        let vars = var_names(nvars);
        let f = random_formula(&mut rng, sig, 3, &vars, 4);
        // parsing reduces, so fix the point first, then demand identity
        let g = parse_formula(&print_formula(&f), sig).unwrap();
        let h = parse_formula(&print_formula(&g), sig).unwrap();
        prop_assert_eq!(&h, &g);
        prop_assert_eq!(print_formula(&h), print_formula(&g));
    }

    #[test]
    fn parse_print_term_identity(seed in 0u64..1 << 32, nvars in 1usize..4, sig in 0usize..4) {
        let sig = SIGS[sig];
        let mut rng = rng_for(seed, 1);
        let vars = var_names(nvars);
        let t = random_term(&mut rng, sig, 4, &vars);
        let u = parse_term(&print_term(&t), sig).unwrap();
        let v = parse_term(&print_term(&u), sig).unwrap();
        prop_assert_eq!(&v, &u);
    }

    #[test]
    fn formula_file_roundtrip(seed in 0u64..1 << 32, count in 1usize..5, sig in 0usize..4) {
        let sig = SIGS[sig];
        let mut rng = rng_for(seed, 2);
        let vars = var_names(2);
        let formulas: Vec<_> = (0..count)
            .map(|_| {
                let f = random_formula(&mut rng, sig, 2, &vars, 3);
                // files hold parser-canonical formulas
                parse_formula(&print_formula(&f), sig).unwrap()
            })
            .collect();
        let text = format_formula_file(sig, &formulas);
        let (sig2, back) = parse_formula_file(&text).unwrap();
        prop_assert_eq!(sig2, sig);
        prop_assert_eq!(back, formulas);
    }
}
