#![no_main]

use charp_core::MultiPoly;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&head, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let p = [2u64, 3, 5, 7, 11, 13][usize::from(head) % 6];
    let nvars = usize::from(head >> 4) % 5 + 1;
    if let Ok(f) = MultiPoly::parse(text, p, nvars) {
        // printed form must parse back to the same polynomial
        if !f.is_zero() {
            let again = MultiPoly::parse(&f.to_string(), p, nvars).expect("display re-parses");
            assert_eq!(again, f);
        }
    }
});
