#![no_main]

use charp_cli::args::parse_values;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    // bound the expansion so huge ranges do not exhaust memory
    if text.len() > 24 || (text.contains("..") && text.chars().filter(char::is_ascii_digit).count() > 6) {
        return;
    }
    if let Ok(values) = parse_values(text, 0..64) {
        assert!(values.windows(2).all(|w| w[0] < w[1]));
    }
});
