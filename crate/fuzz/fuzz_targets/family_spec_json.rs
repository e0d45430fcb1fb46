#![no_main]

use charp_cli::args::parse_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = parse_spec(text);
});
