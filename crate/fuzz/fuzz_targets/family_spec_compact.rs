#![no_main]

use charp_core::families::FamilySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(spec) = FamilySpec::parse_compact(text) {
        let json = serde_json::to_string(&spec).unwrap();
        let back: FamilySpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }
});
