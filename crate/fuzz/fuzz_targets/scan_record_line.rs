#![no_main]

use charp_cli::scan::ScanRecord;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|line: &str| {
    if let Ok(record) = ScanRecord::parse_line(line) {
        let _ = record.digest_matches();
        let json = serde_json::to_string(&record).unwrap();
        assert_eq!(ScanRecord::parse_line(&json).unwrap(), record);
    }
});
