#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(field) = topovox::io::parse_field(text) {
        let ids: Vec<u64> = field.iter().map(|e| e.0).collect();
        let _ = topovox::io::field_values(&ids, &field);
    }
});
