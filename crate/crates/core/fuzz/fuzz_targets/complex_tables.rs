#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = topovox::io::parse_edges(text);
    let _ = topovox::io::parse_faces(text);
    let _ = topovox::io::parse_cells(text);
});
