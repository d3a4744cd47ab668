#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(points) = topovox::io::parse_points(text) {
        let again = topovox::io::parse_points(&topovox::io::write_points(&points))
            .expect("written points must parse");
        assert_eq!(again.len(), points.len());
    }
});
