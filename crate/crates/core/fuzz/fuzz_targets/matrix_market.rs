#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(a) = topovox::io::parse_matrix(text) {
        let again = topovox::io::parse_matrix(&topovox::io::write_matrix(&a))
            .expect("written matrix must parse");
        assert_eq!(again.shape(), a.shape());
        assert_eq!(again.nnz(), a.nnz());
    }
});
