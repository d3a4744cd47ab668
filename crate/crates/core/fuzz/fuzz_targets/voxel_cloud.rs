#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(cloud) = topovox::io::parse_voxel_cloud(text) {
        let again = topovox::io::parse_voxel_cloud(&topovox::io::write_voxel_cloud(&cloud))
            .expect("written cloud must parse");
        assert_eq!(again.codes(), cloud.codes());
    }
});
