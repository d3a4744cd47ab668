#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(obj) = topovox::io::parse_obj(text) {
        if let Ok(mesh) = obj.mesh() {
            let again = topovox::io::parse_obj(&topovox::io::write_obj_mesh(&mesh))
                .expect("written OBJ must parse");
            assert_eq!(again.faces.len(), mesh.faces.len());
        }
        let _ = obj.line_set();
    }
});
