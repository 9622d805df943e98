use std::path::PathBuf;

fn main() {
    let crate_dir = PathBuf::from(std::env::var("CARGO_MANIFEST_DIR").unwrap());
    let header = crate_dir.join("include").join("ftcc.h");
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    match cbindgen::generate(&crate_dir) {
        Ok(bindings) => {
            // write only when the content changed to keep rebuilds quiet
            let mut buf = Vec::new();
            bindings.write(&mut buf);
            let fresh = String::from_utf8(buf).unwrap_or_default();
            let current = std::fs::read_to_string(&header).unwrap_or_default();
            if fresh != current {
                std::fs::create_dir_all(header.parent().unwrap()).ok();
                std::fs::write(&header, fresh).expect("write ftcc.h");
            }
        }
        Err(e) => {
            // keep the checked-in header when generation is unavailable
            println!("cargo:warning=cbindgen failed ({e}); using the checked-in header");
        }
    }
}
