use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").expect("CARGO_MANIFEST_DIR");
    let out_dir = PathBuf::from(env::var("OUT_DIR").expect("OUT_DIR"));

    let header = out_dir.join("netctrl.h");
    cbindgen::generate(&crate_dir)
        .expect("cbindgen header generation")
        .write_to_file(&header);

    // Keep a copy in the source tree so C consumers can include it without
    // running a build first. Best effort: read-only checkouts still build.
    let tracked = PathBuf::from(&crate_dir).join("include").join("netctrl.h");
    if let Some(parent) = tracked.parent() {
        let _ = std::fs::create_dir_all(parent);
    }
    let _ = std::fs::copy(&header, &tracked);

    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
