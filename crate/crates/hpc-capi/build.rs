use std::env;
use std::path::PathBuf;

fn main() {
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("hpc.h");
    cbindgen::generate(&crate_dir)
        .expect("header generation failed")
        .write_to_file(&out);
    // Lets the test suite compare the committed header with a fresh one.
    println!("cargo:rustc-env=HPC_GENERATED_HEADER={}", out.display());
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
}
