//! Compile and run the C example against the generated header and the
//! built static library.

use std::path::PathBuf;
use std::process::Command;

#[test]
fn c_example_builds_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/{profile}/deps/<this test> -> target/{profile}
    let mut lib_dir = std::env::current_exe().unwrap();
    lib_dir.pop();
    if lib_dir.ends_with("deps") {
        lib_dir.pop();
    }
    assert!(
        lib_dir.join("libweakdens_capi.a").exists(),
        "static library not found in {}",
        lib_dir.display()
    );

    let out_dir = tempfile_dir();
    let binary = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-lweakdens_capi", "-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&binary)
        .status()
        .expect("cc not available");
    assert!(status.success(), "compilation failed");

    let output = Command::new(&binary).output().expect("run smoke binary");
    assert!(
        output.status.success(),
        "smoke exited with {:?}: {}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.starts_with("ok:"), "unexpected output: {stdout}");

    std::fs::remove_dir_all(&out_dir).ok();
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("weakdens-capi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
