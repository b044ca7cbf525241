//! Compile and run a small C program against the generated header and the
//! static library, exercising the ABI end to end.

use std::path::PathBuf;
use std::process::Command;

const C_SOURCE: &str = r#"
#include <stdio.h>
#include "qcross.h"

int main(void) {
    QcrossCertificate *cert = NULL;
    if (qcross_certify(2, 4, 2, 2, &cert) != QCROSS_STATUS_OK) return 1;
    if (qcross_certificate_feasible(cert) != 1) return 2;

    char *bound = NULL;
    if (qcross_certificate_bound(cert, &bound) != QCROSS_STATUS_OK) return 3;
    printf("bound=%s\n", bound);
    qcross_string_free(bound);
    qcross_certificate_free(cert);

    cert = NULL;
    if (qcross_certify(2, 3, 2, 1, &cert) != QCROSS_STATUS_INVALID_PARAMETER) return 4;
    if (cert != NULL) return 5;
    if (qcross_last_error_message() == NULL) return 6;

    char *g = NULL;
    if (qcross_gauss(5, 2, 2, &g) != QCROSS_STATUS_OK) return 7;
    printf("gauss=%s\n", g);
    qcross_string_free(g);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    if !Command::new("gcc")
        .arg("--version")
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
    {
        eprintln!("skipping: no C compiler on PATH");
        return;
    }

    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/c_smoke-<hash> -> target/<profile>
    let mut profile_dir = std::env::current_exe().unwrap();
    profile_dir.pop();
    profile_dir.pop();
    let lib = profile_dir.join("libqcross_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(&src, C_SOURCE).unwrap();
    let exe = dir.path().join("smoke");

    let cc = Command::new("gcc")
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&exe)
        .output()
        .unwrap();
    assert!(
        cc.status.success(),
        "compile failed: {}",
        String::from_utf8_lossy(&cc.stderr)
    );

    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "smoke exited {:?}: {}",
        run.status.code(),
        String::from_utf8_lossy(&run.stderr)
    );
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(stdout.contains("bound=49"), "stdout: {stdout}");
    assert!(stdout.contains("gauss=155"), "stdout: {stdout}");
}
