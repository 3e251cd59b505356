use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use tunnel_ffi::*;

fn last_error() -> String {
    let p = tunnel_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solution_handle_round_trip() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { tunnel_solution_new(12.0, 2.0, 11.8, &mut h) },
        TunnelStatus::Ok
    );
    assert!(!h.is_null());
    let (mut r, mut t) = (TunnelComplex::default(), TunnelComplex::default());
    assert_eq!(
        unsafe { tunnel_solution_amplitudes(h, &mut r, &mut t) },
        TunnelStatus::Ok
    );
    let flux = r.re * r.re + r.im * r.im + t.re * t.re + t.im * t.im;
    assert!((flux - 1.0).abs() < 1e-12);

    let (mut prob, mut phase) = (0.0, 0.0);
    assert_eq!(
        unsafe { tunnel_solution_transmission(h, &mut prob, &mut phase) },
        TunnelStatus::Ok
    );
    assert!((prob - (t.re * t.re + t.im * t.im)).abs() < 1e-15);

    // continuity at the barrier entrance
    let (mut a, mut b) = (TunnelComplex::default(), TunnelComplex::default());
    unsafe {
        tunnel_solution_wavefunction(h, -1e-12, &mut a);
        tunnel_solution_wavefunction(h, 1e-12, &mut b);
    }
    assert!((a.re - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
    assert_eq!(
        unsafe { tunnel_solution_wavefunction(h, f64::NAN, &mut a) },
        TunnelStatus::InvalidArgument
    );
    unsafe { tunnel_solution_free(h) };
    unsafe { tunnel_solution_free(ptr::null_mut()) };
}

#[test]
fn errors_set_status_and_message() {
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { tunnel_solution_new(12.0, -1.0, 6.0, &mut h) },
        TunnelStatus::InvalidArgument
    );
    assert!(h.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { tunnel_solution_amplitudes(ptr::null(), ptr::null_mut(), ptr::null_mut()) },
        TunnelStatus::NullPointer
    );
    assert!(last_error().contains("handle"));
}

#[test]
fn times_match_core() {
    let mut t = TunnelTimes::default();
    assert_eq!(unsafe { tunnel_times(12.0, 30.0, 11.8, &mut t) }, TunnelStatus::Ok);
    let core =
        tunnel_core::times::TimesReport::compute(&tunnel_core::BarrierSpec::new(12.0, 30.0).unwrap(), 11.8).unwrap();
    assert_eq!(t.tau_g, core.tau_g);
    assert_eq!(t.t_ph, core.t_ph);
    assert_eq!(t.flagged, 0);
}

#[test]
fn spectrum_weights() {
    let mut s = TunnelSpectrum::default();
    assert_eq!(
        unsafe { tunnel_spectrum(12.0, 1.0, 11.8, 1000.0, &mut s) },
        TunnelStatus::Ok
    );
    assert!(s.w_plus > s.w_minus);
    assert!((s.ratio - s.w_minus / s.w_plus).abs() < 1e-12);
    assert_eq!(s.flags & TUNNEL_SPECTRUM_PARSEVAL, 0);
}

#[test]
fn packet_handle() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { tunnel_packet_new(31.4, 3.6, 2.0, &mut h) }, TunnelStatus::Ok);
    assert_eq!(unsafe { tunnel_packet_set_dt(h, 0.0) }, TunnelStatus::InvalidArgument);
    let mut a = TunnelArrival::default();
    assert_eq!(unsafe { tunnel_packet_arrival(h, 1.0, &mut a) }, TunnelStatus::Ok);
    assert!((a.t_arr - 0.454005).abs() < 1e-5, "{}", a.t_arr);
    assert!(a.captured_weight > 0.95);
    let mut t_in = 0.0;
    assert_eq!(unsafe { tunnel_packet_free_arrival(h, &mut t_in) }, TunnelStatus::Ok);
    assert!((t_in - 0.42643).abs() < 1e-5);
    let mut m = 0.0;
    assert_eq!(unsafe { tunnel_packet_mean(h, 1.0, &mut m) }, TunnelStatus::Ok);
    assert!((m - 0.45107).abs() < 1e-4);
    unsafe { tunnel_packet_free(h) };

    assert_eq!(
        unsafe { tunnel_packet_new(31.4, 6.0, 2.0, &mut h) },
        TunnelStatus::InvalidArgument
    );
}

fn target_dir() -> PathBuf {
    // tests/abi-<hash> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let dir = target_dir();
    // the test build refreshes deps/ but not the uplifted copy
    let lib = [dir.join("deps/libtunnel_ffi.a"), dir.join("libtunnel_ffi.a")]
        .into_iter()
        .find(|p| p.exists())
        .unwrap_or_default();
    if lib.as_os_str().is_empty() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping C smoke test: no static library or C compiler");
        return;
    }
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let out = tempfile_path(&dir);
    let status = Command::new("cc")
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "C smoke exited with {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}

fn tempfile_path(dir: &Path) -> PathBuf {
    dir.join(format!("tunnel_ffi_smoke_{}", std::process::id()))
}
