//! C ABI over `tunnel_core`.
//!
//! Every fallible call returns a [`TunnelStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`tunnel_last_error`]. Handles are opaque and must be
//! released with the matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use tunnel_core::spectral::{barrier_k_spectrum, SpectrumFlag};
use tunnel_core::times::TimesReport;
use tunnel_core::wavepacket::{arrival_time_of_max, free_arrival_time, mean_crossing_time, Basis, TimingSettings};
use tunnel_core::{solve, BarrierSpec, Error, PacketSpec, ScatteringSolution};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TunnelStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TunnelComplex {
    pub re: f64,
    pub im: f64,
}

/// Stationary times at one `(u0, l, ε)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TunnelTimes {
    pub tau_g: f64,
    pub tau_0: f64,
    pub t_ph: f64,
    pub t_free: f64,
    pub tau_d_in: f64,
    pub tau_d_out: f64,
    pub hartman_limit: f64,
    /// Nonzero when the numerical group delay did not confirm the analytic one.
    pub flagged: i32,
}

pub const TUNNEL_SPECTRUM_K_MAX_LOW: u32 = 1;
pub const TUNNEL_SPECTRUM_PARSEVAL: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TunnelSpectrum {
    pub w_plus: f64,
    pub w_minus: f64,
    pub ratio: f64,
    pub excess: f64,
    pub parseval: f64,
    /// Bitwise OR of the `TUNNEL_SPECTRUM_*` flags.
    pub flags: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TunnelArrival {
    pub t_arr: f64,
    pub peak_density: f64,
    pub window_end: f64,
    pub captured_weight: f64,
}

/// Opaque stationary solution.
pub struct TunnelSolution(ScatteringSolution);

/// Opaque initial packet bound to a barrier height.
pub struct TunnelPacket {
    u0: f64,
    spec: PacketSpec,
    settings: TimingSettings,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(e: Error) -> TunnelStatus {
    set_error(e.to_string());
    if e.is_numerical() {
        TunnelStatus::Numerical
    } else {
        TunnelStatus::InvalidArgument
    }
}

fn guard(f: impl FnOnce() -> TunnelStatus) -> TunnelStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            TunnelStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return TunnelStatus::NullPointer;
        })+
    };
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn tunnel_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

#[no_mangle]
pub extern "C" fn tunnel_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    VERSION.as_ptr()
}

/// Solves the stationary problem; `*out` receives a handle on success.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_solution_new(u0: f64, l: f64, eps: f64, out: *mut *mut TunnelSolution) -> TunnelStatus {
    non_null!(out);
    guard(|| match BarrierSpec::new(u0, l).and_then(|b| solve(&b, eps)) {
        Ok(s) => {
            *out = Box::into_raw(Box::new(TunnelSolution(s)));
            TunnelStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// # Safety
/// `handle` must come from [`tunnel_solution_new`] and not be freed yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tunnel_solution_free(handle: *mut TunnelSolution) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be a live solution handle and `r`, `t` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_solution_amplitudes(
    handle: *const TunnelSolution,
    r: *mut TunnelComplex,
    t: *mut TunnelComplex,
) -> TunnelStatus {
    non_null!(handle, r, t);
    let s = &(*handle).0;
    let (rr, tt) = (s.reflection(), s.transmission());
    *r = TunnelComplex { re: rr.re, im: rr.im };
    *t = TunnelComplex { re: tt.re, im: tt.im };
    TunnelStatus::Ok
}

/// `|T|²` and the phase shift of the transmitted wave.
///
/// # Safety
/// `handle` must be a live solution handle and the out-pointers valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_solution_transmission(
    handle: *const TunnelSolution,
    probability: *mut f64,
    phase_shift: *mut f64,
) -> TunnelStatus {
    non_null!(handle, probability, phase_shift);
    let s = &(*handle).0;
    *probability = s.transmission_probability();
    *phase_shift = s.phase_shift();
    TunnelStatus::Ok
}

/// # Safety
/// `handle` must be a live solution handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_solution_wavefunction(
    handle: *const TunnelSolution,
    x: f64,
    out: *mut TunnelComplex,
) -> TunnelStatus {
    non_null!(handle, out);
    if !x.is_finite() {
        set_error("x must be finite");
        return TunnelStatus::InvalidArgument;
    }
    let v = (*handle).0.wavefunction_at(x);
    *out = TunnelComplex { re: v.re, im: v.im };
    TunnelStatus::Ok
}

/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_times(u0: f64, l: f64, eps: f64, out: *mut TunnelTimes) -> TunnelStatus {
    non_null!(out);
    guard(
        || match BarrierSpec::new(u0, l).and_then(|b| TimesReport::compute(&b, eps)) {
            Ok(r) => {
                *out = TunnelTimes {
                    tau_g: r.tau_g,
                    tau_0: r.tau_0,
                    t_ph: r.t_ph,
                    t_free: r.t_free,
                    tau_d_in: r.tau_d_in,
                    tau_d_out: r.tau_d_out,
                    hartman_limit: r.hartman_limit,
                    flagged: r.flagged as i32,
                };
                TunnelStatus::Ok
            }
            Err(e) => fail(e),
        },
    )
}

/// Directional weights of the field inside the barrier over `[−k_max, k_max]`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_spectrum(
    u0: f64,
    l: f64,
    eps: f64,
    k_max: f64,
    out: *mut TunnelSpectrum,
) -> TunnelStatus {
    non_null!(out);
    guard(|| {
        let r = BarrierSpec::new(u0, l)
            .and_then(|b| solve(&b, eps))
            .and_then(|s| barrier_k_spectrum(&s, k_max, 3));
        match r {
            Ok(s) => {
                let flags = s.flags.iter().fold(0, |acc, f| {
                    acc | match f {
                        SpectrumFlag::KMaxTooSmall => TUNNEL_SPECTRUM_K_MAX_LOW,
                        SpectrumFlag::Parseval => TUNNEL_SPECTRUM_PARSEVAL,
                    }
                });
                *out = TunnelSpectrum {
                    w_plus: s.w_plus,
                    w_minus: s.w_minus,
                    ratio: s.ratio,
                    excess: s.excess,
                    parseval: s.parseval,
                    flags,
                };
                TunnelStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Initial packet `(p, b)` for barriers of height `u0`, with default timing settings.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_new(u0: f64, p: f64, b: f64, out: *mut *mut TunnelPacket) -> TunnelStatus {
    non_null!(out);
    guard(
        || match BarrierSpec::new(u0, 0.0).and_then(|b0| PacketSpec::sub_barrier(p, b, &b0)) {
            Ok(spec) => {
                *out = Box::into_raw(Box::new(TunnelPacket {
                    u0,
                    spec,
                    settings: TimingSettings::default(),
                }));
                TunnelStatus::Ok
            }
            Err(e) => fail(e),
        },
    )
}

/// # Safety
/// `handle` must come from [`tunnel_packet_new`] and not be freed yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_free(handle: *mut TunnelPacket) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Sets the coarse time step used by later timing calls.
///
/// # Safety
/// `handle` must be a live packet handle.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_set_dt(handle: *mut TunnelPacket, dt: f64) -> TunnelStatus {
    non_null!(handle);
    if !(dt.is_finite() && dt > 0.0) {
        set_error("dt must be finite and > 0");
        return TunnelStatus::InvalidArgument;
    }
    (*handle).settings.dt = dt;
    TunnelStatus::Ok
}

/// Arrival time of the density maximum at the exit of a barrier of width `l`.
///
/// # Safety
/// `handle` must be a live packet handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_arrival(
    handle: *const TunnelPacket,
    l: f64,
    out: *mut TunnelArrival,
) -> TunnelStatus {
    non_null!(handle, out);
    let h = &*handle;
    guard(|| {
        let r = BarrierSpec::new(h.u0, l).and_then(|b| arrival_time_of_max(&h.spec, Basis::Barrier(b), l, &h.settings));
        match r {
            Ok(a) => {
                *out = TunnelArrival {
                    t_arr: a.t,
                    peak_density: a.peak_density,
                    window_end: a.window_end,
                    captured_weight: a.captured_weight,
                };
                TunnelStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Arrival of the free packet maximum at the origin.
///
/// # Safety
/// `handle` must be a live packet handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_free_arrival(handle: *const TunnelPacket, out: *mut f64) -> TunnelStatus {
    non_null!(handle, out);
    let h = &*handle;
    guard(|| match free_arrival_time(&h.spec, h.u0, &h.settings) {
        Ok(a) => {
            *out = a.t;
            TunnelStatus::Ok
        }
        Err(e) => fail(e),
    })
}

/// Mean passage time of the density at the exit of a barrier of width `l`.
///
/// # Safety
/// `handle` must be a live packet handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn tunnel_packet_mean(handle: *const TunnelPacket, l: f64, out: *mut f64) -> TunnelStatus {
    non_null!(handle, out);
    let h = &*handle;
    guard(|| {
        let r = BarrierSpec::new(h.u0, l).and_then(|b| mean_crossing_time(&h.spec, Basis::Barrier(b), l, &h.settings));
        match r {
            Ok(m) => {
                *out = m.t_mean;
                TunnelStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn null_out_pointer() {
        let s = unsafe { tunnel_times(12.0, 1.0, 6.0, ptr::null_mut()) };
        assert_eq!(s, TunnelStatus::NullPointer);
        let msg = unsafe { CStr::from_ptr(tunnel_last_error()) };
        assert!(msg.to_str().unwrap().contains("out"));
    }

    #[test]
    fn invalid_energy_is_reported() {
        let mut t = TunnelTimes::default();
        let s = unsafe { tunnel_times(12.0, 1.0, 12.5, &mut t) };
        assert_eq!(s, TunnelStatus::InvalidArgument);
        assert!(!tunnel_last_error().is_null());
    }

    #[test]
    fn version_matches_package() {
        let v = unsafe { CStr::from_ptr(tunnel_version()) };
        assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
    }
}
