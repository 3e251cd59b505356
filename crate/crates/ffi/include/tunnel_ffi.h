#ifndef TUNNEL_FFI_H
#define TUNNEL_FFI_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define TUNNEL_SPECTRUM_K_MAX_LOW 1

#define TUNNEL_SPECTRUM_PARSEVAL 2

typedef enum TunnelStatus {
  TUNNEL_STATUS_OK = 0,
  TUNNEL_STATUS_NULL_POINTER = 1,
  TUNNEL_STATUS_INVALID_ARGUMENT = 2,
  TUNNEL_STATUS_NUMERICAL = 3,
  TUNNEL_STATUS_PANIC = 4,
} TunnelStatus;

/**
 * Opaque initial packet bound to a barrier height.
 */
typedef struct TunnelPacket TunnelPacket;

/**
 * Opaque stationary solution.
 */
typedef struct TunnelSolution TunnelSolution;

typedef struct TunnelComplex {
  double re;
  double im;
} TunnelComplex;

/**
 * Stationary times at one `(u0, l, ε)`.
 */
typedef struct TunnelTimes {
  double tau_g;
  double tau_0;
  double t_ph;
  double t_free;
  double tau_d_in;
  double tau_d_out;
  double hartman_limit;
  /**
   * Nonzero when the numerical group delay did not confirm the analytic one.
   */
  int32_t flagged;
} TunnelTimes;

typedef struct TunnelSpectrum {
  double w_plus;
  double w_minus;
  double ratio;
  double excess;
  double parseval;
  /**
   * Bitwise OR of the `TUNNEL_SPECTRUM_*` flags.
   */
  uint32_t flags;
} TunnelSpectrum;

typedef struct TunnelArrival {
  double t_arr;
  double peak_density;
  double window_end;
  double captured_weight;
} TunnelArrival;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *tunnel_last_error(void);

const char *tunnel_version(void);

/**
 * Solves the stationary problem; `*out` receives a handle on success.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TunnelStatus tunnel_solution_new(double u0, double l, double eps, struct TunnelSolution **out);

/**
 * # Safety
 * `handle` must come from [`tunnel_solution_new`] and not be freed yet, or be NULL.
 */
void tunnel_solution_free(struct TunnelSolution *handle);

/**
 * # Safety
 * `handle` must be a live solution handle and `r`, `t` valid for writes.
 */
enum TunnelStatus tunnel_solution_amplitudes(const struct TunnelSolution *handle,
                                             struct TunnelComplex *r,
                                             struct TunnelComplex *t);

/**
 * `|T|²` and the phase shift of the transmitted wave.
 *
 * # Safety
 * `handle` must be a live solution handle and the out-pointers valid for writes.
 */
enum TunnelStatus tunnel_solution_transmission(const struct TunnelSolution *handle,
                                               double *probability,
                                               double *phase_shift);

/**
 * # Safety
 * `handle` must be a live solution handle and `out` valid for writes.
 */
enum TunnelStatus tunnel_solution_wavefunction(const struct TunnelSolution *handle,
                                               double x,
                                               struct TunnelComplex *out);

/**
 * # Safety
 * `out` must be valid for writes.
 */
enum TunnelStatus tunnel_times(double u0, double l, double eps, struct TunnelTimes *out);

/**
 * Directional weights of the field inside the barrier over `[−k_max, k_max]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TunnelStatus tunnel_spectrum(double u0,
                                  double l,
                                  double eps,
                                  double k_max,
                                  struct TunnelSpectrum *out);

/**
 * Initial packet `(p, b)` for barriers of height `u0`, with default timing settings.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum TunnelStatus tunnel_packet_new(double u0, double p, double b, struct TunnelPacket **out);

/**
 * # Safety
 * `handle` must come from [`tunnel_packet_new`] and not be freed yet, or be NULL.
 */
void tunnel_packet_free(struct TunnelPacket *handle);

/**
 * Sets the coarse time step used by later timing calls.
 *
 * # Safety
 * `handle` must be a live packet handle.
 */
enum TunnelStatus tunnel_packet_set_dt(struct TunnelPacket *handle, double dt);

/**
 * Arrival time of the density maximum at the exit of a barrier of width `l`.
 *
 * # Safety
 * `handle` must be a live packet handle and `out` valid for writes.
 */
enum TunnelStatus tunnel_packet_arrival(const struct TunnelPacket *handle,
                                        double l,
                                        struct TunnelArrival *out);

/**
 * Arrival of the free packet maximum at the origin.
 *
 * # Safety
 * `handle` must be a live packet handle and `out` valid for writes.
 */
enum TunnelStatus tunnel_packet_free_arrival(const struct TunnelPacket *handle, double *out);

/**
 * Mean passage time of the density at the exit of a barrier of width `l`.
 *
 * # Safety
 * `handle` must be a live packet handle and `out` valid for writes.
 */
enum TunnelStatus tunnel_packet_mean(const struct TunnelPacket *handle, double l, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUNNEL_FFI_H */
