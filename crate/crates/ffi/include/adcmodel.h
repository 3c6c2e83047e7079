#ifndef ADCMODEL_H
#define ADCMODEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stdint.h>

typedef enum AdcmBound {
  ADCM_BOUND_MINIMUM = 0,
  ADCM_BOUND_TRADEOFF = 1,
} AdcmBound;

typedef enum AdcmStatus {
  ADCM_STATUS_OK = 0,
  ADCM_STATUS_NULL_POINTER = 1,
  ADCM_STATUS_INVALID_ARGUMENT = 2,
  ADCM_STATUS_IO = 3,
  ADCM_STATUS_PARSE = 4,
  ADCM_STATUS_FIT = 5,
  ADCM_STATUS_PANIC = 6,
} AdcmStatus;

// Opaque model handle.
typedef struct AdcmModel AdcmModel;

// Per-query estimate; all quantities are per convert or per ADC unless
// prefixed with `total`.
typedef struct AdcmEstimate {
  uint32_t n_adcs;
  double per_adc_throughput_sps;
  double energy_pj_per_convert;
  double area_um2_per_adc;
  double total_area_um2;
  enum AdcmBound energy_bound_active;
  // The operating point lies outside the data the model was fit on.
  bool extrapolated;
} AdcmEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *adcm_version(void);

// Message for the most recent failed call on this thread, or an empty
// string. The pointer stays valid until the next failing call on the
// same thread.
const char *adcm_last_error_message(void);

// Creates a model with the bundled reference coefficients.
//
// # Safety
// `out` must be valid for writing one pointer.
enum AdcmStatus adcm_model_reference(struct AdcmModel **out);

// Loads a model document from `path`.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writing
// one pointer.
enum AdcmStatus adcm_model_load(const char *path, struct AdcmModel **out);

// Fits energy and area models to a survey CSV with canonical column names.
// Returns `ADCM_STATUS_FIT` if the corpus cannot support a fit.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writing
// one pointer.
enum AdcmStatus adcm_model_fit(const char *path, struct AdcmModel **out);

// Writes the model document to `path`.
//
// # Safety
// `model` must come from this library; `path` must be NUL-terminated.
enum AdcmStatus adcm_model_save(const struct AdcmModel *model, const char *path);

// Releases a model. Null is ignored.
//
// # Safety
// `model` must be null or a handle from this library not yet freed.
void adcm_model_free(struct AdcmModel *model);

// Estimates per-ADC energy and area for `n_adcs` ADCs sharing
// `total_throughput_sps`.
//
// # Safety
// `model` must come from this library; `out` must be valid for writes.
enum AdcmStatus adcm_estimate(const struct AdcmModel *model,
                              uint32_t n_adcs,
                              double total_throughput_sps,
                              double tech_nm,
                              double enob,
                              struct AdcmEstimate *out);

// Energy per convert (pJ) of one ADC.
//
// # Safety
// `model` must come from this library; `out` must be valid for writes.
enum AdcmStatus adcm_energy_pj(const struct AdcmModel *model,
                               double tech_nm,
                               double enob,
                               double throughput_sps,
                               double *out);

// Area (um^2) of one ADC given its throughput and energy per convert.
//
// # Safety
// `model` must come from this library; `out` must be valid for writes.
enum AdcmStatus adcm_area_um2(const struct AdcmModel *model,
                              double tech_nm,
                              double throughput_sps,
                              double energy_pj,
                              double *out);

// Throughput where the tradeoff bound overtakes the minimum-energy bound.
//
// # Safety
// `model` must come from this library; `out` must be valid for writes.
enum AdcmStatus adcm_corner_throughput(const struct AdcmModel *model,
                                       double tech_nm,
                                       double enob,
                                       double *out);

// Shifts the energy model so it predicts `measured_pj` at the given point.
// A calibration that changes nothing is not recorded.
//
// # Safety
// `model` must come from this library and not be shared across threads
// during the call.
enum AdcmStatus adcm_calibrate_energy(struct AdcmModel *model,
                                      double tech_nm,
                                      double enob,
                                      double throughput_sps,
                                      double measured_pj);

// Scales the area model so it predicts `measured_um2` at the given point.
// A calibration that changes nothing is not recorded.
//
// # Safety
// `model` must come from this library and not be shared across threads
// during the call.
enum AdcmStatus adcm_calibrate_area(struct AdcmModel *model,
                                    double tech_nm,
                                    double throughput_sps,
                                    double energy_pj,
                                    double measured_um2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ADCMODEL_H */
