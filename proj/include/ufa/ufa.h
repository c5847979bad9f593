/*
 * C interface to the closed-form shallow-network library.
 *
 * All objects are opaque handles released with the matching *_free call.
 * Every fallible call returns a ufa_status; on failure ufa_last_error() and
 * ufa_last_error_index() describe the most recent failure on the calling
 * thread. Strings returned through char** are heap allocated and must be
 * released with ufa_free_string().
 *
 * Activations are named by strings: sigmoid, tanh, identity, exp, softplus,
 * affine:<a>,<b>, scale:<c>,<d>:<base>, optionally prefixed with "bisect:"
 * (numerical inverse) and suffixed with "@<lo>,<hi>" (restricted domain).
 */
#ifndef UFA_H
#define UFA_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(UFA_BUILDING_LIBRARY)
#    define UFA_API __declspec(dllexport)
#  else
#    define UFA_API __declspec(dllimport)
#  endif
#else
#  define UFA_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ufa_status {
  UFA_OK = 0,
  UFA_INVALID_ARGUMENT = 1,
  UFA_DOMAIN_VIOLATION = 2,
  UFA_RANGE_VIOLATION = 3,
  UFA_NOT_INVERTIBLE = 4,
  UFA_WEIGHT_UNDEFINED = 5,
  UFA_DIMENSION_MISMATCH = 6,
  UFA_CERTIFICATE_MISSING = 7,
  UFA_NO_MATCHING_ANCHOR = 8,
  UFA_ANCHOR_MISMATCH = 9,
  UFA_FORMAT_ERROR = 10,
  UFA_PARSE_ERROR = 11,
  UFA_CONFLICTING_DUPLICATE = 12,
  UFA_NOT_APPLICABLE = 13,
  UFA_NUMERICAL_DIVERGENCE = 14,
  UFA_SAMPLE_MISMATCH = 15,
  UFA_IO_ERROR = 16,
  UFA_INTERNAL_ERROR = 17
} ufa_status;

typedef enum ufa_format { UFA_FORMAT_TEXT = 0, UFA_FORMAT_KV = 1 } ufa_format;

typedef struct ufa_activation ufa_activation;
typedef struct ufa_samples ufa_samples;
typedef struct ufa_network ufa_network;
typedef struct ufa_report ufa_report;
typedef struct ufa_gd_run ufa_gd_run;

UFA_API const char* ufa_version(void);
/* Error name as used in diagnostics, e.g. "RangeViolation". */
UFA_API const char* ufa_status_name(ufa_status status);
UFA_API const char* ufa_last_error(void);
/* Sample, line or iteration index attached to the last failure, or -1. */
UFA_API long long ufa_last_error_index(void);
UFA_API void ufa_free_string(char* s);

/* activations */

typedef struct ufa_certificate {
  int passed;
  size_t grid_size;
  double worst_point;
  double worst_value;
} ufa_certificate;

UFA_API ufa_status ufa_activation_parse(const char* text, ufa_activation** out);
UFA_API void ufa_activation_free(ufa_activation* act);
UFA_API ufa_status ufa_activation_name(const ufa_activation* act, char** out);
UFA_API ufa_status ufa_activation_eval(const ufa_activation* act, double x, double* out);
UFA_API ufa_status ufa_activation_derivative(const ufa_activation* act, double x, double* out);
UFA_API ufa_status ufa_activation_invert(const ufa_activation* act, double y, double* out);
UFA_API ufa_status ufa_activation_check_invertible(const ufa_activation* act, double lo, double hi, size_t grid,
                                                   ufa_certificate* out);
UFA_API ufa_status ufa_activation_check_nonvanishing(const ufa_activation* act, double lo, double hi, size_t grid,
                                                     ufa_certificate* out);

/* closed-form weights */

typedef struct ufa_theta {
  double theta;
  double hidden_value;        /* g(<x, delta>) */
  double sigma_inverse_value; /* sigma^-1(f) */
  double residual;            /* |sigma(hidden_value * theta) - f| */
} ufa_theta;

UFA_API ufa_status ufa_compute_theta(double f_value, const double* x, const double* delta, size_t n,
                                     const ufa_activation* g, const ufa_activation* sigma, ufa_theta* out);

/* samples: xs is p*n and ys is p*m, row-major */

UFA_API ufa_status ufa_samples_create(size_t n, size_t m, size_t p, const double* xs, const double* ys,
                                      ufa_samples** out);
UFA_API ufa_status ufa_samples_read_csv(const char* path, ufa_samples** out);
UFA_API ufa_status ufa_samples_parse_csv(const char* text, ufa_samples** out);
/* target: sine-bump | gauss2d | swirl2to2 */
UFA_API ufa_status ufa_samples_builtin(const char* target, size_t per_axis, double shift, ufa_samples** out);
UFA_API ufa_status ufa_samples_write_csv(const ufa_samples* samples, const char* path);
UFA_API ufa_status ufa_samples_dims(const ufa_samples* samples, size_t* n, size_t* m, size_t* p);
UFA_API ufa_status ufa_samples_point(const ufa_samples* samples, size_t i, double* x, double* y);
UFA_API void ufa_samples_free(ufa_samples* samples);

/* hypothesis checks; delta_policy: NULL or "default" | "fixed:<d1>,..." */

UFA_API ufa_status ufa_check_hypotheses(const ufa_samples* samples, const char* g, const char* const* sigmas,
                                        size_t num_sigmas, const char* delta_policy, size_t grid, ufa_format format,
                                        int* passed, char** report);
UFA_API ufa_status ufa_suggest_rescale(const ufa_samples* samples, size_t output, const char* sigma, double margin,
                                       char** out_activation);

/* networks */

typedef struct ufa_trace {
  size_t unit_index;
  double alpha;
} ufa_trace;

typedef struct ufa_recon_summary {
  size_t p;
  size_t m;
  double max_abs_residual;
  double sse;
  double mse;
  double construction_seconds;
  double tolerance;
  int passed;
} ufa_recon_summary;

UFA_API ufa_status ufa_architecture_counts(size_t n, size_t m, size_t p, size_t* inputs, size_t* hidden,
                                           size_t* outputs);

/* grid 0 selects the default certification grid (1001). */
UFA_API ufa_status ufa_network_build(const ufa_samples* samples, const char* g, const char* const* sigmas,
                                     size_t num_sigmas, const char* delta_policy, size_t grid, ufa_network** out);
UFA_API ufa_status ufa_network_build_per_point(const ufa_samples* samples, const char* g, const char* const* sigmas,
                                               size_t num_sigmas, const double* deltas, size_t grid,
                                               ufa_network** out);
UFA_API void ufa_network_free(ufa_network* net);
UFA_API ufa_status ufa_network_dims(const ufa_network* net, size_t* n, size_t* m, size_t* p);
UFA_API ufa_status ufa_network_unit(const ufa_network* net, size_t i, double* anchor_x, double* delta,
                                    double* theta);
/* routing: "anchor-exact" | "nearest-anchor" | "unit:<i>"; trace may be NULL. */
UFA_API ufa_status ufa_network_forward(const ufa_network* net, const double* x, size_t n, const char* routing,
                                       double* outputs, size_t m, ufa_trace* trace);
UFA_API ufa_status ufa_network_verify(const ufa_network* net, const ufa_samples* samples, double tolerance,
                                      ufa_report** out);
UFA_API ufa_status ufa_network_save(const ufa_network* net, const char* path);
UFA_API ufa_status ufa_network_load(const char* path, ufa_network** out);
UFA_API ufa_status ufa_network_serialize(const ufa_network* net, char** out);
UFA_API ufa_status ufa_network_deserialize(const char* text, ufa_network** out);

UFA_API ufa_status ufa_report_summary(const ufa_report* report, ufa_recon_summary* out);
UFA_API ufa_status ufa_report_residuals(const ufa_report* report, double* out, size_t p);
UFA_API ufa_status ufa_report_render(const ufa_report* report, ufa_format format, char** out);
UFA_API void ufa_report_free(ufa_report* report);

/* plot data: x1..xn, f1..fm, net1..netm with nearest-anchor routing */
UFA_API ufa_status ufa_export_plot_builtin(const ufa_network* net, const char* target, size_t per_axis, double shift,
                                           const char* path);
UFA_API ufa_status ufa_export_plot_samples(const ufa_network* net, const ufa_samples* samples, const char* path);

/* gradient-descent baseline */

typedef struct ufa_gd_config {
  size_t hidden_width;
  double learning_rate;
  size_t max_iterations;
  double target_mse;
  uint64_t seed;
  double init_scale;
} ufa_gd_config;

typedef struct ufa_gd_summary {
  double initial_mse;
  double final_mse;
  size_t iterations_run;
  int converged;
  int loss_increased;
  double wall_seconds;
} ufa_gd_summary;

UFA_API ufa_gd_config ufa_gd_config_default(void);
/* UFA_NUMERICAL_DIVERGENCE reports the iteration through ufa_last_error_index(). */
UFA_API ufa_status ufa_gd_train(const ufa_samples* samples, const ufa_gd_config* config, ufa_gd_run** out);
UFA_API void ufa_gd_free(ufa_gd_run* run);
UFA_API ufa_status ufa_gd_summary_get(const ufa_gd_run* run, ufa_gd_summary* out);
UFA_API ufa_status ufa_gd_loss_history(const ufa_gd_run* run, double* out, size_t len);
UFA_API ufa_status ufa_gd_write_loss_csv(const ufa_gd_run* run, const char* path);
UFA_API ufa_status ufa_gd_gradient_check(const ufa_gd_run* run, const ufa_samples* samples, double* max_rel_error);
UFA_API ufa_status ufa_compare(const ufa_report* ufa, const ufa_gd_run* gd, ufa_format format, int* ufa_wins_loss,
                               char** out);

#ifdef __cplusplus
}
#endif

#endif /* UFA_H */
