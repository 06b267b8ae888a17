/*
 * toepsim — banded space-time block code simulator.
 *
 * C interface to the simulator core: experiment configuration and Monte
 * Carlo runs, transmit beamformer design, and closed-form error analytics.
 * All objects are opaque handles created and destroyed through this API;
 * every fallible call returns a toepsim_status and leaves a human-readable
 * message in toepsim_last_error() on failure.
 *
 * Strings returned through a char** out-parameter are heap allocated and
 * must be released with toepsim_string_free().
 */
#ifndef TOEPSIM_H
#define TOEPSIM_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define TOEPSIM_API __declspec(dllexport)
#else
#define TOEPSIM_API __attribute__((visibility("default")))
#endif

typedef enum toepsim_status {
    TOEPSIM_OK = 0,
    TOEPSIM_ERR_ARGUMENT = 1, /* invalid argument or precondition */
    TOEPSIM_ERR_CONFIG = 2,   /* bad configuration key or value */
    TOEPSIM_ERR_NUMERIC = 3,  /* convergence failure or non-finite result */
    TOEPSIM_ERR_CAPACITY = 4, /* search space exceeds a hard guard */
    TOEPSIM_ERR_SINGULAR = 5, /* channel matrix lost column rank */
    TOEPSIM_ERR_IO = 6,       /* file read or write failure */
    TOEPSIM_ERR_NULL = 7      /* required pointer was NULL */
} toepsim_status;

typedef struct toepsim_config toepsim_config;
typedef struct toepsim_result toepsim_result;
typedef struct toepsim_design toepsim_design;

/* Message describing the most recent failure on this thread; empty string
 * when the last call succeeded. The pointer stays valid until the next
 * library call on the same thread. */
TOEPSIM_API const char* toepsim_last_error(void);

/* Library version as "major.minor.patch". */
TOEPSIM_API const char* toepsim_version(void);

/* Releases a string returned through a char** out-parameter. */
TOEPSIM_API void toepsim_string_free(char* s);

/* ---- experiment configuration ------------------------------------- */

/* Fresh configuration with default values; NULL on allocation failure. */
TOEPSIM_API toepsim_config* toepsim_config_create(void);
TOEPSIM_API void toepsim_config_destroy(toepsim_config* cfg);
TOEPSIM_API toepsim_config* toepsim_config_clone(const toepsim_config* cfg);

/* Sets one field by key using the config-file value syntax. Keys: m, k, l,
 * scheme (qam|pam|psk), mu, snr_db (comma list), trials, min_errors,
 * detector (zf|mmse|zfdfe|ml|ml-exhaustive), beamformer
 * (identity|waterfill|exact), channel (iid|broadside), dt_ratio, delta_deg,
 * seed, out, threads, force_sigma2, label. */
TOEPSIM_API toepsim_status toepsim_config_set(toepsim_config* cfg, const char* key,
                                              const char* value);
TOEPSIM_API toepsim_status toepsim_config_get(const toepsim_config* cfg, const char* key,
                                              char** out_value);

/* Parses a whole config file: `key = value` lines, '#' comments, unknown
 * keys rejected by name. */
TOEPSIM_API toepsim_status toepsim_config_parse(const char* text, toepsim_config** out_cfg);
TOEPSIM_API toepsim_status toepsim_config_serialize(const toepsim_config* cfg, char** out_text);

/* Full validation with the error message naming the offending field. */
TOEPSIM_API toepsim_status toepsim_config_validate(const toepsim_config* cfg);

TOEPSIM_API int toepsim_config_key_count(void);
/* Key name by index in serialization order; NULL when out of range. */
TOEPSIM_API const char* toepsim_config_key_name(int index);

/* ---- experiment presets -------------------------------------------- */

TOEPSIM_API int toepsim_preset_count(void);
/* Preset name by index; NULL when out of range. */
TOEPSIM_API const char* toepsim_preset_name(int index);
/* Number of labeled curve variants inside a preset. */
TOEPSIM_API toepsim_status toepsim_preset_size(const char* name, int* out_size);
/* One variant: a fresh config handle plus its label. Either out-pointer
 * may be NULL if only the other is wanted. */
TOEPSIM_API toepsim_status toepsim_preset_variant(const char* name, int index,
                                                  toepsim_config** out_cfg, char** out_label);

/* ---- Monte Carlo runs ----------------------------------------------- */

typedef struct toepsim_curve_point {
    double snr_db;
    long long trials;
    long long bit_errors;
    long long symbol_errors;
    double ber;
    double ser;
    long long redrawn;  /* singular-channel redraws */
    double block_snr;   /* energy per block over noise per channel use */
    int active_k;       /* inner code dimension used at this point */
} toepsim_curve_point;

/* Runs the configured sweep. Deterministic for a fixed (config, seed) pair
 * regardless of thread count. */
TOEPSIM_API toepsim_status toepsim_run(const toepsim_config* cfg, toepsim_result** out_result);
TOEPSIM_API void toepsim_result_destroy(toepsim_result* result);

/* Number of SNR points in the result; -1 on NULL. */
TOEPSIM_API int toepsim_result_points(const toepsim_result* result);
TOEPSIM_API toepsim_status toepsim_result_point(const toepsim_result* result, int index,
                                                toepsim_curve_point* out_point);

/* CSV with header snr_db,trials,bit_errors,symbol_errors,ber,ser,redrawn. */
TOEPSIM_API toepsim_status toepsim_result_csv(const toepsim_result* result, char** out_text);
TOEPSIM_API toepsim_status toepsim_result_write_csv(const toepsim_result* result,
                                                    const char* path);

/* ---- transmit beamformer design ------------------------------------- */

/* Optimal beamformer for a uniform linear array facing a broadside
 * scattering ring: `spacing_ratio` is antenna spacing over wavelength,
 * `angle_spread_deg` the ring half-width in degrees. method is "exact"
 * (projected-gradient on the union-bound objective) or "waterfill"
 * (inverse-eigenvalue water filling). d_min is the constellation minimum
 * distance and sigma2 the complex noise variance. */
TOEPSIM_API toepsim_status toepsim_design_broadside(int m, double spacing_ratio,
                                                    double angle_spread_deg, const char* method,
                                                    double d_min, double sigma2,
                                                    toepsim_design** out_design);

/* Same with an explicit m x m Hermitian channel covariance, row major,
 * interleaved (re, im) pairs: sigma_re_im[2 * (r * m + c)] is Re, the next
 * entry Im. */
TOEPSIM_API toepsim_status toepsim_design_custom(int m, const double* sigma_re_im,
                                                 const char* method, double d_min, double sigma2,
                                                 toepsim_design** out_design);

TOEPSIM_API void toepsim_design_destroy(toepsim_design* design);

/* Active inner dimension K (rows of B); -1 on NULL. */
TOEPSIM_API int toepsim_design_k(const toepsim_design* design);
/* Antenna count M (columns of B); -1 on NULL. */
TOEPSIM_API int toepsim_design_antennas(const toepsim_design* design);
/* Objective value attained by the design. */
TOEPSIM_API toepsim_status toepsim_design_objective(const toepsim_design* design,
                                                    double* out_value);
/* Per-row amplitude gamma_r (the power split is gamma_r^2, summing to 1). */
TOEPSIM_API toepsim_status toepsim_design_gamma(const toepsim_design* design, int row,
                                                double* out_gamma);
/* Entry (row, col) of the K x M beamformer matrix B. */
TOEPSIM_API toepsim_status toepsim_design_entry(const toepsim_design* design, int row, int col,
                                                double* out_re, double* out_im);

/* ---- code-family constants and scalar analytics --------------------- */

/* Monte Carlo extremes of det(H^H H) over unit-norm length-l generators h,
 * where H is the (l + k - 1) x k banded matrix built from h. Outputs the
 * sampled minimum, maximum, and the minimum of the determinant over the
 * largest leave-one-column-out minor (the constant entering averaged
 * error bounds). samples must be at least 1000. */
TOEPSIM_API toepsim_status toepsim_toeplitz_constants(int l, int k, long long samples,
                                                      unsigned long long seed, double* out_c_min,
                                                      double* out_c_max, double* out_c0);

/* Exact symbol error probability of a zero-forcing receiver; scheme is
 * "qam", "pam" or "psk", rho the symbol energy over the noise variance per
 * real dimension, noise_gain the receiver's noise enhancement factor. */
TOEPSIM_API toepsim_status toepsim_symbol_error_probability(const char* scheme, int mu,
                                                            double rho, double noise_gain,
                                                            double* out_sep);

/* Exponential upper bound on the same quantity; always >= the exact SEP. */
TOEPSIM_API toepsim_status toepsim_symbol_error_bound(const char* scheme, int mu, double rho,
                                                      double noise_gain, double* out_bound);

/* Gaussian tail probability Q(x). */
TOEPSIM_API toepsim_status toepsim_q_function(double x, double* out_value);

#ifdef __cplusplus
}
#endif

#endif /* TOEPSIM_H */
