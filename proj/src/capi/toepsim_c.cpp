#include "toepsim/toepsim.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

#include "toepsim/analytics.hpp"
#include "toepsim/channel.hpp"
#include "toepsim/design.hpp"
#include "toepsim/errors.hpp"
#include "toepsim/experiment.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/quadrature.hpp"
#include "toepsim/toeplitz.hpp"

struct toepsim_config {
    toepsim::ExperimentConfig cfg;
};

struct toepsim_result {
    std::vector<toepsim::CurveRecord> records;
};

struct toepsim_design {
    toepsim::BeamformerDesign design;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

// Runs `fn`, mapping exceptions onto status codes and the thread-local
// error message. On success the message is cleared.
template <typename Fn>
toepsim_status wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return TOEPSIM_OK;
    } catch (const toepsim::ConfigError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_CONFIG;
    } catch (const toepsim::CapacityError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_CAPACITY;
    } catch (const toepsim::SingularChannelError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_SINGULAR;
    } catch (const toepsim::IoError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_IO;
    } catch (const toepsim::NumericError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_NUMERIC;
    } catch (const toepsim::ArgumentError& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_ARGUMENT;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return TOEPSIM_ERR_NUMERIC;
    }
}

toepsim_status fail_null(const char* what) {
    g_last_error = std::string("null pointer: ") + what;
    return TOEPSIM_ERR_NULL;
}

toepsim_status make_design(const toepsim::ComplexMatrix& sigma, const char* method, double d_min,
                           double sigma2, toepsim_design** out_design) {
    return wrap([&] {
        const std::string token = method;
        toepsim::BeamformerDesign design =
            token == "exact"       ? toepsim::optimize_exact(sigma, d_min, sigma2)
            : token == "waterfill" ? toepsim::optimize_waterfill(sigma, d_min, sigma2)
                                   : throw toepsim::ArgumentError(
                                         "unknown design method: " + token +
                                         " (expected exact or waterfill)");
        *out_design = new toepsim_design{std::move(design)};
    });
}

}  // namespace

extern "C" {

const char* toepsim_last_error(void) { return g_last_error.c_str(); }

const char* toepsim_version(void) { return "1.0.0"; }

void toepsim_string_free(char* s) { std::free(s); }

/* ---- configuration -------------------------------------------------- */

toepsim_config* toepsim_config_create(void) {
    try {
        return new toepsim_config{};
    } catch (...) {
        return nullptr;
    }
}

void toepsim_config_destroy(toepsim_config* cfg) { delete cfg; }

toepsim_config* toepsim_config_clone(const toepsim_config* cfg) {
    if (!cfg) return nullptr;
    try {
        return new toepsim_config{cfg->cfg};
    } catch (...) {
        return nullptr;
    }
}

toepsim_status toepsim_config_set(toepsim_config* cfg, const char* key, const char* value) {
    if (!cfg) return fail_null("config");
    if (!key) return fail_null("key");
    if (!value) return fail_null("value");
    return wrap([&] { toepsim::set_config_field(cfg->cfg, key, value); });
}

toepsim_status toepsim_config_get(const toepsim_config* cfg, const char* key, char** out_value) {
    if (!cfg) return fail_null("config");
    if (!key) return fail_null("key");
    if (!out_value) return fail_null("out_value");
    return wrap([&] {
        std::string value = toepsim::get_config_field(cfg->cfg, key);
        *out_value = dup_string(value);
        if (!*out_value) throw std::bad_alloc();
    });
}

toepsim_status toepsim_config_parse(const char* text, toepsim_config** out_cfg) {
    if (!text) return fail_null("text");
    if (!out_cfg) return fail_null("out_cfg");
    return wrap([&] { *out_cfg = new toepsim_config{toepsim::parse_config(text)}; });
}

toepsim_status toepsim_config_serialize(const toepsim_config* cfg, char** out_text) {
    if (!cfg) return fail_null("config");
    if (!out_text) return fail_null("out_text");
    return wrap([&] {
        *out_text = dup_string(toepsim::serialize_config(cfg->cfg));
        if (!*out_text) throw std::bad_alloc();
    });
}

toepsim_status toepsim_config_validate(const toepsim_config* cfg) {
    if (!cfg) return fail_null("config");
    return wrap([&] { toepsim::validate_config(cfg->cfg); });
}

int toepsim_config_key_count(void) {
    return static_cast<int>(toepsim::config_keys().size());
}

const char* toepsim_config_key_name(int index) {
    static const std::vector<std::string> keys = toepsim::config_keys();
    if (index < 0 || index >= static_cast<int>(keys.size())) return nullptr;
    return keys[static_cast<size_t>(index)].c_str();
}

/* ---- presets --------------------------------------------------------- */

int toepsim_preset_count(void) {
    return static_cast<int>(toepsim::preset_names().size());
}

const char* toepsim_preset_name(int index) {
    static const std::vector<std::string> names = toepsim::preset_names();
    if (index < 0 || index >= static_cast<int>(names.size())) return nullptr;
    return names[static_cast<size_t>(index)].c_str();
}

toepsim_status toepsim_preset_size(const char* name, int* out_size) {
    if (!name) return fail_null("name");
    if (!out_size) return fail_null("out_size");
    return wrap([&] { *out_size = static_cast<int>(toepsim::preset(name).size()); });
}

toepsim_status toepsim_preset_variant(const char* name, int index, toepsim_config** out_cfg,
                                      char** out_label) {
    if (!name) return fail_null("name");
    return wrap([&] {
        std::vector<toepsim::LabeledConfig> variants = toepsim::preset(name);
        if (index < 0 || index >= static_cast<int>(variants.size())) {
            throw toepsim::ArgumentError("preset variant index out of range");
        }
        const toepsim::LabeledConfig& variant = variants[static_cast<size_t>(index)];
        if (out_cfg) *out_cfg = new toepsim_config{variant.config};
        if (out_label) {
            *out_label = dup_string(variant.label);
            if (!*out_label) throw std::bad_alloc();
        }
    });
}

/* ---- Monte Carlo runs ------------------------------------------------ */

toepsim_status toepsim_run(const toepsim_config* cfg, toepsim_result** out_result) {
    if (!cfg) return fail_null("config");
    if (!out_result) return fail_null("out_result");
    return wrap([&] { *out_result = new toepsim_result{toepsim::run_experiment(cfg->cfg)}; });
}

void toepsim_result_destroy(toepsim_result* result) { delete result; }

int toepsim_result_points(const toepsim_result* result) {
    if (!result) return -1;
    return static_cast<int>(result->records.size());
}

toepsim_status toepsim_result_point(const toepsim_result* result, int index,
                                    toepsim_curve_point* out_point) {
    if (!result) return fail_null("result");
    if (!out_point) return fail_null("out_point");
    return wrap([&] {
        if (index < 0 || index >= static_cast<int>(result->records.size())) {
            throw toepsim::ArgumentError("result point index out of range");
        }
        const toepsim::CurveRecord& r = result->records[static_cast<size_t>(index)];
        out_point->snr_db = r.snr_db;
        out_point->trials = r.trials;
        out_point->bit_errors = r.bit_errors;
        out_point->symbol_errors = r.symbol_errors;
        out_point->ber = r.ber;
        out_point->ser = r.ser;
        out_point->redrawn = r.redrawn;
        out_point->block_snr = r.block_snr;
        out_point->active_k = r.active_k;
    });
}

toepsim_status toepsim_result_csv(const toepsim_result* result, char** out_text) {
    if (!result) return fail_null("result");
    if (!out_text) return fail_null("out_text");
    return wrap([&] {
        *out_text = dup_string(toepsim::csv_string(result->records));
        if (!*out_text) throw std::bad_alloc();
    });
}

toepsim_status toepsim_result_write_csv(const toepsim_result* result, const char* path) {
    if (!result) return fail_null("result");
    if (!path) return fail_null("path");
    return wrap([&] { toepsim::emit_csv(result->records, path); });
}

/* ---- beamformer design ------------------------------------------------ */

toepsim_status toepsim_design_broadside(int m, double spacing_ratio, double angle_spread_deg,
                                        const char* method, double d_min, double sigma2,
                                        toepsim_design** out_design) {
    if (!method) return fail_null("method");
    if (!out_design) return fail_null("out_design");
    toepsim_status status = TOEPSIM_OK;
    toepsim::ComplexMatrix sigma;
    status = wrap([&] {
        sigma = toepsim::correlation_broadside(m, spacing_ratio,
                                               angle_spread_deg * std::numbers::pi / 180.0);
    });
    if (status != TOEPSIM_OK) return status;
    return make_design(sigma, method, d_min, sigma2, out_design);
}

toepsim_status toepsim_design_custom(int m, const double* sigma_re_im, const char* method,
                                     double d_min, double sigma2, toepsim_design** out_design) {
    if (!sigma_re_im) return fail_null("sigma_re_im");
    if (!method) return fail_null("method");
    if (!out_design) return fail_null("out_design");
    toepsim_status status = TOEPSIM_OK;
    toepsim::ComplexMatrix sigma;
    status = wrap([&] {
        if (m < 1) throw toepsim::ArgumentError("antenna count must be at least 1");
        sigma = toepsim::ComplexMatrix(m, m);
        double max_abs = 0.0;
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                const double* cell = sigma_re_im + 2 * (r * m + c);
                sigma(r, c) = toepsim::cplx(cell[0], cell[1]);
                max_abs = std::max(max_abs, std::abs(sigma(r, c)));
            }
        }
        for (int r = 0; r < m; ++r) {
            for (int c = 0; c < m; ++c) {
                if (std::abs(sigma(r, c) - std::conj(sigma(c, r))) > 1e-9 * (1.0 + max_abs)) {
                    throw toepsim::ArgumentError("covariance matrix must be Hermitian");
                }
            }
        }
    });
    if (status != TOEPSIM_OK) return status;
    return make_design(sigma, method, d_min, sigma2, out_design);
}

void toepsim_design_destroy(toepsim_design* design) { delete design; }

int toepsim_design_k(const toepsim_design* design) {
    if (!design) return -1;
    return design->design.k;
}

int toepsim_design_antennas(const toepsim_design* design) {
    if (!design) return -1;
    return design->design.b.cols();
}

toepsim_status toepsim_design_objective(const toepsim_design* design, double* out_value) {
    if (!design) return fail_null("design");
    if (!out_value) return fail_null("out_value");
    *out_value = design->design.objective_value;
    g_last_error.clear();
    return TOEPSIM_OK;
}

toepsim_status toepsim_design_gamma(const toepsim_design* design, int row, double* out_gamma) {
    if (!design) return fail_null("design");
    if (!out_gamma) return fail_null("out_gamma");
    return wrap([&] {
        if (row < 0 || row >= static_cast<int>(design->design.gammas.size())) {
            throw toepsim::ArgumentError("design row index out of range");
        }
        *out_gamma = design->design.gammas[static_cast<size_t>(row)];
    });
}

toepsim_status toepsim_design_entry(const toepsim_design* design, int row, int col,
                                    double* out_re, double* out_im) {
    if (!design) return fail_null("design");
    if (!out_re) return fail_null("out_re");
    if (!out_im) return fail_null("out_im");
    return wrap([&] {
        const toepsim::ComplexMatrix& b = design->design.b;
        if (row < 0 || row >= b.rows() || col < 0 || col >= b.cols()) {
            throw toepsim::ArgumentError("design entry index out of range");
        }
        *out_re = b(row, col).real();
        *out_im = b(row, col).imag();
    });
}

/* ---- constants and scalar analytics ----------------------------------- */

toepsim_status toepsim_toeplitz_constants(int l, int k, long long samples,
                                          unsigned long long seed, double* out_c_min,
                                          double* out_c_max, double* out_c0) {
    if (!out_c_min) return fail_null("out_c_min");
    if (!out_c_max) return fail_null("out_c_max");
    if (!out_c0) return fail_null("out_c0");
    return wrap([&] {
        if (k < 1) throw toepsim::ArgumentError("column count must be at least 1");
        if (samples > 2147483647LL) {
            throw toepsim::ArgumentError("sample budget too large");
        }
        auto family = [k](const toepsim::cvec& h) { return toepsim::toeplitz_matrix(h, k); };
        toepsim::ConstantEstimate est =
            toepsim::estimate_constants(family, l, static_cast<int>(samples), seed);
        *out_c_min = est.c_min_hat;
        *out_c_max = est.c_max_hat;
        *out_c0 = est.c0_hat;
    });
}

toepsim_status toepsim_symbol_error_probability(const char* scheme, int mu, double rho,
                                                double noise_gain, double* out_sep) {
    if (!scheme) return fail_null("scheme");
    if (!out_sep) return fail_null("out_sep");
    return wrap([&] {
        *out_sep = toepsim::sep_zf(toepsim::scheme_from_token(scheme), mu, rho, noise_gain);
    });
}

toepsim_status toepsim_symbol_error_bound(const char* scheme, int mu, double rho,
                                          double noise_gain, double* out_bound) {
    if (!scheme) return fail_null("scheme");
    if (!out_bound) return fail_null("out_bound");
    return wrap([&] {
        *out_bound =
            toepsim::sep_upper_bound(toepsim::scheme_from_token(scheme), mu, rho, noise_gain);
    });
}

toepsim_status toepsim_q_function(double x, double* out_value) {
    if (!out_value) return fail_null("out_value");
    *out_value = toepsim::q_function(x);
    g_last_error.clear();
    return TOEPSIM_OK;
}

}  // extern "C"
