// Command line front end for the simulator shared library. Talks to the
// core exclusively through the C interface in toepsim/toepsim.h.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "toepsim/toepsim.h"

namespace {

// 0 on success, 2 for anything wrong with the request, 3 for numerical
// trouble during an otherwise valid computation.
int status_to_exit(toepsim_status status) {
    switch (status) {
        case TOEPSIM_OK:
            return 0;
        case TOEPSIM_ERR_NUMERIC:
        case TOEPSIM_ERR_CAPACITY:
        case TOEPSIM_ERR_SINGULAR:
            return 3;
        default:
            return 2;
    }
}

int fail(toepsim_status status) {
    std::fprintf(stderr, "error: %s\n", toepsim_last_error());
    return status_to_exit(status);
}

int fail_config(const std::string& message) {
    std::fprintf(stderr, "error: %s\n", message.c_str());
    return 2;
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

// Expands "start:step:stop" into a comma-separated SNR list; values already
// in list form pass through untouched.
bool expand_snr(const std::string& text, std::string* out, std::string* error) {
    if (text.find(':') == std::string::npos) {
        *out = text;
        return true;
    }
    double start = 0.0, step = 0.0, stop = 0.0;
    char tail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &start, &step, &stop, &tail) != 3) {
        *error = "expected start:step:stop, got '" + text + "'";
        return false;
    }
    if (step <= 0.0) {
        *error = "SNR step must be positive in '" + text + "'";
        return false;
    }
    std::string list;
    for (int i = 0;; ++i) {
        double v = start + i * step;
        if (v > stop + 1e-9) break;
        if (!list.empty()) list += ",";
        list += format_double(v);
    }
    if (list.empty()) {
        *error = "empty SNR range '" + text + "'";
        return false;
    }
    *out = list;
    return true;
}

bool read_file(const std::string& path, std::string* out, std::string* error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        *error = "cannot read file: " + path;
        return false;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    *out = buffer.str();
    return true;
}

// Inserts "-label" before the extension: results.csv -> results-ml.csv.
std::string label_path(const std::string& base, const std::string& label) {
    size_t slash = base.find_last_of('/');
    size_t dot = base.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return base + "-" + label;
    }
    return base.substr(0, dot) + "-" + label + base.substr(dot);
}

struct ConfigHandle {
    toepsim_config* ptr = nullptr;
    ~ConfigHandle() { toepsim_config_destroy(ptr); }
};

struct ResultHandle {
    toepsim_result* ptr = nullptr;
    ~ResultHandle() { toepsim_result_destroy(ptr); }
};

struct DesignHandle {
    toepsim_design* ptr = nullptr;
    ~DesignHandle() { toepsim_design_destroy(ptr); }
};

struct BerArgs {
    std::string preset;
    std::string config_path;
    std::string out;
    // Raw flag text keyed by config field; only flags the user passed.
    std::vector<std::pair<std::string, std::string>> overrides;
};

int run_one(toepsim_config* cfg, const std::string& out_path) {
    ResultHandle result;
    toepsim_status status = toepsim_run(cfg, &result.ptr);
    if (status != TOEPSIM_OK) return fail(status);
    if (out_path.empty()) {
        char* csv = nullptr;
        status = toepsim_result_csv(result.ptr, &csv);
        if (status != TOEPSIM_OK) return fail(status);
        std::fputs(csv, stdout);
        toepsim_string_free(csv);
    } else {
        status = toepsim_result_write_csv(result.ptr, out_path.c_str());
        if (status != TOEPSIM_OK) return fail(status);
        std::printf("wrote %s (%d points)\n", out_path.c_str(),
                    toepsim_result_points(result.ptr));
    }
    return 0;
}

int run_ber(const BerArgs& args) {
    if (!args.preset.empty()) {
        int variants = 0;
        toepsim_status status = toepsim_preset_size(args.preset.c_str(), &variants);
        if (status != TOEPSIM_OK) return fail(status);
        const std::string base = args.out.empty() ? args.preset + ".csv" : args.out;
        for (int v = 0; v < variants; ++v) {
            ConfigHandle cfg;
            char* label_raw = nullptr;
            status = toepsim_preset_variant(args.preset.c_str(), v, &cfg.ptr, &label_raw);
            if (status != TOEPSIM_OK) return fail(status);
            std::string label = label_raw;
            toepsim_string_free(label_raw);
            for (const auto& [key, value] : args.overrides) {
                status = toepsim_config_set(cfg.ptr, key.c_str(), value.c_str());
                if (status != TOEPSIM_OK) return fail(status);
            }
            int code = run_one(cfg.ptr, label_path(base, label));
            if (code != 0) return code;
        }
        return 0;
    }

    ConfigHandle cfg;
    if (!args.config_path.empty()) {
        std::string text, error;
        if (!read_file(args.config_path, &text, &error)) return fail_config(error);
        toepsim_status status = toepsim_config_parse(text.c_str(), &cfg.ptr);
        if (status != TOEPSIM_OK) return fail(status);
    } else {
        cfg.ptr = toepsim_config_create();
        if (!cfg.ptr) return fail_config("out of memory");
    }
    for (const auto& [key, value] : args.overrides) {
        toepsim_status status = toepsim_config_set(cfg.ptr, key.c_str(), value.c_str());
        if (status != TOEPSIM_OK) return fail(status);
    }

    std::string out_path = args.out;
    if (out_path.empty()) {
        char* configured = nullptr;
        if (toepsim_config_get(cfg.ptr, "out", &configured) == TOEPSIM_OK) {
            out_path = configured;
            toepsim_string_free(configured);
        }
    }
    return run_one(cfg.ptr, out_path);
}

int run_design(const std::string& sigma, int m, double dt_ratio, double delta_deg,
               const std::string& method, double dmin, double sigma2) {
    DesignHandle design;
    toepsim_status status;
    if (sigma == "broadside") {
        status = toepsim_design_broadside(m, dt_ratio, delta_deg, method.c_str(), dmin, sigma2,
                                          &design.ptr);
    } else {
        std::string text, error;
        if (!read_file(sigma, &text, &error)) return fail_config(error);
        std::istringstream in(text);
        int rows = 0;
        if (!(in >> rows) || rows < 1) {
            return fail_config("covariance file must start with the matrix dimension");
        }
        std::vector<double> entries(2 * static_cast<size_t>(rows) * rows);
        for (double& e : entries) {
            if (!(in >> e)) {
                return fail_config("covariance file needs " + std::to_string(entries.size()) +
                                   " numbers (re im pairs, row major) after the dimension");
            }
        }
        status = toepsim_design_custom(rows, entries.data(), method.c_str(), dmin, sigma2,
                                       &design.ptr);
        m = rows;
    }
    if (status != TOEPSIM_OK) return fail(status);

    const int k = toepsim_design_k(design.ptr);
    double objective = 0.0;
    toepsim_design_objective(design.ptr, &objective);
    std::printf("method = %s\n", method.c_str());
    std::printf("m = %d\n", toepsim_design_antennas(design.ptr));
    std::printf("k = %d\n", k);
    std::printf("objective = %s\n", format_double(objective).c_str());
    for (int r = 0; r < k; ++r) {
        double gamma = 0.0;
        status = toepsim_design_gamma(design.ptr, r, &gamma);
        if (status != TOEPSIM_OK) return fail(status);
        std::printf("gamma_sq[%d] = %s\n", r, format_double(gamma * gamma).c_str());
    }
    for (int r = 0; r < k; ++r) {
        std::string row;
        for (int c = 0; c < toepsim_design_antennas(design.ptr); ++c) {
            double re = 0.0, im = 0.0;
            status = toepsim_design_entry(design.ptr, r, c, &re, &im);
            if (status != TOEPSIM_OK) return fail(status);
            if (!row.empty()) row += " ";
            row += format_double(re) + "," + format_double(im);
        }
        std::printf("b[%d] = %s\n", r, row.c_str());
    }
    return 0;
}

int run_constants(const std::string& family, int l, int k, long long samples,
                  unsigned long long seed) {
    if (family != "toeplitz") {
        return fail_config("unknown family '" + family + "' (available: toeplitz)");
    }
    double c_min = 0.0, c_max = 0.0, c0 = 0.0;
    toepsim_status status = toepsim_toeplitz_constants(l, k, samples, seed, &c_min, &c_max, &c0);
    if (status != TOEPSIM_OK) return fail(status);
    std::printf("family = toeplitz\n");
    std::printf("l = %d\n", l);
    std::printf("k = %d\n", k);
    std::printf("samples = %lld\n", samples);
    std::printf("c_min_hat = %s\n", format_double(c_min).c_str());
    std::printf("c_max_hat = %s\n", format_double(c_max).c_str());
    std::printf("c0_hat = %s\n", format_double(c0).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Banded space-time block code simulator"};
    app.require_subcommand(1);

    // --- ber ---------------------------------------------------------
    BerArgs ber_args;
    std::string snr_text;
    CLI::App* ber = app.add_subcommand("ber", "Monte Carlo error-rate sweep (CSV output)");
    ber->add_option("--preset", ber_args.preset,
                    "named experiment bundle; writes one CSV per labeled variant");
    ber->add_option("--config", ber_args.config_path, "config file (key = value lines)");
    ber->add_option("--out", ber_args.out, "output CSV path (stdout when omitted)");

    // Every sweep field is taken as raw text and handed to the library, so
    // file values and flag values go through identical parsing.
    std::vector<std::pair<std::string, std::string>> flag_fields = {
        {"m", "transmit antennas"},
        {"k", "inner code dimension (0 = rate matched)"},
        {"l", "symbols per block"},
        {"scheme", "qam | pam | psk"},
        {"mu", "constellation size"},
        {"trials", "Monte Carlo trials per SNR point"},
        {"min-errors", "early-stop symbol error target (0 = fixed trials)"},
        {"detector", "zf | mmse | zfdfe | ml | ml-exhaustive"},
        {"beamformer", "identity | waterfill | exact"},
        {"channel", "iid | broadside"},
        {"dt-ratio", "antenna spacing over wavelength (broadside)"},
        {"delta-deg", "angle spread in degrees (broadside)"},
        {"seed", "base random seed"},
        {"threads", "worker threads (0 = hardware)"},
        {"label", "curve label"},
    };
    std::vector<std::string> flag_values(flag_fields.size());
    std::vector<CLI::Option*> flag_options(flag_fields.size());
    for (size_t i = 0; i < flag_fields.size(); ++i) {
        flag_options[i] = ber->add_option("--" + flag_fields[i].first, flag_values[i],
                                          flag_fields[i].second);
    }
    CLI::Option* snr_option =
        ber->add_option("--snr", snr_text, "SNR grid: start:step:stop or comma list (dB)");

    // --- design ------------------------------------------------------
    std::string sigma = "broadside";
    int design_m = 4;
    double dt_ratio = 0.5, delta_deg = 5.0, dmin = 2.0, sigma2 = 0.1;
    std::string method = "exact";
    CLI::App* design = app.add_subcommand("design", "Optimal transmit beamformer");
    design->add_option("--sigma", sigma,
                       "'broadside' or a covariance file (dim, then re im pairs row major)");
    design->add_option("--m", design_m, "antennas (broadside covariance)");
    design->add_option("--dt-ratio", dt_ratio, "antenna spacing over wavelength (broadside)");
    design->add_option("--delta-deg", delta_deg, "angle spread in degrees (broadside)");
    design->add_option("--method", method, "exact | waterfill");
    design->add_option("--dmin", dmin, "constellation minimum distance");
    design->add_option("--sigma2", sigma2, "complex noise variance")->required();

    // --- constants ---------------------------------------------------
    std::string family = "toeplitz";
    int const_l = 2, const_k = 2;
    long long samples = 100000;
    unsigned long long seed = 1;
    CLI::App* constants = app.add_subcommand("constants", "Code-family determinant constants");
    constants->add_option("--family", family, "code family (toeplitz)");
    constants->add_option("--l", const_l, "generator length");
    constants->add_option("--k", const_k, "column count");
    constants->add_option("--samples", samples, "Monte Carlo samples (>= 1000)");
    constants->add_option("--seed", seed, "random seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (ber->parsed()) {
        for (size_t i = 0; i < flag_fields.size(); ++i) {
            if (flag_options[i]->count() == 0) continue;
            std::string key = flag_fields[i].first;
            for (char& c : key) {
                if (c == '-') c = '_';
            }
            ber_args.overrides.emplace_back(key, flag_values[i]);
        }
        if (snr_option->count() > 0) {
            std::string list, error;
            if (!expand_snr(snr_text, &list, &error)) return fail_config(error);
            ber_args.overrides.emplace_back("snr_db", list);
        }
        return run_ber(ber_args);
    }
    if (design->parsed()) {
        return run_design(sigma, design_m, dt_ratio, delta_deg, method, dmin, sigma2);
    }
    return run_constants(family, const_l, const_k, samples, seed);
}
