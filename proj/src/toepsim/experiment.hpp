#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toepsim/constellation.hpp"

namespace toepsim {

enum class DetectorKind { Zf, Mmse, ZfDfe, Ml, MlExhaustive };

DetectorKind detector_from_token(const std::string& token);
std::string detector_token(DetectorKind kind);

// One Monte Carlo sweep: a code shape, a signalling scheme, a channel model,
// a detector, and an SNR grid. k = 0 selects the rate-matched inner
// dimension (equal to m for the identity beamformer, the design's active
// dimension for optimized beamformers).
struct ExperimentConfig {
    int m = 2;
    int k = 0;
    int l = 4;
    Scheme scheme = Scheme::Qam;
    int mu = 4;
    std::vector<double> snr_db = {10.0};
    long long trials = 10000;
    long long min_errors = 0;  // 0 = fixed trial count, else early-stop target
    std::string detector = "zf";
    std::string beamformer = "identity";
    std::string channel = "iid";  // "iid" or "broadside"
    double dt_ratio = 0.5;        // antenna spacing over wavelength
    double delta_deg = 5.0;       // angle spread in degrees
    std::uint64_t seed = 1;
    std::string out;
    int threads = 0;            // 0 = hardware concurrency
    double force_sigma2 = -1.0;  // >= 0 pins the noise variance at every point
    std::string label;

    bool operator==(const ExperimentConfig&) const = default;
};

// Throws ConfigError naming the offending field.
void validate_config(const ExperimentConfig& cfg);

// Parses `key = value` lines with '#' comments; unknown keys are errors that
// name the key. parse_config(serialize_config(cfg)) == cfg.
ExperimentConfig parse_config(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

// Single-field access with the same keys and value syntax as the config
// file; unknown keys throw ConfigError naming the key.
void set_config_field(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string get_config_field(const ExperimentConfig& cfg, const std::string& key);

// Every recognized configuration key, in serialization order.
std::vector<std::string> config_keys();

struct LabeledConfig {
    std::string label;
    ExperimentConfig config;
};

// Named experiment bundles mirroring the published scenarios; one config per
// curve. Unknown names raise an error listing every preset.
std::vector<LabeledConfig> preset(const std::string& name);
std::vector<std::string> preset_names();

struct CurveRecord {
    double snr_db = 0.0;
    long long trials = 0;
    long long bit_errors = 0;
    long long symbol_errors = 0;
    double ber = 0.0;
    double ser = 0.0;
    long long redrawn = 0;   // singular-channel redraws
    double block_snr = 0.0;  // reported alongside, not a CSV column
    int active_k = 0;        // inner dimension used at this point
};

// Runs the sweep. Deterministic for a fixed (config, seed) pair regardless
// of the thread count.
std::vector<CurveRecord> run_experiment(const ExperimentConfig& cfg);

// CSV with the fixed header snr_db,trials,bit_errors,symbol_errors,ber,ser,
// redrawn; floats carry 17 significant digits.
std::string csv_string(const std::vector<CurveRecord>& records);
void emit_csv(const std::vector<CurveRecord>& records, const std::string& path);

}  // namespace toepsim
