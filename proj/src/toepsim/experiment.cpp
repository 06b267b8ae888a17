#include "toepsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "toepsim/channel.hpp"
#include "toepsim/design.hpp"
#include "toepsim/detect.hpp"
#include "toepsim/errors.hpp"
#include "toepsim/matrix.hpp"
#include "toepsim/rng.hpp"
#include "toepsim/toeplitz.hpp"

namespace toepsim {

namespace {

constexpr long long kChunkTrials = 256;
constexpr long long kWaveChunks = 16;  // early-stop granularity, thread-invariant
constexpr int kMaxRedrawsPerTrial = 256;

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "cannot parse '" + value + "' as a number");
    }
}

long long parse_integer(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "cannot parse '" + value + "' as an integer");
    }
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size() || value[0] == '-') throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key, "cannot parse '" + value + "' as an unsigned integer");
    }
}

std::string trim(const std::string& s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

struct TrialCounts {
    long long bit_errors = 0;
    long long symbol_errors = 0;
    long long redrawn = 0;
};

// Everything fixed for one SNR point of the sweep.
struct PointSetup {
    const ExperimentConfig* cfg;
    const Constellation* constellation;
    ChannelModel model;
    ToeplitzCode code;
    DetectorKind detector;
    double sigma2;
    int point_index;
};

TrialCounts run_chunk(const PointSetup& setup, long long chunk_index, long long chunk_trials) {
    TrialCounts counts;
    Rng rng(derive_seed(setup.cfg->seed, static_cast<std::uint64_t>(setup.point_index),
                        static_cast<std::uint64_t>(chunk_index)));
    const Constellation& c = *setup.constellation;
    const int l = setup.cfg->l;
    const int mu = c.mu;
    std::vector<int> sent(l);
    cvec symbols(l);
    const double noise_scale = std::sqrt(setup.sigma2);

    for (long long trial = 0; trial < chunk_trials; ++trial) {
        for (int attempt = 0;; ++attempt) {
            cvec h = draw_channel(setup.model, rng);
            cvec taps = equivalent_taps(setup.code, h);
            ComplexMatrix hc = toeplitz_matrix(taps, l);
            for (int i = 0; i < l; ++i) {
                sent[i] = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(mu));
                symbols[i] = c.points[sent[i]];
            }
            cvec y = matvec(hc, symbols);
            if (setup.sigma2 > 0.0) {
                for (cplx& v : y) v += noise_scale * rng.standard_complex_gaussian();
            }
            DetectionProblem problem(std::move(hc), std::move(y), setup.sigma2, &c);
            try {
                Detection detection = [&] {
                    switch (setup.detector) {
                        case DetectorKind::Zf: return zf_detect(problem);
                        case DetectorKind::Mmse: return mmse_detect(problem);
                        case DetectorKind::ZfDfe: return zf_dfe_detect(problem);
                        case DetectorKind::Ml: return ml_detect_viterbi(problem, setup.code.k);
                        case DetectorKind::MlExhaustive: return ml_detect_exhaustive(problem);
                    }
                    throw ArgumentError("unknown detector");
                }();
                for (int i = 0; i < l; ++i) {
                    if (detection.indices[i] != sent[i]) {
                        ++counts.symbol_errors;
                        counts.bit_errors += bit_errors_between(c, sent[i], detection.indices[i]);
                    }
                }
                break;
            } catch (const SingularChannelError&) {
                ++counts.redrawn;
                if (attempt >= kMaxRedrawsPerTrial) {
                    throw NumericError(
                        "channel repeatedly singular; the scenario cannot be simulated");
                }
            }
        }
    }
    return counts;
}

// Runs chunks [first, first + count) across the worker pool, storing results
// by chunk index so the reduction order never depends on scheduling.
void run_wave(const PointSetup& setup, long long first, long long count, long long total_trials,
              int threads, std::vector<TrialCounts>& results) {
    std::atomic<long long> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            long long offset = next.fetch_add(1);
            if (offset >= count) return;
            long long chunk = first + offset;
            long long begin = chunk * kChunkTrials;
            long long chunk_trials = std::min(kChunkTrials, total_trials - begin);
            try {
                results[chunk] = run_chunk(setup, chunk, chunk_trials);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
}

}  // namespace

DetectorKind detector_from_token(const std::string& token) {
    if (token == "zf") return DetectorKind::Zf;
    if (token == "mmse") return DetectorKind::Mmse;
    if (token == "zfdfe") return DetectorKind::ZfDfe;
    if (token == "ml") return DetectorKind::Ml;
    if (token == "ml-exhaustive") return DetectorKind::MlExhaustive;
    throw ArgumentError("unknown detector: " + token +
                        " (expected zf, mmse, zfdfe, ml, or ml-exhaustive)");
}

std::string detector_token(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::Zf: return "zf";
        case DetectorKind::Mmse: return "mmse";
        case DetectorKind::ZfDfe: return "zfdfe";
        case DetectorKind::Ml: return "ml";
        case DetectorKind::MlExhaustive: return "ml-exhaustive";
    }
    throw ArgumentError("unknown detector");
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.m < 1) throw ConfigError("m", "antenna count must be at least 1");
    if (cfg.k < 0 || cfg.k > cfg.m) {
        throw ConfigError("k", "inner dimension must lie in [0, m] (0 = rate matched)");
    }
    if (cfg.l < 1) throw ConfigError("l", "block length must be at least 1");
    try {
        make_constellation(cfg.scheme, cfg.mu);
    } catch (const ArgumentError& e) {
        throw ConfigError("mu", e.what());
    }
    if (cfg.snr_db.empty()) throw ConfigError("snr_db", "need at least one SNR point");
    for (size_t i = 0; i + 1 < cfg.snr_db.size(); ++i) {
        if (!(cfg.snr_db[i] < cfg.snr_db[i + 1])) {
            throw ConfigError("snr_db", "SNR grid must be strictly increasing");
        }
    }
    if (cfg.trials < 1) throw ConfigError("trials", "need at least one trial per point");
    if (cfg.min_errors < 0) throw ConfigError("min_errors", "cannot be negative");
    try {
        detector_from_token(cfg.detector);
    } catch (const ArgumentError& e) {
        throw ConfigError("detector", e.what());
    }
    try {
        beamformer_from_token(cfg.beamformer);
    } catch (const ArgumentError& e) {
        throw ConfigError("beamformer", e.what());
    }
    if (cfg.channel != "iid" && cfg.channel != "broadside") {
        throw ConfigError("channel", "expected iid or broadside, got " + cfg.channel);
    }
    if (cfg.channel == "broadside") {
        if (!(cfg.dt_ratio > 0.0)) throw ConfigError("dt_ratio", "spacing ratio must be positive");
        if (!(cfg.delta_deg > 0.0)) throw ConfigError("delta_deg", "angle spread must be positive");
    }
    if (cfg.threads < 0) throw ConfigError("threads", "thread count cannot be negative");
    if (cfg.force_sigma2 != -1.0 && !(cfg.force_sigma2 >= 0.0)) {
        throw ConfigError("force_sigma2", "noise override must be -1 (off) or >= 0");
    }
    if (cfg.force_sigma2 == 0.0 && cfg.beamformer != "identity") {
        throw ConfigError("force_sigma2", "optimized beamformers need positive noise");
    }
}

void set_config_field(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "m") {
        cfg.m = static_cast<int>(parse_integer(key, value));
    } else if (key == "k") {
        cfg.k = static_cast<int>(parse_integer(key, value));
    } else if (key == "l") {
        cfg.l = static_cast<int>(parse_integer(key, value));
    } else if (key == "scheme") {
        try {
            cfg.scheme = scheme_from_token(value);
        } catch (const ArgumentError& e) {
            throw ConfigError(key, e.what());
        }
    } else if (key == "mu") {
        cfg.mu = static_cast<int>(parse_integer(key, value));
    } else if (key == "snr_db") {
        cfg.snr_db.clear();
        std::istringstream items(value);
        std::string item;
        while (std::getline(items, item, ',')) {
            cfg.snr_db.push_back(parse_double(key, trim(item)));
        }
        if (cfg.snr_db.empty()) throw ConfigError(key, "empty SNR list");
    } else if (key == "trials") {
        cfg.trials = parse_integer(key, value);
    } else if (key == "min_errors") {
        cfg.min_errors = parse_integer(key, value);
    } else if (key == "detector") {
        cfg.detector = value;
    } else if (key == "beamformer") {
        cfg.beamformer = value;
    } else if (key == "channel") {
        cfg.channel = value;
    } else if (key == "dt_ratio") {
        cfg.dt_ratio = parse_double(key, value);
    } else if (key == "delta_deg") {
        cfg.delta_deg = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = parse_unsigned(key, value);
    } else if (key == "out") {
        cfg.out = value;
    } else if (key == "threads") {
        cfg.threads = static_cast<int>(parse_integer(key, value));
    } else if (key == "force_sigma2") {
        cfg.force_sigma2 = parse_double(key, value);
    } else if (key == "label") {
        cfg.label = value;
    } else {
        throw ConfigError(key, "unknown configuration key: " + key);
    }
}

std::string get_config_field(const ExperimentConfig& cfg, const std::string& key) {
    if (key == "m") return std::to_string(cfg.m);
    if (key == "k") return std::to_string(cfg.k);
    if (key == "l") return std::to_string(cfg.l);
    if (key == "scheme") return scheme_token(cfg.scheme);
    if (key == "mu") return std::to_string(cfg.mu);
    if (key == "snr_db") {
        std::string out;
        for (size_t i = 0; i < cfg.snr_db.size(); ++i) {
            if (i) out += ",";
            out += format_double(cfg.snr_db[i]);
        }
        return out;
    }
    if (key == "trials") return std::to_string(cfg.trials);
    if (key == "min_errors") return std::to_string(cfg.min_errors);
    if (key == "detector") return cfg.detector;
    if (key == "beamformer") return cfg.beamformer;
    if (key == "channel") return cfg.channel;
    if (key == "dt_ratio") return format_double(cfg.dt_ratio);
    if (key == "delta_deg") return format_double(cfg.delta_deg);
    if (key == "seed") return std::to_string(cfg.seed);
    if (key == "out") return cfg.out;
    if (key == "threads") return std::to_string(cfg.threads);
    if (key == "force_sigma2") return format_double(cfg.force_sigma2);
    if (key == "label") return cfg.label;
    throw ConfigError(key, "unknown configuration key: " + key);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
        std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config", "expected 'key = value', got: " + stripped);
        }
        set_config_field(cfg, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return cfg;
}

std::vector<std::string> config_keys() {
    return {"m",        "k",          "l",       "scheme",  "mu",      "snr_db",
            "trials",   "min_errors", "detector", "beamformer", "channel", "dt_ratio",
            "delta_deg", "seed",      "out",     "threads", "force_sigma2", "label"};
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    for (const std::string& key : config_keys()) {
        out << key << " = " << get_config_field(cfg, key) << "\n";
    }
    return out.str();
}

std::vector<std::string> preset_names() {
    return {"example1-constellations", "example1-lengths", "example1-antennas",
            "example2-correlated"};
}

std::vector<LabeledConfig> preset(const std::string& name) {
    std::vector<LabeledConfig> out;
    auto snr_range = [](double start, double step, double stop) {
        std::vector<double> grid;
        for (double v = start; v <= stop + 1e-9; v += step) grid.push_back(v);
        return grid;
    };
    if (name == "example1-constellations") {
        for (int mu : {4, 16, 64}) {
            ExperimentConfig cfg;
            cfg.m = 4;
            cfg.k = 0;
            cfg.l = 8;
            cfg.scheme = Scheme::Qam;
            cfg.mu = mu;
            cfg.snr_db = snr_range(6.0, 2.0, 30.0);
            cfg.trials = 200000;
            cfg.min_errors = 400;
            cfg.detector = "zf";
            cfg.beamformer = "identity";
            cfg.channel = "iid";
            cfg.seed = 20240601;
            cfg.label = "mu" + std::to_string(mu);
            out.push_back({cfg.label, cfg});
        }
    } else if (name == "example1-lengths") {
        for (int l : {4, 8, 16, 32}) {
            ExperimentConfig cfg;
            cfg.m = 4;
            cfg.k = 0;
            cfg.l = l;
            cfg.scheme = Scheme::Qam;
            cfg.mu = 16;
            cfg.snr_db = snr_range(10.0, 2.0, 30.0);
            cfg.trials = 200000;
            cfg.min_errors = 400;
            cfg.detector = "zf";
            cfg.beamformer = "identity";
            cfg.channel = "iid";
            cfg.seed = 20240602;
            cfg.label = "l" + std::to_string(l);
            out.push_back({cfg.label, cfg});
        }
    } else if (name == "example1-antennas") {
        for (int m : {2, 4, 8}) {
            ExperimentConfig cfg;
            cfg.m = m;
            cfg.k = 0;
            cfg.l = 8;
            cfg.scheme = Scheme::Qam;
            cfg.mu = 16;
            cfg.snr_db = snr_range(10.0, 2.0, 30.0);
            cfg.trials = 200000;
            cfg.min_errors = 400;
            cfg.detector = "zf";
            cfg.beamformer = "identity";
            cfg.channel = "iid";
            cfg.seed = 20240603;
            cfg.label = "m" + std::to_string(m);
            out.push_back({cfg.label, cfg});
        }
    } else if (name == "example2-correlated") {
        for (const std::string& detector : {std::string("zf"), std::string("ml")}) {
            for (const std::string& beamformer :
                 {std::string("identity"), std::string("waterfill"), std::string("exact")}) {
                ExperimentConfig cfg;
                cfg.m = 4;
                // The identity case is rate-matched to the optimized designs
                // at the SNRs where they activate two modes.
                cfg.k = beamformer == "identity" ? 2 : 0;
                cfg.l = 10;
                cfg.scheme = Scheme::Qam;
                cfg.mu = 4;
                cfg.snr_db = snr_range(0.0, 2.0, 20.0);
                cfg.trials = 100000;
                cfg.min_errors = 400;
                cfg.detector = detector;
                cfg.beamformer = beamformer;
                cfg.channel = "broadside";
                cfg.dt_ratio = 0.5;
                cfg.delta_deg = 5.0;
                cfg.seed = 20240604;
                cfg.label = detector + "-" + beamformer;
                out.push_back({cfg.label, cfg});
            }
        }
    } else {
        std::string names;
        for (const std::string& n : preset_names()) {
            if (!names.empty()) names += ", ";
            names += n;
        }
        throw ConfigError("preset", "unknown preset '" + name + "' (available: " + names + ")");
    }
    return out;
}

std::vector<CurveRecord> run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Constellation constellation = make_constellation(cfg.scheme, cfg.mu);
    const double symbol_energy = constellation.energy;
    const BeamformerMethod method = beamformer_from_token(cfg.beamformer);

    ChannelModel model = ChannelModel::iid(cfg.m);
    ComplexMatrix sigma = ComplexMatrix::identity(cfg.m);
    if (cfg.channel == "broadside") {
        sigma = correlation_broadside(cfg.m, cfg.dt_ratio,
                                      cfg.delta_deg * std::numbers::pi / 180.0);
        model = ChannelModel::correlated(sigma);
    }

    int threads = cfg.threads;
    if (threads == 0) {
        threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    std::vector<CurveRecord> records;
    records.reserve(cfg.snr_db.size());
    for (size_t point = 0; point < cfg.snr_db.size(); ++point) {
        const double snr_db = cfg.snr_db[point];
        const double sigma2 = cfg.force_sigma2 >= 0.0
                                  ? cfg.force_sigma2
                                  : symbol_energy * std::pow(10.0, -snr_db / 10.0);

        ComplexMatrix b;
        if (method == BeamformerMethod::Identity) {
            int k = cfg.k == 0 ? cfg.m : cfg.k;
            b = identity_beamformer(cfg.m, k).b;
        } else {
            BeamformerDesign design = method == BeamformerMethod::Waterfill
                                          ? optimize_waterfill(sigma, constellation.d_min, sigma2)
                                          : optimize_exact(sigma, constellation.d_min, sigma2);
            if (cfg.k != 0 && design.k != cfg.k) {
                throw ConfigError("k",
                                  "configured inner dimension conflicts with the optimized "
                                  "design; use k = 0 for optimized beamformers");
            }
            b = design.b;
        }

        PointSetup setup{&cfg,
                         &constellation,
                         model,
                         ToeplitzCode(cfg.m, b.rows(), cfg.l, b),
                         detector_from_token(cfg.detector),
                         sigma2,
                         static_cast<int>(point)};

        const long long total_chunks = (cfg.trials + kChunkTrials - 1) / kChunkTrials;
        std::vector<TrialCounts> results(total_chunks);
        long long chunks_done = 0;
        TrialCounts totals;
        while (chunks_done < total_chunks) {
            long long wave = cfg.min_errors > 0
                                 ? std::min(kWaveChunks, total_chunks - chunks_done)
                                 : total_chunks;
            run_wave(setup, chunks_done, wave, cfg.trials, threads, results);
            for (long long i = chunks_done; i < chunks_done + wave; ++i) {
                totals.bit_errors += results[i].bit_errors;
                totals.symbol_errors += results[i].symbol_errors;
                totals.redrawn += results[i].redrawn;
            }
            chunks_done += wave;
            if (cfg.min_errors > 0 && totals.symbol_errors >= cfg.min_errors) break;
        }
        const long long executed = std::min(cfg.trials, chunks_done * kChunkTrials);

        CurveRecord record;
        record.snr_db = snr_db;
        record.trials = executed;
        record.bit_errors = totals.bit_errors;
        record.symbol_errors = totals.symbol_errors;
        record.redrawn = totals.redrawn;
        const double symbols = static_cast<double>(executed) * cfg.l;
        record.ser = totals.symbol_errors / symbols;
        record.ber = totals.bit_errors / (symbols * constellation.bits_per_symbol);
        record.active_k = setup.code.k;
        record.block_snr = sigma2 > 0.0
                               ? block_snr(cfg.scheme, cfg.mu, cfg.m, cfg.l, setup.code.n, sigma2)
                                     .block_snr
                               : std::numeric_limits<double>::infinity();
        records.push_back(record);
    }
    return records;
}

std::string csv_string(const std::vector<CurveRecord>& records) {
    std::ostringstream out;
    out << "snr_db,trials,bit_errors,symbol_errors,ber,ser,redrawn\n";
    for (const CurveRecord& r : records) {
        out << format_double(r.snr_db) << "," << r.trials << "," << r.bit_errors << ","
            << r.symbol_errors << "," << format_double(r.ber) << "," << format_double(r.ser)
            << "," << r.redrawn << "\n";
    }
    return out.str();
}

void emit_csv(const std::vector<CurveRecord>& records, const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open for writing: " + path);
    file << csv_string(records);
    file.flush();
    if (!file) throw IoError("write failed: " + path);
}

}  // namespace toepsim
