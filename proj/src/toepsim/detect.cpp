#include "toepsim/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "toepsim/errors.hpp"

namespace toepsim {

namespace {

constexpr std::int64_t kMaxSequences = std::int64_t{1} << 20;
constexpr std::int64_t kMaxStates = std::int64_t{1} << 16;

Detection slice_all(const Constellation& c, cvec raw) {
    Detection d;
    d.indices.reserve(raw.size());
    d.symbols.reserve(raw.size());
    for (const cplx& z : raw) {
        int idx = slice_index(c, z);
        d.indices.push_back(idx);
        d.symbols.push_back(c.points[idx]);
    }
    d.raw = std::move(raw);
    return d;
}

// mu^exponent capped at `limit`; returns -1 on overflow past the cap.
std::int64_t checked_power(int mu, int exponent, std::int64_t limit) {
    std::int64_t total = 1;
    for (int i = 0; i < exponent; ++i) {
        total *= mu;
        if (total > limit) return -1;
    }
    return total;
}

}  // namespace

DetectionProblem::DetectionProblem(ComplexMatrix channel_, cvec received_, double noise_var_,
                                   const Constellation* constellation_)
    : channel(std::move(channel_)),
      received(std::move(received_)),
      noise_var(noise_var_),
      constellation(constellation_) {
    if (constellation == nullptr) throw ArgumentError("detection requires a constellation");
    if (channel.rows() < channel.cols() || channel.cols() < 1) {
        throw ArgumentError("channel matrix must be tall (rows >= cols >= 1)");
    }
    if (static_cast<int>(received.size()) != channel.rows()) {
        throw ArgumentError("received vector length must match channel rows");
    }
    if (!(noise_var >= 0.0) || !std::isfinite(noise_var)) {
        throw ArgumentError("noise variance must be finite and non-negative");
    }
}

Detection zf_detect(const DetectionProblem& p) {
    QrFactor qr(p.channel);
    return slice_all(*p.constellation, qr.solve(p.received));
}

Detection mmse_detect(const DetectionProblem& p) {
    const int n = p.channel.rows();
    const int l = p.channel.cols();
    const double shrink = std::sqrt(p.noise_var / p.constellation->energy);
    ComplexMatrix augmented(n + l, l);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < l; ++j) augmented(i, j) = p.channel(i, j);
    }
    for (int j = 0; j < l; ++j) augmented(n + j, j) = shrink;
    cvec padded(p.received);
    padded.resize(n + l, cplx(0.0, 0.0));
    QrFactor qr(augmented);
    return slice_all(*p.constellation, qr.solve(padded));
}

Detection zf_dfe_detect(const DetectionProblem& p) {
    const Constellation& c = *p.constellation;
    const int l = p.channel.cols();
    QrFactor qr(p.channel);
    const double guard = 1e-10 * std::max(1.0, qr.max_diag());
    if (qr.min_diag() <= guard) {
        throw SingularChannelError("channel is numerically rank deficient");
    }
    cvec w = qr.apply_qh(p.received);
    Detection d;
    d.indices.assign(l, 0);
    d.symbols.assign(l, cplx(0.0, 0.0));
    d.raw.assign(l, cplx(0.0, 0.0));
    for (int i = l - 1; i >= 0; --i) {
        cplx acc = w[i];
        for (int j = i + 1; j < l; ++j) acc -= qr.r(i, j) * d.symbols[j];
        cplx z = acc / qr.r(i, i);
        int idx = slice_index(c, z);
        d.raw[i] = z;
        d.indices[i] = idx;
        d.symbols[i] = c.points[idx];
    }
    return d;
}

Detection ml_detect_exhaustive(const DetectionProblem& p) {
    const Constellation& c = *p.constellation;
    const int n = p.channel.rows();
    const int l = p.channel.cols();
    const int mu = c.mu;
    if (checked_power(mu, l, kMaxSequences) < 0) {
        throw CapacityError("exhaustive search space exceeds 2^20 sequences");
    }
    std::vector<int> current(l, 0);
    std::vector<int> best(l, 0);
    double best_metric = std::numeric_limits<double>::infinity();
    cvec predicted(n);
    // Lexicographic odometer over index tuples; strict improvement keeps the
    // first (smallest) tuple among exact metric ties.
    while (true) {
        double metric = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx acc(0.0, 0.0);
            for (int j = 0; j < l; ++j) acc += p.channel(i, j) * c.points[current[j]];
            metric += std::norm(p.received[i] - acc);
        }
        if (metric < best_metric) {
            best_metric = metric;
            best = current;
        }
        int pos = l - 1;
        while (pos >= 0 && current[pos] == mu - 1) {
            current[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++current[pos];
    }
    Detection d;
    d.indices = best;
    d.symbols.reserve(l);
    for (int idx : best) d.symbols.push_back(c.points[idx]);
    return d;
}

namespace {

// Reconstructs the symbol-index sequence for stages [0, stage] ending at
// `state` after consuming `input` at `stage`.
std::vector<int> backtrack_path(const std::vector<std::vector<int>>& prev_state,
                                const std::vector<std::vector<int>>& prev_input, int stage,
                                int state, int input) {
    std::vector<int> path(static_cast<size_t>(stage) + 1);
    path[stage] = input;
    int s = state;
    for (int t = stage - 1; t >= 0; --t) {
        path[t] = prev_input[t][s];
        s = prev_state[t][s];
    }
    return path;
}

}  // namespace

Detection ml_detect_viterbi(const DetectionProblem& p, int num_taps) {
    const Constellation& c = *p.constellation;
    const int n = p.channel.rows();
    const int l = p.channel.cols();
    const int mu = c.mu;
    if (num_taps < 1) throw ArgumentError("number of channel taps must be positive");
    if (n != l + num_taps - 1) {
        throw ArgumentError("channel rows must equal cols + taps - 1 for the trellis");
    }
    const std::int64_t state_count = checked_power(mu, num_taps - 1, kMaxStates);
    if (state_count < 0) throw CapacityError("trellis exceeds 2^16 states");
    const int states = static_cast<int>(state_count);

    cvec taps(num_taps);
    for (int d = 0; d < num_taps; ++d) taps[d] = p.channel(d, 0);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> metric(states, inf);
    std::vector<double> next_metric(states);
    metric[0] = 0.0;
    // prev_state/prev_input[t][s]: survivor into state s after decision t.
    std::vector<std::vector<int>> prev_state(l, std::vector<int>(states, -1));
    std::vector<std::vector<int>> prev_input(l, std::vector<int>(states, -1));

    for (int stage = 0; stage < l; ++stage) {
        std::fill(next_metric.begin(), next_metric.end(), inf);
        for (int state = 0; state < states; ++state) {
            if (metric[state] == inf) continue;
            // Channel memory contribution shared by every branch from here;
            // symbols before time zero contribute exactly nothing.
            cplx history(0.0, 0.0);
            int digits = state;
            for (int d = 1; d < num_taps; ++d) {
                int sym_idx = digits % mu;
                digits /= mu;
                if (stage - d >= 0) history += taps[d] * c.points[sym_idx];
            }
            for (int input = 0; input < mu; ++input) {
                cplx predicted = taps[0] * c.points[input] + history;
                double cand = metric[state] + std::norm(p.received[stage] - predicted);
                int next_state = states == 1 ? 0 : (state % (states / mu)) * mu + input;
                // Exact metric ties fall back to a lexicographic comparison
                // of the full candidate paths so results match the
                // exhaustive search.
                if (cand < next_metric[next_state]) {
                    next_metric[next_state] = cand;
                    prev_state[stage][next_state] = state;
                    prev_input[stage][next_state] = input;
                } else if (cand == next_metric[next_state]) {
                    std::vector<int> incumbent =
                        backtrack_path(prev_state, prev_input, stage, prev_state[stage][next_state],
                                       prev_input[stage][next_state]);
                    std::vector<int> challenger =
                        backtrack_path(prev_state, prev_input, stage, state, input);
                    if (challenger < incumbent) {
                        prev_state[stage][next_state] = state;
                        prev_input[stage][next_state] = input;
                    }
                }
            }
        }
        metric.swap(next_metric);
    }

    // Termination tail: outputs past the last symbol depend only on the final
    // state (digit d of which is the symbol at time l - d); accumulate their
    // cost in increasing time order.
    for (int stage = l; stage < n; ++stage) {
        for (int state = 0; state < states; ++state) {
            if (metric[state] == inf) continue;
            cplx predicted(0.0, 0.0);
            int digits = state;
            for (int d = 1; d < num_taps; ++d) {
                int sym_idx = digits % mu;
                digits /= mu;
                int sym_time = l - d;
                int tap = stage - sym_time;
                if (sym_time >= 0 && tap < num_taps) {
                    predicted += taps[tap] * c.points[sym_idx];
                }
            }
            metric[state] += std::norm(p.received[stage] - predicted);
        }
    }

    int best_state = -1;
    double best_metric = inf;
    for (int state = 0; state < states; ++state) {
        if (metric[state] < best_metric) {
            best_metric = metric[state];
            best_state = state;
        } else if (metric[state] == best_metric && best_state >= 0 && l > 0) {
            std::vector<int> incumbent =
                backtrack_path(prev_state, prev_input, l - 1, prev_state[l - 1][best_state],
                               prev_input[l - 1][best_state]);
            std::vector<int> challenger =
                backtrack_path(prev_state, prev_input, l - 1, prev_state[l - 1][state],
                               prev_input[l - 1][state]);
            if (challenger < incumbent) best_state = state;
        }
    }
    if (best_state < 0 || !std::isfinite(best_metric)) {
        throw NumericError("trellis search produced no finite-metric path");
    }

    std::vector<int> best = backtrack_path(prev_state, prev_input, l - 1,
                                           prev_state[l - 1][best_state],
                                           prev_input[l - 1][best_state]);
    Detection d;
    d.indices = std::move(best);
    d.symbols.reserve(l);
    for (int idx : d.indices) d.symbols.push_back(c.points[idx]);
    return d;
}

std::vector<double> zf_noise_gains(const DetectionProblem& p) {
    QrFactor qr(p.channel);
    return qr.gram_inverse_diagonal();
}

}  // namespace toepsim
