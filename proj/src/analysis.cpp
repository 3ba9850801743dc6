#include "qkd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace qkd {

double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) throw std::domain_error("binary_entropy: p outside [0,1]");
    if (p == 0.0 || p == 1.0) return 0.0;
    const long double q = (long double)p;
    const long double h = -q * std::log2(q) - (1.0L - q) * std::log2(1.0L - q);
    return double(h);
}

KeyRateResult key_rate(double p, double epsilon) {
    if (p < 0.0 || epsilon < 0.0) throw std::domain_error("key_rate: negative parameter");
    if (p + epsilon > 0.5) throw std::domain_error("key_rate: p + epsilon beyond 1/2");
    KeyRateResult r;
    r.rate = 1.0 - binary_entropy(2.0 * (p + epsilon)) - binary_entropy(p + epsilon);
    r.monotone_regime = 2.0 * (p + epsilon) <= 0.5;
    return r;
}

double security_bound(int64_t n, double delta, double epsilon) {
    if (n < 1) throw std::domain_error("security_bound: n must be >= 1");
    if (delta <= 0.0 || epsilon <= 0.0)
        throw std::domain_error("security_bound: delta and epsilon must be positive");
    const long double nn = (long double)n;
    const long double term1 = std::exp2(-(long double)delta * nn);
    const long double term2 =
        3.0L * std::exp(-((long double)epsilon * (long double)epsilon / 4.0L) * nn);
    return double(term1 + term2);
}

namespace {

SamplingTailReport sampling_tail_common(int n, double p, double epsilon, int64_t trials,
                                        uint64_t seed, bool parallel) {
    if (n < 1) throw std::invalid_argument("sampling_tail_mc: n must be >= 1");
    if (trials < 1) throw std::invalid_argument("sampling_tail_mc: trials must be >= 1");

    SamplingTailReport rep;
    rep.n = n;
    rep.p = p;
    rep.epsilon = epsilon;
    rep.trials = trials;
    rep.hoeffding_bound = double(std::exp(-((long double)epsilon * (long double)epsilon / 2.0L) *
                                          (long double)n));

    const int total_positions = 2 * n;
    const int64_t test_threshold = int64_t(std::floor(double(n) * p + 1e-9));
    const int64_t info_threshold = int64_t(std::floor(double(n) * (p + epsilon) + 1e-9));

    // pattern weights: evenly spaced through the feasible window, which ends
    // just past 2n(p+eps) where the joint event dies out
    std::set<int> weights;
    const int w_hi = std::min(total_positions,
                              int(std::ceil(2.0 * double(n) * (p + epsilon))) + 2);
    for (int i = 0; i <= 20; ++i) weights.insert(int(std::llround(double(w_hi) * i / 20.0)));

    for (int w : weights) {
        int64_t hits = 0;
        if (parallel) {
#pragma omp parallel
            {
                std::vector<int> order(size_t(total_positions), 0);
#pragma omp for reduction(+ : hits) schedule(static)
                for (int64_t t = 0; t < trials; ++t) {
                    Rng rng(derive_seed(derive_seed(seed, uint64_t(w)), uint64_t(t)));
                    std::iota(order.begin(), order.end(), 0);
                    int in_test = 0;
                    for (int i = 0; i < n; ++i) {
                        const int j =
                            i + int(rng.next_below(uint64_t(total_positions - i)));
                        std::swap(order[size_t(i)], order[size_t(j)]);
                        if (order[size_t(i)] < w) ++in_test;
                    }
                    const int in_info = w - in_test;
                    if (in_test <= test_threshold && in_info > info_threshold) ++hits;
                }
            }
        } else {
            std::vector<int> order(size_t(total_positions), 0);
            for (int64_t t = 0; t < trials; ++t) {
                Rng rng(derive_seed(derive_seed(seed, uint64_t(w)), uint64_t(t)));
                std::iota(order.begin(), order.end(), 0);
                int in_test = 0;
                for (int i = 0; i < n; ++i) {
                    const int j = i + int(rng.next_below(uint64_t(total_positions - i)));
                    std::swap(order[size_t(i)], order[size_t(j)]);
                    if (order[size_t(i)] < w) ++in_test;
                }
                const int in_info = w - in_test;
                if (in_test <= test_threshold && in_info > info_threshold) ++hits;
            }
        }

        const double freq = double(hits) / double(trials);
        rep.grid.emplace_back(w, freq);
        if (freq >= rep.joint_frequency) {
            rep.joint_frequency = freq;
            rep.worst_weight = w;
            rep.max_std_error = std::sqrt(std::max(freq * (1.0 - freq), 0.0) / double(trials));
        }
    }
    return rep;
}

} // namespace

SamplingTailReport sampling_tail_mc(int n, double p, double epsilon, int64_t trials,
                                    uint64_t seed) {
    return sampling_tail_common(n, p, epsilon, trials, seed, true);
}

SamplingTailReport sampling_tail_mc_serial(int n, double p, double epsilon, int64_t trials,
                                           uint64_t seed) {
    return sampling_tail_common(n, p, epsilon, trials, seed, false);
}

SecurityBoundReport aggregate_sessions(const std::vector<ProtocolTranscript>& transcripts,
                                       const LinearCode& code, const Lz78Model& model,
                                       double delta, double epsilon, double p) {
    if (transcripts.empty()) throw std::invalid_argument("aggregate_sessions: no transcripts");
    const int n = transcripts.front().n;
    for (const auto& t : transcripts)
        if (t.n != n) throw std::invalid_argument("aggregate_sessions: mixed configurations");

    SecurityBoundReport rep;
    rep.n = n;
    rep.delta = delta;
    rep.epsilon = epsilon;
    rep.bound = security_bound(n, delta, epsilon);
    rep.vacuous = rep.bound >= 1.0;
    rep.sessions = int64_t(transcripts.size());
    rep.c_model = Lz78Model::c_model(code.m());
    rep.caveat = kDlProxyCaveat;

    const int64_t threshold_hits = int64_t(std::floor(double(n) * p + 1e-9));

    int64_t bad = 0, aborted = 0, boundary = 0;
    double deficiency_sum = 0.0;
    int64_t finished = 0;
    for (const auto& t : transcripts) {
        if (t.aborted) {
            ++aborted;
            continue;
        }
        ++finished;
        if (int64_t(t.observed_error_count) == threshold_hits) ++boundary;
        const EveGuessProxy proxy = eve_guess_proxy(t, code, model);
        deficiency_sum += proxy.deficiency;
        if (proxy.deficiency >= delta * double(n) + double(rep.c_model)) ++bad;
    }
    rep.bad_sessions = bad;
    rep.aborted_sessions = aborted;
    rep.boundary_sessions = boundary;
    rep.empirical_bad_frequency = double(bad) / double(transcripts.size());
    rep.has_empirical = true;
    rep.mean_deficiency = finished > 0 ? deficiency_sum / double(finished) : 0.0;
    return rep;
}

} // namespace qkd
