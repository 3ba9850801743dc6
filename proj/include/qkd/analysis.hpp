// Closed-form quantities (binary entropy, asymptotic key rate, the security
// bound), the sampling-tail Monte Carlo, and cross-session aggregation of
// the description-length proxy.

#ifndef QKD_ANALYSIS_HPP
#define QKD_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qkd/protocol.hpp"

namespace qkd {

// h(p) = -p log2 p - (1-p) log2 (1-p), endpoints by continuity; evaluated in
// extended precision
double binary_entropy(double p);

struct KeyRateResult {
    double rate = 0.0;            // 1 - h(2(p+eps)) - h(p+eps)
    bool monotone_regime = true;  // 2(p+eps) <= 1/2
};

KeyRateResult key_rate(double p, double epsilon);

// 2^{-delta n} + 3 e^{-eps^2 n / 4}
double security_bound(int64_t n, double delta, double epsilon);

struct SamplingTailReport {
    int n = 0;
    double p = 0.0;
    double epsilon = 0.0;
    int64_t trials = 0;
    double joint_frequency = 0.0;  // max over the pattern-weight grid
    double hoeffding_bound = 0.0;  // e^{-eps^2 n / 2}
    double max_std_error = 0.0;    // binomial standard error at the max
    int worst_weight = 0;
    std::vector<std::pair<int, double>> grid; // (pattern weight, frequency)
};

// For each adversarial error-pattern weight on the grid, split 2n positions
// uniformly into test/information halves (seeded Fisher-Yates) and record
// how often the information errors exceed n(p+eps) while the test errors
// pass the threshold. OpenMP kernel plus a serial reference with identical
// counts.
SamplingTailReport sampling_tail_mc(int n, double p, double epsilon, int64_t trials,
                                    uint64_t seed);
SamplingTailReport sampling_tail_mc_serial(int n, double p, double epsilon, int64_t trials,
                                           uint64_t seed);

struct SecurityBoundReport {
    int n = 0;
    double delta = 0.0;
    double epsilon = 0.0;
    double bound = 0.0;
    bool vacuous = false; // bound >= 1
    int64_t sessions = 0;
    bool has_empirical = false;
    double empirical_bad_frequency = 0.0;
    int64_t bad_sessions = 0;
    int64_t aborted_sessions = 0;
    int64_t boundary_sessions = 0; // error count exactly at floor(n p)
    int c_model = 0;
    double mean_deficiency = 0.0;  // over non-aborted sessions
    std::string caveat;
};

// Fraction of sessions that finish with proxy deficiency >= delta n + c_model,
// set against the closed-form bound. The description-length proxy stands in
// for program-length complexity; the report says so explicitly. p is the
// session threshold, used only to count boundary hits.
SecurityBoundReport aggregate_sessions(const std::vector<ProtocolTranscript>& transcripts,
                                       const LinearCode& code, const Lz78Model& model,
                                       double delta, double epsilon, double p);

} // namespace qkd

#endif
