#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/protocol.hpp"
#include "parqkd/repetition.hpp"

namespace parqkd {

/// The hidden constants of the analytic bounds. The sources leave all four
/// unspecified; these defaults are documented placeholders and every report
/// echoes the values actually used.
struct bound_constants {
    double conc_constant = 0.5;   // concentration exponent (Hoeffding-style)
    double rep_constant = 1.0;    // parallel-repetition exponent
    double leak_constant = 1.0;   // bits lost per leaked test round
    double honest_constant = 0.1; // honest-acceptance exponent

    void validate() const {
        if (conc_constant <= 0.0 || rep_constant <= 0.0 || leak_constant <= 0.0 ||
            honest_constant <= 0.0)
            throw domain_error("bound constants must be strictly positive");
    }
};

/// min(1, exp(-conc * eps^2 * gamma * n)): the probability that the sampled
/// test looks fine while the total win count is bad.
inline double concentration_bound(double epsilon, double gamma, std::int64_t n,
                                  const bound_constants& constants) {
    constants.validate();
    if (epsilon <= 0.0) throw domain_error("concentration_bound: epsilon must be positive");
    if (gamma <= 0.0 || gamma > 0.5)
        throw domain_error("concentration_bound: gamma must lie in (0, 1/2]");
    if (n < 0) throw domain_error("concentration_bound: n must be nonnegative");
    return std::min(1.0, std::exp(-constants.conc_constant * epsilon * epsilon * gamma *
                                  static_cast<double>(n)));
}

/// 1 - min(1, exp(-honest * eps^2 * gamma * n)): acceptance probability of
/// honest devices whose per-round win probability is 1 - eps/2.
inline double honest_acceptance_bound(double epsilon, double gamma, std::int64_t n,
                                      const bound_constants& constants) {
    constants.validate();
    if (epsilon <= 0.0) throw domain_error("honest_acceptance_bound: epsilon must be positive");
    if (gamma <= 0.0 || gamma > 0.5)
        throw domain_error("honest_acceptance_bound: gamma must lie in (0, 1/2]");
    if (n < 0) throw domain_error("honest_acceptance_bound: n must be nonnegative");
    return 1.0 - std::min(1.0, std::exp(-constants.honest_constant * epsilon * epsilon * gamma *
                                        static_cast<double>(n)));
}

/// Bits of min-entropy certified by a guessing probability.
inline double guessing_to_min_entropy(double p_guess) {
    if (!(p_guess > 0.0) || p_guess > 1.0)
        throw domain_error("guessing_to_min_entropy: p_guess must lie in (0, 1]");
    return -std::log2(p_guess);
}

struct bound_report {
    // inputs, echoed
    std::int64_t n = 0;
    double epsilon = 0.0;
    double gamma = 0.0;
    double p_a = 1.0;
    double c_star = 0.0;
    bound_constants constants;
    // outputs
    double delta = 0.0;
    double tau_star = 0.0;     // exp(log_tau_star); underflows to 0 for large n
    double log_tau_star = 0.0; // -rep_constant * delta^9 * n, kept exact
    double h_min_bound = 0.0;  // bits
    double epsilon_s = 0.0;    // smoothing parameter, clamped to [0, 1]
};

/// Smooth min-entropy lower bound on Alice's raw key, assembled from the
/// repetition bound, the abort probability, and the test-round leakage.
/// Only valid under eps < c_star / 2; outside that the caller is told, not
/// handed a vacuous number.
inline bound_report min_entropy_bound(std::int64_t n, double epsilon, double gamma, double p_a,
                                      double c_star, const bound_constants& constants) {
    constants.validate();
    if (n < 0) throw domain_error("min_entropy_bound: n must be nonnegative");
    if (c_star <= 0.0 || c_star > 1.0)
        throw domain_error("min_entropy_bound: c_star must lie in (0, 1]");
    if (epsilon <= 0.0) throw domain_error("min_entropy_bound: epsilon must be positive");
    if (gamma <= 0.0 || gamma > 0.5)
        throw domain_error("min_entropy_bound: gamma must lie in (0, 1/2]");
    if (p_a <= 0.0 || p_a > 1.0) throw domain_error("min_entropy_bound: p_a must lie in (0, 1]");
    if (epsilon >= c_star / 2.0)
        throw theorem_inapplicable_error(
            "min_entropy_bound requires epsilon < c_star/2 (got epsilon=" +
            std::to_string(epsilon) + ", c_star=" + std::to_string(c_star) + ")");

    bound_report r;
    r.n = n;
    r.epsilon = epsilon;
    r.gamma = gamma;
    r.p_a = p_a;
    r.c_star = c_star;
    r.constants = constants;
    r.delta = c_star - 2.0 * epsilon;
    const double exponent = constants.rep_constant * std::pow(r.delta, 9) * static_cast<double>(n);
    r.log_tau_star = -exponent;
    r.tau_star = std::exp(-exponent);
    const double log2e = 1.4426950408889634;
    r.h_min_bound = exponent * log2e - std::log2(1.0 / p_a) -
                    constants.leak_constant * gamma * static_cast<double>(n);
    r.epsilon_s = std::min(1.0, (1.0 / p_a) * concentration_bound(epsilon, gamma, n, constants));
    return r;
}

/// One row of the analytic-vs-empirical comparison.
struct comparison_row {
    std::string quantity;
    double analytic = 0.0;
    std::string analytic_kind; // "lower bound" / "upper bound"
    double empirical = 0.0;
    std::string empirical_kind; // "estimate"
};

struct theorem_report {
    bound_report bounds;
    double honest_bound = 0.0;
    simulation_aggregate stats;
    std::vector<comparison_row> rows;
    std::vector<std::string> notes;
};

/// Juxtaposes the theorem's bounds with empirical statistics from a batch of
/// protocol runs. `expected_hash` / `actual_hash` tie the two sides to the
/// same configuration.
inline theorem_report make_theorem_report(const protocol_config& config, double p_a,
                                          double c_star, const bound_constants& constants,
                                          const simulation_aggregate& stats,
                                          const std::string& expected_hash,
                                          const std::string& actual_hash) {
    if (expected_hash != actual_hash)
        throw consistency_error("theorem_report: run statistics were produced under a different "
                                "configuration (hash " +
                                actual_hash + " != " + expected_hash + ")");
    theorem_report rep;
    rep.bounds = min_entropy_bound(config.n, config.epsilon.to_double(), config.gamma.to_double(),
                                   p_a, c_star, constants);
    rep.honest_bound = honest_acceptance_bound(config.epsilon.to_double(),
                                               config.gamma.to_double(), config.n, constants);
    rep.stats = stats;

    rep.rows.push_back({"acceptance_probability", rep.honest_bound, "lower bound (honest devices)",
                        stats.acceptance_rate(), "estimate"});
    const double whole = stats.eve_string_rate();
    const double empirical_floor =
        whole > 0.0 ? -std::log2(whole) : std::numeric_limits<double>::infinity();
    rep.rows.push_back({"min_entropy_bits", rep.bounds.h_min_bound, "lower bound (theorem)",
                        empirical_floor, "estimate (whole-string floor)"});
    rep.rows.push_back({"eve_per_bit_success", 0.0, "n/a", stats.eve_bit_rate(), "estimate"});

    if (stats.acceptance_rate() < rep.honest_bound)
        rep.notes.push_back("observed acceptance below the honest-device bound: the device "
                            "violates the honest (eps/2)-noisy premise");
    if (whole >= 1.0 && stats.key_bits > 0)
        rep.notes.push_back("eavesdropper reconstructs the whole key: the device statistics "
                            "carry no certified entropy");
    return rep;
}

} // namespace parqkd
