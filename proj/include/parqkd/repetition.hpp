#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/rational.hpp"
#include "parqkd/rng.hpp"

namespace parqkd {

/// n parallel copies of a base game, won iff at least a t fraction of the
/// copies satisfy the base winning condition.
struct threshold_game_spec {
    int n = 1;
    rational t; // threshold fraction in [0, 1]

    void validate() const {
        if (n < 1) throw domain_error("threshold game: n must be >= 1");
        if (t < rational(0) || t > rational(1))
            throw domain_error("threshold game: t must lie in [0, 1]");
    }
};

/// Per-round win indicators of one n-round play.
struct round_ledger {
    std::vector<std::uint8_t> wins;

    int win_count() const {
        int c = 0;
        for (const auto w : wins) c += w ? 1 : 0;
        return c;
    }
};

struct repetition_constants {
    double exponent_constant = 1.0; // hidden constant of the exponential bound
    double delta = 0.0;             // slack above the single-round value, echoed in reports

    void validate() const {
        if (exponent_constant <= 0.0)
            throw domain_error("repetition constants: exponent constant must be positive");
    }
};

/// Inclusive threshold comparison, done in integers so the boundary is exact.
inline bool threshold_win(const round_ledger& ledger, const threshold_game_spec& spec) {
    spec.validate();
    if (static_cast<int>(ledger.wins.size()) != spec.n)
        throw domain_error("threshold_win: ledger length does not match n");
    const std::int64_t wins = ledger.win_count();
    return static_cast<__int128>(wins) * spec.t.den() >=
           static_cast<__int128>(spec.t.num()) * spec.n;
}

/// Analytic tail bound min(1, exp(-c * delta^9 * n)) on the threshold-game
/// value at t = (single-round value) + delta.
inline double tau_star_bound(std::int64_t n, double delta, const repetition_constants& constants) {
    constants.validate();
    if (n < 0) throw domain_error("tau_star_bound: n must be nonnegative");
    if (delta <= 0.0) throw domain_error("tau_star_bound: delta must be positive");
    const double log_bound = -constants.exponent_constant * std::pow(delta, 9) *
                             static_cast<double>(n);
    return std::min(1.0, std::exp(log_bound));
}

struct threshold_estimate {
    int n = 0;
    rational t;
    std::int64_t trials = 0;
    std::int64_t wins = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t seed = 0;
};

/// 95% Wilson score interval for a binomial proportion.
inline std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials) {
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

/// Monte Carlo estimate of the threshold-game value for a strategy that
/// plays rounds independently. round_win(rng) plays one base-game round.
/// Each trial draws from its own (seed, trial) stream, so the estimate does
/// not depend on execution order.
template <typename RoundFn>
threshold_estimate monte_carlo_threshold(RoundFn&& round_win, const threshold_game_spec& spec,
                                         std::int64_t trials, std::uint64_t master_seed) {
    spec.validate();
    if (trials < 1) throw domain_error("monte_carlo_threshold: trials must be >= 1");
    threshold_estimate est;
    est.n = spec.n;
    est.t = spec.t;
    est.trials = trials;
    est.seed = master_seed;
    for (std::int64_t trial = 0; trial < trials; ++trial) {
        stream_rng rng = derive_rng(master_seed, static_cast<std::uint64_t>(trial), "threshold_trial");
        round_ledger ledger;
        ledger.wins.resize(spec.n);
        for (int i = 0; i < spec.n; ++i) ledger.wins[i] = round_win(rng) ? 1 : 0;
        if (threshold_win(ledger, spec)) ++est.wins;
    }
    est.estimate = static_cast<double>(est.wins) / static_cast<double>(est.trials);
    const auto [lo, hi] = wilson_interval(est.wins, est.trials);
    est.ci_low = lo;
    est.ci_high = hi;
    return est;
}

} // namespace parqkd
