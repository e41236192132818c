#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "parqkd/games.hpp"
#include "parqkd/quantum.hpp"
#include "parqkd/repetition.hpp"
#include "support/oracles.hpp"

using namespace parqkd;

namespace {

round_ledger ledger_of(int n, int wins) {
    round_ledger l;
    l.wins.assign(n, 0);
    for (int i = 0; i < wins; ++i) l.wins[i] = 1;
    return l;
}

} // namespace

TEST_CASE("threshold comparison is inclusive and exact at the boundary") {
    CHECK(threshold_win(ledger_of(10, 10), {10, rational(1)}));
    CHECK(threshold_win(ledger_of(10, 7), {10, rational(7, 10)}));
    CHECK_FALSE(threshold_win(ledger_of(10, 6), {10, rational(7, 10)}));
    CHECK(threshold_win(ledger_of(10, 0), {10, rational(0)}));
    CHECK_FALSE(threshold_win(ledger_of(10, 0), {10, rational(1, 1000)}));
    CHECK_THROWS_AS(threshold_win(ledger_of(9, 0), {10, rational(1, 2)}), domain_error);
    CHECK_THROWS_AS(threshold_win(ledger_of(10, 0), {10, rational(3, 2)}), domain_error);
}

TEST_CASE("tau star bound") {
    const repetition_constants c{1.0, 0.0};

    SECTION("no rounds, no bound") { CHECK(tau_star_bound(0, 0.1, c) == 1.0); }

    SECTION("doubling n squares the bound") {
        const double b1 = tau_star_bound(1000, 0.1, c);
        const double b2 = tau_star_bound(2000, 0.1, c);
        CHECK(std::log(b2) == Catch::Approx(2.0 * std::log(b1)).margin(1e-12));
    }

    SECTION("log form is exactly -c * delta^9 * n when unclamped") {
        const repetition_constants c2{2.5, 0.0};
        const double delta = 0.3;
        const double b = tau_star_bound(500, delta, c2);
        CHECK(b > 0.0);
        CHECK(b <= 1.0);
        CHECK(std::log(b) ==
              Catch::Approx(-2.5 * std::pow(delta, 9) * 500.0).margin(1e-12));
    }

    SECTION("monotone decreasing in n and delta") {
        CHECK(tau_star_bound(2000, 0.2, c) < tau_star_bound(1000, 0.2, c));
        CHECK(tau_star_bound(1000, 0.3, c) < tau_star_bound(1000, 0.2, c));
    }

    SECTION("domain errors") {
        CHECK_THROWS_AS(tau_star_bound(100, 0.0, c), domain_error);
        CHECK_THROWS_AS(tau_star_bound(100, -0.1, c), domain_error);
        CHECK_THROWS_AS(tau_star_bound(100, 0.1, repetition_constants{0.0, 0.0}), domain_error);
    }
}

TEST_CASE("monte carlo threshold estimation") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();

    SECTION("ideal strategy passes t=1 every trial") {
        const born_sampler sampler(ms, st, noise_model::none());
        const auto play = [&](stream_rng& rng) {
            const int x = static_cast<int>(uniform_below(rng, 3));
            const int y = static_cast<int>(uniform_below(rng, 3));
            const auto [a, b] = sampler.sample(x, y, rng);
            return ms.wins(x, y, a, b);
        };
        const threshold_estimate est = monte_carlo_threshold(play, {50, rational(1)}, 200, 5);
        CHECK(est.estimate == 1.0);
        CHECK(est.wins == 200);
    }

    SECTION("calibrated strategy matches the exact binomial tail") {
        const double q = calibrate_noise(ms, st, 0.95);
        const born_sampler sampler(ms, st, noise_model::depolarizing(q));
        const auto play = [&](stream_rng& rng) {
            const int x = static_cast<int>(uniform_below(rng, 3));
            const int y = static_cast<int>(uniform_below(rng, 3));
            const auto [a, b] = sampler.sample(x, y, rng);
            return ms.wins(x, y, a, b);
        };
        const threshold_game_spec spec{1000, rational(9, 10)};
        const double exact = oracles::binomial_tail(1000, 0.95, 900);

        // rounds are sampled independently, so the binomial tail is the law
        const std::int64_t trials = 500;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const threshold_estimate est = monte_carlo_threshold(play, spec, trials, seed);
            CHECK(std::abs(est.estimate - exact) <=
                  3.0 * oracles::binomial_sigma(exact, trials) + 1e-12);
            CHECK(est.ci_low <= est.estimate);
            CHECK(est.estimate <= est.ci_high);
        }
    }

    SECTION("deterministic under a fixed seed") {
        const auto play = [&](stream_rng& rng) { return (rng() & 3ULL) != 0; };
        const threshold_estimate a = monte_carlo_threshold(play, {20, rational(3, 4)}, 300, 99);
        const threshold_estimate b = monte_carlo_threshold(play, {20, rational(3, 4)}, 300, 99);
        CHECK(a.wins == b.wins);
        CHECK(a.estimate == b.estimate);
    }

    SECTION("preconditions") {
        const auto play = [&](stream_rng&) { return true; };
        CHECK_THROWS_AS(monte_carlo_threshold(play, {10, rational(1)}, 0, 1), domain_error);
        CHECK_THROWS_AS(monte_carlo_threshold(play, {0, rational(1)}, 10, 1), domain_error);
    }
}
