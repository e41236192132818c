#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "parqkd/games.hpp"
#include "parqkd/guessing.hpp"
#include "parqkd/quantum.hpp"
#include "support/oracles.hpp"

using namespace parqkd;

namespace {

guessing_game ms_guessing(const rational& eta) {
    auto [ms, maps] = magic_square();
    return build_guessing_game(std::move(ms), std::move(maps), eta,
                               eve_condition::guess_common_bit);
}

// Monte Carlo replay of a fixed deterministic triple, as an independent check
// on the exact value.
double replay_triple(const guessing_game& g, const deterministic_strategy_pair& ab,
                     const classical_eve_strategy& eve, int samples, std::uint64_t seed) {
    stream_rng rng = derive_rng(seed, 0, "replay");
    std::vector<double> cdf_x, cdf_y;
    double acc = 0.0;
    for (const auto& p : g.base.alice_input_dist) cdf_x.push_back(acc += p.to_double());
    acc = 0.0;
    for (const auto& p : g.base.bob_input_dist) cdf_y.push_back(acc += p.to_double());
    int wins = 0;
    for (int s = 0; s < samples; ++s) {
        const int x = static_cast<int>(sample_index(rng, cdf_x));
        const int y = static_cast<int>(sample_index(rng, cdf_y));
        const bool anchored = bernoulli(rng, g.eta.to_double());
        const eve_input ein = anchored ? eve_input::anchor() : eve_input::pair(x, y);
        const int e = anchored ? eve.on_anchor : eve.guess(g, x, y);
        if (guessing_predicate(g, x, y, ein, ab.alice_map[x], ab.bob_map[y], e)) ++wins;
    }
    return static_cast<double>(wins) / samples;
}

} // namespace

TEST_CASE("guessing game construction validates eta") {
    auto [ms, maps] = magic_square();
    CHECK_NOTHROW(build_guessing_game(ms, maps, rational(1, 8), eve_condition::guess_common_bit));
    CHECK_NOTHROW(build_guessing_game(ms, maps, rational(1), eve_condition::guess_common_bit));
    CHECK_THROWS_AS(build_guessing_game(ms, maps, rational(0), eve_condition::guess_common_bit),
                    domain_error);
    CHECK_THROWS_AS(build_guessing_game(ms, maps, rational(9, 8), eve_condition::guess_common_bit),
                    domain_error);

    // a broken common-bit table is rejected under the bit condition
    common_bit_maps broken = maps;
    broken.f[0] ^= 1;
    CHECK_THROWS_AS(build_guessing_game(ms, broken, rational(1, 8), eve_condition::guess_common_bit),
                    domain_error);
    CHECK_NOTHROW(build_guessing_game(ms, broken, rational(1, 8), eve_condition::guess_full_output));
}

TEST_CASE("guessing predicate cases") {
    const guessing_game g = ms_guessing(rational(1, 8));
    const auto& ms = g.base;

    SECTION("anchored rounds ignore the guess, exhaustively") {
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        const bool base = ms.wins(x, y, a, b);
                        for (int e = 0; e < 2; ++e)
                            CHECK(guessing_predicate(g, x, y, eve_input::anchor(), a, b, e) ==
                                  base);
                    }
    }

    SECTION("correct common bit wins, wrong loses, losing base always loses") {
        const auto& maps = g.common_bits;
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y)
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b) {
                        const int f = maps.f_bit(ms, x, y, a);
                        const bool base = ms.wins(x, y, a, b);
                        CHECK(guessing_predicate(g, x, y, eve_input::pair(x, y), a, b, f) == base);
                        CHECK_FALSE(
                            guessing_predicate(g, x, y, eve_input::pair(x, y), a, b, 1 - f));
                    }
    }

    SECTION("domain errors") {
        CHECK_THROWS_AS(guessing_predicate(g, 5, 0, eve_input::anchor(), 0, 0, 0), domain_error);
        CHECK_THROWS_AS(guessing_predicate(g, 0, 0, eve_input::pair(0, 0), 0, 1, 7), domain_error);
        CHECK_THROWS_AS(guessing_predicate(g, 0, 1, eve_input::pair(1, 1), 0, 1, 0), domain_error);
    }
}

TEST_CASE("classical guessing value of the magic square") {
    SECTION("equals 8/9 at eta = 1/8 and stays there as eta grows") {
        rational previous(0);
        for (const rational eta : {rational(1, 8), rational(1, 4), rational(1, 2)}) {
            const guessing_game g = ms_guessing(eta);
            const rational v = classical_guessing_value(g);
            CHECK(v == rational(8, 9));
            CHECK(v >= previous); // monotone non-decreasing in eta
            CHECK(v >= classical_value(g.base) * eta);
            previous = v;
        }
    }

    SECTION("monte carlo replay of the argmax triple agrees within 3 sigma") {
        const guessing_game g = ms_guessing(rational(1, 8));
        const classical_guessing_result best = classical_guessing_value_full(g);
        const int samples = 200000;
        const double mc = replay_triple(g, best.ab, best.eve, samples, 31);
        const double exact = best.value.to_double();
        CHECK(std::abs(mc - exact) <= 3.0 * oracles::binomial_sigma(exact, samples));
    }
}

TEST_CASE("constantly winning base game with zero common bits is fully guessable") {
    two_player_free_game g;
    g.alice_inputs = {"0", "1"};
    g.bob_inputs = {"0"};
    g.alice_outputs = {"0", "1"};
    g.bob_outputs = {"0"};
    g.alice_input_dist = {rational(1, 2), rational(1, 2)};
    g.bob_input_dist = {rational(1)};
    g.predicate.assign(4, 1);
    common_bit_maps maps;
    maps.f.assign(2 * 1 * 2, 0);
    maps.g.assign(2 * 1 * 1, 0);
    const guessing_game gg =
        build_guessing_game(g, maps, rational(1, 2), eve_condition::guess_common_bit);
    CHECK(classical_guessing_value(gg) == rational(1));
}

TEST_CASE("lemma sandwich left side on random base games") {
    stream_rng rng = derive_rng(57, 0, "sandwich");
    for (int i = 0; i < 15; ++i) {
        oracles::random_game_options opt;
        opt.max_inputs = 2;
        opt.max_outputs = 3;
        const auto [base, maps] = oracles::random_game_with_bits(rng, opt);
        const guessing_game g =
            build_guessing_game(base, maps, rational(1, 8), eve_condition::guess_common_bit);
        CHECK(classical_value(base) <= classical_guessing_value(g));
    }
}

TEST_CASE("classical guessing value is monotone in eta on a random game") {
    stream_rng rng = derive_rng(58, 0, "monotone");
    oracles::random_game_options opt;
    opt.max_inputs = 2;
    opt.max_outputs = 2;
    const auto [base, maps] = oracles::random_game_with_bits(rng, opt);
    rational previous(0);
    for (const rational eta : {rational(1, 8), rational(1, 4), rational(1, 2), rational(1)}) {
        const guessing_game g = build_guessing_game(base, maps, eta,
                                                    eve_condition::guess_common_bit);
        const rational v = classical_guessing_value(g);
        CHECK(v >= previous);
        previous = v;
    }
}

TEST_CASE("strategy guessing values") {
    const guessing_game g = ms_guessing(rational(1, 8));

    SECTION("the argmax classical triple reproduces the brute-force value") {
        const classical_guessing_result best = classical_guessing_value_full(g);
        CHECK(strategy_guessing_value(g, best.ab, best.eve) == best.value);
        CHECK(best.value == rational(8, 9));
    }

    SECTION("ideal quantum strategy against a uniformly random bit") {
        const quantum_strategy st = ideal_ms_strategy();

        // the common bit is uniform under the ideal strategy, per input pair
        const born_sampler sampler(g.base, st, noise_model::none());
        for (int x = 0; x < 3; ++x)
            for (int y = 0; y < 3; ++y) {
                double p_zero = 0.0;
                for (int a = 0; a < 4; ++a)
                    for (int b = 0; b < 4; ++b)
                        if (g.common_bits.f_bit(g.base, x, y, a) == 0)
                            p_zero += sampler.probability(x, y, a, b);
                CHECK(p_zero == Catch::Approx(0.5).margin(1e-9));
            }

        // hence eta + (1 - eta)/2 = 9/16 by total probability
        CHECK(strategy_guessing_value_random_eve(g, st) ==
              Catch::Approx(9.0 / 16.0).margin(1e-9));
        const classical_eve_strategy zeros{std::vector<int>(9, 0), 0};
        const classical_eve_strategy ones{std::vector<int>(9, 1), 1};
        const double averaged =
            0.5 * (strategy_guessing_value(g, st, zeros) + strategy_guessing_value(g, st, ones));
        CHECK(averaged == Catch::Approx(9.0 / 16.0).margin(1e-9));
    }

    SECTION("eta = 1 reduces to the base game value for any eve") {
        const guessing_game g1 = ms_guessing(rational(1));
        const classical_eve_strategy zeros{std::vector<int>(9, 0), 0};
        CHECK(strategy_guessing_value(g1, ideal_ms_strategy(), zeros) ==
              Catch::Approx(1.0).margin(1e-9));
        const deterministic_strategy_pair det{{0, 0, 0}, {0, 0, 0}};
        CHECK(strategy_guessing_value(g1, det, zeros) == strategy_value(g1.base, det));
    }

    SECTION("shape mismatches are rejected") {
        const classical_eve_strategy short_eve{std::vector<int>(4, 0), 0};
        CHECK_THROWS_AS(strategy_guessing_value(g, ideal_ms_strategy(), short_eve),
                        malformed_strategy_error);
    }
}

TEST_CASE("anchoring checks") {
    SECTION("constructed games are anchored for every eta") {
        for (const rational eta : {rational(1, 8), rational(1, 4), rational(1, 2), rational(1)})
            CHECK(anchoring_check(ms_guessing(eta)));
    }

    SECTION("random games stay anchored") {
        stream_rng rng = derive_rng(97, 0, "anchor");
        for (int i = 0; i < 50; ++i) {
            const auto [base, maps] = oracles::random_game_with_bits(rng);
            for (const rational eta : {rational(1, 8), rational(1, 4), rational(1, 2)}) {
                const guessing_game g =
                    build_guessing_game(base, maps, eta, eve_condition::guess_common_bit);
                CHECK(anchoring_check(g));
            }
        }
    }

    SECTION("an anchor probability that depends on x fails the check") {
        const guessing_game g = ms_guessing(rational(1, 4));
        guessing_input_dist d = input_distribution(g);
        // move anchor mass from x=0 cells to pair mass; totals stay 1
        for (int y = 0; y < 3; ++y) {
            const std::size_t c = 0 * 3 + y;
            d.pair_mass[c] += d.anchor_mass[c];
            d.anchor_mass[c] = rational(0);
        }
        rational anchor_total(0);
        for (const auto& m : d.anchor_mass) anchor_total += m;
        CHECK_FALSE(anchoring_check_table(d, g.base, anchor_total));
        CHECK_FALSE(anchoring_check_table(d, g.base, g.eta));
    }
}

TEST_CASE("immunization constant bookkeeping") {
    const guessing_game g = ms_guessing(rational(1, 8));
    const rational classical = classical_guessing_value(g);

    SECTION("the classical triple certifies an upper bound of 1/9") {
        const immunization_constants imm = c_star_bounds({{"classical", classical}});
        CHECK(imm.c_star_upper_bound() == rational(1, 9));
        CHECK(imm.lower_bound_on_omega_star == rational(8, 9));
        CHECK(imm.upper_bound_on_omega_star == rational(1));
        CHECK(imm.c_star_working_value == default_c_star_working_value);
    }

    SECTION("no evaluations is a precondition violation") {
        CHECK_THROWS_AS(c_star_bounds({}), domain_error);
    }

    SECTION("adding strategies never lowers the omega lower bound") {
        std::vector<guessing_evaluation> evals{{"weak", rational(9, 16)}};
        const rational first = c_star_bounds(evals).lower_bound_on_omega_star;
        evals.push_back({"classical", classical});
        const rational second = c_star_bounds(evals).lower_bound_on_omega_star;
        CHECK(second >= first);
        evals.push_back({"weaker", rational(1, 2)});
        CHECK(c_star_bounds(evals).lower_bound_on_omega_star == second);
    }

    SECTION("inconsistent working value is rejected") {
        CHECK_THROWS_AS(c_star_bounds({{"classical", classical}}, 0.5), domain_error);
        CHECK_THROWS_AS(c_star_bounds({{"classical", classical}}, 0.0), domain_error);
    }
}
