#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "parqkd/games.hpp"
#include "parqkd/quantum.hpp"
#include "support/oracles.hpp"

using namespace parqkd;

namespace {

// Independent route for the joint distribution: form the full Kronecker
// product per outcome and take the literal trace.
double kron_trace_probability(const quantum_strategy& st, const density_state& rho, int x, int y,
                              std::size_t i, std::size_t j) {
    const cmat op = kron(st.alice_measurements[x].outcomes[i].projector,
                         st.bob_measurements[y].outcomes[j].projector);
    return trace_product(op, rho.matrix).real();
}

} // namespace

TEST_CASE("ideal strategy wins the magic square with probability 1") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    st.validate();
    CHECK(win_probability(ms, st, noise_model::none()) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("row and column observables commute within each measurement") {
    for (int r = 0; r < 3; ++r) {
        for (int c1 = 0; c1 < 3; ++c1)
            for (int c2 = c1 + 1; c2 < 3; ++c2) {
                const cmat a = mermin_peres_observable(r, c1);
                const cmat b = mermin_peres_observable(r, c2);
                CHECK((a * b - b * a).max_abs() < 1e-10);
                const cmat at = mermin_peres_observable(c1, r).transpose();
                const cmat bt = mermin_peres_observable(c2, r).transpose();
                CHECK((at * bt - bt * at).max_abs() < 1e-10);
            }
    }
}

TEST_CASE("grid rows multiply to +I and columns to -I") {
    const cmat id = cmat::identity(4);
    for (int r = 0; r < 3; ++r) {
        const cmat row = mermin_peres_observable(r, 0) * mermin_peres_observable(r, 1) *
                         mermin_peres_observable(r, 2);
        CHECK((row - id).max_abs() < 1e-10);
        const cmat col = mermin_peres_observable(0, r) * mermin_peres_observable(1, r) *
                         mermin_peres_observable(2, r);
        CHECK((col + id).max_abs() < 1e-10);
    }
}

TEST_CASE("alice marginals are uniform under the ideal strategy") {
    const quantum_strategy st = ideal_ms_strategy();
    const cmat id_b = cmat::identity(4);
    for (int x = 0; x < 3; ++x)
        for (const auto& o : st.alice_measurements[x].outcomes) {
            const double p = trace_product(kron(o.projector, id_b), st.shared_state.matrix).real();
            CHECK(p == Catch::Approx(0.25).margin(1e-9));
        }
}

TEST_CASE("joint distributions are normalized and supported on winning tuples") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            const auto probs = joint_outcome_distribution(st, st.shared_state, x, y);
            double sum = 0.0;
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    const double p = probs[i * 4 + j];
                    CHECK(p >= 0.0);
                    sum += p;
                    const int a = st.alice_measurements[x].outcomes[i].label;
                    const int b = st.bob_measurements[y].outcomes[j].label;
                    if (p > 1e-9) CHECK(ms.wins(x, y, a, b));
                }
            CHECK(sum == Catch::Approx(1.0).margin(1e-9));
        }
}

TEST_CASE("contracted distribution matches the literal kron trace") {
    const quantum_strategy st = ideal_ms_strategy();
    const density_state rho = depolarize(st.shared_state, 0.37);
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
            const auto probs = joint_outcome_distribution(st, rho, x, y);
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j)
                    CHECK(probs[i * 4 + j] ==
                          Catch::Approx(kron_trace_probability(st, rho, x, y, i, j)).margin(1e-12));
        }
}

TEST_CASE("win probability at q=1 equals the maximally mixed trace sum") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();

    density_state mixed;
    mixed.dim = 16;
    mixed.matrix = cplx(1.0 / 16.0) * cmat::identity(16);
    double oracle = 0.0;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    const int a = st.alice_measurements[x].outcomes[i].label;
                    const int b = st.bob_measurements[y].outcomes[j].label;
                    if (ms.wins(x, y, a, b))
                        oracle += kron_trace_probability(st, mixed, x, y, i, j) / 9.0;
                }

    const double value = win_probability(ms, st, noise_model::depolarizing(1.0));
    CHECK(value == Catch::Approx(oracle).margin(1e-9));
    CHECK(value == Catch::Approx(0.5).margin(1e-9));
}

TEST_CASE("win probability is affine in the depolarizing parameter") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    const double v0 = win_probability(ms, st, noise_model::none());
    const double v1 = win_probability(ms, st, noise_model::depolarizing(1.0));
    for (const double q : {0.0, 0.25, 0.5, 1.0}) {
        const double v = win_probability(ms, st, noise_model::depolarizing(q));
        CHECK(v == Catch::Approx((1.0 - q) * v0 + q * v1).margin(1e-9));
    }
    CHECK(win_probability(ms, st, noise_model::depolarizing(0.0)) ==
          Catch::Approx(v0).margin(1e-12));
}

TEST_CASE("depolarize endpoints and trace") {
    const quantum_strategy st = ideal_ms_strategy();
    const density_state& rho = st.shared_state;
    CHECK((depolarize(rho, 0.0).matrix - rho.matrix).max_abs() < 1e-15);
    const density_state mixed = depolarize(rho, 1.0);
    CHECK((mixed.matrix - cplx(1.0 / 16.0) * cmat::identity(16)).max_abs() < 1e-15);
    CHECK(std::abs(depolarize(rho, 0.3).matrix.trace() - cplx(1.0)) < 1e-12);
    CHECK_THROWS_AS(depolarize(rho, -0.1), domain_error);
    CHECK_THROWS_AS(depolarize(rho, 1.1), domain_error);
}

TEST_CASE("malformed strategies are rejected") {
    const auto [ms, maps] = magic_square();
    quantum_strategy st = ideal_ms_strategy();
    st.alice_measurements[0].outcomes[0].projector(0, 0) += cplx(0.1);
    CHECK_THROWS_AS(win_probability(ms, st, noise_model::none()), malformed_strategy_error);

    quantum_strategy st2 = ideal_ms_strategy();
    st2.shared_state.matrix(0, 0) += cplx(0.5);
    CHECK_THROWS_AS(win_probability(ms, st2, noise_model::none()), malformed_strategy_error);
}

TEST_CASE("noise calibration hits the requested win probability") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    CHECK(calibrate_noise(ms, st, 1.0) == 0.0);
    const double q = calibrate_noise(ms, st, 0.95);
    CHECK(win_probability(ms, st, noise_model::depolarizing(q)) ==
          Catch::Approx(0.95).margin(1e-9));
    CHECK_THROWS_AS(calibrate_noise(ms, st, 0.1), domain_error);
    CHECK_THROWS_AS(calibrate_noise(ms, st, 1.01), domain_error);
}

TEST_CASE("sampling is deterministic under a fixed stream") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    stream_rng r1 = derive_rng(7, 0, "sample");
    stream_rng r2 = derive_rng(7, 0, "sample");
    for (int i = 0; i < 200; ++i) {
        const auto s1 = sample_round(ms, st, noise_model::depolarizing(0.2), i % 3, (i / 3) % 3, r1);
        const auto s2 = sample_round(ms, st, noise_model::depolarizing(0.2), i % 3, (i / 3) % 3, r2);
        CHECK(s1 == s2);
    }
    CHECK_THROWS_AS(sample_round(ms, st, noise_model::none(), 3, 0, r1), domain_error);
}

TEST_CASE("ideal sampling always wins") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    const born_sampler sampler(ms, st, noise_model::none());
    stream_rng rng = derive_rng(13, 0, "ideal_rounds");
    int wins = 0;
    const int rounds = 100000;
    for (int i = 0; i < rounds; ++i) {
        const int x = static_cast<int>(uniform_below(rng, 3));
        const int y = static_cast<int>(uniform_below(rng, 3));
        const auto [a, b] = sampler.sample(x, y, rng);
        wins += ms.wins(x, y, a, b) ? 1 : 0;
    }
    CHECK(wins == rounds);
}

TEST_CASE("calibrated sampling matches its target within 3 sigma") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    const double q = calibrate_noise(ms, st, 0.95);
    const born_sampler sampler(ms, st, noise_model::depolarizing(q));
    stream_rng rng = derive_rng(18, 0, "calibrated_rounds");
    int wins = 0;
    const int rounds = 100000;
    for (int i = 0; i < rounds; ++i) {
        const int x = static_cast<int>(uniform_below(rng, 3));
        const int y = static_cast<int>(uniform_below(rng, 3));
        const auto [a, b] = sampler.sample(x, y, rng);
        wins += ms.wins(x, y, a, b) ? 1 : 0;
    }
    const double rate = static_cast<double>(wins) / rounds;
    CHECK(std::abs(rate - 0.95) <= 3.0 * oracles::binomial_sigma(0.95, rounds));
}

TEST_CASE("sample_round empirical law matches the exact Born distribution") {
    const auto [ms, maps] = magic_square();
    const quantum_strategy st = ideal_ms_strategy();
    const noise_model noise = noise_model::depolarizing(0.25);
    const int x = 1, y = 2;

    const density_state rho = apply_noise(st.shared_state, noise);
    const auto exact = joint_outcome_distribution(st, rho, x, y);

    std::map<std::pair<int, int>, std::int64_t> counts;
    stream_rng rng = derive_rng(23, 0, "tv");
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[sample_round(ms, st, noise, x, y, rng)];

    double tv = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            const int a = st.alice_measurements[x].outcomes[i].label;
            const int b = st.bob_measurements[y].outcomes[j].label;
            const double emp = static_cast<double>(counts[{a, b}]) / draws;
            tv += std::abs(emp - exact[i * 4 + j]);
        }
    tv *= 0.5;
    CHECK(tv < 0.02);
}
