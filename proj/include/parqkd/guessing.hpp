#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/games.hpp"
#include "parqkd/quantum.hpp"
#include "parqkd/rational.hpp"

namespace parqkd {

enum class eve_condition { guess_full_output, guess_common_bit };

/// Three-player guessing game built on a two-player base game: with
/// probability 1-eta Eve receives both inputs and must guess Alice's output
/// (or just the common bit); with probability eta she receives the anchor
/// input and wins whenever the base condition holds.
struct guessing_game {
    two_player_free_game base;
    common_bit_maps common_bits;
    rational eta;
    eve_condition condition = eve_condition::guess_common_bit;

    int eve_alphabet_size() const {
        return condition == eve_condition::guess_common_bit ? 2
                                                            : static_cast<int>(base.na());
    }
};

struct eve_input {
    enum class tag_t { pair, anchor };
    tag_t tag = tag_t::anchor;
    int x = -1; // meaningful when tag == pair
    int y = -1;

    static eve_input anchor() { return {}; }
    static eve_input pair(int x, int y) { return {tag_t::pair, x, y}; }
};

struct classical_eve_strategy {
    std::vector<int> on_pair; // (x * |Y| + y) -> guess
    int on_anchor = 0;

    int guess(const guessing_game& g, int x, int y) const {
        return on_pair[static_cast<std::size_t>(x) * g.base.ny() + y];
    }
};

inline guessing_game build_guessing_game(two_player_free_game base, common_bit_maps maps,
                                         rational eta, eve_condition condition) {
    if (!(rational(0) < eta) || !(eta <= rational(1)))
        throw domain_error("guessing game: eta must lie in (0, 1]");
    base.validate();
    if (condition == eve_condition::guess_common_bit && !maps.consistent_with(base))
        throw domain_error("guessing game: common-bit maps do not match the base game");
    return {std::move(base), std::move(maps), eta, condition};
}

inline bool guessing_predicate(const guessing_game& g, int x, int y, const eve_input& ein,
                               int a, int b, int e) {
    if (!evaluate_predicate(g.base, x, y, a, b)) return false;
    if (ein.tag == eve_input::tag_t::anchor) return true;
    if (ein.x != x || ein.y != y)
        throw domain_error("guessing_predicate: Eve's pair input must equal the players' inputs");
    if (e < 0 || e >= g.eve_alphabet_size())
        throw domain_error("guessing_predicate: Eve's guess outside her alphabet");
    if (g.condition == eve_condition::guess_full_output) return e == a;
    return e == g.common_bits.f_bit(g.base, x, y, a);
}

namespace detail {

inline std::uint64_t guessing_triple_count(const guessing_game& g) {
    const std::uint64_t cap = strategy_enumeration_guard;
    const std::uint64_t pairs = strategy_pair_count(g.base);
    const std::uint64_t e = static_cast<std::uint64_t>(g.eve_alphabet_size());
    std::uint64_t eves = checked_pow(e, g.base.nx() * g.base.ny(), cap);
    if (eves > cap || eves > cap / e) throw capacity_error("guessing enumeration guard exceeded");
    eves *= e; // anchor guess
    if (pairs > cap / eves) throw capacity_error("guessing enumeration guard exceeded");
    return pairs * eves;
}

} // namespace detail

struct classical_guessing_result {
    rational value;
    deterministic_strategy_pair ab;
    classical_eve_strategy eve;
};

/// Exact classical guessing value by brute force over every deterministic
/// (Alice, Bob, Eve) triple. Shared randomness cannot beat the best triple.
inline classical_guessing_result classical_guessing_value_full(const guessing_game& g) {
    detail::guessing_triple_count(g);
    const auto& base = g.base;
    const detail::integer_dist da(base.alice_input_dist);
    const detail::integer_dist db(base.bob_input_dist);
    const std::int64_t eta_num = g.eta.num();
    const std::int64_t eta_den = g.eta.den();
    const std::size_t cells = base.nx() * base.ny();
    const int esize = g.eve_alphabet_size();

    classical_guessing_result best;
    __int128 best_score = -1;

    std::vector<std::int64_t> cell_weight(cells);  // pred * pi(x) * pi(y), integer scaled
    std::vector<int> cell_target(cells);
    std::vector<int> eve_map(cells, 0);

    enumerate_strategies(base, [&](const deterministic_strategy_pair& s) {
        __int128 base_score = 0; // anchor branch, independent of Eve
        for (std::size_t x = 0; x < base.nx(); ++x)
            for (std::size_t y = 0; y < base.ny(); ++y) {
                const std::size_t c = x * base.ny() + y;
                const int a = s.alice_map[x];
                if (base.wins(static_cast<int>(x), static_cast<int>(y), a, s.bob_map[y])) {
                    cell_weight[c] = da.weights[x] * db.weights[y];
                    cell_target[c] = g.condition == eve_condition::guess_common_bit
                                         ? g.common_bits.f_bit(base, static_cast<int>(x),
                                                               static_cast<int>(y), a)
                                         : a;
                    base_score += static_cast<__int128>(cell_weight[c]) * eta_num;
                } else {
                    cell_weight[c] = 0;
                }
            }

        std::fill(eve_map.begin(), eve_map.end(), 0);
        for (;;) {
            __int128 pair_score = 0;
            for (std::size_t c = 0; c < cells; ++c)
                if (cell_weight[c] != 0 && eve_map[c] == cell_target[c])
                    pair_score += cell_weight[c];
            const __int128 score = base_score + pair_score * (eta_den - eta_num);
            for (int anchor = 0; anchor < esize; ++anchor) {
                if (score > best_score) {
                    best_score = score;
                    best.ab = s;
                    best.eve = {eve_map, anchor};
                }
            }
            std::size_t i = 0;
            while (i < cells && ++eve_map[i] == esize) eve_map[i++] = 0;
            if (i == cells) break;
        }
    });

    best.value = rational::from_wide(
        best_score, static_cast<__int128>(da.denom) * db.denom * eta_den);
    return best;
}

inline rational classical_guessing_value(const guessing_game& g) {
    return classical_guessing_value_full(g).value;
}

/// Exact guessing value of a deterministic pair played against a
/// deterministic Eve.
inline rational strategy_guessing_value(const guessing_game& g,
                                        const deterministic_strategy_pair& ab,
                                        const classical_eve_strategy& eve) {
    const auto& base = g.base;
    if (ab.alice_map.size() != base.nx() || ab.bob_map.size() != base.ny() ||
        eve.on_pair.size() != base.nx() * base.ny())
        throw malformed_strategy_error("strategy_guessing_value: strategy shape mismatch");
    rational v(0);
    const rational anchor_w = g.eta;
    const rational pair_w = rational(1) - g.eta;
    for (std::size_t x = 0; x < base.nx(); ++x)
        for (std::size_t y = 0; y < base.ny(); ++y) {
            const int a = ab.alice_map[x];
            if (!base.wins(static_cast<int>(x), static_cast<int>(y), a, ab.bob_map[y])) continue;
            const int target = g.condition == eve_condition::guess_common_bit
                                   ? g.common_bits.f_bit(base, static_cast<int>(x),
                                                         static_cast<int>(y), a)
                                   : a;
            const rational w = base.alice_input_dist[x] * base.bob_input_dist[y];
            v += w * anchor_w;
            if (eve.guess(g, static_cast<int>(x), static_cast<int>(y)) == target) v += w * pair_w;
        }
    return v;
}

/// Exact guessing value of a quantum pair strategy against a deterministic
/// Eve, averaged over the Born-rule output distribution.
inline double strategy_guessing_value(const guessing_game& g, const quantum_strategy& st,
                                      const classical_eve_strategy& eve) {
    st.validate();
    const auto& base = g.base;
    if (eve.on_pair.size() != base.nx() * base.ny())
        throw malformed_strategy_error("strategy_guessing_value: Eve strategy shape mismatch");
    const born_sampler sampler(base, st, noise_model::none());
    const double eta = g.eta.to_double();
    double v = 0.0;
    for (std::size_t x = 0; x < base.nx(); ++x)
        for (std::size_t y = 0; y < base.ny(); ++y) {
            const int e = eve.guess(g, static_cast<int>(x), static_cast<int>(y));
            double cell = 0.0;
            for (int a = 0; a < static_cast<int>(base.na()); ++a)
                for (int b = 0; b < static_cast<int>(base.nb()); ++b) {
                    if (!base.wins(static_cast<int>(x), static_cast<int>(y), a, b)) continue;
                    const double p = sampler.probability(static_cast<int>(x),
                                                         static_cast<int>(y), a, b);
                    const int target = g.condition == eve_condition::guess_common_bit
                                           ? g.common_bits.f_bit(base, static_cast<int>(x),
                                                                 static_cast<int>(y), a)
                                           : a;
                    cell += p * (eta + (1.0 - eta) * (e == target ? 1.0 : 0.0));
                }
            v += base.alice_input_dist[x].to_double() * base.bob_input_dist[y].to_double() * cell;
        }
    return v;
}

/// Quantum pair strategy against an Eve who guesses uniformly at random.
inline double strategy_guessing_value_random_eve(const guessing_game& g,
                                                 const quantum_strategy& st) {
    st.validate();
    const auto& base = g.base;
    const born_sampler sampler(base, st, noise_model::none());
    const double eta = g.eta.to_double();
    const double hit = 1.0 / static_cast<double>(g.eve_alphabet_size());
    double v = 0.0;
    for (std::size_t x = 0; x < base.nx(); ++x)
        for (std::size_t y = 0; y < base.ny(); ++y) {
            double cell = 0.0;
            for (int a = 0; a < static_cast<int>(base.na()); ++a)
                for (int b = 0; b < static_cast<int>(base.nb()); ++b)
                    if (base.wins(static_cast<int>(x), static_cast<int>(y), a, b))
                        cell += sampler.probability(static_cast<int>(x), static_cast<int>(y), a, b);
            v += base.alice_input_dist[x].to_double() * base.bob_input_dist[y].to_double() *
                 cell * (eta + (1.0 - eta) * hit);
        }
    return v;
}

/// Joint input distribution over (x, y, anchor?) cells, exposed so the
/// anchoring property can be checked on hand-built tables too.
struct guessing_input_dist {
    std::size_t nx = 0, ny = 0;
    std::vector<rational> pair_mass;   // (x * ny + y) -> P(x, y, Eve sees the pair)
    std::vector<rational> anchor_mass; // (x * ny + y) -> P(x, y, Eve sees the anchor)
};

inline guessing_input_dist input_distribution(const guessing_game& g) {
    guessing_input_dist d;
    d.nx = g.base.nx();
    d.ny = g.base.ny();
    for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t y = 0; y < d.ny; ++y) {
            const rational m = g.base.alice_input_dist[x] * g.base.bob_input_dist[y];
            d.pair_mass.push_back(m * (rational(1) - g.eta));
            d.anchor_mass.push_back(m * g.eta);
        }
    return d;
}

/// True iff the anchor event has probability eta, is independent of (x, y),
/// and the (x, y) marginal is the base game's product distribution.
inline bool anchoring_check_table(const guessing_input_dist& d, const two_player_free_game& base,
                                  const rational& eta) {
    rational total(0), anchor_total(0);
    for (std::size_t c = 0; c < d.pair_mass.size(); ++c) {
        total += d.pair_mass[c] + d.anchor_mass[c];
        anchor_total += d.anchor_mass[c];
    }
    if (total != rational(1) || anchor_total != eta) return false;
    for (std::size_t x = 0; x < d.nx; ++x)
        for (std::size_t y = 0; y < d.ny; ++y) {
            const std::size_t c = x * d.ny + y;
            const rational marginal = d.pair_mass[c] + d.anchor_mass[c];
            if (marginal != base.alice_input_dist[x] * base.bob_input_dist[y]) return false;
            // independence: P(anchor and (x,y)) = eta * P(x,y)
            if (d.anchor_mass[c] != eta * marginal) return false;
        }
    return true;
}

inline bool anchoring_check(const guessing_game& g) {
    return anchoring_check_table(input_distribution(g), g.base, g.eta);
}

struct guessing_evaluation {
    std::string label;
    rational value; // exact guessing value of one explicit strategy triple
};

/// Certified bracket for the entangled guessing value and the gap constant
/// derived from it. The working value is configuration, not a computed fact.
struct immunization_constants {
    rational lower_bound_on_omega_star;
    rational upper_bound_on_omega_star;
    double c_star_working_value = 0.0;

    rational c_star_upper_bound() const { return rational(1) - lower_bound_on_omega_star; }
};

inline constexpr double default_c_star_working_value = 0.01;

/// Every evaluated strategy certifies a lower bound on the entangled
/// guessing value; no nontrivial upper bound is computed here.
inline immunization_constants c_star_bounds(const std::vector<guessing_evaluation>& evals,
                                            double working_value = default_c_star_working_value) {
    if (evals.empty()) throw domain_error("c_star_bounds: at least one evaluated strategy required");
    immunization_constants out;
    out.lower_bound_on_omega_star = evals.front().value;
    for (const auto& e : evals)
        out.lower_bound_on_omega_star = std::max(out.lower_bound_on_omega_star, e.value);
    out.upper_bound_on_omega_star = rational(1);
    out.c_star_working_value = working_value;
    if (working_value <= 0.0 || rational(0) >= out.c_star_upper_bound() ||
        working_value > out.c_star_upper_bound().to_double())
        throw domain_error("c_star_bounds: working value inconsistent with certified bracket");
    return out;
}

} // namespace parqkd
