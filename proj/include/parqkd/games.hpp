#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/rational.hpp"

namespace parqkd {

/// Two-player one-round game with product input distribution. Inputs and
/// outputs are indices into the label vectors; the win predicate is a total
/// truth table indexed ((x*|Y|+y)*|A|+a)*|B|+b.
struct two_player_free_game {
    std::vector<std::string> alice_inputs;
    std::vector<std::string> bob_inputs;
    std::vector<std::string> alice_outputs;
    std::vector<std::string> bob_outputs;
    std::vector<rational> alice_input_dist;
    std::vector<rational> bob_input_dist;
    std::vector<std::uint8_t> predicate;

    std::size_t nx() const { return alice_inputs.size(); }
    std::size_t ny() const { return bob_inputs.size(); }
    std::size_t na() const { return alice_outputs.size(); }
    std::size_t nb() const { return bob_outputs.size(); }

    std::size_t predicate_index(int x, int y, int a, int b) const {
        return ((static_cast<std::size_t>(x) * ny() + y) * na() + a) * nb() + b;
    }

    bool wins(int x, int y, int a, int b) const {
        return predicate[predicate_index(x, y, a, b)] != 0;
    }

    void validate() const {
        if (nx() == 0 || ny() == 0 || na() == 0 || nb() == 0)
            throw domain_error("game: empty input or output set");
        if (alice_input_dist.size() != nx() || bob_input_dist.size() != ny())
            throw domain_error("game: distribution size mismatch");
        rational sa(0), sb(0);
        for (const rational& p : alice_input_dist) {
            if (p < rational(0)) throw domain_error("game: negative probability");
            sa += p;
        }
        for (const rational& p : bob_input_dist) {
            if (p < rational(0)) throw domain_error("game: negative probability");
            sb += p;
        }
        if (sa != rational(1) || sb != rational(1))
            throw domain_error("game: input distribution does not sum to 1");
        if (predicate.size() != nx() * ny() * na() * nb())
            throw domain_error("game: predicate table has wrong size");
    }
};

/// Per-input-pair bit maps f(x,y,a) and g(x,y,b) that agree on every winning
/// tuple. Tables are indexed (x*|Y|+y)*|A|+a and (x*|Y|+y)*|B|+b.
struct common_bit_maps {
    std::vector<std::uint8_t> f;
    std::vector<std::uint8_t> g;

    int f_bit(const two_player_free_game& game, int x, int y, int a) const {
        return f[(static_cast<std::size_t>(x) * game.ny() + y) * game.na() + a];
    }
    int g_bit(const two_player_free_game& game, int x, int y, int b) const {
        return g[(static_cast<std::size_t>(x) * game.ny() + y) * game.nb() + b];
    }

    bool empty() const { return f.empty() && g.empty(); }

    /// Matching law: winning tuples must agree on the common bit.
    bool consistent_with(const two_player_free_game& game) const {
        if (f.size() != game.nx() * game.ny() * game.na()) return false;
        if (g.size() != game.nx() * game.ny() * game.nb()) return false;
        for (int x = 0; x < static_cast<int>(game.nx()); ++x)
            for (int y = 0; y < static_cast<int>(game.ny()); ++y)
                for (int a = 0; a < static_cast<int>(game.na()); ++a)
                    for (int b = 0; b < static_cast<int>(game.nb()); ++b)
                        if (game.wins(x, y, a, b) && f_bit(game, x, y, a) != g_bit(game, x, y, b))
                            return false;
        return true;
    }
};

struct deterministic_strategy_pair {
    std::vector<int> alice_map; // x -> a
    std::vector<int> bob_map;   // y -> b
};

namespace magic_square_detail {

// Output index 0..3 encodes the two free bits; the third is fixed by parity.
inline int alice_bit(int a, int cell) {
    const int b0 = (a >> 1) & 1, b1 = a & 1;
    const int bits[3] = {b0, b1, b0 ^ b1};
    return bits[cell];
}

inline int bob_bit(int b, int cell) {
    const int b0 = (b >> 1) & 1, b1 = b & 1;
    const int bits[3] = {b0, b1, 1 ^ b0 ^ b1};
    return bits[cell];
}

} // namespace magic_square_detail

/// The Magic Square game: rows for Alice (even parity triples), columns for
/// Bob (odd parity triples), win iff the shared cell agrees. The common bit
/// of input pair (x,y) is that shared cell.
inline std::pair<two_player_free_game, common_bit_maps> magic_square() {
    using namespace magic_square_detail;
    two_player_free_game g;
    g.alice_inputs = {"0", "1", "2"};
    g.bob_inputs = {"0", "1", "2"};
    g.alice_outputs = {"000", "011", "101", "110"};
    g.bob_outputs = {"001", "010", "100", "111"};
    g.alice_input_dist.assign(3, rational(1, 3));
    g.bob_input_dist.assign(3, rational(1, 3));
    g.predicate.assign(3 * 3 * 4 * 4, 0);

    common_bit_maps maps;
    maps.f.assign(3 * 3 * 4, 0);
    maps.g.assign(3 * 3 * 4, 0);

    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int a = 0; a < 4; ++a) {
                maps.f[(x * 3 + y) * 4 + a] = static_cast<std::uint8_t>(alice_bit(a, y));
                for (int b = 0; b < 4; ++b) {
                    maps.g[(x * 3 + y) * 4 + b] = static_cast<std::uint8_t>(bob_bit(b, x));
                    g.predicate[g.predicate_index(x, y, a, b)] =
                        alice_bit(a, y) == bob_bit(b, x) ? 1 : 0;
                }
            }
    return {std::move(g), std::move(maps)};
}

inline bool evaluate_predicate(const two_player_free_game& game, int x, int y, int a, int b) {
    if (x < 0 || x >= static_cast<int>(game.nx()) || y < 0 || y >= static_cast<int>(game.ny()) ||
        a < 0 || a >= static_cast<int>(game.na()) || b < 0 || b >= static_cast<int>(game.nb()))
        throw domain_error("evaluate_predicate: argument outside the game's sets");
    return game.wins(x, y, a, b);
}

inline constexpr std::uint64_t strategy_enumeration_guard = 100'000'000;

namespace detail {

inline std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t v = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (v > cap / (base ? base : 1)) return cap + 1;
        v *= base;
    }
    return v;
}

/// Common-denominator integer weights for a rational probability vector.
struct integer_dist {
    std::vector<std::int64_t> weights;
    std::int64_t denom = 1;

    explicit integer_dist(const std::vector<rational>& dist) {
        for (const rational& p : dist) denom = std::lcm(denom, p.den());
        for (const rational& p : dist) weights.push_back(p.num() * (denom / p.den()));
    }
};

} // namespace detail

inline std::uint64_t strategy_pair_count(const two_player_free_game& game) {
    const std::uint64_t cap = strategy_enumeration_guard;
    const std::uint64_t ca = detail::checked_pow(game.na(), game.nx(), cap);
    const std::uint64_t cb = detail::checked_pow(game.nb(), game.ny(), cap);
    if (ca > cap || cb > cap || ca > cap / cb)
        throw capacity_error("strategy enumeration guard exceeded (limit 1e8 pairs)");
    return ca * cb;
}

/// Visits every deterministic strategy pair exactly once.
template <typename Visitor>
void enumerate_strategies(const two_player_free_game& game, Visitor&& visit) {
    strategy_pair_count(game);
    deterministic_strategy_pair s;
    s.alice_map.assign(game.nx(), 0);
    s.bob_map.assign(game.ny(), 0);
    const auto advance = [](std::vector<int>& odo, int radix) {
        for (std::size_t i = 0; i < odo.size(); ++i) {
            if (++odo[i] < radix) return true;
            odo[i] = 0;
        }
        return false;
    };
    do {
        std::fill(s.bob_map.begin(), s.bob_map.end(), 0);
        do {
            visit(static_cast<const deterministic_strategy_pair&>(s));
        } while (advance(s.bob_map, static_cast<int>(game.nb())));
    } while (advance(s.alice_map, static_cast<int>(game.na())));
}

/// Exact win probability of one deterministic strategy pair.
inline rational strategy_value(const two_player_free_game& game,
                               const deterministic_strategy_pair& s) {
    rational v(0);
    for (int x = 0; x < static_cast<int>(game.nx()); ++x)
        for (int y = 0; y < static_cast<int>(game.ny()); ++y)
            if (game.wins(x, y, s.alice_map[x], s.bob_map[y]))
                v += game.alice_input_dist[x] * game.bob_input_dist[y];
    return v;
}

/// Exact classical value. Enumerates Bob maps and takes Alice's best response
/// per input, which visits the same optimum as the full pair enumeration.
inline rational classical_value(const two_player_free_game& game) {
    game.validate();
    strategy_pair_count(game);
    const detail::integer_dist da(game.alice_input_dist);
    const detail::integer_dist db(game.bob_input_dist);

    std::vector<int> bob(game.ny(), 0);
    __int128 best = -1;
    for (;;) {
        __int128 score = 0;
        for (int x = 0; x < static_cast<int>(game.nx()); ++x) {
            std::int64_t best_a = 0;
            for (int a = 0; a < static_cast<int>(game.na()); ++a) {
                std::int64_t s = 0;
                for (int y = 0; y < static_cast<int>(game.ny()); ++y)
                    if (game.wins(x, y, a, bob[y])) s += db.weights[y];
                best_a = std::max(best_a, s);
            }
            score += static_cast<__int128>(da.weights[x]) * best_a;
        }
        best = std::max(best, score);

        std::size_t i = 0;
        while (i < bob.size() && ++bob[i] == static_cast<int>(game.nb())) bob[i++] = 0;
        if (i == bob.size()) break;
    }
    return rational::from_wide(best, static_cast<__int128>(da.denom) * db.denom);
}

} // namespace parqkd
