#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "parqkd/errors.hpp"
#include "parqkd/games.hpp"
#include "parqkd/guessing.hpp"
#include "parqkd/quantum.hpp"
#include "parqkd/rational.hpp"
#include "parqkd/repetition.hpp"
#include "parqkd/rng.hpp"

namespace parqkd {

struct protocol_config {
    int n = 1;
    rational eta;     // fraction of rounds whose inputs are not leaked
    rational gamma;   // fraction of rounds tested
    rational epsilon; // noise tolerance of the test
    std::uint64_t master_seed = 0;
    bool exclude_test_rounds_from_key = true;

    void validate() const {
        if (n < 1) throw domain_error("protocol: n must be >= 1");
        if (eta < rational(0) || eta >= rational(1))
            throw domain_error("protocol: eta must lie in [0, 1)");
        if (!(rational(0) < gamma) || gamma > rational(1, 2))
            throw domain_error("protocol: gamma must lie in (0, 1/2]");
        if (epsilon < rational(0) || epsilon > rational(1, 2))
            throw domain_error("protocol: epsilon must lie in [0, 1/2]");
    }

    // |T| = ceil(gamma * n)
    int test_set_size() const {
        return static_cast<int>((gamma.num() * n + gamma.den() - 1) / gamma.den());
    }
};

// ---------------------------------------------------------------------------
// Device models. A device receives the full input strings at once, so a
// dishonest model may correlate its answers across rounds.

struct ideal_quantum_device {};
struct noisy_quantum_device {
    double q = 0.0;
};
struct deterministic_device {
    deterministic_strategy_pair table;
};
struct correlated_device {
    std::vector<deterministic_strategy_pair> per_round;
};

using device_model =
    std::variant<ideal_quantum_device, noisy_quantum_device, deterministic_device,
                 correlated_device>;

inline std::string device_description(const device_model& d) {
    if (std::holds_alternative<ideal_quantum_device>(d)) return "ideal_quantum";
    if (const auto* nd = std::get_if<noisy_quantum_device>(&d))
        return "noisy_quantum(q=" + std::to_string(nd->q) + ")";
    if (std::holds_alternative<deterministic_device>(d)) return "deterministic_classical";
    return "custom_correlated";
}

/// Prepared device: quantum models carry their Born table so that per-run
/// sampling is table lookups only.
class device_runtime {
public:
    device_runtime(const two_player_free_game& game, device_model model)
        : model_(std::move(model)) {
        if (std::holds_alternative<ideal_quantum_device>(model_) ||
            std::holds_alternative<noisy_quantum_device>(model_)) {
            if (game.nx() != 3 || game.ny() != 3 || game.na() != 4 || game.nb() != 4)
                throw domain_error("quantum device models are defined for the magic square game");
            const double q = std::holds_alternative<noisy_quantum_device>(model_)
                                 ? std::get<noisy_quantum_device>(model_).q
                                 : 0.0;
            sampler_.emplace(game, ideal_ms_strategy(),
                             q == 0.0 ? noise_model::none() : noise_model::depolarizing(q));
        }
    }

    const device_model& model() const { return model_; }
    std::string description() const { return device_description(model_); }

    /// Deterministic response table when the device has one (used by the
    /// omniscient eavesdropper model).
    const deterministic_strategy_pair* fixed_table() const {
        return std::get_if<deterministic_device>(&model_) != nullptr
                   ? &std::get<deterministic_device>(model_).table
                   : nullptr;
    }

    void respond(const std::vector<int>& x, const std::vector<int>& y, stream_rng& rng,
                 std::vector<int>& a, std::vector<int>& b) const {
        const std::size_t n = x.size();
        a.resize(n);
        b.resize(n);
        if (sampler_) {
            for (std::size_t i = 0; i < n; ++i) {
                const auto [ai, bi] = sampler_->sample(x[i], y[i], rng);
                a[i] = ai;
                b[i] = bi;
            }
        } else if (const auto* det = std::get_if<deterministic_device>(&model_)) {
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = det->table.alice_map[x[i]];
                b[i] = det->table.bob_map[y[i]];
            }
        } else {
            const auto& rounds = std::get<correlated_device>(model_).per_round;
            if (rounds.size() < n)
                throw domain_error("correlated device: table shorter than the round count");
            for (std::size_t i = 0; i < n; ++i) {
                a[i] = rounds[i].alice_map[x[i]];
                b[i] = rounds[i].bob_map[y[i]];
            }
        }
    }

private:
    device_model model_;
    std::optional<born_sampler> sampler_;
};

// ---------------------------------------------------------------------------
// Eavesdropper models. An Eve model consumes exactly the leaked transcript
// plus public parameters; nothing else is reachable from its inputs.

struct random_guess_eve {};
struct predictor_eve {
    std::vector<std::uint8_t> bit_by_input_pair; // (x * |Y| + y) -> predicted key bit
};
struct omniscient_eve {
    deterministic_strategy_pair device_table;
};

using eve_model = std::variant<random_guess_eve, predictor_eve, omniscient_eve>;

inline std::string eve_description(const eve_model& e) {
    if (std::holds_alternative<random_guess_eve>(e)) return "random_guess";
    if (std::holds_alternative<predictor_eve>(e)) return "predict_from_leak";
    return "omniscient_classical";
}

enum class abort_stage { none, size_check, test_check };

inline const char* abort_stage_name(abort_stage s) {
    switch (s) {
        case abort_stage::size_check: return "size_check";
        case abort_stage::test_check: return "test_check";
        default: return "none";
    }
}

/// Everything that crosses the authenticated public channel, and nothing
/// else: this is the whole of Eve's view beyond the public parameters.
struct transcript {
    std::vector<int> s_rounds; // S, sorted
    std::vector<int> x_s;      // aligned with s_rounds
    std::vector<int> y_s;
    std::vector<int> t_rounds; // T, sorted, subset of S
    std::vector<int> a_t;      // aligned with t_rounds
    std::vector<int> b_t;
    abort_stage abort = abort_stage::none;
    int test_win_count = 0;

    /// Position of round i in S, or -1.
    int s_position(int i) const {
        const auto it = std::lower_bound(s_rounds.begin(), s_rounds.end(), i);
        return it != s_rounds.end() && *it == i ? static_cast<int>(it - s_rounds.begin()) : -1;
    }
};

struct run_result {
    transcript leak;
    std::vector<int> key_indices;      // subset of S, sorted
    std::vector<std::uint8_t> k_alice; // aligned with key_indices
    std::vector<std::uint8_t> k_bob;
    std::vector<std::uint8_t> eve_guess;
    round_ledger per_round_wins; // simulator ground truth, never leaked
};

// ---------------------------------------------------------------------------
// Protocol steps.

/// Step 2: each round joins S independently with probability 1 - eta.
inline std::vector<int> select_s(int n, const rational& eta, stream_rng& rng) {
    const double keep = 1.0 - eta.to_double();
    std::vector<int> s;
    for (int i = 0; i < n; ++i)
        if (bernoulli(rng, keep)) s.push_back(i);
    return s;
}

/// Step 5 selection: uniform subset of S of size ceil(gamma*n), or a size
/// abort when S is too small. Aborts are outcomes, not errors.
inline std::optional<std::vector<int>> select_t(const std::vector<int>& s, const rational& gamma,
                                                int n, stream_rng& rng) {
    const __int128 m = (static_cast<__int128>(gamma.num()) * n + gamma.den() - 1) / gamma.den();
    if (static_cast<__int128>(s.size()) <= m) return std::nullopt;
    return sample_subset(rng, s, static_cast<std::size_t>(m));
}

/// Step 5 check: pass iff at least (1 - epsilon)|T| tested rounds win.
/// Integer arithmetic keeps the inclusive boundary exact.
struct test_check_result {
    bool pass = false;
    int win_count = 0;
};

inline test_check_result test_check(const two_player_free_game& game, const std::vector<int>& x_t,
                                    const std::vector<int>& y_t, const std::vector<int>& a_t,
                                    const std::vector<int>& b_t, const rational& epsilon) {
    if (x_t.size() != y_t.size() || x_t.size() != a_t.size() || x_t.size() != b_t.size())
        throw domain_error("test_check: misaligned index sets");
    int wins = 0;
    for (std::size_t i = 0; i < x_t.size(); ++i)
        if (evaluate_predicate(game, x_t[i], y_t[i], a_t[i], b_t[i])) ++wins;
    const __int128 lhs = static_cast<__int128>(wins) * epsilon.den();
    const __int128 rhs = static_cast<__int128>(epsilon.den() - epsilon.num()) *
                         static_cast<__int128>(x_t.size());
    return {lhs >= rhs, wins};
}

struct raw_keys {
    std::vector<int> indices;
    std::vector<std::uint8_t> k_alice;
    std::vector<std::uint8_t> k_bob;
};

/// Step 6: per-round common bits over the key index set (S, or S minus T
/// when test rounds are excluded).
inline raw_keys extract_raw_keys(const two_player_free_game& game, const common_bit_maps& maps,
                                 const std::vector<int>& x, const std::vector<int>& y,
                                 const std::vector<int>& a, const std::vector<int>& b,
                                 const std::vector<int>& s, const std::vector<int>& t,
                                 bool exclude_test_rounds) {
    for (const int i : t)
        if (!std::binary_search(s.begin(), s.end(), i))
            throw domain_error("extract_raw_keys: test round outside S");
    raw_keys out;
    for (const int i : s) {
        if (exclude_test_rounds && std::binary_search(t.begin(), t.end(), i)) continue;
        out.indices.push_back(i);
        out.k_alice.push_back(static_cast<std::uint8_t>(maps.f_bit(game, x[i], y[i], a[i])));
        out.k_bob.push_back(static_cast<std::uint8_t>(maps.g_bit(game, x[i], y[i], b[i])));
    }
    return out;
}

/// Eve's guess at Alice's raw key. The model only ever touches the leaked
/// transcript, the public parameters, and (for the omniscient model) its own
/// copy of the device table.
inline std::vector<std::uint8_t> eve_guess_key(const two_player_free_game& game,
                                               const common_bit_maps& maps,
                                               const eve_model& eve,
                                               const protocol_config& config,
                                               const transcript& leak,
                                               const std::vector<int>& key_indices,
                                               stream_rng& rng) {
    (void)config;
    std::vector<std::uint8_t> guess(key_indices.size(), 0);
    if (std::holds_alternative<random_guess_eve>(eve)) {
        for (auto& gbit : guess) gbit = static_cast<std::uint8_t>(rng() & 1ULL);
        return guess;
    }
    for (std::size_t k = 0; k < key_indices.size(); ++k) {
        const int pos = leak.s_position(key_indices[k]);
        if (pos < 0) throw domain_error("eve model: key round not in S");
        const int x = leak.x_s[pos];
        const int y = leak.y_s[pos];
        if (const auto* pred = std::get_if<predictor_eve>(&eve)) {
            guess[k] = pred->bit_by_input_pair[static_cast<std::size_t>(x) * game.ny() + y];
        } else {
            const auto& table = std::get<omniscient_eve>(eve).device_table;
            guess[k] = static_cast<std::uint8_t>(maps.f_bit(game, x, y, table.alice_map[x]));
        }
    }
    return guess;
}

/// Steps 1-6 with the per-round inputs supplied by the caller. Exposed so
/// tests can vary unleaked inputs while holding the leak fixed.
inline run_result run_protocol_given_inputs(const two_player_free_game& game,
                                            const common_bit_maps& maps,
                                            const protocol_config& config,
                                            const device_runtime& device, const eve_model& eve,
                                            std::uint64_t run_index, const std::vector<int>& x,
                                            const std::vector<int>& y) {
    config.validate();
    run_result result;

    // Step 2
    stream_rng rng_s = derive_rng(config.master_seed, run_index, "select_s");
    result.leak.s_rounds = select_s(config.n, config.eta, rng_s);
    for (const int i : result.leak.s_rounds) {
        result.leak.x_s.push_back(x[i]);
        result.leak.y_s.push_back(y[i]);
    }

    // Steps 3-4: the device answers all rounds in one shot.
    stream_rng rng_dev = derive_rng(config.master_seed, run_index, "device");
    std::vector<int> a, b;
    device.respond(x, y, rng_dev, a, b);

    result.per_round_wins.wins.resize(config.n);
    for (int i = 0; i < config.n; ++i)
        result.per_round_wins.wins[i] = game.wins(x[i], y[i], a[i], b[i]) ? 1 : 0;

    // Step 5
    stream_rng rng_t = derive_rng(config.master_seed, run_index, "select_t");
    const auto t = select_t(result.leak.s_rounds, config.gamma, config.n, rng_t);
    if (!t) {
        result.leak.abort = abort_stage::size_check;
        return result;
    }
    result.leak.t_rounds = *t;
    std::vector<int> x_t, y_t;
    for (const int i : result.leak.t_rounds) {
        result.leak.a_t.push_back(a[i]);
        result.leak.b_t.push_back(b[i]);
        x_t.push_back(x[i]);
        y_t.push_back(y[i]);
    }
    const test_check_result check =
        test_check(game, x_t, y_t, result.leak.a_t, result.leak.b_t, config.epsilon);
    result.leak.test_win_count = check.win_count;
    if (!check.pass) {
        result.leak.abort = abort_stage::test_check;
        return result;
    }

    // Step 6
    raw_keys keys = extract_raw_keys(game, maps, x, y, a, b, result.leak.s_rounds,
                                     result.leak.t_rounds, config.exclude_test_rounds_from_key);
    result.key_indices = std::move(keys.indices);
    result.k_alice = std::move(keys.k_alice);
    result.k_bob = std::move(keys.k_bob);

    stream_rng rng_eve = derive_rng(config.master_seed, run_index, "eve");
    result.eve_guess =
        eve_guess_key(game, maps, eve, config, result.leak, result.key_indices, rng_eve);
    return result;
}

/// Full protocol run: samples the per-round inputs, then Steps 2-6.
/// Bit-identical for identical (config, device, eve, run_index).
inline run_result run_protocol(const two_player_free_game& game, const common_bit_maps& maps,
                               const protocol_config& config, const device_runtime& device,
                               const eve_model& eve, std::uint64_t run_index = 0) {
    config.validate();
    std::vector<double> cdf_x, cdf_y;
    double acc = 0.0;
    for (const rational& p : game.alice_input_dist) cdf_x.push_back(acc += p.to_double());
    acc = 0.0;
    for (const rational& p : game.bob_input_dist) cdf_y.push_back(acc += p.to_double());

    stream_rng rng_x = derive_rng(config.master_seed, run_index, "input_x");
    stream_rng rng_y = derive_rng(config.master_seed, run_index, "input_y");
    std::vector<int> x(config.n), y(config.n);
    for (int i = 0; i < config.n; ++i) {
        x[i] = static_cast<int>(sample_index(rng_x, cdf_x));
        y[i] = static_cast<int>(sample_index(rng_y, cdf_y));
    }
    return run_protocol_given_inputs(game, maps, config, device, eve, run_index, x, y);
}

// ---------------------------------------------------------------------------
// Batched runs and summary statistics.

struct run_record {
    std::uint64_t run_index = 0;
    abort_stage abort = abort_stage::none;
    int s_size = 0;
    int t_size = 0;
    int test_wins = 0;
    int key_len = 0;
    int eve_bit_correct = 0;
    bool eve_all_correct = false;
    int key_disagreements = 0; // positions where K_A != K_B
    int losing_rounds = 0;     // over all n rounds
};

inline run_record summarize_run(std::uint64_t run_index, const run_result& r) {
    run_record rec;
    rec.run_index = run_index;
    rec.abort = r.leak.abort;
    rec.s_size = static_cast<int>(r.leak.s_rounds.size());
    rec.t_size = static_cast<int>(r.leak.t_rounds.size());
    rec.test_wins = r.leak.test_win_count;
    rec.key_len = static_cast<int>(r.key_indices.size());
    for (std::size_t i = 0; i < r.k_alice.size(); ++i) {
        if (r.eve_guess[i] == r.k_alice[i]) ++rec.eve_bit_correct;
        if (r.k_alice[i] != r.k_bob[i]) ++rec.key_disagreements;
    }
    rec.eve_all_correct = r.leak.abort == abort_stage::none &&
                          rec.eve_bit_correct == rec.key_len;
    rec.losing_rounds =
        static_cast<int>(r.per_round_wins.wins.size()) - r.per_round_wins.win_count();
    return rec;
}

struct simulation_aggregate {
    std::int64_t runs = 0;
    std::int64_t accepted = 0;
    std::int64_t aborted_size = 0;
    std::int64_t aborted_test = 0;
    std::int64_t key_bits = 0;         // over accepted runs
    std::int64_t eve_bit_correct = 0;  // over accepted runs
    std::int64_t eve_all_correct = 0;  // over accepted runs
    std::int64_t key_disagreements = 0;

    double acceptance_rate() const {
        return runs ? static_cast<double>(accepted) / static_cast<double>(runs) : 0.0;
    }
    double mean_key_len() const {
        return accepted ? static_cast<double>(key_bits) / static_cast<double>(accepted) : 0.0;
    }
    double disagreement_rate() const {
        return key_bits ? static_cast<double>(key_disagreements) / static_cast<double>(key_bits)
                        : 0.0;
    }
    double eve_bit_rate() const {
        return key_bits ? static_cast<double>(eve_bit_correct) / static_cast<double>(key_bits)
                        : 0.0;
    }
    double eve_string_rate() const {
        return accepted ? static_cast<double>(eve_all_correct) / static_cast<double>(accepted)
                        : 0.0;
    }
};

struct simulation_batch {
    std::vector<run_record> records;
    simulation_aggregate aggregate;
};

/// Runs `runs` seeded protocol executions. Per-run streams depend only on
/// (master_seed, run_index), so the worker count never changes the records.
inline simulation_batch simulate_many(const two_player_free_game& game,
                                      const common_bit_maps& maps, const protocol_config& config,
                                      const device_runtime& device, const eve_model& eve,
                                      std::int64_t runs, int workers = 1) {
    if (runs < 1) throw domain_error("simulate_many: runs must be >= 1");
    config.validate();
    simulation_batch batch;
    batch.records.resize(static_cast<std::size_t>(runs));

    const auto work = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const run_result r = run_protocol(game, maps, config, device, eve,
                                              static_cast<std::uint64_t>(i));
            batch.records[static_cast<std::size_t>(i)] =
                summarize_run(static_cast<std::uint64_t>(i), r);
        }
    };
    if (workers <= 1 || runs < 2) {
        work(0, runs);
    } else {
        const int w = std::min<std::int64_t>(workers, runs);
        std::vector<std::thread> pool;
        const std::int64_t chunk = (runs + w - 1) / w;
        for (int t = 0; t < w; ++t)
            pool.emplace_back(work, t * chunk, std::min<std::int64_t>(runs, (t + 1) * chunk));
        for (auto& th : pool) th.join();
    }

    for (const run_record& rec : batch.records) {
        ++batch.aggregate.runs;
        if (rec.abort == abort_stage::size_check) ++batch.aggregate.aborted_size;
        if (rec.abort == abort_stage::test_check) ++batch.aggregate.aborted_test;
        if (rec.abort != abort_stage::none) continue;
        ++batch.aggregate.accepted;
        batch.aggregate.key_bits += rec.key_len;
        batch.aggregate.eve_bit_correct += rec.eve_bit_correct;
        batch.aggregate.eve_all_correct += rec.eve_all_correct ? 1 : 0;
        batch.aggregate.key_disagreements += rec.key_disagreements;
    }
    return batch;
}

/// Guessing statistics over non-aborted runs, reported with the abort
/// conditioning explicit.
struct guessing_stats {
    std::int64_t runs = 0;
    std::int64_t aborted = 0;
    std::int64_t key_bits = 0;
    std::int64_t bits_correct = 0;
    std::int64_t whole_string_correct = 0;
    double per_bit_rate = 0.0;
    double whole_string_rate = 0.0;
    // -log2 of the whole-string success frequency; infinity when no run
    // guessed the entire key.
    double min_entropy_floor_bits = 0.0;
};

inline guessing_stats empirical_guessing_probability(const two_player_free_game& game,
                                                     const common_bit_maps& maps,
                                                     const protocol_config& config,
                                                     const device_runtime& device,
                                                     const eve_model& eve, std::int64_t runs,
                                                     int workers = 1) {
    if (runs < 1) throw domain_error("empirical_guessing_probability: runs must be >= 1");
    const simulation_batch batch = simulate_many(game, maps, config, device, eve, runs, workers);
    guessing_stats stats;
    stats.runs = runs;
    stats.aborted = batch.aggregate.aborted_size + batch.aggregate.aborted_test;
    if (batch.aggregate.accepted == 0)
        throw degenerate_statistics_error("all runs aborted; guessing statistics undefined");
    stats.key_bits = batch.aggregate.key_bits;
    stats.bits_correct = batch.aggregate.eve_bit_correct;
    stats.whole_string_correct = batch.aggregate.eve_all_correct;
    stats.per_bit_rate = batch.aggregate.eve_bit_rate();
    stats.whole_string_rate = batch.aggregate.eve_string_rate();
    stats.min_entropy_floor_bits =
        stats.whole_string_correct == 0
            ? std::numeric_limits<double>::infinity()
            : -std::log2(stats.whole_string_rate);
    return stats;
}

/// Toeplitz extractor over GF(2): out[i] = sum_j T[i][j] * key[j] with the
/// diagonals drawn from the seed stream. Linear in the key for a fixed seed.
inline std::vector<std::uint8_t> privacy_amplify(const std::vector<std::uint8_t>& key,
                                                 std::size_t out_len, std::uint64_t seed) {
    if (out_len > key.size())
        throw domain_error("privacy_amplify: output longer than the input key");
    if (out_len == 0) return {};
    stream_rng rng = derive_rng(seed, 0, "toeplitz");
    // diag[d] for d = j - i in [-(out_len-1), key.size()-1]
    const std::size_t diag_count = out_len - 1 + key.size();
    std::vector<std::uint8_t> diag(diag_count);
    for (auto& bit : diag) bit = static_cast<std::uint8_t>(rng() & 1ULL);
    std::vector<std::uint8_t> out(out_len, 0);
    for (std::size_t i = 0; i < out_len; ++i) {
        std::uint8_t acc = 0;
        for (std::size_t j = 0; j < key.size(); ++j)
            acc ^= static_cast<std::uint8_t>(diag[j + (out_len - 1 - i)] & key[j]);
        out[i] = acc;
    }
    return out;
}

} // namespace parqkd
