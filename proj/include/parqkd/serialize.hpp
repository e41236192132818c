#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <utility>

#include <json.hpp>

#include "parqkd/bounds.hpp"
#include "parqkd/games.hpp"
#include "parqkd/guessing.hpp"
#include "parqkd/protocol.hpp"
#include "parqkd/rational.hpp"
#include "parqkd/repetition.hpp"
#include "parqkd/version.hpp"

namespace parqkd {

using json = nlohmann::ordered_json;

inline json rational_to_json(const rational& r) { return json::array({r.num(), r.den()}); }

inline rational rational_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2)
        throw domain_error("rational: expected a [numerator, denominator] pair");
    return rational(j[0].get<std::int64_t>(), j[1].get<std::int64_t>());
}

// ---------------------------------------------------------------------------
// Game documents: sets as string arrays, distributions as num/den pairs,
// predicate as an explicit truth table in row-major (x, y, a, b) order.

inline json game_to_json(const two_player_free_game& g, const common_bit_maps* maps = nullptr) {
    json j;
    j["alice_inputs"] = g.alice_inputs;
    j["bob_inputs"] = g.bob_inputs;
    j["alice_outputs"] = g.alice_outputs;
    j["bob_outputs"] = g.bob_outputs;
    j["alice_input_dist"] = json::array();
    for (const auto& p : g.alice_input_dist) j["alice_input_dist"].push_back(rational_to_json(p));
    j["bob_input_dist"] = json::array();
    for (const auto& p : g.bob_input_dist) j["bob_input_dist"].push_back(rational_to_json(p));
    j["predicate"] = g.predicate;
    if (maps != nullptr && !maps->empty()) {
        j["common_bits"] = json{{"f", maps->f}, {"g", maps->g}};
    }
    return j;
}

inline std::pair<two_player_free_game, common_bit_maps> game_from_json(const json& j) {
    two_player_free_game g;
    g.alice_inputs = j.at("alice_inputs").get<std::vector<std::string>>();
    g.bob_inputs = j.at("bob_inputs").get<std::vector<std::string>>();
    g.alice_outputs = j.at("alice_outputs").get<std::vector<std::string>>();
    g.bob_outputs = j.at("bob_outputs").get<std::vector<std::string>>();
    for (const auto& p : j.at("alice_input_dist")) g.alice_input_dist.push_back(rational_from_json(p));
    for (const auto& p : j.at("bob_input_dist")) g.bob_input_dist.push_back(rational_from_json(p));
    g.predicate = j.at("predicate").get<std::vector<std::uint8_t>>();
    g.validate();
    common_bit_maps maps;
    if (j.contains("common_bits")) {
        maps.f = j["common_bits"].at("f").get<std::vector<std::uint8_t>>();
        maps.g = j["common_bits"].at("g").get<std::vector<std::uint8_t>>();
        if (!maps.consistent_with(g))
            throw domain_error("game document: common-bit maps violate the matching law");
    }
    return {std::move(g), std::move(maps)};
}

// ---------------------------------------------------------------------------

inline json config_to_json(const protocol_config& c) {
    json j;
    j["n"] = c.n;
    j["eta"] = rational_to_json(c.eta);
    j["gamma"] = rational_to_json(c.gamma);
    j["epsilon"] = rational_to_json(c.epsilon);
    j["master_seed"] = c.master_seed;
    j["exclude_test_rounds_from_key"] = c.exclude_test_rounds_from_key;
    return j;
}

/// FNV-1a over the canonical config document; ties run records to the
/// bound reports that quote them.
inline std::string config_hash(const protocol_config& c) {
    const std::string dump = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char ch : dump) {
        h ^= static_cast<unsigned char>(ch);
        h *= 0x100000001b3ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json run_record_to_json(const run_record& r, const std::string& cfg_hash) {
    json j;
    j["config_hash"] = cfg_hash;
    j["run"] = r.run_index;
    j["abort_stage"] = abort_stage_name(r.abort);
    j["s_size"] = r.s_size;
    j["t_size"] = r.t_size;
    j["test_wins"] = r.test_wins;
    j["key_len"] = r.key_len;
    j["eve_bit_correct"] = r.eve_bit_correct;
    j["eve_all_correct"] = r.eve_all_correct;
    j["key_disagreements"] = r.key_disagreements;
    j["losing_rounds"] = r.losing_rounds;
    return j;
}

inline json aggregate_to_json(const simulation_aggregate& a) {
    json j;
    j["runs"] = a.runs;
    j["accepted"] = a.accepted;
    j["aborted_size"] = a.aborted_size;
    j["aborted_test"] = a.aborted_test;
    j["acceptance_rate"] = a.acceptance_rate();
    j["mean_key_len"] = a.mean_key_len();
    j["key_bits"] = a.key_bits;
    j["key_disagreements"] = a.key_disagreements;
    j["disagreement_rate"] = a.disagreement_rate();
    j["eve_bit_correct"] = a.eve_bit_correct;
    j["eve_bit_rate"] = a.eve_bit_rate();
    j["eve_all_correct"] = a.eve_all_correct;
    j["eve_string_rate"] = a.eve_string_rate();
    return j;
}

inline simulation_aggregate aggregate_from_json(const json& j) {
    simulation_aggregate a;
    a.runs = j.at("runs").get<std::int64_t>();
    a.accepted = j.at("accepted").get<std::int64_t>();
    a.aborted_size = j.at("aborted_size").get<std::int64_t>();
    a.aborted_test = j.at("aborted_test").get<std::int64_t>();
    a.key_bits = j.at("key_bits").get<std::int64_t>();
    a.eve_bit_correct = j.at("eve_bit_correct").get<std::int64_t>();
    a.eve_all_correct = j.at("eve_all_correct").get<std::int64_t>();
    a.key_disagreements = j.at("key_disagreements").get<std::int64_t>();
    return a;
}

inline json constants_to_json(const bound_constants& c) {
    json j;
    j["conc_constant"] = c.conc_constant;
    j["rep_constant"] = c.rep_constant;
    j["leak_constant"] = c.leak_constant;
    j["honest_constant"] = c.honest_constant;
    return j;
}

inline json bound_report_to_json(const bound_report& r) {
    json j;
    j["version"] = version_string;
    j["inputs"] = {{"n", r.n},     {"epsilon", r.epsilon}, {"gamma", r.gamma},
                   {"p_a", r.p_a}, {"c_star", r.c_star}};
    j["constants"] = constants_to_json(r.constants);
    j["delta"] = r.delta;
    j["tau_star"] = r.tau_star;
    j["log_tau_star"] = r.log_tau_star;
    j["h_min_bound_bits"] = r.h_min_bound;
    j["epsilon_s"] = r.epsilon_s;
    return j;
}

inline json theorem_report_to_json(const theorem_report& r) {
    json j = bound_report_to_json(r.bounds);
    j["honest_acceptance_bound"] = r.honest_bound;
    j["empirical"] = aggregate_to_json(r.stats);
    j["comparison"] = json::array();
    for (const auto& row : r.rows) {
        json cell = {{"quantity", row.quantity},
                     {"analytic", row.analytic},
                     {"analytic_kind", row.analytic_kind},
                     {"empirical", row.empirical},
                     {"empirical_kind", row.empirical_kind}};
        if (!std::isfinite(row.empirical)) cell["empirical"] = "inf";
        j["comparison"].push_back(std::move(cell));
    }
    j["notes"] = r.notes;
    return j;
}

inline json threshold_estimate_to_json(const threshold_estimate& e) {
    json j;
    j["n"] = e.n;
    j["t"] = rational_to_json(e.t);
    j["trials"] = e.trials;
    j["wins"] = e.wins;
    j["estimate"] = e.estimate;
    j["ci_low"] = e.ci_low;
    j["ci_high"] = e.ci_high;
    j["seed"] = e.seed;
    return j;
}

} // namespace parqkd
