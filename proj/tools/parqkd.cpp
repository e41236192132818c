// Command-line front end: values | simulate | bounds | attack.
// Exit codes: 0 success, 2 usage, 3 theorem inapplicable, 4 I/O.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "parqkd/bounds.hpp"
#include "parqkd/games.hpp"
#include "parqkd/guessing.hpp"
#include "parqkd/protocol.hpp"
#include "parqkd/quantum.hpp"
#include "parqkd/serialize.hpp"
#include "parqkd/version.hpp"

namespace {

using namespace parqkd;

struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

constexpr int exit_ok = 0;
constexpr int exit_usage = 2;
constexpr int exit_theorem = 3;
constexpr int exit_io = 4;

int default_workers() {
    if (const char* env = std::getenv("PARQKD_WORKERS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    return 1;
}

// Outputs are accumulated in memory and flushed once, so a failed command
// never leaves a partial file behind.
void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open output path: " + path);
    out << content;
    if (!out) throw io_error("failed while writing: " + path);
}

void emit(const std::optional<std::string>& out_path, const std::string& content) {
    if (out_path) {
        write_file(*out_path, content);
    } else {
        std::cout << content;
    }
}

std::pair<two_player_free_game, common_bit_maps> load_game(const std::string& spec) {
    if (spec == "ms") return magic_square();
    std::ifstream in(spec);
    if (!in) throw io_error("cannot open game file: " + spec);
    json doc;
    in >> doc;
    return game_from_json(doc);
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

deterministic_strategy_pair best_classical_pair(const two_player_free_game& game) {
    deterministic_strategy_pair best;
    rational best_value(-1);
    enumerate_strategies(game, [&](const deterministic_strategy_pair& s) {
        const rational v = strategy_value(game, s);
        if (v > best_value) {
            best_value = v;
            best = s;
        }
    });
    return best;
}

// ---------------------------------------------------------------------------
// values

struct values_options {
    std::string game = "ms";
    std::string eta = "1/8";
    std::string condition = "bit";
    double c_star_working = default_c_star_working_value;
    std::string format = "json";
    std::optional<std::string> out;
    bool condition_given = false;
};

void check_format(const std::string& format, bool csv_allowed) {
    if (format == "json") return;
    if (format == "csv" && csv_allowed) return;
    throw domain_error("unsupported --format '" + format + "' for this subcommand");
}

int cmd_values(const values_options& opt) {
    check_format(opt.format, /*csv_allowed=*/true);
    auto [game, maps] = load_game(opt.game);
    const rational eta = parse_rational(opt.eta);

    eve_condition cond = eve_condition::guess_common_bit;
    if (opt.condition == "full") cond = eve_condition::guess_full_output;
    else if (opt.condition != "bit") throw domain_error("--eve-condition must be 'bit' or 'full'");
    if (maps.empty() && cond == eve_condition::guess_common_bit) {
        if (opt.condition_given)
            throw domain_error("game file has no common-bit maps; use --eve-condition full");
        cond = eve_condition::guess_full_output;
        std::cerr << "note: game has no common-bit maps, falling back to the full-output "
                     "guessing condition\n";
    }

    const rational omega_c = classical_value(game);
    const guessing_game gg = build_guessing_game(game, maps, eta, cond);
    const classical_guessing_result guess = classical_guessing_value_full(gg);
    const immunization_constants imm =
        c_star_bounds({{"classical optimal triple", guess.value}}, opt.c_star_working);

    std::optional<double> ideal_value;
    if (opt.game == "ms")
        ideal_value = win_probability(game, ideal_ms_strategy(), noise_model::none());

    json rep;
    rep["version"] = version_string;
    rep["game"] = opt.game;
    rep["eta"] = rational_to_json(eta);
    rep["eve_condition"] = cond == eve_condition::guess_common_bit ? "bit" : "full";
    rep["omega_c"] = {{"exact", rational_to_json(omega_c)}, {"decimal", omega_c.to_double()}};
    rep["omega_c_guessing"] = {{"exact", rational_to_json(guess.value)},
                               {"decimal", guess.value.to_double()}};
    rep["c_star_upper_bound"] = {{"exact", rational_to_json(imm.c_star_upper_bound())},
                                 {"decimal", imm.c_star_upper_bound().to_double()}};
    rep["c_star_working_value"] = imm.c_star_working_value;
    rep["omega_star_lower_bound"] = rational_to_json(imm.lower_bound_on_omega_star);
    if (ideal_value) rep["ideal_strategy_value"] = *ideal_value;

    std::ostringstream table;
    table.setf(std::ios::fixed);
    table.precision(6);
    table << "quantity                          exact      decimal\n";
    table << "omega_c(G)                        " << omega_c.str() << "        "
          << omega_c.to_double() << "\n";
    table << "omega_c(G_eta)                    " << guess.value.str() << "        "
          << guess.value.to_double() << "\n";
    table << "C* certified upper bound          " << imm.c_star_upper_bound().str() << "        "
          << imm.c_star_upper_bound().to_double() << "\n";
    table << "C* working value (config)         -          " << imm.c_star_working_value << "\n";
    if (ideal_value)
        table << "ideal entangled strategy value    -          " << *ideal_value << "\n";
    std::cout << table.str();

    if (opt.out) {
        if (opt.format == "csv") {
            std::ostringstream csv;
            csv << "# " << version_string << " game=" << opt.game << " eta=" << eta.str()
                << " eve_condition="
                << (cond == eve_condition::guess_common_bit ? "bit" : "full") << "\n";
            csv << "quantity,exact,decimal\n";
            csv << "omega_c," << omega_c.str() << "," << omega_c.to_double() << "\n";
            csv << "omega_c_guessing," << guess.value.str() << "," << guess.value.to_double()
                << "\n";
            csv << "c_star_upper_bound," << imm.c_star_upper_bound().str() << ","
                << imm.c_star_upper_bound().to_double() << "\n";
            csv << "c_star_working_value,-," << imm.c_star_working_value << "\n";
            if (ideal_value) csv << "ideal_strategy_value,-," << *ideal_value << "\n";
            emit(opt.out, csv.str());
        } else {
            emit(opt.out, rep.dump(2) + "\n");
        }
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------
// simulate

struct device_options {
    std::string device = "ideal";
    std::optional<double> q;
    std::optional<double> target_win;
};

device_model make_device(const two_player_free_game& game, const device_options& opt) {
    if (opt.device == "ideal") return ideal_quantum_device{};
    if (opt.device == "noisy") {
        if (opt.q && opt.target_win)
            throw domain_error("give either --q or --target-win, not both");
        if (opt.q) {
            if (*opt.q < 0.0 || *opt.q > 1.0) throw domain_error("--q must lie in [0,1]");
            return noisy_quantum_device{*opt.q};
        }
        if (opt.target_win)
            return noisy_quantum_device{calibrate_noise(game, ideal_ms_strategy(), *opt.target_win)};
        throw domain_error("noisy device needs --q or --target-win");
    }
    if (opt.device == "classical") return deterministic_device{best_classical_pair(game)};
    throw domain_error("unknown device kind: " + opt.device + " (ideal|noisy|classical)");
}

eve_model make_eve(const two_player_free_game& game, const std::string& kind,
                   const std::string& eve_bits, const device_model& device) {
    if (kind == "random") return random_guess_eve{};
    if (kind == "omniscient") {
        if (const auto* det = std::get_if<deterministic_device>(&device))
            return omniscient_eve{det->table};
        throw domain_error("omniscient eve requires a deterministic (classical) device");
    }
    if (kind == "predict") {
        const std::size_t cells = game.nx() * game.ny();
        if (eve_bits.size() != cells)
            throw domain_error("--eve-bits must give one bit per input pair (" +
                               std::to_string(cells) + " expected)");
        predictor_eve eve;
        for (const char c : eve_bits) {
            if (c != '0' && c != '1') throw domain_error("--eve-bits must be a 0/1 string");
            eve.bit_by_input_pair.push_back(static_cast<std::uint8_t>(c - '0'));
        }
        return eve;
    }
    throw domain_error("unknown eve kind: " + kind + " (random|predict|omniscient)");
}

struct simulate_options {
    int n = 1000;
    std::string eta = "1/8";
    std::string gamma = "1/4";
    std::string eps = "1/10";
    std::int64_t runs = 100;
    std::uint64_t seed = 0;
    device_options device;
    std::string eve = "random";
    std::string eve_bits;
    bool keep_test_rounds = false;
    bool dump_transcript = false;
    int workers = default_workers();
    std::string format = "json";
    std::optional<std::string> out;
};

protocol_config make_config(const simulate_options& opt) {
    protocol_config cfg;
    cfg.n = opt.n;
    cfg.eta = parse_rational(opt.eta);
    cfg.gamma = parse_rational(opt.gamma);
    cfg.epsilon = parse_rational(opt.eps);
    cfg.master_seed = opt.seed;
    cfg.exclude_test_rounds_from_key = !opt.keep_test_rounds;
    cfg.validate();
    return cfg;
}

int cmd_simulate(const simulate_options& opt) {
    check_format(opt.format, /*csv_allowed=*/true);
    auto [game, maps] = magic_square();
    const protocol_config cfg = make_config(opt);
    const device_model dmodel = make_device(game, opt.device);
    const eve_model emodel = make_eve(game, opt.eve, opt.eve_bits, dmodel);
    const device_runtime runtime(game, dmodel);

    const simulation_batch batch =
        simulate_many(game, maps, cfg, runtime, emodel, opt.runs, opt.workers);

    const std::string hash = config_hash(cfg);
    std::cerr << "runs=" << batch.aggregate.runs << " accepted=" << batch.aggregate.accepted
              << " acceptance_rate=" << batch.aggregate.acceptance_rate()
              << " mean_key_len=" << batch.aggregate.mean_key_len()
              << " eve_bit_rate=" << batch.aggregate.eve_bit_rate() << "\n";

    if (opt.format == "csv") {
        std::ostringstream csv;
        csv << "# " << version_string << " device=" << device_description(dmodel)
            << " eve=" << eve_description(emodel) << " config=" << config_to_json(cfg).dump()
            << " config_hash=" << hash << "\n";
        csv << "run,abort_stage,s_size,t_size,test_wins,key_len,eve_bit_correct,"
               "eve_all_correct,key_disagreements,losing_rounds\n";
        for (const run_record& r : batch.records) {
            csv << r.run_index << "," << abort_stage_name(r.abort) << "," << r.s_size << ","
                << r.t_size << "," << r.test_wins << "," << r.key_len << ","
                << r.eve_bit_correct << "," << (r.eve_all_correct ? 1 : 0) << ","
                << r.key_disagreements << "," << r.losing_rounds << "\n";
        }
        emit(opt.out, csv.str());
        return exit_ok;
    }
    json doc;
    doc["version"] = version_string;
    doc["config"] = config_to_json(cfg);
    doc["config_hash"] = hash;
    doc["device"] = device_description(dmodel);
    doc["eve"] = eve_description(emodel);
    doc["records"] = json::array();
    for (const run_record& r : batch.records) doc["records"].push_back(run_record_to_json(r, hash));
    doc["aggregate"] = aggregate_to_json(batch.aggregate);

    if (opt.dump_transcript) {
        doc["transcripts"] = json::array();
        for (std::int64_t i = 0; i < opt.runs; ++i) {
            const run_result r = run_protocol(game, maps, cfg, runtime, emodel,
                                              static_cast<std::uint64_t>(i));
            json t;
            t["run"] = i;
            t["S"] = r.leak.s_rounds;
            t["x_S"] = r.leak.x_s;
            t["y_S"] = r.leak.y_s;
            t["T"] = r.leak.t_rounds;
            t["a_T"] = r.leak.a_t;
            t["b_T"] = r.leak.b_t;
            t["abort_stage"] = abort_stage_name(r.leak.abort);
            doc["transcripts"].push_back(std::move(t));
        }
    }

    emit(opt.out, doc.dump(2) + "\n");
    return exit_ok;
}

// ---------------------------------------------------------------------------
// bounds

struct bounds_options {
    std::string n = "1000";
    std::string eps = "1/20";
    std::string gamma = "1/4";
    std::string c_star = "0.01";
    std::string p_a = "1";
    bound_constants constants;
    std::string format = "json";
    std::optional<std::string> attach;
    std::optional<std::string> out;
};

std::int64_t parse_count(const std::string& text) {
    // accepts 1000, 1e6, 2.5e3 and the like
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size() || v < 0 || v > 9e15 || v != std::floor(v))
            throw domain_error("bad count");
        return static_cast<std::int64_t>(v);
    } catch (const std::exception&) {
        throw domain_error("cannot parse a round count from '" + text + "'");
    }
}

int cmd_bounds(const bounds_options& opt) {
    check_format(opt.format, /*csv_allowed=*/false);
    const std::int64_t n = parse_count(opt.n);
    const double eps = parse_rational(opt.eps).to_double();
    const double gamma = parse_rational(opt.gamma).to_double();
    const double c_star = parse_rational(opt.c_star).to_double();
    const double p_a = parse_rational(opt.p_a).to_double();

    const bound_report report = min_entropy_bound(n, eps, gamma, p_a, c_star, opt.constants);
    json doc;

    if (opt.attach) {
        std::ifstream in(*opt.attach);
        if (!in) throw io_error("cannot open run record file: " + *opt.attach);
        json runs_doc;
        in >> runs_doc;
        protocol_config cfg;
        cfg.n = runs_doc.at("config").at("n").get<int>();
        cfg.eta = rational_from_json(runs_doc.at("config").at("eta"));
        cfg.gamma = rational_from_json(runs_doc.at("config").at("gamma"));
        cfg.epsilon = rational_from_json(runs_doc.at("config").at("epsilon"));
        cfg.master_seed = runs_doc.at("config").at("master_seed").get<std::uint64_t>();
        cfg.exclude_test_rounds_from_key =
            runs_doc.at("config").at("exclude_test_rounds_from_key").get<bool>();
        const std::string recorded_hash = runs_doc.at("config_hash").get<std::string>();
        if (cfg.n != n || cfg.epsilon.to_double() != eps || cfg.gamma.to_double() != gamma)
            throw consistency_error("bound inputs (n, eps, gamma) do not match the attached runs");
        const simulation_aggregate stats = aggregate_from_json(runs_doc.at("aggregate"));
        const theorem_report rep = make_theorem_report(cfg, p_a, c_star, opt.constants, stats,
                                                       recorded_hash, config_hash(cfg));
        doc = theorem_report_to_json(rep);

        std::ostringstream table;
        table << "quantity                 analytic                empirical\n";
        for (const auto& row : rep.rows) {
            table << row.quantity << ": " << row.analytic << " (" << row.analytic_kind << ") vs "
                  << row.empirical << " (" << row.empirical_kind << ")\n";
        }
        for (const auto& note : rep.notes) table << "note: " << note << "\n";
        std::cerr << table.str();
    } else {
        doc = bound_report_to_json(report);
    }

    emit(opt.out, doc.dump(2) + "\n");
    std::cerr << "h_min_bound_bits=" << report.h_min_bound << " epsilon_s=" << report.epsilon_s
              << " tau_star=" << report.tau_star << " delta=" << report.delta << "\n";
    return exit_ok;
}

// ---------------------------------------------------------------------------
// attack

struct attack_options {
    std::string devices = "ideal,classical";
    std::string eves = "random";
    std::string eps_list = "1/20";
    std::string n_list = "200,2000";
    std::string eta = "1/8";
    std::string gamma = "1/4";
    double target_win = 0.975;
    std::int64_t runs = 100;
    std::uint64_t seed = 0;
    int workers = default_workers();
    std::string format = "csv";
    std::optional<std::string> out;
};

int cmd_attack(const attack_options& opt) {
    check_format(opt.format, /*csv_allowed=*/true);
    auto [game, maps] = magic_square();
    const auto devices = split_list(opt.devices);
    const auto eves = split_list(opt.eves);
    const auto eps_values = split_list(opt.eps_list);
    const auto n_values = split_list(opt.n_list);
    if (devices.empty() || eves.empty() || eps_values.empty() || n_values.empty())
        throw domain_error("attack grid is empty");

    struct cell {
        std::string device, eve, eps;
        std::int64_t n = 0;
        simulation_aggregate agg;
        bool skipped = false;
    };
    std::vector<cell> cells;
    for (const auto& dev : devices)
        for (const auto& eve : eves)
            for (const auto& eps : eps_values)
                for (const auto& n : n_values)
                    cells.push_back({dev, eve, eps, parse_count(n), {}, false});

    // Validate the whole grid before running anything.
    for (auto& c : cells) {
        device_options dopt;
        dopt.device = c.device;
        if (c.device == "noisy") dopt.target_win = opt.target_win;
        const device_model dmodel = make_device(game, dopt);
        if (c.eve == "omniscient" && !std::holds_alternative<deterministic_device>(dmodel))
            c.skipped = true;
        else
            make_eve(game, c.eve, "", dmodel); // throws on unknown kinds
        parse_rational(c.eps);
        if (c.n < 1) throw domain_error("attack: n must be >= 1");
    }

    for (auto& c : cells) {
        if (c.skipped) continue;
        device_options dopt;
        dopt.device = c.device;
        if (c.device == "noisy") dopt.target_win = opt.target_win;
        const device_model dmodel = make_device(game, dopt);
        const eve_model emodel = make_eve(game, c.eve, "", dmodel);
        const device_runtime runtime(game, dmodel);
        protocol_config cfg;
        cfg.n = static_cast<int>(c.n);
        cfg.eta = parse_rational(opt.eta);
        cfg.gamma = parse_rational(opt.gamma);
        cfg.epsilon = parse_rational(c.eps);
        cfg.master_seed = opt.seed;
        cfg.validate();
        c.agg = simulate_many(game, maps, cfg, runtime, emodel, opt.runs, opt.workers).aggregate;
    }

    if (opt.format == "json") {
        json doc;
        doc["version"] = version_string;
        doc["seed"] = opt.seed;
        doc["runs"] = opt.runs;
        doc["eta"] = opt.eta;
        doc["gamma"] = opt.gamma;
        doc["target_win"] = opt.target_win;
        doc["cells"] = json::array();
        for (const auto& c : cells) {
            json cell;
            cell["device"] = c.device;
            cell["eve"] = c.eve;
            cell["eps"] = c.eps;
            cell["n"] = c.n;
            cell["status"] = c.skipped ? "skipped_incompatible" : "ok";
            if (!c.skipped) cell["aggregate"] = aggregate_to_json(c.agg);
            doc["cells"].push_back(std::move(cell));
        }
        emit(opt.out, doc.dump(2) + "\n");
        return exit_ok;
    }

    std::ostringstream csv;
    csv << "# " << version_string << " seed=" << opt.seed << " runs=" << opt.runs
        << " eta=" << opt.eta << " gamma=" << opt.gamma << " target_win=" << opt.target_win
        << "\n";
    csv << "device,eve,eps,n,runs,accepted,acceptance_rate,key_bits,eve_bit_correct,"
           "eve_bit_rate,eve_string_rate,status\n";
    for (const auto& c : cells) {
        if (c.skipped) {
            csv << c.device << "," << c.eve << "," << c.eps << "," << c.n
                << ",0,0,0,0,0,0,0,skipped_incompatible\n";
            continue;
        }
        csv << c.device << "," << c.eve << "," << c.eps << "," << c.n << "," << c.agg.runs << ","
            << c.agg.accepted << "," << c.agg.acceptance_rate() << "," << c.agg.key_bits << ","
            << c.agg.eve_bit_correct << "," << c.agg.eve_bit_rate() << ","
            << c.agg.eve_string_rate() << ",ok\n";
    }
    emit(opt.out, csv.str());
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(version_string) +
                 " - magic-square parallel DIQKD simulator and bound calculator"};
    app.require_subcommand(1);

    values_options vopt;
    auto* values = app.add_subcommand("values", "exact game and guessing-game values");
    values->add_option("--game", vopt.game, "'ms' or a path to a game JSON document");
    values->add_option("--eta", vopt.eta, "anchor probability, as p/q");
    auto* cond_opt =
        values->add_option("--eve-condition", vopt.condition, "'bit' or 'full' guessing rule");
    values->add_option("--cstar", vopt.c_star_working, "working value for the gap constant");
    values->add_option("--format", vopt.format, "json | csv");
    std::string vout;
    auto* vout_opt = values->add_option("--out", vout, "write the JSON report here");

    simulate_options sopt;
    auto* simulate = app.add_subcommand("simulate", "run the protocol with seeded randomness");
    simulate->add_option("--n", sopt.n, "rounds per run")->check(CLI::PositiveNumber);
    simulate->add_option("--eta", sopt.eta, "unleaked-round probability, p/q");
    simulate->add_option("--gamma", sopt.gamma, "test fraction, p/q");
    simulate->add_option("--eps", sopt.eps, "test tolerance, p/q");
    simulate->add_option("--runs", sopt.runs, "number of seeded runs")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sopt.seed, "master seed");
    simulate->add_option("--device", sopt.device.device, "ideal | noisy | classical");
    double sim_q = -1.0, sim_target = -1.0;
    auto* qopt = simulate->add_option("--q", sim_q, "depolarizing parameter for --device noisy");
    auto* topt = simulate->add_option("--target-win", sim_target,
                                      "per-round win probability for --device noisy");
    simulate->add_option("--eve", sopt.eve, "random | predict | omniscient");
    simulate->add_option("--eve-bits", sopt.eve_bits, "predictor table for --eve predict");
    simulate->add_flag("--keep-test-rounds", sopt.keep_test_rounds,
                       "keep test rounds in the raw key");
    simulate->add_flag("--transcript", sopt.dump_transcript, "dump full leaked transcripts");
    simulate->add_option("--workers", sopt.workers, "worker threads");
    simulate->add_option("--format", sopt.format, "json | csv");
    std::string sout;
    auto* sout_opt = simulate->add_option("--out", sout, "write the run-record JSON here");

    bounds_options bopt;
    auto* bounds = app.add_subcommand("bounds", "evaluate the analytic bounds");
    bounds->add_option("--n", bopt.n, "number of rounds (1e6 accepted)");
    bounds->add_option("--eps", bopt.eps, "test tolerance");
    bounds->add_option("--gamma", bopt.gamma, "test fraction");
    bounds->add_option("--cstar", bopt.c_star, "gap constant working value");
    bounds->add_option("--pa", bopt.p_a, "probability of the conditioning event");
    bounds->add_option("--conc-constant", bopt.constants.conc_constant, "concentration exponent");
    bounds->add_option("--rep-constant", bopt.constants.rep_constant, "repetition exponent");
    bounds->add_option("--leak-constant", bopt.constants.leak_constant, "leak bits per test round");
    bounds->add_option("--honest-constant", bopt.constants.honest_constant, "acceptance exponent");
    bounds->add_option("--format", bopt.format, "json");
    std::string battach, bout;
    auto* battach_opt = bounds->add_option("--attach", battach, "run-record file to compare with");
    auto* bout_opt = bounds->add_option("--out", bout, "write the report JSON here");

    attack_options aopt;
    auto* attack = app.add_subcommand("attack", "sweep device/eve/eps/n grid to CSV");
    attack->add_option("--devices", aopt.devices, "comma list: ideal,noisy,classical");
    attack->add_option("--eves", aopt.eves, "comma list: random,predict,omniscient");
    attack->add_option("--eps", aopt.eps_list, "comma list of tolerances");
    attack->add_option("--n", aopt.n_list, "comma list of round counts");
    attack->add_option("--eta", aopt.eta, "unleaked-round probability, p/q");
    attack->add_option("--gamma", aopt.gamma, "test fraction, p/q");
    attack->add_option("--target-win", aopt.target_win, "calibration for noisy devices");
    attack->add_option("--runs", aopt.runs, "runs per grid cell")->check(CLI::PositiveNumber);
    attack->add_option("--seed", aopt.seed, "master seed");
    attack->add_option("--workers", aopt.workers, "worker threads");
    attack->add_option("--format", aopt.format, "csv | json");
    std::string aout;
    auto* aout_opt = attack->add_option("--out", aout, "write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (values->parsed()) {
            vopt.condition_given = cond_opt->count() > 0;
            if (vout_opt->count() > 0) vopt.out = vout;
            return cmd_values(vopt);
        }
        if (simulate->parsed()) {
            if (qopt->count() > 0) sopt.device.q = sim_q;
            if (topt->count() > 0) sopt.device.target_win = sim_target;
            if (sout_opt->count() > 0) sopt.out = sout;
            return cmd_simulate(sopt);
        }
        if (bounds->parsed()) {
            if (battach_opt->count() > 0) bopt.attach = battach;
            if (bout_opt->count() > 0) bopt.out = bout;
            return cmd_bounds(bopt);
        }
        if (attack->parsed()) {
            if (aout_opt->count() > 0) aopt.out = aout;
            return cmd_attack(aopt);
        }
    } catch (const theorem_inapplicable_error& e) {
        std::cerr << "theorem inapplicable: " << e.what() << "\n";
        return exit_theorem;
    } catch (const io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return exit_io;
    } catch (const domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const capacity_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const consistency_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
