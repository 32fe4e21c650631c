#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "srb/classifier.hpp"
#include "srb/errors.hpp"
#include "srb/market.hpp"
#include "srb/orbit_engine.hpp"
#include "srb/parallel.hpp"
#include "srb/serialize.hpp"
#include "srb/stats.hpp"

namespace srb::cli {

namespace {

using nlohmann::json;

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    json config;
    try {
        in >> config;
    } catch (const json::exception& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
    if (!config.is_object()) throw ValidationError("config root must be a JSON object");
    return config;
}

// flags win over config fields
json effective_config(const Options& options) {
    json config = load_config(options.config_path);
    config["command"] = options.command;
    if (options.command == "example") config["example"] = options.example_name;
    if (options.seed) config["seed"] = *options.seed;
    if (options.steps) config["steps"] = *options.steps;
    if (options.paths) config["paths"] = *options.paths;
    if (options.grid) config["grid"] = *options.grid;
    return config;
}

template <typename T>
T field_or(const json& config, const char* key, T fallback) {
    if (!config.contains(key)) return fallback;
    try {
        return config.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config field '") + key + "' has the wrong type");
    }
}

std::vector<double> double_vector(const json& value, const std::string& where) {
    if (!value.is_array()) throw ValidationError(where + " must be an array of numbers");
    std::vector<double> out;
    out.reserve(value.size());
    for (const auto& item : value) {
        if (!item.is_number()) throw ValidationError(where + " must contain only numbers");
        out.push_back(item.get<double>());
    }
    return out;
}

MonotoneMap parse_map(const json& spec, const std::string& where) {
    if (!spec.is_object() || !spec.contains("kind")) {
        throw ValidationError(where + ": map record needs a \"kind\" tag");
    }
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "power") {
        if (!spec.contains("beta")) throw ValidationError(where + ": power map needs \"beta\"");
        return MonotoneMap::power(spec.at("beta").get<double>());
    }
    if (kind == "piecewise") {
        if (!spec.contains("breaks") || !spec.contains("coeffs")) {
            throw ValidationError(where + ": piecewise map needs \"breaks\" and \"coeffs\"");
        }
        std::vector<std::vector<double>> coeffs;
        for (std::size_t i = 0; i < spec.at("coeffs").size(); ++i) {
            coeffs.push_back(double_vector(spec.at("coeffs").at(i),
                                           where + ".coeffs[" + std::to_string(i) + "]"));
        }
        return MonotoneMap::piecewise(double_vector(spec.at("breaks"), where + ".breaks"),
                                      std::move(coeffs));
    }
    if (kind == "market") {
        for (const char* key : {"R", "lambda1", "lambda2"}) {
            if (!spec.contains(key)) {
                throw ValidationError(where + ": market map needs \"" + std::string(key) + "\"");
            }
        }
        return MonotoneMap::market(double_vector(spec.at("R"), where + ".R"),
                                   double_vector(spec.at("lambda1"), where + ".lambda1"),
                                   double_vector(spec.at("lambda2"), where + ".lambda2"));
    }
    if (kind == "identity") return MonotoneMap::identity();
    throw ValidationError(where + ": unknown map kind \"" + kind + "\"");
}

IFSystem parse_ifs(const json& config) {
    if (!config.contains("ifs")) throw ValidationError("config needs an \"ifs\" section");
    const auto& section = config.at("ifs");
    if (!section.is_object() || !section.contains("maps") || !section.contains("p")) {
        throw ValidationError("\"ifs\" needs \"maps\" and \"p\"");
    }
    std::vector<MonotoneMap> maps;
    for (std::size_t i = 0; i < section.at("maps").size(); ++i) {
        maps.push_back(parse_map(section.at("maps").at(i), "ifs.maps[" + std::to_string(i) + "]"));
    }
    return IFSystem(std::move(maps), double_vector(section.at("p"), "ifs.p"));
}

struct MarketSetup {
    MarketModel model;
    std::vector<Strategy> strategies;
    std::vector<double> initial_wealth;
};

MarketSetup parse_market(const json& config) {
    if (!config.contains("market")) throw ValidationError("config needs a \"market\" section");
    const auto& section = config.at("market");
    for (const char* key : {"D", "p", "strategies"}) {
        if (!section.contains(key)) {
            throw ValidationError("\"market\" needs \"" + std::string(key) + "\"");
        }
    }
    std::vector<std::vector<double>> payoffs;
    for (std::size_t k = 0; k < section.at("D").size(); ++k) {
        payoffs.push_back(double_vector(section.at("D").at(k), "market.D[" + std::to_string(k) + "]"));
    }
    MarketModel model(std::move(payoffs), double_vector(section.at("p"), "market.p"));
    if (section.contains("K") && section.at("K").get<int>() != model.assets()) {
        throw ValidationError("market.K does not match the payoff matrix rows");
    }
    if (section.contains("L") && section.at("L").get<int>() != model.states()) {
        throw ValidationError("market.L does not match the payoff matrix columns");
    }
    std::vector<Strategy> strategies;
    for (std::size_t i = 0; i < section.at("strategies").size(); ++i) {
        strategies.emplace_back(double_vector(section.at("strategies").at(i),
                                              "market.strategies[" + std::to_string(i) + "]"));
    }
    std::vector<double> wealth(strategies.size(), 1.0);
    if (section.contains("w0")) wealth = double_vector(section.at("w0"), "market.w0");
    return {std::move(model), std::move(strategies), std::move(wealth)};
}

class ArtifactWriter {
public:
    ArtifactWriter(std::string out_dir, const json& config)
        : dir_(std::move(out_dir)), hash_(config_hash_hex(config.dump())) {
        std::filesystem::create_directories(dir_);
    }

    void json_file(const std::string& name, json payload) const {
        payload["config_hash"] = hash_;
        payload["tool_version"] = kToolVersion;
        std::ofstream out(dir_ + "/" + name);
        if (!out) throw ValidationError("cannot write artifact: " + name);
        out << payload.dump(2) << "\n";
    }

    template <typename Fn>
    void csv_file(const std::string& name, Fn&& fill) const {
        std::ofstream out(dir_ + "/" + name);
        if (!out) throw ValidationError("cannot write artifact: " + name);
        out << "# config_hash=" << hash_ << " tool_version=" << kToolVersion << "\n";
        fill(out);
    }

    void text_file(const std::string& name, const std::string& body) const {
        std::ofstream out(dir_ + "/" + name);
        if (!out) throw ValidationError("cannot write artifact: " + name);
        out << "# config_hash=" << hash_ << " tool_version=" << kToolVersion << "\n" << body;
    }

private:
    std::string dir_;
    std::string hash_;
};

void run_simulate(const json& config, const ArtifactWriter& artifacts) {
    const auto ifs = parse_ifs(config);
    const double r0 = field_or(config, "r0", 0.5);
    const int steps = field_or(config, "steps", 10000);
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);
    const int paths = field_or(config, "paths", 1);
    if (paths < 1) throw ValidationError("paths must be at least 1");

    const auto orbit = sample_orbit(ifs, r0, steps, seed, 0);
    artifacts.csv_file("orbit.csv", [&](std::ostream& os) { write_orbit_csv(os, orbit); });

    json verdicts = json::array();
    int converging = 0;
    for (int k = 0; k < paths; ++k) {
        const auto path_orbit =
            k == 0 ? orbit : sample_orbit(ifs, r0, steps, seed, static_cast<std::uint64_t>(k));
        const auto verdict = detect_limit(path_orbit);
        converging += verdict.kind == LimitVerdict::Kind::ConvergesTo;
        if (k < 32) verdicts.push_back(to_json(verdict));
    }
    const auto measure = empirical_measure(orbit);
    artifacts.json_file("simulate_summary.json",
                        {{"r0", r0},
                         {"steps", steps},
                         {"seed", seed},
                         {"paths", paths},
                         {"converging_paths", converging},
                         {"path_verdicts", verdicts},
                         {"mass_near_zero", measure.mass_near(0.0, 1e-3)},
                         {"mass_near_one", measure.mass_near(1.0, 1e-3)}});
}

void run_classify(const json& config, const ArtifactWriter& artifacts) {
    const auto ifs = parse_ifs(config);
    const auto report = classify(ifs, field_or(config, "grid", 10000));
    artifacts.json_file("classification.json", to_json(report));
    artifacts.csv_file("drift.csv", [&](std::ostream& os) { write_drift_csv(os, report.drift); });
    std::ostringstream down, up;
    write_graph_edge_list(down, report.g_down);
    write_graph_edge_list(up, report.g_up);
    artifacts.text_file("graph_down.txt", down.str());
    artifacts.text_file("graph_up.txt", up.str());
}

void run_basin(const json& config, const ArtifactWriter& artifacts, unsigned threads) {
    const auto ifs = parse_ifs(config);
    const double target = field_or(config, "target", 0.0);
    const int grid = field_or(config, "grid", 101);
    const int seeds_per_point = field_or(config, "seeds_per_point", 50);
    const int steps = field_or(config, "steps", 10000);
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);

    const auto scan = scan_basin(ifs, target, grid, seeds_per_point, steps, seed, 0.99, threads);
    artifacts.csv_file("basin.csv", [&](std::ostream& os) { write_basin_csv(os, scan); });
    json summary = to_json(scan);
    summary["seeds_per_point"] = seeds_per_point;
    summary["steps"] = steps;
    summary["seed"] = seed;
    artifacts.json_file("basin_summary.json", std::move(summary));
}

void run_market(const json& config, const ArtifactWriter& artifacts) {
    auto setup = parse_market(config);
    const int steps = field_or(config, "steps", 10000);
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);

    const auto path = simulate_market(setup.model, setup.strategies, setup.initial_wealth, steps,
                                      seed, 0);
    artifacts.csv_file("market.csv", [&](std::ostream& os) { write_market_csv(os, path); });

    json grades = json::array();
    for (std::size_t i = 0; i < setup.strategies.size(); ++i) {
        const auto grade = grade_outcome(share_trajectory(path, static_cast<int>(i)));
        json entry = to_json(grade);
        entry["investor"] = i + 1;
        grades.push_back(std::move(entry));
    }
    // wealths are reconstructed from the final payoff column for reporting;
    // the simulation state itself is the share vector
    const int last_state = path.symbols.back();
    double total_wealth = 0.0;
    for (int k = 0; k < setup.model.assets(); ++k) {
        total_wealth +=
            setup.model.payoff_matrix()[static_cast<std::size_t>(k)][static_cast<std::size_t>(last_state)];
    }
    json final_wealths = json::array();
    for (double share : path.shares.back()) final_wealths.push_back(share * total_wealth);
    json summary = {{"steps", steps},
                    {"seed", seed},
                    {"investors", setup.strategies.size()},
                    {"relative_rank", setup.model.relative_rank()},
                    {"final_total_wealth", total_wealth},
                    {"final_wealths", final_wealths},
                    {"grades", grades}};
    if (setup.strategies.size() == 2) {
        const auto star = kelly_rule(setup.model);
        const auto check =
            generalized_kelly_check(setup.strategies[0], setup.strategies[1], star.weights());
        summary["kelly"] = {{"rule", std::vector<double>(star.weights().begin(), star.weights().end())},
                            {"termwise_ok", check.termwise_ok},
                            {"aggregate_ok", check.aggregate_ok},
                            {"aggregate", check.aggregate}};
    }
    artifacts.json_file("market_summary.json", std::move(summary));
}

void run_arcsine(const json& config, const ArtifactWriter& artifacts) {
    const json section = config.contains("arcsine") ? config.at("arcsine") : json::object();
    const int paths = field_or(config, "paths", field_or(section, "paths", 2000));
    const double n = field_or(section, "n", 10000.0);
    const int length = field_or(section, "length", static_cast<int>(3.0 * n));
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);
    const double a = field_or(section, "a", 0.25);

    const auto summary = coin_flip_arcsine(static_cast<std::size_t>(paths),
                                           static_cast<std::size_t>(length), n, seed);
    artifacts.csv_file("arcsine.csv",
                       [&](std::ostream& os) { write_arcsine_csv(os, summary, n); });
    const auto bound = positive_fraction_bound(summary.samples, a, 1.0, 1.0);
    json payload = to_json(summary);
    payload["n"] = n;
    payload["seed"] = seed;
    payload["positive_fraction"] = {{"a", bound.a},
                                    {"empirical_probability", bound.empirical_probability},
                                    {"bound", bound.bound},
                                    {"satisfied", bound.empirical_probability >= bound.bound}};
    artifacts.json_file("arcsine_summary.json", std::move(payload));
}

// --- built-in demonstration scenarios ----------------------------------------

IFSystem two_attractor_demo(double p1) {
    std::vector<MonotoneMap> maps;
    maps.push_back(MonotoneMap::piecewise({0.0, 1.0 / 3.0, 1.0},
                                          {{0.0, 0.0, 3.0}, {-0.5, 3.0, -1.5}}));
    maps.push_back(MonotoneMap::piecewise({0.0, 2.0 / 3.0, 1.0},
                                          {{0.0, 0.0, 1.5}, {-2.0, 6.0, -3.0}}));
    return IFSystem(std::move(maps), {p1, 1.0 - p1});
}

IFSystem square_root_demo(double p1) {
    std::vector<MonotoneMap> maps;
    maps.push_back(MonotoneMap::power(2.0));
    maps.push_back(MonotoneMap::power(0.5));
    return IFSystem(std::move(maps), {p1, 1.0 - p1});
}

std::string status_line(const ClassificationReport& report, double location,
                        MeasureStatus expected) {
    for (const auto& c : report.candidates) {
        if (c.point_mass && std::abs(c.location - location) <= 1e-9) {
            std::ostringstream os;
            os << "delta_" << location << ": " << measure_status_name(c.status) << " via "
               << (c.rule.empty() ? "(none)" : c.rule)
               << (c.status == expected ? "  [as predicted]" : "  [MISMATCH]");
            return os.str();
        }
    }
    return "candidate missing";
}

void run_example_two_attractors(const json& config, const ArtifactWriter& artifacts,
                                unsigned threads) {
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);
    const auto ifs = two_attractor_demo(0.5);
    const auto report = classify(ifs);
    artifacts.json_file("classification.json", to_json(report));

    const auto scan0 = scan_basin(ifs, 0.0, 101, 50, 10000, seed, 0.99, threads);
    const auto scan1 = scan_basin(ifs, 1.0, 101, 50, 10000, seed + 1, 0.99, threads);
    artifacts.csv_file("basin_0.csv", [&](std::ostream& os) { write_basin_csv(os, scan0); });
    artifacts.csv_file("basin_1.csv", [&](std::ostream& os) { write_basin_csv(os, scan1); });

    std::ostringstream text;
    text << "two quadratic maps, even mixing\n";
    text << status_line(report, 0.0, MeasureStatus::Srb) << "\n";
    text << status_line(report, 1.0, MeasureStatus::Srb) << "\n";
    text << "interval bound on the measure count: " << report.bs_bound << "\n";
    text << "basin hull toward 0: [" << format_double(scan0.hull_lo) << ", "
         << format_double(scan0.hull_hi) << "]  (predicted [0, 1/3])\n";
    text << "basin hull toward 1: [" << format_double(scan1.hull_lo) << ", "
         << format_double(scan1.hull_hi) << "]  (predicted [2/3, 1])\n";
    artifacts.text_file("summary.txt", text.str());

    artifacts.json_file("example_summary.json", {{"bs_bound", report.bs_bound},
                                                 {"basin_toward_zero", to_json(scan0)},
                                                 {"basin_toward_one", to_json(scan1)}});
}

void run_example_square_root(const json& config, const ArtifactWriter& artifacts) {
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);
    std::ostringstream text;
    text << "square-and-root pair across mixing probabilities\n";
    json phases = json::array();
    for (double p1 : {0.3, 0.4, 0.5, 0.6, 0.7}) {
        const auto ifs = square_root_demo(p1);
        const auto report = classify(ifs);
        int reach_one = 0, reach_zero = 0;
        for (int k = 0; k < 200; ++k) {
            reach_one += orbit_enters(ifs, 0.5, 10000, seed, static_cast<std::uint64_t>(k),
                                      1.0 - 1e-6, 1.0);
            reach_zero += orbit_enters(ifs, 0.5, 10000, seed, static_cast<std::uint64_t>(k), 0.0,
                                       1e-6);
        }
        json entry = {{"p1", p1},
                      {"drift", (2.0 * p1 - 1.0) * std::log(2.0)},
                      {"orbits_reaching_one", reach_one},
                      {"orbits_reaching_zero", reach_zero},
                      {"classification", to_json(report)}};
        phases.push_back(std::move(entry));
        text << "p1=" << p1 << ": drift " << format_double((2.0 * p1 - 1.0) * std::log(2.0))
             << ", " << reach_one << "/200 orbits reached the upper endpoint, " << reach_zero
             << "/200 the lower\n";
        for (const auto& c : report.candidates) {
            if (!c.point_mass) continue;
            text << "  delta_" << c.location << ": " << measure_status_name(c.status)
                 << (c.rule.empty() ? "" : " via " + c.rule) << "\n";
        }
    }
    artifacts.json_file("example_summary.json", {{"phases", phases}});
    artifacts.text_file("summary.txt", text.str());
}

void run_example_kelly(const json& config, const ArtifactWriter& artifacts,
                       unsigned threads) {
    const auto seed = field_or<std::uint64_t>(config, "seed", 1);
    const MarketModel model({{1.0, 0.0}, {0.0, 1.0}}, {0.5, 0.5});
    const auto star = kelly_rule(model);
    const Strategy other({0.3, 0.7});

    const int runs = 200;
    std::vector<int> outcome(static_cast<std::size_t>(runs));
    parallel_for(static_cast<std::size_t>(runs), threads, [&](std::size_t k) {
        const auto path = simulate_market(model, {star, other}, std::vector<double>{1.0, 1.0},
                                          100000, seed, k);
        outcome[k] = grade_outcome(share_trajectory(path, 0)).grade == Grade::Domination;
    });
    int dominated = 0;
    for (int o : outcome) dominated += o;

    const auto check = generalized_kelly_check(star, other, star.weights());
    artifacts.json_file(
        "example_summary.json",
        {{"kelly_rule", std::vector<double>(star.weights().begin(), star.weights().end())},
         {"opponent", std::vector<double>(other.weights().begin(), other.weights().end())},
         {"runs", runs},
         {"dominated", dominated},
         {"termwise_ok", check.termwise_ok},
         {"aggregate_ok", check.aggregate_ok}});

    std::ostringstream text;
    text << "expected-payoff bettor against a fixed opponent\n";
    text << "domination in " << dominated << "/" << runs << " seeded runs\n";
    artifacts.text_file("summary.txt", text.str());
}

}  // namespace

void run(const Options& options) {
    const json config = effective_config(options);
    const ArtifactWriter artifacts(options.out_dir, config);
    const unsigned threads = options.threads.value_or(0);

    if (options.command == "simulate") {
        run_simulate(config, artifacts);
    } else if (options.command == "classify") {
        run_classify(config, artifacts);
    } else if (options.command == "basin") {
        run_basin(config, artifacts, threads);
    } else if (options.command == "market") {
        run_market(config, artifacts);
    } else if (options.command == "arcsine") {
        run_arcsine(config, artifacts);
    } else if (options.command == "example") {
        if (options.example_name == "ex3.4") {
            run_example_two_attractors(config, artifacts, threads);
        } else if (options.example_name == "ex5.1") {
            run_example_square_root(config, artifacts);
        } else if (options.example_name == "kelly-demo") {
            run_example_kelly(config, artifacts, threads);
        } else {
            throw ValidationError("unknown example name: " + options.example_name);
        }
    } else {
        throw ValidationError("unknown command: " + options.command);
    }
}

}  // namespace srb::cli
