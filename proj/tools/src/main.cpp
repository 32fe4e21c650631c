#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "srb/errors.hpp"

namespace {

int report_error(const char* type, const std::string& message, int status) {
    nlohmann::json diagnostic = {{"error", {{"type", type}, {"message", message}}}};
    std::cerr << diagnostic.dump() << std::endl;
    return status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov interval-map simulator and measure classifier"};
    app.require_subcommand(1);

    srb::cli::Options options;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", options.config_path, "JSON run configuration");
        cmd->add_option("--out", options.out_dir, "output directory");
        cmd->add_option("--seed", options.seed, "master seed");
        cmd->add_option("--steps", options.steps, "orbit length / horizon");
        cmd->add_option("--paths", options.paths, "ensemble size");
        cmd->add_option("--grid", options.grid, "grid size");
        cmd->add_option("--threads", options.threads, "worker cap (0 = all cores)");
    };

    add_common(app.add_subcommand("simulate", "sample a seeded orbit"));
    add_common(app.add_subcommand("classify", "classify the endpoint and interior measures"));
    add_common(app.add_subcommand("basin", "scan convergence frequencies over a start grid"));
    add_common(app.add_subcommand("market", "iterate the multi-investor share dynamics"));
    add_common(app.add_subcommand("arcsine", "occupation-time statistics of the coin-flip oracle"));
    auto* example = app.add_subcommand("example", "run a built-in scenario");
    example->add_option("name", options.example_name, "ex3.4 | ex5.1 | kelly-demo")->required();
    add_common(example);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        return report_error("usage", e.what(), 2);
    }

    options.command = app.get_subcommands().front()->get_name();
    try {
        srb::cli::run(options);
    } catch (const srb::ConsistencyError& e) {
        return report_error("consistency", e.what(), 3);
    } catch (const srb::ValidationError& e) {
        return report_error("validation", e.what(), 2);
    } catch (const std::exception& e) {
        return report_error("validation", e.what(), 2);
    }
    return 0;
}
