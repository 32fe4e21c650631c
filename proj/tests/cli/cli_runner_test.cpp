// End-to-end checks of the command-line tool: exit statuses, artifact
// presence, and byte-identical reruns.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

namespace fs = std::filesystem;

int failures = 0;

void check(bool ok, const std::string& what) {
    if (!ok) {
        std::cerr << "FAILED: " << what << "\n";
        ++failures;
    }
}

int run_tool(const std::string& args) {
    const std::string command =
        std::string(SRB_CLI_PATH) + " " + args + " >/dev/null 2>/tmp/srb_cli_stderr";
    const int status = std::system(command.c_str());
    if (status == -1) return -1;
    return WEXITSTATUS(status);
}

std::string stderr_text() {
    std::ifstream in("/tmp/srb_cli_stderr");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream out(path);
    out << body;
}

bool identical_trees(const fs::path& a, const fs::path& b) {
    for (const auto& entry : fs::directory_iterator(a)) {
        const auto other = b / entry.path().filename();
        if (!fs::exists(other)) return false;
        if (slurp(entry.path()) != slurp(other)) return false;
    }
    return true;
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / "srb_cli_tests";
    fs::remove_all(root);
    fs::create_directories(root);

    const std::string classify_cfg = (root / "classify.json").string();
    write_file(classify_cfg,
               R"({"ifs": {"maps": [{"kind":"power","beta":2.0},{"kind":"power","beta":0.5}],)"
               R"( "p": [0.4, 0.6]}})");

    check(run_tool("classify --config " + classify_cfg + " --out " + (root / "c1").string()) == 0,
          "classify exits 0 on a valid config");
    check(fs::exists(root / "c1" / "classification.json"), "classification artifact written");
    check(fs::exists(root / "c1" / "graph_down.txt"), "down graph artifact written");

    // field-level validation failures exit 2
    const std::string bad_prob = (root / "bad_prob.json").string();
    write_file(bad_prob,
               R"({"ifs": {"maps": [{"kind":"power","beta":2.0},{"kind":"power","beta":0.5}],)"
               R"( "p": [0.4, 0.5]}})");
    check(run_tool("classify --config " + bad_prob + " --out " + (root / "c2").string()) == 2,
          "probability vector off by 0.1 exits 2");
    check(stderr_text().find("sum") != std::string::npos, "error message names the bad field");

    const std::string degenerate = (root / "degenerate.json").string();
    write_file(degenerate,
               R"({"ifs": {"maps": [{"kind":"identity"},{"kind":"power","beta":2.0}],)"
               R"( "p": [0.5, 0.5]}})");
    check(run_tool("classify --config " + degenerate + " --out " + (root / "c3").string()) == 2,
          "identity map sent to classify exits 2");
    check(stderr_text().find("degenerate") != std::string::npos,
          "degenerate fixed set named in the message");

    check(run_tool("example no-such-demo --out " + (root / "c4").string()) == 2,
          "unknown example name exits 2");
    check(run_tool("simulate --config " + classify_cfg + " --seed 7 --steps 200 --out " +
                   (root / "c5").string()) == 0,
          "simulate exits 0");
    check(fs::exists(root / "c5" / "orbit.csv"), "orbit CSV written");

    const std::string market_cfg = (root / "market.json").string();
    write_file(market_cfg,
               R"({"market": {"K": 2, "L": 2, "D": [[1.0, 0.0], [0.0, 1.0]], "p": [0.5, 0.5],)"
               R"( "strategies": [[0.5, 0.5], [0.3, 0.7]], "w0": [1.0, 1.0]}, "steps": 2000})");
    check(run_tool("market --config " + market_cfg + " --seed 3 --out " + (root / "c6").string()) ==
              0,
          "market exits 0");
    check(slurp(root / "c6" / "market_summary.json").find("aggregate_ok") != std::string::npos,
          "market summary carries the survival check");

    // provenance: artifacts embed the config hash and tool version
    const auto summary = slurp(root / "c6" / "market_summary.json");
    check(summary.find("config_hash") != std::string::npos, "JSON artifacts embed the config hash");
    check(summary.find("tool_version") != std::string::npos, "JSON artifacts embed the version");
    check(slurp(root / "c6" / "market.csv").rfind("# config_hash=", 0) == 0,
          "CSV artifacts start with the provenance line");

    // determinism: identical configs give byte-identical artifacts
    const std::string basin_args =
        "basin --config " + classify_cfg + " --seed 11 --steps 2000 --grid 21 --out ";
    check(run_tool(basin_args + (root / "d1").string()) == 0, "basin run 1");
    check(run_tool(basin_args + (root / "d2").string()) == 0, "basin run 2");
    check(identical_trees(root / "d1", root / "d2"), "basin artifacts are byte-identical");

    write_file(root / "arc.json", R"({"arcsine": {"n": 400.0, "length": 1200}})");
    const std::string arcsine_args =
        "arcsine --seed 5 --paths 100 --config " + (root / "arc.json").string() + " --out ";
    check(run_tool(arcsine_args + (root / "d3").string()) == 0, "arcsine run 1");
    check(run_tool(arcsine_args + (root / "d4").string()) == 0, "arcsine run 2");
    check(identical_trees(root / "d3", root / "d4"), "arcsine artifacts are byte-identical");

    const std::string sim_args =
        "simulate --config " + classify_cfg + " --seed 9 --steps 500 --paths 4 --out ";
    check(run_tool(sim_args + (root / "d5").string()) == 0, "simulate run 1");
    check(run_tool(sim_args + (root / "d6").string()) == 0, "simulate run 2");
    check(identical_trees(root / "d5", root / "d6"), "simulate artifacts are byte-identical");

    if (failures == 0) {
        std::cout << "cli tests passed\n";
        return 0;
    }
    std::cerr << failures << " cli checks failed\n";
    return 1;
}
