#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace srb::cli {

struct Options {
    std::string command;  // simulate | classify | basin | market | arcsine | example
    std::string config_path;
    std::string example_name;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> steps;
    std::optional<int> paths;
    std::optional<int> grid;
    std::optional<unsigned> threads;
};

// Runs one command end to end. Throws ValidationError for bad input and
// ConsistencyError for internal contradictions; the caller maps these to
// exit statuses.
void run(const Options& options);

}  // namespace srb::cli
