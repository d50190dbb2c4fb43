#pragma once

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>

#include "spme/harness.hpp"
#include "spme/sde.hpp"

namespace spme {

// Flat key=value run configuration. '#' starts a comment; blank lines are ignored;
// unknown or repeated keys are errors. `seed` is always required.
struct RunConfig {
    SdeConfig sde{};
    Model model{};
    ExperimentPlan plan{};
    InitialDatum u0{};
    std::size_t n = 0;
    std::string out_dir;
    std::set<std::string> keys;  // keys present in the source

    bool has(const std::string& key) const { return keys.count(key) > 0; }
    // Throws ConfigError naming `key` when it was not given.
    void require(const std::string& key) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace spme
