#pragma once

#include <stdexcept>
#include <string>

#include "meal/harness.hpp"

namespace meal {

// Configuration / usage problems; the CLI maps these to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat `key = value` experiment config, keys namespaced with dots
// (al.query_size = 32, umap.n_neighbors = 15, strategy = meal). Blank lines
// and '#' comments are allowed. Unknown keys, bad values, and invariant
// violations raise ConfigError naming the key.
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);
ExperimentConfig parse_config_file(const std::string& path);

void validate_config(const ExperimentConfig& cfg);

}  // namespace meal
