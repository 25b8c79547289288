#pragma once

#include <string>

#include "prmlab/harness.hpp"

namespace prmlab {

// Key-value config with [world], [weighting], [ttrl] and [sweep] sections.
// Lines are `key = value`; `#` starts a comment; blank lines are ignored.
// Unknown sections or keys raise ConfigError with the offending field path.
// Score distributions are written beta(a,b) or point(v). Lists (m_values,
// seeds, strategies) are comma separated. Missing keys keep the documented
// defaults baked into ExperimentConfig.
ExperimentConfig parse_experiment_config(const std::string& text);

// Reads and parses a config file; a missing or unreadable file is a ConfigError.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace prmlab
