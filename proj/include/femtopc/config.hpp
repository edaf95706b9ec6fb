#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "femtopc/experiments.hpp"

namespace femtopc {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parse an INI-style experiment file. Missing keys keep their defaults.
/// Throws ConfigError on unknown keys, malformed values, or a config that
/// fails ExperimentConfig::validate().
ExperimentConfig parse_config(std::istream& is);
ExperimentConfig load_config(const std::string& path);

}  // namespace femtopc
