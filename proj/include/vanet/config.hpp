#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "vanet/simulation.hpp"

namespace vanet::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses flat `key = value` lines ('#' starts a comment). Relative paths are
/// resolved against `base_dir`. Unknown keys and bad values name the key and line.
sim::ScenarioConfig parse(std::string_view text, const std::filesystem::path& base_dir,
                          std::string_view source = "config");
sim::ScenarioConfig load(const std::filesystem::path& file);

/// Applies one `key = value` setting on top of an existing config.
void apply(sim::ScenarioConfig& cfg, std::string_view key, std::string_view value,
           const std::filesystem::path& base_dir);

}  // namespace vanet::config
