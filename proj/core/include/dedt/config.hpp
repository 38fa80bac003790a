#ifndef DEDT_CONFIG_HPP
#define DEDT_CONFIG_HPP

#include <filesystem>
#include <string>

#include "dedt/tracker.hpp"

namespace dedt {

// Flat key=value text config. '#' starts a comment; blank lines are ignored;
// unknown keys are fatal. Every TrackerConfig field is settable.
TrackerConfig parse_config(const std::string& text, TrackerConfig base = {});
TrackerConfig load_config(const std::filesystem::path& file, TrackerConfig base = {});

// Emits the full config in the same key=value format (round-trips through
// parse_config).
std::string config_text(const TrackerConfig& config);

const char* to_string(LocalizationRule rule);

}  // namespace dedt

#endif
