#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "tabcheck/framework.hpp"

namespace tabcheck {

struct RunConfig {
    /// Flat "checks.<id>.<param>" overrides, validated against the catalog.
    Json params = Json::object();
    std::optional<Suite> suite;
};

/// Parses a config document. Accepted top-level keys are flat
/// "checks.<id>.<param>" entries and an optional "suite" object
/// {"name", "checks": [{"id", "params", "conditions"}]}. Anything else,
/// unknown check ids, unknown params and invalid values raise ConfigError.
RunConfig parse_config(std::string_view text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Custom suite from a {"name", "checks": [...]} object.
Suite parse_suite(const Json& spec, const std::string& source = "<suite>");

/// A built-in suite name, or a JSON file holding either a suite object or
/// a config document with a "suite" key.
Suite resolve_suite(const std::string& name_or_path);

}  // namespace tabcheck
