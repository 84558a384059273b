#include "tabcheck/config.hpp"

#include "tabcheck/catalog.hpp"
#include "tabcheck/csv.hpp"
#include "tabcheck/error.hpp"

namespace tabcheck {

namespace {

Json parse_json(std::string_view text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(source + ": malformed JSON: " + e.what());
    }
}

void validate_flat_key(const std::string& key, const Json& value, const std::string& source) {
    constexpr std::string_view prefix = "checks.";
    const auto dot = key.find('.', prefix.size());
    if (!key.starts_with(prefix) || dot == std::string::npos) {
        throw ConfigError(source + ": unknown key '" + key + "'");
    }
    const std::string id = key.substr(prefix.size(), dot - prefix.size());
    const std::string param = key.substr(dot + 1);
    CheckPtr check;
    try {
        check = find_check(id);
    } catch (const ConfigError&) {
        throw ConfigError(source + ": unknown check '" + id + "' in key '" + key + "'");
    }
    const ParamSpec* spec = check->find_param(param);
    if (spec == nullptr) {
        throw ConfigError(source + ": unknown parameter '" + param + "' for check '" + id + "'");
    }
    validate_param(id, *spec, value);
}

}  // namespace

Suite parse_suite(const Json& spec, const std::string& source) {
    if (!spec.is_object()) throw ConfigError(source + ": suite must be an object");
    for (const auto& [k, v] : spec.items()) {
        if (k != "name" && k != "checks") throw ConfigError(source + ": unknown suite key '" + k + "'");
    }
    Suite suite;
    suite.name = spec.value("name", std::string("custom"));
    if (!spec.contains("checks") || !spec.at("checks").is_array()) {
        throw ConfigError(source + ": suite needs a \"checks\" array");
    }
    for (const auto& item : spec.at("checks")) {
        if (!item.is_object() || !item.contains("id") || !item.at("id").is_string()) {
            throw ConfigError(source + ": every suite entry needs a string \"id\"");
        }
        for (const auto& [k, v] : item.items()) {
            if (k != "id" && k != "params" && k != "conditions") {
                throw ConfigError(source + ": unknown suite entry key '" + k + "'");
            }
        }
        SuiteEntry entry;
        entry.check = find_check(item.at("id").get<std::string>());
        if (item.contains("params")) {
            if (!item.at("params").is_object()) throw ConfigError(source + ": \"params\" must be an object");
            entry.params = item.at("params");
            resolve_params(*entry.check, entry.params, Json::object());
        }
        if (item.contains("conditions")) {
            const auto& conds = item.at("conditions");
            if (!conds.is_array()) throw ConfigError(source + ": \"conditions\" must be an array");
            std::vector<std::string> ids;
            for (const auto& c : conds) {
                if (!c.is_string()) throw ConfigError(source + ": condition ids must be strings");
                ids.push_back(c.get<std::string>());
                if (entry.check->find_condition(ids.back()) == nullptr) {
                    throw ConfigError(source + ": check '" + entry.check->id + "' has no condition '" + ids.back() + "'");
                }
            }
            entry.conditions = std::move(ids);
        }
        suite.entries.push_back(std::move(entry));
    }
    return suite;
}

RunConfig parse_config(std::string_view text, const std::string& source) {
    const Json doc = parse_json(text, source);
    if (!doc.is_object()) throw ConfigError(source + ": config must be a JSON object");
    RunConfig cfg;
    for (const auto& [k, v] : doc.items()) {
        if (k == "suite") {
            cfg.suite = parse_suite(v, source);
            continue;
        }
        validate_flat_key(k, v, source);
        cfg.params[k] = v;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    return parse_config(text, path.string());
}

Suite resolve_suite(const std::string& name_or_path) {
    for (const auto& s : builtin_suites()) {
        if (s.name == name_or_path) return s;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(name_or_path, ec)) {
        throw ConfigError("unknown suite '" + name_or_path + "' (not a built-in suite or a file)");
    }
    std::string text;
    try {
        text = read_file(name_or_path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const Json doc = parse_json(text, name_or_path);
    if (doc.is_object() && doc.contains("suite")) {
        auto cfg = parse_config(text, name_or_path);
        return *cfg.suite;
    }
    return parse_suite(doc, name_or_path);
}

}  // namespace tabcheck
