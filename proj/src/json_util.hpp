#pragma once

// Internal helpers for reading JSON documents with field-path error messages.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "socketbench/error.hpp"

namespace socketbench::detail {

using json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);

json parse_json(std::string_view text, std::string_view what);

inline const json& require(const json& obj, std::string_view key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + "." + std::string(key) + ": missing field");
    return *it;
}

inline double get_number(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw ParseError(path + "." + std::string(key) + ": expected a number");
    return v.get<double>();
}

inline std::optional<double> get_optional_number(const json& obj, std::string_view key,
                                                 const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw ParseError(path + "." + std::string(key) + ": expected a number or null");
    return it->get<double>();
}

inline std::string get_string(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw ParseError(path + "." + std::string(key) + ": expected a string");
    return v.get<std::string>();
}

inline const json& get_array(const json& obj, std::string_view key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_array()) throw ParseError(path + "." + std::string(key) + ": expected an array");
    return v;
}

}  // namespace socketbench::detail
