#pragma once

#include "congesta/errors.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace congesta::toml {

/// Minimal TOML subset: [section] headers, key = value with numbers,
/// "strings", booleans, and flat arrays. Enough for scenario fixtures;
/// schema validation happens in the scenario loader.
struct Value {
    enum class Kind { number, string, boolean, array };
    Kind kind = Kind::number;
    double num = 0.0;
    std::string str;
    std::vector<double> nums;      // numeric array
    std::vector<std::string> strs; // string array
    std::string bare_key;          // key without the section prefix
};

using Table = std::map<std::string, Value>; // "section.key" -> value

Table parse_file(const std::filesystem::path& path);

} // namespace congesta::toml
