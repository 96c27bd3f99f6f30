#pragma once

// Internal: strict JSON field extraction with errors that name the field.
// Kept out of the public headers so json.hpp stays a private dependency.

#include "mim/format.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mim::detail {

inline nlohmann::json parse_json_text(const std::string& text) {
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("json: ") + e.what());
    }
}

inline double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field))
        throw std::invalid_argument(std::string(field) + ": missing required field");
    const nlohmann::json& v = j.at(field);
    if (!v.is_number())
        throw std::invalid_argument(std::string(field) + ": expected a number");
    return v.get<double>();
}

inline std::int64_t require_integer(const nlohmann::json& j, const char* field) {
    if (!j.contains(field))
        throw std::invalid_argument(std::string(field) + ": missing required field");
    const nlohmann::json& v = j.at(field);
    if (!v.is_number_integer())
        throw std::invalid_argument(std::string(field) + ": expected an integer");
    return v.get<std::int64_t>();
}

inline std::vector<double> require_number_array(const nlohmann::json& j, const char* field) {
    if (!j.contains(field))
        throw std::invalid_argument(std::string(field) + ": missing required field");
    const nlohmann::json& v = j.at(field);
    if (!v.is_array())
        throw std::invalid_argument(std::string(field) + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number())
            throw std::invalid_argument(std::string(field) + "[" +
                                        format_int(static_cast<std::int64_t>(i)) +
                                        "]: expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

inline bool optional_bool(const nlohmann::json& j, const char* field, bool fallback) {
    if (!j.contains(field))
        return fallback;
    const nlohmann::json& v = j.at(field);
    if (!v.is_boolean())
        throw std::invalid_argument(std::string(field) + ": expected a boolean");
    return v.get<bool>();
}

} // namespace mim::detail
