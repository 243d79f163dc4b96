#pragma once

// Internal helpers shared by the JSON readers and writers.

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>

#include "biasforge/error.hpp"
#include "biasforge/geometry.hpp"

namespace biasforge::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json parse_json(std::string_view text, std::string_view what);

const json& require(const json& obj, std::string_view key, const std::string& path);
std::string require_string(const json& obj, std::string_view key, const std::string& path);
double require_number(const json& obj, std::string_view key, const std::string& path);
long long require_integer(const json& obj, std::string_view key, const std::string& path);

Vec3 vec3_from(const json& j, const std::string& path);
ordered_json vec3_to(const Vec3& v);
Euler euler_from(const json& j, const std::string& path);
ordered_json euler_to(const Euler& e);

/// Rejects documents whose "format" string has a different family or major.
void check_format(const json& doc, std::string_view expected, const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace biasforge::detail
