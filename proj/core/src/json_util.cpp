#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace biasforge::detail {

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(Errc::SchemaError, std::string(what) + ": " + e.what());
  }
}

const json& require(const json& obj, std::string_view key, const std::string& path) {
  if (!obj.is_object()) {
    throw Error(Errc::SchemaError, path + ": expected an object");
  }
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(Errc::SchemaError, path + ": missing field '" + std::string(key) + "'");
  }
  return *it;
}

std::string require_string(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) {
    throw Error(Errc::SchemaError, path + "." + std::string(key) + ": expected a string");
  }
  return v.get<std::string>();
}

double require_number(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number()) {
    throw Error(Errc::SchemaError, path + "." + std::string(key) + ": expected a number");
  }
  return v.get<double>();
}

long long require_integer(const json& obj, std::string_view key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_number_integer()) {
    throw Error(Errc::SchemaError, path + "." + std::string(key) + ": expected an integer");
  }
  return v.get<long long>();
}

Vec3 vec3_from(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
      !j[2].is_number()) {
    throw Error(Errc::SchemaError, path + ": expected [x, y, z]");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ordered_json vec3_to(const Vec3& v) { return ordered_json::array({v.x, v.y, v.z}); }

Euler euler_from(const json& j, const std::string& path) {
  Euler e;
  e.roll = require_number(j, "roll", path);
  e.pitch = require_number(j, "pitch", path);
  e.yaw = require_number(j, "yaw", path);
  return e;
}

ordered_json euler_to(const Euler& e) {
  ordered_json j;
  j["roll"] = e.roll;
  j["pitch"] = e.pitch;
  j["yaw"] = e.yaw;
  return j;
}

namespace {

// "biasforge/report/v1" -> ("biasforge/report", 1)
std::pair<std::string, std::string> split_format(std::string_view f) {
  const auto slash = f.rfind('/');
  if (slash == std::string_view::npos) return {std::string(f), ""};
  return {std::string(f.substr(0, slash)), std::string(f.substr(slash + 1))};
}

}  // namespace

void check_format(const json& doc, std::string_view expected, const std::string& path) {
  const std::string got = require_string(doc, "format", path);
  const auto [family, version] = split_format(got);
  const auto [want_family, want_version] = split_format(expected);
  // Only the major part of "vN[.M]" has to match.
  auto major = [](const std::string& v) { return v.substr(0, v.find('.')); };
  if (family != want_family || major(version) != major(want_version)) {
    throw Error(Errc::UnsupportedFormat,
                path + ": format '" + got + "' is not readable (expected " +
                    std::string(expected) + ")");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(Errc::IoError, "write to '" + path + "' failed");
}

}  // namespace biasforge::detail
