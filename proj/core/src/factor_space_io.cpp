#include <set>

#include "biasforge/error.hpp"
#include "biasforge/factor_space.hpp"
#include "biasforge/samplers.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

const std::set<std::string_view> kPayloadKeys = {"color",    "camera_pose", "euler_offset",
                                                 "scale_level", "position", "shape",
                                                 "instruction"};

Payload payload_from(const json& v, const std::string& path) {
  std::string_view found;
  for (const auto& [key, _] : v.items()) {
    if (kPayloadKeys.contains(key)) {
      if (!found.empty()) {
        throw Error(Errc::SchemaError, path + ": more than one payload field");
      }
      found = kPayloadKeys.find(key)->data();
    }
  }
  if (found.empty()) {
    throw Error(Errc::SchemaError, path + ": missing payload (one of color, camera_pose, "
                                          "euler_offset, scale_level, position, shape, instruction)");
  }
  const json& p = v.at(std::string(found));
  const std::string ppath = path + "." + std::string(found);
  if (found == "color") {
    const json& rgb = detail::require(p, "rgb", ppath);
    if (!rgb.is_array() || rgb.size() != 3) {
      throw Error(Errc::SchemaError, ppath + ".rgb: expected [r, g, b]");
    }
    for (const json& c : rgb) {
      if (!c.is_number_integer()) throw Error(Errc::SchemaError, ppath + ".rgb: expected integers");
    }
    return ColorPayload{detail::require_string(p, "name", ppath),
                        Rgb{rgb[0].get<int>(), rgb[1].get<int>(), rgb[2].get<int>()}};
  }
  if (found == "camera_pose") {
    return CameraPosePayload{CameraPose{detail::vec3_from(detail::require(p, "position", ppath),
                                                          ppath + ".position"),
                                        detail::euler_from(detail::require(p, "euler", ppath),
                                                           ppath + ".euler")}};
  }
  if (found == "euler_offset") {
    return EulerOffsetPayload{detail::euler_from(p, ppath)};
  }
  if (found == "scale_level") {
    return ScaleLevelPayload{static_cast<int>(detail::require_integer(p, "level", ppath)),
                             detail::require_number(p, "step_m", ppath)};
  }
  if (found == "position") {
    return PositionPayload{detail::require_string(p, "label", ppath),
                           detail::vec3_from(detail::require(p, "xyz", ppath), ppath + ".xyz")};
  }
  if (found == "shape") {
    return ShapePayload{detail::require_string(p, "label", ppath)};
  }
  return InstructionPayload{detail::require_string(p, "text", ppath)};
}

ordered_json payload_to(const Payload& payload) {
  ordered_json p;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ColorPayload>) {
          p["name"] = v.name;
          p["rgb"] = ordered_json::array({v.rgb.r, v.rgb.g, v.rgb.b});
        } else if constexpr (std::is_same_v<T, CameraPosePayload>) {
          p["position"] = detail::vec3_to(v.pose.position);
          p["euler"] = detail::euler_to(v.pose.euler);
        } else if constexpr (std::is_same_v<T, EulerOffsetPayload>) {
          p = detail::euler_to(v.offset);
        } else if constexpr (std::is_same_v<T, ScaleLevelPayload>) {
          p["level"] = v.level;
          p["step_m"] = v.step_m;
        } else if constexpr (std::is_same_v<T, PositionPayload>) {
          p["label"] = v.label;
          p["xyz"] = detail::vec3_to(v.xyz);
        } else if constexpr (std::is_same_v<T, ShapePayload>) {
          p["label"] = v.label;
        } else {
          p["text"] = v.text;
        }
      },
      payload);
  return p;
}

std::vector<OrbitRing> rings_from(const json& spec, const std::string& path) {
  if (!spec.contains("rings")) {
    return {kDefaultOrbitRings.begin(), kDefaultOrbitRings.end()};
  }
  const json& rings = spec.at("rings");
  if (!rings.is_array()) throw Error(Errc::SchemaError, path + ".rings: expected a list");
  std::vector<OrbitRing> out;
  for (std::size_t i = 0; i < rings.size(); ++i) {
    const std::string rpath = path + ".rings[" + std::to_string(i) + "]";
    out.push_back({detail::require_number(rings[i], "radius_m", rpath),
                   detail::require_number(rings[i], "height_m", rpath)});
  }
  return out;
}

SamplerModule sampler_from(const std::string& dim, const json& spec, const std::string& path) {
  const std::string type = detail::require_string(spec, "type", path);
  auto number_or = [&](std::string_view key, double fallback) {
    return spec.contains(key) ? detail::require_number(spec, key, path) : fallback;
  };
  auto count_or = [&](std::string_view key, long long fallback) {
    const long long v = spec.contains(key) ? detail::require_integer(spec, key, path) : fallback;
    if (v < 0) throw Error(Errc::SchemaError, path + "." + std::string(key) + ": negative count");
    return static_cast<std::size_t>(v);
  };
  if (type == "named_colors") {
    ColorTableOptions options;
    if (spec.contains("aliases")) {
      const std::string a = detail::require_string(spec, "aliases", path);
      if (a == "spelling") {
        options.aliases = AliasPolicy::kSpelling;
      } else if (a == "rgb") {
        options.aliases = AliasPolicy::kRgb;
      } else {
        throw Error(Errc::SchemaError, path + ".aliases: expected 'spelling' or 'rgb'");
      }
    }
    options.limit = count_or("limit", 0);
    return named_color_sampler(dim, options);
  }
  if (type == "euler_grid") return euler_grid_sampler(dim, number_or("step_deg", 6.0));
  if (type == "distance_levels") {
    return distance_level_sampler(dim, number_or("step_m", 0.05), count_or("levels", 8));
  }
  if (type == "orbit_rings") {
    return orbit_camera_sampler(dim, detail::vec3_from(detail::require(spec, "target", path),
                                                       path + ".target"),
                                rings_from(spec, path), count_or("per_ring", 7),
                                number_or("start_azimuth_deg", 0.0));
  }
  if (type == "grid_positions") {
    const json& spacing = detail::require(spec, "spacing", path);
    if (!spacing.is_array() || spacing.size() != 2 || !spacing[0].is_number() ||
        !spacing[1].is_number()) {
      throw Error(Errc::SchemaError, path + ".spacing: expected [dx, dy]");
    }
    return grid_position_sampler(
        dim, detail::vec3_from(detail::require(spec, "origin", path), path + ".origin"),
        spacing[0].get<double>(), spacing[1].get<double>(), count_or("rows", 2),
        count_or("cols", 2));
  }
  throw Error(Errc::SchemaError, path + ".type: unknown sampler '" + type + "'");
}

FactorDimension dimension_from(const json& d, DimensionKind list_kind, const std::string& path) {
  const std::string name = detail::require_string(d, "name", path);
  const std::string kind = detail::require_string(d, "kind", path);
  if (kind != dimension_kind_name(list_kind)) {
    throw Error(Errc::SchemaError, path + ".kind: '" + kind + "' does not match its list (" +
                                       std::string(dimension_kind_name(list_kind)) + ")");
  }
  const std::string baseline = detail::require_string(d, "baseline", path);

  FactorDimension dim;
  if (d.contains("sampler")) {
    if (d.contains("values")) {
      throw Error(Errc::SchemaError, path + ": give either 'values' or 'sampler', not both");
    }
    dim.name = name;
    dim.values = sampler_from(name, d.at("sampler"), path + ".sampler").generate();
  } else {
    const json& values = detail::require(d, "values", path);
    if (!values.is_array()) throw Error(Errc::SchemaError, path + ".values: expected a list");
    dim.name = name;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string vpath = path + ".values[" + std::to_string(i) + "]";
      FactorValue v;
      v.id = detail::require_string(values[i], "id", vpath);
      v.label = values[i].contains("label") ? detail::require_string(values[i], "label", vpath)
                                            : v.id;
      v.payload = payload_from(values[i], vpath);
      dim.values.push_back(std::move(v));
    }
  }
  dim.kind = list_kind;
  if (dim.values.empty()) {
    throw Error(Errc::EmptyDimension, path + ": dimension '" + name + "' has no values");
  }
  const auto idx = dim.index_of(baseline);
  if (!idx) {
    throw Error(Errc::BadBaselineIndex,
                path + ".baseline: '" + baseline + "' is not a value of '" + name + "'");
  }
  dim.baseline_index = *idx;
  return dim;
}

}  // namespace

FactorSpace parse_space(std::string_view json_text) {
  const json doc = detail::parse_json(json_text, "factor space");
  detail::check_format(doc, kFactorSpaceFormat, "$");
  std::vector<FactorDimension> dims;
  for (auto [key, kind] : {std::pair{"visual_dims", DimensionKind::visual},
                           std::pair{"context_dims", DimensionKind::context}}) {
    const json& list = detail::require(doc, key, "$");
    if (!list.is_array()) throw Error(Errc::SchemaError, std::string("$.") + key + ": expected a list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      dims.push_back(dimension_from(list[i], kind, "$." + std::string(key) + "[" +
                                                       std::to_string(i) + "]"));
    }
  }
  return build_space(std::move(dims));
}

FactorSpace load_space(const std::filesystem::path& path) {
  return parse_space(detail::read_file(path.string()));
}

std::string serialize_space(const FactorSpace& space) {
  ordered_json doc;
  doc["format"] = kFactorSpaceFormat;
  for (auto [key, dims] : {std::pair{"visual_dims", &space.visual_dims()},
                           std::pair{"context_dims", &space.context_dims()}}) {
    ordered_json list = ordered_json::array();
    for (const FactorDimension& d : *dims) {
      ordered_json jd;
      jd["name"] = d.name;
      jd["kind"] = dimension_kind_name(d.kind);
      jd["baseline"] = d.baseline().id;
      ordered_json values = ordered_json::array();
      for (const FactorValue& v : d.values) {
        ordered_json jv;
        jv["id"] = v.id;
        jv["label"] = v.label;
        jv[std::string(payload_kind_name(payload_kind(v.payload)))] = payload_to(v.payload);
        values.push_back(std::move(jv));
      }
      jd["values"] = std::move(values);
      list.push_back(std::move(jd));
    }
    doc[key] = std::move(list);
  }
  return doc.dump(2) + "\n";
}

}  // namespace biasforge
