#include "biasforge/manifest.hpp"

#include <set>

#include "biasforge/error.hpp"
#include "json_util.hpp"

namespace biasforge {

using detail::json;
using detail::ordered_json;

namespace {

ordered_json assignment_to(const Assignment& a) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : a) j[k] = v;
  return j;
}

Assignment assignment_from(const json& j, const std::string& path) {
  if (!j.is_object()) throw Error(Errc::SchemaError, path + ": expected an object");
  Assignment out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(Errc::SchemaError, path + "." + k + ": expected a string");
    out.emplace(k, v.get<std::string>());
  }
  return out;
}

std::string line_path(std::size_t line_no) {
  return line_no == 0 ? std::string("$") : "line " + std::to_string(line_no);
}

}  // namespace

std::string manifest_line(const TaskInstance& inst) {
  ordered_json j;
  j["instance_id"] = inst.instance_id;
  ordered_json varied = ordered_json::array();
  for (const auto& [dim, _] : inst.varied) varied.push_back(dim);
  j["varied"] = std::move(varied);
  Assignment visual = inst.varied;
  visual.insert(inst.eval_context.visual_fixed.begin(), inst.eval_context.visual_fixed.end());
  j["visual"] = assignment_to(visual);
  j["context"] = assignment_to(inst.eval_context.context);

  const SceneConfig& s = inst.scene;
  ordered_json scene;
  scene["camera"] = {{"pos", detail::vec3_to(s.camera.position)},
                     {"euler", detail::euler_to(s.camera.euler)}};
  scene["color"] = s.object_color;
  scene["color_rgb"] = s.color_rgb ? ordered_json::array({s.color_rgb->r, s.color_rgb->g,
                                                          s.color_rgb->b})
                                   : ordered_json(nullptr);
  scene["shape"] = s.shape_label;
  scene["shape_id"] = s.object_shape;
  scene["position"] = s.object_position;
  scene["position_xyz"] = s.position_xyz ? detail::vec3_to(*s.position_xyz) : ordered_json(nullptr);
  scene["instruction"] = s.instruction_text;
  j["scene"] = std::move(scene);
  return j.dump();
}

TaskInstance parse_manifest_line(std::string_view line, std::size_t line_no) {
  const std::string path = line_path(line_no);
  const json j = detail::parse_json(line, path);
  TaskInstance inst;
  inst.instance_id = detail::require_string(j, "instance_id", path);
  const json& varied = detail::require(j, "varied", path);
  if (!varied.is_array()) throw Error(Errc::SchemaError, path + ".varied: expected a list");
  const Assignment visual = assignment_from(detail::require(j, "visual", path), path + ".visual");
  std::set<std::string> varied_dims;
  for (const json& d : varied) {
    if (!d.is_string()) throw Error(Errc::SchemaError, path + ".varied: expected strings");
    varied_dims.insert(d.get<std::string>());
  }
  for (const auto& [dim, value] : visual) {
    if (varied_dims.contains(dim)) {
      inst.varied.emplace(dim, value);
    } else {
      inst.eval_context.visual_fixed.emplace(dim, value);
    }
  }
  if (inst.varied.size() != varied_dims.size()) {
    throw Error(Errc::SchemaError, path + ".varied: names a dimension missing from 'visual'");
  }
  inst.eval_context.context =
      assignment_from(detail::require(j, "context", path), path + ".context");

  const json& s = detail::require(j, "scene", path);
  const std::string spath = path + ".scene";
  const json& cam = detail::require(s, "camera", spath);
  inst.scene.camera.position = detail::vec3_from(detail::require(cam, "pos", spath + ".camera"),
                                                 spath + ".camera.pos");
  inst.scene.camera.euler = detail::euler_from(detail::require(cam, "euler", spath + ".camera"),
                                               spath + ".camera.euler");
  inst.scene.object_color = detail::require_string(s, "color", spath);
  const json& rgb = detail::require(s, "color_rgb", spath);
  if (!rgb.is_null()) {
    if (!rgb.is_array() || rgb.size() != 3) {
      throw Error(Errc::SchemaError, spath + ".color_rgb: expected [r, g, b] or null");
    }
    inst.scene.color_rgb = Rgb{rgb[0].get<int>(), rgb[1].get<int>(), rgb[2].get<int>()};
  }
  inst.scene.shape_label = detail::require_string(s, "shape", spath);
  inst.scene.object_shape = detail::require_string(s, "shape_id", spath);
  inst.scene.object_position = detail::require_string(s, "position", spath);
  const json& xyz = detail::require(s, "position_xyz", spath);
  if (!xyz.is_null()) inst.scene.position_xyz = detail::vec3_from(xyz, spath + ".position_xyz");
  inst.scene.instruction_text = detail::require_string(s, "instruction", spath);
  return inst;
}

std::string write_manifest(const std::vector<TaskInstance>& instances) {
  std::string out;
  for (const TaskInstance& inst : instances) {
    out += manifest_line(inst);
    out += '\n';
  }
  return out;
}

std::vector<TaskInstance> parse_manifest(std::string_view jsonl) {
  std::vector<TaskInstance> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    ++line_no;
    const std::string_view line = jsonl.substr(start, end - start);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      out.push_back(parse_manifest_line(line, line_no));
    }
    start = end + 1;
  }
  return out;
}

std::vector<TaskInstance> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(detail::read_file(path.string()));
}

std::string serialize_header(const ManifestHeader& h) {
  ordered_json j;
  j["format"] = kManifestFormat;
  j["evaluated_dims"] = h.evaluated_dims;
  if (h.factorial) {
    j["factorial"] = {{"dim_i", h.factorial->dim_i},
                      {"dim_j", h.factorial->dim_j},
                      {"c_star",
                       {{"context", assignment_to(h.factorial->c_star.context)},
                        {"visual_fixed", assignment_to(h.factorial->c_star.visual_fixed)}}}};
  } else {
    j["factorial"] = nullptr;
  }
  j["baselines"] = {{"visual", assignment_to(h.visual_baselines)},
                    {"context", assignment_to(h.context_baseline)}};
  ordered_json counts = ordered_json::object();
  for (const auto& [label, n] : h.counts) counts[label] = n;
  j["counts"] = std::move(counts);
  j["total"] = h.total;
  return j.dump(2) + "\n";
}

EvaluationContext parse_context(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "context");
  return {assignment_from(detail::require(j, "context", "$"), "$.context"),
          assignment_from(detail::require(j, "visual_fixed", "$"), "$.visual_fixed")};
}

ManifestHeader parse_header(std::string_view json_text) {
  const json j = detail::parse_json(json_text, "manifest header");
  detail::check_format(j, kManifestFormat, "$");
  ManifestHeader h;
  for (const json& d : detail::require(j, "evaluated_dims", "$")) {
    h.evaluated_dims.push_back(d.get<std::string>());
  }
  const json& f = detail::require(j, "factorial", "$");
  if (!f.is_null()) {
    const json& c = detail::require(f, "c_star", "$.factorial");
    h.factorial = FactorialRequest{
        detail::require_string(f, "dim_i", "$.factorial"),
        detail::require_string(f, "dim_j", "$.factorial"),
        {assignment_from(detail::require(c, "context", "$.factorial.c_star"), "$.c_star.context"),
         assignment_from(detail::require(c, "visual_fixed", "$.factorial.c_star"),
                         "$.c_star.visual_fixed")}};
  }
  const json& b = detail::require(j, "baselines", "$");
  h.visual_baselines = assignment_from(detail::require(b, "visual", "$.baselines"), "$.baselines.visual");
  h.context_baseline =
      assignment_from(detail::require(b, "context", "$.baselines"), "$.baselines.context");
  detail::require(j, "counts", "$");
  // counts keep their written order
  const ordered_json ordered = ordered_json::parse(json_text);
  for (const auto& [label, n] : ordered.at("counts").items()) {
    if (!n.is_number_unsigned()) {
      throw Error(Errc::SchemaError, "$.counts." + label + ": expected a non-negative integer");
    }
    h.counts.emplace_back(label, n.get<std::size_t>());
  }
  h.total = static_cast<std::size_t>(detail::require_integer(j, "total", "$"));
  return h;
}

}  // namespace biasforge
