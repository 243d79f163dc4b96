#include "biasforge/variant_generator.hpp"

#include "biasforge/error.hpp"

namespace biasforge {

namespace {

const FactorValue& bound_value(const FactorDimension& dim, const Assignment& assignment) {
  auto it = assignment.find(dim.name);
  if (it == assignment.end()) {
    throw Error(Errc::MissingDimension, "assignment has no value for '" + dim.name + "'");
  }
  const FactorValue* v = dim.find(it->second);
  if (v == nullptr) {
    throw Error(Errc::UnknownValueId,
                "'" + it->second + "' is not a value of dimension '" + dim.name + "'");
  }
  return *v;
}

std::string substitute_object(std::string text, const std::string& object) {
  static constexpr std::string_view kSlot = "{object}";
  for (auto pos = text.find(kSlot); pos != std::string::npos;
       pos = text.find(kSlot, pos + object.size())) {
    text.replace(pos, kSlot.size(), object);
  }
  return text;
}

}  // namespace

SceneConfig expand_variants(const FactorSpace& space, const Assignment& assignment) {
  std::size_t bound = 0;
  SceneConfig scene;
  std::optional<EulerOffsetPayload> offset;
  std::optional<ScaleLevelPayload> scale;
  std::string instruction = "pick up the {object}";

  for (const auto* list : {&space.visual_dims(), &space.context_dims()}) {
    for (const FactorDimension& dim : *list) {
      const FactorValue& v = bound_value(dim, assignment);
      ++bound;
      std::visit(
          [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ColorPayload>) {
              scene.object_color = v.id;
              scene.color_rgb = p.rgb;
            } else if constexpr (std::is_same_v<T, CameraPosePayload>) {
              scene.camera = p.pose;
            } else if constexpr (std::is_same_v<T, EulerOffsetPayload>) {
              offset = p;
            } else if constexpr (std::is_same_v<T, ScaleLevelPayload>) {
              scale = p;
            } else if constexpr (std::is_same_v<T, PositionPayload>) {
              scene.object_position = v.id;
              scene.position_xyz = p.xyz;
            } else if constexpr (std::is_same_v<T, ShapePayload>) {
              scene.object_shape = v.id;
              scene.shape_label = p.label;
            } else {
              instruction = p.text;
            }
          },
          v.payload);
    }
  }
  if (bound != assignment.size()) {
    for (const auto& [name, _] : assignment) {
      if (space.find(name) == nullptr) {
        throw Error(Errc::MissingDimension, "assignment names unknown dimension '" + name + "'");
      }
    }
  }

  if (offset) {
    const Euler& o = offset->offset;
    if (o.yaw != 0.0) scene.camera.euler.yaw += o.yaw;
    if (o.pitch != 0.0) scene.camera.euler.pitch += o.pitch;
    if (o.roll != 0.0) scene.camera.euler.roll += o.roll;
  }
  if (scale && scale->level > 0) {
    scene.camera = distance_scale_poses(scene.camera, scale->step_m,
                                        static_cast<std::size_t>(scale->level))
                       .back();
  }
  scene.instruction_text =
      substitute_object(instruction, scene.shape_label.empty() ? "object" : scene.shape_label);
  return scene;
}

VariantTaskManager& VariantTaskManager::add_axis(std::string dimension,
                                                 std::vector<std::string> value_ids) {
  axes_.push_back({std::move(dimension), std::move(value_ids)});
  return *this;
}

VariantTaskManager& VariantTaskManager::add_axis(const FactorDimension& dim) {
  std::vector<std::string> ids;
  ids.reserve(dim.values.size());
  for (const FactorValue& v : dim.values) ids.push_back(v.id);
  return add_axis(dim.name, std::move(ids));
}

std::size_t VariantTaskManager::size() const {
  std::size_t n = 1;
  for (const Axis& a : axes_) n *= a.value_ids.size();
  return n;
}

void VariantTaskManager::for_each(const Assignment& seed,
                                  const std::function<void(const Assignment&)>& visit) const {
  Assignment current = seed;
  recurse(0, current, visit);
}

std::vector<Assignment> VariantTaskManager::collect(const Assignment& seed) const {
  std::vector<Assignment> out;
  out.reserve(size());
  for_each(seed, [&](const Assignment& a) { out.push_back(a); });
  return out;
}

void VariantTaskManager::recurse(std::size_t depth, Assignment& current,
                                 const std::function<void(const Assignment&)>& visit) const {
  if (depth == axes_.size()) {
    visit(current);
    return;
  }
  const Axis& axis = axes_[depth];
  for (const std::string& id : axis.value_ids) {
    current[axis.dimension] = id;
    recurse(depth + 1, current, visit);
  }
}

}  // namespace biasforge
