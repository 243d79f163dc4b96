#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "biasforge/factor_space.hpp"
#include "biasforge/geometry.hpp"

namespace biasforge {

/// A fully bound scene. Ids refer to the governing FactorSpace; the resolved
/// payload fields are copied alongside so the scene stands on its own.
struct SceneConfig {
  std::string object_color;     // empty when the space has no color dimension
  std::string object_shape;
  std::string object_position;
  CameraPose camera;
  std::string instruction_text;

  std::optional<Rgb> color_rgb;
  std::string shape_label;
  std::optional<Vec3> position_xyz;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Binds one value per dimension and resolves the scene payload.
///
/// Camera composition: start from the camera_pose value (origin pose when the
/// space has none), add the euler_offset angles, then pull back along the
/// resulting line of sight by the scale level. "{object}" in the instruction
/// becomes the shape label ("object" without a shape dimension).
SceneConfig expand_variants(const FactorSpace& space, const Assignment& assignment);

/// Recursively walks a list of axes and emits every combination, first axis
/// outermost. Axis and value order are preserved, so output order is fixed.
class VariantTaskManager {
 public:
  struct Axis {
    std::string dimension;
    std::vector<std::string> value_ids;
  };

  VariantTaskManager& add_axis(std::string dimension, std::vector<std::string> value_ids);
  /// Axis over every value of `dim`, in declaration order.
  VariantTaskManager& add_axis(const FactorDimension& dim);

  std::size_t size() const;

  /// `seed` is copied into every emitted assignment before axis bindings.
  void for_each(const Assignment& seed,
                const std::function<void(const Assignment&)>& visit) const;
  std::vector<Assignment> collect(const Assignment& seed = {}) const;

 private:
  void recurse(std::size_t depth, Assignment& current,
               const std::function<void(const Assignment&)>& visit) const;

  std::vector<Axis> axes_;
};

}  // namespace biasforge
