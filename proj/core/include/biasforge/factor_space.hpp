#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "biasforge/colors.hpp"
#include "biasforge/geometry.hpp"

namespace biasforge {

inline constexpr std::string_view kFactorSpaceFormat = "biasforge/factorspace/v1";

struct ColorPayload {
  std::string name;
  Rgb rgb;
  friend bool operator==(const ColorPayload&, const ColorPayload&) = default;
};

/// Absolute camera placement.
struct CameraPosePayload {
  CameraPose pose;
  friend bool operator==(const CameraPosePayload&, const CameraPosePayload&) = default;
};

/// Rotation added to whatever camera pose is active (degrees).
struct EulerOffsetPayload {
  Euler offset;
  friend bool operator==(const EulerOffsetPayload&, const EulerOffsetPayload&) = default;
};

/// Pull the active camera back by level * step_m along its line of sight.
struct ScaleLevelPayload {
  int level = 0;
  double step_m = 0.05;
  friend bool operator==(const ScaleLevelPayload&, const ScaleLevelPayload&) = default;
};

struct PositionPayload {
  std::string label;
  Vec3 xyz;
  friend bool operator==(const PositionPayload&, const PositionPayload&) = default;
};

struct ShapePayload {
  std::string label;
  friend bool operator==(const ShapePayload&, const ShapePayload&) = default;
};

/// Instruction text; "{object}" is replaced with the bound shape label.
struct InstructionPayload {
  std::string text;
  friend bool operator==(const InstructionPayload&, const InstructionPayload&) = default;
};

using Payload = std::variant<ColorPayload, CameraPosePayload, EulerOffsetPayload,
                             ScaleLevelPayload, PositionPayload, ShapePayload,
                             InstructionPayload>;

enum class PayloadKind { color, camera_pose, euler_offset, scale_level, position, shape, instruction };

PayloadKind payload_kind(const Payload& payload);
std::string_view payload_kind_name(PayloadKind kind);

struct FactorValue {
  std::string id;
  std::string label;
  Payload payload;

  friend bool operator==(const FactorValue&, const FactorValue&) = default;
};

enum class DimensionKind { visual, context };

std::string_view dimension_kind_name(DimensionKind kind);

struct FactorDimension {
  std::string name;
  DimensionKind kind = DimensionKind::visual;
  std::vector<FactorValue> values;
  std::size_t baseline_index = 0;

  const FactorValue& baseline() const { return values.at(baseline_index); }
  const FactorValue* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  friend bool operator==(const FactorDimension&, const FactorDimension&) = default;
};

/// dimension name -> value id. Ordered by dimension name.
using Assignment = std::map<std::string, std::string>;
using BaselineAssignment = Assignment;

/// Partitioned factor universe. Immutable once built.
class FactorSpace {
 public:
  const std::vector<FactorDimension>& visual_dims() const { return visual_; }
  const std::vector<FactorDimension>& context_dims() const { return context_; }

  const FactorDimension* find(std::string_view name) const;
  const FactorDimension& at(std::string_view name) const;
  bool is_visual(std::string_view name) const;
  bool is_context(std::string_view name) const;

  /// Dimension whose values carry `kind` payloads, if any.
  const FactorDimension* dimension_with(PayloadKind kind) const;

  friend bool operator==(const FactorSpace&, const FactorSpace&) = default;

 private:
  friend FactorSpace build_space(std::vector<FactorDimension> dims);

  std::vector<FactorDimension> visual_;
  std::vector<FactorDimension> context_;
};

/// Validates every dimension and routes it by kind, keeping declaration order.
/// Also requires each dimension's values to share one payload kind and each
/// payload kind to appear in at most one dimension.
FactorSpace build_space(std::vector<FactorDimension> dims);

BaselineAssignment visual_baselines(const FactorSpace& space);
BaselineAssignment context_baseline(const FactorSpace& space);

// Serialization. Parsed files may declare a dimension with a "sampler" object
// instead of "values"; the serialized form always lists expanded values.
FactorSpace parse_space(std::string_view json_text);
FactorSpace load_space(const std::filesystem::path& path);
std::string serialize_space(const FactorSpace& space);

}  // namespace biasforge
