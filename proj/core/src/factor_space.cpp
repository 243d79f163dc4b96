#include "biasforge/factor_space.hpp"

#include <set>

#include "biasforge/error.hpp"

namespace biasforge {

PayloadKind payload_kind(const Payload& payload) {
  return static_cast<PayloadKind>(payload.index());
}

std::string_view payload_kind_name(PayloadKind kind) {
  switch (kind) {
    case PayloadKind::color: return "color";
    case PayloadKind::camera_pose: return "camera_pose";
    case PayloadKind::euler_offset: return "euler_offset";
    case PayloadKind::scale_level: return "scale_level";
    case PayloadKind::position: return "position";
    case PayloadKind::shape: return "shape";
    case PayloadKind::instruction: return "instruction";
  }
  return "unknown";
}

std::string_view dimension_kind_name(DimensionKind kind) {
  return kind == DimensionKind::visual ? "visual" : "context";
}

const FactorValue* FactorDimension::find(std::string_view id) const {
  for (const FactorValue& v : values) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

std::optional<std::size_t> FactorDimension::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].id == id) return i;
  }
  return std::nullopt;
}

const FactorDimension* FactorSpace::find(std::string_view name) const {
  for (const auto* list : {&visual_, &context_}) {
    for (const FactorDimension& d : *list) {
      if (d.name == name) return &d;
    }
  }
  return nullptr;
}

const FactorDimension& FactorSpace::at(std::string_view name) const {
  const FactorDimension* d = find(name);
  if (d == nullptr) {
    throw Error(Errc::MissingDimension, "no dimension named '" + std::string(name) + "'");
  }
  return *d;
}

bool FactorSpace::is_visual(std::string_view name) const {
  const FactorDimension* d = find(name);
  return d != nullptr && d->kind == DimensionKind::visual;
}

bool FactorSpace::is_context(std::string_view name) const {
  const FactorDimension* d = find(name);
  return d != nullptr && d->kind == DimensionKind::context;
}

const FactorDimension* FactorSpace::dimension_with(PayloadKind kind) const {
  for (const auto* list : {&visual_, &context_}) {
    for (const FactorDimension& d : *list) {
      if (payload_kind(d.values.front().payload) == kind) return &d;
    }
  }
  return nullptr;
}

namespace {

void validate_dimension(const FactorDimension& dim) {
  if (dim.name.empty()) {
    throw Error(Errc::SchemaError, "dimension name must be non-empty");
  }
  if (dim.values.empty()) {
    throw Error(Errc::EmptyDimension, "dimension '" + dim.name + "' has no values");
  }
  if (dim.baseline_index >= dim.values.size()) {
    throw Error(Errc::BadBaselineIndex,
                "dimension '" + dim.name + "' baseline index " +
                    std::to_string(dim.baseline_index) + " out of range");
  }
  std::set<std::string_view> ids;
  const PayloadKind kind = payload_kind(dim.values.front().payload);
  for (const FactorValue& v : dim.values) {
    if (v.id.empty()) {
      throw Error(Errc::SchemaError, "dimension '" + dim.name + "' has a value with empty id");
    }
    if (!ids.insert(v.id).second) {
      throw Error(Errc::DuplicateValueId,
                  "dimension '" + dim.name + "' repeats value id '" + v.id + "'");
    }
    if (payload_kind(v.payload) != kind) {
      throw Error(Errc::InvalidPayload,
                  "dimension '" + dim.name + "' mixes payload kinds at '" + v.id + "'");
    }
    if (const auto* c = std::get_if<ColorPayload>(&v.payload)) {
      for (int channel : {c->rgb.r, c->rgb.g, c->rgb.b}) {
        if (channel < 0 || channel > 255) {
          throw Error(Errc::InvalidPayload, "color '" + v.id + "' has rgb outside [0,255]");
        }
      }
    }
    if (const auto* s = std::get_if<ScaleLevelPayload>(&v.payload)) {
      if (s->level < 0 || !(s->step_m > 0.0)) {
        throw Error(Errc::InvalidPayload, "scale level '" + v.id + "' must be >= 0 with step > 0");
      }
    }
  }
}

}  // namespace

FactorSpace build_space(std::vector<FactorDimension> dims) {
  FactorSpace space;
  std::set<std::string> names;
  std::set<PayloadKind> kinds;
  for (FactorDimension& dim : dims) {
    validate_dimension(dim);
    if (!names.insert(dim.name).second) {
      throw Error(Errc::DuplicateDimensionName, "dimension '" + dim.name + "' declared twice");
    }
    const PayloadKind kind = payload_kind(dim.values.front().payload);
    if (!kinds.insert(kind).second) {
      throw Error(Errc::InvalidPayload, "payload kind '" + std::string(payload_kind_name(kind)) +
                                            "' used by more than one dimension");
    }
    if (dim.kind == DimensionKind::visual) {
      space.visual_.push_back(std::move(dim));
    } else {
      space.context_.push_back(std::move(dim));
    }
  }
  return space;
}

BaselineAssignment visual_baselines(const FactorSpace& space) {
  BaselineAssignment out;
  for (const FactorDimension& d : space.visual_dims()) out.emplace(d.name, d.baseline().id);
  return out;
}

BaselineAssignment context_baseline(const FactorSpace& space) {
  BaselineAssignment out;
  for (const FactorDimension& d : space.context_dims()) out.emplace(d.name, d.baseline().id);
  return out;
}

}  // namespace biasforge
