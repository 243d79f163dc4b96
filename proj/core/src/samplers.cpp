#include "biasforge/samplers.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "biasforge/error.hpp"

namespace biasforge {

namespace {

// "+6", "-6", "+0", "+2.5"
std::string signed_number(double v) {
  char buf[32];
  if (v == std::floor(v)) {
    std::snprintf(buf, sizeof buf, "%+.0f", v);
  } else {
    std::snprintf(buf, sizeof buf, "%+g", v);
  }
  std::string s = buf;
  if (s == "-0") s = "+0";
  return s;
}

}  // namespace

SamplerModule named_color_sampler(std::string dimension, ColorTableOptions options) {
  return {"named_colors", dimension, [options] {
            std::vector<FactorValue> out;
            for (const NamedColor& c : color_table(options)) {
              std::string name(c.name);
              out.push_back({name, name, ColorPayload{name, c.rgb}});
            }
            return out;
          }};
}

SamplerModule euler_grid_sampler(std::string dimension, double step_deg) {
  if (!(step_deg > 0.0)) {
    throw Error(Errc::NonPositiveStep, "euler grid step must be positive");
  }
  return {"euler_grid", dimension, [step_deg] {
            std::vector<FactorValue> out;
            for (const CameraPose& p : euler_perturbations(CameraPose{}, step_deg)) {
              const std::string id =
                  "y" + signed_number(p.euler.yaw) + "_p" + signed_number(p.euler.pitch);
              out.push_back({id, "yaw " + signed_number(p.euler.yaw) + " pitch " +
                                     signed_number(p.euler.pitch),
                             EulerOffsetPayload{p.euler}});
            }
            return out;
          }};
}

SamplerModule distance_level_sampler(std::string dimension, double step_m, std::size_t levels) {
  if (!(step_m > 0.0)) throw Error(Errc::NonPositiveStep, "distance step must be positive");
  if (levels == 0) throw Error(Errc::ZeroLevels, "at least one distance level is required");
  return {"distance_levels", dimension, [step_m, levels] {
            std::vector<FactorValue> out;
            for (std::size_t k = 0; k <= levels; ++k) {
              const std::string id = "d" + std::to_string(k);
              out.push_back({id, "distance level " + std::to_string(k),
                             ScaleLevelPayload{static_cast<int>(k), step_m}});
            }
            return out;
          }};
}

SamplerModule orbit_camera_sampler(std::string dimension, Vec3 target,
                                   std::vector<OrbitRing> rings, std::size_t per_ring,
                                   double start_azimuth_deg) {
  // Fail at construction rather than first use.
  (void)orbit_rings(target, rings, per_ring, start_azimuth_deg);
  return {"orbit_rings", dimension, [=] {
            std::vector<FactorValue> out;
            const auto poses = orbit_rings(target, rings, per_ring, start_azimuth_deg);
            for (std::size_t i = 0; i < poses.size(); ++i) {
              const std::string id =
                  "ring" + std::to_string(i / per_ring) + "_cam" + std::to_string(i % per_ring);
              out.push_back({id, "orbit " + id, CameraPosePayload{poses[i]}});
            }
            return out;
          }};
}

SamplerModule grid_position_sampler(std::string dimension, Vec3 origin, double dx, double dy,
                                    std::size_t rows, std::size_t cols) {
  if (rows == 0 || cols == 0) throw Error(Errc::EmptyDimension, "position grid is empty");
  return {"grid_positions", dimension, [=] {
            std::vector<FactorValue> out;
            for (std::size_t r = 0; r < rows; ++r) {
              for (std::size_t c = 0; c < cols; ++c) {
                const std::string id = "p" + std::to_string(r * cols + c);
                const Vec3 xyz{origin.x + dx * static_cast<double>(r),
                               origin.y + dy * static_cast<double>(c), origin.z};
                out.push_back({id, id, PositionPayload{id, xyz}});
              }
            }
            return out;
          }};
}

SamplerModule list_sampler(std::string dimension, std::vector<FactorValue> values) {
  return {"list", dimension, [values = std::move(values)] { return values; }};
}

FactorDimension make_dimension(const SamplerModule& sampler, DimensionKind kind,
                               const std::string& baseline_id) {
  FactorDimension dim;
  dim.name = sampler.dimension_name;
  dim.kind = kind;
  dim.values = sampler.generate();
  const auto idx = dim.index_of(baseline_id);
  if (!idx) {
    throw Error(Errc::BadBaselineIndex, "baseline '" + baseline_id +
                                            "' not produced by sampler for '" + dim.name + "'");
  }
  dim.baseline_index = *idx;
  return dim;
}

}  // namespace biasforge
