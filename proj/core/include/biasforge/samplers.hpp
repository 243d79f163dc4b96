#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "biasforge/colors.hpp"
#include "biasforge/factor_space.hpp"
#include "biasforge/geometry.hpp"

namespace biasforge {

/// A named, pure generator of the values of one dimension.
struct SamplerModule {
  std::string name;
  std::string dimension_name;
  std::function<std::vector<FactorValue>()> generate;
};

SamplerModule named_color_sampler(std::string dimension, ColorTableOptions options = {});

/// Nine yaw/pitch offsets, ids like "y-6_p+0". The zero offset is "y+0_p+0".
SamplerModule euler_grid_sampler(std::string dimension, double step_deg = 6.0);

/// levels+1 pull-back levels with ids "d0".."dN".
SamplerModule distance_level_sampler(std::string dimension, double step_m = 0.05,
                                     std::size_t levels = 8);

/// Look-at cameras on concentric rings, ids "ring<r>_cam<k>".
SamplerModule orbit_camera_sampler(std::string dimension, Vec3 target,
                                   std::vector<OrbitRing> rings, std::size_t per_ring = 7,
                                   double start_azimuth_deg = 0.0);

/// rows x cols table-top grid, row-major, ids "p0".."pN".
SamplerModule grid_position_sampler(std::string dimension, Vec3 origin, double dx, double dy,
                                    std::size_t rows, std::size_t cols);

SamplerModule list_sampler(std::string dimension, std::vector<FactorValue> values);

/// Runs a sampler and wraps its output as a dimension.
FactorDimension make_dimension(const SamplerModule& sampler, DimensionKind kind,
                               const std::string& baseline_id);

}  // namespace biasforge
