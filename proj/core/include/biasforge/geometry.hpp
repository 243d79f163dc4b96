#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace biasforge {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(double s, const Vec3& v);
double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& v);
Vec3 normalize(const Vec3& v);

/// Euler angles in degrees. Rotation is intrinsic yaw (Z), then pitch (Y),
/// then roll (X).
struct Euler {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  friend bool operator==(const Euler&, const Euler&) = default;
};

struct CameraPose {
  Vec3 position;
  Euler euler;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

/// Unit view direction: the +X axis rotated by `euler`. Roll does not move it.
Vec3 forward(const Euler& euler);

/// Yaw/pitch that make forward() point from `position` at `target`; roll is 0.
/// Throws DegenerateLookAt when the points coincide or the direction is
/// vertical (pitch would reach +-90 degrees).
Euler look_at_euler(const Vec3& position, const Vec3& target);

/// 3x3 grid of yaw/pitch offsets in {-step, 0, +step}, yaw-major. The centre
/// element (index 4) is `base` unchanged.
std::vector<CameraPose> euler_perturbations(const CameraPose& base, double step_deg = 6.0);

/// levels+1 poses; pose k sits k*step_m behind `base` along its line of sight.
/// The stored euler angles are copied verbatim.
std::vector<CameraPose> distance_scale_poses(const CameraPose& base, double step_m = 0.05,
                                             std::size_t levels = 8);

struct OrbitRing {
  double radius_m = 0.0;
  double height_m = 0.0;
};

inline constexpr std::array<OrbitRing, 3> kDefaultOrbitRings{
    OrbitRing{0.4, 0.5}, OrbitRing{0.55, 0.6}, OrbitRing{0.7, 0.7}};

/// per_ring cameras per ring at azimuths start + 2*pi*k/per_ring, each looking
/// at `target`. Ring-major order.
std::vector<CameraPose> orbit_rings(const Vec3& target, std::span<const OrbitRing> rings,
                                    std::size_t per_ring = 7, double start_azimuth_deg = 0.0);

double deg_to_rad(double deg);
double rad_to_deg(double rad);

}  // namespace biasforge
