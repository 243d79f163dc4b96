#include "biasforge/geometry.hpp"

#include <cmath>
#include <numbers>

#include "biasforge/error.hpp"

namespace biasforge {

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalize(const Vec3& v) {
  const double n = norm(v);
  return {v.x / n, v.y / n, v.z / n};
}

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

Vec3 forward(const Euler& euler) {
  // First column of Rz(yaw) * Ry(pitch) * Rx(roll).
  const double yaw = deg_to_rad(euler.yaw);
  const double pitch = deg_to_rad(euler.pitch);
  return {std::cos(yaw) * std::cos(pitch), std::sin(yaw) * std::cos(pitch), -std::sin(pitch)};
}

Euler look_at_euler(const Vec3& position, const Vec3& target) {
  const Vec3 d = target - position;
  const double len = norm(d);
  if (!(len > 0.0)) {
    throw Error(Errc::DegenerateLookAt, "camera position coincides with target");
  }
  const double horizontal = std::hypot(d.x, d.y);
  if (horizontal <= 1e-12 * len) {
    throw Error(Errc::DegenerateLookAt, "line of sight is vertical");
  }
  Euler e;
  e.yaw = rad_to_deg(std::atan2(d.y, d.x));
  e.pitch = rad_to_deg(std::atan2(-d.z, horizontal));
  e.roll = 0.0;
  return e;
}

std::vector<CameraPose> euler_perturbations(const CameraPose& base, double step_deg) {
  if (!(step_deg > 0.0)) {
    throw Error(Errc::NonPositiveStep, "euler perturbation step must be positive");
  }
  std::vector<CameraPose> out;
  out.reserve(9);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dp = -1; dp <= 1; ++dp) {
      CameraPose pose = base;
      if (dy != 0) pose.euler.yaw = base.euler.yaw + dy * step_deg;
      if (dp != 0) pose.euler.pitch = base.euler.pitch + dp * step_deg;
      out.push_back(pose);
    }
  }
  return out;
}

std::vector<CameraPose> distance_scale_poses(const CameraPose& base, double step_m,
                                             std::size_t levels) {
  if (!(step_m > 0.0)) {
    throw Error(Errc::NonPositiveStep, "distance step must be positive");
  }
  if (levels == 0) {
    throw Error(Errc::ZeroLevels, "at least one distance level is required");
  }
  const Vec3 fwd = forward(base.euler);
  std::vector<CameraPose> out;
  out.reserve(levels + 1);
  out.push_back(base);
  for (std::size_t k = 1; k <= levels; ++k) {
    CameraPose pose = base;
    pose.position = base.position - (static_cast<double>(k) * step_m) * fwd;
    out.push_back(pose);
  }
  return out;
}

std::vector<CameraPose> orbit_rings(const Vec3& target, std::span<const OrbitRing> rings,
                                    std::size_t per_ring, double start_azimuth_deg) {
  if (per_ring == 0) {
    throw Error(Errc::ZeroLevels, "orbit ring needs at least one camera");
  }
  std::vector<CameraPose> out;
  out.reserve(rings.size() * per_ring);
  const double start = deg_to_rad(start_azimuth_deg);
  const double gap = 2.0 * std::numbers::pi / static_cast<double>(per_ring);
  for (const OrbitRing& ring : rings) {
    if (!(ring.radius_m > 0.0)) {
      throw Error(Errc::NonPositiveStep, "orbit ring radius must be positive");
    }
    for (std::size_t k = 0; k < per_ring; ++k) {
      const double az = start + gap * static_cast<double>(k);
      CameraPose pose;
      pose.position = {target.x + ring.radius_m * std::cos(az),
                       target.y + ring.radius_m * std::sin(az), target.z + ring.height_m};
      pose.euler = look_at_euler(pose.position, target);
      out.push_back(pose);
    }
  }
  return out;
}

}  // namespace biasforge
