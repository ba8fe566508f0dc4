#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "conewave/error.hpp"

namespace conewave {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDegree = kPi / 180.0;
inline constexpr std::size_t kMaxDim = 8;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Direction on S^{n-1}, 1 <= n <= 8.
class UnitVector {
 public:
  explicit UnitVector(std::vector<double> coords) : coords_(std::move(coords)) {
    require(!coords_.empty() && coords_.size() <= kMaxDim,
            "unit vector dimension must lie in [1, 8]");
    require(std::abs(norm(coords_) - 1.0) <= 1e-12,
            "unit vector must have Euclidean norm 1");
  }

  static UnitVector normalized(std::vector<double> v) {
    const double len = norm(v);
    require(len > 0.0 && std::isfinite(len), "cannot normalize a zero or non-finite vector");
    for (double& c : v) c /= len;
    return UnitVector(std::move(v));
  }

  static UnitVector basis(std::size_t n, std::size_t i) {
    std::vector<double> v(n, 0.0);
    v.at(i) = 1.0;
    return UnitVector(std::move(v));
  }

  // Planar direction at angle phi from e1.
  static UnitVector from_angle(double phi) {
    return UnitVector({std::cos(phi), std::sin(phi)});
  }

  // Polar angle theta from e3, azimuth phi.
  static UnitVector from_spherical(double theta, double phi) {
    return UnitVector({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta)});
  }

  std::size_t size() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }
  const std::vector<double>& vec() const { return coords_; }

  UnitVector operator-() const {
    std::vector<double> v = coords_;
    for (double& c : v) c = -c;
    return UnitVector(std::move(v));
  }

 private:
  std::vector<double> coords_;
};

// Angle in [0, pi] between two nonzero vectors; stable near 0 and pi.
inline double angle_between(std::span<const double> a, std::span<const double> b) {
  const double na = norm(a), nb = norm(b);
  double c = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) c += a[i] * b[i];
  c /= na * nb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] / na - c * b[i] / nb;
    s2 += d * d;
  }
  return std::atan2(std::sqrt(s2), c);
}

inline double angle_between(const UnitVector& a, const UnitVector& b) {
  return angle_between(a.coords(), b.coords());
}

// Angle of a planar vector in [0, 2pi).
inline double planar_angle(double x, double y) {
  double a = std::atan2(y, x);
  if (a < 0.0) a += 2.0 * kPi;
  return a;
}

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace conewave
