#pragma once

// Bounded real profiles on S^1 and S^2: sums of constant caps or tabulated cells,
// their positive/negative parts, L1 integrals and the divergence condition check.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "conewave/cone_geometry.hpp"
#include "conewave/quadrature.hpp"

namespace conewave {

struct ProfileCap {
  UnitVector axis;
  double halfAngle;  // radians
  double value;
};

enum class ProfilePart { Full, Positive, Negative };

class SphericalProfile {
 public:
  enum class Kind { Caps, Grid };

  static SphericalProfile caps(std::size_t n, std::vector<ProfileCap> caps,
                               std::optional<ConeSpec> declaredSupport = std::nullopt) {
    require(n == 2 || n == 3, "spherical profiles support n in {2, 3}");
    for (const auto& c : caps) {
      require(c.axis.size() == n, "cap axis dimension mismatch");
      require(c.halfAngle >= 0.0 && c.halfAngle <= kPi, "cap half-angle must lie in [0, pi]");
      require(std::isfinite(c.value), "cap value must be finite");
    }
    SphericalProfile p(n, Kind::Caps, std::move(declaredSupport));
    p.caps_ = std::move(caps);
    return p;
  }

  // n = 2: `values` has one row of M uniform angular cells [2 pi k/M, 2 pi (k+1)/M).
  // n = 3: rows are polar bands in theta (from e3), columns azimuthal cells in phi.
  static SphericalProfile grid(std::size_t n, std::vector<std::vector<double>> values,
                               std::optional<ConeSpec> declaredSupport = std::nullopt) {
    require(n == 2 || n == 3, "spherical profiles support n in {2, 3}");
    require(!values.empty() && !values.front().empty(), "grid profile needs values");
    if (n == 2) require(values.size() == 1, "n = 2 grid profile takes a single row");
    for (const auto& row : values) {
      require(row.size() == values.front().size(), "grid profile rows must have equal length");
      for (double v : row) require(std::isfinite(v), "grid profile values must be finite");
    }
    SphericalProfile p(n, Kind::Grid, std::move(declaredSupport));
    p.grid_ = std::move(values);
    return p;
  }

  static SphericalProfile constant(std::size_t n, double value, const CircularCone& region) {
    return caps(n, {{region.axis(), region.half_angle(), value}}, ConeSpec(region));
  }

  std::size_t dim() const { return n_; }
  Kind kind() const { return kind_; }
  ProfilePart part() const { return part_; }
  const std::vector<ProfileCap>& cap_list() const { return caps_; }
  const std::vector<std::vector<double>>& grid_values() const { return grid_; }
  const std::optional<ConeSpec>& declared_support() const { return support_; }

  SphericalProfile positive_part() const { return with_part(ProfilePart::Positive); }
  SphericalProfile negative_part() const { return with_part(ProfilePart::Negative); }

  SphericalProfile scaled(double c) const {
    SphericalProfile p = *this;
    for (auto& cap : p.caps_) cap.value *= c;
    for (auto& row : p.grid_)
      for (double& v : row) v *= c;
    if (c < 0.0 && part_ != ProfilePart::Full)
      p.part_ = part_ == ProfilePart::Positive ? ProfilePart::Negative : ProfilePart::Positive;
    return p;
  }

  // Upper bound for |phi|.
  double bound() const {
    double b = 0.0;
    for (const auto& c : caps_) b += std::abs(c.value);
    for (const auto& row : grid_)
      for (double v : row) b = std::max(b, std::abs(v));
    return b;
  }

  double operator()(std::span<const double> w) const {
    require(w.size() == n_, "profile evaluation dimension mismatch");
    if (support_ && !cone_contains(*support_, w, true)) return 0.0;
    return apply_part(raw(w));
  }
  double operator()(const UnitVector& w) const { return (*this)(w.coords()); }

  // Value of the unrestricted function (before part selection).
  double raw(std::span<const double> w) const {
    if (kind_ == Kind::Caps) {
      double s = 0.0;
      for (const auto& c : caps_)
        if (angle_between(c.axis.coords(), w) <= c.halfAngle + 1e-14) s += c.value;
      return s;
    }
    if (n_ == 2) {
      const auto& row = grid_.front();
      const double a = planar_angle(w[0], w[1]);
      auto k = static_cast<std::size_t>(a / (2.0 * kPi) * static_cast<double>(row.size()));
      return row[std::min(k, row.size() - 1)];
    }
    const double th = std::acos(std::clamp(w[2] / norm(w), -1.0, 1.0));
    const double ph = planar_angle(w[0], w[1]);
    auto i = static_cast<std::size_t>(th / kPi * static_cast<double>(grid_.size()));
    auto j = static_cast<std::size_t>(ph / (2.0 * kPi) * static_cast<double>(grid_.front().size()));
    return grid_[std::min(i, grid_.size() - 1)][std::min(j, grid_.front().size() - 1)];
  }

  double apply_part(double v) const {
    switch (part_) {
      case ProfilePart::Positive: return std::max(v, 0.0);
      case ProfilePart::Negative: return std::max(-v, 0.0);
      default: return v;
    }
  }

  // Breakpoints in angle (n = 2) where the profile may jump.
  std::vector<double> breakpoints_2d() const {
    std::vector<double> b{0.0, 2.0 * kPi};
    auto add = [&](double a) {
      a = std::fmod(a, 2.0 * kPi);
      if (a < 0) a += 2.0 * kPi;
      b.push_back(a);
    };
    for (const auto& c : caps_) {
      const double a0 = planar_angle(c.axis[0], c.axis[1]);
      add(a0 - c.halfAngle);
      add(a0 + c.halfAngle);
    }
    if (kind_ == Kind::Grid) {
      const auto m = grid_.front().size();
      for (std::size_t k = 0; k <= m; ++k) b.push_back(2.0 * kPi * static_cast<double>(k) / static_cast<double>(m));
    }
    if (support_) {
      if (const auto* cc = std::get_if<CircularCone>(&*support_); cc && !cc->is_whole_space()) {
        const double a0 = planar_angle(cc->axis()[0], cc->axis()[1]);
        add(a0 - cc->half_angle());
        add(a0 + cc->half_angle());
      } else if (const auto* pc = std::get_if<PolyhedralCone>(&*support_)) {
        for (const auto& g : pc->generators()) add(planar_angle(g[0], g[1]));
      }
    }
    return quad::clip_breaks(b, 0.0, 2.0 * kPi);
  }

  // Directions where this part (or the full profile) is nonzero.
  DirectionSet support_set() const {
    DirectionSet s;
    if (n_ == 2) {
      const auto br = breakpoints_2d();
      for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double mid = 0.5 * (br[i] + br[i + 1]);
        if ((*this)(UnitVector::from_angle(mid)) == 0.0) continue;
        const double half = 0.5 * (br[i + 1] - br[i]);
        s.caps.push_back(CircularCone::from_half_angle(UnitVector::from_angle(mid), half));
      }
      return s;
    }
    if (kind_ == Kind::Caps && caps_disjoint()) {
      for (const auto& c : caps_)
        if (apply_part(c.value) != 0.0) s.caps.push_back(CircularCone::from_half_angle(c.axis, c.halfAngle));
      if (!support_) return s;
    }
    s.caps.clear();
    for (int i = 0; i <= 360; ++i)
      for (int j = 0; j < (i == 0 || i == 360 ? 1 : 720); ++j) {
        const auto w = UnitVector::from_spherical(i * 0.5 * kDegree, j * 0.5 * kDegree);
        if ((*this)(w) != 0.0) s.points.push_back(w);
      }
    return s;
  }

  bool caps_disjoint() const {
    for (std::size_t i = 0; i < caps_.size(); ++i)
      for (std::size_t j = i + 1; j < caps_.size(); ++j)
        if (angle_between(caps_[i].axis, caps_[j].axis) <= caps_[i].halfAngle + caps_[j].halfAngle) return false;
    return true;
  }

 private:
  SphericalProfile(std::size_t n, Kind kind, std::optional<ConeSpec> support)
      : n_(n), kind_(kind), support_(std::move(support)) {
    if (support_) require(cone_dim(*support_) == n_, "declared support dimension mismatch");
  }

  SphericalProfile with_part(ProfilePart p) const {
    require(part_ == ProfilePart::Full, "part already selected");
    SphericalProfile q = *this;
    q.part_ = p;
    return q;
  }

  std::size_t n_;
  Kind kind_;
  std::optional<ConeSpec> support_;
  ProfilePart part_ = ProfilePart::Full;
  std::vector<ProfileCap> caps_;
  std::vector<std::vector<double>> grid_;
};

namespace detail {

// Azimuthal arc [c - h, c + h] of the latitude circle at colatitude `th` lying in the cap.
// Returns h < 0 for empty, h >= pi for the whole circle.
inline std::pair<double, double> latitude_arc(const UnitVector& axis, double alpha, double th) {
  const double thc = std::acos(std::clamp(axis[2], -1.0, 1.0));
  const double phc = planar_angle(axis[0], axis[1]);
  const double A = std::sin(th) * std::sin(thc), B = std::cos(th) * std::cos(thc);
  const double ca = std::cos(alpha);
  if (A < 1e-15) return {phc, (B >= ca) ? kPi : -1.0};
  const double c = (ca - B) / A;
  if (c <= -1.0) return {phc, kPi};
  if (c > 1.0) return {phc, -1.0};
  return {phc, std::acos(c)};
}

}  // namespace detail

// Integral over S^{n-1} of the profile (with its part selection).
inline double sphere_integral(const SphericalProfile& p, double relTol = 1e-10) {
  const std::size_t n = p.dim();
  if (n == 2) {
    const auto br = p.breakpoints_2d();
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i)
      s += (br[i + 1] - br[i]) * p(UnitVector::from_angle(0.5 * (br[i] + br[i + 1])));
    return s;
  }
  // n = 3: exact piecewise-constant integration in azimuth, adaptive in colatitude.
  auto ring = [&](double th) {
    std::vector<double> b{0.0, 2.0 * kPi};
    auto add = [&](double a) {
      a = std::fmod(a, 2.0 * kPi);
      if (a < 0) a += 2.0 * kPi;
      b.push_back(a);
    };
    for (const auto& c : p.cap_list()) {
      const auto [ph, h] = detail::latitude_arc(c.axis, c.halfAngle, th);
      if (h > 0 && h < kPi) {
        add(ph - h);
        add(ph + h);
      }
    }
    if (p.kind() == SphericalProfile::Kind::Grid) {
      const auto m = p.grid_values().front().size();
      for (std::size_t k = 0; k <= m; ++k) b.push_back(2.0 * kPi * static_cast<double>(k) / static_cast<double>(m));
    }
    if (const auto& sup = p.declared_support()) {
      if (const auto* cc = std::get_if<CircularCone>(&*sup); cc && !cc->is_whole_space()) {
        const auto [ph, h] = detail::latitude_arc(cc->axis(), cc->half_angle(), th);
        if (h > 0 && h < kPi) {
          add(ph - h);
          add(ph + h);
        }
      }
    }
    const auto br = quad::clip_breaks(b, 0.0, 2.0 * kPi);
    double s = 0.0;
    const double st = std::sin(th), ct = std::cos(th);
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double ph = 0.5 * (br[i] + br[i + 1]);
      const std::vector<double> w{st * std::cos(ph), st * std::sin(ph), ct};
      s += (br[i + 1] - br[i]) * p(w);
    }
    return s * st;
  };
  std::vector<double> tb{0.0, kPi};
  auto addCap = [&](const UnitVector& ax, double a) {
    const double thc = std::acos(std::clamp(ax[2], -1.0, 1.0));
    tb.push_back(thc - a);
    tb.push_back(thc + a);
    tb.push_back(a - thc);
    tb.push_back(2.0 * kPi - thc - a);
    tb.push_back(thc);
  };
  for (const auto& c : p.cap_list()) addCap(c.axis, c.halfAngle);
  if (p.kind() == SphericalProfile::Kind::Grid) {
    const auto m = p.grid_values().size();
    for (std::size_t k = 0; k <= m; ++k) tb.push_back(kPi * static_cast<double>(k) / static_cast<double>(m));
  }
  if (const auto& sup = p.declared_support())
    if (const auto* cc = std::get_if<CircularCone>(&*sup); cc && !cc->is_whole_space())
      addCap(cc->axis(), cc->half_angle());
  const double scale = std::max(1.0, p.bound()) * 4.0 * kPi;
  const auto br = quad::clip_breaks(tb, 0.0, kPi);
  // Arc lengths have square-root behaviour at the breakpoints; the cosine map removes it.
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i], b = br[i + 1];
    auto g = [&](double t) {
      const double th = a + 0.5 * (b - a) * (1.0 - std::cos(kPi * t));
      return ring(th) * 0.5 * (b - a) * kPi * std::sin(kPi * t);
    };
    sum += quad::adaptive(g, 0.0, 1.0, relTol * scale / static_cast<double>(br.size()));
  }
  return sum;
}

// Integral of a smooth function over S^{n-1}: periodic trapezoid (n = 2) or Gauss-Legendre
// in colatitude times trapezoid in azimuth (n = 3), refined by doubling until two levels
// agree to `relTol`.
template <class F>
double integrate_smooth(F&& f, std::size_t n, double relTol = 1e-12) {
  require(n == 2 || n == 3, "smooth sphere quadrature supports n in {2, 3}");
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t m = 64; m <= (1u << 16); m *= 2) {
    double s = 0.0;
    if (n == 2) {
      for (std::size_t k = 0; k < m; ++k) {
        const double a = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
        const std::vector<double> w{std::cos(a), std::sin(a)};
        s += f(std::span<const double>(w));
      }
      s *= 2.0 * kPi / static_cast<double>(m);
    } else {
      const std::size_t bands = m / 2;
      const auto& rule = quad::GaussRule<20>::get();
      for (std::size_t b = 0; b < bands; ++b) {
        const double t0 = kPi * b / bands, t1 = kPi * (b + 1) / bands;
        for (std::size_t q = 0; q < 20; ++q) {
          const double th = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * rule.nodes[q];
          double ring = 0.0;
          for (std::size_t k = 0; k < m; ++k) {
            const double ph = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(m);
            const std::vector<double> w{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)};
            ring += f(std::span<const double>(w));
          }
          s += 0.5 * (t1 - t0) * rule.weights[q] * std::sin(th) * ring * 2.0 * kPi / static_cast<double>(m);
        }
      }
    }
    if (std::abs(s - prev) <= relTol * std::max(1.0, std::abs(s))) return s;
    prev = s;
    if (n == 3 && m >= 1024) break;
  }
  throw NumericalError("smooth sphere quadrature did not converge");
}

struct ConditionReport {
  double lhs = 0.0;
  double rhsRaw = 0.0;
  double kappa = kInfinity;
  double rhsScaled = 0.0;
  bool holds = false;
  std::optional<double> s;
  double margin() const { return lhs - rhsScaled; }
};

// kappa^{-n}, with +inf mapped to 0.
inline double kappa_power(double kappa, std::size_t n) {
  if (std::isinf(kappa)) return 0.0;
  require(kappa > 0.0, "kappa must be positive for the condition check");
  return std::pow(kappa, -static_cast<double>(n));
}

// Smallest s in {1.5 * 2^j} with cos(1/s) lhs > rhsScaled; 1.5 when the negative part vanishes.
inline std::optional<double> find_s(double lhs, double rhsRaw, double rhsScaled) {
  if (rhsRaw == 0.0) return lhs > 0.0 ? std::optional<double>(1.5) : std::nullopt;
  for (int j = 0; j < 60; ++j) {
    const double s = 1.5 * std::ldexp(1.0, j);
    if (std::cos(1.0 / s) * lhs > rhsScaled) return s;
  }
  return std::nullopt;
}

inline ConditionReport condition_from(double lhs, double rhsRaw, double kappa, std::size_t n) {
  ConditionReport r;
  r.lhs = lhs;
  r.rhsRaw = rhsRaw;
  r.kappa = kappa;
  r.rhsScaled = rhsRaw == 0.0 ? 0.0 : kappa_power(kappa, n) * rhsRaw;
  r.holds = r.lhs > r.rhsScaled;
  if (r.holds) r.s = find_s(r.lhs, r.rhsRaw, r.rhsScaled);
  return r;
}

// Checks that the profile vanishes outside V (sampled on a 0.5 degree grid).
inline void check_support(const SphericalProfile& p, const ConeSpec& v) {
  require(cone_dim(v) == p.dim(), "profile and cone dimensions differ");
  const DirectionSet s = p.support_set();
  for (const auto& w : s.points)
    if (!cone_contains(v, w, true)) throw ConfigError("profile support leaves V");
  for (const auto& c : s.caps) {
    for (const auto& w : detail::sample_circular(c, 64))
      if (!cone_contains(v, w, true)) throw ConfigError("profile support leaves V");
  }
}

inline ConditionReport check_condition(const SphericalProfile& p, const ConeSpec& v, const ConeSpec& vPrime,
                                       bool useKappaV = false, const SearchOptions& opt = {}) {
  check_support(p, v);
  require(interior_nonempty(vPrime), "V' has empty interior");
  const auto pos = p.positive_part(), neg = p.negative_part();
  const double lhs = sphere_integral(pos), rhs = sphere_integral(neg);
  double kappa;
  if (useKappaV) kappa = kappaV(v, vPrime, opt);
  else kappa = kappa0(neg.support_set(), vPrime, opt);
  return condition_from(lhs, rhs, kappa, p.dim());
}

}  // namespace conewave
